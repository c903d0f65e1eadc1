from TM.cli.dot import export_dot
from TM.cli.main import CommandOutcome, main, run_command
