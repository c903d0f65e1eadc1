from TM.behavior.constraints import (
    Chronology,
    ConstraintSet,
    Verdict,
    Violation,
    check_trace,
    derive_constraints,
    load_trace,
    render_chronology,
)
from TM.behavior.enumerate import brute_force_oracle, enumerate_behaviors, sequences
from TM.behavior.implication import Implication, implication
from TM.behavior.links import Link, LinkKind, classify_links
