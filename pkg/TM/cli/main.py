"""Command line surface of the TM toolkit.

    python -m TM.cli.main behaviors TM/fixtures/grass.tm --events TM/fixtures/grass.events.json

Every subcommand prints text by default; ``--format json`` prints exactly one
JSON document instead. Exit codes: 0 success, 1 diagnostics or rejection,
2 usage error.
"""
from __future__ import annotations

import contextlib
import functools
import io
import json
from dataclasses import dataclass
from typing import Optional, Sequence

import click

from TM.behavior import (
    check_trace,
    classify_links,
    derive_constraints,
    enumerate_behaviors,
    implication,
    load_trace,
)
from TM.cli.dot import export_dot
from TM.core_model import errors_of, validate_model
from TM.dynamics import derive_event_graph, load_events, validate_dynamic
from TM.errors import TMError
from TM.gc import GlobalContext
from TM.simulator import load_sources, simulate, trace_to_chronology
from TM.tmlang import load_model, serialize, to_json

gc = GlobalContext()

PROG_NAME = "tm"


@dataclass(frozen=True)
class CommandOutcome:
    exit_code: int
    stdout: str


def _emit(payload, text: str, encoded: Optional[str] = None):
    ctx = click.get_current_context()
    if ctx.obj["format"] == "json":
        body = encoded if encoded is not None else json.dumps(payload, indent=2, ensure_ascii=False)
    else:
        body = text
    if ctx.obj["output"]:
        with open(ctx.obj["output"], "w", encoding="utf-8") as stream:
            stream.write(body + "\n")
    else:
        click.echo(body)


def _finish(status: str):
    ctx = click.get_current_context()
    ctx.obj["status"] = status
    ctx.exit(1)


def _fail(error: dict):
    ctx = click.get_current_context()
    click.echo("error: {}: {}".format(error["code"], error["message"]), err=True)
    if ctx.obj["format"] == "json":
        _emit({"error": error}, "")
    _finish("error")


def _reports_errors(func):
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except TMError as exc:
            _fail(exc.to_dict())
        except (ValueError, OSError) as exc:
            _fail({"code": type(exc).__name__, "message": str(exc)})
    return wrapper


def _event_context(file, events):
    model = load_model(file)
    dyn = load_events(events, model)
    return model, dyn, derive_event_graph(dyn)


@click.group()
@click.option("--format", "fmt", type=click.Choice(["json", "text"]), default="text", show_default=True,
              help="Output format; json prints exactly one JSON document")
@click.option("--output", "-o", default=None, type=click.Path(dir_okay=False),
              help="Write the result to this file instead of stdout")
@click.option("--config", "-c", default=None, type=click.Path(exists=True, dir_okay=False),
              help="Path to a config.yaml overriding the packaged defaults")
@click.pass_context
def main(ctx, fmt, output, config):
    if config:
        gc.update_config(config)
    ctx.obj = {"format": fmt, "output": output, "status": "success"}
    gc.start_run(ctx.invoked_subcommand)
    ctx.call_on_close(lambda: gc.stop_run({"status": ctx.obj["status"]}))


@main.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@_reports_errors
def parse(file):
    """Parse a model and print it as interchange JSON or canonical TM text."""
    model = load_model(file)
    if click.get_current_context().obj["format"] == "json":
        _emit(None, "", encoded=to_json(model))
    else:
        _emit(None, serialize(model))


@main.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--events", default=None, type=click.Path(exists=True, dir_okay=False),
              help="Also check the event regions defined in this file")
@_reports_errors
def validate(file, events):
    """Report structural diagnostics of a model."""
    model = load_model(file)
    diagnostics = validate_model(model)
    if events:
        diagnostics += validate_dynamic(load_events(events, model))
    lines = ["{} {} {}: {}".format(d.severity, d.code, d.location, d.message) for d in diagnostics]
    _emit({"diagnostics": [d.to_dict() for d in diagnostics]},
          "\n".join(lines) if lines else "0 diagnostics")
    if errors_of(diagnostics):
        _finish("diagnostics")


@main.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--events", required=True, type=click.Path(exists=True, dir_okay=False), help="Event definitions (JSON)")
@click.option("--max-events", default=None, type=int, help="Refuse to enumerate more events than this")
@click.option("--no-simultaneity", is_flag=True, default=False, help="One event per slot")
@click.option("--workers", default=None, type=int, help="Processes exploring first-slot branches")
@_reports_errors
def behaviors(file, events, max_events, no_simultaneity, workers):
    """List every acceptable chronology of the events."""
    _, _, graph = _event_context(file, events)
    cs = derive_constraints(graph)
    found = enumerate_behaviors(cs, max_events=max_events,
                                allow_simultaneity=False if no_simultaneity else None, workers=workers)
    for note in cs.notes:
        click.echo("note: " + note, err=True)
    _emit([{"slots": b.to_list()} for b in found], "\n".join(b.render() for b in found))


@main.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--events", required=True, type=click.Path(exists=True, dir_okay=False), help="Event definitions (JSON)")
@click.option("--trace", required=True, type=click.Path(exists=True, dir_okay=False), help="Proposed chronology (JSON)")
@_reports_errors
def check(file, events, trace):
    """Accept or reject a proposed chronology."""
    _, _, graph = _event_context(file, events)
    chronology = load_trace(trace)
    verdict = check_trace(derive_constraints(graph), chronology)
    if verdict.accepted:
        _emit(verdict.to_dict(), "accepted: {}".format(chronology.render()))
        return
    lines = ["rejected: {}".format(chronology.render())]
    lines += ["  {} (slots {})".format(v.describe(), ",".join(map(str, v.slots))) for v in verdict.violations]
    _emit(verdict.to_dict(), "\n".join(lines))
    _finish("rejected")


@main.command("simulate")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--sources", required=True, type=click.Path(exists=True, dir_okay=False), help="Token sources (JSON)")
@click.option("--max-ticks", default=None, type=int, help="Upper bound on simulated ticks")
@click.option("--fork", is_flag=True, default=False, help="Split tokens at fan-out instead of taking the lowest arc")
@click.option("--events", default=None, type=click.Path(exists=True, dir_okay=False),
              help="Also map the trace onto these events")
@_reports_errors
def simulate_command(file, sources, max_ticks, fork, events):
    """Run tokens through the model and print the tick trace."""
    model = load_model(file)
    trace = simulate(model, load_sources(sources), max_ticks=max_ticks, fork=True if fork else None)
    payload = trace.to_dict()
    lines = ["{}: {}{}".format(
        tick.index,
        ", ".join("#{} {}".format(token, model.describe_stage(stage)) for token, stage in tick.occupations),
        " (fired {})".format(",".join(map(str, tick.fired))) if tick.fired else "") for tick in trace.ticks]
    if events:
        chronology = trace_to_chronology(trace, load_events(events, model))
        payload["chronology"] = chronology.to_list()
        lines.append("chronology: {}".format(chronology.render()))
    _emit(payload, "\n".join(lines))


@main.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--events", required=True, type=click.Path(exists=True, dir_okay=False), help="Event definitions (JSON)")
@click.option("--trace", required=True, type=click.Path(exists=True, dir_okay=False), help="Accepted chronology (JSON)")
@_reports_errors
def classify(file, events, trace):
    """Label the links between adjacent slots of an accepted chronology."""
    _, _, graph = _event_context(file, events)
    links = classify_links(graph, load_trace(trace))
    _emit({"links": [link.to_dict() for link in links]},
          "\n".join("{} -> {}: {}".format(link.source, link.target, link.kind.value) for link in links))


@main.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--events", required=True, type=click.Path(exists=True, dir_okay=False), help="Event definitions (JSON)")
@click.option("--if", "antecedent", required=True, help="Label of the event that happened")
@click.option("--then", "consequent", required=True, help="Label of the event it should imply")
@_reports_errors
def implies(file, events, antecedent, consequent):
    """Tell whether one event occurs in every behavior holding another."""
    _, _, graph = _event_context(file, events)
    result = implication(derive_constraints(graph), antecedent, consequent)
    lines = [result.describe()] + ["  without {}: {}".format(consequent, b.render()) for b in result.counterexamples]
    _emit(result.to_dict(), "\n".join(lines))


@main.command("export-dot")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--events", default=None, type=click.Path(exists=True, dir_okay=False),
              help="Colour the stages of these event regions")
@_reports_errors
def export_dot_command(file, events):
    """Print the model as a Graphviz digraph."""
    model = load_model(file)
    dot = export_dot(model, load_events(events, model) if events else None)
    _emit({"dot": dot}, dot)


def run_command(argv: Sequence[str]) -> CommandOutcome:
    """Runs one CLI invocation in-process and captures what it writes to stdout."""
    buffer = io.StringIO()
    with contextlib.redirect_stdout(buffer):
        try:
            result = main.main(args=list(argv), prog_name=PROG_NAME, standalone_mode=False)
            code = result if isinstance(result, int) else 0
        except click.ClickException as exc:
            exc.show()
            code = exc.exit_code
        except click.Abort:
            code = 1
    return CommandOutcome(code, buffer.getvalue())


if __name__ == "__main__":
    main(prog_name=PROG_NAME)
