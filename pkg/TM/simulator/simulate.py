from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

from TM.behavior.constraints import Chronology
from TM.core_model.model import ArcKind, StageKind, StaticModel
from TM.dynamics.events import DynamicModel
from TM.errors import EmptyChronology, ForeignStage, InvalidSourceStage, SchemaError
from TM.gc import GlobalContext

logger = logging.getLogger(__name__)

gc = GlobalContext()

StageRef = Union[int, str]


@dataclass(frozen=True)
class Token:
    id: int
    stage: int
    birth: int


@dataclass(frozen=True)
class TickRecord:
    index: int
    occupations: Tuple[Tuple[int, int], ...] = ()
    fired: Tuple[int, ...] = ()

    def to_dict(self):
        return {"occupations": [list(o) for o in self.occupations], "fired": list(self.fired)}


@dataclass(frozen=True)
class Trace:
    ticks: Tuple[TickRecord, ...] = ()

    def to_dict(self):
        return {"ticks": [t.to_dict() for t in self.ticks]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def stages_entered(self) -> List[Tuple[int, int]]:
        return [(tick.index, stage) for tick in self.ticks for _, stage in tick.occupations]


@dataclass
class _Run:
    model: StaticModel
    fork: bool
    tokens: List[Token] = field(default_factory=list)
    issued: int = 0

    def spawn(self, stage: int, tick: int) -> Token:
        self.issued += 1
        token = Token(self.issued, stage, tick)
        self.tokens.append(token)
        return token

    def advance(self, tick: int) -> List[int]:
        """Moves every token one stage along its flow arcs and fires the triggers of the stages they leave."""
        moved, fired = [], []
        for token in sorted(self.tokens, key=lambda t: t.id):
            flows = self.model.outgoing(token.stage, ArcKind.FLOW)
            fired.extend(arc.id for arc in self.model.outgoing(token.stage, ArcKind.TRIGGER))
            if not flows:
                continue
            moved.append(Token(token.id, flows[0].target, token.birth))
            if self.fork:
                for arc in flows[1:]:
                    self.issued += 1
                    moved.append(Token(self.issued, arc.target, tick))
        self.tokens = moved
        for arc_id in sorted(fired):
            self.spawn(self.model.arcs[arc_id].target, tick)
        return sorted(fired)


def _check_source(model: StaticModel, ref: StageRef, tick: int) -> int:
    stage_id = model.stage(ref).id if isinstance(ref, int) else model.resolve_stage_path(ref)
    stage = model.stages[stage_id]
    if stage.kind is not StageKind.CREATE and not stage.accepts:
        raise InvalidSourceStage(
            "{} is neither a create stage nor an input transfer".format(model.describe_stage(stage_id)))
    if tick < 0:
        raise InvalidSourceStage("Spawn tick {} of {} is negative".format(tick, model.describe_stage(stage_id)))
    return stage_id


def simulate(model: StaticModel, sources: Sequence[Tuple[StageRef, int]], max_ticks: Optional[int] = None,
             fork: Optional[bool] = None) -> Trace:
    """Steps tokens through the model one stage per tick.

    A token at a fan-out follows its lowest-id flow arc, or splits into one
    token per arc when fork is on. Trigger arcs of an occupied stage fire on
    the next tick and spawn a fresh token at their target. Stepping stops at
    max_ticks or once no token is left and no source is pending.
    """
    max_ticks = gc.max_ticks if max_ticks is None else max_ticks
    fork = gc.fork if fork is None else fork
    if max_ticks < 1:
        raise ValueError("max_ticks must be at least 1, got {}".format(max_ticks))
    pending: Dict[int, List[int]] = {}
    for ref, tick in sources:
        pending.setdefault(tick, []).append(_check_source(model, ref, tick))

    run = _Run(model, fork)
    ticks: List[TickRecord] = []
    fired: List[int] = []
    for tick in range(max_ticks):
        if not run.tokens and not any(t >= tick for t in pending):
            break
        if tick > 0:
            fired = run.advance(tick)
        for stage_id in pending.get(tick, []):
            run.spawn(stage_id, tick)
        occupations = tuple(sorted((t.id, t.stage) for t in run.tokens))
        ticks.append(TickRecord(tick, occupations, tuple(fired)))

    # trailing ticks where every token has just left the model carry nothing
    while ticks and not ticks[-1].occupations and not ticks[-1].fired:
        ticks.pop()
    trace = Trace(tuple(ticks))
    logger.debug("simulated %d ticks with %d tokens", len(trace.ticks), run.issued)
    gc.log_event(key="simulation_finished", value=len(trace.ticks),
                 metadata={"tokens": run.issued, "max_ticks": max_ticks, "fork": fork})
    return trace


def trace_to_chronology(trace: Trace, dyn: DynamicModel) -> Chronology:
    """Places every event at the tick its region is first entered, then drops the empty ticks."""
    entered: Dict[str, int] = {}
    for tick, stage in trace.stages_entered():
        if stage not in dyn.host.stages:
            raise ForeignStage("Trace occupies stage {} which the host model lacks".format(stage))
        for event in dyn.events:
            if stage in event.region.stage_ids and event.label not in entered:
                entered[event.label] = tick
    if not entered:
        raise EmptyChronology("No event region was entered by the trace")
    slots = [frozenset(e for e, t in entered.items() if t == tick) for tick in sorted(set(entered.values()))]
    return Chronology(tuple(slots))


def sources_from_data(data) -> List[Tuple[StageRef, int]]:
    records = data.get("sources") if isinstance(data, dict) else data
    if not isinstance(records, list):
        raise SchemaError("expected a list of sources", "/sources")
    sources = []
    for index, record in enumerate(records):
        path = "/sources/{}".format(index)
        if not isinstance(record, dict):
            raise SchemaError("expected an object", path)
        stage = record.get("stage")
        if isinstance(stage, bool) or not isinstance(stage, (int, str)):
            raise SchemaError("expected a stage id or path", path + "/stage")
        tick = record.get("tick", 0)
        if isinstance(tick, bool) or not isinstance(tick, int):
            raise SchemaError("expected an integer tick", path + "/tick")
        sources.append((stage, tick))
    return sources


def load_sources(path: str) -> List[Tuple[StageRef, int]]:
    with open(path, "r", encoding="utf-8") as stream:
        return sources_from_data(json.load(stream))
