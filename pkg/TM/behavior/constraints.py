from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Tuple

from TM.core_model.model import ArcKind
from TM.dynamics.events import EventGraph
from TM.errors import InvalidChronology, SchemaError, UnknownEvent
from TM.gc import GlobalContext

logger = logging.getLogger(__name__)

gc = GlobalContext()

ARROW = " → "

PRECEDENCE = "precedence"
OBLIGATION = "obligation"
SIMULTANEITY = "simultaneity"
ENABLEMENT = "enablement"


@dataclass(frozen=True)
class Chronology:
    """Ordered simultaneity sets; every event occurs at most once."""
    slots: Tuple[FrozenSet[str], ...]

    def __post_init__(self):
        seen = set()
        if not self.slots:
            raise InvalidChronology("A chronology holds at least one event")
        for index, slot in enumerate(self.slots):
            if not slot:
                raise InvalidChronology("Slot {} is empty".format(index))
            repeated = seen & slot
            if repeated:
                raise InvalidChronology("Events {} occur more than once".format(sorted(repeated)))
            seen |= slot

    @classmethod
    def of(cls, *slots: Iterable[str]) -> "Chronology":
        return cls(tuple(frozenset([s]) if isinstance(s, str) else frozenset(s) for s in slots))

    @classmethod
    def from_data(cls, data) -> "Chronology":
        slots = data.get("slots") if isinstance(data, dict) else data
        if not isinstance(slots, list):
            raise SchemaError("expected a list of slots", "/slots")
        for index, slot in enumerate(slots):
            if not isinstance(slot, list) or not all(isinstance(e, str) for e in slot):
                raise SchemaError("expected a list of event labels", "/slots/{}".format(index))
        return cls(tuple(frozenset(slot) for slot in slots))

    @property
    def events(self) -> FrozenSet[str]:
        return frozenset().union(*self.slots)

    def positions(self) -> Dict[str, int]:
        return {event: index for index, slot in enumerate(self.slots) for event in slot}

    def to_list(self) -> List[List[str]]:
        return [sorted(slot) for slot in self.slots]

    def sort_key(self):
        return (len(self.events), tuple(tuple(sorted(slot)) for slot in self.slots))

    def render(self) -> str:
        return ARROW.join(
            "({})".format(",".join(sorted(slot))) if len(slot) > 1 else next(iter(slot)) for slot in self.slots)

    def __str__(self):
        return self.render()


def render_chronology(chronology: Chronology) -> str:
    return chronology.render()


def load_trace(path: str) -> Chronology:
    with open(path, "r", encoding="utf-8") as stream:
        return Chronology.from_data(json.load(stream))


@dataclass(frozen=True)
class ConstraintSet:
    events: Tuple[str, ...]
    precedence: FrozenSet[Tuple[str, str]] = frozenset()
    obligation: FrozenSet[Tuple[str, str]] = frozenset()
    flow_sources: Dict[str, FrozenSet[str]] = field(default_factory=dict)
    trigger_sources: Dict[str, FrozenSet[str]] = field(default_factory=dict)
    notes: Tuple[str, ...] = ()

    def __hash__(self):
        return hash((self.events, self.precedence, self.obligation))


@dataclass(frozen=True)
class Violation:
    kind: str
    events: Tuple[str, ...]
    slots: Tuple[int, ...]

    def to_dict(self):
        return {"kind": self.kind, "events": list(self.events), "slots": list(self.slots)}

    def describe(self) -> str:
        if self.kind == OBLIGATION:
            return "obligation {}⊳{}".format(*self.events)
        return "{} {}".format(self.kind, " ".join(self.events))


@dataclass(frozen=True)
class Verdict:
    accepted: bool
    violations: Tuple[Violation, ...] = ()

    def to_dict(self):
        return {"accepted": self.accepted, "violations": [v.to_dict() for v in self.violations]}


def _obligation_cycles(obligation, events) -> List[Tuple[str, ...]]:
    successors = {e: sorted(b for a, b in obligation if a == e) for e in events}
    cycles, reported = [], set()

    def visit(node, trail):
        for nxt in successors.get(node, ()):
            if nxt in trail:
                cycle = tuple(trail[trail.index(nxt):])
                if frozenset(cycle) not in reported:
                    reported.add(frozenset(cycle))
                    cycles.append(cycle)
            elif len(trail) < len(events):
                visit(nxt, trail + [nxt])

    for event in events:
        visit(event, [event])
    return cycles


def derive_constraints(graph: EventGraph) -> ConstraintSet:
    """Flow edges order events; trigger edges oblige their target and enable it."""
    precedence, obligation = set(), set()
    flow_sources = {e: set() for e in graph.nodes}
    trigger_sources = {e: set() for e in graph.nodes}
    for edge in graph.edges:
        if edge.kind is ArcKind.FLOW:
            precedence.add((edge.source, edge.target))
            flow_sources[edge.target].add(edge.source)
        else:
            obligation.add((edge.source, edge.target))
            trigger_sources[edge.target].add(edge.source)
    notes = tuple("CyclicObligation: {}".format(" ⊳ ".join(cycle + (cycle[0],)))
                  for cycle in _obligation_cycles(obligation, graph.nodes))
    for note in notes:
        logger.warning(note)
    gc.log_event(key="constraints_derived", value=len(graph.nodes),
                 metadata={"precedence": len(precedence), "obligation": len(obligation)})
    return ConstraintSet(
        events=tuple(graph.nodes),
        precedence=frozenset(precedence),
        obligation=frozenset(obligation),
        flow_sources={k: frozenset(v) for k, v in flow_sources.items() if v},
        trigger_sources={k: frozenset(v) for k, v in trigger_sources.items() if v},
        notes=notes,
    )


def enabled(cs: ConstraintSet, event: str, slot: int, positions: Dict[str, int]) -> bool:
    """Whether event may take slot given where the other events already sit."""
    flow = cs.flow_sources.get(event, frozenset())
    trigger = cs.trigger_sources.get(event, frozenset())
    flow_ok = all(positions.get(s, slot) < slot for s in flow)
    trigger_ok = any(positions.get(s) == slot - 1 for s in trigger)
    if flow and trigger:
        return flow_ok or trigger_ok
    if flow:
        return flow_ok
    if trigger:
        return trigger_ok
    return True


def verdict_of(cs: ConstraintSet, trace: Chronology) -> Verdict:
    unknown = sorted(trace.events - set(cs.events))
    if unknown:
        raise UnknownEvent("Trace names unknown events {}".format(unknown))
    positions = trace.positions()
    violations = []
    for a, b in sorted(cs.precedence):
        if a in positions and b in positions and positions[a] >= positions[b]:
            violations.append(Violation(PRECEDENCE, (a, b), (positions[a], positions[b])))
    for a, b in sorted(cs.obligation):
        if a not in positions:
            continue
        if b not in positions or positions[b] > positions[a] + 1:
            slots = (positions[a],) if b not in positions else (positions[a], positions[b])
            violations.append(Violation(OBLIGATION, (a, b), slots))
        elif positions[b] == positions[a]:
            violations.append(Violation(SIMULTANEITY, (a, b), (positions[a], positions[b])))
    for event in sorted(positions, key=lambda e: (positions[e], e)):
        if not enabled(cs, event, positions[event], positions):
            violations.append(Violation(ENABLEMENT, (event,), (positions[event],)))
    return Verdict(not violations, tuple(violations))


def check_trace(cs: ConstraintSet, trace: Chronology) -> Verdict:
    verdict = verdict_of(cs, trace)
    gc.log_event(key="trace_checked", value=verdict.accepted, metadata={"violations": len(verdict.violations)})
    return verdict
