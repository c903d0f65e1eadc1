from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Tuple, Union

from TM.core_model.model import ArcKind, StaticModel
from TM.core_model.validation import WARNING, Diagnostic
from TM.errors import DuplicateLabel, EmptyRegion, SchemaError, UnknownStage

logger = logging.getLogger(__name__)

StageRef = Union[int, str]


@dataclass(frozen=True)
class Region:
    stage_ids: frozenset
    arc_ids: frozenset


@dataclass(frozen=True)
class Event:
    """A labelled region of the host model; its time is the slot it takes in a chronology."""
    id: int
    label: str
    region: Region
    title: Optional[str] = None
    time: Optional[int] = None


@dataclass(frozen=True)
class EventEdge:
    source: str
    target: str
    kind: ArcKind


@dataclass(frozen=True)
class EventGraph:
    nodes: Tuple[str, ...]
    edges: Tuple[EventEdge, ...] = ()

    def between(self, source: str, target: str) -> List[ArcKind]:
        return [e.kind for e in self.edges if e.source == source and e.target == target]


@dataclass
class DynamicModel:
    host: StaticModel
    events: List[Event] = field(default_factory=list)

    def resolve(self, ref: StageRef) -> int:
        if isinstance(ref, bool):
            raise UnknownStage("{!r} is not a stage reference".format(ref))
        if isinstance(ref, int):
            self.host.stage(ref)
            return ref
        return self.host.resolve_stage_path(ref)

    def define_event(self, label: str, stages: Iterable[StageRef], title: Optional[str] = None) -> int:
        stage_ids = frozenset(self.resolve(ref) for ref in stages)
        if not stage_ids:
            raise EmptyRegion("Event {!r} has an empty region".format(label))
        if any(e.label == label for e in self.events):
            raise DuplicateLabel("Event label {!r} is already defined".format(label))
        arc_ids = frozenset(a.id for a in self.host.sorted_arcs()
                            if a.source in stage_ids and a.target in stage_ids)
        event_id = len(self.events) + 1
        self.events.append(Event(event_id, label, Region(stage_ids, arc_ids), title))
        return event_id

    def event(self, label: str) -> Event:
        for event in self.events:
            if event.label == label:
                return event
        raise KeyError(label)

    @property
    def labels(self) -> Tuple[str, ...]:
        return tuple(e.label for e in self.events)


def define_event(dyn: DynamicModel, label: str, stages: Iterable[StageRef], title: Optional[str] = None) -> int:
    return dyn.define_event(label, stages, title)


def events_overlapping(dyn: DynamicModel) -> List[Tuple[int, int, frozenset]]:
    overlaps = []
    ordered = sorted(dyn.events, key=lambda e: e.id)
    for i, first in enumerate(ordered):
        for second in ordered[i + 1:]:
            shared = first.region.stage_ids & second.region.stage_ids
            if shared:
                overlaps.append((first.id, second.id, frozenset(shared)))
    return overlaps


def derive_event_graph(dyn: DynamicModel) -> EventGraph:
    """Lifts every host arc that enters a region from outside it onto the events.

    The arc becomes an edge A->B for every event A whose region holds its
    source and every other event B whose region holds its target but not its
    source. Arcs inside a region shared by several events order none of them.
    """
    ordered = sorted(dyn.events, key=lambda e: e.id)
    rank = {e.label: e.id for e in ordered}
    edges = set()
    for arc in dyn.host.sorted_arcs():
        sources = [e.label for e in ordered if arc.source in e.region.stage_ids]
        targets = [e.label for e in ordered
                   if arc.target in e.region.stage_ids and arc.source not in e.region.stage_ids]
        edges.update(EventEdge(source, target, arc.kind) for source in sources for target in targets)
    ordered_edges = sorted(edges, key=lambda e: (rank[e.source], rank[e.target], e.kind.value))
    return EventGraph(tuple(e.label for e in ordered), tuple(ordered_edges))


def validate_dynamic(dyn: DynamicModel) -> List[Diagnostic]:
    """Warns about regions that fall apart into unconnected pieces of the host graph."""
    diagnostics = []
    for event in sorted(dyn.events, key=lambda e: e.id):
        stages = set(event.region.stage_ids)
        neighbours = {s: set() for s in stages}
        for arc_id in event.region.arc_ids:
            arc = dyn.host.arcs[arc_id]
            neighbours[arc.source].add(arc.target)
            neighbours[arc.target].add(arc.source)
        start = min(stages)
        reached, stack = {start}, [start]
        while stack:
            for nxt in neighbours[stack.pop()]:
                if nxt not in reached:
                    reached.add(nxt)
                    stack.append(nxt)
        if reached != stages:
            diagnostics.append(Diagnostic(WARNING, "DisconnectedRegion", "event:{}".format(event.id),
                                          "region of {!r} spans unconnected parts of the model".format(event.label)))
    return diagnostics


def events_from_data(data, host: StaticModel) -> DynamicModel:
    if not isinstance(data, list):
        raise SchemaError("expected a list of events", "")
    dyn = DynamicModel(host)
    for index, record in enumerate(data):
        path = "/{}".format(index)
        if not isinstance(record, dict):
            raise SchemaError("expected an object", path)
        label = record.get("label")
        if not isinstance(label, str) or not label:
            raise SchemaError("expected a non-empty label", path + "/label")
        stages = record.get("stages")
        if not isinstance(stages, list):
            raise SchemaError("expected a list of stages", path + "/stages")
        title = record.get("title")
        try:
            dyn.define_event(label, stages, title)
        except UnknownStage as exc:
            raise SchemaError(exc.message, path + "/stages") from exc
    for diagnostic in validate_dynamic(dyn):
        logger.warning("%s: %s", diagnostic.code, diagnostic.message)
    return dyn


def load_events(path: str, host: StaticModel) -> DynamicModel:
    with open(path, "r", encoding="utf-8") as stream:
        return events_from_data(json.load(stream), host)
