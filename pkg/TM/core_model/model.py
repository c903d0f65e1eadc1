from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Tuple

from TM.errors import (
    DirectionOnNonTransfer,
    DuplicateName,
    DuplicateStage,
    IllegalFlowPair,
    InvalidName,
    MixedReceiveRefinement,
    UnknownParent,
    UnknownStage,
)

NAME_PATTERN = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


class StageKind(str, Enum):
    CREATE = "create"
    PROCESS = "process"
    RELEASE = "release"
    TRANSFER = "transfer"
    RECEIVE = "receive"
    ARRIVE = "arrive"
    ACCEPT = "accept"


class Direction(str, Enum):
    INPUT = "input"
    OUTPUT = "output"


class ArcKind(str, Enum):
    FLOW = "flow"
    TRIGGER = "trigger"


STAGE_KEYWORDS = frozenset(k.value for k in StageKind)
RESERVED_WORDS = STAGE_KEYWORDS | {d.value for d in Direction} | {"flow"}

# intra-thimac successors; transfer directions are checked in flow_rule_violation
_INTRA_SUCCESSORS = {
    StageKind.CREATE: {StageKind.PROCESS, StageKind.RELEASE},
    StageKind.RECEIVE: {StageKind.PROCESS, StageKind.RELEASE, StageKind.TRANSFER},
    StageKind.ARRIVE: {StageKind.ACCEPT, StageKind.RELEASE},
    StageKind.ACCEPT: {StageKind.PROCESS, StageKind.RELEASE},
    StageKind.PROCESS: {StageKind.RELEASE},
    StageKind.RELEASE: {StageKind.TRANSFER},
    StageKind.TRANSFER: {StageKind.RECEIVE, StageKind.ARRIVE},
}


def name_key(name: str) -> str:
    """Thimac names compare with the first letter folded ("Workshop" == "workshop")."""
    return name[:1].lower() + name[1:]


@dataclass(frozen=True)
class Thimac:
    id: int
    name: str
    parent: Optional[int] = None


@dataclass(frozen=True)
class Stage:
    id: int
    owner: int
    kind: StageKind
    direction: Optional[Direction] = None

    @property
    def keyword(self) -> str:
        if self.direction is not None:
            return "{}.{}".format(self.kind.value, self.direction.value)
        return self.kind.value

    @property
    def sends(self) -> bool:
        return self.kind is StageKind.TRANSFER and self.direction is not Direction.INPUT

    @property
    def accepts(self) -> bool:
        return self.kind is StageKind.TRANSFER and self.direction is not Direction.OUTPUT


@dataclass(frozen=True)
class Arc:
    id: int
    kind: ArcKind
    source: int
    target: int


def flow_rule_violation(source: Stage, target: Stage) -> Optional[str]:
    """Returns the legality rule a flow from source to target breaks, or None."""
    if source.owner != target.owner:
        if source.kind is not StageKind.TRANSFER or target.kind is not StageKind.TRANSFER:
            return "inter-thimac flow must run transfer -> transfer"
        if not source.sends:
            return "inter-thimac flow must leave through an output transfer"
        if not target.accepts:
            return "inter-thimac flow must enter through an input transfer"
        return None
    allowed = _INTRA_SUCCESSORS.get(source.kind, set())
    if target.kind not in allowed:
        return "{} may not flow to {} within one thimac".format(source.kind.value, target.kind.value)
    if source.kind is StageKind.TRANSFER and not source.accepts:
        return "an output transfer may not flow back into its own thimac"
    if target.kind is StageKind.TRANSFER and not target.sends:
        return "{} may only flow to an output transfer".format(source.kind.value)
    return None


class StaticModel:
    """The timeless graph of thimacs, their stages and the flow/trigger arcs.

    Ids are integers handed out in insertion order, one counter per category.
    """

    def __init__(self):
        self.thimacs: Dict[int, Thimac] = {}
        self.stages: Dict[int, Stage] = {}
        self.arcs: Dict[int, Arc] = {}
        self._next = {"thimac": 1, "stage": 1, "arc": 1}

    def _take_id(self, category: str) -> int:
        taken = self._next[category]
        self._next[category] = taken + 1
        return taken

    def add_thimac(self, name: str, parent: Optional[int] = None) -> int:
        if parent is not None and parent not in self.thimacs:
            raise UnknownParent("No thimac with id {}".format(parent))
        if name == "":
            if parent is not None:
                raise InvalidName("Only a root thimac may be anonymous")
        elif not NAME_PATTERN.match(name) or name.lower() in RESERVED_WORDS:
            raise InvalidName("{!r} is not a usable thimac name".format(name))
        if parent is not None and self.thimacs[parent].name == "":
            raise InvalidName("The anonymous context thimac holds no children")
        if self.find_thimac(name, parent) is not None:
            raise DuplicateName("Thimac {!r} already exists under {}".format(name, self.describe_thimac(parent)))
        thimac_id = self._take_id("thimac")
        self.thimacs[thimac_id] = Thimac(thimac_id, name, parent)
        return thimac_id

    def add_stage(self, owner: int, kind: StageKind, direction: Optional[Direction] = None) -> int:
        if owner not in self.thimacs:
            raise UnknownParent("No thimac with id {}".format(owner))
        kind = StageKind(kind)
        direction = Direction(direction) if direction is not None else None
        if direction is not None and kind is not StageKind.TRANSFER:
            raise DirectionOnNonTransfer("Only transfer stages take a direction, got {}.{}".format(
                kind.value, direction.value))
        if self.find_stage(owner, kind, direction) is not None:
            raise DuplicateStage("{} already has a {} stage".format(
                self.describe_thimac(owner), Stage(0, owner, kind, direction).keyword))
        present = {s.kind for s in self.stages_of(owner)}
        if kind is StageKind.RECEIVE and present & {StageKind.ARRIVE, StageKind.ACCEPT}:
            raise MixedReceiveRefinement("{} already refines receive into arrive/accept".format(
                self.describe_thimac(owner)))
        if kind in (StageKind.ARRIVE, StageKind.ACCEPT) and StageKind.RECEIVE in present:
            raise MixedReceiveRefinement("{} already uses the combined receive stage".format(
                self.describe_thimac(owner)))
        stage_id = self._take_id("stage")
        self.stages[stage_id] = Stage(stage_id, owner, kind, direction)
        return stage_id

    def add_flow(self, source: int, target: int) -> int:
        src, tgt = self.stage(source), self.stage(target)
        rule = flow_rule_violation(src, tgt)
        if rule is not None:
            raise IllegalFlowPair("Flow {} -> {} is illegal: {}".format(
                self.describe_stage(source), self.describe_stage(target), rule), rule)
        return self._add_arc(ArcKind.FLOW, source, target)

    def add_trigger(self, source: int, target: int) -> int:
        self.stage(source)
        self.stage(target)
        return self._add_arc(ArcKind.TRIGGER, source, target)

    def restore(self, thimacs=(), stages=(), arcs=()):
        """Inserts already-identified records without any checking; validate_model reports problems."""
        for record in thimacs:
            self.thimacs[record.id] = record
        for record in stages:
            self.stages[record.id] = record
        for record in arcs:
            self.arcs[record.id] = record
        for category, table in (("thimac", self.thimacs), ("stage", self.stages), ("arc", self.arcs)):
            self._next[category] = max([self._next[category]] + [k + 1 for k in table])

    def _add_arc(self, kind: ArcKind, source: int, target: int) -> int:
        arc_id = self._take_id("arc")
        self.arcs[arc_id] = Arc(arc_id, kind, source, target)
        return arc_id

    # lookups

    def stage(self, stage_id: int) -> Stage:
        try:
            return self.stages[stage_id]
        except KeyError:
            raise UnknownStage("No stage with id {}".format(stage_id)) from None

    def find_thimac(self, name: str, parent: Optional[int]) -> Optional[int]:
        key = name_key(name)
        for thimac in self.thimacs.values():
            if thimac.parent == parent and name_key(thimac.name) == key:
                return thimac.id
        return None

    def find_stage(self, owner: int, kind: StageKind, direction: Optional[Direction] = None) -> Optional[int]:
        for stage in self.stages.values():
            if stage.owner == owner and stage.kind is kind and stage.direction == direction:
                return stage.id
        return None

    def find_arc(self, kind: ArcKind, source: int, target: int) -> Optional[int]:
        for arc in self.arcs.values():
            if arc.kind is kind and arc.source == source and arc.target == target:
                return arc.id
        return None

    def stages_of(self, owner: int) -> List[Stage]:
        return [s for s in self.sorted_stages() if s.owner == owner]

    def children_of(self, parent: Optional[int]) -> List[Thimac]:
        return [t for t in self.sorted_thimacs() if t.parent == parent]

    def sorted_thimacs(self) -> List[Thimac]:
        return [self.thimacs[k] for k in sorted(self.thimacs)]

    def sorted_stages(self) -> List[Stage]:
        return [self.stages[k] for k in sorted(self.stages)]

    def sorted_arcs(self, kind: Optional[ArcKind] = None) -> List[Arc]:
        return [self.arcs[k] for k in sorted(self.arcs) if kind is None or self.arcs[k].kind is kind]

    def outgoing(self, stage_id: int, kind: Optional[ArcKind] = None) -> List[Arc]:
        return [a for a in self.sorted_arcs(kind) if a.source == stage_id]

    def thimac_path(self, thimac_id: int) -> List[str]:
        """Names from the root down to thimac_id; stops on a containment cycle."""
        names, seen = [], set()
        current = thimac_id
        while current is not None and current in self.thimacs and current not in seen:
            seen.add(current)
            names.append(self.thimacs[current].name)
            current = self.thimacs[current].parent
        return list(reversed(names))

    def stage_path(self, stage_id: int) -> str:
        stage = self.stage(stage_id)
        parts = [n for n in self.thimac_path(stage.owner) if n]
        return ".".join(parts + [stage.keyword])

    def describe_thimac(self, thimac_id: Optional[int]) -> str:
        if thimac_id is None:
            return "the root"
        return ".".join(n for n in self.thimac_path(thimac_id) if n) or "<anonymous>"

    def describe_stage(self, stage_id: int) -> str:
        if stage_id not in self.stages:
            return "stage:{}".format(stage_id)
        return self.stage_path(stage_id)

    def resolve_stage_path(self, path: str) -> int:
        """Looks up a stage by its dotted path, e.g. "Grass.wet.create" or "Y.transfer.input"."""
        tokens = [t.strip() for t in path.strip().rstrip(".").split(".")]
        direction = None
        if len(tokens) >= 2 and tokens[-1].lower() in (Direction.INPUT.value, Direction.OUTPUT.value):
            direction = Direction(tokens.pop().lower())
        if not tokens or tokens[-1].lower() not in STAGE_KEYWORDS:
            raise UnknownStage("{!r} does not end in a stage keyword".format(path))
        kind = StageKind(tokens.pop().lower())
        if kind is StageKind.ARRIVE and tokens and tokens[-1].lower() == StageKind.RECEIVE.value:
            tokens.pop()
        owner = None
        for name in tokens or [""]:
            owner = self.find_thimac(name, owner)
            if owner is None:
                raise UnknownStage("No thimac along {!r}".format(path))
        stage_id = self.find_stage(owner, kind, direction)
        if stage_id is None:
            raise UnknownStage("No stage {!r}".format(path))
        return stage_id


def add_thimac(model: StaticModel, name: str, parent: Optional[int] = None) -> int:
    return model.add_thimac(name, parent)


def add_stage(model: StaticModel, owner: int, kind: StageKind, direction: Optional[Direction] = None) -> int:
    return model.add_stage(owner, kind, direction)


def add_flow(model: StaticModel, source: int, target: int) -> int:
    return model.add_flow(source, target)


def add_trigger(model: StaticModel, source: int, target: int) -> int:
    return model.add_trigger(source, target)


def canonical_form(model: StaticModel) -> Tuple[tuple, tuple, tuple]:
    """An id-free description of the model; equal forms mean isomorphic models."""
    def thimac_key(thimac_id):
        return tuple(name_key(n) for n in model.thimac_path(thimac_id))

    def stage_key(stage_id):
        stage = model.stages[stage_id]
        return thimac_key(stage.owner) + (stage.keyword,)

    thimacs = tuple(sorted(thimac_key(t) for t in model.thimacs))
    stages = tuple(sorted(stage_key(s) for s in model.stages))
    arcs = tuple(sorted((a.kind.value, stage_key(a.source), stage_key(a.target))
                        for a in model.arcs.values()))
    return thimacs, stages, arcs


def isomorphic(left: StaticModel, right: StaticModel) -> bool:
    return canonical_form(left) == canonical_form(right)
