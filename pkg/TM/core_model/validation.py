from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass
from typing import Dict, List, Set

from TM.core_model.model import (
    NAME_PATTERN,
    RESERVED_WORDS,
    ArcKind,
    StageKind,
    StaticModel,
    flow_rule_violation,
    name_key,
)
from TM.gc import GlobalContext

gc = GlobalContext()

ERROR = "error"
WARNING = "warning"
_SEVERITY_RANK = {ERROR: 0, WARNING: 1}


@dataclass(frozen=True)
class Diagnostic:
    severity: str
    code: str
    location: str
    message: str

    def to_dict(self):
        return {"severity": self.severity, "code": self.code, "location": self.location, "message": self.message}

    def sort_key(self):
        category, _, ident = self.location.partition(":")
        return (_SEVERITY_RANK[self.severity], category, int(ident) if ident.isdigit() else 0, self.code)


def errors_of(diagnostics: List[Diagnostic]) -> List[Diagnostic]:
    return [d for d in diagnostics if d.severity == ERROR]


def _check_thimacs(model: StaticModel, out: List[Diagnostic]):
    siblings = defaultdict(list)
    for thimac in model.sorted_thimacs():
        where = "thimac:{}".format(thimac.id)
        if thimac.parent is not None and thimac.parent not in model.thimacs:
            out.append(Diagnostic(ERROR, "DanglingReference", where,
                                  "parent {} does not exist".format(thimac.parent)))
        if thimac.name == "":
            if thimac.parent is not None or model.children_of(thimac.id):
                out.append(Diagnostic(ERROR, "InvalidName", where,
                                      "the anonymous context thimac must be a childless root"))
        elif not NAME_PATTERN.match(thimac.name) or thimac.name.lower() in RESERVED_WORDS:
            out.append(Diagnostic(ERROR, "InvalidName", where, "{!r} is not a usable thimac name".format(thimac.name)))
        siblings[(thimac.parent, name_key(thimac.name))].append(thimac.id)
    for (parent, key), ids in sorted(siblings.items(), key=lambda item: item[1][0]):
        for duplicate in ids[1:]:
            out.append(Diagnostic(ERROR, "DuplicateName", "thimac:{}".format(duplicate),
                                  "name {!r} repeats thimac {}".format(key, ids[0])))

    reported = set()
    for thimac in model.sorted_thimacs():
        seen, current = [], thimac.id
        while current is not None and current in model.thimacs:
            if current in seen:
                cycle = frozenset(seen[seen.index(current):])
                if cycle not in reported:
                    reported.add(cycle)
                    out.append(Diagnostic(ERROR, "ContainmentCycle", "thimac:{}".format(min(cycle)),
                                          "containment loops through thimacs {}".format(sorted(cycle))))
                break
            seen.append(current)
            current = model.thimacs[current].parent


def _check_stages(model: StaticModel, out: List[Diagnostic]):
    held = defaultdict(list)
    for stage in model.sorted_stages():
        where = "stage:{}".format(stage.id)
        if stage.owner not in model.thimacs:
            out.append(Diagnostic(ERROR, "DanglingReference", where, "owner {} does not exist".format(stage.owner)))
        if stage.direction is not None and stage.kind is not StageKind.TRANSFER:
            out.append(Diagnostic(ERROR, "DirectionOnNonTransfer", where,
                                  "{} stages take no direction".format(stage.kind.value)))
        held[stage.owner].append(stage)
    for owner, stages in sorted(held.items()):
        pairs = set()
        for stage in stages:
            if (stage.kind, stage.direction) in pairs:
                out.append(Diagnostic(ERROR, "DuplicateStage", "stage:{}".format(stage.id),
                                      "thimac {} already holds {}".format(owner, stage.keyword)))
            pairs.add((stage.kind, stage.direction))
        kinds = {s.kind for s in stages}
        if StageKind.RECEIVE in kinds and kinds & {StageKind.ARRIVE, StageKind.ACCEPT}:
            out.append(Diagnostic(ERROR, "MixedReceiveRefinement", "thimac:{}".format(owner),
                                  "receive is combined and refined at once"))


def _check_arcs(model: StaticModel, out: List[Diagnostic]):
    for arc in model.sorted_arcs():
        where = "arc:{}".format(arc.id)
        missing = [end for end in (arc.source, arc.target) if end not in model.stages]
        if missing:
            out.append(Diagnostic(ERROR, "DanglingReference", where, "stages {} do not exist".format(missing)))
            continue
        if arc.kind is ArcKind.FLOW:
            rule = flow_rule_violation(model.stages[arc.source], model.stages[arc.target])
            if rule is not None:
                out.append(Diagnostic(ERROR, "IllegalFlowPair", where, "{} -> {}: {}".format(
                    model.describe_stage(arc.source), model.describe_stage(arc.target), rule)))
        elif arc.source == arc.target:
            out.append(Diagnostic(WARNING, "SelfTrigger", where,
                                  "{} triggers itself".format(model.describe_stage(arc.source))))


def _intra_cycles(model: StaticModel, out: List[Diagnostic]):
    edges: Dict[int, Dict[int, Set[int]]] = defaultdict(lambda: defaultdict(set))
    for arc in model.sorted_arcs(ArcKind.FLOW):
        src, tgt = model.stages.get(arc.source), model.stages.get(arc.target)
        if src is not None and tgt is not None and src.owner == tgt.owner:
            edges[src.owner][src.id].add(tgt.id)
    for owner in sorted(edges):
        graph = edges[owner]
        indegree = defaultdict(int)
        nodes = set(graph)
        for targets in graph.values():
            nodes |= targets
            for t in targets:
                indegree[t] += 1
        queue = deque(n for n in nodes if indegree[n] == 0)
        removed = 0
        while queue:
            node = queue.popleft()
            removed += 1
            for t in graph.get(node, ()):
                indegree[t] -= 1
                if indegree[t] == 0:
                    queue.append(t)
        if removed < len(nodes):
            out.append(Diagnostic(WARNING, "IntraMachineFlowCycle", "thimac:{}".format(owner),
                                  "flow cycles inside {}".format(model.describe_thimac(owner))))


def _unreachable(model: StaticModel, out: List[Diagnostic]):
    entries = [s.id for s in model.sorted_stages()
               if s.kind is StageKind.CREATE or s.accepts]
    reached = set(entries)
    queue = deque(entries)
    while queue:
        node = queue.popleft()
        for arc in model.outgoing(node):
            if arc.target in model.stages and arc.target not in reached:
                reached.add(arc.target)
                queue.append(arc.target)
    for stage in model.sorted_stages():
        if stage.id not in reached:
            out.append(Diagnostic(WARNING, "UnreachableStage", "stage:{}".format(stage.id),
                                  "{} is not reachable from any create or input stage".format(
                                      model.describe_stage(stage.id))))


def validate_model(model: StaticModel) -> List[Diagnostic]:
    """Every structural problem of the model, errors first; never raises."""
    diagnostics: List[Diagnostic] = []
    _check_thimacs(model, diagnostics)
    _check_stages(model, diagnostics)
    _check_arcs(model, diagnostics)
    _intra_cycles(model, diagnostics)
    _unreachable(model, diagnostics)
    diagnostics.sort(key=Diagnostic.sort_key)
    gc.log_event(key="model_validated", value=len(errors_of(diagnostics)),
                 metadata={"diagnostics": len(diagnostics)})
    return diagnostics
