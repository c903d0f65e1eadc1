from __future__ import annotations

from collections import defaultdict
from typing import Dict, List, Set

from TM.core_model.model import ArcKind, StageKind, StaticModel
from TM.core_model.validation import errors_of, validate_model
from TM.errors import InvalidModel


def _keyword(model: StaticModel, stage_id: int) -> str:
    stage = model.stages[stage_id]
    if stage.kind is StageKind.ARRIVE:
        return "receive.arrive"
    return stage.keyword


def _render(model: StaticModel, path: List[int]) -> str:
    tokens = []
    previous = None
    for stage_id in path:
        stage = model.stages[stage_id]
        if previous is None or stage.owner != previous.owner:
            names = [n for n in model.thimac_path(stage.owner) if n]
            if previous is not None and not names:
                raise InvalidModel("Flow into the anonymous context thimac cannot be written in TM language")
            tokens.extend(names)
        tokens.append(_keyword(model, stage_id))
        previous = stage
    return ".".join(tokens)


def _flow_paths(model: StaticModel) -> List[List[int]]:
    """Splits the flow arcs into maximal paths that break at every junction stage."""
    arcs = model.sorted_arcs(ArcKind.FLOW)
    outgoing: Dict[int, list] = defaultdict(list)
    incoming: Dict[int, int] = defaultdict(int)
    for arc in arcs:
        outgoing[arc.source].append(arc)
        incoming[arc.target] += 1

    def through(stage_id):
        return incoming[stage_id] == 1 and len(outgoing[stage_id]) == 1

    used: Set[int] = set()

    def walk(arc):
        path = [arc.source]
        while arc.id not in used:
            used.add(arc.id)
            path.append(arc.target)
            if not through(arc.target):
                break
            arc = outgoing[arc.target][0]
        return path

    paths = [walk(arc) for arc in arcs if not through(arc.source) and arc.id not in used]
    # what is left are loops where every stage is a through stage
    while len(used) < len(arcs):
        loop = [arc for arc in arcs if arc.id not in used]
        start = min(loop, key=lambda arc: _render(model, [arc.source]))
        paths.append(walk(start))
    return paths


def serialize(model: StaticModel) -> str:
    """Canonical TM text: one statement per maximal flow path and per trigger arc, sorted."""
    errors = errors_of(validate_model(model))
    if errors:
        raise InvalidModel("Model has {} validation errors".format(len(errors)), errors)
    statements = []
    touched: Set[int] = set()
    for path in _flow_paths(model):
        statements.append("Flow.{}.".format(_render(model, path)))
        touched.update(path)
    for arc in model.sorted_arcs(ArcKind.TRIGGER):
        statements.append("{}-->{}.".format(_render(model, [arc.source]), _render(model, [arc.target])))
        touched.update((arc.source, arc.target))
    for stage in model.sorted_stages():
        if stage.id not in touched:
            statements.append("Flow.{}.".format(_render(model, [stage.id])))
    owners = {s.owner for s in model.stages.values()}
    parents = {t.parent for t in model.thimacs.values()}
    for thimac in model.sorted_thimacs():
        if thimac.id not in owners and thimac.id not in parents:
            statements.append("Flow.{}.".format(".".join(model.thimac_path(thimac.id))))
    return "\n".join(sorted(statements))
