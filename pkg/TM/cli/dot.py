from __future__ import annotations

from typing import Dict, List, Optional

from TM.core_model.model import ArcKind, StaticModel
from TM.core_model.validation import errors_of, validate_model
from TM.dynamics.events import DynamicModel
from TM.errors import InvalidModel

INDENT = "    "
PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
           "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")


def _quote(text: str) -> str:
    return '"{}"'.format(text.replace("\\", "\\\\").replace('"', '\\"'))


def _attrs(**attrs) -> str:
    return "[{}]".format(", ".join("{}={}".format(k, _quote(str(v))) for k, v in attrs.items()))


def _memberships(dyn: Optional[DynamicModel]) -> Dict[int, List[str]]:
    members: Dict[int, List[str]] = {}
    if dyn is None:
        return members
    for event in sorted(dyn.events, key=lambda e: e.id):
        for stage_id in event.region.stage_ids:
            members.setdefault(stage_id, []).append(event.label)
    return members


def export_dot(model: StaticModel, dyn: Optional[DynamicModel] = None) -> str:
    """Graphviz text with one cluster per thimac, solid flow edges and dashed trigger edges.

    With a dynamic model, every stage that belongs to an event region carries
    the event labels as its class and the colour of its first event.
    """
    errors = errors_of(validate_model(model))
    if errors:
        raise InvalidModel("Model has {} validation errors".format(len(errors)), errors)
    if not model.thimacs:
        return "digraph tm {}"
    members = _memberships(dyn)
    colours = {} if dyn is None else {
        e.label: PALETTE[i % len(PALETTE)] for i, e in enumerate(sorted(dyn.events, key=lambda e: e.id))}
    lines = ["digraph tm {", INDENT + "compound=true;"]

    def emit(thimac_id: int, depth: int):
        pad = INDENT * depth
        thimac = model.thimacs[thimac_id]
        lines.append("{}subgraph cluster_{} {{".format(pad, thimac_id))
        lines.append("{}{}label={};".format(pad, INDENT, _quote(thimac.name)))
        for stage in model.stages_of(thimac_id):
            attrs = {"label": stage.keyword}
            labels = members.get(stage.id)
            if labels:
                attrs.update({"class": " ".join(labels), "color": colours[labels[0]], "penwidth": 2})
            lines.append("{}{}s{} {};".format(pad, INDENT, stage.id, _attrs(**attrs)))
        for child in model.children_of(thimac_id):
            emit(child.id, depth + 1)
        lines.append(pad + "}")

    for root in model.children_of(None):
        emit(root.id, 1)
    for arc in model.sorted_arcs():
        style = " [style=dashed]" if arc.kind is ArcKind.TRIGGER else ""
        lines.append("{}s{} -> s{}{};".format(INDENT, arc.source, arc.target, style))
    if dyn is not None:
        lines.append(INDENT + "// events: " + ", ".join(
            "{}={}".format(label, colour) for label, colour in colours.items()))
    lines.append("}")
    return "\n".join(lines)
