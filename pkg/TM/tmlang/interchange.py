from __future__ import annotations

import json

from TM.core_model.model import Arc, ArcKind, Direction, Stage, StageKind, StaticModel, Thimac
from TM.errors import SchemaError
from TM.tmlang.parser import parse


def model_to_dict(model: StaticModel) -> dict:
    return {
        "thimacs": [{"id": t.id, "name": t.name, "parent": t.parent} for t in model.sorted_thimacs()],
        "stages": [{"id": s.id, "owner": s.owner, "kind": s.kind.value,
                    "direction": s.direction.value if s.direction is not None else None}
                   for s in model.sorted_stages()],
        "arcs": [{"id": a.id, "kind": a.kind.value, "from": a.source, "to": a.target}
                 for a in model.sorted_arcs()],
    }


def to_json(model: StaticModel) -> str:
    return json.dumps(model_to_dict(model), sort_keys=True, separators=(",", ":"))


def _field(record: dict, key: str, path: str, kinds, nullable=False):
    if key not in record:
        raise SchemaError("missing key", "{}/{}".format(path, key))
    value = record[key]
    if value is None and nullable:
        return None
    if isinstance(value, bool) or not isinstance(value, kinds):
        raise SchemaError("unexpected value {!r}".format(value), "{}/{}".format(path, key))
    return value


def _enum(enum, value, path):
    try:
        return enum(value)
    except ValueError:
        raise SchemaError("unknown value {!r}".format(value), path) from None


def _records(document: dict, section: str):
    if section not in document:
        raise SchemaError("missing key", "/{}".format(section))
    records = document[section]
    if not isinstance(records, list):
        raise SchemaError("expected a list", "/{}".format(section))
    seen = set()
    for index, record in enumerate(records):
        path = "/{}/{}".format(section, index)
        if not isinstance(record, dict):
            raise SchemaError("expected an object", path)
        ident = _field(record, "id", path, int)
        if ident in seen:
            raise SchemaError("duplicate id {}".format(ident), path + "/id")
        seen.add(ident)
        yield path, record


def model_from_dict(document) -> StaticModel:
    if not isinstance(document, dict):
        raise SchemaError("expected an object", "")
    thimacs, stages, arcs = [], [], []
    for path, record in _records(document, "thimacs"):
        thimacs.append(Thimac(record["id"], _field(record, "name", path, str),
                              _field(record, "parent", path, int, nullable=True)))
    thimac_ids = {t.id for t in thimacs}
    for index, thimac in enumerate(thimacs):
        if thimac.parent is not None and thimac.parent not in thimac_ids:
            raise SchemaError("no thimac {}".format(thimac.parent), "/thimacs/{}/parent".format(index))
    for path, record in _records(document, "stages"):
        owner = _field(record, "owner", path, int)
        if owner not in thimac_ids:
            raise SchemaError("no thimac {}".format(owner), path + "/owner")
        kind = _enum(StageKind, _field(record, "kind", path, str), path + "/kind")
        direction = _field(record, "direction", path, str, nullable=True)
        if direction is not None:
            direction = _enum(Direction, direction, path + "/direction")
        stages.append(Stage(record["id"], owner, kind, direction))
    stage_ids = {s.id for s in stages}
    for path, record in _records(document, "arcs"):
        kind = _enum(ArcKind, _field(record, "kind", path, str), path + "/kind")
        ends = []
        for key in ("from", "to"):
            end = _field(record, key, path, int)
            if end not in stage_ids:
                raise SchemaError("no stage {}".format(end), "{}/{}".format(path, key))
            ends.append(end)
        arcs.append(Arc(record["id"], kind, ends[0], ends[1]))
    model = StaticModel()
    model.restore(thimacs, stages, arcs)
    return model


def from_json(text: str) -> StaticModel:
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("invalid JSON ({})".format(exc.msg), "") from None
    return model_from_dict(document)


def load_model(path: str) -> StaticModel:
    """Reads a model from interchange JSON (.json) or TM language (anything else)."""
    with open(path, "r", encoding="utf-8") as stream:
        text = stream.read()
    if path.endswith(".json"):
        return from_json(text)
    return parse(text)[1]
