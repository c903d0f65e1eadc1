"""Reader for the textual TM language.

One statement per line. Dots join path segments, "-->" joins paths with a
trigger. Inside a path:

- Name Name          containment (the second is a child thimac)
- Name keyword       a stage of that thimac, opening its machine context
- keyword keyword    a flow arc inside the current machine
- transfer Name      a flow into the named root thimac's transfer stage
- transfer input     direction marker on the preceding transfer
- receive arrive     receive refined into arrive (no separate receive stage)

An optional leading "Flow", a trailing "." and a trailing "*" are accepted.
Lines that are blank or start with "#" are skipped.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple, Union

from TM.core_model.model import (
    NAME_PATTERN,
    STAGE_KEYWORDS,
    ArcKind,
    Direction,
    StageKind,
    StaticModel,
)
from TM.errors import ParseError, TMError
from TM.gc import GlobalContext

logger = logging.getLogger(__name__)

gc = GlobalContext()

TRIGGER_TOKEN = "-->"
HEADER = "flow"
MARKERS = frozenset(d.value for d in Direction)


@dataclass(frozen=True)
class SourceSpan:
    statement: int
    start: int
    end: int

    def to_dict(self):
        return {"statement": self.statement, "start": self.start, "end": self.end}


@dataclass(frozen=True)
class Segment:
    text: str
    role: str  # "header", "name", "keyword" or "marker"
    span: SourceSpan


@dataclass(frozen=True)
class FlowStatement:
    segments: Tuple[Segment, ...]
    span: SourceSpan


@dataclass(frozen=True)
class TriggerStatement:
    sides: Tuple[Tuple[Segment, ...], ...]
    span: SourceSpan

    @property
    def segments(self) -> Tuple[Segment, ...]:
        return tuple(seg for side in self.sides for seg in side)


Statement = Union[FlowStatement, TriggerStatement]


@dataclass(frozen=True)
class TmDocument:
    statements: Tuple[Statement, ...]


class _ByteOffsets:
    def __init__(self, text: str):
        self._offsets = [0]
        for ch in text:
            self._offsets.append(self._offsets[-1] + len(ch.encode("utf-8")))

    def __call__(self, index: int) -> int:
        return self._offsets[index]


def _classify(text: str, first: bool, span: SourceSpan) -> Segment:
    lowered = text.lower()
    if lowered == HEADER:
        if not first:
            raise ParseError("'Flow' may only open a statement", span)
        return Segment(text, "header", span)
    if lowered in STAGE_KEYWORDS:
        return Segment(lowered, "keyword", span)
    if lowered in MARKERS:
        return Segment(lowered, "marker", span)
    if NAME_PATTERN.match(text):
        return Segment(text, "name", span)
    raise ParseError("unknown token {!r}".format(text), span)


def _strip_decoration(line: str) -> str:
    body = line.rstrip()
    if body.endswith("."):
        body = body[:-1].rstrip()
    if body.endswith("*"):
        body = body[:-1].rstrip()
    return body


def _split_path(text: str, base: int, index: int, first_side: bool, to_bytes) -> Tuple[Segment, ...]:
    segments = []
    position = base
    for number, raw in enumerate(text.split(".")):
        stripped = raw.strip()
        start = position + (len(raw) - len(raw.lstrip()))
        span = SourceSpan(index, to_bytes(start), to_bytes(start + len(stripped)))
        if not stripped:
            raise ParseError("dangling dot", SourceSpan(index, to_bytes(position), to_bytes(position + len(raw))))
        segments.append(_classify(stripped, first_side and number == 0, span))
        position += len(raw) + 1
    return tuple(segments)


def tokenize(text: str) -> TmDocument:
    """Splits text into statements and classified segments without touching a model."""
    to_bytes = _ByteOffsets(text)
    statements: List[Statement] = []
    line_start = 0
    for line in text.split("\n"):
        offset, line_start = line_start, line_start + len(line) + 1
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        index = len(statements)
        lead = len(line) - len(line.lstrip())
        body = _strip_decoration(line[lead:])
        base = offset + lead
        span = SourceSpan(index, to_bytes(base), to_bytes(base + len(body)))
        pieces = body.split(TRIGGER_TOKEN)
        sides = []
        position = base
        for number, piece in enumerate(pieces):
            if not piece.strip():
                raise ParseError("empty path side of '-->'" if len(pieces) > 1 else "empty statement",
                                 SourceSpan(index, to_bytes(position), to_bytes(position + len(piece))))
            sides.append(_split_path(piece, position, index, number == 0, to_bytes))
            position += len(piece) + len(TRIGGER_TOKEN)
        if len(sides) == 1:
            statements.append(FlowStatement(sides[0], span))
        else:
            statements.append(TriggerStatement(tuple(sides), span))
    return TmDocument(tuple(statements))


class _ModelBuilder:
    """Merges statements into one model, unifying repeated thimacs, stages and arcs."""

    def __init__(self, model: StaticModel):
        self.model = model

    def thimac(self, name: str, parent: Optional[int]) -> int:
        found = self.model.find_thimac(name, parent)
        return found if found is not None else self.model.add_thimac(name, parent)

    def stage(self, owner: int, kind: StageKind, direction: Optional[Direction]) -> int:
        found = self.model.find_stage(owner, kind, direction)
        return found if found is not None else self.model.add_stage(owner, kind, direction)

    def entry_transfer(self, owner: int) -> int:
        for direction in (Direction.INPUT, None):
            found = self.model.find_stage(owner, StageKind.TRANSFER, direction)
            if found is not None:
                return found
        return self.model.add_stage(owner, StageKind.TRANSFER, None)

    def arc(self, kind: ArcKind, source: int, target: int) -> int:
        found = self.model.find_arc(kind, source, target)
        if found is not None:
            return found
        if kind is ArcKind.FLOW:
            return self.model.add_flow(source, target)
        return self.model.add_trigger(source, target)

    def path(self, segments: Tuple[Segment, ...]) -> Tuple[Optional[int], Optional[int]]:
        """Builds one path and returns its (entry stage, final stage)."""
        thimac: Optional[int] = None
        current: Optional[int] = None
        pending: Optional[int] = None
        first: Optional[int] = None
        i = 0
        while i < len(segments):
            segment = segments[i]
            following = segments[i + 1] if i + 1 < len(segments) else None
            try:
                if segment.role == "header":
                    pass
                elif segment.role == "marker":
                    raise ParseError("direction marker {!r} must follow 'transfer'".format(segment.text), segment.span)
                elif segment.role == "name":
                    if current is not None:
                        if self.model.stages[current].kind is not StageKind.TRANSFER:
                            raise ParseError("a thimac name may only follow a transfer stage", segment.span)
                        pending, current = current, None
                        thimac = self.thimac(segment.text, None)
                    else:
                        thimac = self.thimac(segment.text, thimac)
                elif segment.text == StageKind.RECEIVE.value and following is not None \
                        and following.text == StageKind.ARRIVE.value:
                    pass
                else:
                    direction = None
                    if segment.text == StageKind.TRANSFER.value and following is not None \
                            and following.role == "marker":
                        direction = Direction(following.text)
                        i += 1
                    if thimac is None:
                        thimac = self.thimac("", None)
                    stage = self.stage(thimac, StageKind(segment.text), direction)
                    if pending is not None:
                        self.arc(ArcKind.FLOW, pending, stage)
                        pending = None
                    elif current is not None:
                        self.arc(ArcKind.FLOW, current, stage)
                    current = stage
                    first = stage if first is None else first
            except ParseError:
                raise
            except TMError as exc:
                raise ParseError(exc.message, segment.span) from exc
            i += 1
        if pending is not None:
            try:
                current = self.entry_transfer(thimac)
                self.arc(ArcKind.FLOW, pending, current)
            except TMError as exc:
                raise ParseError(exc.message, segments[-1].span) from exc
        return first, current


def build_model(document: TmDocument, model: Optional[StaticModel] = None) -> StaticModel:
    model = model if model is not None else StaticModel()
    builder = _ModelBuilder(model)
    for statement in document.statements:
        if isinstance(statement, FlowStatement):
            builder.path(statement.segments)
            continue
        ends = []
        for side in statement.sides:
            if side[-1].role == "name":
                raise ParseError("a trigger path must end at a stage", side[-1].span)
            first, last = builder.path(side)
            if first is None:
                raise ParseError("a trigger path must name a stage", side[0].span)
            ends.append((first, last))
        for (_, source), (target, _) in zip(ends, ends[1:]):
            try:
                builder.arc(ArcKind.TRIGGER, source, target)
            except TMError as exc:
                raise ParseError(exc.message, statement.span) from exc
    return model


def parse(text: str) -> Tuple[TmDocument, StaticModel]:
    document = tokenize(text)
    model = build_model(document)
    logger.debug("parsed %d statements into %d thimacs, %d stages, %d arcs",
                 len(document.statements), len(model.thimacs), len(model.stages), len(model.arcs))
    gc.log_event(key="tm_parsed", value=len(document.statements),
                 metadata={"thimacs": len(model.thimacs), "stages": len(model.stages), "arcs": len(model.arcs)})
    return document, model


def parse_file(path: str) -> Tuple[TmDocument, StaticModel]:
    with open(path, "r", encoding="utf-8") as stream:
        return parse(stream.read())
