from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import List

from TM.behavior.constraints import Chronology, check_trace, derive_constraints
from TM.core_model.model import ArcKind
from TM.dynamics.events import EventGraph
from TM.errors import TraceNotAccepted
from TM.gc import GlobalContext

gc = GlobalContext()


class LinkKind(str, Enum):
    FLOW = "FlowBased"
    TRIGGER = "TriggerBased"
    CHOICE = "ModelerChoice"


@dataclass(frozen=True)
class Link:
    slot: int
    source: str
    target: str
    kind: LinkKind

    def to_dict(self):
        return {"slot": self.slot, "from": self.source, "to": self.target, "kind": self.kind.value}


def classify_links(graph: EventGraph, trace: Chronology) -> List[Link]:
    """Labels every event pair of adjacent slots by what orders them in the static model."""
    verdict = check_trace(derive_constraints(graph), trace)
    if not verdict.accepted:
        raise TraceNotAccepted("Only accepted traces can be classified", verdict)
    links = []
    for index in range(len(trace.slots) - 1):
        for source in sorted(trace.slots[index]):
            for target in sorted(trace.slots[index + 1]):
                kinds = graph.between(source, target)
                if ArcKind.FLOW in kinds:
                    kind = LinkKind.FLOW
                elif ArcKind.TRIGGER in kinds:
                    kind = LinkKind.TRIGGER
                else:
                    kind = LinkKind.CHOICE
                links.append(Link(index, source, target, kind))
    gc.log_event(key="links_classified", value=len(links))
    return links
