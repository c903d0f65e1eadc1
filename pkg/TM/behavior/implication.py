from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Tuple

from TM.behavior.constraints import Chronology, ConstraintSet
from TM.behavior.enumerate import enumerate_behaviors
from TM.errors import UnknownEvent
from TM.gc import GlobalContext

gc = GlobalContext()


@dataclass(frozen=True)
class Implication:
    """Whether every acceptable behavior holding the antecedent also holds the consequent."""
    antecedent: str
    consequent: str
    supporting: Tuple[Chronology, ...]
    counterexamples: Tuple[Chronology, ...]

    @property
    def holds(self) -> bool:
        return not self.counterexamples

    def describe(self) -> str:
        verb = "implies" if self.holds else "does not imply"
        return "{} {} {}".format(self.antecedent, verb, self.consequent)

    def to_dict(self):
        return {
            "if": self.antecedent,
            "then": self.consequent,
            "holds": self.holds,
            "supporting": [b.to_list() for b in self.supporting],
            "counterexamples": [b.to_list() for b in self.counterexamples],
        }


def implication(cs: ConstraintSet, antecedent: str, consequent: str,
                behaviors: Optional[Iterable[Chronology]] = None) -> Implication:
    """Splits the behaviors that contain the antecedent by whether the consequent occurs too.

    With no antecedent in any behavior the implication holds vacuously.
    """
    unknown = sorted({antecedent, consequent} - set(cs.events))
    if unknown:
        raise UnknownEvent("No events {} in the constraint set".format(unknown))
    found = enumerate_behaviors(cs) if behaviors is None else list(behaviors)
    relevant = [b for b in found if antecedent in b.events]
    result = Implication(
        antecedent,
        consequent,
        tuple(b for b in relevant if consequent in b.events),
        tuple(b for b in relevant if consequent not in b.events),
    )
    gc.log_event(key="implication_checked", value=result.holds,
                 metadata={"if": antecedent, "then": consequent, "counterexamples": len(result.counterexamples)})
    return result
