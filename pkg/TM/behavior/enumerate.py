from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor, as_completed
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Tuple

from tqdm import tqdm

from TM.behavior.constraints import Chronology, ConstraintSet, enabled, verdict_of
from TM.errors import TooManyEvents, UnknownEvent
from TM.gc import GlobalContext

logger = logging.getLogger(__name__)

gc = GlobalContext()

Slots = Tuple[FrozenSet[str], ...]


def _scope(cs: ConstraintSet, events: Optional[Iterable[str]], limit: int) -> Tuple[str, ...]:
    scope = tuple(cs.events) if events is None else tuple(sorted(set(events)))
    unknown = sorted(set(scope) - set(cs.events))
    if unknown:
        raise UnknownEvent("No events {} in the constraint set".format(unknown))
    if len(scope) > limit:
        raise TooManyEvents("{} events exceed the bound of {}".format(len(scope), limit))
    return scope


class _Search:
    """Slot-by-slot extension of a chronology, pruned by the constraint set."""

    def __init__(self, cs: ConstraintSet, scope: Tuple[str, ...], allow_simultaneity: bool):
        self.cs = cs
        self.scope = scope
        self.allow_simultaneity = allow_simultaneity
        self.after = {e: {b for a, b in cs.precedence if a == e} for e in scope}
        self.obliged = {e: {b for a, b in cs.obligation if a == e} for e in scope}

    def candidates(self, positions: Dict[str, int], slot: int) -> List[str]:
        return [e for e in self.scope
                if e not in positions
                and not any(b in positions for b in self.after[e])
                and enabled(self.cs, e, slot, positions)]

    def required(self, previous: FrozenSet[str], positions: Dict[str, int]) -> FrozenSet[str]:
        return frozenset(b for a in previous for b in self.obliged[a] if b not in positions)

    def compatible(self, chosen: FrozenSet[str]) -> bool:
        if not self.allow_simultaneity and len(chosen) > 1:
            return False
        return not any(b in chosen for a in chosen for b in self.after[a] | self.obliged[a])

    def next_slots(self, slots: Slots, positions: Dict[str, int]) -> Iterator[FrozenSet[str]]:
        slot = len(slots)
        required = self.required(slots[-1], positions) if slots else frozenset()
        if any(b not in self.scope for b in required):
            return
        options = self.candidates(positions, slot)
        if not required <= set(options):
            return
        optional = [e for e in options if e not in required]
        for size in range(len(optional) + 1):
            for extra in combinations(optional, size):
                chosen = required | frozenset(extra)
                if chosen and self.compatible(chosen):
                    yield chosen

    def complete(self, slots: Slots, positions: Dict[str, int]) -> bool:
        return not self.required(slots[-1], positions)

    def explore(self, slots: Slots) -> List[Slots]:
        positions = {e: i for i, slot in enumerate(slots) for e in slot}
        found = [slots] if slots and self.complete(slots, positions) else []
        for chosen in self.next_slots(slots, positions):
            found.extend(self.explore(slots + (chosen,)))
        return found


def _explore_branch(cs: ConstraintSet, scope: Tuple[str, ...], allow_simultaneity: bool,
                    first: FrozenSet[str]) -> List[Slots]:
    return _Search(cs, scope, allow_simultaneity).explore((first,))


def _progress(items, total: int):
    if gc.progress:
        return tqdm(items, total=total, desc="first slots", unit="branch")
    return items


def enumerate_behaviors(cs: ConstraintSet, events: Optional[Iterable[str]] = None,
                        max_events: Optional[int] = None, allow_simultaneity: Optional[bool] = None,
                        workers: Optional[int] = None) -> List[Chronology]:
    """All acceptable non-empty chronologies over the given events, canonically sorted.

    Events that are left out of a chronology are simply absent; a behavior
    does not have to be maximal.
    """
    max_events = gc.max_events if max_events is None else max_events
    allow_simultaneity = gc.allow_simultaneity if allow_simultaneity is None else allow_simultaneity
    workers = gc.workers if workers is None else max(1, workers)
    scope = _scope(cs, events, max_events)

    search = _Search(cs, scope, allow_simultaneity)
    branches = list(search.next_slots((), {}))
    found: List[Slots] = []
    if workers > 1 and len(branches) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_explore_branch, cs, scope, allow_simultaneity, first) for first in branches]
            for future in _progress(as_completed(futures), len(futures)):
                found.extend(future.result())
    else:
        for first in _progress(branches, len(branches)):
            found.extend(search.explore((first,)))

    behaviors = sorted((Chronology(slots) for slots in found), key=Chronology.sort_key)
    logger.debug("%d behaviors over %d events", len(behaviors), len(scope))
    gc.log_event(key="behaviors_enumerated", value=len(behaviors),
                 metadata={"events": len(scope), "allow_simultaneity": allow_simultaneity, "workers": workers})
    return behaviors


def _ordered_partitions(items: Tuple[str, ...]) -> Iterator[Slots]:
    if not items:
        yield ()
        return
    for size in range(1, len(items) + 1):
        for head in combinations(items, size):
            rest = tuple(e for e in items if e not in head)
            for tail in _ordered_partitions(rest):
                yield (frozenset(head),) + tail


def brute_force_oracle(cs: ConstraintSet, events: Optional[Iterable[str]] = None,
                       max_events: Optional[int] = None) -> List[Chronology]:
    """Every ordered partition of every non-empty subset, kept when check_trace accepts it."""
    max_events = gc.oracle_max_events if max_events is None else max_events
    scope = _scope(cs, events, max_events)
    accepted = []
    for size in range(1, len(scope) + 1):
        for subset in combinations(scope, size):
            for slots in _ordered_partitions(subset):
                chronology = Chronology(slots)
                if verdict_of(cs, chronology).accepted:
                    accepted.append(chronology)
    return sorted(accepted, key=Chronology.sort_key)


def sequences(behaviors: Iterable[Chronology]) -> FrozenSet[Tuple[Tuple[str, ...], ...]]:
    """Behaviors as comparable label sequences, for set comparisons between models."""
    return frozenset(tuple(tuple(sorted(slot)) for slot in b.slots) for b in behaviors)
