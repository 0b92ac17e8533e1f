"""Exhaustive reference solvers for small inputs.

These exist to check the dynamic program and the reduction; they favour
obviously-correct enumeration over speed and refuse inputs that are too
large to enumerate.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .model import ExtensionProblem, Layout

__all__ = [
    "OracleSizeError",
    "OracleResult",
    "EubpInstance",
    "EubpResult",
    "brute_force_solve",
    "brute_force_eubp",
    "eubp_by_coloring",
]

MAX_CHARACTERS = 6
MAX_TAU = 6
MAX_ITEMS = 12


class OracleSizeError(ValueError):
    pass


@dataclass
class OracleResult:
    accepted: bool
    min_lcn: int | None
    witness: Layout | None


def _orders_at(problem: ExtensionProblem, t: int) -> list[tuple[str, ...]]:
    """Every order of A_t that extends the fixed order and keeps meetings at t contiguous."""
    full = problem.full
    fixed_order = problem.fixed_layout.order(t)
    fixed = problem.fixed_characters
    meetings = [m for m in full.meetings if m.begin <= t <= m.end]
    out = []
    for perm in itertools.permutations(sorted(full.active(t))):
        if tuple(c for c in perm if c in fixed) != fixed_order:
            continue
        ok = True
        for m in meetings:
            pos = [i for i, c in enumerate(perm) if c in m.members]
            if pos[-1] - pos[0] + 1 != len(m.members):
                ok = False
                break
        if ok:
            out.append(perm)
    return out


def _crossing_pairs(a: Sequence[str], b: Sequence[str]) -> list[tuple[str, str]]:
    common = [c for c in a if c in b]
    pairs = []
    for i, x in enumerate(common):
        for y in common[i + 1:]:
            if (a.index(x) < a.index(y)) != (b.index(x) < b.index(y)):
                pairs.append((x, y))
    return pairs


def brute_force_solve(problem: ExtensionProblem) -> OracleResult:
    """Minimum local crossing number over all extensions of the fixed layout.

    Walks every sequence of valid orders instant by instant. A branch is
    abandoned only once its running maximum can no longer beat the best
    complete sequence found so far.
    """
    full = problem.full
    if len(full.characters) > MAX_CHARACTERS or full.tau > MAX_TAU:
        raise OracleSizeError(
            f"oracle limited to {MAX_CHARACTERS} characters and {MAX_TAU} instants, "
            f"got {len(full.characters)} and {full.tau}"
        )
    tau = full.tau
    candidates = {t: _orders_at(problem, t) for t in range(1, tau + 1)}
    spanning = {
        t: [m.members for m in full.meetings if m.begin <= t - 1 and t <= m.end]
        for t in range(2, tau + 1)
    }
    best: list = [None, None]  # [lcn, orders]

    def walk(t: int, chosen: list[tuple[str, ...]], counts: dict[str, int], worst: int) -> None:
        if best[0] is not None and worst >= best[0]:
            return
        if t > tau:
            best[0], best[1] = worst, list(chosen)
            return
        for order in candidates[t]:
            new_counts = dict(counts)
            new_worst = worst
            if chosen:
                pairs = _crossing_pairs(chosen[-1], order)
                if any(x in g or y in g for x, y in pairs for g in spanning[t]):
                    continue
                for x, y in pairs:
                    new_counts[x] = new_counts.get(x, 0) + 1
                    new_counts[y] = new_counts.get(y, 0) + 1
                    new_worst = max(new_worst, new_counts[x], new_counts[y])
            chosen.append(order)
            walk(t + 1, chosen, new_counts, new_worst)
            chosen.pop()

    walk(1, [], {}, 0)
    if best[0] is None:
        return OracleResult(False, None, None)
    witness = Layout(tuple(best[1]))
    return OracleResult(best[0] <= problem.chi, best[0], witness)


# ---------------------------------------------------------------- bin packing


@dataclass(frozen=True)
class EubpInstance:
    """Exact unary bin packing: split ``items`` into ``bins`` groups of sum ``capacity``."""

    items: tuple[int, ...]
    bins: int
    capacity: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "items", tuple(self.items))
        if any(x < 1 for x in self.items):
            raise ValueError("items must be positive integers")
        if self.bins < 1 or self.capacity < 1:
            raise ValueError("bins and capacity must be positive")

    @property
    def balanced(self) -> bool:
        return sum(self.items) == self.bins * self.capacity


@dataclass
class EubpResult:
    accepted: bool
    assignment: tuple[int, ...] | None = None  # bin index per item

    def bins_of(self, instance: EubpInstance) -> list[list[int]] | None:
        if self.assignment is None:
            return None
        out: list[list[int]] = [[] for _ in range(instance.bins)]
        for x, b in zip(instance.items, self.assignment):
            out[b].append(x)
        return out


def brute_force_eubp(instance: EubpInstance) -> EubpResult:
    """Recursive bin filling; items go largest first, equal-load bins tried once."""
    if len(instance.items) > MAX_ITEMS:
        raise OracleSizeError(f"at most {MAX_ITEMS} items, got {len(instance.items)}")
    if not instance.balanced:
        return EubpResult(False)
    cap = instance.capacity
    order = sorted(range(len(instance.items)), key=lambda i: -instance.items[i])
    loads = [0] * instance.bins
    assign = [0] * len(instance.items)

    def place(j: int) -> bool:
        if j == len(order):
            return all(load == cap for load in loads)
        i = order[j]
        x = instance.items[i]
        tried = set()
        for b in range(instance.bins):
            if loads[b] + x > cap or loads[b] in tried:
                continue
            tried.add(loads[b])
            loads[b] += x
            assign[i] = b
            if place(j + 1):
                return True
            loads[b] -= x
        return False

    if place(0):
        return EubpResult(True, tuple(assign))
    return EubpResult(False)


def eubp_by_coloring(instance: EubpInstance) -> EubpResult:
    """Try every map from items to bins."""
    if len(instance.items) > 8:
        raise OracleSizeError("colouring oracle limited to 8 items")
    for colors in itertools.product(range(instance.bins), repeat=len(instance.items)):
        sums = [0] * instance.bins
        for x, c in zip(instance.items, colors):
            sums[c] += x
        if all(s == instance.capacity for s in sums):
            return EubpResult(True, tuple(colors))
    return EubpResult(False)
