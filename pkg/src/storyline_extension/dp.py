"""Layer-by-layer dynamic program for storyline extension.

A state at instant t is a placement of the active new characters into
the slots between consecutive fixed characters, plus the crossing count
accumulated by every active character strictly before t. Crossings among
fixed characters come from the fixed layout and are folded in from
precomputed per-strip tables.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Iterable, Sequence

from .model import (
    ExtensionProblem,
    InvalidProblemError,
    Layout,
    strip_crossings,
    validate_extension_problem,
)

__all__ = [
    "Placement",
    "DPState",
    "Layer",
    "SolveResult",
    "enumerate_placements",
    "transition",
    "solve",
    "reconstruct_witness",
    "dominance_prune",
    "min_chi",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Placement:
    """Slot assignment and intra-slot order of the new characters at one instant.

    ``order`` lists the new characters top to bottom; ``slots[i]`` is the
    slot of ``order[i]`` and is non-decreasing. Slot 0 lies above the
    topmost fixed character, slot ``len(fixed_order)`` below the lowest.
    """

    order: tuple[str, ...] = ()
    slots: tuple[int, ...] = ()

    @property
    def slot_of(self) -> dict[str, int]:
        return dict(zip(self.order, self.slots))

    def merge(self, fixed_order: Sequence[str]) -> tuple[str, ...]:
        """The full top-to-bottom order at this instant."""
        out: list[str] = []
        j = 0
        for s, c in enumerate(fixed_order):
            while j < len(self.order) and self.slots[j] == s:
                out.append(self.order[j])
                j += 1
            out.append(c)
        out.extend(self.order[j:])
        return tuple(out)


@dataclass(eq=False)
class DPState:
    time: int
    placement: Placement
    budgets: tuple[int, ...]
    predecessor: DPState | None = None

    @property
    def key(self) -> tuple[Placement, tuple[int, ...]]:
        return (self.placement, self.budgets)


@dataclass
class Layer:
    time: int
    states: dict[tuple[Placement, tuple[int, ...]], DPState] = field(default_factory=dict)

    def add(self, state: DPState) -> bool:
        if state.key in self.states:
            return False
        self.states[state.key] = state
        return True

    def __len__(self) -> int:
        return len(self.states)

    def __iter__(self):
        return iter(self.states.values())


@dataclass
class SolveResult:
    accepted: bool
    chi: int
    witness: Layout | None = None
    layer_sizes: list[int] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.accepted


def _contiguous(order: Sequence[str], groups: Iterable[frozenset[str]]) -> bool:
    pos = {c: i for i, c in enumerate(order)}
    for g in groups:
        idx = [pos[c] for c in g if c in pos]
        if idx and max(idx) - min(idx) + 1 != len(g):
            return False
    return True


class _Tables:
    """Per-problem precomputation shared by every transition."""

    def __init__(self, problem: ExtensionProblem, lookahead: bool = True):
        self.problem = problem
        self.chi = problem.chi
        self.lookahead = lookahead
        full = problem.full
        fixed = problem.fixed_characters
        self.tau = tau = full.tau
        n = tau + 1
        self.active: list[tuple[str, ...]] = [()] * n
        self.index: list[dict[str, int]] = [{}] * n
        self.fixed_order: list[tuple[str, ...]] = [()] * n
        self.fixed_pos: list[dict[str, int]] = [{}] * n
        self.new: list[tuple[str, ...]] = [()] * n
        self.groups: list[list[frozenset[str]]] = [[]] * n
        self.protected: list[frozenset[str]] = [frozenset()] * n
        self.carry: list[tuple[int, ...]] = [()] * n
        self.baseline: list[tuple[int, ...]] = [()] * n
        self.remaining: list[tuple[int, ...]] = [()] * n

        for t in range(1, n):
            acts = tuple(sorted(full.active(t)))
            self.active[t] = acts
            self.index[t] = {c: i for i, c in enumerate(acts)}
            pi = problem.fixed_layout.order(t)
            self.fixed_order[t] = pi
            self.fixed_pos[t] = {c: i for i, c in enumerate(pi)}
            self.new[t] = tuple(c for c in acts if c not in fixed)
            self.groups[t] = [m.members for m in full.meetings_at(t) if len(m.members) > 1]
            self.protected[t] = frozenset().union(
                *(m.members for m in full.meetings_at(t) if m.spans_strip(t))
            )
            self.carry[t] = tuple(self.index[t - 1].get(c, -1) for c in acts)

        # fixed-fixed crossings per strip, then suffix sums for look-ahead
        per_strip: list[dict[str, int]] = [{} for _ in range(n + 1)]
        for t in range(2, n):
            per_strip[t] = strip_crossings(self.fixed_order[t - 1], self.fixed_order[t])
        later: dict[str, int] = {}
        for t in range(n - 1, 0, -1):
            acts = self.active[t]
            self.baseline[t] = tuple(per_strip[t].get(c, 0) for c in acts)
            if lookahead:
                self.remaining[t] = tuple(later.get(c, 0) for c in acts)
            else:
                self.remaining[t] = (0,) * len(acts)
            for c, k in per_strip[t].items():
                later[c] = later.get(c, 0) + k

        self._placements: dict[int, list[Placement]] = {}
        self._by_slots: dict[int, dict[tuple[int, ...], list[Placement]]] = {}
        self._rho: dict[tuple[int, Placement], tuple[str, ...]] = {}
        self._moves: dict[int, dict[tuple[int, int], tuple[tuple[int, ...], bool]]] = {}

    # -- placements

    def placements(self, t: int) -> list[Placement]:
        cached = self._placements.get(t)
        if cached is not None:
            return cached
        pi = self.fixed_order[t]
        new = self.new[t]
        groups = self.groups[t]
        found: list[tuple[tuple[str, ...], Placement]] = []
        for perm in itertools.permutations(new):
            for slots in itertools.combinations_with_replacement(range(len(pi) + 1), len(new)):
                p = Placement(perm, slots)
                rho = p.merge(pi)
                if _contiguous(rho, groups):
                    found.append((rho, p))
        found.sort(key=lambda x: x[0])
        result = [p for _, p in found]
        by_slots: dict[tuple[int, ...], list[Placement]] = {}
        for rho, p in found:
            self._rho[(t, p)] = rho
            so = p.slot_of
            by_slots.setdefault(tuple(so[c] for c in new), []).append(p)
        self._placements[t] = result
        self._by_slots[t] = by_slots
        return result

    def rho(self, t: int, p: Placement) -> tuple[str, ...]:
        r = self._rho.get((t, p))
        if r is None:
            r = p.merge(self.fixed_order[t])
            self._rho[(t, p)] = r
        return r

    def moves(self, t: int) -> dict[tuple[int, int], tuple[tuple[int, ...], bool]]:
        """For a new character going from slot a at t-1 to slot b at t:
        indices (into active[t]) of fixed characters it crosses, and whether
        any of them is protected in this strip."""
        cached = self._moves.get(t)
        if cached is not None:
            return cached
        prev_pos = self.fixed_pos[t - 1]
        now_pos = self.fixed_pos[t]
        common = [c for c in self.fixed_order[t] if c in prev_pos]
        idx = self.index[t]
        prot = self.protected[t]
        table = {}
        for a in range(len(self.fixed_order[t - 1]) + 1):
            for b in range(len(self.fixed_order[t]) + 1):
                hit = tuple(
                    idx[c] for c in common if (prev_pos[c] < a) != (now_pos[c] < b)
                )
                table[(a, b)] = (hit, any(self.active[t][i] in prot for i in hit))
        self._moves[t] = table
        return table

    # -- transitions

    def initial_states(self) -> list[DPState]:
        if self.tau == 0:
            return []
        zeros = (0,) * len(self.active[1])
        return [DPState(1, p, zeros) for p in self.placements(1)]

    def step(self, prev: DPState, placement: Placement) -> DPState | None:
        t = prev.time + 1
        chi = self.chi
        acts = self.active[t]
        idx = self.index[t]
        budgets = [
            prev.budgets[j] + b if j >= 0 else 0
            for j, b in zip(self.carry[t], self.baseline[t])
        ]
        rho_prev = self.rho(t - 1, prev.placement)
        rho_now = self.rho(t, placement)
        pos_prev = {c: i for i, c in enumerate(rho_prev)}
        pos_now = {c: i for i, c in enumerate(rho_now)}
        prot = self.protected[t]
        fixed = self.problem.fixed_characters
        movers = [c for c in placement.order if c in pos_prev]
        for i, n in enumerate(movers):
            pn, qn = pos_prev[n], pos_now[n]
            for c, pc in pos_prev.items():
                if c == n or c not in pos_now:
                    continue
                if c not in fixed and c in movers[: i + 1]:
                    continue  # new-new pairs are counted once
                if (pn < pc) != (qn < pos_now[c]):
                    if n in prot or c in prot:
                        return None
                    budgets[idx[n]] += 1
                    budgets[idx[c]] += 1
        rem = self.remaining[t]
        for b, r in zip(budgets, rem):
            if b + r > chi:
                return None
        return DPState(t, placement, tuple(budgets), prev)

    def successors(self, prev: DPState) -> list[DPState]:
        """All feasible successors of ``prev``.

        Candidate placements are first narrowed per new character using
        only necessary conditions, then each survivor goes through ``step``.
        """
        t = prev.time + 1
        self.placements(t)
        moves = self.moves(t)
        new = self.new[t]
        prev_slot = prev.placement.slot_of
        chi = self.chi
        rem = self.remaining[t]
        carry = self.carry[t]
        base = self.baseline[t]
        # budget of every character at t before counting new-character crossings
        start = [prev.budgets[j] + b if j >= 0 else 0 for j, b in zip(carry, base)]
        slack = [chi - s - r for s, r in zip(start, rem)]
        prot = self.protected[t]
        n_slots = len(self.fixed_order[t]) + 1
        choices: list[list[int]] = []
        for c in new:
            if c not in prev_slot:
                choices.append(list(range(n_slots)))
                continue
            a = prev_slot[c]
            own = slack[self.index[t][c]]
            ok = []
            for b in range(n_slots):
                hit, hits_protected = moves[(a, b)]
                if hit and (hits_protected or c in prot):
                    continue
                if len(hit) > own:
                    continue
                if any(slack[i] < 1 for i in hit):
                    continue
                ok.append(b)
            if not ok:
                return []
            choices.append(ok)
        by_slots = self._by_slots[t]
        out = []
        for combo in itertools.product(*choices):
            for p in by_slots.get(combo, ()):
                s = self.step(prev, p)
                if s is not None:
                    out.append(s)
        out.sort(key=lambda s: self.rho(t, s.placement))
        return out


@lru_cache(maxsize=16)
def _tables(problem: ExtensionProblem, lookahead: bool = True) -> _Tables:
    return _Tables(problem, lookahead)


def enumerate_placements(problem: ExtensionProblem, t: int) -> list[Placement]:
    """Placements at ``t`` whose full order keeps every active meeting contiguous."""
    if not 1 <= t <= problem.full.tau:
        raise ValueError(f"time instant {t} outside [1, {problem.full.tau}]")
    return list(_tables(problem).placements(t))


def transition(problem: ExtensionProblem, prev: DPState, placement: Placement) -> DPState | None:
    """Extend ``prev`` (at t-1) by ``placement`` (at t); None if infeasible."""
    return _tables(problem, False).step(prev, placement)


def dominance_prune(layer: Layer) -> Layer:
    """Drop states whose budgets are componentwise >= another state's with the same placement."""
    groups: dict[Placement, list[DPState]] = {}
    for s in layer:
        groups.setdefault(s.placement, []).append(s)
    dominated: set[int] = set()
    for states in groups.values():
        if len(states) < 2:
            continue
        ranked = sorted(states, key=lambda s: sum(s.budgets))
        kept: list[DPState] = []
        for s in ranked:
            if any(all(a <= b for a, b in zip(k.budgets, s.budgets)) for k in kept):
                dominated.add(id(s))
            else:
                kept.append(s)
    out = Layer(layer.time)
    for s in layer:
        if id(s) not in dominated:
            out.add(s)
    return out


def reconstruct_witness(final_state: DPState, problem: ExtensionProblem) -> Layout:
    """Follow back-pointers from an instant-tau state and merge with the fixed layout."""
    orders: dict[int, tuple[str, ...]] = {}
    s: DPState | None = final_state
    while s is not None:
        orders[s.time] = s.placement.merge(problem.fixed_layout.order(s.time))
        s = s.predecessor
    tau = problem.full.tau
    if sorted(orders) != list(range(1, tau + 1)):
        raise RuntimeError(f"back-pointer chain covers {sorted(orders)}, expected 1..{tau}")
    return Layout.from_mapping(orders, tau)


def solve(
    problem: ExtensionProblem,
    *,
    prune: bool = True,
    lookahead: bool = True,
    validate: bool = True,
) -> SolveResult:
    """Decide whether the fixed layout extends with local crossing number <= chi.

    On acceptance the result carries a witness layout of the full instance.
    ``prune`` toggles dominance pruning and ``lookahead`` discards states
    that cannot absorb the fixed layout's remaining crossings; neither
    changes the decision.
    """
    if validate:
        report = validate_extension_problem(problem)
        if report:
            raise InvalidProblemError(report)
    tau = problem.full.tau
    if tau == 0:
        return SolveResult(True, problem.chi, Layout(()), [])
    tables = _Tables(problem, lookahead)
    layer = Layer(1)
    for s in tables.initial_states():
        if all(b + r <= problem.chi for b, r in zip(s.budgets, tables.remaining[1])):
            layer.add(s)
    if prune:
        layer = dominance_prune(layer)
    sizes = [len(layer)]
    for t in range(2, tau + 1):
        nxt = Layer(t)
        for state in layer:
            for s in tables.successors(state):
                nxt.add(s)
        if prune:
            nxt = dominance_prune(nxt)
        layer = nxt
        sizes.append(len(layer))
        if not layer:
            log.debug("no feasible state at t=%d", t)
            return SolveResult(False, problem.chi, None, sizes)
    final = next(iter(layer), None)
    if final is None:
        return SolveResult(False, problem.chi, None, sizes)
    return SolveResult(True, problem.chi, reconstruct_witness(final, problem), sizes)


def min_chi(problem: ExtensionProblem, **solve_kwargs) -> SolveResult | None:
    """Smallest budget admitting an extension, by scanning chi upward.

    Returns None when no extension exists for any budget (for instance,
    contradictory contiguity constraints).
    """
    from .model import local_crossing_number

    start = local_crossing_number(problem.sub_instance, problem.fixed_layout)
    sigma, tau = problem.full.sigma, problem.full.tau
    upper = max(start, max(sigma - 1, 0) * max(tau - 1, 0))
    for chi in range(start, upper + 1):
        result = solve(replace(problem, chi=chi), **solve_kwargs)
        if result.accepted:
            return result
    return None
