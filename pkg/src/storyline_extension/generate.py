"""Seeded random extension problems for differential testing."""
from __future__ import annotations

import itertools
import random

from .model import (
    ExtensionProblem,
    Layout,
    Meeting,
    StorylineInstance,
    induced_sub_storyline,
    local_crossing_number,
)

__all__ = ["random_instance", "random_layout", "random_problem", "problem_suite"]


def random_instance(rng: random.Random, max_tau: int = 5, max_characters: int = 4) -> StorylineInstance:
    """Random lifespans; at every instant the active characters are split into meetings.

    A group sometimes carries over to the next instant as one longer meeting.
    """
    n = max_characters if rng.random() < 0.7 else rng.randint(1, max_characters)
    tau = rng.randint(min(2, max_tau), max_tau)
    chars = [f"c{i}" for i in range(1, n + 1)]
    spans = {}
    for c in chars:
        a = rng.randint(1, (tau + 1) // 2)
        b = tau if rng.random() < 0.6 else rng.randint(a, tau)
        spans[c] = (a, b)
    first = min(a for a, _ in spans.values())
    spans = {c: (a - first + 1, b - first + 1) for c, (a, b) in spans.items()}
    tau = max(b for _, b in spans.values())
    meetings: list[Meeting] = []
    ongoing: list[list] = []  # [members, begin]
    for t in range(1, tau + 1):
        alive = [c for c in chars if spans[c][0] <= t <= spans[c][1]]
        still = []
        for members, begin in ongoing:
            if all(spans[c][1] >= t for c in members) and rng.random() < 0.35:
                still.append([members, begin])
            else:
                meetings.append(Meeting(frozenset(members), begin, t - 1))
        ongoing = still
        taken = {c for members, _ in ongoing for c in members}
        free = [c for c in alive if c not in taken]
        rng.shuffle(free)
        while free:
            size = min(len(free), rng.choice((1, 2, 2, 2, 3)))
            ongoing.append([free[:size], t])
            free = free[size:]
    for members, begin in ongoing:
        meetings.append(Meeting(frozenset(members), begin, tau))
    return StorylineInstance(frozenset(chars), tuple(meetings))


def random_layout(rng: random.Random, instance: StorylineInstance, tries: int = 200) -> Layout | None:
    """A random valid layout found by randomized backtracking, or None."""
    tau = instance.tau
    options = {}
    for t in range(1, tau + 1):
        groups = [m.members for m in instance.meetings_at(t)]
        opts = []
        for perm in itertools.permutations(sorted(instance.active(t))):
            pos = {c: i for i, c in enumerate(perm)}
            if all(max(pos[c] for c in g) - min(pos[c] for c in g) + 1 == len(g) for g in groups):
                opts.append(perm)
        options[t] = opts
    protected = {
        t: frozenset().union(*(m.members for m in instance.meetings if m.spans_strip(t)))
        for t in range(2, tau + 1)
    }
    budget = [tries]

    def ok(prev: tuple[str, ...], cur: tuple[str, ...], t: int) -> bool:
        common = [c for c in prev if c in cur]
        for a, b in itertools.combinations(common, 2):
            if (prev.index(a) < prev.index(b)) != (cur.index(a) < cur.index(b)):
                if a in protected[t] or b in protected[t]:
                    return False
        return True

    def walk(t: int, chosen: list[tuple[str, ...]]) -> list[tuple[str, ...]] | None:
        if t > tau:
            return chosen
        opts = list(options[t])
        rng.shuffle(opts)
        for o in opts:
            budget[0] -= 1
            if budget[0] < 0:
                return None
            if chosen and not ok(chosen[-1], o, t):
                continue
            found = walk(t + 1, chosen + [o])
            if found is not None:
                return found
        return None

    found = walk(1, [])
    return None if found is None else Layout(tuple(found))


def random_problem(
    rng: random.Random,
    max_tau: int = 5,
    max_characters: int = 4,
    max_new: int = 2,
    max_chi: int = 3,
) -> ExtensionProblem:
    """Draw instances until one has a fixed sub-layout within the budget cap."""
    while True:
        inst = random_instance(rng, max_tau, max_characters)
        chars = sorted(inst.characters)
        k = rng.randint(0, min(max_new, len(chars)))
        if k == 0 and rng.random() < 0.7:
            k = min(max_new, len(chars))
        new = set(rng.sample(chars, k))
        fixed = frozenset(c for c in chars if c not in new)
        sub = induced_sub_storyline(inst, fixed)
        layout = random_layout(rng, sub)
        if layout is None:
            continue
        layout = Layout.from_mapping({t: layout.order(t) for t in range(1, inst.tau + 1)}, inst.tau)
        lcn = local_crossing_number(sub, layout)
        if lcn > max_chi:
            continue
        # tight budgets are where rejections live
        chi = lcn if rng.random() < 0.7 else rng.randint(lcn, max_chi)
        return ExtensionProblem(inst, chi, fixed, layout)


def problem_suite(seed: int, count: int, **kwargs) -> list[ExtensionProblem]:
    rng = random.Random(seed)
    return [random_problem(rng, **kwargs) for _ in range(count)]
