"""Storyline instances, layouts and crossing counts.

Time instants are integers starting at 1. An order is a tuple of character
ids listed top to bottom; position 0 is the topmost curve.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, NamedTuple, Sequence

__all__ = [
    "Meeting",
    "StorylineInstance",
    "Lifespan",
    "Layout",
    "ExtensionProblem",
    "Violation",
    "Stats",
    "InvalidInstanceError",
    "InvalidLayoutError",
    "InvalidProblemError",
    "derive_lifespans",
    "active_set",
    "validate_instance",
    "induced_sub_storyline",
    "strip_crossings",
    "crossings_per_character",
    "local_crossing_number",
    "validate_layout",
    "validate_extension_problem",
    "stats",
]


@dataclass(frozen=True)
class Violation:
    """One entry of a validation report."""

    code: str
    message: str
    character: str | None = None
    meeting: Meeting | None = None
    time: int | None = None

    def __str__(self) -> str:
        return f"{self.code}: {self.message}"


class _ReportError(ValueError):
    def __init__(self, violations: Sequence[Violation], what: str = "input"):
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations[:5])
        more = "" if len(self.violations) <= 5 else f" (+{len(self.violations) - 5} more)"
        super().__init__(f"invalid {what}: {lines}{more}")

    @property
    def codes(self) -> list[str]:
        return [v.code for v in self.violations]


class InvalidInstanceError(_ReportError):
    def __init__(self, violations: Sequence[Violation]):
        super().__init__(violations, "instance")


class InvalidLayoutError(_ReportError):
    def __init__(self, violations: Sequence[Violation]):
        super().__init__(violations, "layout")


class InvalidProblemError(_ReportError):
    def __init__(self, violations: Sequence[Violation]):
        super().__init__(violations, "extension problem")


@dataclass(frozen=True)
class Meeting:
    members: frozenset[str]
    begin: int
    end: int

    def __post_init__(self) -> None:
        if not isinstance(self.members, frozenset):
            object.__setattr__(self, "members", frozenset(self.members))

    def active_at(self, t: int) -> bool:
        return self.begin <= t <= self.end

    def spans_strip(self, t: int) -> bool:
        """True if the meeting is ongoing over the whole strip (t-1, t)."""
        return self.begin <= t - 1 and t <= self.end

    @property
    def sort_key(self) -> tuple[int, int, tuple[str, ...]]:
        return (self.begin, self.end, tuple(sorted(self.members)))

    def __repr__(self) -> str:
        return f"Meeting({sorted(self.members)}, {self.begin}, {self.end})"


class Lifespan(NamedTuple):
    first: int
    last: int

    def __contains__(self, t: object) -> bool:
        return isinstance(t, int) and self.first <= t <= self.last


@dataclass(frozen=True)
class StorylineInstance:
    """Characters plus meetings. Meetings are kept in canonical order."""

    characters: frozenset[str]
    meetings: tuple[Meeting, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "characters", frozenset(self.characters))
        ms = tuple(sorted(self.meetings, key=lambda m: m.sort_key))
        object.__setattr__(self, "meetings", ms)

    @cached_property
    def lifespans(self) -> dict[str, Lifespan]:
        # characters without a meeting get no entry
        spans: dict[str, Lifespan] = {}
        for m in self.meetings:
            for c in m.members:
                old = spans.get(c)
                if old is None:
                    spans[c] = Lifespan(m.begin, m.end)
                else:
                    spans[c] = Lifespan(min(old.first, m.begin), max(old.last, m.end))
        return spans

    @cached_property
    def tau(self) -> int:
        return max((s.last for s in self.lifespans.values()), default=0)

    @cached_property
    def _actives(self) -> tuple[frozenset[str], ...]:
        acts: list[set[str]] = [set() for _ in range(self.tau + 1)]
        for c, span in self.lifespans.items():
            if c not in self.characters:
                continue
            for t in range(max(span.first, 1), span.last + 1):
                acts[t].add(c)
        return tuple(frozenset(a) for a in acts)

    def active(self, t: int) -> frozenset[str]:
        """A_t; empty outside [1, tau]."""
        if 1 <= t <= self.tau:
            return self._actives[t]
        return frozenset()

    @cached_property
    def _by_instant(self) -> dict[int, list[Meeting]]:
        index: dict[int, list[Meeting]] = {}
        for m in self.meetings:
            for t in range(max(m.begin, 1), m.end + 1):
                index.setdefault(t, []).append(m)
        return index

    def meetings_at(self, t: int) -> list[Meeting]:
        return list(self._by_instant.get(t, ()))

    @cached_property
    def sigma(self) -> int:
        return max((len(a) for a in self._actives), default=0)


@dataclass(frozen=True)
class Layout:
    """Per-instant vertical orders; ``orders[t - 1]`` is the order at time t."""

    orders: tuple[tuple[str, ...], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "orders", tuple(tuple(o) for o in self.orders))

    @classmethod
    def from_mapping(cls, orders: Mapping[int, Sequence[str]], tau: int | None = None) -> Layout:
        if tau is None:
            tau = max(orders, default=0)
        return cls(tuple(tuple(orders.get(t, ())) for t in range(1, tau + 1)))

    @property
    def tau(self) -> int:
        return len(self.orders)

    def order(self, t: int) -> tuple[str, ...]:
        if 1 <= t <= len(self.orders):
            return self.orders[t - 1]
        return ()

    def restrict(self, characters: Iterable[str]) -> Layout:
        keep = frozenset(characters)
        return Layout(tuple(tuple(c for c in o if c in keep) for o in self.orders))


@dataclass(frozen=True)
class ExtensionProblem:
    full: StorylineInstance
    chi: int
    fixed_characters: frozenset[str]
    fixed_layout: Layout

    def __post_init__(self) -> None:
        object.__setattr__(self, "fixed_characters", frozenset(self.fixed_characters))

    @property
    def new_characters(self) -> frozenset[str]:
        return self.full.characters - self.fixed_characters

    @cached_property
    def sub_instance(self) -> StorylineInstance:
        return induced_sub_storyline(self.full, self.fixed_characters)


@dataclass(frozen=True)
class Stats:
    n: int
    k: int
    tau: int
    mu: int
    sigma: int

    def as_dict(self) -> dict[str, int]:
        return {"n": self.n, "k": self.k, "tau": self.tau, "mu": self.mu, "sigma": self.sigma}


# ---------------------------------------------------------------- instances


def validate_instance(instance: StorylineInstance, *, check_origin: bool = True) -> list[Violation]:
    """Report every broken invariant of ``instance``.

    ``check_origin`` enforces that the earliest lifespan starts at 1; it is
    switched off for induced sub-storylines, which keep the parent's clock.
    """
    report: list[Violation] = []
    for c in sorted(instance.characters):
        if not c:
            report.append(Violation("EMPTY_CHARACTER_ID", "character id must be non-empty"))
    for m in instance.meetings:
        if not m.members:
            report.append(Violation("EMPTY_MEETING", f"{m!r} has no members", meeting=m))
        if m.begin > m.end:
            report.append(
                Violation("MEETING_TIME_ORDER", f"{m!r} begins after it ends", meeting=m)
            )
        if m.begin < 1:
            report.append(Violation("BAD_TIME", f"{m!r} begins before instant 1", meeting=m))
        for c in sorted(m.members - instance.characters):
            report.append(
                Violation("UNKNOWN_CHARACTER", f"{m!r} names unknown character {c!r}",
                          character=c, meeting=m)
            )

    by_char: dict[str, list[Meeting]] = {}
    for m in instance.meetings:
        for c in m.members:
            by_char.setdefault(c, []).append(m)
    for c in sorted(instance.characters):
        if c not in by_char:
            report.append(Violation("NO_MEETING", f"character {c!r} is in no meeting", character=c))
    for c, ms in sorted(by_char.items()):
        # sweep by begin time; each meeting is checked against the one reaching furthest
        reach: Meeting | None = None
        for b in sorted(ms, key=lambda m: m.sort_key):
            if reach is not None and b.begin <= reach.end:
                report.append(
                    Violation("DOUBLE_BOOKED",
                              f"{c!r} is in {reach!r} and {b!r} at t={b.begin}",
                              character=c, meeting=b, time=b.begin)
                )
            if reach is None or b.end > reach.end:
                reach = b

    if check_origin and instance.meetings:
        first = min(m.begin for m in instance.meetings)
        if first != 1:
            report.append(
                Violation("TIME_ORIGIN", f"earliest meeting begins at {first}, expected 1", time=first)
            )
    return report


def _require_valid(instance: StorylineInstance, *, check_origin: bool = True) -> None:
    report = validate_instance(instance, check_origin=check_origin)
    if report:
        raise InvalidInstanceError(report)


def derive_lifespans(instance: StorylineInstance) -> dict[str, Lifespan]:
    _require_valid(instance)
    return {c: instance.lifespans[c] for c in sorted(instance.characters)}


def active_set(instance: StorylineInstance, t: int) -> frozenset[str]:
    if not 1 <= t <= instance.tau:
        raise ValueError(f"time instant {t} outside [1, {instance.tau}]")
    return instance.active(t)


def induced_sub_storyline(instance: StorylineInstance, subset: Iterable[str]) -> StorylineInstance:
    """Restrict ``instance`` to ``subset``, keeping every meeting that touches it."""
    keep = frozenset(subset)
    if not keep <= instance.characters:
        extra = sorted(keep - instance.characters)
        raise ValueError(f"subset names characters outside the instance: {extra}")
    meetings = tuple(
        Meeting(m.members & keep, m.begin, m.end) for m in instance.meetings if m.members & keep
    )
    covered = frozenset().union(*(m.members for m in meetings))
    orphans = sorted(keep - covered)
    if orphans:
        raise ValueError(f"characters left without any meeting: {orphans}")
    return StorylineInstance(keep, meetings)


# ---------------------------------------------------------------- crossings


def _check_distinct(order: Sequence[str]) -> None:
    dups = [c for c, n in Counter(order).items() if n > 1]
    if dups:
        raise ValueError(f"character {dups[0]!r} appears twice in {list(order)}")


def strip_crossings(before: Sequence[str], after: Sequence[str]) -> dict[str, int]:
    """Per-character inversion counts between two consecutive orders.

    Only characters present in both orders are compared. Each character's
    count is the number of other common characters on the other side of it
    after the strip than before.
    """
    _check_distinct(before)
    _check_distinct(after)
    pos_after = {c: i for i, c in enumerate(after)}
    common = [c for c in before if c in pos_after]
    # rank of each common character in `after`, listed in `before` order
    ranks = sorted(range(len(common)), key=lambda i: pos_after[common[i]])
    seq = [0] * len(common)
    for r, i in enumerate(ranks):
        seq[i] = r
    n = len(seq)
    tree = [0] * (n + 1)

    def add(i: int) -> None:
        i += 1
        while i <= n:
            tree[i] += 1
            i += i & -i

    def prefix(i: int) -> int:  # how many inserted ranks are < i
        s = 0
        while i > 0:
            s += tree[i]
            i -= i & -i
        return s

    counts = [0] * n
    for j, r in enumerate(seq):
        above_before = j
        above_both = prefix(r)
        # earlier in `before` but later in `after`
        counts[j] += above_before - above_both
        add(r)
    # later in `before` but earlier in `after`: r - (#earlier with smaller rank)
    tree = [0] * (n + 1)
    for j, r in enumerate(seq):
        counts[j] += r - prefix(r)
        add(r)
    return {c: counts[i] for i, c in enumerate(common)}


def _layout_shape_violations(instance: StorylineInstance, layout: Layout) -> list[Violation]:
    report = []
    if layout.tau > instance.tau and any(layout.order(t) for t in range(instance.tau + 1, layout.tau + 1)):
        report.append(Violation("LAYOUT_LENGTH", f"layout has orders after t={instance.tau}"))
    for t in range(1, instance.tau + 1):
        order = layout.order(t)
        if len(set(order)) != len(order):
            report.append(Violation("DUPLICATE_IN_ORDER", f"order at t={t} repeats a character", time=t))
            continue
        expected = instance.active(t)
        if set(order) != expected:
            missing = sorted(expected - set(order))
            extra = sorted(set(order) - expected)
            report.append(
                Violation("NOT_PERMUTATION",
                          f"order at t={t} is not a permutation of the active set "
                          f"(missing {missing}, unexpected {extra})", time=t)
            )
    return report


def crossings_per_character(instance: StorylineInstance, layout: Layout) -> dict[str, int]:
    shape = _layout_shape_violations(instance, layout)
    if shape:
        raise InvalidLayoutError(shape)
    totals = {c: 0 for c in instance.lifespans if c in instance.characters}
    for t in range(2, instance.tau + 1):
        for c, n in strip_crossings(layout.order(t - 1), layout.order(t)).items():
            totals[c] += n
    return totals


def local_crossing_number(instance: StorylineInstance, layout: Layout) -> int:
    return max(crossings_per_character(instance, layout).values(), default=0)


def validate_layout(instance: StorylineInstance, layout: Layout) -> list[Violation]:
    report = _layout_shape_violations(instance, layout)
    if report:
        return report
    for m in instance.meetings:
        size = len(m.members)
        for t in range(max(m.begin, 1), m.end + 1):
            pos = [i for i, c in enumerate(layout.order(t)) if c in m.members]
            if pos and pos[-1] - pos[0] + 1 != size:
                report.append(
                    Violation("NOT_CONTIGUOUS", f"{m!r} is split at t={t}", meeting=m, time=t)
                )
        if m.end > m.begin:
            for t in range(m.begin + 1, m.end + 1):
                crossed = strip_crossings(layout.order(t - 1), layout.order(t))
                hit = sorted(c for c in m.members if crossed.get(c, 0))
                if hit:
                    report.append(
                        Violation("PROTECTED_CROSSING",
                                  f"{hit} crossed in strip ({t - 1},{t}) during {m!r}",
                                  character=hit[0], meeting=m, time=t)
                    )
    return report


# ---------------------------------------------------------------- problems


def validate_extension_problem(problem: ExtensionProblem) -> list[Violation]:
    report = list(validate_instance(problem.full))
    if problem.chi < 0:
        report.append(Violation("NEGATIVE_CHI", f"crossing budget {problem.chi} is negative"))
    unknown = sorted(problem.fixed_characters - problem.full.characters)
    for c in unknown:
        report.append(Violation("UNKNOWN_FIXED_CHARACTER", f"fixed character {c!r} not in instance",
                                character=c))
    if report:
        return report
    sub = problem.sub_instance
    layout_report = validate_layout(sub, problem.fixed_layout)
    report.extend(layout_report)
    if not layout_report:
        lcn = local_crossing_number(sub, problem.fixed_layout)
        if lcn > problem.chi:
            report.append(
                Violation("BUDGET_EXCEEDED",
                          f"fixed layout has local crossing number {lcn} > chi={problem.chi}")
            )
    return report


def stats(problem: ExtensionProblem) -> Stats:
    fixed = problem.fixed_characters
    return Stats(
        n=len(fixed),
        k=len(problem.new_characters),
        tau=problem.full.tau,
        mu=sum(1 for m in problem.full.meetings if not m.members & fixed),
        sigma=problem.full.sigma,
    )
