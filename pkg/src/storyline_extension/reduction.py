"""Gadget construction turning exact unary bin packing into storyline extension.

Every gadget is a fragment of the fixed sub-storyline: characters, the
meetings among them, and their local top-to-bottom order at each instant
of the gadget's window. Fragments are stacked vertically to produce the
fixed layout of the assembled instance.

Ids encode provenance: ``X2.H3.Z`` is the central character of channel 3
in column 2, ``X2.D1`` a boundary of that column, a ``~`` suffix marks a
saturator partner, ``frame.top``/``frame.bottom`` enclose everything and
``N1``..``NK`` are the characters to insert.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .model import ExtensionProblem, Layout, Meeting, StorylineInstance
from .oracle import EubpInstance

__all__ = [
    "DELTA",
    "GadgetParams",
    "Fragment",
    "Reduction",
    "ReductionError",
    "build_saturator",
    "build_channel",
    "build_column",
    "build_reduction",
    "reduce",
]

DELTA = 2
TOP = "frame.top"
BOTTOM = "frame.bottom"


class ReductionError(ValueError):
    pass


@dataclass(frozen=True)
class GadgetParams:
    k: int
    chi: int
    delta: int = DELTA

    @classmethod
    def for_instance(cls, e: EubpInstance, delta: int = DELTA) -> GadgetParams:
        B, K = e.capacity, e.bins
        return cls(k=K, chi=B + delta * B * (K - 1), delta=delta)


@dataclass
class Fragment:
    characters: list[str]
    meetings: list[Meeting]
    orders: dict[int, tuple[str, ...]]
    window: tuple[int, int]
    roles: dict = field(default_factory=dict)
    # leader -> its saturator's local orders, so parents can restack
    saturators: dict[str, dict[int, tuple[str, ...]]] = field(default_factory=dict)
    # saturator partner -> saturator size
    partners: dict[str, int] = field(default_factory=dict)


def _lifespans(meetings: Iterable[Meeting]) -> dict[str, tuple[int, int]]:
    spans: dict[str, tuple[int, int]] = {}
    for m in meetings:
        for c in m.members:
            lo, hi = spans.get(c, (m.begin, m.end))
            spans[c] = (min(lo, m.begin), max(hi, m.end))
    return spans


def _stack_orders(
    stack: list[str],
    meetings: Iterable[Meeting],
    saturators: Mapping[str, Mapping[int, tuple[str, ...]]],
) -> dict[int, tuple[str, ...]]:
    """Top-to-bottom order per instant for leaders listed in ``stack``.

    A leader inside its saturator window is replaced by the saturator's
    local pair; otherwise it occupies its own row while alive.
    """
    spans = _lifespans(meetings)
    lo = min((spans[c][0] for c in stack if c in spans), default=1)
    hi = max((spans[c][1] for c in stack if c in spans), default=0)
    orders = {}
    for t in range(lo, hi + 1):
        row: list[str] = []
        for c in stack:
            sat = saturators.get(c)
            if sat is not None and t in sat:
                row.extend(sat[t])
            elif c in spans and spans[c][0] <= t <= spans[c][1]:
                row.append(c)
        orders[t] = tuple(row)
    return orders


def build_saturator(
    s: int, start: int, leading: str, partner: str | None = None, partner_side: str = "below"
) -> Fragment:
    """Leader and partner meet at ``start``..``start+s`` and swap at every strip."""
    if s < 0:
        raise ValueError(f"saturator size must be non-negative, got {s}")
    if partner_side not in ("above", "below"):
        raise ValueError("partner_side must be 'above' or 'below'")
    partner = partner or f"{leading}~"
    meetings = [Meeting({leading, partner}, start + i, start + i) for i in range(s + 1)]
    pair = (leading, partner) if partner_side == "below" else (partner, leading)
    orders = {start + i: pair if i % 2 == 0 else pair[::-1] for i in range(s + 1)}
    return Fragment(
        characters=[leading, partner],
        meetings=meetings,
        orders=orders,
        window=(start, start + s),
        roles={"leading": leading, "partner": partner, "size": s},
        saturators={leading: orders},
        partners={partner: s},
    )


def _absorb(parent: Fragment, child: Fragment) -> None:
    for c in child.characters:
        if c not in parent.characters:
            parent.characters.append(c)
    parent.meetings.extend(child.meetings)
    parent.saturators.update(child.saturators)
    parent.partners.update(child.partners)


def build_channel(
    c: int,
    params: GadgetParams,
    start: int,
    *,
    top: str | None = None,
    bottom: str | None = None,
    saturate: tuple[bool, bool] = (True, True),
    prefix: str = "H",
    allow_overfull: bool = False,
) -> Fragment:
    """Central character alternately meeting the top and bottom boundaries.

    Boundary saturators (size chi) run over ``start``..``start+chi``; the
    central saturator (size chi - c) ends at ``start+chi`` and the
    alternating run occupies ``start+chi+1``..``start+chi+1+c``.

    With ``allow_overfull`` a capacity above chi gets an empty central
    saturator instead of raising; such a channel can never be traversed.
    """
    chi = params.chi
    if c < 1:
        raise ValueError(f"channel capacity must be >= 1, got {c}")
    residual = chi - c
    if residual < 0:
        if not allow_overfull:
            raise ReductionError(f"channel capacity {c} exceeds chi={chi}")
        residual = 0
    top = top or f"{prefix}.top"
    bottom = bottom or f"{prefix}.bottom"
    central = f"{prefix}.Z"
    run = start + chi + 1
    frag = Fragment([top, central, bottom], [], {}, (start, run + c))
    for boundary, on in zip((top, bottom), saturate):
        if on:
            _absorb(frag, build_saturator(chi, start, boundary))
    _absorb(frag, build_saturator(residual, run - 1 - residual, central))
    for i in range(c + 1):
        other = top if i % 2 == 0 else bottom
        frag.meetings.append(Meeting({central, other}, run + i, run + i))
    frag.orders = _stack_orders([top, central, bottom], frag.meetings, frag.saturators)
    frag.roles = {
        "central": central,
        "top": top,
        "bottom": bottom,
        "capacity": c,
        "run_start": run,
        "central_saturator": residual,
    }
    return frag


def build_column(
    x: int,
    params: GadgetParams,
    start: int,
    *,
    prefix: str = "X",
    frame: tuple[str, str] | None = None,
    allow_overfull: bool = False,
) -> Fragment:
    """Stack of 2k-1 channels encoding the integer ``x``.

    The middle channel (index k) has capacity x, all others delta*x.
    Adjacent channels share a boundary. One instant after the longest run,
    every boundary gets a closing meeting so that all boundaries live for
    the whole column; with ``frame=(top, bottom)`` the outermost two close
    by meeting those frame characters instead.
    """
    if x < 1:
        raise ValueError(f"column value must be >= 1, got {x}")
    k = params.k
    if k < 1:
        raise ValueError("k must be >= 1")
    n_channels = 2 * k - 1
    bounds = [f"{prefix}.D{i}" for i in range(n_channels + 1)]
    caps = [x if i == k else params.delta * x for i in range(1, n_channels + 1)]
    frag = Fragment(list(bounds), [], {}, (start, start))
    centrals: dict[str, int] = {}
    stack: list[str] = [bounds[0]]
    for i in range(1, n_channels + 1):
        ch = build_channel(
            caps[i - 1],
            params,
            start,
            top=bounds[i - 1],
            bottom=bounds[i],
            saturate=(i == 1, True),
            prefix=f"{prefix}.H{i}",
            allow_overfull=allow_overfull,
        )
        _absorb(frag, ch)
        centrals[ch.roles["central"]] = ch.roles["capacity"]
        stack += [ch.roles["central"], bounds[i]]
    close = start + params.chi + 1 + max(caps) + 1
    inner = bounds[1:-1] if frame else bounds
    for b in inner:
        frag.meetings.append(Meeting({b}, close, close))
    if frame:
        frag.meetings.append(Meeting({frame[0], bounds[0]}, close, close))
        frag.meetings.append(Meeting({bounds[-1], frame[1]}, close, close))
    own = [m for m in frag.meetings if m.members <= set(frag.characters)]
    frag.orders = _stack_orders(stack, own, frag.saturators)
    frag.window = (start, close)
    frag.roles = {
        "boundaries": bounds,
        "centrals": centrals,
        "capacities": caps,
        "sparse": f"{prefix}.H{k}.Z",
        "stack": stack,
        "value": x,
    }
    return frag


@dataclass
class Reduction:
    """An assembled instance plus the bookkeeping needed to inspect it."""

    source: EubpInstance
    params: GadgetParams
    problem: ExtensionProblem
    centrals: dict[str, int]  # central character -> channel capacity
    partners: dict[str, int]  # saturator partner -> saturator size
    columns: list[Fragment]

    def expected_fixed_crossings(self) -> dict[str, int]:
        """Crossings every fixed character should carry in the fixed layout."""
        chi = self.params.chi
        out = {}
        for c in self.problem.fixed_characters:
            if c in self.centrals:
                out[c] = max(chi - self.centrals[c], 0)
            elif c in self.partners:
                out[c] = self.partners[c]
            else:
                out[c] = chi
        return out


def build_reduction(e: EubpInstance) -> Reduction:
    if not e.balanced:
        raise ReductionError(
            f"sum of items {sum(e.items)} != bins*capacity = {e.bins * e.capacity}; "
            "an exact packing requires equality"
        )
    params = GadgetParams.for_instance(e)
    chi, K = params.chi, params.k
    news = [f"N{i}" for i in range(1, K + 1)]
    meetings = [
        Meeting({TOP, BOTTOM}, 1, 1),
        Meeting({TOP, *news}, 2, 2),
        Meeting({*news, BOTTOM}, 3, 3),
        Meeting(set(news), 4, 4),
    ]
    frame = Fragment([TOP, BOTTOM], [], {}, (1, 1))
    _absorb(frame, build_saturator(chi, 5, TOP, partner_side="above"))
    _absorb(frame, build_saturator(chi, 5, BOTTOM, partner_side="below"))
    fixed_meetings = list(frame.meetings)
    saturators = dict(frame.saturators)
    partners = dict(frame.partners)
    fixed_chars = list(frame.characters)
    stack: list[str] = [TOP]
    columns = []
    centrals: dict[str, int] = {}
    w = 6 + chi
    for j, x in enumerate(e.items, start=1):
        col = build_column(x, params, w, prefix=f"X{j}", frame=(TOP, BOTTOM), allow_overfull=True)
        columns.append(col)
        fixed_meetings += col.meetings
        saturators.update(col.saturators)
        partners.update(col.partners)
        centrals.update(col.roles["centrals"])
        fixed_chars += [c for c in col.characters if c not in fixed_chars]
        stack += col.roles["stack"]
        w = col.window[1] + 1
    stack.append(BOTTOM)
    meetings += [
        Meeting(set(news), w, w),
        Meeting({*news, BOTTOM}, w + 1, w + 1),
        Meeting({TOP, *news}, w + 2, w + 2),
        Meeting({TOP, BOTTOM}, w + 3, w + 3),
    ]
    tau = w + 3
    all_meetings = fixed_meetings + meetings
    fixed_set = frozenset(fixed_chars)
    sub_meetings = [
        Meeting(m.members & fixed_set, m.begin, m.end) for m in all_meetings if m.members & fixed_set
    ]
    orders = _stack_orders(stack, sub_meetings, saturators)
    full = StorylineInstance(frozenset(fixed_chars) | frozenset(news), tuple(all_meetings))
    problem = ExtensionProblem(
        full=full,
        chi=chi,
        fixed_characters=fixed_set,
        fixed_layout=Layout.from_mapping(orders, tau),
    )
    return Reduction(e, params, problem, centrals, partners, columns)


def reduce(e: EubpInstance) -> ExtensionProblem:
    return build_reduction(e).problem
