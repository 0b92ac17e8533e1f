import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from storyline_extension import (
    EubpInstance,
    Layout,
    StorylineInstance,
    brute_force_eubp,
    crossings_per_character,
    local_crossing_number,
    solve,
    stats,
    validate_extension_problem,
    validate_instance,
    validate_layout,
)
from storyline_extension.reduction import (
    DELTA,
    GadgetParams,
    ReductionError,
    build_channel,
    build_column,
    build_reduction,
    build_saturator,
    reduce,
)

FOUR_ITEMS = EubpInstance((2, 3, 5, 4), 2, 7)


def fragment_counts(frag):
    inst = StorylineInstance(frozenset(frag.characters), tuple(frag.meetings))
    assert validate_instance(inst, check_origin=False) == []
    lay = Layout.from_mapping(frag.orders)
    assert validate_layout(inst, lay) == []
    return crossings_per_character(inst, lay)


# ---------------------------------------------------------------- saturator


def test_empty_saturator():
    frag = build_saturator(0, 1, "C")
    assert len(frag.meetings) == 1
    assert fragment_counts(frag) == {"C": 0, "C~": 0}


def test_saturator_crossings():
    frag = build_saturator(3, 1, "C")
    assert len(frag.meetings) == 4
    assert fragment_counts(frag) == {"C": 3, "C~": 3}
    assert frag.window == (1, 4)


def test_saturator_leaves_residual_budget():
    chi = 5
    counts = fragment_counts(build_saturator(2, 1, "C"))
    assert chi - counts["C"] == 3


def test_saturator_partner_side():
    frag = build_saturator(1, 1, "C", partner_side="above")
    assert frag.orders[1] == ("C~", "C")


def test_saturator_rejects_negative_size():
    with pytest.raises(ValueError):
        build_saturator(-1, 1, "C")


# ---------------------------------------------------------------- channel


def test_channel_alternates_boundaries():
    params = GadgetParams(k=2, chi=4)
    frag = build_channel(2, params, 1, top="T0", bottom="B0")
    run = frag.roles["run_start"]
    runs = sorted((m for m in frag.meetings if m.begin >= run), key=lambda m: m.begin)
    members = [m.members for m in runs]
    assert members == [{"H.Z", "T0"}, {"H.Z", "B0"}, {"H.Z", "T0"}]


def test_channel_central_carries_chi_minus_c():
    params = GadgetParams(k=2, chi=4)
    counts = fragment_counts(build_channel(3, params, 1))
    assert counts["H.Z"] == 1
    assert counts["H.top"] == 4 and counts["H.bottom"] == 4


def test_channel_overfull():
    params = GadgetParams(k=1, chi=2)
    with pytest.raises(ReductionError):
        build_channel(3, params, 1)
    frag = build_channel(3, params, 1, allow_overfull=True)
    assert frag.roles["central_saturator"] == 0


def test_channel_rejects_zero_capacity():
    with pytest.raises(ValueError):
        build_channel(0, GadgetParams(k=1, chi=2), 1)


# ---------------------------------------------------------------- column


def test_column_capacities():
    col = build_column(3, GadgetParams(k=2, chi=12), 1)
    assert col.roles["capacities"] == [6, 3, 6]
    assert col.roles["sparse"] == "X.H2.Z"


def test_single_channel_column():
    col = build_column(3, GadgetParams(k=1, chi=3), 1)
    assert col.roles["capacities"] == [3]
    assert len(col.roles["boundaries"]) == 2


def test_column_shares_boundaries():
    col = build_column(1, GadgetParams(k=2, chi=3), 1)
    assert len(set(col.roles["boundaries"])) == 4


def test_column_fragment_is_valid():
    col = build_column(1, GadgetParams(k=2, chi=3), 1)
    counts = fragment_counts(col)
    assert counts["X.H2.Z"] == 2
    assert all(counts[b] == 3 for b in col.roles["boundaries"])


# ---------------------------------------------------------------- assembly


def test_four_item_parameters():
    r = build_reduction(FOUR_ITEMS)
    s = stats(r.problem)
    assert r.problem.chi == 21 == 7 + DELTA * 7 * (2 - 1)
    assert (s.k, s.mu) == (2, 2)
    assert s.sigma <= 9 * 2


def test_four_item_problem_is_valid():
    p = reduce(FOUR_ITEMS)
    assert validate_extension_problem(p) == []
    assert local_crossing_number(p.sub_instance, p.fixed_layout) == p.chi


def test_unbalanced_instance_rejected():
    with pytest.raises(ReductionError, match="exact packing"):
        reduce(EubpInstance((1, 2), 2, 2))


balanced = st.builds(
    lambda items, k: EubpInstance(tuple(items), k, sum(items) // k) if sum(items) % k == 0 else None,
    st.lists(st.integers(1, 4), min_size=1, max_size=4),
    st.integers(1, 3),
).filter(lambda e: e is not None)


@settings(max_examples=40, deadline=None)
@given(balanced)
def test_property_one(e):
    r = build_reduction(e)
    p = r.problem
    counts = crossings_per_character(p.sub_instance, p.fixed_layout)
    assert counts == r.expected_fixed_crossings()
    for c, n in counts.items():
        if c in r.centrals:
            assert n == max(p.chi - r.centrals[c], 0)
        elif c not in r.partners:
            assert n == p.chi


@settings(max_examples=40, deadline=None)
@given(balanced)
def test_assembly_shape(e):
    r = build_reduction(e)
    p = r.problem
    s = stats(p)
    assert validate_extension_problem(p) == []
    assert (s.k, s.mu) == (e.bins, 2)
    assert s.sigma <= 9 * e.bins
    # 8k-2 fixed characters per column plus the frame and its partners
    assert s.n == len(e.items) * (8 * e.bins - 2) + 4


@pytest.mark.parametrize("items,cap", [((1, 1), 1), ((2,), 1), ((1, 3), 2), ((2, 2), 2)])
def test_equivalence_small(items, cap):
    e = EubpInstance(items, 2, cap)
    r = build_reduction(e)
    res = solve(r.problem)
    assert res.accepted == brute_force_eubp(e).accepted
    if res.accepted:
        counts = crossings_per_character(r.problem.full, res.witness)
        # a channel is traversed at most once and a traversal costs its capacity
        for z, c in r.centrals.items():
            assert counts[z] in (r.params.chi - c, r.params.chi)
