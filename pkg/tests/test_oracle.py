import random
from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from builders import M, instance, problem
from storyline_extension import (
    EubpInstance,
    Meeting,
    OracleSizeError,
    StorylineInstance,
    brute_force_eubp,
    brute_force_solve,
    eubp_by_coloring,
    local_crossing_number,
    validate_extension_problem,
    validate_layout,
)
from storyline_extension.generate import random_problem


def test_no_new_characters_gives_fixed_lcn():
    full = instance(M("ab", 1), M("a", 2), M("b", 2), M("ab", 3))
    p = problem(full, 3, "ab", "ab", "ba", "ba")
    r = brute_force_solve(p)
    assert r.min_lcn == 1 and r.accepted
    assert r.witness == p.fixed_layout


def test_forced_crossing_minimum():
    full = instance(M("an", 1), M("b", 1), M("ab", 2), M("n", 2), M("bn", 3), M("a", 3))
    r = brute_force_solve(problem(full, 0, "ab", "ab", "ab", "ab"))
    assert not r.accepted and r.min_lcn == 1


def test_min_lcn_two_when_passing_both_fixed():
    # n starts next to x above a and ends next to y below b
    singles = [M({c}, t) for c in "ab" for t in (1, 2, 3)]
    full = instance(M("nx", 1), M("n", 2), M("ny", 3), M("x", 2), M("x", 3), M("y", 1), M("y", 2), *singles)
    p = problem(full, 2, "abxy", "xaby", "xaby", "xaby")
    assert validate_extension_problem(p) == []
    r = brute_force_solve(p)
    assert r.accepted and r.min_lcn == 2
    assert validate_layout(full, r.witness) == []
    assert local_crossing_number(full, r.witness) == 2
    assert not brute_force_solve(replace(p, chi=1)).accepted


def test_unsatisfiable_contiguity_rejects():
    # n must touch a at t=1 and d at t=2 but cannot cross the ongoing {b,c}
    full = instance(M("bc", 1, 2), M("an", 1), M("d", 1), M("nd", 2), M("a", 2))
    for chi in range(4):
        r = brute_force_solve(problem(full, chi, "abcd", "abcd", "abcd"))
        assert not r.accepted and r.min_lcn is None


def test_size_guard():
    full = instance(M("abcdefg", 1))
    with pytest.raises(OracleSizeError):
        brute_force_solve(problem(full, 0, "abcdefg", "abcdefg"))


# ---------------------------------------------------------------- bin packing


def test_eubp_example_accepts():
    e = EubpInstance((2, 3, 5, 4), 2, 7)
    r = brute_force_eubp(e)
    assert r.accepted
    assert sorted(sorted(b) for b in r.bins_of(e)) == [[2, 5], [3, 4]]


def test_eubp_oversized_item_rejects():
    assert not brute_force_eubp(EubpInstance((3, 1), 2, 2)).accepted


def test_eubp_unbalanced_rejects():
    e = EubpInstance((1, 2), 2, 2)
    assert not e.balanced
    assert not brute_force_eubp(e).accepted


def test_eubp_validation():
    with pytest.raises(ValueError):
        EubpInstance((0, 1), 1, 1)
    with pytest.raises(ValueError):
        EubpInstance((1,), 0, 1)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(1, 6), min_size=1, max_size=8), st.integers(1, 3))
def test_eubp_strategies_agree(items, bins):
    total = sum(items)
    cap = max(total // bins, 1)
    e = EubpInstance(tuple(items), bins, cap)
    a, b = brute_force_eubp(e), eubp_by_coloring(e)
    assert a.accepted == b.accepted
    for r in (a, b):
        if r.accepted:
            assert all(sum(g) == cap for g in r.bins_of(e))


# ---------------------------------------------------------------- properties


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 100_000))
def test_decision_is_min_lcn_threshold(seed):
    p = random_problem(random.Random(seed))
    r = brute_force_solve(p)
    for chi in range(0, 5):
        q = brute_force_solve(replace(p, chi=max(chi, p.chi)))
        assert q.min_lcn == r.min_lcn
        assert q.accepted == (r.min_lcn is not None and r.min_lcn <= max(chi, p.chi))


def _join_repeated_meeting(inst: StorylineInstance, rng: random.Random) -> StorylineInstance | None:
    """Merge two identical single-instant meetings at consecutive instants.

    The joined meeting keeps both contiguity constraints and adds
    protection of the strip between them, so it only removes layouts.
    """
    single = {(m.members, m.begin): m for m in inst.meetings if m.begin == m.end}
    pairs = [(m, single[(m.members, m.begin + 1)]) for m in single.values() if (m.members, m.begin + 1) in single]
    if not pairs:
        return None
    a, b = rng.choice(pairs)
    rest = [m for m in inst.meetings if m is not a and m is not b]
    return StorylineInstance(inst.characters, tuple(rest) + (Meeting(a.members, a.begin, b.end),))


def test_min_lcn_monotone_under_added_constraints():
    rng = random.Random(17)
    checked = 0
    while checked < 60:
        p = random_problem(rng)
        joined = _join_repeated_meeting(p.full, rng)
        if joined is None:
            continue
        q = replace(p, full=joined)
        if validate_extension_problem(q):
            continue  # joining invalidated the fixed layout
        before, after = brute_force_solve(p).min_lcn, brute_force_solve(q).min_lcn
        if before is None:
            assert after is None
        elif after is not None:
            assert after >= before
        checked += 1
