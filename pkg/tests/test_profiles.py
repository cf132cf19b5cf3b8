import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from condorcet import profiles as P


def profile_of(rows):
    return P.PreferenceProfile(np.array(rows))


CYCLE = [[0, 1, 2], [1, 2, 0], [2, 0, 1]]


@st.composite
def profiles(draw, max_m=9, max_n=6):
    m = draw(st.integers(1, max_m))
    n = draw(st.integers(1, max_n))
    rows = [draw(st.permutations(range(n))) for _ in range(m)]
    return profile_of(rows)


def brute_winners(rows, n, strict_loser=False):
    """Candidates satisfying the condition, by direct counting over voters."""
    m = len(rows)
    out = []
    for j in range(n):
        ok = True
        for k in range(n):
            if k == j:
                continue
            votes = sum(r.index(j) < r.index(k) for r in rows)
            ok &= (2 * votes < m) if strict_loser else (2 * votes > m)
        if ok:
            out.append(j)
    return out


def test_cyclic_tally():
    t = P.pairwise_tally(profile_of(CYCLE))
    assert t.counts[0, 1] == 2 and t.counts[1, 2] == 2 and t.counts[2, 0] == 2
    assert P.condorcet_winner(t) is None
    assert P.condorcet_loser(t) is None


def test_tie_is_not_a_win():
    t = P.pairwise_tally(profile_of([[0, 1], [1, 0], [0, 1], [1, 0]]))
    assert t.counts[0, 1] == 2
    assert P.condorcet_winner(t) is None
    assert P.condorcet_loser(t) is None


def test_single_candidate_wins_vacuously():
    t = P.pairwise_tally(profile_of([[0], [0]]))
    assert P.condorcet_winner(t) == 0
    assert P.condorcet_loser(t) == 0


def test_majority_threshold():
    assert [P.majority_threshold(m) for m in (1, 2, 3, 4, 5)] == [1, 2, 2, 3, 3]
    for m in range(1, 30):
        t = P.majority_threshold(m)
        assert 2 * t > m and 2 * (t - 1) <= m


@pytest.mark.parametrize("bad", [(0, 3), (3, 0), (-1, 2), (2.5, 3), (True, 2)])
def test_invalid_dimensions(bad):
    with pytest.raises(P.InvalidDimension):
        P.check_dimensions(*bad)


def test_profile_rejects_non_permutation():
    with pytest.raises(ValueError):
        profile_of([[0, 0, 1]])


def test_profile_is_immutable():
    p = profile_of(CYCLE)
    with pytest.raises(ValueError):
        p.rankings[0, 0] = 2


@settings(max_examples=200, deadline=None)
@given(profiles())
def test_antisymmetry(p):
    c = P.pairwise_tally(p).counts
    off = ~np.eye(p.n, dtype=bool)
    assert np.all((c + c.T)[off] == p.m)
    assert np.all(np.diag(c) == 0)


@settings(max_examples=300, deadline=None)
@given(profiles())
def test_winner_and_loser_match_brute_force(p):
    rows = [list(r) for r in p.rankings]
    t = P.pairwise_tally(p)
    w, l = brute_winners(rows, p.n), brute_winners(rows, p.n, strict_loser=True)
    assert len(w) <= 1 and len(l) <= 1
    assert P.condorcet_winner(t) == (w[0] if w else None)
    assert P.condorcet_loser(t) == (l[0] if l else None)


@settings(max_examples=300, deadline=None)
@given(profiles())
def test_duality_per_profile(p):
    t, tr = P.pairwise_tally(p), P.pairwise_tally(p.reversed())
    assert P.condorcet_winner(t) == P.condorcet_loser(tr)
    assert P.condorcet_loser(t) == P.condorcet_winner(tr)


@pytest.mark.parametrize("m,n", [(1, 3), (2, 3), (3, 3), (4, 3), (2, 4), (3, 4)])
def test_uniqueness_exhaustive(m, n):
    perms, prefer = P.permutation_table(n)
    for idx in itertools.product(range(len(perms)), repeat=m):
        counts = prefer[list(idx)].sum(axis=0)
        for rule in (P.beats, P.loses):
            mask = rule(counts, m) | np.eye(n, dtype=bool)
            assert mask.all(axis=1).sum() <= 1


def test_reversed_winner_becomes_loser_on_samples():
    rng = np.random.default_rng(3)
    seen = 0
    for _ in range(500):
        p = P.sample_profile(5, 4, rng)
        w = P.condorcet_winner(P.pairwise_tally(p))
        if w is not None:
            seen += 1
            assert P.condorcet_loser(P.pairwise_tally(p.reversed())) == w
    assert seen > 100


def test_vectorised_flags_agree_with_scalar():
    rng = np.random.default_rng(8)
    perms, prefer = P.permutation_table(4)
    idx = rng.integers(0, len(perms), size=(400, 6))
    counts = prefer[idx].sum(axis=1)
    hw, hl = P.has_winner(counts, 6), P.has_loser(counts, 6)
    for c, a, b in zip(counts, hw, hl):
        t = P.PairwiseTally(c, 6)
        assert a == (P.condorcet_winner(t) is not None)
        assert b == (P.condorcet_loser(t) is not None)


def test_permutation_table_lexicographic():
    perms, prefer = P.permutation_table(3)
    assert [tuple(p) for p in perms] == list(itertools.permutations(range(3)))
    assert prefer[0][0, 1] == 1 and prefer[0][1, 0] == 0


@pytest.mark.parametrize("n", [2, 3, 4])
def test_row_uniformity(n):
    rng = np.random.default_rng(100 + n)
    draws = 40_000
    x = rng.random((draws, n))
    rows = np.argsort(x, axis=1, kind="stable")
    perms, _ = P.permutation_table(n)
    code = {tuple(p): i for i, p in enumerate(perms)}
    freq = np.bincount([code[tuple(r)] for r in rows], minlength=len(perms)) / draws
    p = 1 / math.factorial(n)
    se = math.sqrt(p * (1 - p) / draws)
    assert np.all(np.abs(freq - p) <= 4 * se)
    # sample_profile uses the same construction
    prof = P.sample_profile(3, n, np.random.default_rng(0))
    assert prof.rankings.shape == (3, n)


def test_ties_go_to_lower_index():
    class Flat:
        def random(self, shape):
            return np.zeros(shape)

    prof = P.sample_profile(2, 4, Flat())
    assert prof.rankings.tolist() == [[0, 1, 2, 3]] * 2
