import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from condorcet import estimators as E
from condorcet import exact as X

Z999 = 3.290526731491926


def enumerate_tail(p, t):
    total = 0.0
    for bits in itertools.product((0, 1), repeat=len(p)):
        if sum(bits) >= t:
            total += math.prod(q if b else 1 - q for q, b in zip(p, bits))
    return total


def oracle_pairs(limit=10**5, max_n=8):
    return [(m, n) for n in range(2, max_n + 1) for m in range(1, 20)
            if math.factorial(n) ** m <= limit]


def test_plain_single_voter_always_wins():
    e = E.mc_plain(1, 5, 100, seed=123)
    assert e.value == 1.0 and e.stderr == 0.0


def test_conditional_single_candidate():
    e = E.mc_conditional(4, 1, 500, seed=9)
    assert e.value == 1.0 and e.stderr == 0.0


def test_conditional_single_voter_is_unbiased_for_one():
    e = E.mc_conditional(1, 6, 200_000, seed=2)
    assert abs(e.value - 1) <= 4 * e.stderr


@pytest.mark.parametrize("method", ["plain", "conditional"])
@pytest.mark.parametrize("m,n", [(3, 3), (2, 4)])
def test_agrees_with_exact(method, m, n):
    e = E.estimate(method, m, n, 10**6, seed=31)
    assert e.covers(X.exact_probability(m, n).value, 4.0)


def test_two_voters_four_candidates_quarter():
    e = E.mc_plain(2, 4, 10**6, seed=5)
    assert abs(e.value - 0.25) <= 4 * e.stderr


@pytest.mark.slow
def test_unbiased_at_oracle_scale():
    """Both estimators' 99.9% intervals cover the exact value in >= 99 of 100 runs."""
    for m, n in oracle_pairs():
        truth = X.exact_probability(m, n).value
        for method in ("plain", "conditional"):
            hits = sum(abs(E.estimate(method, m, n, 2000, seed=s, chunk_size=512).value - truth)
                       <= Z999 * E.estimate(method, m, n, 2000, seed=s, chunk_size=512).stderr + 1e-15
                       for s in range(100))
            assert hits >= 99, (m, n, method, hits)


@pytest.mark.parametrize("target", ["winner", "loser"])
@pytest.mark.parametrize("m,n", [(3, 4), (4, 5), (5, 7), (6, 3)])
def test_conditional_audit(m, n, target):
    x, vals = E.conditional_audit(m, n, count=100, seed=77, target=target)
    assert x.shape == (100, m) and vals.shape == (100,)
    t = m // 2 + 1 if target == "winner" else None
    for row, v in zip(x, vals):
        p = list(1 - row)
        if target == "winner":
            q = enumerate_tail(p, t)
        else:
            q = 1 - enumerate_tail(p, (m + 1) // 2)
        assert 0 <= v <= n
        assert v == pytest.approx(n * q ** (n - 1), rel=1e-10, abs=1e-300)


def test_contributions_far_tail_are_finite():
    rng = np.random.default_rng(0)
    x = rng.random((1000, 3))
    v = E.conditional_contributions(x, 10**6)
    assert np.all(np.isfinite(v)) and np.all(v >= 0) and np.all(v <= 10**6)
    # q barely below 1: the power must not collapse to n or to 0
    x = np.full((1, 3), 1e-9)
    q = 1 - 3 * 1e-18  # P(at most one of three Bernoulli(1 - 1e-9) fails) to first order
    assert E.conditional_contributions(x, 10**6)[0] == pytest.approx(10**6 * q ** (10**6 - 1), rel=1e-9)


@pytest.mark.parametrize("method", ["plain", "conditional"])
def test_loser_agrees_with_winner(method):
    w = E.estimate(method, 4, 3, 200_000, seed=3)
    l = E.estimate(method, 4, 3, 200_000, seed=3, target="loser")
    assert l.ci_low <= w.ci_high and w.ci_low <= l.ci_high


@pytest.mark.parametrize("method,m,n", [("plain", 5, 4), ("plain", 1001, 3), ("conditional", 7, 30)])
def test_determinism_across_workers(method, m, n):
    a = E.estimate(method, m, n, 40_000, seed=4, chunk_size=3000)
    b = E.estimate(method, m, n, 40_000, seed=4, chunk_size=3000, workers=4)
    c = E.estimate(method, m, n, 40_000, seed=4, chunk_size=3000)
    assert (a.value, a.stderr) == (b.value, b.stderr) == (c.value, c.stderr)


def test_different_seeds_differ():
    a = E.mc_conditional(5, 10, 5000, seed=1)
    b = E.mc_conditional(5, 10, 5000, seed=2)
    assert a.value != b.value


def test_samplers_agree_in_law():
    truth = X.exact_probability(5, 3).value
    for sampler in ("matrix", "multinomial"):
        e = E.mc_plain(5, 3, 300_000, seed=12, sampler=sampler)
        assert e.covers(truth, 4.0)
        assert sampler in e.rng


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 7), st.integers(1, 6), st.integers(1, 3000), st.integers(0, 2**32 - 1),
       st.sampled_from(["plain", "conditional"]))
def test_estimate_invariants(m, n, samples, seed, method):
    e = E.estimate(method, m, n, samples, seed=seed, chunk_size=700)
    assert 0 <= e.value <= 1
    assert e.ci_low <= e.value <= e.ci_high
    assert 0 <= e.ci_low and e.ci_high <= 1
    assert e.stderr >= 0
    assert e.samples == samples


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=2, max_size=200), st.integers(1, 50))
def test_merge_moments_matches_numpy(values, chunk):
    v = np.array(values)
    parts = []
    for i in range(0, len(v), chunk):
        c = v[i:i + chunk]
        parts.append((len(c), float(c.mean()), float(((c - c.mean()) ** 2).sum())))
    count, mean, m2 = E.merge_moments(parts)
    assert count == len(v)
    assert mean == pytest.approx(v.mean(), abs=1e-12)
    assert m2 == pytest.approx(((v - v.mean()) ** 2).sum(), rel=1e-9, abs=1e-9)


def test_chunk_sizes():
    assert E.chunk_sizes(10, 4) == [4, 4, 2]
    assert E.chunk_sizes(8, 4) == [4, 4]
    with pytest.raises(ValueError):
        E.chunk_sizes(0, 4)


def test_estimate_round_trip():
    e = E.mc_plain(3, 3, 1000, seed=1)
    d = e.to_dict()
    assert list(d) == ["value", "stderr", "ci_low", "ci_high", "samples", "method", "seed",
                       "m", "n", "wall_time_s", "rng", "chunk_size"]
    assert E.Estimate.from_dict(d) == e


@pytest.mark.parametrize("m,n", [(3, 3), (5, 3), (3, 4)])
def test_conditioning_reduces_variance_of_symmetrised_indicator(m, n):
    """The conditional value is E[n 1{candidate 0 wins} | column], so its variance
    sits below that indicator's n Q - Q^2, though not below Q (1 - Q)."""
    q = X.exact_probability(m, n).value
    r = E.variance_comparison(m, n, 10**5, seed=8)
    var_c = r.conditional.stderr**2 * r.conditional.samples
    var_p = r.plain.stderr**2 * r.plain.samples
    assert var_c < n * q - q * q
    assert var_p == pytest.approx(q * (1 - q), rel=0.1)
    assert r.ratio == pytest.approx(var_p / var_c)


def test_variance_comparison():
    r = E.variance_comparison(3, 100, 10**5, seed=8)
    p, c = r.plain, r.conditional
    # the conditional interval is several times wider here, so compare on combined error
    assert abs(p.value - c.value) <= 4 * math.hypot(p.stderr, c.stderr)
    assert c.ci_low <= p.value <= c.ci_high
    r = E.variance_comparison(3, 1, 1000, seed=8)
    assert r.plain.value == r.conditional.value == 1.0
    assert r.plain.stderr == r.conditional.stderr == 0.0


def test_invalid_arguments():
    with pytest.raises(ValueError):
        E.estimate("bogus", 3, 3, 10)
    with pytest.raises(ValueError):
        E.mc_plain(0, 3, 10)
    with pytest.raises(ValueError):
        E.mc_conditional(3, 3, 0)
