"""Acceptance checks shared by ``condorcet verify`` and the test suite.

Each check returns a :class:`CheckResult`; nothing here asserts, so a caller
can print a full report before deciding what failed.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from condorcet import asymptotics as A
from condorcet import estimators as E
from condorcet import exact as X
from condorcet.normal import g_upper
from condorcet.poisson_binomial import PoissonBinomial, esseen_envelope, mills_lower_bound, pmf_batch, tail_at_least

ORACLE_PAIRS = [(1, 2), (1, 3), (2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (3, 4), (4, 3), (5, 3)]
RATE_NS = (100, 1_000, 10_000)
# conditional-estimator relative error grows like n^(3/4); scale samples to keep the
# n = 10^4 point near 2.5% relative standard error
RATE_SAMPLES = (10_000_000, 30_000_000, 200_000_000)
BAND_MS = (10**4 + 1, 10**5 + 1)
DECAY_NS = (1_000, 3_000, 10_000)
SLOPE_NS = (10, 100, 1_000, 10_000)
MILLS_YS = (0.5, 1.0, 2.0, 3.0, 5.0, 8.0)
ESSEEN_MS = (3, 11, 101)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name} ({self.seconds:.1f}s)"

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail,
                "seconds": self.seconds}


def _timed(name: str, fn: Callable[[], tuple[bool, dict]]) -> CheckResult:
    t0 = time.perf_counter()
    ok, detail = fn()
    return CheckResult(name, bool(ok), detail, time.perf_counter() - t0)


# --- criteria ------------------------------------------------------------------------


def oracle_agreement(samples: int = 10**6, seed: int = 2024, z: float = 4.0,
                     pairs=ORACLE_PAIRS, workers: int = 1) -> CheckResult:
    def run():
        rows, ok = [], True
        for m, n in pairs:
            truth = X.exact_probability(m, n).value
            for method in ("plain", "conditional"):
                est = E.estimate(method, m, n, samples, seed=seed, workers=workers)
                good = abs(est.value - truth) <= z * est.stderr
                ok &= good
                rows.append({"m": m, "n": n, "method": method, "exact": truth,
                             "value": est.value, "stderr": est.stderr, "ok": good})
        two = {n: X.exact_probability(2, n).fraction == Fraction(1, n) for n in range(1, 7)}
        ok &= all(two.values())
        return ok, {"rows": rows, "exact_2_n_is_1_over_n": two}
    return _timed("1 oracle agreement (MC within 4 se of exact; Q(2,n)=1/n)", run)


def winner_loser_duality(pairs=ORACLE_PAIRS) -> CheckResult:
    def run():
        rows = []
        for m, n in pairs:
            w = X.exact_probability(m, n, "winner").fraction
            l = X.exact_probability(m, n, "loser").fraction
            rows.append({"m": m, "n": n, "winner": str(w), "loser": str(l), "ok": w == l})
        return all(r["ok"] for r in rows), {"rows": rows}
    return _timed("2 winner/loser duality (exact equality)", run)


def limit_integral_sanity() -> CheckResult:
    def run():
        q1, q2 = A.qn(1), A.qn(2)
        diffs = {n: abs(A.qn(n) - A.qn_via_jn(n)) for n in (2, 10, 100, 1000)}
        ok = abs(q1 - 1) <= 1e-10 and abs(q2 - 1) <= 1e-10 and max(diffs.values()) <= 1e-8
        return ok, {"qn1": q1, "qn2": q2, "two_route_diff": diffs}
    return _timed("3 limit integral sanity (qn(1)=qn(2)=1; two routes within 1e-8)", run)


def rate_scan(ns=RATE_NS, samples=RATE_SAMPLES, m: int = 3, seed: int = 7,
              method: str = "conditional", workers: int = 1) -> list[E.Estimate]:
    if isinstance(samples, int):
        samples = [samples] * len(ns)
    return [E.estimate(method, m, n, s, seed=seed, workers=workers) for n, s in zip(ns, samples)]


def three_voter_rate(ns=RATE_NS, samples=RATE_SAMPLES, seed: int = 7, workers: int = 1) -> CheckResult:
    def run():
        ests = rate_scan(ns, samples, 3, seed, "conditional", workers)
        fit = A.rate_fit([(e.n, e.value) for e in ests])
        scaled = [(e.value * math.sqrt(e.n), e.stderr * math.sqrt(e.n)) for e in ests]
        (a, sa), (b, sb) = scaled[-2], scaled[-1]
        c2 = A.ck(2, "nested-quadrature")
        c2_is = A.ck(2, "importance-mc", samples=10**6, seed=seed, workers=workers)
        plateau = abs(a - b) <= 3 * math.hypot(sa, sb)
        agree = abs(b - c2.value) <= 3 * math.hypot(sb, c2.stderr)
        methods = abs(c2.value - c2_is.value) <= 3 * math.hypot(c2.stderr, c2_is.stderr)
        slope_ok = abs(fit.slope + 0.5) <= 0.05
        rel_dev = [abs(v - c2.value) / c2.value for v, _ in scaled]
        detail = {"slope": fit.slope, "scaled": scaled, "ck2_quadrature": c2.value,
                  "ck2_importance": [c2_is.value, c2_is.stderr], "slope_ok": slope_ok,
                  "plateau_ok": plateau, "ck_agree": agree, "ck_methods_agree": methods, "relative_deviation_from_prediction": rel_dev,
                  "rows": [e.to_dict() for e in ests]}
        return slope_ok and plateau and agree and methods, detail
    return _timed("4 three-voter rate (slope -0.5+/-0.05; sqrt(n) plateau matches C_2)", run)


def finite_electorate_band(ms=BAND_MS, n: int = 3, samples: int = 10**6, seed: int = 11,
                  workers: int = 1) -> CheckResult:
    def run():
        q = A.qn(n)
        rows = []
        for m in ms:
            est = E.mc_plain(m, n, samples, seed=seed, workers=workers)
            dev = abs(est.value - q)
            allowed = max(5 * est.stderr, 3 * A.theorem1_band(n, m))
            rows.append({"m": m, "value": est.value, "stderr": est.stderr, "deviation": dev,
                         "allowed": allowed, "ok": dev <= allowed})
        shrinks = rows[-1]["deviation"] < rows[0]["deviation"]
        return all(r["ok"] for r in rows) and shrinks, {"qn": q, "rows": rows, "shrinks": shrinks}
    return _timed("5 large-m band at n=3 (deviation within band and shrinking)", run)


def superpolynomial_decay() -> CheckResult:
    def run():
        q = {n: A.qn(n) for n in sorted(set(DECAY_NS) | set(SLOPE_NS))}
        decreasing = {}
        for ell in (1, 2, 3):
            vals = [q[n] * n**ell for n in DECAY_NS]
            decreasing[ell] = all(b < a for a, b in zip(vals, vals[1:]))
        fit = A.rate_fit([(n, q[n]) for n in SLOPE_NS])
        detail = {"qn": q, "qn_times_n_power_decreasing": decreasing,
                  "pairwise_slopes": fit.pairwise_slopes, "steepening": fit.steepening()}
        return all(decreasing.values()) and fit.steepening(), detail
    return _timed("6 super-polynomial decay (qn*n^l decreasing; slopes steepen)", run)


def esseen_containment(trials: int = 10**4, seed: int = 5) -> CheckResult:
    def run():
        rng = np.random.default_rng(seed)
        report = {}
        for m in ESSEEN_MS:
            x = rng.random((trials, m))
            t = rng.integers(0, m + 2, size=trials)
            pmf = pmf_batch(1.0 - x)
            upper = np.concatenate([np.cumsum(pmf[:, ::-1], axis=1)[:, ::-1],
                                    np.zeros((trials, 1))], axis=1)
            exact = upper[np.arange(trials), t]
            sigma = np.sqrt(np.sum(x * (1 - x), axis=1))
            center = g_upper((t - np.sum(1 - x, axis=1)) / sigma)
            bad = int(np.count_nonzero(np.abs(exact - center) > 6.0 / sigma))
            report[m] = {"violations": bad, "min_slack": float(np.min(6.0 / sigma - np.abs(exact - center)))}
        return all(r["violations"] == 0 for r in report.values()), report
    return _timed("7 Esseen envelope contains exact tail (zero violations)", run)


def mills_bound() -> CheckResult:
    def run():
        rows = {y: (math.sqrt(2 * math.pi) * float(g_upper(y)), mills_lower_bound(y)) for y in MILLS_YS}
        return all(g >= b for g, b in rows.values()), {str(y): list(v) for y, v in rows.items()}
    return _timed("8 Mills bound sqrt(2pi) G(y) >= (1/y - 1/y^3) e^(-y^2/2)", run)


def determinism(samples: int = 300_000, chunk_size: int = 50_000) -> CheckResult:
    def run():
        rows = []
        for method, m, n in (("plain", 5, 4), ("plain", 10**4 + 1, 3), ("conditional", 7, 20)):
            a = E.estimate(method, m, n, samples, seed=3, chunk_size=chunk_size, workers=1)
            b = E.estimate(method, m, n, samples, seed=3, chunk_size=chunk_size, workers=4)
            c = E.estimate(method, m, n, samples, seed=3, chunk_size=chunk_size, workers=1)
            same = (a.value, a.stderr) == (b.value, b.stderr) == (c.value, c.stderr)
            rows.append({"method": method, "m": m, "n": n, "value": a.value, "identical": same})
        return all(r["identical"] for r in rows), {"rows": rows}
    return _timed("9 determinism across repeats and worker counts", run)


# --- quick tier --------------------------------------------------------------------


def trivial_checks() -> list[CheckResult]:
    def exact_small():
        ok = (X.exact_probability(1, 3).fraction == 1 and X.exact_probability(2, 2).fraction == Fraction(1, 2)
              and all(X.exact_probability(m, 1).fraction == 1 for m in range(1, 6))
              and all(X.exact_probability(2, n).fraction == Fraction(1, n) for n in range(1, 6)))
        return ok, {}

    def duality_small():
        return all(X.symmetry_check(m, n) for m, n in [(1, 2), (2, 2), (3, 3)]), {}

    def tails():
        v = [tail_at_least(PoissonBinomial([1, 1, 1]), 2), tail_at_least(PoissonBinomial([.5, .5, .5]), 2),
             tail_at_least(PoissonBinomial([.2, .7]), 1)]
        return abs(v[0] - 1) < 1e-15 and abs(v[1] - .5) < 1e-15 and abs(v[2] - .76) < 1e-15, {"tails": v}

    def limits():
        ok = abs(A.qn(1) - 1) <= 1e-10 and abs(A.qn(2) - 1) <= 1e-10 and g_upper(0.0) == 0.5
        ok &= abs(A.ck(1).value - 1) <= 1e-10
        return ok, {}

    def mc_trivial():
        a = E.mc_plain(1, 5, 100, seed=1)
        b = E.mc_conditional(4, 1, 100, seed=1)
        return a.value == 1.0 and b.value == 1.0 and b.stderr == 0.0, {}

    def arithmetic():
        ok = abs(A.theorem1_band(3, 9 * 10**4) - 0.03) < 1e-15 and abs(A.theorem1_band(3, 10**6) - 0.009) < 1e-15
        ok &= abs(A.rate_fit([(n, n**-0.5) for n in (10, 100, 1000)]).slope + 0.5) < 1e-12
        ok &= A.sauermann_estimate(1, 50, 1.0) == 1.0
        env = esseen_envelope([.5, .5, .5], 2)
        ok &= abs(env.halfwidth - 6 / math.sqrt(.75)) < 1e-12
        return ok, {}

    return [_timed(name, fn) for name, fn in [
        ("exact trivial values", exact_small), ("exact duality (small)", duality_small),
        ("Poisson-binomial tail examples", tails), ("limit integrals qn(1), qn(2), C_1", limits),
        ("MC trivial cases", mc_trivial), ("band/fit/envelope arithmetic", arithmetic),
    ]] + [mills_bound(), determinism(samples=60_000, chunk_size=10_000)]


def full_checks(workers: int = 1) -> list[CheckResult]:
    return [
        oracle_agreement(workers=workers),
        winner_loser_duality(),
        limit_integral_sanity(),
        three_voter_rate(workers=workers),
        finite_electorate_band(workers=workers),
        superpolynomial_decay(),
        esseen_containment(),
        mills_bound(),
        determinism(),
    ]
