"""Limit objects of Q(m, n) and tools for checking asymptotic rates.

* ``qn``: the large-electorate limit
  ``Q_n = n * int G(y)^(n-1) exp(-y^2) / sqrt(pi) dy``.
* ``qn_via_jn``: the same number after integrating by parts,
  ``Q_n = sqrt(2) * int_0^inf y exp(-y^2/2) [G(-y)^n - G(y)^n] dy``.
* ``ck``: the fixed-electorate constant
  ``C_k = int_{x >= 0} exp(-e_k(x)) dx`` over ``2k - 1`` coordinates, with
  ``e_k`` the k-th elementary symmetric polynomial.
* ``rate_fit``/``sauermann_estimate``/``theorem1_band``: rate bookkeeping.

Powers of ``G`` are always formed as ``exp(p * log G)``.
"""
from __future__ import annotations

import csv
import math
import time
import warnings
from dataclasses import asdict, dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy import integrate, special

from condorcet.estimators import (DEFAULT_CHUNK, RNG_TAG, Estimate, make_estimate, merge_moments,
                                  run_chunks)
from condorcet.normal import g_upper, log_g

__all__ = [
    "QuadratureSpec", "RateFit", "SymmetricIntegrand", "ToleranceNotMet", "Nonconvergence",
    "g_upper", "log_g", "qn", "qn_via_jn", "jn_terms", "qn_mass_fraction", "mass_center",
    "elementary_symmetric", "ck", "sauermann_estimate", "rate_fit", "theorem1_band",
    "write_csv",
]


class ToleranceNotMet(RuntimeError):
    def __init__(self, what: str, value: float, error: float, target: float):
        super().__init__(f"{what}: achieved error {error:.3g} exceeds target {target:.3g} "
                         f"(value {value!r})")
        self.value = value
        self.error = error


class Nonconvergence(RuntimeError):
    """A Monte Carlo run whose variance estimate is dominated by a few samples."""


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-11
    rel_tol: float = 1e-10
    truncation_halfwidth: Optional[float] = None
    max_subdivisions: int = 500

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.truncation_halfwidth is not None and not self.truncation_halfwidth > 0:
            raise ValueError("truncation_halfwidth must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")

    def halfwidth(self, n: int) -> float:
        if self.truncation_halfwidth is not None:
            return self.truncation_halfwidth
        return math.sqrt(2 * math.log(max(n, 3))) + 12.0


DEFAULT_SPEC = QuadratureSpec()


def mass_center(n: int) -> float:
    """``sqrt(2 log(n / sqrt(log n)))``; ``-mass_center(n)`` is where the Q_n
    integrand peaks (and ``+`` where the J_n integrand does)."""
    if n < 3:
        return 0.0
    return math.sqrt(2 * math.log(n / math.sqrt(math.log(n))))


def _quad(f, a: float, b: float, spec: QuadratureSpec, scale: float = 1.0, points=None):
    pts = [p for p in (points or []) if a < p < b] or None
    with warnings.catch_warnings():
        # the returned error estimate is checked by the caller
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        v, err = integrate.quad(f, a, b, epsabs=spec.abs_tol / scale, epsrel=spec.rel_tol,
                                limit=spec.max_subdivisions, points=pts)
    return v, err


def _check(what: str, value: float, err: float, spec: QuadratureSpec) -> None:
    target = max(spec.abs_tol, spec.rel_tol * abs(value))
    if err > target:
        raise ToleranceNotMet(what, value, err, target)


def _qn_integral(n: int, lo: float, hi: float, spec: QuadratureSpec):
    c = 1.0 / math.sqrt(math.pi)
    f = lambda y: c * math.exp((n - 1) * log_g(y) - y * y)
    v, err = _quad(f, lo, hi, spec, scale=n, points=[-mass_center(n)])
    return n * v, n * err


def qn(n: int, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Limit probability of a Condorcet winner among ``n`` candidates as m -> inf."""
    if n < 1:
        raise ValueError("n must be >= 1")
    y = spec.halfwidth(n)
    v, err = _qn_integral(n, -y, y, spec)
    _check(f"qn({n})", v, err, spec)
    wide, _ = _qn_integral(n, -2 * y, 2 * y, spec)
    if abs(wide - v) > spec.abs_tol:
        raise ToleranceNotMet(f"qn({n}) truncation at {y:.3g}", v, abs(wide - v), spec.abs_tol)
    return v


def jn_terms(n: int, spec: QuadratureSpec = DEFAULT_SPEC) -> tuple[float, float]:
    """``(J_n, D_n)`` with ``J_n = int_0^inf y e^{-y^2/2} G(-y)^n dy`` and the
    discarded term ``D_n`` the same with ``G(y)^n``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    hi = spec.halfwidth(n)
    j = lambda y: y * math.exp(-0.5 * y * y + n * log_g(-y))
    d = lambda y: y * math.exp(-0.5 * y * y + n * log_g(y))
    jv, jerr = _quad(j, 0.0, hi, spec, points=[mass_center(n)])
    dv, derr = _quad(d, 0.0, hi, spec)
    _check(f"J_{n}", jv, jerr, spec)
    _check(f"D_{n}", dv, derr, spec)
    return jv, dv


def qn_via_jn(n: int, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """``Q_n`` through the integration-by-parts identity ``Q_n = sqrt(2) (J_n - D_n)``."""
    if n < 2:
        raise ValueError("n must be >= 2")
    jv, dv = jn_terms(n, spec)
    return math.sqrt(2.0) * (jv - dv)


def qn_mass_fraction(n: int, halfwidth: float = 4.0, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Share of the Q_n integral within ``halfwidth`` of ``-mass_center(n)``."""
    c = -mass_center(n)
    part, _ = _qn_integral(n, c - halfwidth, c + halfwidth, spec)
    return part / qn(n, spec)


# --- C_k -------------------------------------------------------------------------


def elementary_symmetric(x: np.ndarray, k: int) -> np.ndarray:
    """``e_k`` over the last axis (``e_0 = 1``), by the usual one-pass recurrence."""
    x = np.asarray(x, dtype=float)
    e = np.zeros(x.shape[:-1] + (k + 1,))
    e[..., 0] = 1.0
    for i in range(x.shape[-1]):
        e[..., 1:] = e[..., 1:] + x[..., i:i + 1] * e[..., :-1]
    return e[..., k]


def _esym_scalar(xs: Sequence[float], k: int) -> list[float]:
    """``[e_0, ..., e_k]`` of a short tuple, without numpy overhead."""
    e = [1.0] + [0.0] * k
    for v in xs:
        for j in range(k, 0, -1):
            e[j] += v * e[j - 1]
    return e


def _resolvent(a: float, nu: float) -> float:
    """``int_0^inf dt / ((1 + t) (t + a)^nu)`` in closed form (Euler integral)."""
    if a == 0.0:
        return math.pi / math.sin(math.pi * nu)
    if a >= 1.0:
        return a**-nu / nu * special.hyp2f1(nu, 1.0, 1.0 + nu, 1.0 - 1.0 / a)
    return a ** (1.0 - nu) / nu * special.hyp2f1(1.0, 1.0, 1.0 + nu, 1.0 - a)


@dataclass(frozen=True)
class SymmetricIntegrand:
    """``x -> exp(-e_k(x))`` on ``[0, inf)^(2k - 1)``."""
    k: int

    @property
    def dimension(self) -> int:
        return 2 * self.k - 1

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dimension:
            raise ValueError(f"expected {self.dimension} coordinates, got {x.shape[-1]}")
        return np.exp(-elementary_symmetric(x, self.k))


def _ck_nested(k: int, spec: QuadratureSpec) -> tuple[float, float]:
    """Nested adaptive quadrature after three exact reductions.

    ``e_k`` is linear in each coordinate.  Integrating the last one gives
    ``exp(-e_k) / e_{k-1}`` of the rest; the next one gives
    ``exp(-A) g(B^2 / D) / D`` with ``g(z) = e^z E_1(z)`` and
    ``(A, B, D) = (e_k, e_{k-1}, e_{k-2})`` of the remaining ``2k - 3``
    coordinates.  Going to polar form ``x = r u`` (``u`` on the simplex) and
    writing ``g`` as a Laplace transform, the radial part is a Gamma integral:

        C_k = Gamma(nu)/k * int_simplex D^-1 c^-nu R(A/c) du,  nu = (k-1)/k,

    where ``c = B^2 / D`` and ``R(a) = int_0^inf dt / ((1+t)(t+a)^nu)`` is a
    hypergeometric closed form.  The simplex (dimension ``2k - 4``) is mapped
    onto the unit cube by stick breaking so its singular corners sit on faces.
    """
    if k == 1:
        v, err = integrate.quad(lambda x: math.exp(-x), 0.0, math.inf,
                                epsabs=spec.abs_tol, epsrel=spec.rel_tol)
        return v, err
    coords = 2 * k - 3
    nu = (k - 1) / k
    const = math.gamma(nu) / k

    def h(*t):
        u, rest, jac = [], 1.0, 1.0
        for ti in t:
            u.append(ti * rest)
            jac *= rest
            rest *= 1.0 - ti
        u.append(rest)
        e = _esym_scalar(u, k)
        p, q, s = e[k], e[k - 1], e[k - 2]
        if q <= 0.0 or s <= 0.0:
            return 0.0
        c = q * q / s
        return jac / s * c**-nu * _resolvent(p / c, nu)

    if coords == 1:
        return const * h(), 0.0
    dims = coords - 1
    opts = {"epsabs": spec.abs_tol, "epsrel": spec.rel_tol, "limit": spec.max_subdivisions}
    v, err = integrate.nquad(h, [(0.0, 1.0)] * dims, opts=[opts] * dims)
    return const * v, const * err


def _ck_weights(x_or_u: np.ndarray, k: int, proposal: str, param: float) -> np.ndarray:
    d = 2 * k - 1
    if proposal == "exponential":
        s = elementary_symmetric(x_or_u, k)
        return np.exp(param * x_or_u.sum(axis=1) - s) / param**d
    # Dirichlet(param) on the simplex for the radial form
    # C_k = Gamma(d/k)/k * int_simplex e_k(u)^(-d/k) du
    with np.errstate(divide="ignore"):
        log_pdf = (special.gammaln(d * param) - d * special.gammaln(param)
                   + ((param - 1) * np.log(x_or_u)).sum(axis=1))
        log_h = -(d / k) * np.log(elementary_symmetric(x_or_u, k))
    return math.gamma(d / k) / k * np.exp(log_h - log_pdf)


def default_proposal_param(k: int, proposal: str) -> float:
    if proposal == "exponential":
        return 1.0 if k <= 2 else 0.5
    # second moment is finite iff the concentration is below 1/k (vertex corners bind)
    return 1.0 / (k + 1)


def _ck_chunk(rng: np.random.Generator, size: int, k: int, proposal: str, param: float):
    d = 2 * k - 1
    if proposal == "exponential":
        pts = rng.exponential(1.0 / param, size=(size, d))
    else:
        pts = rng.dirichlet(np.full(d, param), size=size)
    w = _ck_weights(pts, k, proposal, param)
    if not np.all(np.isfinite(w)):
        w = np.where(np.isfinite(w), w, 0.0)
    mean = float(w.mean())
    return size, mean, float(np.sum((w - mean) ** 2)), float(np.max(w)), float(np.sum(w * w))


# a single draw may carry at most this share of sum(w^2)
MAX_WEIGHT_SHARE = 0.05


def _ck_importance(k: int, samples: int, seed: int, chunk_size: int, workers: int,
                   proposal: str, param: Optional[float]):
    if k == 1:
        return 1.0, 0.0, 0.0
    if proposal not in ("dirichlet", "exponential"):
        raise ValueError(f"unknown proposal {proposal!r}")
    param = default_proposal_param(k, proposal) if param is None else param
    parts = run_chunks(lambda r, s: _ck_chunk(r, s, k, proposal, param),
                       samples, seed, chunk_size, workers)
    count, mean, m2 = merge_moments(p[:3] for p in parts)
    wmax = max(p[3] for p in parts)
    share = wmax**2 / sum(p[4] for p in parts)
    se = math.sqrt(m2 / (count - 1) / count) if count > 1 else 0.0
    return mean, se, share


def ck(k: int, method: str = "nested-quadrature", samples: int = 10**6, seed: int = 0,
       chunk_size: int = DEFAULT_CHUNK, workers: int = 1, proposal: str = "dirichlet",
       proposal_param: Optional[float] = None,
       spec: QuadratureSpec = QuadratureSpec(abs_tol=1e-10, rel_tol=1e-8)) -> Estimate:
    """Estimate ``C_k`` by nested quadrature (k <= 3) or importance sampling.

    The returned ``Estimate`` uses ``m = 2k - 1`` and ``n = None``; for
    quadrature ``stderr`` is the integrator's error estimate and ``samples`` 0.
    Importance sampling raises ``Nonconvergence`` when one draw dominates the
    sum of squared weights, the signature of an infinite-variance proposal.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    t0 = time.perf_counter()
    if method == "nested-quadrature":
        if k > 3:
            raise ValueError("nested quadrature is limited to k <= 3")
        v, err = _ck_nested(k, spec)
        return Estimate(value=v, stderr=err, ci_low=v - err, ci_high=v + err, samples=0,
                        method="nested-quadrature", seed=None, m=2 * k - 1, n=None,
                        wall_time_s=time.perf_counter() - t0, rng="none", chunk_size=0)
    if method == "importance-mc":
        mean, se, share = _ck_importance(k, samples, seed, chunk_size, workers,
                                         proposal, proposal_param)
        if share > MAX_WEIGHT_SHARE:
            raise Nonconvergence(
                f"C_{k} importance run: one draw holds {share:.1%} of sum(w^2) "
                f"(estimate {mean:.6g} +/- {se:.3g}); proposal {proposal!r} looks infinite-variance")
        est = make_estimate(mean, se, samples, f"importance-mc/{proposal}", seed, 2 * k - 1,
                            None, time.perf_counter() - t0, chunk_size, RNG_TAG, upper=math.inf)
        return est
    raise ValueError(f"unknown method {method!r}")


def sauermann_estimate(k: int, n: int, ck_value: float) -> float:
    """Leading-order ``Q_{2k-1, n} ~ C_k n^{-(k-1)/k}``."""
    if k < 1 or n < 2:
        raise ValueError("need k >= 1 and n >= 2")
    return ck_value * n ** (-(k - 1) / k)


def theorem1_band(n: int, m: int) -> float:
    """Band radius ``n^2 / sqrt(m)`` for ``|Q(m, n) - Q_n|`` (constant omitted)."""
    if n < 1 or m < 1:
        raise ValueError("need n, m >= 1")
    return n * n / math.sqrt(m)


# --- rates -------------------------------------------------------------------------


@dataclass(frozen=True)
class RateFit:
    points: list
    slope: float
    intercept: float
    residual_max: float
    pairwise_slopes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "RateFit":
        return cls(points=[tuple(p) for p in d["points"]], slope=d["slope"],
                   intercept=d["intercept"], residual_max=d["residual_max"],
                   pairwise_slopes=list(d["pairwise_slopes"]))

    def steepening(self) -> bool:
        """Successive slopes strictly decreasing (faster than any fixed power)."""
        s = self.pairwise_slopes
        return all(b < a for a, b in zip(s, s[1:]))


def rate_fit(points: Iterable[tuple[float, float]]) -> RateFit:
    """Unweighted least squares of ``log value`` on ``log n``."""
    pts = sorted((float(n), float(v)) for n, v in points)
    if len(pts) < 3:
        raise ValueError("need at least 3 points")
    if any(v <= 0 or n <= 0 for n, v in pts):
        raise ValueError("n and value must be positive")
    x = np.log([n for n, _ in pts])
    y = np.log([v for _, v in pts])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    pair = [float((y[i + 1] - y[i]) / (x[i + 1] - x[i])) for i in range(len(x) - 1)]
    return RateFit(points=pts, slope=float(slope), intercept=float(intercept),
                   residual_max=float(np.max(np.abs(resid))), pairwise_slopes=pair)


def write_csv(path, rows: Sequence[dict], columns: Sequence[str]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(columns), extrasaction="ignore")
        w.writeheader()
        for r in rows:
            w.writerow(r)


def qn_rows(ns: Iterable[int], spec: QuadratureSpec = DEFAULT_SPEC) -> list[dict]:
    """``(n, value, method, tol)`` rows for plotting Q_n."""
    return [{"n": n, "value": qn(n, spec), "method": "qn-quadrature", "tol": spec.abs_tol}
            for n in ns]
