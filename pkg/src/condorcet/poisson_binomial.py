"""Poisson-binomial tails and their normal approximation.

Conditioned on the reference candidate's column ``x`` of the uniform matrix,
the number of voters preferring it to another candidate is a sum of
independent Bernoulli(1 - x_a) variables.  The exact tail comes from a forward
convolution; ``esseen_envelope`` brackets it with the Gaussian tail plus the
``6 / sigma`` Berry-Esseen-type error.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from condorcet.normal import g_upper


class DegenerateVariance(ValueError):
    """All success probabilities are 0 or 1, so the sum has zero variance."""


@dataclass(frozen=True)
class PoissonBinomial:
    probs: np.ndarray

    def __post_init__(self):
        p = np.atleast_1d(np.asarray(self.probs, dtype=float))
        if p.ndim != 1 or len(p) < 1:
            raise ValueError("probs must be a non-empty vector")
        if not np.all((p >= 0) & (p <= 1)):
            raise ValueError("probs must lie in [0, 1]")
        p = p.copy()
        p.flags.writeable = False
        object.__setattr__(self, "probs", p)

    @property
    def m(self) -> int:
        return len(self.probs)

    def pmf(self) -> np.ndarray:
        return pmf_batch(self.probs[None, :])[0]

    def mean(self) -> float:
        return float(self.probs.sum())

    def variance(self) -> float:
        return float(np.sum(self.probs * (1 - self.probs)))


def pmf_batch(probs: np.ndarray) -> np.ndarray:
    """Row-wise pmf for a stack of probability vectors ``(s, m) -> (s, m + 1)``.

    Voters are folded in ascending index order, so results are reproducible
    bit for bit.
    """
    probs = np.asarray(probs, dtype=float)
    s, m = probs.shape
    out = np.zeros((s, m + 1))
    out[:, 0] = 1.0
    for a in range(m):
        p = probs[:, a:a + 1]
        head = out[:, :a + 1] * p
        out[:, :a + 1] *= 1 - p
        out[:, 1:a + 2] += head
    return out


def tails_batch(probs: np.ndarray, t: int) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(P(S >= t), P(S <= t - 1))`` row-wise, each summed directly.

    Keeping both halves lets callers use whichever is small, so neither loses
    precision to cancellation against 1.
    """
    pmf = pmf_batch(probs)
    t = min(max(int(t), 0), pmf.shape[1])
    return pmf[:, t:].sum(axis=1), pmf[:, :t].sum(axis=1)


def tail_at_least(pb: PoissonBinomial, t: int) -> float:
    """Exact ``P(S >= t)``; 1 for ``t <= 0`` and 0 for ``t > m``."""
    if t <= 0:
        return 1.0
    if t > pb.m:
        return 0.0
    upper, _ = tails_batch(pb.probs[None, :], t)
    return float(min(max(upper[0], 0.0), 1.0))


def tail_at_most(pb: PoissonBinomial, t: int) -> float:
    if t < 0:
        return 0.0
    if t >= pb.m:
        return 1.0
    _, lower = tails_batch(pb.probs[None, :], t + 1)
    return float(min(max(lower[0], 0.0), 1.0))


@dataclass(frozen=True)
class EsseenEnvelope:
    center: float
    halfwidth: float
    sigma: float
    y: float

    @property
    def low(self) -> float:
        return self.center - self.halfwidth

    @property
    def high(self) -> float:
        return self.center + self.halfwidth

    def contains(self, p: float) -> bool:
        return self.low <= p <= self.high


def esseen_envelope(x, t: int) -> EsseenEnvelope:
    """Normal approximation of ``P(S >= t)`` for ``S ~ PoissonBinomial(1 - x)``.

    ``center = G(y)`` with ``y = (t - sum(1 - x)) / sigma`` and
    ``sigma^2 = sum x (1 - x)``; the third absolute central moments are bounded
    by the variances, so the Esseen constant collapses to ``6 / sigma``.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or len(x) < 1 or not np.all((x >= 0) & (x <= 1)):
        raise ValueError("x must be a non-empty vector in [0, 1]^m")
    var = float(np.sum(x * (1 - x)))
    if var <= 0.0:
        raise DegenerateVariance("sigma(x) = 0: every coordinate is 0 or 1")
    sigma = math.sqrt(var)
    y = (t - float(np.sum(1 - x))) / sigma
    return EsseenEnvelope(center=float(g_upper(y)), halfwidth=6.0 / sigma, sigma=sigma, y=y)


def third_moment_sum(x) -> float:
    """``sum_a E|Y_a|^3`` for centred Bernoulli(1 - x_a) terms."""
    x = np.asarray(x, dtype=float)
    return float(np.sum((1 - x) * x**3 + x * (1 - x) ** 3))


def mills_lower_bound(y: float) -> float:
    """Lower bound ``(1/y - 1/y^3) exp(-y^2/2)`` on ``int_y^inf exp(-z^2/2) dz``."""
    if not y > 0:
        raise ValueError(f"y must be positive, got {y!r}")
    return (1.0 / y - 1.0 / y**3) * math.exp(-0.5 * y * y)
