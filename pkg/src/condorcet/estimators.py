"""Monte Carlo estimators of Q(m, n).

Two estimators share one reproducibility contract: the sample stream is cut
into fixed-size chunks, chunk ``i`` draws from its own generator seeded by
``SeedSequence(seed, spawn_key=(i,))``, and chunk summaries are merged in
chunk order.  The result is therefore a pure function of
``(method, m, n, samples, seed, chunk_size)`` whatever the worker count.

``plain`` counts sampled profiles with a Condorcet winner.  ``conditional``
conditions on the first candidate's column ``x``: the other candidates' vote
counts against it are then i.i.d. Poisson-binomial, so each sample contributes
``n * P(N > m/2 | x) ** (n - 1)`` exactly.
"""
from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Callable, Optional

import numpy as np

from condorcet import profiles
from condorcet.poisson_binomial import tails_batch

DEFAULT_CHUNK = 1 << 16
RNG_TAG = "numpy.PCG64 via SeedSequence(seed, spawn_key=(chunk,))"
Z95 = 1.959963984540054
# conditional DP is O(m^2) per sample
MAX_CONDITIONAL_M = 20_000
# cap on elements materialised per sub-batch; depends on (m, n) only
_WORK = 1 << 22


@dataclass(frozen=True)
class Estimate:
    value: float
    stderr: float
    ci_low: float
    ci_high: float
    samples: int
    method: str
    seed: Optional[int]
    m: Optional[int]
    n: Optional[int]
    wall_time_s: float
    rng: str
    chunk_size: int

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "Estimate":
        return cls(**{k: d[k] for k in cls.__dataclass_fields__})

    def covers(self, truth: float, z: float) -> bool:
        return abs(self.value - truth) <= z * self.stderr


def make_estimate(mean: float, stderr: float, samples: int, method: str, seed, m, n,
                  wall: float, chunk_size: int, rng: str = RNG_TAG,
                  upper: float = 1.0) -> Estimate:
    """Package a sample mean; the value is projected onto ``[0, upper]``."""
    value = min(max(mean, 0.0), upper)
    half = Z95 * stderr
    return Estimate(
        value=value, stderr=stderr,
        ci_low=max(0.0, value - half), ci_high=min(upper, value + half),
        samples=samples, method=method, seed=seed, m=m, n=n,
        wall_time_s=wall, rng=rng, chunk_size=chunk_size,
    )


def chunk_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))


def chunk_sizes(samples: int, chunk_size: int) -> list[int]:
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if chunk_size < 1:
        raise ValueError("chunk_size must be >= 1")
    full, rest = divmod(samples, chunk_size)
    return [chunk_size] * full + ([rest] if rest else [])


def run_chunks(fn: Callable[[np.random.Generator, int], tuple], samples: int,
               seed: int, chunk_size: int, workers: int = 1) -> list:
    """Apply ``fn(rng, size)`` to every chunk; results come back in chunk order."""
    sizes = chunk_sizes(samples, chunk_size)
    jobs = [(i, s) for i, s in enumerate(sizes)]
    call = lambda job: fn(chunk_rng(seed, job[0]), job[1])
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(workers) as ex:
            return list(ex.map(call, jobs))
    return [call(j) for j in jobs]


def merge_moments(parts) -> tuple[int, float, float]:
    """Ordered pairwise merge of ``(count, mean, M2)`` summaries."""
    count, mean, m2 = 0, 0.0, 0.0
    for c, mu, s in parts:
        if c == 0:
            continue
        total = count + c
        delta = mu - mean
        mean += delta * c / total
        m2 += s + delta * delta * count * c / total
        count = total
    return count, mean, m2


def _pick_sampler(m: int, n: int, sampler: str) -> str:
    if sampler == "auto":
        return "multinomial" if math.factorial(n) <= 720 and m > math.factorial(n) else "matrix"
    if sampler not in ("matrix", "multinomial"):
        raise ValueError(f"unknown sampler {sampler!r}")
    return sampler


def iter_tallies(rng: np.random.Generator, size: int, m: int, n: int,
                 sampler: str = "matrix"):
    """Yield batches of independent pairwise tallies, ``(b, n, n)`` each,
    ``size`` in total.

    ``matrix`` ranks rows of uniforms; ``multinomial`` draws how many voters
    hold each of the ``n!`` rankings, which has the same law and costs O(n!)
    instead of O(m) per profile.  Batch sizes depend on ``(m, n)`` only.
    """
    if sampler == "multinomial":
        _, prefer = profiles.permutation_table(n)
        k = len(prefer)
        batch = max(1, _WORK // (k * n * n))
        flat = prefer.reshape(k, n * n)
        for start in range(0, size, batch):
            b = min(batch, size - start)
            counts = rng.multinomial(m, np.full(k, 1.0 / k), size=b)
            yield (counts @ flat).reshape(b, n, n)
        return
    batch = max(1, _WORK // (m * n * n))
    for start in range(0, size, batch):
        b = min(batch, size - start)
        ranks = profiles.ranks_from_rankings(np.argsort(rng.random((b, m, n)), axis=-1, kind="stable"))
        yield profiles.tally_from_ranks(ranks)


def mc_plain(m: int, n: int, samples: int, seed: int = 0, chunk_size: int = DEFAULT_CHUNK,
             workers: int = 1, target: str = "winner", sampler: str = "auto") -> Estimate:
    profiles.check_dimensions(m, n)
    sampler = _pick_sampler(m, n, sampler)
    flag = {"winner": profiles.has_winner, "loser": profiles.has_loser}[target]

    def chunk(rng, size):
        return sum(int(np.count_nonzero(flag(t, m)))
                   for t in iter_tallies(rng, size, m, n, sampler))

    t0 = time.perf_counter()
    hits = sum(run_chunks(chunk, samples, seed, chunk_size, workers))
    v = hits / samples
    se = math.sqrt(v * (1 - v) / samples)
    return make_estimate(v, se, samples, "plain", seed, m, n, time.perf_counter() - t0,
                         chunk_size, f"{RNG_TAG}; {sampler}")


def conditional_contributions(x: np.ndarray, n: int, target: str = "winner") -> np.ndarray:
    """Per-sample values ``n * P(candidate 1 wins | column x)``, row-wise.

    The power is taken as ``exp((n - 1) * log q)`` with ``log q`` from whichever
    tail is small, so ``q`` close to 1 does not round away and tiny ``q``
    underflows cleanly to 0.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    m = x.shape[1]
    if n == 1:
        return np.ones(len(x))
    if target == "winner":
        q, qc = tails_batch(1.0 - x, profiles.majority_threshold(m))
    elif target == "loser":
        qc, q = tails_batch(1.0 - x, (m + 1) // 2)
    else:
        raise ValueError(f"unknown target {target!r}")
    with np.errstate(divide="ignore"):
        logq = np.where(qc < 0.5, np.log1p(-np.minimum(qc, 1.0)), np.log(np.maximum(q, 0.0)))
    return n * np.exp((n - 1) * logq)


def _conditional_chunk(rng: np.random.Generator, size: int, m: int, n: int, target: str,
                       keep: int = 0):
    batch = max(1, _WORK // (m + 1))
    vals = np.empty(size)
    xs = []
    for start in range(0, size, batch):
        b = min(batch, size - start)
        x = rng.random((b, m))
        vals[start:start + b] = conditional_contributions(x, n, target)
        if keep and sum(len(v) for v in xs) < keep:
            xs.append(x)
    if keep:
        return np.concatenate(xs)[:keep], vals[:keep]
    mean = float(vals.mean())
    return size, mean, float(np.sum((vals - mean) ** 2))


def mc_conditional(m: int, n: int, samples: int, seed: int = 0, chunk_size: int = DEFAULT_CHUNK,
                   workers: int = 1, target: str = "winner") -> Estimate:
    profiles.check_dimensions(m, n)
    if m > MAX_CONDITIONAL_M:
        raise ValueError(f"m = {m} exceeds the conditional estimator's DP limit {MAX_CONDITIONAL_M}")
    t0 = time.perf_counter()
    parts = run_chunks(lambda rng, s: _conditional_chunk(rng, s, m, n, target),
                       samples, seed, chunk_size, workers)
    count, mean, m2 = merge_moments(parts)
    se = math.sqrt(m2 / (count - 1) / count) if count > 1 else 0.0
    return make_estimate(mean, se, samples, "conditional", seed, m, n,
                         time.perf_counter() - t0, chunk_size)


def conditional_audit(m: int, n: int, count: int = 100, seed: int = 0,
                      chunk_size: int = DEFAULT_CHUNK, target: str = "winner"):
    """First ``count`` draws of chunk 0 as ``(x, contribution)`` for spot checks."""
    count = min(count, chunk_size)
    return _conditional_chunk(chunk_rng(seed, 0), count, m, n, target, keep=count)


def estimate(method: str, m: int, n: int, samples: int, seed: int = 0,
             chunk_size: int = DEFAULT_CHUNK, workers: int = 1, target: str = "winner") -> Estimate:
    if method == "plain":
        return mc_plain(m, n, samples, seed, chunk_size, workers, target)
    if method == "conditional":
        return mc_conditional(m, n, samples, seed, chunk_size, workers, target)
    raise ValueError(f"unknown method {method!r}")


@dataclass(frozen=True)
class VarianceReport:
    plain: Estimate
    conditional: Estimate
    ratio: float  # stderr_plain^2 / stderr_conditional^2

    def to_dict(self) -> dict:
        return {"plain": self.plain.to_dict(), "conditional": self.conditional.to_dict(),
                "ratio": self.ratio}


def variance_comparison(m: int, n: int, samples: int, seed: int = 0,
                        chunk_size: int = DEFAULT_CHUNK, workers: int = 1) -> VarianceReport:
    plain = mc_plain(m, n, samples, seed, chunk_size, workers)
    cond = mc_conditional(m, n, samples, seed, chunk_size, workers)
    vp, vc = plain.stderr**2, cond.stderr**2
    if vc == 0.0:
        ratio = 1.0 if vp == 0.0 else math.inf
    else:
        ratio = vp / vc
    return VarianceReport(plain, cond, ratio)
