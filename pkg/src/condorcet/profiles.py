"""Impartial-culture preference profiles and pairwise tallies.

A profile is generated from an ``m x n`` matrix of independent uniforms: voter
``a`` ranks candidates in increasing order of row ``a``.  Everything downstream
(winner/loser detection, exact enumeration, Monte Carlo) goes through the
pairwise tally, so the majority rule lives in exactly one place here.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np


class InvalidDimension(ValueError):
    """Raised when a voter or candidate count is not a positive integer."""


def check_dimensions(m: int, n: int) -> None:
    for name, v in (("m", m), ("n", n)):
        if isinstance(v, bool) or int(v) != v or v < 1:
            raise InvalidDimension(f"{name} must be a positive integer, got {v!r}")


def beats(counts: np.ndarray, m: int) -> np.ndarray:
    """Strict majority: ``counts[..., j, j']`` is above ``m/2``."""
    return 2 * counts > m


def loses(counts: np.ndarray, m: int) -> np.ndarray:
    """Strict minority: ``counts[..., j, j']`` is below ``m/2``."""
    return 2 * counts < m


def majority_threshold(m: int) -> int:
    """Smallest integer vote count that is strictly above ``m/2``."""
    return m // 2 + 1


@dataclass(frozen=True)
class PreferenceProfile:
    rankings: np.ndarray  # (m, n); row = candidate indices, most preferred first

    def __post_init__(self):
        r = np.asarray(self.rankings)
        if r.ndim != 2:
            raise InvalidDimension("rankings must be a 2-d array (m, n)")
        check_dimensions(*r.shape)
        if not np.array_equal(np.sort(r, axis=1), np.broadcast_to(np.arange(r.shape[1]), r.shape)):
            raise ValueError("every row must be a permutation of range(n)")
        r = r.astype(np.int64, copy=True)
        r.flags.writeable = False
        object.__setattr__(self, "rankings", r)

    @property
    def m(self) -> int:
        return self.rankings.shape[0]

    @property
    def n(self) -> int:
        return self.rankings.shape[1]

    def reversed(self) -> "PreferenceProfile":
        """Every voter's ranking turned upside down (the ``1 - X`` transform)."""
        return PreferenceProfile(self.rankings[:, ::-1])


@dataclass(frozen=True)
class PairwiseTally:
    counts: np.ndarray  # (n, n); counts[j, k] = voters preferring j to k
    m: int

    @property
    def n(self) -> int:
        return self.counts.shape[0]


def sample_profile(m: int, n: int, rng: np.random.Generator) -> PreferenceProfile:
    """Draw one impartial-culture profile via the uniform matrix construction.

    Ties in a row (possible only in finite precision) go to the lower
    candidate index, which is what a stable argsort does.
    """
    check_dimensions(m, n)
    x = rng.random((m, n))
    return PreferenceProfile(np.argsort(x, axis=1, kind="stable"))


def ranks_from_rankings(rankings: np.ndarray) -> np.ndarray:
    """Invert permutations along the last axis: position of each candidate."""
    return np.argsort(rankings, axis=-1, kind="stable")


def tally_from_ranks(ranks: np.ndarray) -> np.ndarray:
    """Pairwise counts from rank arrays of shape ``(..., m, n)``."""
    prefer = ranks[..., :, :, None] < ranks[..., :, None, :]
    return prefer.sum(axis=-3, dtype=np.int64)


def pairwise_tally(profile: PreferenceProfile) -> PairwiseTally:
    counts = tally_from_ranks(ranks_from_rankings(profile.rankings))
    return PairwiseTally(counts, profile.m)


def _unique_candidate(mask: np.ndarray) -> Optional[int]:
    np.fill_diagonal(mask, True)
    hits = np.flatnonzero(mask.all(axis=1))
    if len(hits) > 1:  # structurally impossible; guard against a broken rule
        raise AssertionError(f"multiple candidates satisfy the condition: {hits.tolist()}")
    return int(hits[0]) if len(hits) else None


def condorcet_winner(tally: PairwiseTally, m: Optional[int] = None) -> Optional[int]:
    """Index of the candidate beating every other by strict majority, or None.

    With a single candidate the condition is vacuous and candidate 0 wins.
    """
    m = tally.m if m is None else m
    return _unique_candidate(beats(np.asarray(tally.counts), m))


def condorcet_loser(tally: PairwiseTally, m: Optional[int] = None) -> Optional[int]:
    """Index of the candidate getting strictly fewer than ``m/2`` votes against
    every other candidate, or None."""
    m = tally.m if m is None else m
    return _unique_candidate(loses(np.asarray(tally.counts), m))


def _flags(mask: np.ndarray) -> np.ndarray:
    n = mask.shape[-1]
    mask = mask | np.eye(n, dtype=bool)
    return mask.all(axis=-1).any(axis=-1)


def has_winner(counts: np.ndarray, m: int) -> np.ndarray:
    """Vectorised winner existence for a stack of tallies ``(..., n, n)``."""
    return _flags(beats(counts, m))


def has_loser(counts: np.ndarray, m: int) -> np.ndarray:
    return _flags(loses(counts, m))


@lru_cache(maxsize=None)
def permutation_table(n: int) -> tuple[np.ndarray, np.ndarray]:
    """All ``n!`` rankings in lexicographic order and their 0/1 pairwise matrices.

    Returns ``(perms, prefer)`` with ``prefer[p, j, k] = 1`` when ranking ``p``
    puts ``j`` ahead of ``k``.
    """
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.int64).reshape(-1, n)
    ranks = ranks_from_rankings(perms)
    prefer = (ranks[:, :, None] < ranks[:, None, :]).astype(np.int64)
    perms.flags.writeable = False
    prefer.flags.writeable = False
    return perms, prefer
