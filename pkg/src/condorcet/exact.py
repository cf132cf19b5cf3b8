"""Exact Q(m, n) by brute-force enumeration of every profile.

All ``(n!)^m`` tuples of rankings are visited in lexicographic (odometer)
order, partitioned by the first voter's ranking, and the profiles with a
Condorcet winner (or strict loser) are counted with Python integers.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction

import numpy as np

from condorcet import profiles

DEFAULT_BUDGET = 10**7
_BATCH = 1 << 15


class BudgetExceeded(RuntimeError):
    """Raised when an enumeration would visit more profiles than allowed."""

    def __init__(self, required: int, budget: int):
        super().__init__(f"enumeration needs {required} profiles, budget is {budget}")
        self.required = required
        self.budget = budget


@dataclass(frozen=True)
class ExactResult:
    m: int
    n: int
    target: str
    numerator: int
    denominator: int
    profile_count: int
    winner_count: int

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    @property
    def value(self) -> float:
        return float(self.fraction)

    def decimal(self, digits: int = 30) -> str:
        with localcontext() as ctx:
            ctx.prec = digits
            return str(Decimal(self.numerator) / Decimal(self.denominator))

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "target": self.target,
            "numerator": str(self.numerator),
            "denominator": str(self.denominator),
            "fraction": f"{self.numerator}/{self.denominator}",
            "decimal": self.decimal(),
            "profile_count": str(self.profile_count),
            "winner_count": str(self.winner_count),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExactResult":
        return cls(
            m=int(d["m"]), n=int(d["n"]), target=d["target"],
            numerator=int(d["numerator"]), denominator=int(d["denominator"]),
            profile_count=int(d["profile_count"]), winner_count=int(d["winner_count"]),
        )


def profile_count(m: int, n: int) -> int:
    return math.factorial(n) ** m


def _count_partition(first: int, m: int, n: int) -> tuple[int, int]:
    """(winner, loser) counts over profiles whose first voter uses ranking ``first``."""
    _, prefer = profiles.permutation_table(n)
    p = len(prefer)
    rest = p ** (m - 1)
    base = prefer[first]
    wins = loses = 0
    for start in range(0, rest, _BATCH):
        idx = np.arange(start, min(start + _BATCH, rest), dtype=np.int64)
        counts = np.broadcast_to(base, (len(idx), n, n)).copy()
        # least significant digit is the last voter
        for _ in range(m - 1):
            idx, digit = np.divmod(idx, p)
            counts += prefer[digit]
        wins += int(np.count_nonzero(profiles.has_winner(counts, m)))
        loses += int(np.count_nonzero(profiles.has_loser(counts, m)))
    return wins, loses


def enumerate_counts(m: int, n: int, budget: int = DEFAULT_BUDGET,
                     workers: int = 1) -> tuple[int, int, int]:
    """Return ``(profile_count, winner_count, loser_count)``."""
    profiles.check_dimensions(m, n)
    total = profile_count(m, n)
    if total > budget:
        raise BudgetExceeded(total, budget)
    firsts = range(math.factorial(n))
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            parts = list(ex.map(lambda f: _count_partition(f, m, n), firsts))
    else:
        parts = [_count_partition(f, m, n) for f in firsts]
    return total, sum(w for w, _ in parts), sum(l for _, l in parts)


def exact_probability(m: int, n: int, target: str = "winner",
                      budget: int = DEFAULT_BUDGET, workers: int = 1) -> ExactResult:
    if target not in ("winner", "loser"):
        raise ValueError(f"target must be 'winner' or 'loser', got {target!r}")
    total, wins, loses = enumerate_counts(m, n, budget, workers)
    hits = wins if target == "winner" else loses
    frac = Fraction(hits, total)
    return ExactResult(m, n, target, frac.numerator, frac.denominator, total, hits)


def symmetry_check(m: int, n: int, budget: int = DEFAULT_BUDGET) -> bool:
    """True iff the exact winner and strict-loser probabilities coincide."""
    _, wins, loses = enumerate_counts(m, n, budget)
    return wins == loses
