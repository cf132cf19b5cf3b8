"""Upper tail of the standard normal, ``G(y) = P(Z >= y)``, and its logarithm."""
from __future__ import annotations

import numpy as np
from scipy import special


def g_upper(y):
    """Complementary standard normal CDF (erfc based, accurate in both tails)."""
    return special.ndtr(-np.asarray(y, dtype=float))[()]


def log_g(y):
    """``log G(y)``, finite far into the upper tail where ``G`` underflows."""
    return special.log_ndtr(-np.asarray(y, dtype=float))[()]
