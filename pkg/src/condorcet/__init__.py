"""Probability of a Condorcet winner under impartial culture: exact
enumeration, Monte Carlo estimators, limit integrals and rate checks."""
from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"
