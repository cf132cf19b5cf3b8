"""Acceptance gate: the nine criteria at full size.

Each test prints one ``[PASS]``/``[FAIL]`` line (visible without ``-s``) and
then asserts.  Run alone with ``pytest tests/test_acceptance.py -v``.
"""
import json

import pytest

from condorcet import checks

pytestmark = pytest.mark.slow


def gate(result, capsys):
    with capsys.disabled():
        print(f"\n{result.line()}")
        if not result.passed:
            print(json.dumps(result.detail, default=str, indent=1)[:4000])
    assert result.passed, result.name


def test_criterion_1_oracle_agreement(capsys):
    r = checks.oracle_agreement()
    assert r.seconds <= 600
    gate(r, capsys)


def test_criterion_2_winner_loser_duality(capsys):
    gate(checks.winner_loser_duality(), capsys)


def test_criterion_3_limit_integral_sanity(capsys):
    gate(checks.limit_integral_sanity(), capsys)


def test_criterion_4_rate_for_three_voters(capsys):
    r = checks.three_voter_rate()
    assert r.seconds <= 1800
    gate(r, capsys)


def test_criterion_5_finite_electorate_band(capsys):
    r = checks.finite_electorate_band()
    assert r.seconds <= 1200
    gate(r, capsys)


def test_criterion_6_superpolynomial_decay(capsys):
    gate(checks.superpolynomial_decay(), capsys)


def test_criterion_7_esseen_envelope(capsys):
    gate(checks.esseen_containment(), capsys)


def test_criterion_8_mills_bound(capsys):
    gate(checks.mills_bound(), capsys)


def test_criterion_9_determinism(capsys):
    gate(checks.determinism(), capsys)
