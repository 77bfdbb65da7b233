"""Full-scale end-to-end checks, one test per recorded bound.

Each test runs its registry criterion at the FULL scales and asserts the
reported outcome, so `pytest -v` prints one pass/fail line per check.
The interval lower-bound check is expected to fail: the midpoint value
of |I(beta1, -beta1/N)|/N is 0.1591 (it peaks at the left endpoint and
the stated N/6 = 0.1667 threshold only holds on a sliver of each
interval); the test states the bound as recorded and reports the miss.
"""

import pytest

from weylmax.acceptance import CRITERIA, FULL

_BY_NAME = dict(CRITERIA)


def _run(name: str) -> None:
    ok, detail = _BY_NAME[name](FULL, 0, None)
    assert ok, detail


def test_gauss_closed_form_matches_direct_odd_q_to_999():
    _run("gauss-closed-vs-direct")


def test_gauss_ratio_below_two_exhaustive_q_to_500():
    _run("gauss-ratio-exhaustive")


def test_fresnel_residual_below_059_over_sweep():
    _run("fresnel-residual-sweep")


def test_oscillatory_integral_ratio_below_three():
    _run("ibound-ratio-sweep")


def test_anchored_approx_error_within_budget_and_exact_at_divisors():
    _run("major-arc-approx-error")


def test_high_value_points_all_admit_anchors():
    _run("anchor-search-experiment")


def test_interval_family_bounds_hold_at_midpoints():
    _run("lower-bound-intervals")


def test_totient_sums_match_asymptotics():
    _run("totient-sums")


def test_mp_exact_at_one_and_two_terms():
    _run("mp-tiny-exact")


def test_mp_enclosure_contains_dense_oracle_at_n16():
    _run("mp-dense-oracle")


def test_dyadic_slopes_match_growth_exponents():
    _run("exponent-fits")


def test_outputs_identical_across_thread_counts():
    _run("output-determinism")
