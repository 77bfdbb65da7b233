import cmath
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import osc_quad
from weylmax.oscillatory import (
    E_EIGHTH,
    FreqPair,
    I_beta,
    I_bound_ratio,
    fresnel_integral,
    fresnel_main_term_residual,
    fresnel_residual_sweep,
    ibound_ratio_sweep,
    osc_quadrature,
)
from weylmax.weyl import weyl_sum


def I_mp(b1, b2, N):
    # fully independent oracle: mpmath quadrature split at the
    # stationary point
    with mp.workdps(30):
        f = lambda g: mp.e ** (2j * mp.pi * (mp.mpf(b1) * g + mp.mpf(b2) * g * g))
        pts = [0, N]
        if b2 != 0 and 0 < -b1 / (2 * b2) < N:
            pts.insert(1, -b1 / (2 * b2))
        return complex(mp.quad(f, pts, maxdegree=10))


def test_fresnel_trivial_and_errors():
    assert fresnel_integral(1.0, 0.0) == 0
    with pytest.raises(ValueError):
        fresnel_integral(0.0, 1.0)
    with pytest.raises(ValueError):
        fresnel_integral(-1.0, 1.0)
    with pytest.raises(ValueError):
        fresnel_integral(1.0, -1.0)


def test_fresnel_scaling_law():
    for (A, X) in [(0.5, 3.0), (1e-3, 40.0), (2.0, 0.7)]:
        lhs = fresnel_integral(A, X)
        rhs = fresnel_integral(1.0, X * math.sqrt(A)) / math.sqrt(A)
        assert abs(lhs - rhs) <= 1e-12 * (1 + abs(lhs))


def test_fresnel_completed_value():
    got = fresnel_integral(1.0, 10.0)
    main = E_EIGHTH / math.sqrt(2.0)
    assert abs(main - (0.5 + 0.5j)) < 1e-15
    assert abs(got - main) <= 0.0584  # (7/12)/(A X) budget


def test_fresnel_against_panel_oracle():
    for (A, X) in [(1.0, 10.0), (0.01, 37.0), (3.0, 2.0)]:
        want_half = osc_quad(0.0, A, X)  # int_0^X
        got = fresnel_integral(A, X)
        assert abs(got - 2 * want_half) <= 1e-10 * (1 + X)


def test_residual_examples():
    assert fresnel_main_term_residual(1.0, 10.0) <= 7 / 12
    assert fresnel_main_term_residual(1e-4, 1e4) <= 7 / 12
    with pytest.raises(ValueError):
        fresnel_main_term_residual(1e-4, 10.0)


def test_residual_sweep_small():
    sup, rows = fresnel_residual_sweep(a_points=9, ax2_points=7)
    assert sup <= 0.59
    assert all(r[3] >= 0 for r in rows)
    assert all(r[2] >= 1.0 for r in rows)  # AX >= 1 kept only
    # residual approaches the asymptotic limit 1/(2 pi) sqrt(2)... from
    # below; observed sup over the full grid is ~0.16
    assert 0.1 <= sup <= 0.2


def test_i_beta_trivial():
    assert I_beta(FreqPair(0.0, 0.0), 100) == 100
    with pytest.raises(ValueError):
        I_beta(FreqPair(0.1, 0.0), 0)


def test_i_beta_linear_phase():
    for (b1, N) in [(0.37, 1000), (1 / 3, 999), (3e-3, 10**4), (0.499, 64)]:
        got = I_beta(FreqPair(b1, 0.0), N)
        want = cmath.exp(1j * math.pi * b1 * N) * math.sin(math.pi * b1 * N) / (
            math.pi * b1
        )
        # closed form written without phase reduction only works while
        # b1*N is moderate; these cases keep it below 500
        assert abs(got - want) <= 1e-10
        assert abs(got - osc_quad(b1, 0.0, N)) <= 1e-9


def test_i_beta_interval_midpoint_value():
    # this frequency pair sits at the center of the lower-bound
    # construction; the plain main-term estimate sqrt(N^2/30) = 1825.74
    # ignores the oscillatory Fresnel correction at z^2 = 15 and
    # overshoots the true value by 7.6%
    N = 10**4
    got = I_beta(FreqPair(15.0 / N, -15.0 / N**2), N)
    assert abs(got) == pytest.approx(1686.0100437295816, rel=1e-10)
    want = I_mp(15.0 / N, -15.0 / N**2, N)
    assert abs(got - want) <= 1e-8 * N
    assert abs(abs(got) - abs(want)) / abs(want) <= 0.01


def test_i_beta_conjugation():
    for (b1, b2, N) in [(2e-3, -3e-7, 1000), (5e-4, 2e-8, 10**4), (0.1, 0.0, 50)]:
        a = I_beta(FreqPair(b1, b2), N)
        b = I_beta(FreqPair(-b1, -b2), N)
        assert abs(b - a.conjugate()) <= 1e-12 * N


def test_i_beta_routes_agree_at_thresholds():
    # straddle the route boundaries: quadratic phase near 4.7e-11 and
    # 1e-4 per N^2
    N = 10**4
    for b2n2 in (4e-11, 6e-11, 9e-5, 1.2e-4):
        b2 = b2n2 / N**2
        for b1 in (1e-4, 7.3e-4):
            got = I_beta(FreqPair(b1, b2), N)
            ref = osc_quad(b1, b2, N)
            assert abs(got - ref) <= 1e-8 * N


def test_i_beta_closed_vs_quadrature_many():
    rng = np.random.default_rng(5)
    N = 1000
    worst = 0.0
    for _ in range(1000):
        b1 = (2 * rng.random() - 1) * 10.0 / N
        b2 = (2 * rng.random() - 1) * 10.0 / N**2
        closed = I_beta(FreqPair(b1, b2), N)
        quad = osc_quadrature(b1, b2, float(N))
        worst = max(worst, abs(closed - quad))
    assert worst <= 1e-6 * N


def test_i_beta_riemann_sum_consistency():
    # for tiny frequencies the sum and the integral differ by O(1)
    for N in (100, 1000, 10**4):
        b1 = 0.05 / N
        b2 = 0.04 / N**2
        s = weyl_sum(b1 % 1.0, b2 % 1.0, N)
        i = I_beta(FreqPair(b1, b2), N)
        assert abs(s - i) <= 10.0


@given(
    b1n=st.floats(-20, 20),
    b2n2=st.floats(-20, 20),
    N=st.sampled_from([10, 100, 1000]),
)
@settings(max_examples=60, deadline=None)
def test_i_beta_never_exceeds_n(b1n, b2n2, N):
    val = I_beta(FreqPair(b1n / N, b2n2 / N**2), N)
    assert abs(val) <= N * (1 + 1e-9)


def test_i_bound_ratio_values():
    assert I_bound_ratio(FreqPair(0.0, 0.0), 100) == pytest.approx(1.0)
    # |I(0, 1/N^2)| = N |C(2) + i S(2)| / 2, so the ratio is that times
    # sqrt(2); recorded value 0.42209...
    r = I_bound_ratio(FreqPair(0.0, 1.0 / 100**2), 100)
    assert r == pytest.approx(0.4220934237169366, rel=1e-9)
    assert r <= 3.0


def test_ibound_sweep_small():
    sup, rows = ibound_ratio_sweep(n_list=(100, 1000), count=60, seed=0)
    assert sup <= 3.0
    assert len(rows) == 120
    # reproducibility: same seed, same rows
    sup2, rows2 = ibound_ratio_sweep(n_list=(100, 1000), count=60, seed=0)
    assert sup == sup2 and rows == rows2


def test_freq_pair_validation():
    with pytest.raises(ValueError):
        FreqPair(math.nan, 0.0)
    with pytest.raises(ValueError):
        FreqPair(0.0, math.inf)
