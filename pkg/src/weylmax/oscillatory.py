"""Oscillatory integrals: I(beta) = int_0^N e(b1 g + b2 g^2) dg.

Three routes, chosen by the size of the quadratic phase:

* nearly linear phase: drop the quadratic term and use the elementary
  antiderivative (the neglected factor costs at most 2 pi |b2| N^3 / 3);
* genuine quadratic phase: complete the square and evaluate half-line
  Fresnel integrals, with the (possibly enormous) constant phase
  b1^2/(4 b2) reduced mod 1 in two-term extended precision;
* the thin band in between, where completing the square is
  ill-conditioned: adaptive panel quadrature, never spanning more than
  a quarter of the local oscillation period per panel.

The quadrature is also exposed on its own (osc_quadrature) as the
cross-check route for the closed forms.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import fresnel as _scipy_fresnel  # returns (S, C)

from .weyl import _phase_mod1, _two_prod

TWO_PI = 2.0 * math.pi

# e(1/8), the phase of the completed Fresnel integral
E_EIGHTH = cmath.exp(1j * math.pi / 4)

# quadratic phase small enough to drop: 2pi/3 |b2| N^3 <= 1e-10 N
_LINEAR_MAX_B2N2 = 4.7e-11
# below this the square-completion's Fresnel difference cancels badly
_FRESNEL_MIN_B2N2 = 1e-4
# cap on the completed-square constant phase b1^2/(4|b2|) per unit N
_FRESNEL_MAX_PHASE_PER_N = 1e7


@dataclass(frozen=True)
class FreqPair:
    """Linear and quadratic frequency (cycles per unit gamma, gamma^2)."""

    beta1: float
    beta2: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.beta1) and math.isfinite(self.beta2)):
            raise ValueError("frequencies must be finite")


def fresnel_cs(z: float) -> complex:
    """C(z) + i S(z) with the classical half-integral normalization."""
    s, c = _scipy_fresnel(z)
    return complex(float(c), float(s))


def fresnel_integral(A: float, X: float) -> complex:
    """int_{-X}^{X} e(A g^2) dg for A > 0.

    Scaled to the classical functions via u = 2 g sqrt(A): the value is
    [C(z) + i S(z)] / sqrt(A) at z = 2 X sqrt(A).
    """
    if not (A > 0 and math.isfinite(A)):
        raise ValueError(f"A must be positive and finite, got {A}")
    if not (X >= 0 and math.isfinite(X)):
        raise ValueError(f"X must be nonnegative and finite, got {X}")
    z = 2.0 * X * math.sqrt(A)
    return fresnel_cs(z) / math.sqrt(A)


def fresnel_main_term_residual(A: float, X: float) -> float:
    """Empirical |lambda| in  int_{-X}^X e(Ag^2) dg = e(1/8)(2A)^{-1/2} + lambda/(AX).

    The main term uses the completed-integral phase e(1/8); see the
    module notes on why the real-valued variant leaves an O(A^{-1/2})
    residual instead.
    """
    if A * X < 1.0:
        raise ValueError(f"bound is vacuous for AX < 1 (got AX = {A * X})")
    main = E_EIGHTH / math.sqrt(2.0 * A)
    return abs(fresnel_integral(A, X) - main) * (A * X)


def _half_fresnel(b2: float, X: float) -> complex:
    """int_0^X e(b2 u^2) du for b2 != 0, odd in X, bounded uniformly."""
    a = abs(b2)
    g = fresnel_cs(2.0 * X * math.sqrt(a)) / (2.0 * math.sqrt(a))
    return g if b2 > 0 else g.conjugate()


def _frac_product(a: float, b: float) -> float:
    """a*b mod 1 in [-1/2, 1/2], exact split so huge products keep precision."""
    hi, lo = _two_prod(np.float64(a), float(b))
    r = float(hi - np.rint(hi)) + float(lo - np.rint(lo))
    return r - round(r)


@lru_cache(maxsize=None)
def _leggauss(points: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(points)


def osc_quadrature(b1: float, b2: float, N: float, points: int = 24) -> complex:
    """Panel Gauss-Legendre evaluation of int_0^N e(b1 g + b2 g^2) dg.

    Panels are capped at a quarter of the local oscillation period
    1/(|b1| + 2|b2| g), and the stationary point -b1/(2 b2) is always a
    panel boundary when interior.  Phases are reduced mod 1 with the
    same two-term machinery as the sum evaluator.
    """
    nodes, wts = _leggauss(points)
    breaks = [0.0, float(N)]
    if b2 != 0.0:
        g0 = -b1 / (2.0 * b2)
        if 0.0 < g0 < N:
            breaks.insert(1, g0)
    re_parts: list[float] = []
    im_parts: list[float] = []
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        g = lo
        while g < hi:
            rate = abs(b1) + 2.0 * abs(b2) * max(abs(g), abs(hi)) + 1e-30
            w = min(hi - g, 0.25 / rate)
            gg = (g + 0.5 * w) + (0.5 * w) * nodes
            ph = _phase_mod1(gg, b1, b2)
            vals = np.exp((TWO_PI * 1j) * ph)
            panel = 0.5 * w * complex(vals @ wts)
            re_parts.append(panel.real)
            im_parts.append(panel.imag)
            g += w
    return complex(math.fsum(re_parts), math.fsum(im_parts))


def I_beta(beta: FreqPair, N: int) -> complex:
    """int_0^N e(beta1 g + beta2 g^2) dg to absolute accuracy 1e-8 N."""
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    b1, b2 = beta.beta1, beta.beta2
    Nf = float(N)
    if abs(b2) * Nf * Nf <= _LINEAR_MAX_B2N2:
        if b1 == 0.0:
            val = complex(Nf)
        else:
            # I = (e(b1 N) - 1)/(2 pi i b1) = e(r/2) sin(pi r)/(pi b1)
            # with r = b1 N mod 1; the half-integer sign flips of the
            # two factors cancel, so both use the reduced phase
            r = _frac_product(b1, Nf)
            val = cmath.exp(1j * math.pi * r) * (math.sin(math.pi * r) / (math.pi * b1))
    elif (
        abs(b2) * Nf * Nf >= _FRESNEL_MIN_B2N2
        and b1 * b1 / (4.0 * abs(b2)) <= _FRESNEL_MAX_PHASE_PER_N * Nf
    ):
        c = b1 / (2.0 * b2)
        # constant phase -b2 c^2 = -(b1/2) c, reduced before exponentiation
        ph = _frac_product(0.5 * b1, c)
        val = cmath.exp((-TWO_PI * 1j) * ph) * (
            _half_fresnel(b2, Nf + c) - _half_fresnel(b2, c)
        )
    else:
        val = osc_quadrature(b1, b2, Nf)
    if abs(val) > Nf * (1.0 + 1e-9):
        raise RuntimeError(f"|I| = {abs(val)} exceeds N = {N}; evaluation is broken")
    return val


def I_bound_ratio(beta: FreqPair, N: int) -> float:
    """|I(beta)| (1 + |b1| N + |b2| N^2)^{1/2} / N."""
    Nf = float(N)
    scale = math.sqrt(1.0 + abs(beta.beta1) * Nf + abs(beta.beta2) * Nf * Nf)
    return abs(I_beta(beta, N)) * scale / Nf


def fresnel_residual_sweep(
    a_points: int = 33, ax2_points: int = 25, pmap=None
) -> tuple[float, list[tuple[float, float, float, float]]]:
    """sup of fresnel_main_term_residual over A in [1e-4, 1], A X^2 in [10, 1e4].

    Pairs with A X < 1 fall outside the bound's domain and are skipped.
    Returns (sup, rows) with rows (A, X, AX, residual) in grid order.
    """
    cells = []
    for k in range(a_points):
        A = 10.0 ** (-4.0 + 4.0 * k / (a_points - 1))
        for j in range(ax2_points):
            ax2 = 10.0 ** (1.0 + 3.0 * j / (ax2_points - 1))
            X = math.sqrt(ax2 / A)
            if A * X >= 1.0:
                cells.append((A, X))
    mapper = pmap if pmap is not None else lambda f, xs: [f(v) for v in xs]
    vals = mapper(_residual_cell, cells)
    rows = [(A, X, A * X, r) for (A, X), r in zip(cells, vals)]
    sup = max(r[3] for r in rows)
    return sup, rows


def _residual_cell(cell: tuple[float, float]) -> float:
    A, X = cell
    return fresnel_main_term_residual(A, X)


def ibound_ratio_sweep(
    n_list: tuple[int, ...] = (100, 1000, 10000),
    count: int = 400,
    seed: int = 0,
    pmap=None,
) -> tuple[float, list[tuple[int, float, float, float]]]:
    """sup of I_bound_ratio over random |b1| <= 10/N, |b2| <= 10/N^2.

    Draws are keyed per (seed, N, index) so the sweep is reproducible
    point by point regardless of how the work is split.
    """
    cases = []
    for N in n_list:
        for idx in range(count):
            rng = np.random.Generator(np.random.Philox(key=(seed, (N << 32) + idx)))
            b1 = (2.0 * rng.random() - 1.0) * 10.0 / N
            b2 = (2.0 * rng.random() - 1.0) * 10.0 / (N * N)
            cases.append((N, b1, b2))
    mapper = pmap if pmap is not None else lambda f, xs: [f(v) for v in xs]
    vals = mapper(_ratio_case, cases)
    rows = [(N, b1, b2, r) for (N, b1, b2), r in zip(cases, vals)]
    sup = max(r[3] for r in rows)
    return sup, rows


def _ratio_case(case: tuple[int, float, float]) -> float:
    N, b1, b2 = case
    return I_bound_ratio(FreqPair(b1, b2), N)
