"""Certified maximization of |S(x, t)| over t, and the lower-bound interval family.

For fixed x the squared modulus f(t) = |S(x, t)|^2 is a real trigonometric
polynomial in t of degree D = N^2 - 1, so a scan over M >= K*N^2 equispaced
points cannot miss a global maximum by much: by the Bernstein-Szego
inequality, any point within t-distance h/2 of a maximizer carries
f >= F * cos(pi * D * h) where F is the true maximum.  That bound drives a
bracket-refinement search whose final enclosure is certified with the
Lipschitz constant of |S| in t.

The lower-bound construction places, for each odd q >= 3 with 36 q^2 <= N and
each a1 coprime to q, the interval [a1/q + 15/N, a1/q + 16/N].  On such an
interval the choice v(x) = 1/q - beta1/N (with beta1 = x - a1/q) keeps
|S(x, v(x))| of order N / sqrt(q); the sweep below measures that ratio.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional

import numpy as np

from .oscillatory import FreqPair, I_beta
from .weyl import _phase_mod1, t_lipschitz_bound, weyl_sum

__all__ = [
    "MaximizerResult",
    "LowerBoundInterval",
    "JRow",
    "LowerBoundReport",
    "maximize_t",
    "build_E",
    "e_measure",
    "v_of_x",
    "j_freqs",
    "lower_bound_ratio",
    "lower_bound_sweep",
]

N_CERTIFIED_MAX = 4096

_REFINE = 32
_MAX_STAGES = 16
_MAX_STAGE_EVALS = 2_000_000
# relative slack on the pruning angle, covering float jitter in grid positions
_ANGLE_PAD = 1.0 + 1e-9

_EPS = float(np.finfo(np.float64).eps)


@dataclass(frozen=True)
class MaximizerResult:
    """Certified enclosure of max over t in [0,1] of |S(x, t)|.

    value_lower is attained: value_lower <= |S(x, t_star)|.  value_upper is a
    certified bound on the true maximum.
    """

    t_star: float
    value_lower: float
    value_upper: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.t_star < 1.0 + 1e-12:
            raise ValueError("t_star must lie in [0, 1)")
        if not 0.0 < self.value_lower <= self.value_upper:
            raise ValueError("need 0 < value_lower <= value_upper")

    @property
    def width(self) -> float:
        return self.value_upper - self.value_lower


@dataclass(frozen=True)
class LowerBoundInterval:
    """One interval J(q, a1) = [a1/q + 15/N, a1/q + 16/N] with exact endpoints."""

    q: int
    a1: int
    lo: Fraction
    hi: Fraction

    def __post_init__(self) -> None:
        if self.q < 3 or self.q % 2 == 0:
            raise ValueError("q must be odd and >= 3")
        if not 1 <= self.a1 <= self.q or math.gcd(self.a1, self.q) != 1:
            raise ValueError("a1 must lie in [1, q] with gcd(a1, q) = 1")
        width = self.hi - self.lo
        if width <= 0 or width.numerator != 1:
            raise ValueError("hi - lo must equal 1/N for a positive integer N")
        n = width.denominator
        if 36 * self.q * self.q > n:
            raise ValueError("q exceeds sqrt(N)/6")
        if self.lo != Fraction(self.a1, self.q) + 15 * width:
            raise ValueError("lo must equal a1/q + 15/N")

    @property
    def n(self) -> int:
        return (self.hi - self.lo).denominator

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2


def _fp_slack(n: int, m: int) -> float:
    # roundoff envelope for |S| computed either by length-m inverse FFT or by
    # the direct chunked sum; generous on both counts
    fft = (4.0 * math.log2(max(m, 2)) + 2.0) * _EPS * n
    direct = 32.0 * _EPS * n
    return max(fft, direct)


def _batch_abs_s(x: float, ts: np.ndarray, n: int) -> np.ndarray:
    """|S(x, t)| for a vector of t values, chunked to bound memory."""
    nn = np.arange(1, n + 1, dtype=np.float64)
    out = np.empty(ts.size, dtype=np.float64)
    step = max(1, (1 << 22) // max(n, 1))
    for k in range(0, ts.size, step):
        tc = ts[k : k + step, None]
        r = _phase_mod1(nn[None, :], x, tc)
        out[k : k + step] = np.abs(np.exp((2j * np.pi) * r).sum(axis=1))
    return out


def maximize_t(x: float, n: int, tol: float, coarse_factor: int = 8) -> MaximizerResult:
    """Certified enclosure of max_t |S(x, t)| and a near-least maximizer.

    Coarse stage: one inverse FFT gives S(x, j/M) on M = coarse_factor * n^2
    points.  Brackets around points that the degree-based bound cannot rule
    out are then subdivided 32-fold per stage until the Lipschitz slack
    L * h / 2 falls below tol/2, giving value_upper = best + fp + L * h / 2.

    t_star is the smallest evaluated point within tol/2 of the best value
    (the tie window is tol/2 so the enclosure width stays <= tol).  Ties
    below the final grid resolution cannot be ordered.
    """
    if not isinstance(n, int) or n < 1:
        raise ValueError("n must be a positive integer")
    if n > N_CERTIFIED_MAX:
        raise ValueError(f"certified path requires n <= {N_CERTIFIED_MAX}")
    if not isinstance(coarse_factor, int) or coarse_factor < 8:
        raise ValueError("coarse_factor must be an integer >= 8")
    if not math.isfinite(x):
        raise ValueError("x must be finite")
    tol = float(tol)
    if not tol >= 1e-6 * n * (1.0 - 1e-12):
        raise ValueError("tol must be at least 1e-6 * n")

    m = coarse_factor * n * n
    deg = n * n - 1
    lip = t_lipschitz_bound(n)
    fp = _fp_slack(n, m)
    target = tol / 2.0 - 2.0 * fp
    if target <= 0:
        raise ValueError("tol too small for the working precision")

    # coarse scan: S(x, j/m) = m * ifft(A)[j] with A[n^2] = e(n x)
    nn = np.arange(1, n + 1, dtype=np.float64)
    coeffs = np.zeros(m, dtype=np.complex128)
    sq = (np.arange(1, n + 1, dtype=np.int64) ** 2) % m
    np.add.at(coeffs, sq, np.exp((2j * np.pi) * _phase_mod1(nn, x, 0.0)))
    s_coarse = np.abs(m * np.fft.ifft(coeffs))
    del coeffs

    best = float(s_coarse.max())
    h = 1.0 / m

    def _keep_mask(svals: np.ndarray, spacing: float) -> np.ndarray:
        angle = math.pi * deg * spacing * _ANGLE_PAD
        if angle >= math.pi / 2:
            return np.ones(svals.size, dtype=bool)
        thr = max(best - fp, 0.0) * math.sqrt(math.cos(angle))
        return svals + fp >= thr

    def _sec_slack(spacing: float) -> float:
        # degree-based certificate: the true peak F of f = |S|^2 sits within
        # spacing/2 of an evaluated point c, and f(c) >= F cos(pi deg spacing),
        # so max |S| <= (best + fp) / sqrt(cos(...))
        angle = math.pi * deg * spacing * _ANGLE_PAD
        if angle >= math.pi / 2 * 0.999:
            return math.inf
        return (best + fp) * (1.0 / math.sqrt(math.cos(angle)) - 1.0)

    def _cert_slack(spacing: float) -> float:
        return min(lip * spacing / 2.0, _sec_slack(spacing))

    brackets = np.nonzero(_keep_mask(s_coarse, h))[0] / m
    pools: list[tuple[np.ndarray, np.ndarray]] = []

    stages = 0
    while _cert_slack(h) > target:
        stages += 1
        if stages > _MAX_STAGES:
            raise RuntimeError("tolerance unachievable under configured grid caps")
        h_new = h / _REFINE
        n_pts = brackets.size * (_REFINE + 1)
        if n_pts > _MAX_STAGE_EVALS:
            raise RuntimeError("tolerance unachievable under configured grid caps")
        offs = (np.arange(_REFINE + 1, dtype=np.float64) - _REFINE // 2) * h_new
        ts = np.unique((brackets[:, None] + offs[None, :]).ravel())
        ss = _batch_abs_s(x, np.mod(ts, 1.0), n)
        best = max(best, float(ss.max()))
        pools.append((np.mod(ts, 1.0), ss))
        brackets = ts[_keep_mask(ss, h_new)]
        h = h_new

    # |S| <= n holds exactly, so the trivial bound also certifies
    value_upper = min(best + fp + _cert_slack(h), float(n))
    window = best - tol / 2.0

    t_star = math.inf
    s_star = 0.0
    idx = np.nonzero(s_coarse >= window)[0]
    if idx.size:
        t_star = idx[0] / m
        s_star = float(s_coarse[idx[0]])
    for ts, ss in pools:
        mask = ss >= window
        if mask.any():
            cand_t = ts[mask]
            j = int(np.argmin(cand_t))
            if cand_t[j] < t_star:
                t_star = float(cand_t[j])
                s_star = float(ss[mask][j])
    value_lower = max(s_star - fp, _EPS)
    return MaximizerResult(t_star=float(t_star), value_lower=value_lower, value_upper=value_upper)


def build_E(n: int) -> list[LowerBoundInterval]:
    """All intervals J(q, a1), q odd with 3 <= q <= sqrt(n)/6, gcd(a1, q) = 1.

    Canonical order (q ascending, a1 ascending).  Pairwise disjointness is
    verified by exact rational comparison of endpoints; gaps of exactly zero
    between closed intervals count as overlap.  Empty for n < 324.
    """
    if not isinstance(n, int) or n < 1:
        raise ValueError("n must be a positive integer")
    out: list[LowerBoundInterval] = []
    q = 3
    while 36 * q * q <= n:
        for a1 in range(1, q + 1):
            if math.gcd(a1, q) == 1:
                base = Fraction(a1, q)
                out.append(
                    LowerBoundInterval(
                        q=q,
                        a1=a1,
                        lo=base + Fraction(15, n),
                        hi=base + Fraction(16, n),
                    )
                )
        q += 2
    by_lo = sorted(out, key=lambda j: j.lo)
    for a, b in zip(by_lo, by_lo[1:]):
        if b.lo <= a.hi:  # closed intervals sharing even a point
            raise RuntimeError(
                f"intervals J({a.q},{a.a1}) and J({b.q},{b.a1}) overlap"
            )
    return out


def e_measure(intervals: Iterable[LowerBoundInterval]) -> Fraction:
    """Total length of the (disjoint) intervals, exact."""
    total = Fraction(0)
    for j in intervals:
        total += j.hi - j.lo
    return total


def _check_membership(x: float, q: int, a1: int, n: int) -> None:
    if not isinstance(n, int) or n < 1:
        raise ValueError("n must be a positive integer")
    if q < 3 or q % 2 == 0 or not 1 <= a1 <= q:
        raise ValueError("need odd q >= 3 and a1 in [1, q]")
    if 36 * q * q > n:
        raise ValueError("q exceeds sqrt(n)/6")
    xf = Fraction(x)
    base = Fraction(a1, q)
    # endpoints are irrational in binary, so admit x within rounding of them
    pad = Fraction(4 * math.ulp(abs(x) + 1.0))
    if not base + Fraction(15, n) - pad <= xf <= base + Fraction(16, n) + pad:
        raise ValueError("x lies outside [a1/q + 15/n, a1/q + 16/n]")


def v_of_x(x: float, q: int, a1: int, n: int) -> float:
    """v(x) = 1/q - beta1/n with beta1 = x - a1/q, for x in J(q, a1)."""
    _check_membership(x, q, a1, n)
    return 1.0 / q - (x - a1 / q) / n


def j_freqs(x: float, q: int, a1: int, n: int) -> FreqPair:
    """The frequency offsets (beta1, beta2) = (x - a1/q, -beta1/n) at x."""
    _check_membership(x, q, a1, n)
    beta1 = x - a1 / q
    return FreqPair(beta1=beta1, beta2=-beta1 / n)


def lower_bound_ratio(n: int, q: int, a1: int, x: float) -> float:
    """|S(x, v(x))| * sqrt(q) / n for x in J(q, a1)."""
    if math.gcd(a1, q) != 1:
        raise ValueError("need gcd(a1, q) = 1")
    v = v_of_x(x, q, a1, n)
    return abs(weyl_sum(x, v % 1.0, n)) * math.sqrt(q) / n


@dataclass(frozen=True)
class JRow:
    q: int
    a1: int
    x: float
    v: float
    abs_s: float
    ratio: float
    abs_i_over_n: float


@dataclass(frozen=True)
class LowerBoundReport:
    n: int
    rows: tuple[JRow, ...]
    measure: Fraction
    c4_min: float
    i_ratio_min: float

    @property
    def count(self) -> int:
        return len(self.rows)


def _sweep_row(args: tuple[int, int, int, float]) -> JRow:
    q, a1, n, x = args
    beta1 = x - a1 / q
    v = 1.0 / q - beta1 / n
    abs_s = abs(weyl_sum(x, v % 1.0, n))
    abs_i = abs(I_beta(FreqPair(beta1=beta1, beta2=-beta1 / n), n))
    return JRow(
        q=q,
        a1=a1,
        x=x,
        v=v,
        abs_s=abs_s,
        ratio=abs_s * math.sqrt(q) / n,
        abs_i_over_n=abs_i / n,
    )


def lower_bound_sweep(
    n: int,
    sample: Optional[int] = None,
    seed: int = 0,
    pmap: Optional[Callable] = None,
) -> LowerBoundReport:
    """Evaluate |S| * sqrt(q) / n at the midpoint of every J(q, a1).

    sample=k restricts to k intervals chosen without replacement (keyed
    counter-based generator, so the choice depends only on seed).  Each row
    also records |I(beta1, -beta1/n)| / n at the midpoint offset.
    """
    intervals = build_E(n)
    if sample is not None:
        if sample < 1:
            raise ValueError("sample must be positive")
        if sample < len(intervals):
            rng = np.random.Generator(np.random.Philox(key=(seed, 0x4A)))
            pick = rng.choice(len(intervals), size=sample, replace=False)
            intervals = [intervals[i] for i in sorted(pick.tolist())]
    args = [(j.q, j.a1, j.n, float(j.midpoint)) for j in intervals]
    mapper = pmap if pmap is not None else map
    rows = tuple(mapper(_sweep_row, args))
    c4 = min((r.ratio for r in rows), default=math.inf)
    imin = min((r.abs_i_over_n for r in rows), default=math.inf)
    return LowerBoundReport(
        n=n,
        rows=rows,
        measure=e_measure(intervals),
        c4_min=c4,
        i_ratio_min=imin,
    )
