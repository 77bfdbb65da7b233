"""Quadratic exponential sums S(x,t) = sum_{n=1}^N e(nx + n^2 t).

Three evaluation routes with different accuracy/speed trade-offs:

* weyl_sum: compensated floating evaluation for arbitrary reals.  The
  phase n^2 t can reach 10^12 before reduction, so n*x and n^2*t are
  formed as two-term extended-precision products (Dekker splitting) and
  reduced mod 1 term by term; the reduced phase keeps full double
  precision for all N up to 2^31.
* weyl_sum_exact_grid: exact integer phases on rational grids.  The
  only rounding is the final division and the trig call, at most a few
  ulp per term.
* batch_weyl_over_x: all of S(j/M, t), j = 0..M-1, in one FFT of the
  M-folded coefficient vector c_n = e(n^2 t).

All routes are pure; batch results are independent of any caller-side
parallel split.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi
N_MAX = 1 << 31
_SPLIT = 134217729.0  # 2**27 + 1, Dekker splitting constant
_CHUNK = 1 << 19


@dataclass(frozen=True)
class RationalGridPoint:
    """num/den in [0,1) held exactly."""

    num: int
    den: int

    def __post_init__(self) -> None:
        if self.den < 1:
            raise ValueError(f"denominator must be positive, got {self.den}")
        if not 0 <= self.num < self.den:
            raise ValueError(f"need 0 <= num < den, got {self.num}/{self.den}")

    def __float__(self) -> float:
        return self.num / self.den


def _check_n(N: int) -> None:
    if not 1 <= N <= N_MAX:
        raise ValueError(f"N must be in 1..2^31, got {N}")


def _two_prod(a: np.ndarray, b: float) -> tuple[np.ndarray, np.ndarray]:
    """(p, e) with p = fl(a*b) and p + e = a*b exactly."""
    p = a * b
    ah = a * _SPLIT
    ah = ah - (ah - a)
    al = a - ah
    bh = b * _SPLIT
    bh = bh - (bh - b)
    bl = b - bh
    e = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, e


def _phase_mod1(n: np.ndarray, x: float, t: float) -> np.ndarray:
    """Reduced phase of e(nx + n^2 t) in [-1/2, 1/2], full precision.

    Each product is split into (rounded, residue); fractional parts are
    taken before the pieces are recombined, so nothing large ever meets
    anything small.  For n <= 2^26 the square n^2 is exact and the slow
    residue path contributes nothing.
    """
    px, ex = _two_prod(n, x)
    sq_hi, sq_lo = _two_prod(n, n)  # n^2 = sq_hi + sq_lo exactly
    pt, et = _two_prod(sq_hi, t)
    pt2 = sq_lo * t
    r = (px - np.rint(px)) + (pt - np.rint(pt))
    r += et - np.rint(et)
    r += pt2 - np.rint(pt2)
    r += ex
    r -= np.rint(r)
    return r


def weyl_sum(x: float, t: float, N: int) -> complex:
    """S(x,t) = sum_{n=1}^N e(nx + n^2 t).

    Inputs are reduced mod 1 (the sum has period 1 in each argument).
    Absolute error is a few units of N*1e-16, far inside the 1e-8 * N
    contract for N <= 10^6.
    """
    _check_n(N)
    x = float(x)
    t = float(t)
    if not (math.isfinite(x) and math.isfinite(t)):
        raise ValueError("x and t must be finite")
    x %= 1.0
    t %= 1.0
    total = 0.0 + 0.0j
    for start in range(1, N + 1, _CHUNK):
        stop = min(start + _CHUNK, N + 1)
        n = np.arange(start, stop, dtype=np.float64)
        ph = _phase_mod1(n, x, t)
        z = np.exp((TWO_PI * 1j) * ph)
        total += complex(z.sum())
    return total


def weyl_t_derivative(x: float, t: float, N: int) -> complex:
    """dS/dt = 2 pi i sum n^2 e(nx + n^2 t)."""
    _check_n(N)
    x = float(x) % 1.0
    t = float(t) % 1.0
    total = 0.0 + 0.0j
    for start in range(1, N + 1, _CHUNK):
        stop = min(start + _CHUNK, N + 1)
        n = np.arange(start, stop, dtype=np.float64)
        ph = _phase_mod1(n, x, t)
        z = np.exp((TWO_PI * 1j) * ph)
        total += complex((n * n * z).sum())
    return (TWO_PI * 1j) * total


def t_lipschitz_bound(N: int) -> float:
    """Global bound on |dS/dt|: 2 pi N(N+1)(2N+1)/6."""
    return TWO_PI * N * (N + 1) * (2 * N + 1) / 6.0


def x_lipschitz_bound(N: int) -> float:
    """Global bound on |dS/dx|: 2 pi N(N+1)/2."""
    return math.pi * N * (N + 1)


def _exact_phases(xp: RationalGridPoint, tp: RationalGridPoint, N: int) -> tuple[np.ndarray, int]:
    """Integer phases p_n with nx + n^2 t = p_n / D mod 1, D = den_x * den_t."""
    D = xp.den * tp.den
    if D >= 1 << 63:
        raise ValueError(f"combined denominator {D} does not fit in 64 bits")
    A = (xp.num * tp.den) % D
    B = (tp.num * xp.den) % D
    if D <= 1 << 31:
        # vector path: every intermediate below stays under 2^62
        n = np.arange(1, N + 1, dtype=np.int64) % D
        ph = (n * A % D + (n * n % D) * B % D) % D
        return ph, D
    # wide denominators: exact increment p_{n+1} - p_n = A + (2n+1) B
    out = np.empty(N, dtype=np.float64)
    p = 0
    step = (A + B) % D
    inc2 = (2 * B) % D
    for i in range(N):
        p = (p + step) % D
        out[i] = p / D
        step = (step + inc2) % D
    return out, 0  # already divided


def weyl_sum_exact_grid(xp: RationalGridPoint, tp: RationalGridPoint, N: int) -> complex:
    """S on an exact rational grid point, phases reduced in integers.

    Result differs from the infinite-precision value only by the final
    division and trig rounding, compensated in the accumulation.
    """
    _check_n(N)
    ph, D = _exact_phases(xp, tp, N)
    frac = ph / D if D else ph
    z = np.exp((TWO_PI * 1j) * frac)
    return complex(math.fsum(z.real.tolist()), math.fsum(z.imag.tolist()))


def quadratic_coeffs_exact(tp: RationalGridPoint, N: int) -> np.ndarray:
    """c_n = e(n^2 t) for n = 1..N at exact rational t."""
    _check_n(N)
    q = tp.den
    if q <= 1 << 31:
        n = np.arange(1, N + 1, dtype=np.int64) % q
        ph = (n * n % q) * (tp.num % q) % q
        return np.exp((TWO_PI * 1j) * (ph / q))
    zero = RationalGridPoint(0, 1)
    ph, D = _exact_phases(zero, tp, N)
    frac = ph / D if D else ph
    return np.exp((TWO_PI * 1j) * frac)


def batch_weyl_over_x(
    tp: RationalGridPoint, N: int, M: int, path: str = "fft"
) -> np.ndarray:
    """S(j/M, t) for j = 0..M-1 as a length-M complex array.

    fft path: fold c_n = e(n^2 t) into an M-periodic buffer and take one
    inverse FFT (entry j collects sum_n c_n e(nj/M)).  naive path: direct
    accumulation, kept as a bit-for-bit comparable reference.
    """
    _check_n(N)
    if M < 1:
        raise ValueError(f"M must be >= 1, got {M}")
    c = quadratic_coeffs_exact(tp, N)
    if path == "fft":
        idx = np.arange(1, N + 1, dtype=np.int64) % M
        buf = np.bincount(idx, weights=c.real, minlength=M) + 1j * np.bincount(
            idx, weights=c.imag, minlength=M
        )
        return M * np.fft.ifft(buf)
    if path == "naive":
        out = np.zeros(M, dtype=np.complex128)
        j = np.arange(M)
        roots = np.exp((TWO_PI * 1j) * (j / M))
        for i, n in enumerate(range(1, N + 1)):
            out += c[i] * roots[(n * j) % M]
        return out
    raise ValueError(f"path must be 'fft' or 'naive', got {path!r}")
