"""Complete quadratic Gauss sums S(q, a1, a2) = sum_{y=1}^q e((y a1 + y^2 a2)/q).

Direct evaluation uses exact integer phases and a per-q table of roots
of unity; no recurrence, no incremental error.  The closed form covers
exactly the case it is justified for (odd q, a2 = 1, gcd(a1, q) = 1);
everything else routes to the direct sum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .arith import mod_inverse

TWO_PI = 2.0 * math.pi

# direct evaluation is O(q) time and memory; refuse absurd q
Q_CAP = 10**7


@dataclass(frozen=True)
class GaussSpec:
    """Parameters (q, a1, a2) with residues stored in [0, q)."""

    q: int
    a1: int
    a2: int

    def __post_init__(self) -> None:
        if self.q < 1:
            raise ValueError(f"q must be >= 1, got {self.q}")
        if not 0 <= self.a1 < self.q:
            raise ValueError(f"a1 must lie in [0, q), got {self.a1}")
        if not 0 <= self.a2 < self.q:
            raise ValueError(f"a2 must lie in [0, q), got {self.a2}")

    @property
    def primitive(self) -> bool:
        return math.gcd(self.q, self.a1, self.a2) == 1


def _roots(q: int) -> np.ndarray:
    return np.exp((TWO_PI * 1j) * (np.arange(q) / q))


def gauss_sum_direct(spec: GaussSpec) -> complex:
    """Direct sum with exact integer phase reduction."""
    q, a1, a2 = spec.q, spec.a1, spec.a2
    if q > Q_CAP:
        raise ValueError(f"q={q} exceeds direct-sum cap {Q_CAP}")
    y = np.arange(1, q + 1, dtype=np.int64)
    r = (y * a1 % q + (y * y % q) * a2 % q) % q
    z = _roots(q)[r]
    return complex(math.fsum(z.real.tolist()), math.fsum(z.imag.tolist()))


def gauss_sum_closed(q: int, a1: int) -> complex:
    """Closed evaluation for odd q with gcd(a1, q) = 1, a2 = 1.

    With w = mod_inverse(4, q):
        S = e(-w a1^2 / q) * sqrt(q)        q = 1 mod 4
        S = e(-w a1^2 / q) * i * sqrt(q)    q = 3 mod 4
    """
    if q < 1 or q % 2 == 0:
        raise ValueError(f"closed form needs odd q >= 1, got {q}")
    if math.gcd(a1, q) != 1:
        raise ValueError(f"need gcd(a1, q) = 1, got a1={a1}, q={q}")
    w = mod_inverse(4, q)
    ph = (-(w * a1 * a1)) % q
    val = np.exp((TWO_PI * 1j) * (ph / q)) * math.sqrt(q)
    if q % 4 == 3:
        val *= 1j
    return complex(val)


def gauss_sum_direct_all_a1(q: int, a2: int) -> np.ndarray:
    """S(q, a1, a2) for every a1 = 0..q-1 at once.

    With c_y = e(y^2 a2 / q) the sum over y is the a1-th entry of an
    inverse DFT of c, scaled by q.
    """
    if not 1 <= q <= Q_CAP:
        raise ValueError(f"q out of range: {q}")
    y = np.arange(q, dtype=np.int64)
    c = _roots(q)[(y * y % q) * (a2 % q) % q]
    return q * np.fft.ifft(c)


def gauss_ratio_scan(Qmax: int) -> tuple[float, GaussSpec]:
    """max of |S(q, a1, a2)| / sqrt(q) over q <= Qmax, gcd(q, a1, a2) = 1.

    Ties resolve to the smallest q, then a1, then a2, so the scan result
    is independent of evaluation order.  The classical square-root bound
    makes the expected answer sqrt(2), first attained at (2, 1, 1).
    """
    if not 1 <= Qmax <= 2000:
        raise ValueError(f"Qmax must be in 1..2000, got {Qmax}")
    best_ratio = -1.0
    best = GaussSpec(1, 0, 0)
    for q in range(1, Qmax + 1):
        y = np.arange(q, dtype=np.int64)
        a2s = np.arange(q if q > 1 else 1, dtype=np.int64)
        # rows: a2; columns: y phase table, then FFT along y
        ph = (y * y % q)[None, :] * a2s[:, None] % q
        s_mat = q * np.fft.ifft(_roots(q)[ph], axis=1)  # [a2, a1]
        ratio = np.abs(s_mat).T / math.sqrt(q)  # [a1, a2]
        a1g = np.gcd(np.arange(q if q > 1 else 1)[:, None], q)
        a2g = np.gcd(a2s[None, :], q)
        mask = np.gcd(np.gcd(a1g, a2g), q) == 1
        ratio = np.where(mask, ratio, -np.inf)
        flat = int(np.argmax(ratio))  # first max in (a1, a2) lexicographic order
        r = float(ratio.flat[flat])
        if r > best_ratio:
            a1, a2 = divmod(flat, ratio.shape[1])
            best_ratio = r
            best = GaussSpec(q, int(a1), int(a2))
    return best_ratio, best


def closed_direct_deviation(qmax: int) -> float:
    """sup over odd q <= qmax and coprime a1 of |closed - direct| / sqrt(q).

    Exhaustive cross-check of the two routes; the direct route is the
    oracle (exact phases), the closed route is the formula under test.
    """
    worst = 0.0
    for q in range(1, qmax + 1, 2):
        s_all = gauss_sum_direct_all_a1(q, 1)
        w = mod_inverse(4, q)
        a1 = np.arange(q if q > 1 else 1, dtype=np.int64)
        coprime = np.gcd(a1, q) == 1
        ph = (-(w * a1 * a1)) % q
        closed = np.exp((TWO_PI * 1j) * (ph / q)) * math.sqrt(q)
        if q % 4 == 3:
            closed = closed * 1j
        dev = np.abs(closed - s_all)[coprime].max() / math.sqrt(q)
        worst = max(worst, float(dev))
    return worst
