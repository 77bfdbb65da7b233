"""Exact integer arithmetic and odd-totient summatory functions.

Everything here is exact integer work: modular inverses, a totient
sieve, and sums of phi over odd arguments that later feed the
lower-bound counting.  Floating point appears only in the residuals
against the smooth main term (2/pi^2) Y^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Sieve memory cap: larger requests are rejected rather than paged.
SIEVE_CAP = 10**8

# 2/pi^2, the density of the odd-totient summatory main term.
ODD_PHI_DENSITY = 2.0 / math.pi**2


@dataclass(frozen=True)
class TotientTable:
    """Immutable table of phi(1)..phi(limit).

    values is 1-indexed: values[y] = phi(y); values[0] is unused and 0.
    """

    limit: int
    values: np.ndarray

    def phi(self, y: int) -> int:
        if not 1 <= y <= self.limit:
            raise ValueError(f"y={y} outside table range 1..{self.limit}")
        return int(self.values[y])


def mod_inverse(a: int, q: int) -> int:
    """Inverse of a modulo q, in [0, q).

    Requires gcd(a, q) = 1.  Returns 0 only for q = 1.
    """
    if q < 1:
        raise ValueError(f"modulus must be positive, got {q}")
    if math.gcd(a, q) != 1:
        raise ValueError(f"{a} is not invertible mod {q} (gcd={math.gcd(a, q)})")
    return pow(a % q, -1, q)


def totient_sieve(limit: int, *, cap: int = SIEVE_CAP) -> TotientTable:
    """phi(1)..phi(limit) by an Euler-product sieve.

    For each prime p, one vectorized pass multiplies the p-divisible
    entries by (1 - 1/p) exactly: phi[m] -= phi[m] // p while phi[m]
    still carries the full factor m on first touch.
    """
    if limit < 1:
        raise ValueError(f"limit must be >= 1, got {limit}")
    if limit > cap:
        raise ValueError(f"limit {limit} exceeds sieve cap {cap}")
    phi = np.arange(limit + 1, dtype=np.int64)
    if limit >= 2:
        for p in range(2, limit + 1):
            if phi[p] == p:  # untouched so far, hence prime
                block = phi[p::p]
                block -= block // p
    phi[0] = 0
    return TotientTable(limit=limit, values=phi)


def odd_phi_sum(Y: int, table: TotientTable | None = None) -> tuple[int, float]:
    """(exact, residual): exact = sum of phi(y) over odd y <= Y.

    residual = exact - (2/pi^2) Y^2.  The residual grows like Y log Y
    with a modest constant; see odd_phi_residual_sup for the measured
    envelope.
    """
    if Y < 2:
        raise ValueError(f"Y must be >= 2, got {Y}")
    if table is None or table.limit < Y:
        table = totient_sieve(Y)
    exact = int(table.values[1 : Y + 1 : 2].sum())
    residual = float(exact - ODD_PHI_DENSITY * Y * Y)
    return exact, residual


def odd_phi_weighted_sum(
    Y: int,
    alpha: float,
    mode: str = "dyadic",
    table: TotientTable | None = None,
) -> float:
    """Weighted odd-totient sums.

    mode="dyadic": sum of phi(y)/y^alpha over odd y with Y/2 < y <= Y.
    mode="full":   sum of phi(y)/y^2 over odd y <= Y (alpha must be 2).
    """
    if Y < 4:
        raise ValueError(f"Y must be >= 4, got {Y}")
    if mode not in ("dyadic", "full"):
        raise ValueError(f"mode must be 'dyadic' or 'full', got {mode!r}")
    if mode == "full" and alpha != 2:
        raise ValueError("full mode is the alpha=2 tail sum; pass alpha=2")
    if table is None or table.limit < Y:
        table = totient_sieve(Y)
    if mode == "dyadic":
        lo = Y // 2 + 1
        ys = np.arange(lo if lo % 2 == 1 else lo + 1, Y + 1, 2, dtype=np.int64)
    else:
        ys = np.arange(1, Y + 1, 2, dtype=np.int64)
    if ys.size == 0:
        return 0.0
    terms = table.values[ys].astype(np.float64) / np.power(ys.astype(np.float64), alpha)
    return math.fsum(terms.tolist())


def odd_phi_residual_sup(ymax: int, table: TotientTable | None = None) -> float:
    """sup of |residual| / (Y ln Y) over dyadic Y = 4, 8, ..., <= ymax.

    The smooth term's error constant is not pinned down analytically
    here; this records the measured envelope instead.
    """
    if ymax < 4:
        raise ValueError(f"ymax must be >= 4, got {ymax}")
    if table is None or table.limit < ymax:
        table = totient_sieve(ymax)
    sup = 0.0
    Y = 4
    ys: list[int] = []
    while Y <= ymax:
        ys.append(Y)
        Y *= 2
    if ys[-1] != ymax:
        ys.append(ymax)
    for Y in ys:
        _, residual = odd_phi_sum(Y, table)
        sup = max(sup, abs(residual) / (Y * math.log(Y)))
    return sup
