"""Rational anchors and the major-arc approximation S ~ q^{-1} S(q,a) I(beta).

An anchor is a primitive triple (q, a1, a2) with x near a1/q and t near
a2/q.  Around it the sum factors into a complete Gauss sum times the
oscillatory integral at the offset frequencies, up to a remainder Delta
that stays O(q (1 + |b1| N + |b2| N^2)).  This module measures Delta,
searches for anchors, and runs the sampling experiment that checks
points with large |S| really do admit anchors in the stated windows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gauss import GaussSpec, gauss_sum_direct
from .oscillatory import FreqPair, I_beta
from .weyl import weyl_sum


@dataclass(frozen=True)
class RationalApprox:
    """Anchor (q, a1, a2) with offsets beta1 = x - a1/q, beta2 = t - a2/q.

    The triple is primitive jointly: gcd(q, a1, a2) = 1 (a1/q itself
    may be reducible, e.g. 3/6; the Gauss-sum factorization only needs
    the joint condition).  Anchors produced by the nearest-integer
    search also satisfy |beta1|, |beta2| <= 1/(2q).
    """

    q: int
    a1: int
    a2: int
    beta1: float
    beta2: float

    def __post_init__(self) -> None:
        if self.q < 1:
            raise ValueError(f"q must be positive, got {self.q}")
        if math.gcd(self.q, self.a1, self.a2) != 1:
            raise ValueError(
                f"anchor ({self.q}, {self.a1}, {self.a2}) is not primitive"
            )
        if not (math.isfinite(self.beta1) and math.isfinite(self.beta2)):
            raise ValueError("offsets must be finite")


@dataclass(frozen=True)
class ApproxResult:
    """Measured decomposition truth = approx + delta at one point."""

    approx: complex
    truth: complex
    delta: complex
    delta_budget: float


def approx_weyl(x: float, t: float, N: int, anchor: RationalApprox) -> ApproxResult:
    """Evaluate truth = S(x,t), approx = q^{-1} S(q,a) I(beta), delta.

    The anchor must be consistent: beta1 = x - a1/q and beta2 = t - a2/q
    to within 1e-15 (absolute).
    """
    q = anchor.q
    if abs((x - anchor.a1 / q) - anchor.beta1) > 1e-15:
        raise ValueError("anchor inconsistent with x")
    if abs((t - anchor.a2 / q) - anchor.beta2) > 1e-15:
        raise ValueError("anchor inconsistent with t")
    truth = weyl_sum(x % 1.0, t % 1.0, N)
    gauss = gauss_sum_direct(GaussSpec(q, anchor.a1 % q, anchor.a2 % q))
    integral = I_beta(FreqPair(anchor.beta1, anchor.beta2), N)
    approx = gauss * integral / q
    Nf = float(N)
    budget = q * (1.0 + abs(anchor.beta1) * Nf + abs(anchor.beta2) * Nf * Nf)
    return ApproxResult(
        approx=approx, truth=truth, delta=truth - approx, delta_budget=budget
    )


def find_rational_approx(
    x: float, t: float, Qmax: int, eps1: float, eps2: float
) -> RationalApprox | None:
    """Smallest q <= Qmax with ||q x|| <= eps1 and ||q t|| <= eps2.

    a1, a2 are the nearest integers to q x, q t.  The returned triple is
    automatically primitive: a common divisor d of (q, a1, a2) would
    make q/d a smaller solution (|q x/d - a1/d| = ||q x||/d), beating
    minimality.  Returns None when no q qualifies.
    """
    if Qmax < 1:
        raise ValueError(f"Qmax must be >= 1, got {Qmax}")
    if not (eps1 > 0 and eps2 > 0):
        raise ValueError("eps1, eps2 must be positive")
    for q in range(1, Qmax + 1):
        qx = q * x
        a1 = round(qx)
        if abs(qx - a1) > eps1:
            continue
        qt = q * t
        a2 = round(qt)
        if abs(qt - a2) > eps2:
            continue
        g = math.gcd(q, a1, a2)  # 1 by the minimality argument above
        q, a1, a2 = q // g, a1 // g, a2 // g
        return RationalApprox(q, a1, a2, x - a1 / q, t - a2 / q)
    return None


@dataclass(frozen=True)
class ExperimentRow:
    """One kept sample: where it was, its anchor, and its Delta ratio."""

    index: int
    x: float
    t: float
    abs_s: float
    found: bool
    q: int
    a1: int
    a2: int
    beta1: float
    beta2: float
    abs_delta: float
    delta_budget: float
    ratio: float


@dataclass(frozen=True)
class ExperimentReport:
    n: int
    p_threshold: float
    c_const: float
    qmax: int
    eps1: float
    eps2: float
    sampler: str
    raw_draws: int
    kept: int
    successes: int
    rows: tuple[ExperimentRow, ...]

    @property
    def success_rate(self) -> float:
        return self.successes / self.kept if self.kept else 0.0


def _propose(rng: np.random.Generator, N: int, P: float, sampler: str) -> tuple[float, float]:
    if sampler == "uniform":
        return float(rng.random()), float(rng.random())
    # importance proposal: a primitive rational center with q small
    # enough that N/sqrt(q) can clear P, plus offsets within a few
    # units of 1/N, 1/N^2 so the oscillatory factor stays large
    qtop = max(1, min(int((N / P) ** 2), int(math.isqrt(N))))
    while True:
        q = int(rng.integers(1, qtop + 1))
        a1 = int(rng.integers(0, q))
        a2 = int(rng.integers(0, q))
        if math.gcd(q, a1, a2) == 1:
            break
    s1 = 6.0 * rng.random() - 3.0
    s2 = 6.0 * rng.random() - 3.0
    x = (a1 / q + s1 / N) % 1.0
    t = (a2 / q + s2 / (N * N)) % 1.0
    return x, t


def anchor_experiment(
    N: int,
    P: float,
    samples: int,
    seed: int,
    C: float = 10.0,
    sampler: str = "major-arc",
    max_draw_factor: int = 1000,
) -> ExperimentReport:
    """Sample (x,t), keep |S| >= P, and hunt anchors in the scaled windows.

    Window sizes: with W = C (N/P)^2 N^{0.01}, the search runs over
    q <= floor(W) with ||q x|| <= W/N and ||q t|| <= W/N^2.  Draws are
    keyed per (seed, index), evaluated in index order, and stop once
    `samples` points were kept (or after max_draw_factor * samples raw
    draws, whichever is first; the uniform sampler at thresholds well
    above sqrt(N) keeps essentially nothing).
    """
    if not 1 <= N <= 10**5:
        raise ValueError(f"N must be in 1..1e5, got {N}")
    if P < math.sqrt(N):
        raise ValueError(f"threshold P={P} below sqrt(N); everything qualifies")
    if sampler not in ("major-arc", "uniform"):
        raise ValueError(f"unknown sampler {sampler!r}")
    W = C * (N / P) ** 2 * N**0.01
    qmax = max(1, int(W))
    eps1 = W / N
    eps2 = W / (N * N)
    rows: list[ExperimentRow] = []
    successes = 0
    raw = 0
    while len(rows) < samples and raw < max_draw_factor * samples:
        rng = np.random.Generator(np.random.Philox(key=(seed, raw)))
        x, t = _propose(rng, N, P, sampler)
        raw += 1
        abs_s = abs(weyl_sum(x, t, N))
        if abs_s < P:
            continue
        anchor = find_rational_approx(x, t, qmax, eps1, eps2)
        if anchor is None:
            rows.append(
                ExperimentRow(
                    index=raw - 1, x=x, t=t, abs_s=abs_s, found=False,
                    q=0, a1=0, a2=0, beta1=0.0, beta2=0.0,
                    abs_delta=0.0, delta_budget=0.0, ratio=0.0,
                )
            )
            continue
        successes += 1
        res = approx_weyl(x, t, N, anchor)
        rows.append(
            ExperimentRow(
                index=raw - 1, x=x, t=t, abs_s=abs_s, found=True,
                q=anchor.q, a1=anchor.a1, a2=anchor.a2,
                beta1=anchor.beta1, beta2=anchor.beta2,
                abs_delta=abs(res.delta), delta_budget=res.delta_budget,
                ratio=abs(res.delta) / res.delta_budget,
            )
        )
    return ExperimentReport(
        n=N, p_threshold=P, c_const=C, qmax=qmax, eps1=eps1, eps2=eps2,
        sampler=sampler, raw_draws=raw, kept=len(rows), successes=successes,
        rows=tuple(rows),
    )


def approx_error_sweep(
    N: int = 10**4,
    qmax: int = 20,
    count: int = 1000,
    seed: int = 0,
    eps_exp: float = 0.01,
    pmap=None,
) -> tuple[float, list[tuple[int, float, float, float, float]]]:
    """max of |delta| / delta_budget over anchored points in the
    major-arc offset windows |b1| <= N^eps / (q sqrt(N)),
    |b2| <= N^eps / (q N^{3/2}).

    Returns (max_ratio, rows), rows = (q, beta1, beta2, abs_delta, ratio)
    in sample order.
    """
    cases = []
    for idx in range(count):
        rng = np.random.Generator(np.random.Philox(key=(seed, idx)))
        while True:
            q = int(rng.integers(1, qmax + 1))
            a1 = int(rng.integers(0, q))
            a2 = int(rng.integers(0, q))
            if math.gcd(q, a1, a2) == 1:
                break
        scale = N**eps_exp
        b1 = (2.0 * rng.random() - 1.0) * scale / (q * math.sqrt(N))
        b2 = (2.0 * rng.random() - 1.0) * scale / (q * N**1.5)
        cases.append((N, q, a1, a2, b1, b2))
    mapper = pmap if pmap is not None else lambda f, xs: [f(v) for v in xs]
    vals = mapper(_sweep_case, cases)
    rows = [
        (q, b1, b2, ad, r)
        for (N_, q, a1, a2, b1, b2), (ad, r) in zip(cases, vals)
    ]
    return max(r[4] for r in rows), rows


def _sweep_case(case: tuple[int, int, int, int, float, float]) -> tuple[float, float]:
    N, q, a1, a2, b1, b2 = case
    x = a1 / q + b1
    t = a2 / q + b2
    anchor = RationalApprox(q, a1, a2, x - a1 / q, t - a2 / q)
    res = approx_weyl(x, t, N, anchor)
    return abs(res.delta), abs(res.delta) / res.delta_budget


def exact_divisor_check(N: int, qmax: int = 20) -> float:
    """max |delta| over anchors with q | N, beta = 0, all primitive (a1, a2).

    Complete-sum periodicity collapses S(a1/q, a2/q, N) to (N/q) S(q,a),
    so delta is pure rounding; the caller asserts it below 1e-8 N.
    """
    worst = 0.0
    for q in range(1, qmax + 1):
        if N % q:
            continue
        for a1 in range(q):
            for a2 in range(q):
                if math.gcd(q, a1, a2) != 1:
                    continue
                x = a1 / q
                t = a2 / q
                anchor = RationalApprox(q, a1, a2, x - a1 / q, t - a2 / q)
                res = approx_weyl(x, t, N, anchor)
                worst = max(worst, abs(res.delta))
    return worst
