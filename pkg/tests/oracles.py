"""Independent reference implementations used only by the test suite.

Nothing here shares code paths with the package: sums are evaluated
with mpmath extended precision or plain per-term accumulation, and the
oscillatory integral gets its own adaptive panel quadrature.
"""

import math

import mpmath as mp
import numpy as np


def weyl_mp(x, t, N, dps=40):
    """S(x,t) summed term by term at dps digits."""
    with mp.workdps(dps):
        xx = mp.mpf(x)
        tt = mp.mpf(t)
        s = mp.mpc(0)
        for n in range(1, N + 1):
            ph = mp.frac(n * xx) + mp.frac((n * n) * tt)
            s += mp.expjpi(2 * ph)
        return complex(s)


def weyl_np(x, t, N):
    """Plain numpy accumulation, adequate for N^2 t below 2^52."""
    n = np.arange(1, N + 1, dtype=np.float64)
    ph = n * x + (n * n) * t
    ph -= np.rint(ph)
    return complex(np.exp(2j * math.pi * ph).sum())


def gauss_direct_py(q, a1, a2):
    """Complete quadratic sum over y = 1..q with pure-int phases."""
    s = 0j
    for y in range(1, q + 1):
        r = (y * a1 + y * y * a2) % q
        s += complex(mp.expjpi(2 * mp.mpf(r) / q))
    return s


def osc_quad(b1, b2, N, pts=24):
    """integral_0^N e(b1 g + b2 g^2) dg by panel Gauss-Legendre.

    Panels never span more than a quarter period of the local phase;
    the stationary point, if interior, is a panel boundary.
    """
    nodes, wts = np.polynomial.legendre.leggauss(pts)
    breaks = [0.0, float(N)]
    if b2 != 0.0:
        g0 = -b1 / (2.0 * b2)
        if 0.0 < g0 < N:
            breaks.insert(1, g0)
    total = 0j
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        g = lo
        while g < hi:
            rate = abs(b1) + 2.0 * abs(b2) * max(abs(g), abs(hi)) + 1e-30
            w = min(hi - g, 0.25 / rate)
            gm = g + 0.5 * w
            gg = gm + 0.5 * w * nodes
            ph = gg * (b1 + b2 * gg)
            ph -= np.rint(ph)
            total += 0.5 * w * complex(np.exp(2j * math.pi * ph) @ wts)
            g += w
    return total
