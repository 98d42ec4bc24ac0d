"""Shapiro-Wilk normality test (Royston's AS R94 approximation)."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np
from scipy.special import ndtr, ndtri

from ..errors import DegenerateSampleError, SampleSizeError

# Polynomial coefficients from Royston (1995), low order first.
_C1 = (0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056)
_C2 = (0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633)
_SMALL_MU = (0.5440, -0.39978, 0.025054, -0.0006714)
_SMALL_LNSIG = (1.3822, -0.77857, 0.062767, -0.0020322)
_LARGE_MU = (-1.5861, -0.31082, -0.083751, 0.0038915)
_LARGE_LNSIG = (-0.4803, -0.082676, 0.0030302)


def _poly(coefs: Sequence[float], x: float) -> float:
    out = 0.0
    for c in reversed(coefs):
        out = out * x + c
    return out


def shapiro_wilk(sample: Sequence[float]) -> tuple[float, float]:
    """Return (W, p) for 3 <= n <= 5000 non-constant samples.

    W is the squared correlation between the order statistics and Royston's
    approximate normal scores; p comes from the AS R94 transformation of
    1 - W to an approximately standard normal deviate.
    """
    x = np.sort(np.asarray(sample, dtype=float))
    n = int(x.size)
    if n < 3:
        raise SampleSizeError(f"Shapiro-Wilk needs at least 3 observations, got {n}")
    if n > 5000:
        raise SampleSizeError(f"Shapiro-Wilk approximation is valid up to n=5000, got {n}")
    if x[0] == x[-1]:
        raise DegenerateSampleError("sample is constant; W is undefined")

    m = ndtri((np.arange(1, n + 1) - 0.375) / (n + 0.25))
    mm = float(m @ m)
    c = m / math.sqrt(mm)
    u = 1.0 / math.sqrt(n)
    a = np.empty(n)
    if n == 3:
        a[0], a[1], a[2] = -math.sqrt(0.5), 0.0, math.sqrt(0.5)
    else:
        a_n = _poly(_C1, u) + c[-1]
        if n > 5:
            a_n1 = _poly(_C2, u) + c[-2]
            phi = (mm - 2 * m[-1] ** 2 - 2 * m[-2] ** 2) / (1 - 2 * a_n ** 2 - 2 * a_n1 ** 2)
            a[2:-2] = m[2:-2] / math.sqrt(phi)
            a[-2], a[1] = a_n1, -a_n1
        else:
            phi = (mm - 2 * m[-1] ** 2) / (1 - 2 * a_n ** 2)
            a[1:-1] = m[1:-1] / math.sqrt(phi)
        a[-1], a[0] = a_n, -a_n

    centered = x - x.mean()
    w = float(a @ x) ** 2 / float(centered @ centered)
    w = min(w, 1.0)

    if n == 3:
        p = 6.0 / math.pi * (math.asin(math.sqrt(w)) - math.asin(math.sqrt(0.75)))
        return w, float(min(max(p, 0.0), 1.0))
    if n <= 11:
        g = -2.273 + 0.459 * n
        mu = _poly(_SMALL_MU, n)
        sigma = math.exp(_poly(_SMALL_LNSIG, n))
        arg = g - math.log1p(-w)
        if arg <= 0:  # W so close to 1 the transform degenerates
            return w, 1.0
        z = (-math.log(arg) - mu) / sigma
    else:
        ln_n = math.log(n)
        mu = _poly(_LARGE_MU, ln_n)
        sigma = math.exp(_poly(_LARGE_LNSIG, ln_n))
        z = (math.log1p(-w) - mu) / sigma
    return w, float(1.0 - ndtr(z))
