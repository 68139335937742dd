"""Gluing cutoff: 1 on [0, 1/2], 0 on [1, inf), quintic smoothstep between."""

from __future__ import annotations

import numpy as np

INNER = 0.5
OUTER = 1.0


def cutoff_value(r):
    """Return ``(chi, chi', chi'')`` at ``r`` (scalars or arrays).

    ``chi = 1 - S(2r - 1)`` on [1/2, 1] with ``S(x) = 6x^5 - 15x^4 + 10x^3``;
    first and second derivatives vanish at both seams.
    """
    r = np.asarray(r, dtype=float)
    x = np.clip(2.0 * r - 1.0, 0.0, 1.0)
    inside = (r > INNER) & (r < OUTER)
    S = x**3 * (10.0 - 15.0 * x + 6.0 * x * x)
    dS = 30.0 * x * x * (1.0 - x) ** 2
    d2S = 60.0 * x * (1.0 - x) * (1.0 - 2.0 * x)
    chi = 1.0 - S
    d1 = np.where(inside, -2.0 * dS, 0.0)
    d2 = np.where(inside, -4.0 * d2S, 0.0)
    if chi.ndim == 0:
        return float(chi), float(d1), float(d2)
    return chi, d1, d2


def cutoff_log_derivatives(r):
    """``(chi, r chi', (r d/dr)^2 chi)`` for products with log-derivatives."""
    chi, d1, d2 = cutoff_value(r)
    r = np.asarray(r, dtype=float)
    return chi, r * d1, r * r * d2 + r * d1
