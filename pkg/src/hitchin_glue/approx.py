"""Glued approximate metrics, their Hitchin error, and the error's decay in t.

The approximate metric replaces each Toda correction ``u_{K,i,t}`` by
``chi(|z_j|) u_{K,i,t}``.  Its Hitchin error is diagonal with entries

    e_i = -(1/4) Delta(chi u_i) + t^2 r^(2/K) (e^(v_i - v_(i+1)) - e^(v_(i-1) - v_i)),

``v = chi u``, measured against ``dz ^ dzbar``.  It vanishes where
``chi = 1`` (the Toda ODE) and where ``chi = 0``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .cutoff import cutoff_log_derivatives, cutoff_value
from .errors import DegenerateFit, IndexOutOfRange, QuadratureTooCoarse
from .model_metrics import MetricDiag, ModelField, _block_radii, toda_for
from .partition import ClusterPartition
from .toda import TodaSolution, evaluate_rescaled, scale_factor

__all__ = [
    "cutoff_value",
    "approx_metric",
    "approx_field",
    "error_entries",
    "error_entry",
    "QuadratureSpec",
    "error_l2",
    "error_l2_blocks",
    "DecayReport",
    "fit_decay",
    "sweep",
]

TodaMap = Mapping[int, TodaSolution]


def approx_metric(p: ClusterPartition, toda: TodaMap, t: float, z_abs) -> np.ndarray:
    """Diagonal ``|z_j|^(-2 alpha) exp(chi(|z_j|) u_{K,i,t}(|z_j|))``."""
    return MetricDiag.build(p, float(t), cutoff=True).evaluate(_block_radii(p, z_abs), toda)


def approx_field(p: ClusterPartition, toda: TodaMap, t: float) -> ModelField:
    """Unitary pair of the approximate solution (cutoff-damped Toda data)."""
    return ModelField(p, toda, t, cutoff=True)


def error_entries(sol: TodaSolution, t: float, r) -> np.ndarray:
    """All ``K`` diagonal error entries at radii ``r``; shape ``r.shape + (K,)``."""
    K = sol.K
    r = np.asarray(r, dtype=float)
    U = evaluate_rescaled(sol, t, r, 0)
    Us = evaluate_rescaled(sol, t, r, 1)
    Uss = evaluate_rescaled(sol, t, r, 2)
    chi, chi_s, chi_ss = (np.asarray(c)[..., None] for c in cutoff_log_derivatives(r))
    v = chi * U
    v_ss = chi_ss * U + 2.0 * chi_s * Us + chi * Uss
    E = np.exp(v - np.roll(v, -1, axis=-1))
    coupling = t * t * r[..., None] ** (2.0 / K) * (E - np.roll(E, 1, axis=-1))
    return -0.25 * v_ss / r[..., None] ** 2 + coupling


def error_entry(K: int, i: int, t: float, r, toda: TodaMap) -> np.ndarray:
    """The ``(i, i)`` error coefficient for a rank-``K`` block at radius ``r``."""
    if not 1 <= i <= K:
        raise IndexOutOfRange(f"index i={i} outside 1..{K}")
    return error_entries(toda_for(toda, K), t, r)[..., i - 1]


# ---------------------------------------------------------------- L2 norm


@dataclass(frozen=True)
class QuadratureSpec:
    """Composite Gauss-Legendre rule on ``[r_min, 1]``.

    ``inner_panels`` are log-graded on ``[r_min, 1/2]``; ``outer_panels`` are
    uniform on the gluing annulus ``[1/2, 1]``.  Each panel has ``order``
    nodes.
    """

    r_min: float = 1e-4
    inner_panels: int = 16
    outer_panels: int = 16
    order: int = 8
    rel_tol: float = 0.01

    def __post_init__(self):
        if self.outer_panels * self.order < 64:
            raise QuadratureTooCoarse("the gluing annulus needs at least 64 radial nodes")
        if not 0 < self.r_min < 0.5:
            raise QuadratureTooCoarse("r_min must lie in (0, 1/2)")

    def refined(self, factor: int = 2) -> "QuadratureSpec":
        return QuadratureSpec(
            self.r_min, self.inner_panels * factor, self.outer_panels * factor,
            self.order, self.rel_tol,
        )

    def nodes(self, coarsen: int = 1) -> tuple[np.ndarray, np.ndarray]:
        """Radii and weights (``dr`` measure); ``coarsen`` divides the panel counts."""
        x, w = np.polynomial.legendre.leggauss(self.order)
        inner = np.geomspace(self.r_min, 0.5, max(1, self.inner_panels // coarsen) + 1)
        outer = np.linspace(0.5, 1.0, max(1, self.outer_panels // coarsen) + 1)
        edges = np.concatenate([inner[:-1], outer])
        a, b = edges[:-1, None], edges[1:, None]
        r = 0.5 * (b - a) * x + 0.5 * (a + b)
        wt = 0.5 * (b - a) * w
        return r.ravel(), wt.ravel()


def _block_integral(sol: TodaSolution, t: float, r: np.ndarray, w: np.ndarray) -> float:
    e = error_entries(sol, t, r)
    return float(np.sum(w * 2.0 * np.pi * r * np.sum(e * e, axis=-1)))


def error_l2_blocks(
    p: ClusterPartition, toda: TodaMap, t: float, quad: QuadratureSpec | None = None
) -> np.ndarray:
    """Per-block contributions ``2 (sum_i int |e_i|^2 dA)^(1/2)`` over each block's unit disk.

    The factor 2 is ``|dz ^ dzbar|`` in the flat metric.
    """
    quad = quad or QuadratureSpec()
    r, w = quad.nodes()
    rc, wc = quad.nodes(coarsen=2)
    out = np.zeros(len(p.blocks))
    cache: dict[int, float] = {}
    for j, b in enumerate(p.blocks):
        if b.K < 2:
            continue
        if b.K not in cache:
            sol = toda_for(toda, b.K)
            lo = sol.base_radii[0] / scale_factor(b.K, t)
            if lo > quad.r_min:
                raise QuadratureTooCoarse(
                    f"quadrature starts at {quad.r_min} but the Toda grid at t={t} starts at {lo:.3g}"
                )
            fine = _block_integral(sol, t, r, w)
            coarse = _block_integral(sol, t, rc, wc)
            if fine > 0 and abs(fine - coarse) > quad.rel_tol * fine:
                raise QuadratureTooCoarse(
                    f"K={b.K}, t={t}: panel-halving changes the integral by "
                    f"{abs(fine - coarse) / fine:.2%}"
                )
            cache[b.K] = fine
        out[j] = 2.0 * math.sqrt(cache[b.K])
    return out


def error_l2(
    p: ClusterPartition, toda: TodaMap, t: float, quad: QuadratureSpec | None = None
) -> float:
    """L2 norm of the block-diagonal error (root-sum-square of the blocks)."""
    return float(np.sqrt(np.sum(error_l2_blocks(p, toda, t, quad) ** 2)))


# ---------------------------------------------------------------- decay fit


@dataclass
class DecayReport:
    """Least-squares fit ``log(norm) = log(c) - delta t``.

    ``residual`` is the RMS deviation in ``log(norm)``.
    """

    t_values: list[float]
    l2_norms: list[float]
    c: float
    delta: float
    residual: float
    threshold: float = 0.2
    block_norms: list[list[float]] = field(default_factory=list)
    config_hash: str | None = None

    @property
    def passed(self) -> bool:
        return self.delta > 0 and self.residual < self.threshold

    def to_dict(self) -> dict:
        out = asdict(self)
        out["passed"] = self.passed
        return out


def fit_decay(t_values: Sequence[float], norms: Sequence[float], threshold: float = 0.2) -> DecayReport:
    t = np.asarray(t_values, dtype=float)
    y = np.asarray(norms, dtype=float)
    if t.size < 3 or t.size != y.size:
        raise DegenerateFit("need at least three (t, norm) samples of equal length")
    if np.any(~np.isfinite(y)) or np.any(y <= 0):
        raise DegenerateFit("norms must be positive and finite")
    if np.ptp(t) == 0:
        raise DegenerateFit("t values must not all coincide")
    slope, intercept = np.polyfit(t, np.log(y), 1)
    resid = np.log(y) - (intercept + slope * t)
    return DecayReport(
        t.tolist(), y.tolist(), float(math.exp(intercept)), float(-slope),
        float(np.sqrt(np.mean(resid**2))), threshold,
    )


def sweep(
    p: ClusterPartition,
    toda: TodaMap,
    t_values: Sequence[float],
    quad: QuadratureSpec | None = None,
    threshold: float = 0.2,
) -> DecayReport:
    """Evaluate :func:`error_l2` over ``t_values`` and fit the decay."""
    blocks = [error_l2_blocks(p, toda, t, quad) for t in t_values]
    norms = [float(np.sqrt(np.sum(b**2))) for b in blocks]
    report = fit_decay(t_values, norms, threshold)
    report.block_norms = [b.tolist() for b in blocks]
    return report
