"""Limiting and model metrics, and the unitary-gauge model pair (A, Phi).

Conventions.  Every cluster block ``j`` lives in its own coordinate
``z_j = f_j'(0) z``.  Metrics are diagonal with entry
``|z_j|^(-2 alpha_i) exp(w u_{K,i,t}(|z_j|))`` where ``w`` is 1 for the model
metric, 0 for the limiting metric and the cutoff ``chi(|z_j|)`` for the
approximate metric.  In unitary gauge the connection is
``A = diag(a_i) (dz/z - dzbar/zbar)`` with ``a_i = -alpha_i/2 + (r d/dr)(w u_i)/4``
and the Higgs field ``Phi`` (stored without its factor ``t``) has the cyclic
pattern ``|z_j|^(1/K) e^((v_i - v_(i+1))/2)`` on the superdiagonal and
``z_j |z_j|^(-(K-1)/K) e^((v_K - v_1)/2)`` in the corner, scaled by
``f_j'(0)`` (since ``dz_j = f_j'(0) dz``), plus ``lambda_(j) Id``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

import numpy as np

from .cutoff import cutoff_log_derivatives
from .errors import (
    BelowGrid,
    MissingTodaSolution,
    OriginSingularity,
    StencilOutOfDomain,
    ZeroRadius,
)
from .partition import ClusterPartition, alpha, alpha_table
from .toda import TodaSolution, evaluate_rescaled

__all__ = [
    "alpha",
    "MetricEntry",
    "MetricDiag",
    "limiting_metric",
    "model_metric",
    "FieldSample",
    "ModelField",
    "model_field",
    "model_unitary_pair",
    "hitchin_residual_model",
    "hitchin_residual",
]

TodaMap = Mapping[int, TodaSolution]


def toda_for(toda: TodaMap, K: int) -> TodaSolution:
    try:
        sol = toda[K]
    except KeyError:
        raise MissingTodaSolution(f"no Toda solution supplied for K = {K}") from None
    if sol.K != K:
        raise MissingTodaSolution(f"solution stored under K = {K} has rank {sol.K}")
    return sol


def _block_radii(p: ClusterPartition, z_abs) -> np.ndarray:
    radii = np.broadcast_to(np.asarray(z_abs, dtype=float), (len(p.blocks),)).copy()
    for b, r in zip(p.blocks, radii):
        if b.K >= 2 and not r > 0:
            raise ZeroRadius(f"metric is singular at |z_j| = {r} for a K = {b.K} block")
    return radii


# ---------------------------------------------------------------- metrics


@dataclass(frozen=True)
class MetricEntry:
    alpha: Fraction
    toda_index: tuple[int, int] | None
    block: int


@dataclass(frozen=True)
class MetricDiag:
    """Diagonal hermitian metric described entry by entry.

    ``t is None`` marks the limiting metric.  ``cutoff_applied`` damps the
    Toda correction by ``chi(|z_j|)``.
    """

    entries: tuple[MetricEntry, ...]
    t: float | None
    cutoff_applied: bool = False

    @classmethod
    def build(cls, p: ClusterPartition, t: float | None, cutoff: bool = False) -> "MetricDiag":
        entries = []
        for j, b in enumerate(p.blocks):
            for i, a in enumerate(alpha_table(b.K), start=1):
                ref = (b.K, i) if (b.K >= 2 and t is not None) else None
                entries.append(MetricEntry(a, ref, j))
        return cls(tuple(entries), t, cutoff)

    def block_alpha_sums(self) -> dict[int, Fraction]:
        out: dict[int, Fraction] = {}
        for e in self.entries:
            out[e.block] = out.get(e.block, Fraction(0)) + e.alpha
        return out

    def log_entries(self, radii, toda: TodaMap | None = None) -> np.ndarray:
        """``log`` of each diagonal entry given one radius per block."""
        radii = np.asarray(radii, dtype=float)
        out = np.zeros(len(self.entries))
        cache: dict[tuple[int, int], np.ndarray] = {}
        for k, e in enumerate(self.entries):
            r = radii[e.block]
            if e.toda_index is None:
                if e.alpha != 0:
                    out[k] = -2.0 * float(e.alpha) * np.log(r)
                continue
            K, i = e.toda_index
            key = (K, e.block)
            if key not in cache:
                cache[key] = evaluate_rescaled(toda_for(toda or {}, K), self.t, r)
            w = cutoff_log_derivatives(r)[0] if self.cutoff_applied else 1.0
            out[k] = -2.0 * float(e.alpha) * np.log(r) + w * cache[key][i - 1]
        return out

    def evaluate(self, radii, toda: TodaMap | None = None) -> np.ndarray:
        return np.exp(self.log_entries(radii, toda))


def limiting_metric(p: ClusterPartition, z_abs) -> np.ndarray:
    """Diagonal of the limiting metric: ``|z_j|^(-2 alpha_(K_j,i))``."""
    return MetricDiag.build(p, None).evaluate(_block_radii(p, z_abs))


def model_metric(p: ClusterPartition, toda: TodaMap, t: float, z_abs) -> np.ndarray:
    """Diagonal of the model metric ``|z_j|^(-2 alpha) exp(u_{K,i,t}(|z_j|))``."""
    return MetricDiag.build(p, float(t)).evaluate(_block_radii(p, z_abs), toda)


# ---------------------------------------------------------------- fields


@dataclass(frozen=True, eq=False)
class FieldSample:
    """Pair (A, Phi) at one point.

    ``A_z`` and ``A_zbar`` are the ``dz`` and ``dzbar`` coefficients of
    the connection; ``Phi`` is the ``dz`` coefficient of the Higgs field
    before multiplication by ``t``.
    """

    z: complex
    t: float
    A_z: np.ndarray
    A_zbar: np.ndarray
    Phi: np.ndarray

    @property
    def connection_diagonal(self) -> np.ndarray:
        """Real ``a_i`` with ``A = diag(a) (dz/z - dzbar/zbar)``."""
        return np.real(np.diag(self.A_z) * self.z)

    @property
    def higgs(self) -> np.ndarray:
        return self.t * self.Phi


class ModelField:
    """Model (or, with ``cutoff=True``, approximate) unitary pair at parameter ``t``."""

    def __init__(self, p: ClusterPartition, toda: TodaMap, t: float, cutoff: bool = False):
        if not t > 0:
            raise ValueError("t must be positive")
        self.partition = p
        self.t = float(t)
        self.cutoff = cutoff
        self._sols = {K: toda_for(toda, K) for K in p.toda_ranks}
        self._alphas = [np.array([float(a) for a in alpha_table(b.K)]) for b in p.blocks]

    def _block_profile(self, j: int, r: np.ndarray):
        """``v = w u`` and ``v_s = (r d/dr) v`` for block ``j`` at radii ``r``."""
        b = self.partition.blocks[j]
        sol = self._sols[b.K]
        U = evaluate_rescaled(sol, self.t, r, 0)
        Us = evaluate_rescaled(sol, self.t, r, 1)
        if not self.cutoff:
            return U, Us
        chi, rchi, _ = cutoff_log_derivatives(r)
        chi = np.asarray(chi)[..., None]
        rchi = np.asarray(rchi)[..., None]
        return chi * U, rchi * U + chi * Us

    def _check_origin(self, z: np.ndarray):
        if np.any(z == 0) and any(b.K >= 2 for b in self.partition.blocks):
            raise OriginSingularity("the model pair is singular at z = 0")

    def evaluate(self, z) -> tuple[np.ndarray, np.ndarray]:
        """Connection diagonal ``a`` (shape ``z.shape + (n,)``) and ``Phi`` (``+ (n, n)``)."""
        z = np.asarray(z, dtype=complex)
        self._check_origin(z)
        n = self.partition.n
        a = np.zeros(z.shape + (n,))
        phi = np.zeros(z.shape + (n, n), dtype=complex)
        off = 0
        for j, b in enumerate(self.partition.blocks):
            K = b.K
            sl = slice(off, off + K)
            idx = np.arange(off, off + K)
            phi[..., idx, idx] = b.shift
            if K >= 2:
                zj = b.f_prime0 * z
                r = np.abs(zj)
                v, vs = self._block_profile(j, r)
                a[..., sl] = -0.5 * self._alphas[j] + 0.25 * vs
                root = r ** (1.0 / K)
                sup = b.f_prime0 * root[..., None] * np.exp(0.5 * (v[..., :-1] - v[..., 1:]))
                phi[..., idx[:-1], idx[1:]] = sup
                corner = zj * r ** (-(K - 1.0) / K) * np.exp(0.5 * (v[..., -1] - v[..., 0]))
                phi[..., off + K - 1, off] += b.f_prime0 * corner
            off += K
        return a, phi

    def sample(self, z: complex) -> FieldSample:
        a, phi = self.evaluate(complex(z))
        A_z = np.diag(a / z).astype(complex)
        A_zbar = np.diag(-a / np.conj(z)).astype(complex)
        return FieldSample(complex(z), self.t, A_z, A_zbar, phi)


def model_field(p: ClusterPartition, toda: TodaMap, t: float) -> ModelField:
    return ModelField(p, toda, t, cutoff=False)


def model_unitary_pair(p: ClusterPartition, toda: TodaMap, t: float, z: complex) -> FieldSample:
    """Model pair ``(A_t^mod, Phi_t^mod)`` at the point ``z``."""
    return ModelField(p, toda, t).sample(z)


# ---------------------------------------------------------------- curvature

_STENCIL = ((-2, 1.0 / 12), (-1, -8.0 / 12), (1, 8.0 / 12), (2, -1.0 / 12))


def hitchin_residual(field: ModelField, z, h: float = 1e-4) -> np.ndarray:
    """``F_A + t^2 [Phi, Phi^dagger]`` as the coefficient of ``dx ^ dy``.

    The curvature comes from fourth-order central differences of
    ``A_x = -2i a y / r^2`` and ``A_y = 2i a x / r^2`` (the diagonal
    connection is abelian, so ``A ^ A = 0``); ``dz ^ dzbar = -2i dx ^ dy``
    turns the commutator term into ``-2i t^2 [Phi, Phi^dagger]``.
    Result shape ``z.shape + (n, n)``.
    """
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) <= 2.5 * h):
        raise StencilOutOfDomain("finite-difference stencil reaches the origin")

    def coeffs(pts):
        try:
            a, _ = field.evaluate(pts)
        except BelowGrid as exc:
            raise StencilOutOfDomain(str(exc)) from exc
        x, y = pts.real[..., None], pts.imag[..., None]
        r2 = x * x + y * y
        return -2j * a * y / r2, 2j * a * x / r2

    dAy_dx = 0.0
    dAx_dy = 0.0
    for k, w in _STENCIL:
        dAy_dx = dAy_dx + w * coeffs(z + k * h)[1]
        dAx_dy = dAx_dy + w * coeffs(z + 1j * k * h)[0]
    F = (dAy_dx - dAx_dy) / h
    _, phi = field.evaluate(z)
    phid = np.conj(np.swapaxes(phi, -1, -2))
    comm = phi @ phid - phid @ phi
    out = -2j * field.t**2 * comm
    n = phi.shape[-1]
    out[..., np.arange(n), np.arange(n)] += F
    return out


def hitchin_residual_model(
    p: ClusterPartition, toda: TodaMap, t: float, z, h: float = 1e-4
) -> np.ndarray:
    """Hitchin residual of the model pair at ``z`` (anti-hermitian ``n x n``)."""
    return hitchin_residual(ModelField(p, toda, t), z, h)
