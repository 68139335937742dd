"""Data of the linearized Hitchin operator around the approximate solution.

Connection coefficients are written ``f_i`` with ``A = diag(f) (dz/z - dzbar/zbar)``
(so ``A = 2i diag(f) dtheta``).  On the ``(i, j)`` matrix entry the covariant
Laplacian acts as ``r^-2 ((r d/dr)^2 + (d/dtheta + 2i (f_i - f_j))^2)`` up to
sign, and in the coordinates ``(rho, theta) = (log r, theta)`` the Dirichlet
energy has the flat form ``|d_rho g|^2 + |(d_theta + 2i(f_i - f_j)) g|^2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import eigsh

from .errors import BoundarySupport, GridTooCoarse, IndexOutOfRange, InvalidConfig
from .higgs_local import partition_eigenvalues
from .model_metrics import ModelField, toda_for
from .cutoff import cutoff_log_derivatives
from .partition import ClusterPartition, alpha_table
from .toda import TodaSolution, evaluate_rescaled

TodaMap = Mapping[int, TodaSolution]

KIND_INF = "A_inf"
KIND_MOD = "A_mod"
KIND_ZERO = "A_zero"

MIN_GRID = 64


# ---------------------------------------------------------------- block fields


@dataclass(frozen=True)
class AtildeSpec:
    """Limit connection for critical cluster size ``J``.

    Blocks larger than ``J`` freeze at their limiting connection, blocks of
    size ``J`` keep the ``t = 1`` model connection, smaller ones become flat.
    A size-1 block never carries Toda data, so ``K = J = 1`` is flat too.
    """

    partition: ClusterPartition
    J: int
    kinds: tuple[str, ...]

    @property
    def f_prime0_moduli(self) -> tuple[float, ...]:
        return tuple(abs(b.f_prime0) for b in self.partition.blocks)

    def _entries(self):
        for b, kind in zip(self.partition.blocks, self.kinds):
            for i, a in enumerate(alpha_table(b.K), start=1):
                yield b, kind, i, a

    def f_at_zero(self) -> list[Fraction]:
        return [-a / 2 if kind == KIND_INF else Fraction(0) for _, kind, _, a in self._entries()]

    def f_at_infinity(self) -> list[Fraction]:
        return [Fraction(0) if kind == KIND_ZERO else -a / 2 for _, kind, _, a in self._entries()]

    def coefficients(self, w_abs, toda: TodaMap | None = None) -> np.ndarray:
        """``f_i(|w|)`` for all ``n`` entries; shape ``w_abs.shape + (n,)``."""
        w_abs = np.asarray(w_abs, dtype=float)
        out = []
        for b, kind in zip(self.partition.blocks, self.kinds):
            base = np.array([-float(a) / 2 for a in alpha_table(b.K)])
            if kind == KIND_ZERO:
                out.append(np.zeros(w_abs.shape + (b.K,)))
            elif kind == KIND_INF:
                out.append(np.broadcast_to(base, w_abs.shape + (b.K,)).copy())
            else:
                sol = toda_for(toda or {}, b.K)
                us = evaluate_rescaled(sol, 1.0, abs(b.f_prime0) * w_abs, 1)
                out.append(base + 0.25 * us)
        return np.concatenate(out, axis=-1)


def build_atilde(p: ClusterPartition, J: int) -> AtildeSpec:
    if int(J) != J or J < 1:
        raise InvalidConfig(f"J must be a positive integer, got {J}")
    kinds = []
    for b in p.blocks:
        if b.K > J:
            kinds.append(KIND_INF)
        elif b.K == J and b.K >= 2:
            kinds.append(KIND_MOD)
        else:
            kinds.append(KIND_ZERO)
    return AtildeSpec(p, int(J), tuple(kinds))


# ---------------------------------------------------------------- indicial roots


@dataclass(frozen=True)
class IndicialSpectrum:
    """Constants ``b_ij = f_i(0) - f_j(0)``, ``c_ij = f_i(inf) - f_j(inf)`` and non-integer roots.

    A pair with constant ``b != 0`` has indicial roots ``+-2b``; ``b = 0``
    gives integer roots only, which are kept implicit.
    """

    b: tuple[tuple[Fraction, ...], ...]
    c: tuple[tuple[Fraction, ...], ...]
    S0: tuple[Fraction, ...]
    Sinf: tuple[Fraction, ...]

    @property
    def b_matrix(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.b])

    @property
    def c_matrix(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.c])

    def pair_roots(self, i: int, j: int, at: str = "zero") -> tuple[Fraction, ...]:
        """Non-integer roots of entry ``(i, j)`` (1-based) at ``"zero"`` or ``"infinity"``."""
        const = (self.b if at == "zero" else self.c)[i - 1][j - 1]
        return _roots(const)

    def rows(self):
        n = len(self.b)
        for i in range(n):
            for j in range(n):
                if i != j:
                    yield i + 1, j + 1, self.b[i][j], self.c[i][j]


def _roots(const: Fraction) -> tuple[Fraction, ...]:
    if const == 0:
        return ()
    nu = abs(2 * const)
    if nu.denominator == 1:
        return ()
    return (-nu, nu)


def _root_set(mat) -> tuple[Fraction, ...]:
    out: set[Fraction] = set()
    for row in mat:
        for x in row:
            out.update(v for v in _roots(x) if -1 < v < 1)
    return tuple(sorted(out))


def indicial_spectrum(spec: AtildeSpec) -> IndicialSpectrum:
    f0 = spec.f_at_zero()
    finf = spec.f_at_infinity()
    b = tuple(tuple(x - y for y in f0) for x in f0)
    c = tuple(tuple(x - y for y in finf) for x in finf)
    return IndicialSpectrum(b, c, _root_set(b), _root_set(c))


# ---------------------------------------------------------------- polar grid


@dataclass(frozen=True, eq=False)
class PolarGrid:
    """Grid uniform in ``rho = log r`` (endpoints included) and periodic in ``theta``."""

    r_in: float
    r_out: float
    n_r: int
    n_theta: int

    def __post_init__(self):
        if not 0 < self.r_in < self.r_out:
            raise InvalidConfig("need 0 < r_in < r_out")

    @property
    def rho(self) -> np.ndarray:
        return np.linspace(math.log(self.r_in), math.log(self.r_out), self.n_r)

    @property
    def theta(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.n_theta) / self.n_theta

    @property
    def h_rho(self) -> float:
        return (math.log(self.r_out) - math.log(self.r_in)) / (self.n_r - 1)

    @property
    def h_theta(self) -> float:
        return 2 * np.pi / self.n_theta

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """``(r, theta)`` arrays of shape ``(n_r, n_theta)``."""
        rho, th = np.meshgrid(self.rho, self.theta, indexing="ij")
        return np.exp(rho), th

    def points(self) -> np.ndarray:
        r, th = self.mesh()
        return r * np.exp(1j * th)

    def refined(self) -> "PolarGrid":
        return PolarGrid(self.r_in, self.r_out, 2 * self.n_r - 1, 2 * self.n_theta)


def _d_theta(f, h):
    return (np.roll(f, -1, axis=1) - np.roll(f, 1, axis=1)) / (2 * h)


def _d2_theta(f, h):
    return (np.roll(f, -1, axis=1) - 2 * f + np.roll(f, 1, axis=1)) / (h * h)


def decoupled_operator(b_of_r, fld: np.ndarray, grid: PolarGrid) -> np.ndarray:
    """``r^-2 (d_rho^2 + (d_theta + 2i b)^2) fld`` with second-order differences.

    ``b_of_r`` is a scalar or an array over the radial nodes.  The first and
    last radial rows are set to NaN (no one-sided stencils).
    """
    if grid.n_r < MIN_GRID or grid.n_theta < MIN_GRID:
        raise GridTooCoarse(f"grid {grid.n_r}x{grid.n_theta} is below {MIN_GRID}x{MIN_GRID}")
    f = np.asarray(fld, dtype=complex)
    if f.shape != (grid.n_r, grid.n_theta):
        raise InvalidConfig(f"field must have shape {(grid.n_r, grid.n_theta)}")
    hr, ht = grid.h_rho, grid.h_theta
    beta = 2.0 * np.broadcast_to(np.asarray(b_of_r, dtype=float), (grid.n_r,))[:, None]
    out = np.full_like(f, np.nan)
    out[1:-1] = (f[2:] - 2 * f[1:-1] + f[:-2]) / (hr * hr)
    ang = _d2_theta(f, ht) + 2j * beta * _d_theta(f, ht) - beta**2 * f
    out[1:-1] += ang[1:-1]
    r, _ = grid.mesh()
    return out / r**2


def decoupled_apply(
    spec: AtildeSpec,
    i: int,
    j: int,
    fld: np.ndarray,
    grid: PolarGrid,
    toda: TodaMap | None = None,
    limit: str | None = None,
) -> np.ndarray:
    """Apply the ``(i, j)`` component of the decoupled Laplacian of ``spec``.

    ``limit=None`` uses ``f_i(r) - f_j(r)`` (Toda data needed for ``A_mod``
    blocks); ``"zero"`` and ``"infinity"`` freeze it at ``b_ij`` or ``c_ij``.
    """
    n = spec.partition.n
    if not (1 <= i <= n and 1 <= j <= n):
        raise IndexOutOfRange(f"entry ({i}, {j}) outside 1..{n}")
    if limit is None:
        f = spec.coefficients(np.exp(grid.rho), toda)
        b = f[:, i - 1] - f[:, j - 1]
    elif limit in ("zero", "infinity"):
        vals = spec.f_at_zero() if limit == "zero" else spec.f_at_infinity()
        b = float(vals[i - 1] - vals[j - 1])
    else:
        raise InvalidConfig(f"unknown limit {limit!r}")
    return decoupled_operator(b, fld, grid)


# ---------------------------------------------------------------- energy identity


def radial_bump(r, lo: float = 0.3, hi: float = 0.9) -> np.ndarray:
    """``(4x(1-x))^4`` on ``[lo, hi]``, zero outside; ``C^3``."""
    x = (np.asarray(r, dtype=float) - lo) / (hi - lo)
    inside = (x > 0) & (x < 1)
    return np.where(inside, (4 * x * (1 - x)) ** 4, 0.0)


def random_test_section(
    n: int,
    grid: PolarGrid,
    seed: int,
    max_mode: int = 2,
    diagonal_only: bool = False,
    support: tuple[float, float] = (0.3, 0.9),
) -> np.ndarray:
    """Hermitian trace-free section ``bump(r) sum_l H_l e^(i l theta)``; shape ``(n_r, n_theta, n, n)``."""
    rng = np.random.default_rng(seed)
    r, th = grid.mesh()
    gamma = np.zeros(r.shape + (n, n), dtype=complex)
    for ell in range(0, max_mode + 1):
        H = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        if diagonal_only:
            H = np.diag(np.diag(H))
        if ell == 0:
            H = 0.5 * (H + H.conj().T)
            gamma += H
        else:
            phase = np.exp(1j * ell * th)[..., None, None]
            gamma += H * phase + H.conj().T * np.conj(phase)
    gamma -= np.trace(gamma, axis1=-2, axis2=-1)[..., None, None] * np.eye(n) / n
    return gamma * radial_bump(r, *support)[..., None, None]


def _fields_on_grid(p, toda, t, grid, cutoff):
    fieldobj = ModelField(p, toda, t, cutoff=cutoff)
    a, phi = fieldobj.evaluate(grid.points())
    return a, phi


def _comm(x, y):
    return x @ y - y @ x


def _inner(x, y):
    return np.real(np.sum(np.conj(x) * y, axis=(-2, -1)))


@dataclass(frozen=True)
class EnergyIdentity:
    lhs: float
    rhs: float

    @property
    def relative_gap(self) -> float:
        return abs(self.lhs - self.rhs) / self.rhs if self.rhs > 0 else abs(self.lhs)

    def __iter__(self):
        return iter((self.lhs, self.rhs))


def energy_identity(
    p: ClusterPartition,
    toda: TodaMap,
    t: float,
    gamma: np.ndarray,
    grid: PolarGrid,
    cutoff: bool = True,
) -> EnergyIdentity:
    """``<L_t g, g>`` against ``|d_A g|^2 + 2t^2 |[Phi, g]|^2 + 2t^2 |[Phi^*, g]|^2``.

    Both sides are sums over the same grid with area element
    ``r^2 drho dtheta``.  The left side uses the second-difference Laplacian,
    the right side central first differences, so they agree to ``O(h^2)``.
    """
    n = p.n
    g = np.asarray(gamma, dtype=complex)
    if g.shape != (grid.n_r, grid.n_theta, n, n):
        raise InvalidConfig(f"gamma must have shape {(grid.n_r, grid.n_theta, n, n)}")
    edge = np.abs(g[:3]).max(initial=0.0) + np.abs(g[-3:]).max(initial=0.0)
    if edge > 0:
        raise BoundarySupport("test section must vanish within 3 cells of the annulus boundary")
    a, phi = _fields_on_grid(p, toda, t, grid, cutoff)
    beta = 2.0 * (a[..., :, None] - a[..., None, :])
    hr, ht = grid.h_rho, grid.h_theta
    r, _ = grid.mesh()
    r2 = (r * r)[..., None, None]
    phid = np.conj(np.swapaxes(phi, -1, -2))

    lap = np.zeros_like(g)
    lap[1:-1] = (g[2:] - 2 * g[1:-1] + g[:-2]) / hr**2
    lap += _d2_theta(g, ht) + 2j * beta * _d_theta(g, ht) - beta**2 * g
    mphi = _comm(phid, _comm(phi, g)) + _comm(phi, _comm(phid, g))
    lhs_density = -_inner(g, lap) + 2 * t * t * r2[..., 0, 0] * _inner(g, mphi)

    d_rho = np.zeros_like(g)
    d_rho[1:-1] = (g[2:] - g[:-2]) / (2 * hr)
    d_th = _d_theta(g, ht) + 1j * beta * g
    c1 = _comm(phi, g)
    c2 = _comm(phid, g)
    rhs_density = (
        _inner(d_rho, d_rho) + _inner(d_th, d_th)
        + 2 * t * t * r2[..., 0, 0] * (_inner(c1, c1) + _inner(c2, c2))
    )
    cell = hr * ht
    return EnergyIdentity(float(np.sum(lhs_density) * cell), float(np.sum(rhs_density) * cell))


def rayleigh_probe(
    p: ClusterPartition, toda: TodaMap, t: float, grid: PolarGrid, cutoff: bool = True
) -> float:
    """Smallest eigenvalue of the discretized ``L_t`` on the annulus (Dirichlet).

    Diagnostic only: the generalized problem ``S x = lambda W x`` with
    ``W = r^2`` is solved by shift-invert Lanczos.
    """
    n = p.n
    a, phi = _fields_on_grid(p, toda, t, grid, cutoff)
    a, phi = a[1:-1], phi[1:-1]
    nr, nt = grid.n_r - 2, grid.n_theta
    hr, ht = grid.h_rho, grid.h_theta
    r = np.exp(grid.rho[1:-1])
    d2r = sparse.diags([1, -2, 1], [-1, 0, 1], shape=(nr, nr)) / hr**2
    shift = sparse.diags([1, 1], [1, -(nt - 1)], shape=(nt, nt))
    d1t = (shift - shift.T) / (2 * ht)
    d2t = (shift + shift.T - 2 * sparse.identity(nt)) / ht**2
    eye_r, eye_t = sparse.identity(nr), sparse.identity(nt)
    blocks = []
    for i in range(n):
        for j in range(n):
            beta = 2.0 * (a[:, 0, i] - a[:, 0, j])
            B = sparse.diags(beta)
            op = (
                sparse.kron(d2r, eye_t)
                + sparse.kron(eye_r, d2t)
                + 2j * sparse.kron(B, d1t)
                - sparse.kron(B @ B, eye_t)
            )
            blocks.append(-op)
    lap = sparse.block_diag(blocks, format="csr")
    # commutator superoperators [X, .] on row-major vec over the point grid
    eye_n = np.eye(n)
    P = phi.reshape(-1, n, n)
    ad = np.einsum("pik,jl->pijkl", P, eye_n) - np.einsum("ik,plj->pijkl", eye_n, P)
    ad = ad.reshape(-1, n * n, n * n)
    adh = np.conj(np.swapaxes(ad, -1, -2))
    M = adh @ ad + ad @ adh
    weight = np.repeat(r * r, nt)
    M = M * (2 * t * t * weight)[:, None, None]
    npts = nr * nt
    idx = np.arange(npts)
    rows = (np.arange(n * n)[:, None, None] * npts + idx[None, :, None]).repeat(n * n, axis=2)
    cols = (np.arange(n * n)[None, None, :] * npts + idx[None, :, None]).repeat(n * n, axis=0)
    vals = np.transpose(M, (1, 0, 2))
    Mmat = sparse.csr_matrix((vals.ravel(), (rows.ravel(), cols.ravel())), shape=lap.shape)
    S = (lap + Mmat).tocsc()
    S = 0.5 * (S + S.getH())
    W = sparse.diags(np.tile(weight, n * n)).tocsc()
    vals, _ = eigsh(S, k=1, M=W, sigma=-1.0, which="LM")
    return float(np.real(vals[0]))


# ---------------------------------------------------------------- M_Phi bound


def m_phi_entry(lambda_i: complex, lambda_j: complex) -> float:
    """Multiplier ``2 |lambda_i - lambda_j|^2`` of ``M_Phi`` on an eigenline pair."""
    return 2.0 * abs(complex(lambda_i) - complex(lambda_j)) ** 2


def m_phi_bound(p: ClusterPartition, samples: Sequence[complex]) -> float:
    """``max`` of :func:`m_phi_entry` over eigenvalue pairs at the sample points."""
    best = 0.0
    for z in samples:
        lam = partition_eigenvalues(p, complex(z))
        diff = np.abs(lam[:, None] - lam[None, :])
        best = max(best, float(2.0 * np.max(diff) ** 2))
    return best


# ---------------------------------------------------------------- rescaled limit


@dataclass
class LimitRow:
    t: float
    block: int
    K: int
    kind: str
    deviation: float


@dataclass
class LimitTable:
    J: int
    rows: list[LimitRow] = field(default_factory=list)

    def deviations(self, block: int) -> list[float]:
        return [row.deviation for row in self.rows if row.block == block]

    def monotone(self, block: int, floor: float = 1e-12) -> bool:
        """Deviation non-increasing in t (changes below ``floor`` count as ties)."""
        d = self.deviations(block)
        return all(d[k + 1] <= d[k] + floor for k in range(len(d) - 1))


def rescaled_laplacian_limit(
    p: ClusterPartition,
    toda: TodaMap,
    J: int,
    t_values: Sequence[float],
    samples: Sequence[complex],
    cutoff: bool = True,
) -> LimitTable:
    """Compare pulled-back connection coefficients with their limits.

    Under ``z = t^(-J/(J+1)) w`` the form ``dz/z - dzbar/zbar`` is invariant,
    so the pulled-back coefficient at ``w`` is ``a_t`` evaluated at ``z``.
    The table records, per block and ``t``, the max deviation from the
    ``A_inf`` / ``A_mod`` / ``A_zero`` coefficient at ``w``.
    """
    w = np.asarray(samples, dtype=complex)
    if np.any(np.abs(w) < 0.1 - 1e-12) or np.any(np.abs(w) > 2 + 1e-12):
        raise InvalidConfig("samples must lie in the annulus 0.1 <= |w| <= 2")
    spec = build_atilde(p, J)
    target = spec.coefficients(np.abs(w), toda)
    table = LimitTable(int(J))
    offs = p.offsets()
    for t in t_values:
        z = w * float(t) ** (-J / (J + 1.0))
        a, _ = ModelField(p, toda, t, cutoff=cutoff).evaluate(z)
        for jb, (b, kind) in enumerate(zip(p.blocks, spec.kinds)):
            sl = slice(offs[jb], offs[jb] + b.K)
            dev = float(np.max(np.abs(a[..., sl] - target[..., sl])))
            table.rows.append(LimitRow(float(t), jb, b.K, kind, dev))
    return table


# ---------------------------------------------------------------- C1 growth


@dataclass
class GrowthReport:
    t_values: list[float]
    sup_A: list[float]
    sup_dA: list[float]
    exponent: float
    sup_A_variation: float

    @property
    def exponent_ok(self) -> bool:
        return 0.8 <= self.exponent <= 1.2

    @property
    def bounded_ok(self) -> bool:
        return self.sup_A_variation <= 0.05


def connection_growth(
    p: ClusterPartition,
    toda: TodaMap,
    t_values: Sequence[float],
    r_min: float = 1e-4,
    n_samples: int = 4000,
    cutoff: bool = True,
) -> GrowthReport:
    """``sup |a_t|`` and ``sup |d a_t / dr|`` over ``r in [r_min, 1]``.

    ``a_t`` are the diagonal coefficients of ``A_t`` against
    ``dz/z - dzbar/zbar`` (the approximate connection when ``cutoff``).
    The exponent is the log-log slope of ``sup |d a_t/dr|`` in ``t``.
    ``sup_A_variation`` is ``(max - min) / max`` across ``t``.
    """
    r = np.geomspace(r_min, 1.0, n_samples)
    chi, chi_s, chi_ss = (np.asarray(c)[:, None] for c in cutoff_log_derivatives(r))
    if not cutoff:
        chi, chi_s, chi_ss = np.ones_like(chi), np.zeros_like(chi), np.zeros_like(chi)
    sup_A, sup_dA = [], []
    for t in t_values:
        best_a = best_d = 0.0
        for b in p.blocks:
            if b.K < 2:
                continue
            sol = toda_for(toda, b.K)
            rr = abs(b.f_prime0) * r
            U = evaluate_rescaled(sol, t, rr, 0)
            Us = evaluate_rescaled(sol, t, rr, 1)
            Uss = evaluate_rescaled(sol, t, rr, 2)
            alpha = np.array([float(x) for x in alpha_table(b.K)])
            a = -0.5 * alpha + 0.25 * (chi_s * U + chi * Us)
            a_s = 0.25 * (chi_ss * U + 2 * chi_s * Us + chi * Uss)
            best_a = max(best_a, float(np.abs(a).max()))
            best_d = max(best_d, float(np.abs(a_s / r[:, None]).max()))
        sup_A.append(best_a)
        sup_dA.append(best_d)
    if all(v > 0 for v in sup_dA) and len(t_values) >= 2:
        exponent = float(np.polyfit(np.log(t_values), np.log(sup_dA), 1)[0])
    else:
        exponent = 0.0
    top = max(sup_A) if sup_A else 0.0
    variation = (top - min(sup_A)) / top if top > 0 else 0.0
    return GrowthReport(list(map(float, t_values)), sup_A, sup_dA, exponent, float(variation))
