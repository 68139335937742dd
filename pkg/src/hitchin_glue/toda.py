"""Radial cyclic affine Toda boundary-value problem.

For each rank ``K >= 2`` the model functions ``u_1..u_K`` solve

    (1/4)(u'' + u'/r) = t^2 r^(2/K) (e^(u_i - u_(i+1)) - e^(u_(i-1) - u_i))

with cyclic indices, ``u_i ~ 2 alpha_i log r`` at 0 and decay at infinity.
In ``s = log r`` the equation has no first-derivative term,
``u_ss = 4 t^2 e^((2 + 2/K) s) (E_i - E_(i-1))`` with ``E_i = e^(u_i - u_(i+1))``,
so it is discretized with the fourth-order Numerov stencil on a log-uniform
grid.  The inner boundary is the Robin condition ``u_s = 2 alpha_i``; the outer
boundary is the Robin condition of the linearized Bessel decay.  Newton's
method with a sparse block-tridiagonal Jacobian is continued from ``u = 0``
along a homotopy that scales the inner log coefficient from 0 to 1.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from functools import cached_property

import numpy as np
from scipy import sparse
from scipy.interpolate import make_interp_spline
from scipy.sparse.linalg import splu

from .errors import BelowGrid, InvalidConfig, NonConvergence, NotDecayed, WrongRank
from .special import bessel_k0, bessel_k0e, bessel_k1e

SCHEMA_VERSION = 1


# ---------------------------------------------------------------- helpers


def alpha_vector(K: int) -> np.ndarray:
    i = np.arange(1, K + 1)
    return (2 * i - (K + 1)) / (2.0 * K)


def zeta(K: int, r):
    """Toda-adapted radius ``(2K/(K+1)) r^((K+1)/K)``."""
    return 2.0 * K / (K + 1) * np.power(r, (K + 1) / K)


def scale_factor(K: int, t: float) -> float:
    """``t^(K/(K+1))``: ``u_{K,i,t}(r) = u_{K,i}(scale_factor * r)``."""
    return float(t) ** (K / (K + 1.0))


def decay_constant(K: int) -> float:
    """``4 sin^2(pi/K)``: smallest nonzero eigenvalue of the cyclic Laplacian.

    Gives 4, 3, 2 for K = 2, 3, 4.
    """
    return 4.0 * math.sin(math.pi / K) ** 2


def _cyclic_modes(K: int) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of the cyclic second-difference matrix."""
    eye = np.eye(K)
    lap = 2 * eye - np.roll(eye, 1, axis=1) - np.roll(eye, -1, axis=1)
    w, V = np.linalg.eigh(lap)
    return np.sqrt(np.clip(w, 0.0, None)), V


def _symmetry_map(K: int) -> np.ndarray:
    """``P`` with ``u_full = u_red @ P.T`` and ``u_(K+1-i) = -u_i``."""
    m = K // 2
    P = np.zeros((K, m))
    for i in range(m):
        P[i, i] = 1.0
        P[K - 1 - i, i] = -1.0
    return P


def toda_rhs(K: int, s: np.ndarray, u: np.ndarray, t: float = 1.0) -> np.ndarray:
    """Right side of ``u_ss = g(s, u)``; ``u`` has shape ``(N, K)``."""
    c = 4.0 * t * t * np.exp((2.0 + 2.0 / K) * np.asarray(s))[:, None]
    E = np.exp(u - np.roll(u, -1, axis=1))
    return c * (E - np.roll(E, 1, axis=1))


def _numerov_interior(u: np.ndarray, g: np.ndarray, h: float) -> np.ndarray:
    """Numerov residual of ``u_ss = g`` at interior nodes, scaled by ``1/h^2``."""
    lhs = u[2:] - 2.0 * u[1:-1] + u[:-2]
    return (lhs - h * h / 12.0 * (g[2:] + 10.0 * g[1:-1] + g[:-2])) / (h * h)


# ---------------------------------------------------------------- types


@dataclass(frozen=True, eq=False)
class RadialGrid:
    """Strictly increasing positive radii, log-uniform by construction."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 1 or pts.size < 3:
            raise InvalidConfig("a radial grid needs at least three points")
        if not np.all(np.isfinite(pts)) or pts[0] <= 0:
            raise InvalidConfig("grid points must be finite and positive")
        if np.any(np.diff(pts) <= 0):
            raise InvalidConfig("grid points must be strictly increasing")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @classmethod
    def log_uniform(cls, n: int, r_min: float, r_max: float) -> "RadialGrid":
        pts = np.exp(np.linspace(math.log(r_min), math.log(r_max), n))
        pts[0], pts[-1] = r_min, r_max  # exp(log(x)) can be off by an ulp
        return cls(pts)

    @property
    def r_min(self) -> float:
        return float(self.points[0])

    @property
    def r_max(self) -> float:
        return float(self.points[-1])

    def __len__(self) -> int:
        return self.points.size


@dataclass(frozen=True)
class SolverConfig:
    """Numerical settings for :func:`solve_toda`.

    ``tolerance`` bounds the max-norm of the discrete ODE residual in
    ``s = log r``.  At double precision the attainable floor is about
    ``1e-16 |u| / h^2``, so very fine grids need a looser tolerance.
    """

    tolerance: float = 1e-10
    max_iterations: int = 50
    grid_size: int = 2000
    r_min: float = 1e-4
    r_max: float = 6.0
    continuation_steps: int = 4

    def __post_init__(self):
        if not (self.tolerance > 0 and math.isfinite(self.tolerance)):
            raise InvalidConfig(f"tolerance must be positive, got {self.tolerance}")
        if not 0 < self.r_min < 0.25:
            raise InvalidConfig(f"r_min must lie in (0, 1/4), got {self.r_min}")
        if not (self.r_max >= 2 and math.isfinite(self.r_max)):
            raise InvalidConfig(f"r_max must be >= 2, got {self.r_max}")
        if self.grid_size < 16:
            raise InvalidConfig("grid_size must be at least 16")
        if self.max_iterations < 1 or self.continuation_steps < 1:
            raise InvalidConfig("max_iterations and continuation_steps must be >= 1")

    def to_dict(self) -> dict:
        return asdict(self)

    def digest(self) -> str:
        """sha256 of the canonical JSON form (plus cache schema version)."""
        payload = json.dumps(
            {"schema_version": SCHEMA_VERSION, "config": self.to_dict()},
            sort_keys=True,
            separators=(",", ":"),
        )
        return hashlib.sha256(payload.encode()).hexdigest()


class _Profile:
    """Smooth interpolant of a Toda solution in ``s = log r`` (parameter t = 1).

    The right side ``g`` is interpolated by a quintic spline and integrated
    twice, so the interpolant satisfies the ODE to spline accuracy between
    nodes.  Beyond ``r_max`` the solution continues along the decaying
    Bessel modes of the linearized system.
    """

    # node mismatch above which the ODE-based interpolant is abandoned
    FALLBACK_MISMATCH = 1e-8

    def __init__(self, K: int, s: np.ndarray, u: np.ndarray):
        self.K = K
        self.s = s
        self.u = u  # (N, K)
        self.s_min, self.s_max = float(s[0]), float(s[-1])
        g = toda_rhs(K, s, u)
        self._g = make_interp_spline(s, g, k=5)
        self._G1 = self._g.antiderivative(1)
        self._G2 = self._g.antiderivative(2)
        # pin the integration constants at the outer edge: value from the
        # last node, slope from the Bessel Robin condition, so the decaying
        # tail continues the interpolant with matching value and slope
        self._mu, self._V = _cyclic_modes(K)
        robin = self._V @ np.diag(self._edge_rates()) @ self._V.T
        slope = robin @ u[-1]
        span = self.s_max - self.s_min
        self._c1 = slope - self._G1(self.s_max)
        self._c0 = u[-1] - self._c1 * span - self._G2(self.s_max)
        self.node_mismatch = float(np.max(np.abs(self._eval_ode(s, 0) - u)))
        self.ode_based = self.node_mismatch <= self.FALLBACK_MISMATCH * max(
            1.0, float(np.max(np.abs(u)))
        )
        if not self.ode_based:
            self._plain = make_interp_spline(s, u, k=5)
        zmax = zeta(K, math.exp(self.s_max))
        amp = self._V.T @ self.u_at_edge()
        keep = self._mu > 1e-12
        self._tail_amp = np.where(keep, amp, 0.0)
        self._zmax = zmax
        self._k0e_edge = np.array(
            [bessel_k0e(m * zmax) if m > 1e-12 else 1.0 for m in self._mu]
        )

    def _edge_rates(self) -> np.ndarray:
        """Log-derivative ``d/ds log K0(mu zeta)`` of each mode at the outer edge."""
        z = zeta(self.K, math.exp(self.s_max))
        p = (self.K + 1.0) / self.K
        return np.array(
            [-m * p * z * bessel_k1e(m * z) / bessel_k0e(m * z) if m > 1e-12 else 0.0
             for m in self._mu]
        )

    def u_at_edge(self) -> np.ndarray:
        return self.u[-1]

    def _eval_ode(self, s, deriv):
        x = s - self.s[0]
        if deriv == 0:
            return self._c0 + np.multiply.outer(x, self._c1) + self._G2(s)
        if deriv == 1:
            return self._c1 + self._G1(s)
        return self._g(s)

    def _eval_inner(self, s, deriv):
        if self.ode_based:
            return self._eval_ode(s, deriv)
        return self._plain(s, nu=deriv)

    def _eval_tail(self, s, deriv):
        K = self.K
        p = (K + 1.0) / K
        z = zeta(K, np.exp(s))
        out = np.zeros(s.shape + (K,))
        for k, mu in enumerate(self._mu):
            a = self._tail_amp[k]
            if a == 0.0:
                continue
            x = mu * z
            ratio = bessel_k0e(x) / self._k0e_edge[k] * np.exp(-(x - mu * self._zmax))
            if deriv == 0:
                mode = ratio
            elif deriv == 1:
                mode = -mu * p * z * ratio * bessel_k1e(x) / bessel_k0e(x)
            else:
                mode = (mu * p * z) ** 2 * ratio
            out += np.multiply.outer(a * mode, self._V[:, k])
        return out

    def __call__(self, s, deriv: int = 0) -> np.ndarray:
        """Values (``deriv=0``) or ``s``-derivatives of ``u``, shape ``s.shape + (K,)``."""
        s = np.asarray(s, dtype=float)
        if np.any(s < self.s_min - 1e-12):
            raise BelowGrid(
                f"radius {math.exp(float(s.min())):.6g} lies below the grid "
                f"minimum {math.exp(self.s_min):.6g}"
            )
        flat = s.ravel()
        out = np.empty((flat.size, self.K))
        inner = flat <= self.s_max
        if inner.any():
            out[inner] = self._eval_inner(np.clip(flat[inner], self.s_min, None), deriv)
        if (~inner).any():
            out[~inner] = self._eval_tail(flat[~inner], deriv)
        return out.reshape(s.shape + (self.K,))


@dataclass(frozen=True, eq=False)
class TodaSolution:
    """Grid values of ``u_{K,1..K}`` at scaling parameter ``t``.

    ``u`` has shape ``(K, N)``.  A solution at ``t != 1`` is the ``t = 1``
    solution on the grid ``points / t^(K/(K+1))``; the values are shared.
    """

    K: int
    grid: RadialGrid
    u: np.ndarray
    residual_norm: float
    t: float = 1.0
    config: SolverConfig = field(default_factory=SolverConfig)

    def __post_init__(self):
        u = np.array(self.u, dtype=float)
        if u.shape != (self.K, len(self.grid)):
            raise InvalidConfig(f"u must have shape {(self.K, len(self.grid))}, got {u.shape}")
        if not self.t > 0:
            raise InvalidConfig("t must be positive")
        u.setflags(write=False)
        object.__setattr__(self, "u", u)

    @property
    def r(self) -> np.ndarray:
        return self.grid.points

    @property
    def base_radii(self) -> np.ndarray:
        """Grid radii expressed at parameter t = 1."""
        return self.grid.points * scale_factor(self.K, self.t)

    @cached_property
    def profile(self) -> _Profile:
        return _Profile(self.K, np.log(self.base_radii), self.u.T.copy())

    def rescaled(self, t: float) -> "TodaSolution":
        """Same solution viewed at parameter ``t`` (grid shrinks by ``t^(K/(K+1))``)."""
        if not t > 0:
            raise InvalidConfig("t must be positive")
        base = self.base_radii
        return TodaSolution(
            self.K, RadialGrid(base / scale_factor(self.K, t)), self.u,
            self.residual_norm, float(t), self.config,
        )

    def norm(self) -> np.ndarray:
        """Euclidean norm of ``(u_1..u_K)`` at each grid point."""
        return np.sqrt(np.sum(self.u**2, axis=0))


# ---------------------------------------------------------------- solver


class _System:
    """Discrete Numerov system on the reduced unknowns."""

    def __init__(self, K: int, cfg: SolverConfig):
        self.K = K
        self.s = np.linspace(math.log(cfg.r_min), math.log(cfg.r_max), cfg.grid_size)
        self.h = self.s[1] - self.s[0]
        self.P = _symmetry_map(K)
        self.m = K // 2
        self.alpha = alpha_vector(K)[: self.m]
        mu, V = _cyclic_modes(K)
        z = zeta(K, cfg.r_max)
        rate = np.zeros(K)
        pos = mu > 1e-12
        p = (K + 1.0) / K
        rate[pos] = -mu[pos] * p * z * np.array(
            [bessel_k1e(x) / bessel_k0e(x) for x in mu[pos] * z]
        )
        robin = V @ np.diag(rate) @ V.T
        self.robin = (robin @ self.P)[: self.m, :]
        self.weight = 4.0 * np.exp((2.0 + 2.0 / K) * self.s)
        n = np.arange(cfg.grid_size)
        a, b = np.meshgrid(np.arange(self.m), np.arange(self.m), indexing="ij")
        rows, cols, self._slots = [], [], []
        for off in (-1, 0, 1):
            k = n + off
            ok = (k >= 0) & (k < cfg.grid_size)
            rows.append((n[ok, None, None] * self.m + a[None]).ravel())
            cols.append((k[ok, None, None] * self.m + b[None]).ravel())
            self._slots.append(ok)
        self._rows = np.concatenate(rows)
        self._cols = np.concatenate(cols)

    def rhs(self, ured):
        """Reduced ``g`` and its Jacobian with respect to the reduced unknowns."""
        K, P = self.K, self.P
        u = ured @ P.T
        c = self.weight[:, None]
        E = np.exp(u - np.roll(u, -1, axis=1))
        Em = np.roll(E, 1, axis=1)
        g = c * (E - Em)
        N = u.shape[0]
        J = np.zeros((N, K, K))
        ii = np.arange(K)
        J[:, ii, ii] = c * (E + Em)
        J[:, ii, (ii + 1) % K] += -c * E
        J[:, ii, (ii - 1) % K] += -c * Em
        return g[:, : self.m], J[:, : self.m, :] @ P

    def residual(self, ured, lam, with_jac=True):
        h, m = self.h, self.m
        N = ured.shape[0]
        g, Jg = self.rhs(ured)
        R = np.empty((N, m))
        R[1:-1] = (ured[2:] - 2 * ured[1:-1] + ured[:-2]) - h * h / 12 * (
            g[2:] + 10 * g[1:-1] + g[:-2]
        )
        R[0] = ured[1] - ured[0] - h * lam * 2 * self.alpha - h * h * (g[0] / 3 + g[1] / 6)
        R[-1] = ured[-1] - ured[-2] - h * (self.robin @ ured[-1]) + h * h * (
            g[-1] / 3 + g[-2] / 6
        )
        if not with_jac:
            return R, None
        eye = np.eye(m)
        Jm = np.zeros((N, m, m))
        J0 = np.zeros((N, m, m))
        Jp = np.zeros((N, m, m))
        Jm[1:-1] = eye - h * h / 12 * Jg[:-2]
        J0[1:-1] = -2 * eye - h * h / 12 * 10 * Jg[1:-1]
        Jp[1:-1] = eye - h * h / 12 * Jg[2:]
        J0[0] = -eye - h * h / 3 * Jg[0]
        Jp[0] = eye - h * h / 6 * Jg[1]
        J0[-1] = eye - h * self.robin + h * h / 3 * Jg[-1]
        Jm[-1] = -eye + h * h / 6 * Jg[-2]
        vals = np.concatenate(
            [B[ok].ravel() for B, ok in zip((Jm, J0, Jp), self._slots)]
        )
        jac = sparse.csc_matrix((vals, (self._rows, self._cols)), shape=(N * m, N * m))
        return R, jac


def _newton(system: _System, u, lam, cfg: SolverConfig):
    """Damped Newton iteration; returns (u, scaled residual, converged)."""
    h2 = system.h**2
    rn = math.inf
    for _ in range(cfg.max_iterations):
        R, jac = system.residual(u, lam)
        rmax = float(np.max(np.abs(R)))
        rn = rmax / h2
        if rn <= cfg.tolerance:
            return u, rn, True
        du = splu(jac).solve(-R.ravel()).reshape(u.shape)
        step = 1.0
        while True:
            trial = u + step * du
            Rt, _ = system.residual(trial, lam, with_jac=False)
            if np.all(np.isfinite(Rt)) and np.max(np.abs(Rt)) < (1 - 1e-4 * step) * rmax:
                u = trial
                break
            step *= 0.5
            if step < 1e-4:
                return u, rn, False
    R, _ = system.residual(u, lam, with_jac=False)
    rn = float(np.max(np.abs(R))) / h2
    return u, rn, rn <= cfg.tolerance


def solve_toda(K: int, config: SolverConfig | None = None) -> TodaSolution:
    """Solve the rank-``K`` cyclic Toda problem at ``t = 1``.

    Only ``u_1..u_(K//2)`` are unknowns; the rest follow from
    ``u_(K+1-i) = -u_i`` (and ``u_((K+1)/2) = 0`` for odd K).
    """
    cfg = config or SolverConfig()
    if int(K) != K or K < 2:
        raise InvalidConfig(f"K must be an integer >= 2, got {K}")
    K = int(K)
    system = _System(K, cfg)
    u = np.zeros((cfg.grid_size, system.m))
    lam, dlam = 0.0, 1.0 / cfg.continuation_steps
    rn = math.inf
    while lam < 1.0:
        target = min(1.0, lam + dlam)
        trial, rn, ok = _newton(system, u.copy(), target, cfg)
        if ok:
            u, lam = trial, target
            dlam = min(2 * dlam, 1.0)
            continue
        if rn < 1e3 * cfg.tolerance:
            raise NonConvergence(
                f"Newton stalled at residual {rn:.3g} > tolerance {cfg.tolerance:.3g}; "
                f"this is the rounding floor for grid_size={cfg.grid_size}, "
                "loosen the tolerance or coarsen the grid"
            )
        dlam *= 0.5
        if dlam < 1e-4:
            raise NonConvergence(
                f"continuation stalled at homotopy parameter {lam:.4g} "
                f"(residual {rn:.3g})"
            )
    grid = RadialGrid.log_uniform(cfg.grid_size, cfg.r_min, cfg.r_max)
    return TodaSolution(K, grid, (u @ system.P.T).T, rn, 1.0, cfg)


# ---------------------------------------------------------------- checks


def _s_coordinates(sol: TodaSolution) -> tuple[np.ndarray, float]:
    s = np.log(sol.r)
    h = np.diff(s)
    if np.ptp(h) > 1e-9 * abs(h.mean()):
        raise InvalidConfig("residual checks need a log-uniform grid")
    return s, float(h.mean())


def cyclic_residual(sol: TodaSolution) -> float:
    """Max interior residual of the discretized cyclic Toda ODE at ``sol.t``.

    Measured in ``s = log r``: ``|u_ss - g|`` with the Numerov stencil.
    """
    s, h = _s_coordinates(sol)
    u = sol.u.T
    g = toda_rhs(sol.K, s, u, sol.t)
    return float(np.max(np.abs(_numerov_interior(u, g, h))))


def painleve_residual(sol: TodaSolution) -> float:
    """Max interior residual of ``u'' + u'/r = 8 t^2 r sinh(2u)`` for ``u = u_{2,1}``.

    Uses the same log-coordinate Numerov stencil as :func:`cyclic_residual`,
    so both agree to rounding on any function.
    """
    if sol.K != 2:
        raise WrongRank(f"the sinh reduction needs K = 2, got K = {sol.K}")
    s, h = _s_coordinates(sol)
    u = sol.u[0][:, None]
    g = 8.0 * sol.t**2 * np.exp(3.0 * s)[:, None] * np.sinh(2.0 * u)
    return float(np.max(np.abs(_numerov_interior(u, g, h))))


def evaluate_rescaled(sol: TodaSolution, t: float, r, deriv: int = 0) -> np.ndarray:
    """``u_{K,i,t}(r) = u_{K,i}(t^(K/(K+1)) r)``, shape ``r.shape + (K,)``.

    ``deriv=1`` gives ``r d/dr u`` and ``deriv=2`` gives ``(r d/dr)^2 u``
    (both invariant under the rescaling).  Radii past the grid use the
    Bessel tail; a radius that lands exactly on a grid node returns the
    stored value.
    """
    if not t > 0:
        raise InvalidConfig("t must be positive")
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise BelowGrid("radius must be positive")
    x = scale_factor(sol.K, t) * r
    prof = sol.profile
    out = prof(np.log(x), deriv)
    if deriv == 0:
        base = sol.base_radii
        idx = np.clip(np.searchsorted(base, x), 0, base.size - 1)
        hit = base[idx] == x
        if np.any(hit):
            out[hit] = sol.u.T[idx[hit]]
    return out


@dataclass(frozen=True)
class AsymptoticReport:
    K: int
    epsilon: float
    R_epsilon: float
    C_epsilon: float
    C_K: float
    c: float
    holds: bool
    min_log_margin: float
    points_checked: int

    def to_dict(self) -> dict:
        return asdict(self)


def asymptotic_check(sol: TodaSolution, epsilon: float) -> AsymptoticReport:
    """Check ``|u|^2(rho) <= eps^2 K0(c zeta(rho)) / K0(c zeta(R_eps))`` beyond ``R_eps``.

    ``C_eps = 1/(1 - eps)`` and ``c = (2 C_eps C_K)^(-1/2)``.  The margin is
    reported as ``min log(bound / |u|^2)``; it is ``inf`` when ``|u|``
    underflows everywhere.
    """
    if not 0 < epsilon < 1:
        raise InvalidConfig("epsilon must lie in (0, 1)")
    norm = sol.norm()
    if norm[-1] >= epsilon:
        raise NotDecayed(f"|u(r_max)| = {norm[-1]:.3g} is not below epsilon = {epsilon}")
    above = np.nonzero(norm >= epsilon)[0]
    start = int(above[-1]) + 1 if above.size else 0
    K = sol.K
    C_eps = 1.0 / (1.0 - epsilon)
    C_K = decay_constant(K)
    c = (2.0 * C_eps * C_K) ** -0.5
    z = zeta(K, sol.base_radii)
    x0 = c * z[start]
    xs = c * z[start + 1 :]
    log_bound = (
        2 * math.log(epsilon)
        + np.log(bessel_k0e(xs)) - xs
        - (math.log(bessel_k0e(x0)) - x0)
    )
    n2 = norm[start + 1 :] ** 2
    with np.errstate(divide="ignore"):
        margin = log_bound - np.log(n2)
    min_margin = float(margin.min()) if margin.size else math.inf
    return AsymptoticReport(
        K, float(epsilon), float(sol.base_radii[start]), C_eps, C_K, c,
        bool(min_margin >= 0), min_margin, int(margin.size),
    )


def bessel_tail_ratio(sol: TodaSolution, level: float = 1e-4) -> tuple[float, float]:
    """Ratio ``u_{2,1}(r) / ((1/pi) K0((8/3) r^(3/2)))`` where ``u_{2,1}`` first drops to ``level``.

    Returns ``(r, ratio)`` at parameter ``t = 1``.
    """
    if sol.K != 2:
        raise WrongRank("the Bessel tail ratio is defined for K = 2")
    r = sol.base_radii
    u = sol.u[0]
    k = int(np.argmax(u < level))
    if u[k] >= level:
        raise NotDecayed(f"u_(2,1) never drops below {level}")
    # log-linear interpolation between the bracketing nodes
    la, lb = math.log(u[k - 1]), math.log(u[k])
    w = (math.log(level) - la) / (lb - la)
    rr = math.exp((1 - w) * math.log(r[k - 1]) + w * math.log(r[k]))
    val = float(evaluate_rescaled(sol, 1.0, rr)[0])
    return rr, val / (bessel_k0(8.0 / 3.0 * rr**1.5) / math.pi)
