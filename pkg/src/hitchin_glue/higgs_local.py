"""Algebraic data of regular Higgs fields near a ramification point.

Eigenvalues are handled as coefficient functions of ``dz`` in a fixed chart;
the form factor ``(dz)^K`` is a constant multiplier and is dropped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import AmbiguousClustering, InvalidConfig
from .partition import ClusterPartition


@dataclass(frozen=True)
class CompanionBlock:
    """``lambda_shift Id`` plus ones on the superdiagonal and ``z`` in the corner."""

    K: int
    z: complex = 0j
    lambda_shift: complex = 0j

    def __post_init__(self):
        if int(self.K) != self.K or self.K < 1:
            raise InvalidConfig(f"K must be a positive integer, got {self.K}")


def companion_matrix(b: CompanionBlock) -> np.ndarray:
    K = b.K
    M = np.eye(K, dtype=complex) * b.lambda_shift
    if K == 1:
        M[0, 0] += b.z
        return M
    M[np.arange(K - 1), np.arange(1, K)] = 1.0
    M[K - 1, 0] = b.z
    return M


def char_poly(b: CompanionBlock) -> np.ndarray:
    """Coefficients of ``det(lambda I - M)``, highest degree first.

    Equals ``(lambda - c)^K - z`` for shift ``c``.
    """
    K, c = b.K, complex(b.lambda_shift)
    coeffs = np.array([math.comb(K, k) * (-c) ** k for k in range(K + 1)], dtype=complex)
    coeffs[-1] -= b.z
    return coeffs


def block_eigenvalues(b: CompanionBlock) -> np.ndarray:
    """Closed-form roots ``c + omega^k z^(1/K)``."""
    if b.K == 1:
        return np.array([b.lambda_shift + b.z], dtype=complex)
    root = complex(b.z) ** (1.0 / b.K) if b.z != 0 else 0j
    omega = np.exp(2j * np.pi * np.arange(b.K) / b.K)
    return b.lambda_shift + omega * root


# ---------------------------------------------------------------- discriminant


def discriminant_order(p: ClusterPartition) -> int:
    """Vanishing order ``sum_j (K_j - 1)`` of the discriminant at the point."""
    return sum(b.K - 1 for b in p.blocks)


def partition_eigenvalues(p: ClusterPartition, z: complex) -> np.ndarray:
    """All ``n`` eigenvalue coefficients at ``z`` (block ``j`` uses ``z_j = f_j'(0) z``)."""
    out = []
    for b in p.blocks:
        zj = b.f_prime0 * z if b.K >= 2 else 0j
        out.append(block_eigenvalues(CompanionBlock(b.K, zj, b.shift)))
    return np.concatenate(out)


def numeric_discriminant(p: ClusterPartition, z: complex) -> complex:
    """``prod_(a<b) (lambda_a - lambda_b)^2`` over the eigenvalues at ``z``."""
    lam = partition_eigenvalues(p, z)
    iu = np.triu_indices(lam.size, 1)
    return complex(np.prod((lam[iu[0]] - lam[iu[1]]) ** 2))


def discriminant_slope(
    p: ClusterPartition, theta: float = 0.3, s_values: Sequence[float] = (1e-9, 1e-10, 1e-11, 1e-12)
) -> float:
    """Slope of ``log|Delta|`` against ``log s`` along ``z = s e^(i theta)``."""
    s = np.asarray(s_values, dtype=float)
    logs = [math.log(abs(numeric_discriminant(p, v * np.exp(1j * theta)))) for v in s]
    return float(np.polyfit(np.log(s), logs, 1)[0])


# ---------------------------------------------------------------- strata


@dataclass(frozen=True)
class StrataCount:
    """Numbers ``N_K`` of index-``K`` ramification points (``K = 2..n``)."""

    n: int
    g: int
    N: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self):
        for K, v in self.N.items():
            if not 2 <= K <= self.n:
                raise InvalidConfig(f"stratum index K = {K} outside 2..{self.n}")
            if v < 0:
                raise InvalidConfig(f"N_{K} must be nonnegative")

    def weighted_total(self) -> int:
        return sum((K - 1) * v for K, v in self.N.items())

    def required_total(self) -> int:
        return 2 * (self.n**2 - self.n) * (self.g - 1)

    def to_dict(self) -> dict:
        return {"n": self.n, "g": self.g, "N": {str(k): v for k, v in sorted(self.N.items())}}

    @classmethod
    def from_dict(cls, data: dict) -> "StrataCount":
        return cls(int(data["n"]), int(data["g"]), {int(k): int(v) for k, v in data["N"].items()})


def validate_strata(s: StrataCount) -> bool:
    """True iff ``sum_K (K-1) N_K = 2(n^2 - n)(g - 1)``."""
    return s.weighted_total() == s.required_total()


def canonical_weights(s: StrataCount) -> list[Fraction]:
    """Parabolic weight ``(1-K)/2`` once per index-``K`` point."""
    return [Fraction(1 - K, 2) for K, v in sorted(s.N.items()) for _ in range(v)]


def parabolic_degree(n: int, g: int, deg_E: int, weights: Iterable[Fraction]) -> Fraction:
    """``deg E + (n^2 - n)(g - 1) + sum(weights)`` in exact arithmetic."""
    total = Fraction(deg_E + (n * n - n) * (g - 1))
    for w in weights:
        total += Fraction(w)
    return total


# ---------------------------------------------------------------- clustering


@dataclass(frozen=True)
class Clustering:
    sizes: tuple[int, ...]
    means: tuple[complex, ...]
    members: tuple[tuple[int, ...], ...]


def eigenvalue_clusters(samples: Sequence[complex], tol: float = 1e-6, scale: float = 1.0) -> Clustering:
    """Single-linkage grouping of eigenvalue coefficients at distance ``tol * scale``.

    Clusters are listed in order of their first member.  Raises
    :class:`AmbiguousClustering` when two clusters come within twice the
    linkage distance, since a small perturbation could merge them.
    """
    lam = np.asarray(samples, dtype=complex).ravel()
    if lam.size == 0:
        raise InvalidConfig("need at least one eigenvalue")
    eps = tol * scale
    parent = list(range(lam.size))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    dist = np.abs(lam[:, None] - lam[None, :])
    for a, b in zip(*np.nonzero(np.triu(dist <= eps, 1))):
        parent[find(a)] = find(b)
    roots = [find(a) for a in range(lam.size)]
    order: dict[int, list[int]] = {}
    for a, r in enumerate(roots):
        order.setdefault(r, []).append(a)
    groups = list(order.values())
    for x in range(len(groups)):
        for y in range(x + 1, len(groups)):
            gap = dist[np.ix_(groups[x], groups[y])].min()
            if gap <= 2 * eps:
                raise AmbiguousClustering(
                    f"clusters {x} and {y} are {gap:.3g} apart, within 2*tol = {2 * eps:.3g}"
                )
    return Clustering(
        tuple(len(gp) for gp in groups),
        tuple(complex(lam[gp].mean()) for gp in groups),
        tuple(tuple(gp) for gp in groups),
    )
