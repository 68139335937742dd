"""Ramification-cluster data shared by the metric, algebra and linearization code.

A ramification point of a regular Higgs field is described by a partition
``n = K_1 + ... + K_m`` together with the eigenvalue shift ``lambda_(j)`` of
each cluster and the derivative ``f_j'(0)`` of the cluster coordinate
``z_j = f_j(z)`` (only its linear part is modelled: ``z_j = f_j'(0) z``).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import IndexOutOfRange, PartitionError

# separation below which two shifts count as equal
SHIFT_SEPARATION = 1e-12


def alpha(K: int, i: int) -> Fraction:
    """Exact exponent ``(2i - (K+1)) / (2K)`` of the limiting metric."""
    if K < 1:
        raise IndexOutOfRange(f"cluster size must be >= 1, got {K}")
    if not 1 <= i <= K:
        raise IndexOutOfRange(f"index i={i} outside 1..{K}")
    return Fraction(2 * i - (K + 1), 2 * K)


def alpha_table(K: int) -> tuple[Fraction, ...]:
    return tuple(alpha(K, i) for i in range(1, K + 1))


@dataclass(frozen=True)
class Block:
    """One cluster: size ``K``, eigenvalue shift and coordinate derivative."""

    K: int
    shift: complex = 0j
    f_prime0: complex = 1 + 0j

    def __post_init__(self):
        if int(self.K) != self.K or self.K < 1:
            raise PartitionError(f"block size must be a positive integer, got {self.K}")
        if self.f_prime0 == 0:
            raise PartitionError("f'(0) must be nonzero")
        object.__setattr__(self, "K", int(self.K))
        object.__setattr__(self, "shift", complex(self.shift))
        object.__setattr__(self, "f_prime0", complex(self.f_prime0))


@dataclass(frozen=True)
class ClusterPartition:
    """Partition ``n = K_1 + ... + K_m`` with per-block data.

    ``trace_free`` enforces ``sum K_j lambda_(j) = 0`` (SL(n) Higgs fields).
    ``genus`` and ``deg_E`` are carried for the bookkeeping helpers only.
    """

    blocks: tuple[Block, ...]
    trace_free: bool = False
    genus: int | None = None
    deg_E: int = 0
    n: int = field(init=False)

    def __post_init__(self):
        blocks = tuple(self.blocks)
        if not blocks:
            raise PartitionError("a partition needs at least one block")
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "n", sum(b.K for b in blocks))
        if len(blocks) > 1:
            shifts = [b.shift for b in blocks]
            for a in range(len(shifts)):
                for b in range(a + 1, len(shifts)):
                    if abs(shifts[a] - shifts[b]) <= SHIFT_SEPARATION:
                        raise PartitionError(
                            f"blocks {a} and {b} share the eigenvalue shift {shifts[a]}"
                        )
        if self.trace_free:
            trace = sum(b.K * b.shift for b in blocks)
            scale = max(1.0, max(abs(b.shift) for b in blocks))
            if abs(trace) > 1e-12 * scale * self.n:
                raise PartitionError(f"trace-free partition has trace {trace}")

    @classmethod
    def from_sizes(
        cls,
        sizes: Sequence[int],
        shifts: Sequence[complex] | None = None,
        f_prime0: Sequence[complex] | None = None,
        trace_free: bool = True,
        **kwargs,
    ) -> "ClusterPartition":
        """Build a partition from block sizes.

        Without explicit shifts, block ``j`` gets ``lambda_(j) = j`` recentred
        so that ``sum K_j lambda_(j) = 0``.
        """
        sizes = [int(k) for k in sizes]
        if not sizes or min(sizes) < 1:
            raise PartitionError(f"block sizes must be positive integers, got {sizes}")
        if shifts is None:
            n = sum(sizes)
            mean = Fraction(sum(j * k for j, k in enumerate(sizes)), n)
            shifts = [complex(float(j - mean)) for j in range(len(sizes))]
        if f_prime0 is None:
            f_prime0 = [1.0] * len(sizes)
        if not len(shifts) == len(f_prime0) == len(sizes):
            raise PartitionError("sizes, shifts and f_prime0 must have equal length")
        blocks = tuple(Block(k, s, f) for k, s, f in zip(sizes, shifts, f_prime0))
        return cls(blocks, trace_free=trace_free, **kwargs)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(b.K for b in self.blocks)

    @property
    def toda_ranks(self) -> tuple[int, ...]:
        """Distinct block sizes that need a Toda solution (``K >= 2``)."""
        return tuple(sorted({b.K for b in self.blocks if b.K >= 2}))

    def offsets(self) -> list[int]:
        out, pos = [], 0
        for b in self.blocks:
            out.append(pos)
            pos += b.K
        return out

    def alphas(self) -> list[Fraction]:
        return [a for b in self.blocks for a in alpha_table(b.K)]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "blocks": [
                {
                    "K": b.K,
                    "shift": [b.shift.real, b.shift.imag],
                    "f_prime0": [b.f_prime0.real, b.f_prime0.imag],
                }
                for b in self.blocks
            ],
            "trace_free": self.trace_free,
            "genus": self.genus,
            "deg_E": self.deg_E,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ClusterPartition":
        blocks = tuple(
            Block(
                int(b["K"]),
                complex(*b.get("shift", (0.0, 0.0))),
                complex(*b.get("f_prime0", (1.0, 0.0))),
            )
            for b in data["blocks"]
        )
        part = cls(
            blocks,
            trace_free=bool(data.get("trace_free", False)),
            genus=data.get("genus"),
            deg_E=int(data.get("deg_E", 0)),
        )
        if "n" in data and int(data["n"]) != part.n:
            raise PartitionError(f"declared n={data['n']} but blocks sum to {part.n}")
        return part


_ITEM = re.compile(r"^\s*(\d+)\s*(?:@\s*(.+?))?\s*$")


def parse_partition(text: str, trace_free: bool | None = None) -> ClusterPartition:
    """Parse ``"3,3,2,1,1,1"`` or ``"2@0+1j,1@-2j"`` style descriptors.

    Shifts use Python complex syntax; ``i`` is accepted for the imaginary
    unit.  If no shift is given anywhere, default shifts are assigned (see
    :meth:`ClusterPartition.from_sizes`).
    """
    sizes: list[int] = []
    shifts: list[complex | None] = []
    for item in text.split(","):
        m = _ITEM.match(item)
        if not m:
            raise PartitionError(f"cannot parse partition item {item!r}")
        sizes.append(int(m.group(1)))
        if m.group(2) is None:
            shifts.append(None)
        else:
            raw = m.group(2).replace(" ", "").replace("i", "j")
            try:
                shifts.append(complex(raw))
            except ValueError as exc:
                raise PartitionError(f"bad shift {m.group(2)!r}") from exc
    if all(s is None for s in shifts):
        return ClusterPartition.from_sizes(
            sizes, trace_free=True if trace_free is None else trace_free
        )
    if any(s is None for s in shifts):
        raise PartitionError("give a shift for every block or for none")
    return ClusterPartition.from_sizes(sizes, shifts=shifts, trace_free=bool(trace_free))


def iter_block_slices(p: ClusterPartition) -> Iterable[tuple[Block, slice]]:
    for b, off in zip(p.blocks, p.offsets()):
        yield b, slice(off, off + b.K)
