"""Chimera hardware graph: an M x N grid of K_{K,K} unit cells.

Each cell holds 2K qubits split into a "vertical" partition (u = 0) and a
"horizontal" partition (u = 1).  Qubit ids are

    id = (row * N + col) * 2K + u * K + k,   k in 0..K-1.

Within a cell every u=0 qubit couples to every u=1 qubit.  Across cells,
u=0 qubits couple to the same-k qubit of the cell below, u=1 qubits to the
same-k qubit of the cell to the right.  Masked qubits exist as ids but
carry no usable edges.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

from .errors import ValidationError


@dataclass(frozen=True)
class ChimeraGraph:
    m: int
    n: int
    k: int = 4
    masked: frozenset[int] = frozenset()

    def __post_init__(self):
        if self.m < 1 or self.n < 1 or self.k < 1:
            raise ValidationError("Chimera dimensions must be >= 1")
        bad = [q for q in self.masked if not (0 <= q < self.num_sites)]
        if bad:
            raise ValidationError(f"masked ids out of range: {sorted(bad)}")

    @property
    def num_sites(self) -> int:
        return self.m * self.n * 2 * self.k

    @property
    def num_usable(self) -> int:
        return self.num_sites - len(self.masked)

    def coords(self, q: int) -> tuple[int, int, int, int]:
        """id -> (row, col, u, k)."""
        if not (0 <= q < self.num_sites):
            raise ValidationError(f"qubit id {q} out of range")
        cell, within = divmod(q, 2 * self.k)
        row, col = divmod(cell, self.n)
        u, kk = divmod(within, self.k)
        return row, col, u, kk

    def qubit_id(self, row: int, col: int, u: int, kk: int) -> int:
        if not (0 <= row < self.m and 0 <= col < self.n
                and u in (0, 1) and 0 <= kk < self.k):
            raise ValidationError(f"bad coordinates {(row, col, u, kk)}")
        return (row * self.n + col) * 2 * self.k + u * self.k + kk

    def is_usable(self, q: int) -> bool:
        return 0 <= q < self.num_sites and q not in self.masked

    def usable_qubits(self) -> list[int]:
        return [q for q in range(self.num_sites) if q not in self.masked]

    def has_edge(self, a: int, b: int) -> bool:
        if a == b or not (self.is_usable(a) and self.is_usable(b)):
            return False
        ra, ca, ua, ka = self.coords(a)
        rb, cb, ub, kb = self.coords(b)
        if (ra, ca) == (rb, cb):
            return ua != ub
        if ka != kb or ua != ub:
            return False
        if ua == 0:   # vertical links join cells in adjacent rows
            return ca == cb and abs(ra - rb) == 1
        return ra == rb and abs(ca - cb) == 1

    def neighbors(self, q: int) -> list[int]:
        if not self.is_usable(q):
            return []
        row, col, u, kk = self.coords(q)
        out = []
        other = 1 - u
        for j in range(self.k):
            out.append(self.qubit_id(row, col, other, j))
        if u == 0:
            if row > 0:
                out.append(self.qubit_id(row - 1, col, 0, kk))
            if row + 1 < self.m:
                out.append(self.qubit_id(row + 1, col, 0, kk))
        else:
            if col > 0:
                out.append(self.qubit_id(row, col - 1, 1, kk))
            if col + 1 < self.n:
                out.append(self.qubit_id(row, col + 1, 1, kk))
        return sorted(b for b in out if b not in self.masked)

    def edges(self) -> Iterator[tuple[int, int]]:
        for q in range(self.num_sites):
            if q in self.masked:
                continue
            for b in self.neighbors(q):
                if q < b:
                    yield (q, b)

    def num_edges(self) -> int:
        return sum(1 for _ in self.edges())

    def to_dict(self):
        return {"M": self.m, "N": self.n, "K": self.k,
                "masked": sorted(self.masked)}

    @classmethod
    def from_dict(cls, data) -> "ChimeraGraph":
        return cls(int(data["M"]), int(data["N"]), int(data.get("K", 4)),
                   frozenset(int(q) for q in data.get("masked", ())))


def build_chimera(m: int, n: int, k: int = 4,
                  masked=()) -> ChimeraGraph:
    return ChimeraGraph(m, n, k, frozenset(int(q) for q in masked))
