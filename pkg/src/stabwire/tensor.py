"""[5,1] stabilizer tensors: enumeration, gauge action and orbit reduction.

A tensor is a Lagrangian subspace of F2^10 with qubits ordered
(u, d, l, r, phys).  Gauge transformations act on the virtual legs by a
single-qubit symplectic matrix on one end of each bond and its
bond-preserving dual on the other end, the same at every site.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from .stabgroup import StabilizerGroup
from .symplectic import omega, pauli_from_str, pauli_letter, pauli_to_str, rref_rows

LEGS = ("u", "d", "l", "r", "phys")
U, D, L, R, PHYS = range(5)
NQ = 5
FILE_HEADER = "stabtensor v1 legs=u,d,l,r,phys"


@dataclass(frozen=True, order=True)
class StabilizerTensor:
    """Five RREF generator rows of a Lagrangian subspace of F2^10."""

    rows: tuple[int, ...]

    def __post_init__(self):
        if len(self.rows) != NQ or rref_rows(self.rows) != list(self.rows):
            raise ValueError("tensor rows must be 5 independent rows in RREF")
        for i, a in enumerate(self.rows):
            for b in self.rows[i + 1 :]:
                if omega(a, b, NQ):
                    raise ValueError("tensor generators do not commute")

    @classmethod
    def from_rows(cls, rows: Iterable[int]) -> "StabilizerTensor":
        red = rref_rows(rows)
        if len(red) != NQ:
            raise ValueError(f"rank {len(red)} != 5: not a Lagrangian")
        return cls(tuple(red))

    @classmethod
    def from_strings(cls, paulis: Sequence[str]) -> "StabilizerTensor":
        for p in paulis:
            if len(p) != NQ:
                raise ValueError(f"Pauli {p!r} does not have 5 letters")
        return cls.from_rows(pauli_from_str(p) for p in paulis)

    @property
    def group(self) -> StabilizerGroup:
        return StabilizerGroup(NQ, self.rows)

    def to_strings(self) -> list[str]:
        return [pauli_to_str(r, NQ) for r in self.rows]

    def __str__(self) -> str:
        return " ".join(self.to_strings())


def format_tensor(t: StabilizerTensor) -> str:
    return FILE_HEADER + "\n" + "\n".join(t.to_strings()) + "\n"


def parse_tensor(text: str) -> StabilizerTensor:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines or lines[0] != FILE_HEADER:
        raise ValueError(f"missing header line {FILE_HEADER!r}")
    body = lines[1:]
    if len(body) != NQ:
        raise ValueError(f"expected 5 generators, found {len(body)}")
    return StabilizerTensor.from_strings(body)


# ---------------------------------------------------------------- enumeration


def lagrangian_count(n: int) -> int:
    out = 1
    for k in range(1, n + 1):
        out *= 2**k + 1
    return out


def enumerate_lagrangian_rows(n: int) -> list[tuple[int, ...]]:
    """All Lagrangian subspaces of F2^(2n) as RREF row tuples, sorted.

    Depth-first over pivot profiles; rows are filled from the last pivot
    upwards so each new row only has to commute with the rows below it.
    """
    width = 2 * n
    found: list[tuple[int, ...]] = []
    for pivots in itertools.combinations(range(width), n):
        pivot_mask = sum(1 << p for p in pivots)
        options = []
        for p in pivots:
            free = [j for j in range(p + 1, width) if not (pivot_mask >> j) & 1]
            opts = []
            for bits in range(1 << len(free)):
                row = 1 << p
                for k, j in enumerate(free):
                    if (bits >> k) & 1:
                        row |= 1 << j
                opts.append(row)
            options.append(opts)

        chosen: list[int] = [0] * n

        def extend(i: int) -> None:
            if i < 0:
                found.append(tuple(chosen))
                return
            for row in options[i]:
                if all(not omega(row, chosen[k], n) for k in range(i + 1, n)):
                    chosen[i] = row
                    extend(i - 1)

        extend(n - 1)
    found.sort()
    return found


def enumerate_lagrangians() -> list[StabilizerTensor]:
    return [StabilizerTensor(rows) for rows in enumerate_lagrangian_rows(NQ)]


# ---------------------------------------------------------------- gauge group

# Each invertible 2x2 matrix over F2 permutes the letters {X, Z, Y} (codes
# 1, 2, 3) and fixes I, so a matrix is stored as a tuple image[code].
GL2 = tuple(
    (0,) + perm for perm in itertools.permutations((1, 2, 3))
)


def _apply_letter_maps(v: int, n: int, maps: Sequence[tuple[int, ...]]) -> int:
    out = 0
    for q, m in enumerate(maps):
        c = m[pauli_letter(v, n, q)]
        if c & 1:
            out |= 1 << q
        if c & 2:
            out |= 1 << (n + q)
    return out


def bond_dual(s: tuple[int, ...]) -> tuple[int, ...]:
    """The unique letter map s* with (s on one end, s* on the other) fixing
    the bond group <XX, ZZ> of sum_i |ii>."""
    bond = set(rref_rows([pauli_from_str("XX"), pauli_from_str("ZZ")]))
    for t in GL2:
        image = rref_rows(_apply_letter_maps(g, 2, (s, t)) for g in bond)
        if set(image) == bond:
            return t
    raise AssertionError("no bond dual found")


@dataclass(frozen=True)
class GaugeElement:
    """Letter maps for the four virtual legs (phys is never touched)."""

    s_v: tuple[int, ...]
    s_v_dual: tuple[int, ...]
    s_h: tuple[int, ...]
    s_h_dual: tuple[int, ...]

    @classmethod
    def linked(cls, s_v: tuple[int, ...], s_h: tuple[int, ...]) -> "GaugeElement":
        return cls(s_v, bond_dual(s_v), s_h, bond_dual(s_h))

    def leg_maps(self) -> tuple[tuple[int, ...], ...]:
        ident = GL2[0]
        return (self.s_v, self.s_v_dual, self.s_h, self.s_h_dual, ident)

    def apply(self, t: StabilizerTensor) -> StabilizerTensor:
        table = _gauge_table(self.leg_maps())
        return StabilizerTensor(tuple(rref_rows(table[r] for r in t.rows)))


@lru_cache(maxsize=None)
def _gauge_table(maps: tuple[tuple[int, ...], ...]) -> tuple[int, ...]:
    return tuple(_apply_letter_maps(v, NQ, maps) for v in range(1 << (2 * NQ)))


def gauge_group(variant: str = "linked") -> list[GaugeElement]:
    """Gauge group elements.

    ``linked``: one matrix per bond direction with its dual on the opposite
    leg (order 36).  ``per_leg``: independent matrices on all four virtual
    legs (order 1296), kept for comparison.
    """
    if variant == "linked":
        return [GaugeElement.linked(sv, sh) for sv in GL2 for sh in GL2]
    if variant == "per_leg":
        return [GaugeElement(a, b, c, d) for a in GL2 for b in GL2 for c in GL2 for d in GL2]
    raise ValueError(f"unknown gauge variant {variant!r}")


def _orbit_rows(rows: tuple[int, ...], tables: Sequence[tuple[int, ...]]) -> set[tuple[int, ...]]:
    return {tuple(rref_rows(tab[r] for r in rows)) for tab in tables}


def _tables(variant: str) -> list[tuple[int, ...]]:
    return [_gauge_table(g.leg_maps()) for g in gauge_group(variant)]


def gauge_orbit(t: StabilizerTensor, variant: str = "linked") -> set[StabilizerTensor]:
    return {StabilizerTensor(r) for r in _orbit_rows(t.rows, _tables(variant))}


def canonical_representative(t: StabilizerTensor, variant: str = "linked") -> StabilizerTensor:
    return min(gauge_orbit(t, variant))


def orbit_table(tensors: Sequence[StabilizerTensor], variant: str = "linked") -> list[int]:
    """canonical[i] = ordinal of the smallest member of tensor i's orbit.

    ``tensors`` must be the sorted enumeration, so the smallest member is
    also the lexicographically minimal one.
    """
    index = {t.rows: i for i, t in enumerate(tensors)}
    tables = _tables(variant)
    canonical = [-1] * len(tensors)
    for i, t in enumerate(tensors):
        if canonical[i] >= 0:
            continue
        for rows in _orbit_rows(t.rows, tables):
            canonical[index[rows]] = i
    return canonical


@dataclass(frozen=True)
class TensorId:
    ordinal: int
    canonical: int


def representatives(tensors: Sequence[StabilizerTensor], canonical: Sequence[int]) -> list[int]:
    """Ordinals of the canonical representatives, ascending."""
    return [i for i, c in enumerate(canonical) if c == i]


# ---------------------------------------------------------------- named tensors


def ghz_tensor() -> StabilizerTensor:
    return StabilizerTensor.from_strings(["XXXXX", "ZZIII", "IZZII", "IIZZI", "IIIZZ"])


def cluster_tensor() -> StabilizerTensor:
    """2D cluster-state tensor: u and l copy the site value, d and r pick up
    the neighbours' controlled-Z phases."""
    return StabilizerTensor.from_strings(["ZIIIZ", "IIZIZ", "IXIIZ", "IIIXZ", "XZXZX"])


def product_tensor() -> StabilizerTensor:
    return StabilizerTensor.from_strings(["ZIIII", "IZIII", "IIZII", "IIIZI", "IIIIX"])


def find_fixtures(reps: Sequence[StabilizerTensor], n_max: int = 6, d_max: int = 6) -> dict[str, StabilizerTensor]:
    """Pick cluster, GHZ and toric-code representatives by capacity signature.

    Cluster (C = n) and GHZ (C = 1) are the representatives of the orbits of
    ``cluster_tensor`` and ``ghz_tensor``; toric (C = n - 1) is the first
    representative with that signature.  Raises ``LookupError`` if a
    fixture is missing or lacks its signature.
    """
    from .wire import capacities

    targets = {
        "cluster": lambda n: n,
        "ghz": lambda n: 1,
        "toric": lambda n: n - 1,
    }
    pinned = {"cluster": gauge_orbit(cluster_tensor()), "ghz": gauge_orbit(ghz_tensor())}

    def has_signature(t, f):
        return all(capacities(t, n, d_max) == [f(n)] * d_max for n in range(1, n_max + 1))

    found: dict[str, StabilizerTensor] = {}
    for t in reps:
        for name, orbit in pinned.items():
            if name not in found and t in orbit:
                found[name] = t
        if "toric" not in found and has_signature(t, targets["toric"]):
            found["toric"] = t
        if len(found) == 3:
            break
    for name, f in targets.items():
        if name not in found:
            raise LookupError(f"no representative for the {name} fixture")
        if not has_signature(found[name], f):
            raise LookupError(f"{name} representative lacks its capacity signature")
    return found
