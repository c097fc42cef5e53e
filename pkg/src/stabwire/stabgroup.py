"""Sign-free stabilizer groups, their bipartite canonical form, and the
postselection primitives used to contract stabilizer tensor networks."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .symplectic import (
    combine,
    kernel_rows,
    omega,
    pauli_from_str,
    pauli_to_str,
    rank_rows,
    reduce_against,
    row_basis,
    rref_rows,
    select_qubits,
    single,
    symplectic_complement_rows,
)


# ---------------------------------------------------------------- int-level ops


def postselect(rows: list[int], op: int, n: int) -> list[int]:
    """Sign-free postselection of the +1 eigenspace of ``op``.

    The first generator anticommuting with ``op`` is multiplied into every
    other anticommuting generator and then replaced by ``op``.
    """
    first = -1
    out = []
    for r in rows:
        if omega(r, op, n):
            if first < 0:
                first = r
                continue
            r ^= first
        out.append(r)
    out.append(op)
    return out


def drop_qubits(rows: Iterable[int], n: int, drop: Sequence[int]) -> list[int]:
    """Remove qubits whose every surviving row already acts trivially on them.

    Rows that vanish are discarded and the rest is re-reduced to full rank.
    """
    gone = set(drop)
    keep = [q for q in range(n) if q not in gone]
    return rref_rows(select_qubits(r, n, keep) for r in rows)


def project_plus_rows(rows: list[int], n: int, q: int) -> list[int]:
    xq = 1 << q
    rows = postselect(rows, xq, n)
    rows = [r ^ xq if r & xq else r for r in rows]
    return drop_qubits(rows, n, [q])


def contract_bond_rows(rows: list[int], n: int, q1: int, q2: int) -> list[int]:
    """Contract qubits ``q1`` and ``q2`` with the bond state sum_i |ii>."""
    xx = (1 << q1) | (1 << q2)
    zz = xx << n
    rows = postselect(rows, xx, n)
    rows = postselect(rows, zz, n)
    x1 = 1 << q1
    z1 = x1 << n
    cleaned = []
    for r in rows:
        if r & x1:
            r ^= xx
        if r & z1:
            r ^= zz
        cleaned.append(r)
    return drop_qubits(cleaned, n, [q1, q2])


def split(v: int, n: int, cut: int) -> tuple[int, int]:
    """Split an n-qubit Pauli into its [0, cut) and [cut, n) parts."""
    left = select_qubits(v, n, range(cut))
    right = select_qubits(v, n, range(cut, n))
    return left, right


def center_rows(gens: Sequence[int], n: int) -> list[int]:
    """Elements of span(gens) commuting with every generator, in RREF."""
    basis = list(row_basis(gens).values())
    gram_cols = []
    for g in basis:
        col = 0
        for k, h in enumerate(basis):
            if omega(g, h, n):
                col |= 1 << k
        gram_cols.append(col)
    return rref_rows(combine(basis, c) for c in kernel_rows(gram_cols))


def symplectic_pairs(vectors: Sequence[int], form) -> tuple[list[tuple[int, int]], list[int]]:
    """Symplectic Gram-Schmidt with respect to ``form(u, v)``.

    Returns hyperbolic pairs (s, t) with form(s, t) = 1, mutually orthogonal,
    and the leftover vectors, which span the radical of the form on the span.
    """
    work = list(vectors)
    pairs = []
    rest = []
    while work:
        s = work.pop(0)
        j = next((i for i, t in enumerate(work) if form(s, t)), -1)
        if j < 0:
            rest.append(s)
            continue
        t = work.pop(j)
        pairs.append((s, t))
        fixed = []
        for u in work:
            if form(u, t):
                u ^= s
            if form(u, s):
                u ^= t
            fixed.append(u)
        work = fixed
    return pairs, rest


# ---------------------------------------------------------------- public types


@dataclass(frozen=True)
class StabilizerGroup:
    """Isotropic subspace of F2^(2n), generators kept in RREF at full rank."""

    n: int
    gens: tuple[int, ...]

    def __post_init__(self):
        for i, a in enumerate(self.gens):
            for b in self.gens[i + 1 :]:
                if omega(a, b, self.n):
                    raise ValueError("generators do not commute")

    @classmethod
    def from_rows(cls, rows: Iterable[int], n: int) -> "StabilizerGroup":
        return cls(n, tuple(rref_rows(rows)))

    @classmethod
    def from_strings(cls, paulis: Sequence[str]) -> "StabilizerGroup":
        if not paulis:
            raise ValueError("need at least one Pauli to fix the qubit count")
        n = len(paulis[0])
        if any(len(p) != n for p in paulis):
            raise ValueError("Pauli strings of unequal length")
        return cls.from_rows((pauli_from_str(p) for p in paulis), n)

    @property
    def rank(self) -> int:
        return len(self.gens)

    def is_lagrangian(self) -> bool:
        return self.rank == self.n

    def contains(self, v: int) -> bool:
        return rank_rows(self.gens + (v,)) == self.rank

    def same_span(self, other: "StabilizerGroup") -> bool:
        return self.n == other.n and self.gens == other.gens

    def to_strings(self) -> list[str]:
        return [pauli_to_str(g, self.n) for g in self.gens]

    def format(self) -> str:
        return "\n".join(self.to_strings()) + "\n\n"


def parse_group(text: str) -> StabilizerGroup:
    """Read one Pauli string per line; a blank line ends the group."""
    lines = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            if lines:
                break
            continue
        lines.append(line)
    return StabilizerGroup.from_strings(lines)


def center(gens: Sequence[int], n: int) -> list[int]:
    return center_rows(gens, n)


@dataclass(frozen=True)
class CanonicalBipartiteForm:
    """Generators split as left-only (``a``), right-only (``b``) and ``p``
    locally anticommuting pairs (gL, gbarL, gR, gbarR).

    ``mixed`` holds radical elements that are neither left- nor right-only;
    it is empty whenever the source group is maximally isotropic.
    """

    n_left: int
    n_right: int
    a: tuple[int, ...]
    b: tuple[int, ...]
    pairs: tuple[tuple[int, int, int, int], ...]
    mixed: tuple[int, ...] = ()

    @property
    def p(self) -> int:
        return len(self.pairs)

    def generators(self) -> list[int]:
        """Reassemble the full-register generators."""
        nl, nr = self.n_left, self.n_right
        n = nl + nr

        def join(left: int, right: int) -> int:
            ml = (1 << nl) - 1
            mr = (1 << nr) - 1
            x = (left & ml) | ((right & mr) << nl)
            z = (left >> nl) | ((right >> nr) << nl)
            return x | (z << n)

        out = [join(a, 0) for a in self.a]
        for gl, gbl, gr, gbr in self.pairs:
            out.append(join(gl, gr))
            out.append(join(gbl, gbr))
        out += [join(0, b) for b in self.b]
        out += list(self.mixed)
        return out

    def left_span(self) -> list[int]:
        """Generators of S_L: the a's and the left halves of the pairs."""
        rows = list(self.a)
        for gl, gbl, _, _ in self.pairs:
            rows += [gl, gbl]
        return rows


def side_form(n: int, cut: int):
    """Symplectic form restricted to qubits [0, cut) of an n-qubit register."""
    mask = (1 << cut) - 1

    def form(u: int, v: int) -> int:
        return ((((u & (v >> n)) ^ ((u >> n) & v)) & mask).bit_count()) & 1

    return form


def canonical_bipartite_form(group: StabilizerGroup, cut: int) -> CanonicalBipartiteForm:
    """Bring ``group`` to left-only / pairs / right-only form across ``cut``.

    Pairs come from a symplectic Gram-Schmidt of the generators under the
    left-restricted form; what is left spans its radical, which splits into
    left-only and right-only elements for maximally isotropic groups.
    """
    if not 0 <= cut <= group.n:
        raise ValueError(f"cut {cut} outside 0..{group.n}")
    n = group.n
    nl, nr = cut, n - cut
    left_q = range(cut)
    right_q = range(cut, n)

    pairs, rest = symplectic_pairs(group.gens, side_form(n, cut))

    lefts = [select_qubits(v, n, left_q) for v in rest]
    rights = [select_qubits(v, n, right_q) for v in rest]
    a_ker = kernel_rows(rights)
    b_ker = kernel_rows(lefts)
    a = rref_rows(combine(lefts, c) for c in a_ker)
    b = rref_rows(combine(rights, c) for c in b_ker)
    mixed: list[int] = []
    if len(a) + len(b) < len(rest):
        # radical is not spanned by one-sided elements: keep a complement
        known = row_basis([combine(rest, c) for c in a_ker + b_ker])
        for v in rest:
            if reduce_against(v, known):
                mixed.append(v)
                known = row_basis(list(known.values()) + [v])
    quad = tuple(
        (
            select_qubits(s, n, left_q),
            select_qubits(t, n, left_q),
            select_qubits(s, n, right_q),
            select_qubits(t, n, right_q),
        )
        for s, t in pairs
    )
    return CanonicalBipartiteForm(nl, nr, tuple(a), tuple(b), quad, tuple(mixed))


def pair_completion(zl: Sequence[int], n: int) -> list[tuple[int, int]]:
    """Hyperbolic pairs completing isotropic ``zl`` to its centralizer."""
    for i, u in enumerate(zl):
        for v in zl[i + 1 :]:
            if omega(u, v, n):
                raise ValueError("zl is not isotropic")
    perp = symplectic_complement_rows(zl, n)
    pairs, _ = symplectic_pairs(perp, lambda u, v: omega(u, v, n))
    return pairs


def project_plus(group: StabilizerGroup, q: int) -> StabilizerGroup:
    if not 0 <= q < group.n:
        raise ValueError(f"qubit {q} outside 0..{group.n - 1}")
    return StabilizerGroup(group.n - 1, tuple(project_plus_rows(list(group.gens), group.n, q)))


def contract_bond(group: StabilizerGroup, q1: int, q2: int) -> StabilizerGroup:
    if q1 == q2:
        raise ValueError("bond needs two distinct qubits")
    for q in (q1, q2):
        if not 0 <= q < group.n:
            raise ValueError(f"qubit {q} outside 0..{group.n - 1}")
    rows = contract_bond_rows(list(group.gens), group.n, q1, q2)
    return StabilizerGroup(group.n - 2, tuple(rows))


def tensor_product(*groups: StabilizerGroup) -> StabilizerGroup:
    n = sum(g.n for g in groups)
    rows = []
    offset = 0
    for g in groups:
        for r in g.gens:
            x = r & ((1 << g.n) - 1)
            z = r >> g.n
            rows.append((x << offset) | (z << (n + offset)))
        offset += g.n
    return StabilizerGroup.from_rows(rows, n)


def bell_pair(n: int, q1: int, q2: int) -> list[int]:
    """Generators XX and ZZ on qubits q1, q2 of an n-qubit register."""
    return [single("X", q1, n) ^ single("X", q2, n), single("Z", q1, n) ^ single("Z", q2, n)]
