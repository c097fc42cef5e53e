"""Bit-packed linear algebra over F2 and the symplectic form on F2^(2n).

An n-qubit Pauli (modulo phase) is stored as a Python ``int`` of 2n bits:
bit ``i`` is the X component of qubit ``i`` and bit ``n + i`` its Z
component.  A binary matrix is a tuple of such row ints plus a column count;
column ``j`` is bit ``j`` and pivots are taken at the lowest set bit.

The plain-int functions (``omega``, ``rref_rows``, ...) are the hot path used
by every higher module.  ``PauliVector`` and ``BinaryMatrix`` wrap them for
the public API and for I/O.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

_LETTERS = "IXZY"  # index = x | (z << 1)


def omega(a: int, b: int, n: int) -> int:
    """Symplectic form of two packed n-qubit Paulis (0 = commute)."""
    mask = (1 << n) - 1
    return ((((a & mask) & (b >> n)) ^ ((a >> n) & b & mask)).bit_count()) & 1


def weight(a: int, n: int) -> int:
    """Number of qubits on which ``a`` acts nontrivially."""
    mask = (1 << n) - 1
    return ((a & mask) | (a >> n)).bit_count()


# ---------------------------------------------------------------- row algebra


def rref_rows(rows: Iterable[int]) -> list[int]:
    """Reduced row echelon form of a list of row ints, zero rows dropped.

    Rows are returned sorted by pivot (lowest set bit), and every pivot
    column is zero in all other rows.
    """
    pivots: list[tuple[int, int]] = []  # (pivot bit, row)
    for r in rows:
        for p, pr in pivots:
            if r & p:
                r ^= pr
        if not r:
            continue
        low = r & -r
        pivots = [(p, pr ^ r if pr & low else pr) for p, pr in pivots]
        pivots.append((low, r))
    pivots.sort()
    return [pr for _, pr in pivots]


def row_basis(rows: Iterable[int]) -> dict[int, int]:
    """Echelon basis of the row span keyed by each row's top bit."""
    basis: dict[int, int] = {}
    for r in rows:
        while r:
            t = r.bit_length() - 1
            b = basis.get(t)
            if b is None:
                basis[t] = r
                break
            r ^= b
    return basis


def rank_rows(rows: Iterable[int]) -> int:
    return len(row_basis(rows))


def reduce_against(v: int, basis: dict[int, int]) -> int:
    """Reduce ``v`` modulo a span given in ``row_basis`` form."""
    while v:
        b = basis.get(v.bit_length() - 1)
        if b is None:
            return v
        v ^= b
    return 0


def in_span(v: int, rows: Iterable[int]) -> bool:
    return reduce_against(v, row_basis(rows)) == 0


def _tracked_basis(rows: Sequence[int]):
    """Echelon basis with combination masks, plus the kernel masks."""
    basis: dict[int, tuple[int, int]] = {}
    kernel: list[int] = []
    for i, r in enumerate(rows):
        c = 1 << i
        while r:
            t = r.bit_length() - 1
            hit = basis.get(t)
            if hit is None:
                basis[t] = (r, c)
                break
            r ^= hit[0]
            c ^= hit[1]
        if not r:
            kernel.append(c)
    return basis, kernel


def solve_rows(rows: Sequence[int], v: int) -> int | None:
    """Coefficient bitmask ``c`` with XOR of ``rows[i]`` for set bits i == v.

    Returns ``None`` when ``v`` is outside the row span.
    """
    basis, _ = _tracked_basis(rows)
    coeff = 0
    while v:
        hit = basis.get(v.bit_length() - 1)
        if hit is None:
            return None
        v ^= hit[0]
        coeff ^= hit[1]
    return coeff


class SpanSolver:
    """Reusable decomposition of vectors over a fixed list of rows."""

    def __init__(self, rows: Sequence[int]):
        self.rows = list(rows)
        self._basis, self.kernel = _tracked_basis(self.rows)

    @property
    def rank(self) -> int:
        return len(self._basis)

    def solve(self, v: int) -> int | None:
        coeff = 0
        basis = self._basis
        while v:
            hit = basis.get(v.bit_length() - 1)
            if hit is None:
                return None
            v ^= hit[0]
            coeff ^= hit[1]
        return coeff


def combine(rows: Sequence[int], coeff: int) -> int:
    """XOR of the rows selected by the bitmask ``coeff``."""
    out = 0
    i = 0
    while coeff:
        if coeff & 1:
            out ^= rows[i]
        coeff >>= 1
        i += 1
    return out


def kernel_rows(rows: Sequence[int]) -> list[int]:
    """Basis (as coefficient bitmasks) of {c : XOR_i c_i rows[i] == 0}."""
    return _tracked_basis(rows)[1]


def transpose_rows(rows: Sequence[int], cols: int) -> list[int]:
    out = []
    for j in range(cols):
        bit = 1 << j
        col = 0
        for i, r in enumerate(rows):
            if r & bit:
                col |= 1 << i
        out.append(col)
    return out


def symplectic_complement_rows(rows: Sequence[int], n: int) -> list[int]:
    """Basis of {x in F2^(2n) : omega(x, g) = 0 for every g in rows}, in RREF.

    Uses the linear map x -> (omega(x, g_k))_k; its kernel is computed by
    eliminating over the 2n standard basis vectors.
    """
    gens = list(row_basis(rows).values())
    images = []
    for j in range(2 * n):
        e = 1 << j
        s = 0
        for k, g in enumerate(gens):
            if omega(e, g, n):
                s |= 1 << k
        images.append(s)
    return rref_rows(kernel_rows(images))


def centralizer_mask(v: int, gens: Sequence[int], n: int) -> int:
    """Bitmask over ``gens`` of the generators anticommuting with ``v``."""
    m = 0
    for k, g in enumerate(gens):
        if omega(v, g, n):
            m |= 1 << k
    return m


# ---------------------------------------------------------------- Pauli text


def pauli_from_str(s: str) -> int:
    """Parse a string over {I, X, Y, Z} (qubit 0 leftmost) into a packed int."""
    n = len(s)
    v = 0
    for i, ch in enumerate(s.upper()):
        k = _LETTERS.find(ch)
        if k < 0:
            raise ValueError(f"invalid Pauli letter {ch!r} in {s!r}")
        if k & 1:
            v |= 1 << i
        if k & 2:
            v |= 1 << (n + i)
    return v


def pauli_to_str(v: int, n: int) -> str:
    out = []
    for i in range(n):
        out.append(_LETTERS[((v >> i) & 1) | (((v >> (n + i)) & 1) << 1)])
    return "".join(out)


def pauli_letter(v: int, n: int, i: int) -> int:
    """Code of qubit ``i``'s letter: 0=I, 1=X, 2=Z, 3=Y."""
    return ((v >> i) & 1) | (((v >> (n + i)) & 1) << 1)


def pauli_from_letters(codes: Sequence[int]) -> int:
    n = len(codes)
    v = 0
    for i, c in enumerate(codes):
        if c & 1:
            v |= 1 << i
        if c & 2:
            v |= 1 << (n + i)
    return v


def single(letter: str, q: int, n: int) -> int:
    """Packed Pauli acting with ``letter`` on qubit ``q`` only."""
    codes = [0] * n
    codes[q] = _LETTERS.index(letter)
    return pauli_from_letters(codes)


def select_qubits(v: int, n: int, keep: Sequence[int]) -> int:
    """Restrict ``v`` to the qubits ``keep`` (in that order)."""
    m = len(keep)
    out = 0
    for j, q in enumerate(keep):
        if (v >> q) & 1:
            out |= 1 << j
        if (v >> (n + q)) & 1:
            out |= 1 << (m + j)
    return out


def embed_qubits(v: int, m: int, targets: Sequence[int], n: int) -> int:
    """Place an m-qubit Pauli onto qubits ``targets`` of an n-qubit register."""
    out = 0
    for j, q in enumerate(targets):
        if (v >> j) & 1:
            out |= 1 << q
        if (v >> (m + j)) & 1:
            out |= 1 << (n + q)
    return out


# ---------------------------------------------------------------- wrappers


@dataclass(frozen=True)
class PauliVector:
    """A phase-free n-qubit Pauli as a point of F2^(2n)."""

    n: int
    bits: int

    def __post_init__(self):
        if self.bits >> (2 * self.n):
            raise ValueError("bits exceed 2n")

    @classmethod
    def from_str(cls, s: str) -> "PauliVector":
        return cls(len(s), pauli_from_str(s))

    @property
    def x(self) -> int:
        return self.bits & ((1 << self.n) - 1)

    @property
    def z(self) -> int:
        return self.bits >> self.n

    def __mul__(self, other: "PauliVector") -> "PauliVector":
        _check_same_n(self, other)
        return PauliVector(self.n, self.bits ^ other.bits)

    def is_identity(self) -> bool:
        return self.bits == 0

    def __str__(self) -> str:
        return pauli_to_str(self.bits, self.n)


def _check_same_n(a: PauliVector, b: PauliVector) -> None:
    if a.n != b.n:
        raise ValueError(f"qubit count mismatch: {a.n} vs {b.n}")


def symplectic_form(a: PauliVector, b: PauliVector) -> int:
    _check_same_n(a, b)
    return omega(a.bits, b.bits, a.n)


@dataclass(frozen=True)
class BinaryMatrix:
    """Row-major bit matrix over F2; ``rows[i]`` bit ``j`` is entry (i, j)."""

    rows: tuple[int, ...]
    cols: int

    def __post_init__(self):
        for r in self.rows:
            if r < 0 or r >> self.cols:
                raise ValueError("row wider than cols")

    @classmethod
    def from_lists(cls, data: Sequence[Sequence[int]], cols: int | None = None) -> "BinaryMatrix":
        if cols is None:
            cols = len(data[0]) if data else 0
        rows = []
        for row in data:
            if len(row) != cols:
                raise ValueError("ragged matrix")
            rows.append(sum(1 << j for j, b in enumerate(row) if b & 1))
        return cls(tuple(rows), cols)

    def to_lists(self) -> list[list[int]]:
        return [[(r >> j) & 1 for j in range(self.cols)] for r in self.rows]

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), self.cols

    def transpose(self) -> "BinaryMatrix":
        return BinaryMatrix(tuple(transpose_rows(self.rows, self.cols)), len(self.rows))


def rref(m: BinaryMatrix) -> BinaryMatrix:
    """Reduced row echelon form.  Zero rows are kept at the bottom so the
    shape is preserved."""
    red = rref_rows(m.rows)
    return BinaryMatrix(tuple(red) + (0,) * (len(m.rows) - len(red)), m.cols)


def rcef(m: BinaryMatrix) -> BinaryMatrix:
    """Reduced column echelon form, ``rref`` applied to the transpose."""
    return rref(m.transpose()).transpose()


def rank(m: BinaryMatrix) -> int:
    return rank_rows(m.rows)


def solve(m: BinaryMatrix, v: int) -> int | None:
    """Coefficients ``c`` (bitmask over rows) with c^T M == v, or ``None``."""
    if v >> m.cols:
        raise ValueError("vector wider than matrix")
    return solve_rows(m.rows, v)


def symplectic_complement(g: BinaryMatrix) -> BinaryMatrix:
    if g.cols % 2:
        raise ValueError("symplectic space needs an even column count")
    return BinaryMatrix(tuple(symplectic_complement_rows(g.rows, g.cols // 2)), g.cols)
