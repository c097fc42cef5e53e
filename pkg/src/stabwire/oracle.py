"""Dense state-vector ground truth for small cylinders.

Nothing here touches the bit-packed symplectic code: a tensor is turned into
a 32-amplitude state from its Pauli strings, the cylinder is contracted site
by site with numpy, and entanglement is read off a singular value
decomposition.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

N_MAX = 6
D_MAX = 6

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_PAULI = {"I": _I2, "X": _X, "Y": _Y, "Z": _Z}

_PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)
_MINUS = np.array([1, -1], dtype=complex) / np.sqrt(2)
# bond bras <I|(1 x P) for P = I, X, Z, Y, as 2x2 arrays B[i, j]
_BONDS = [np.eye(2, dtype=complex) @ P for P in (_I2, _X, _Z, _Y)]

_TOL = 1e-9


def pauli_matrix(letters: str) -> np.ndarray:
    """Kronecker product of single-qubit Paulis, qubit 0 most significant."""
    out = np.ones((1, 1), dtype=complex)
    for ch in letters:
        out = np.kron(out, _PAULI[ch])
    return out


@dataclass(frozen=True)
class DenseTensor:
    """Amplitudes indexed (u, d, l, r, phys) and the generator signs used."""

    amplitudes: np.ndarray
    signs: tuple[int, ...]


def densify(paulis: Sequence[str]) -> DenseTensor:
    """Joint eigenvector of the five generators, +1 signs where possible.

    Signs are flipped one generator at a time, then in pairs and so on,
    until the projector product is nonzero.
    """
    mats = [pauli_matrix(p) for p in paulis]
    dim = mats[0].shape[0]
    k = len(mats)
    for flips in range(k + 1):
        for chosen in itertools.combinations(range(k), flips):
            signs = tuple(-1 if i in chosen else 1 for i in range(k))
            proj = np.eye(dim, dtype=complex)
            for s, m in zip(signs, mats):
                proj = proj @ (np.eye(dim) + s * m) / 2
            col = int(np.argmax(np.linalg.norm(proj, axis=0)))
            vec = proj[:, col]
            norm = np.linalg.norm(vec)
            if norm > _TOL:
                amps = (vec / norm).reshape((2,) * len(paulis[0]))
                return DenseTensor(amps, signs)
    raise ValueError("generators have no joint eigenvector")


@dataclass(frozen=True)
class EdgeState:
    """Amplitudes over (left edge l_0..l_{n-1}, right edge r_0..r_{n-1})."""

    n: int
    amplitudes: np.ndarray
    choices: tuple[int, ...]

    def matrix(self) -> np.ndarray:
        return self.amplitudes.reshape(2**self.n, 2**self.n)


class _Network:
    """Open-leg state vector with named axes."""

    def __init__(self):
        self.state = np.ones((), dtype=complex)
        self.legs: list[tuple] = []
        self.choices: list[int] = []

    def add(self, amps: np.ndarray, labels: Sequence[tuple]) -> None:
        self.state = np.tensordot(self.state, amps, axes=0)
        self.legs += list(labels)

    def _commit(self, candidates, legs_out) -> None:
        for idx, cand in enumerate(candidates):
            norm = np.linalg.norm(cand)
            if norm > _TOL:
                self.state = cand / norm
                self.legs = legs_out
                self.choices.append(idx)
                return
        raise AssertionError("every outcome vanished")  # pragma: no cover

    def project(self, leg: tuple) -> None:
        """Contract ``leg`` with <+|, or <-| when that gives zero."""
        ax = self.legs.index(leg)
        rest = [lb for lb in self.legs if lb != leg]
        cands = (np.tensordot(self.state, bra.conj(), axes=([ax], [0])) for bra in (_PLUS, _MINUS))
        self._commit(cands, rest)

    def bond(self, a: tuple, b: tuple) -> None:
        """Contract legs ``a`` and ``b`` with sum_i <ii|, twisting by a Pauli
        on ``b`` when that gives zero."""
        ia, ib = self.legs.index(a), self.legs.index(b)
        rest = [lb for lb in self.legs if lb not in (a, b)]
        cands = (np.tensordot(self.state, bra, axes=([ia, ib], [0, 1])) for bra in _BONDS)
        self._commit(cands, rest)


def contract_cylinder(paulis: Sequence[str], n: int, d: int) -> EdgeState:
    """Contract an n x d cylinder of copies of one tensor.

    Columns run left to right, rows go round the cylinder; d_i meets
    u_{i+1 mod n} and r of column c meets l of column c+1.  Every physical
    leg is projected and the open legs are the first column's l and the
    last column's r.
    """
    if not 1 <= n <= N_MAX or not 1 <= d <= D_MAX:
        raise ValueError(f"dense contraction limited to n <= {N_MAX}, d <= {D_MAX}")
    amps = densify(paulis).amplitudes
    net = _Network()
    for c in range(d):
        for i in range(n):
            net.add(amps, [("u", c, i), ("d", c, i), ("l", c, i), ("r", c, i), ("p", c, i)])
            if i > 0:
                net.bond(("d", c, i - 1), ("u", c, i))
            if c > 0:
                net.bond(("r", c - 1, i), ("l", c, i))
            if i == n - 1:
                net.bond(("d", c, i), ("u", c, 0))
            net.project(("p", c, i))
    order = [("l", 0, i) for i in range(n)] + [("r", d - 1, i) for i in range(n)]
    perm = [net.legs.index(lb) for lb in order]
    edge = np.transpose(net.state, perm)
    return EdgeState(n, edge, tuple(net.choices))


def singular_values(s: EdgeState) -> np.ndarray:
    return np.linalg.svd(s.matrix(), compute_uv=False)


def schmidt_rank(s: EdgeState) -> int:
    sv = singular_values(s)
    if sv[0] <= 0:
        raise ValueError("edge state is zero")
    return int(np.sum(sv > _TOL * sv[0]))


def schmidt_qubits(s: EdgeState) -> int:
    """log2 of the Schmidt rank across left edge | right edge."""
    k = schmidt_rank(s)
    q = k.bit_length() - 1
    if 1 << q != k:
        raise AssertionError(f"Schmidt rank {k} is not a power of two")
    return q


def spectrum_is_flat(s: EdgeState, rtol: float = 1e-9) -> bool:
    sv = singular_values(s)
    kept = sv[sv > _TOL * sv[0]]
    return bool(np.all(np.abs(kept - kept[0]) <= rtol * kept[0] + 1e-12))


def dense_capacity(paulis: Sequence[str], n: int, d: int) -> int:
    return schmidt_qubits(contract_cylinder(paulis, n, d))


def bipartite_schmidt_qubits(amps: np.ndarray, cut: int) -> int:
    """Entanglement (in qubits) of an m-qubit state across [0, cut) | rest."""
    m = amps.ndim
    mat = amps.reshape(2**cut, 2 ** (m - cut))
    sv = np.linalg.svd(mat, compute_uv=False)
    k = int(np.sum(sv > _TOL * sv[0]))
    q = k.bit_length() - 1
    if 1 << q != k:
        raise AssertionError(f"Schmidt rank {k} is not a power of two")
    return q
