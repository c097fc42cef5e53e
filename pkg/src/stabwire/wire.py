"""Quantum-wire transmission through a cylinder of stabilizer tensors.

A layer (one ring of n tensors with every physical leg projected onto |+>)
leaves a stabilizer state on 2n edge qubits: l-legs 0..n-1 then r-legs
n..2n-1.  Its bipartite canonical form defines the update rule T, and
chaining T gives the transmission capacity C(A, n, d) without ever building
the full cylinder.
"""

from __future__ import annotations

import itertools

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

from .stabgroup import (
    CanonicalBipartiteForm,
    StabilizerGroup,
    canonical_bipartite_form,
    postselect,
    side_form,
    symplectic_pairs,
)
from .symplectic import (
    SpanSolver,
    combine,
    kernel_rows,
    omega,
    pauli_letter,
    rank_rows,
    row_basis,
    rref_rows,
    select_qubits,
    transpose_rows,
)
from .tensor import NQ, PHYS, D, L, R, U, StabilizerTensor


# ---------------------------------------------------------------- networks


def _embed(rows: Sequence[int], offset: int, total: int) -> list[int]:
    mask = (1 << NQ) - 1
    return [((r & mask) << offset) | ((r >> NQ) << (total + offset)) for r in rows]


def contract_rows(
    rows: list[int],
    nq: int,
    bonds: Sequence[tuple[int, int]],
    projected: Sequence[int],
    keep: Sequence[int],
) -> list[int]:
    """Contract bonds with sum_i |ii> and project qubits onto |+>, sign-free.

    All bond and projection operators commute, so they are postselected in
    one pass; the survivors are then cleaned on the removed qubits and
    restricted to ``keep``.
    """
    adjoined = []
    for q1, q2 in bonds:
        xx = (1 << q1) | (1 << q2)
        rows = postselect(rows, xx, nq)
        rows = postselect(rows, xx << nq, nq)
        adjoined.append((1 << q1, xx, (1 << q1) << nq, xx << nq))
    for q in projected:
        rows = postselect(rows, 1 << q, nq)
    cleaned = []
    for r in rows:
        for x1, xx, z1, zz in adjoined:
            if r & x1:
                r ^= xx
            if r & z1:
                r ^= zz
        for q in projected:
            if (r >> q) & 1:
                r ^= 1 << q
        cleaned.append(r)
    return rref_rows(select_qubits(r, nq, keep) for r in cleaned)


def contract_network(
    tensor: StabilizerTensor,
    sites: int,
    bonds: Sequence[tuple[int, int]],
    projected: Sequence[int],
    keep: Sequence[int],
) -> list[int]:
    """Contract ``sites`` copies of ``tensor`` (qubit 5*s + leg)."""
    n = NQ * sites
    rows: list[int] = []
    for s in range(sites):
        rows += _embed(tensor.rows, NQ * s, n)
    return contract_rows(rows, n, bonds, projected, keep)


@dataclass(frozen=True)
class LayerGroup:
    """Edge stabilizer group: qubits 0..n-1 left edge, n..2n-1 right edge."""

    n: int
    group: StabilizerGroup

    def canonical_form(self) -> CanonicalBipartiteForm:
        return canonical_bipartite_form(self.group, self.n)


def ring_group(tensor: StabilizerTensor, n: int) -> LayerGroup:
    if n < 1:
        raise ValueError("circumference must be >= 1")
    return LayerGroup(n, StabilizerGroup(2 * n, tuple(_ring_rows(tensor, n))))


@lru_cache(maxsize=65536)
def _ring_rows(tensor: StabilizerTensor, n: int) -> tuple[int, ...]:
    bonds = [(NQ * i + D, NQ * ((i + 1) % n) + U) for i in range(n)]
    projected = [NQ * i + PHYS for i in range(n)]
    keep = [NQ * i + L for i in range(n)] + [NQ * i + R for i in range(n)]
    return tuple(contract_network(tensor, n, bonds, projected, keep))


def _grid_rows(tensor: StabilizerTensor, n: int, d: int) -> list[int]:
    def q(col: int, i: int, leg: int) -> int:
        return NQ * (col * n + i) + leg

    bonds = []
    for col in range(d):
        for i in range(n):
            bonds.append((q(col, i, D), q(col, (i + 1) % n, U)))
            if col + 1 < d:
                bonds.append((q(col, i, R), q(col + 1, i, L)))
    projected = [q(col, i, PHYS) for col in range(d) for i in range(n)]
    keep = [q(0, i, L) for i in range(n)] + [q(d - 1, i, R) for i in range(n)]
    return contract_network(tensor, n * d, bonds, projected, keep)


def compose_layers(first: LayerGroup, second: LayerGroup) -> LayerGroup:
    """Glue the right edge of ``first`` to the left edge of ``second``."""
    n = first.n
    total = 4 * n
    m = 2 * n
    mask = (1 << m) - 1
    rows = []
    for offset, layer in ((0, first), (m, second)):
        for r in layer.group.gens:
            rows.append(((r & mask) << offset) | ((r >> m) << (total + offset)))
    bonds = [(n + i, 2 * n + i) for i in range(n)]
    keep = list(range(n)) + list(range(3 * n, 4 * n))
    return LayerGroup(n, StabilizerGroup(m, tuple(contract_rows(rows, total, bonds, [], keep))))


def cylinder_group(tensor: StabilizerTensor, n: int, d: int, method: str = "layers") -> LayerGroup:
    """Edge group of the whole n x d cylinder.

    ``grid`` contracts all n*d tensors at once; ``layers`` glues ring groups
    one bond column at a time.  Both are independent of the update rule.
    """
    if n < 1 or d < 1:
        raise ValueError("n and d must be >= 1")
    if method == "grid":
        return LayerGroup(n, StabilizerGroup(2 * n, tuple(_grid_rows(tensor, n, d))))
    if method != "layers":
        raise ValueError(f"unknown method {method!r}")
    ring = ring_group(tensor, n)
    out = ring
    for _ in range(d - 1):
        out = compose_layers(out, ring)
    return out


def direct_capacity(tensor: StabilizerTensor, n: int, d: int, method: str = "layers") -> int:
    return cylinder_group(tensor, n, d, method).canonical_form().p


# ---------------------------------------------------------------- update rule


@lru_cache(maxsize=65536)
def phi1(tensor: StabilizerTensor, n: int) -> CanonicalBipartiteForm:
    return ring_group(tensor, n).canonical_form()


@dataclass(frozen=True)
class UpdateRule:
    """T : S_L -> S_R with a_i -> b_i, g_k^L -> g_k^R, gbar_k^L -> gbar_k^R."""

    n: int
    phi: CanonicalBipartiteForm
    domain: tuple[int, ...] = field(init=False)
    images: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        phi = self.phi
        if len(phi.a) != len(phi.b) or phi.mixed:
            raise ValueError("update rule needs a maximally isotropic layer")
        dom = list(phi.a)
        img = list(phi.b)
        for gl, gbl, gr, gbr in phi.pairs:
            dom += [gl, gbl]
            img += [gr, gbr]
        object.__setattr__(self, "domain", tuple(dom))
        object.__setattr__(self, "images", tuple(img))
        object.__setattr__(self, "_solver", SpanSolver(dom))

    @property
    def a(self) -> tuple[int, ...]:
        return self.phi.a

    @property
    def b(self) -> tuple[int, ...]:
        return self.phi.b

    def in_domain(self, x: int) -> bool:
        """Membership in S_L is commutation with every a_i."""
        n = self.n
        return not any(omega(x, a, n) for a in self.phi.a)

    def syndrome(self, x: int) -> int:
        s = 0
        for i, a in enumerate(self.phi.a):
            if omega(x, a, self.n):
                s |= 1 << i
        return s

    def __call__(self, x: int) -> int | None:
        if not self.in_domain(x):
            return None
        c = self._solver.solve(x)
        if c is None:
            return None
        return combine(self.images, c)


def update_rule(tensor: StabilizerTensor, n: int) -> UpdateRule:
    return UpdateRule(n, phi1(tensor, n))


def apply_T(rule: UpdateRule, x: int) -> int | None:
    return rule(x)


def chain_fronts(tensor: StabilizerTensor, n: int, d: int, stop_on_plateau: bool = True) -> list[list[int]]:
    """Generating sets T_R(A, n, k) for k = 1..d.

    At each depth the elements of span(T_R) commuting with Z_L are found as
    a kernel of their commutation syndromes, and their images are added.
    With ``stop_on_plateau`` the list ends at the first depth that adds no
    rank; otherwise every depth up to d is computed.
    """
    rule = update_rule(tensor, n)
    front = list(rule.b)
    fronts = [list(front)]
    if not rule.a:
        return fronts * (1 if stop_on_plateau else d)
    for _ in range(d - 1):
        basis = list(row_basis(front).values())
        syndromes = [rule.syndrome(v) for v in basis]
        new = []
        for c in kernel_rows(syndromes):
            y = rule(combine(basis, c))
            if y is None:  # pragma: no cover - kernel elements lie in S_L
                raise AssertionError("kernel element outside the domain of T")
            new.append(y)
        grown = basis + new
        if stop_on_plateau and rank_rows(grown) == len(basis):
            break
        front = grown
        fronts.append(list(front))
    return fronts


def capacities(tensor: StabilizerTensor, n: int, d_max: int, stop_on_plateau: bool = True) -> list[int]:
    """[C(A, n, d) for d = 1..d_max]."""
    if d_max < 1:
        raise ValueError("d_max must be >= 1")
    fronts = chain_fronts(tensor, n, d_max, stop_on_plateau)
    caps = [n - rank_rows(f) for f in fronts]
    return caps + [caps[-1]] * (d_max - len(caps))


def capacity(tensor: StabilizerTensor, n: int, d: int) -> int:
    if n < 1 or d < 1:
        raise ValueError("n and d must be >= 1")
    return capacities(tensor, n, d)[-1]


def capacities_by_chains(tensor: StabilizerTensor, n: int, d_max: int) -> list[int]:
    """Per-generator chains b_i, T(b_i), ... without mixing generators.

    Only a diagnostic: it can miss products of chain elements that commute
    with Z_L although no single element does.
    """
    rule = update_rule(tensor, n)
    pool = list(rule.b)
    fronts = list(rule.b)
    caps = [n - rank_rows(pool)]
    for _ in range(d_max - 1):
        fronts = [y for y in (rule(x) for x in fronts) if y is not None]
        pool += fronts
        caps.append(n - rank_rows(pool))
    return caps


# ---------------------------------------------------------------- Omega


@dataclass(frozen=True)
class OmegaMatrix:
    """Commutation matrix of the a_i against (b_j | g_1^R gbar_1^R | ...).

    Row ``i`` is an int whose bit ``j`` is column ``j``.
    """

    n: int
    p: int
    rows: tuple[int, ...]
    standard: bool = False

    @property
    def m(self) -> int:
        return self.n - self.p

    @property
    def cols(self) -> int:
        return self.m + 2 * self.p

    def left_block(self) -> list[int]:
        mask = (1 << self.m) - 1
        return [r & mask for r in self.rows]

    def pair_block(self, k: int) -> list[int]:
        return [(r >> (self.m + 2 * k)) & 3 for r in self.rows]

    def serialize(self) -> str:
        lam = "".join(str((self.rows[i] >> i) & 1) for i in range(self.m))
        fields = [str(self.n), str(self.p), lam or "-"]
        for k in range(self.p):
            blk = self.pair_block(k)
            fields.append("".join(f"{(b & 1)}{(b >> 1) & 1}" for b in blk) or "-")
        return ",".join(fields)


def omega1(tensor: StabilizerTensor, n: int) -> OmegaMatrix:
    phi = phi1(tensor, n)
    cols = list(phi.b)
    for _, _, gr, gbr in phi.pairs:
        cols += [gr, gbr]
    rows = []
    for a in phi.a:
        r = 0
        for j, c in enumerate(cols):
            if omega(a, c, n):
                r |= 1 << j
        rows.append(r)
    return OmegaMatrix(n, phi.p, tuple(rows))


def omega_invariants(om: OmegaMatrix) -> tuple[int, int, int]:
    """(r, s, t) classifying Omega under all choices of canonical generators.

    r = rank of the left block, s = rank added by the pair columns, and
    t = rank of the pair-space symplectic form on the kernel of the pair
    columns taken modulo the left block's column space.
    """
    m, p = om.m, om.p
    cols = transpose_rows(om.rows, om.cols)
    left = cols[:m]
    r = rank_rows(left)
    s = rank_rows(cols) - r
    # kernel of (v, u) -> B v + H u, projected to the pair coordinates u
    ker_u = rref_rows(c >> m for c in kernel_rows(cols))
    pair_form = side_form(p, p)  # standard form with x = g, z = gbar bits

    def to_xz(u: int) -> int:
        x = z = 0
        for k in range(p):
            if (u >> (2 * k)) & 1:
                x |= 1 << k
            if (u >> (2 * k + 1)) & 1:
                z |= 1 << k
        return x | (z << p)

    vecs = [to_xz(u) for u in ker_u]
    pairs, _ = symplectic_pairs(vecs, pair_form)
    return r, s, 2 * len(pairs)


@lru_cache(maxsize=None)
def _gl_images(s: int) -> tuple[tuple[int, ...], ...]:
    """All invertible s x s matrices over F2, each as the images of the unit
    vectors."""
    vecs = range(1, 1 << s)
    out = []
    for images in itertools.product(vecs, repeat=s):
        if rank_rows(images) == s:
            out.append(images)
    return tuple(out)


def _apply_gl(v: int, images: tuple[int, ...]) -> int:
    out = 0
    i = 0
    while v:
        if v & 1:
            out ^= images[i]
        v >>= 1
        i += 1
    return out


def _block_key(c0: int, c1: int) -> tuple[int, int, int]:
    """(rank, RCEF columns) of a two-column block given as column ints."""
    red = rref_rows((c0, c1))
    red += [0] * (2 - len(red))
    return (len(red) - red.count(0), red[0], red[1])


@lru_cache(maxsize=None)
def _canonical_blocks(s: int, blocks: tuple[tuple[int, int], ...]) -> tuple[tuple[int, int, int], ...]:
    """Lexicographically smallest sorted block list over all row changes.

    ``blocks`` holds the pair blocks as column ints over s independent rows.
    """
    best = None
    for images in _gl_images(s):
        keys = tuple(sorted(_block_key(_apply_gl(c0, images), _apply_gl(c1, images)) for c0, c1 in blocks))
        if best is None or keys < best:
            best = keys
    return best


def omega_standard_form(om: OmegaMatrix) -> OmegaMatrix:
    """Standard form: diag(1^r, 0^(m-r)) left block, then zero, rank-one
    and rank-two pair blocks, each in RCEF.

    Built from ``omega_invariants``, so two matrices get the same standard
    form exactly when some choice of canonical generators relates them.
    """
    m, p = om.m, om.p
    r, s, t = omega_invariants(om)
    # the radical of the pair functionals has dimension s - 2j and equals
    # the radical of their common kernel, of dimension (2p - s) - t
    j = (2 * s - 2 * p + t) // 2
    ones = s - 2 * j
    zeros = p - j - ones
    rows = [0] * m
    for i in range(r):
        rows[i] |= 1 << i
    nxt = r
    for k in range(zeros, zeros + ones):
        rows[nxt] |= 1 << (m + 2 * k)
        nxt += 1
    for k in range(zeros + ones, p):
        rows[nxt] |= 1 << (m + 2 * k)
        rows[nxt + 1] |= 1 << (m + 2 * k + 1)
        nxt += 2
    return OmegaMatrix(om.n, p, tuple(rows), standard=True)


def omega_pairwise_form(om: OmegaMatrix) -> OmegaMatrix:
    """Normal form under moves that keep each pair block separate.

    Moves are row operations, basis changes of the b columns, adding b
    columns into pair columns, column operations inside one pair block and
    block reordering.  Changing the symplectic basis of the pairs is not
    among them, so the result depends on which pairs the canonical form
    picked; ``omega_standard_form`` is the choice-free version.  After the left block is diagonal, the pair entries of
    its r pivot rows are cleared with b columns, and the remaining rows are
    brought to a lexicographically minimal form by a search over row changes.
    """
    m, p = om.m, om.p
    r = rank_rows(om.left_block())
    # rows whose left part vanishes: the kernel of the left block's rows
    lower = [combine(om.rows, c) >> m for c in kernel_rows(om.left_block())]
    basis = rref_rows(lower)
    s = len(basis)
    blocks = []
    for k in range(p):
        c0 = c1 = 0
        for i, row in enumerate(basis):
            if (row >> (2 * k)) & 1:
                c0 |= 1 << i
            if (row >> (2 * k + 1)) & 1:
                c1 |= 1 << i
        blocks.append((c0, c1))
    keys = _canonical_blocks(s, tuple(blocks)) if p else ()
    rows = [0] * m
    for i in range(r):
        rows[i] |= 1 << i
    for k, (_, c0, c1) in enumerate(keys):
        for i in range(s):
            if (c0 >> i) & 1:
                rows[r + i] |= 1 << (m + 2 * k)
            if (c1 >> i) & 1:
                rows[r + i] |= 1 << (m + 2 * k + 1)
    return OmegaMatrix(om.n, p, tuple(rows), standard=True)


def omega_signature(tensor: StabilizerTensor, n_max: int = 6) -> tuple[str, ...]:
    return tuple(omega_standard_form(omega1(tensor, n)).serialize() for n in range(1, n_max + 1))


# ---------------------------------------------------------------- local form


@dataclass(frozen=True)
class LocalFormLabel:
    case: str
    p: int
    q: int | None = None
    gamma_equal: bool | None = None


def single_tensor_group(tensor: StabilizerTensor) -> StabilizerGroup:
    """S_A on (l, r, u, d): the tensor with its physical leg projected."""
    rows = contract_network(tensor, 1, [], [PHYS], [L, R, U, D])
    return StabilizerGroup(4, tuple(rows))


def local_form(tensor: StabilizerTensor) -> LocalFormLabel:
    phi = canonical_bipartite_form(single_tensor_group(tensor), 2)
    p = phi.p
    if p == 0:
        return LocalFormLabel("i", 0)
    if p == 2:
        return LocalFormLabel("iv", 2)
    (v,) = phi.b  # V-only generator on (u, d)
    gv, gbv = phi.pairs[0][2], phi.pairs[0][3]
    q = 0
    for w in (gv, gbv, gv ^ gbv):
        q = max(q, canonical_bipartite_form(StabilizerGroup.from_rows([v, w], 2), 1).p)
    if q == 0:
        return LocalFormLabel("i", 1, 0)
    gu, gd = pauli_letter(v, 2, 0), pauli_letter(v, 2, 1)
    return LocalFormLabel("ii" if gu == gd else "iii", 1, 1, gu == gd)


# ---------------------------------------------------------------- Phi class

PHI_SIGNATURES = {
    "a": lambda n: 0,
    "b": lambda n: 1,
    "c": lambda n: n - 1,
    "d": lambda n: n - 2 if n % 2 == 0 else n - 1,
    "e": lambda n: n - 2 if n % 3 == 0 else n,
    "f": lambda n: n - 1 if n % 2 == 0 else n,
    "g": lambda n: n,
}

# rank(S_L) as a function of n for each class
PHI_RANKS = {k: (lambda f: (lambda n: n + f(n)))(f) for k, f in PHI_SIGNATURES.items()}


@dataclass(frozen=True)
class PhiClassLabel:
    letter: str
    p_signature: tuple[int, ...]


def p_signature(tensor: StabilizerTensor, n_max: int = 6) -> tuple[int, ...]:
    return tuple(phi1(tensor, n).p for n in range(1, n_max + 1))


def left_rank(tensor: StabilizerTensor, n: int) -> int:
    """rank(S_L(A, n, 1)) computed from the layer generators directly."""
    g = ring_group(tensor, n).group
    return rank_rows(select_qubits(r, 2 * n, range(n)) for r in g.gens)


def phi_class(tensor: StabilizerTensor) -> PhiClassLabel:
    sig = p_signature(tensor)
    for letter, f in PHI_SIGNATURES.items():
        if all(sig[n - 1] == f(n) for n in range(1, 7)):
            return PhiClassLabel(letter, sig)
    raise LookupError(f"p signature {sig} matches no known Phi class")
