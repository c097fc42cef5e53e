"""Sweep every gauge-orbit representative over the (n, d) grid and group
them by capacity signature, Phi class and Omega class.

Also holds the structural checks that tie the sweep to the local generator
families of the left edge, the stability check on a larger grid, and the
property suites for the update-rule lemmas.
"""

from __future__ import annotations

import csv
import hashlib
import io
import multiprocessing
import os
import random
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .stabgroup import canonical_bipartite_form
from .symplectic import combine, omega, pauli_from_str, pauli_to_str, rank_rows, rref_rows
from .tensor import GL2, StabilizerTensor, _apply_letter_maps, enumerate_lagrangians, orbit_table, representatives
from .wire import (
    capacities,
    direct_capacity,
    omega_signature,
    phi1,
    phi_class,
    update_rule,
)

REPORT_HEADER = "# stabwire-report v1"
N_CLASSES = 13
TRIVIAL = 0
QCA = 12

# Phi letter -> transmission class ids
PHI_TO_TRANSMISSION = {
    "a": {0},
    "b": {1, 2},
    "c": {4, 6, 7},
    "d": {3, 5},
    "e": {8, 10},
    "f": {9, 11},
    "g": {12},
}


# ---------------------------------------------------------------- signatures


@dataclass(frozen=True, order=True)
class ClassSignature:
    """grid[n-1][d-1] = C(A, n, d)."""

    grid: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        for n, row in enumerate(self.grid, start=1):
            if any(c < 0 or c > n for c in row):
                raise ValueError(f"capacity outside 0..{n} at n={n}")
            if any(a < b for a, b in zip(row, row[1:])):
                raise ValueError(f"capacity increases with depth at n={n}")

    @property
    def total(self) -> int:
        return sum(map(sum, self.grid))

    def is_zero(self) -> bool:
        return self.total == 0

    def is_full(self) -> bool:
        return all(c == n for n, row in enumerate(self.grid, start=1) for c in row)

    def flat(self) -> list[int]:
        return [c for row in self.grid for c in row]

    def format(self) -> str:
        return "\n".join(" ".join(str(c) for c in row) for row in self.grid)


def signature(tensor: StabilizerTensor, n_max: int = 6, d_max: int = 6) -> ClassSignature:
    return ClassSignature(tuple(tuple(capacities(tensor, n, d_max)) for n in range(1, n_max + 1)))


def number_classes(signatures: Iterable[ClassSignature]) -> dict[ClassSignature, int]:
    """Class ids: 0 for the zero grid, 12 for C = n, the rest 1..11 in
    order of (capacity sum, grid)."""
    distinct = set(signatures)
    ids: dict[ClassSignature, int] = {}
    middle = []
    for s in distinct:
        if s.is_zero():
            ids[s] = TRIVIAL
        elif s.is_full():
            ids[s] = QCA
        else:
            middle.append(s)
    middle.sort(key=lambda s: (s.total, s.grid))
    for i, s in enumerate(middle, start=1):
        ids[s] = i
    return ids


# ---------------------------------------------------------------- sweep


@dataclass(frozen=True)
class TensorRecord:
    canonical_ordinal: int
    signature: ClassSignature
    transmission_class: int
    phi_class: str
    omega_class: int


@dataclass
class ClassificationReport:
    records: list[TensorRecord]
    class_signatures: dict[int, ClassSignature]
    omega_vectors: list[tuple[str, ...]]
    n_max: int = 6
    d_max: int = 6

    def census(self) -> dict[int, int]:
        c = Counter(r.transmission_class for r in self.records)
        return dict(sorted(c.items()))

    def phi_crosstab(self) -> dict[str, set[int]]:
        return phi_transmission_crosstab(self)

    def omega_crosstab(self) -> dict[int, set[int]]:
        """transmission class -> Omega class ids."""
        out: dict[int, set[int]] = defaultdict(set)
        for r in self.records:
            out[r.transmission_class].add(r.omega_class)
        return dict(sorted(out.items()))

    def omega_census(self) -> dict[int, int]:
        c = Counter(r.omega_class for r in self.records)
        return dict(sorted(c.items()))

    def members(self, class_id: int) -> list[int]:
        return [r.canonical_ordinal for r in self.records if r.transmission_class == class_id]


def _evaluate(args) -> tuple[tuple[tuple[int, ...], ...], str, tuple[str, ...]]:
    rows, n_max, d_max = args
    t = StabilizerTensor(rows)
    sig = signature(t, n_max, d_max)
    return sig.grid, phi_class(t).letter, omega_signature(t, n_max)


def _run(func, items: list, workers: int) -> list:
    if workers <= 1 or len(items) < 2:
        return [func(x) for x in items]
    chunk = max(1, len(items) // (workers * 8))
    with multiprocessing.get_context("fork").Pool(workers) as pool:
        return pool.map(func, items, chunksize=chunk)


def sweep(
    reps: Sequence[StabilizerTensor],
    ordinals: Sequence[int] | None = None,
    n_max: int = 6,
    d_max: int = 6,
    workers: int = 1,
    expect_classes: int | None = N_CLASSES,
    cache: "CapacityCache | None" = None,
) -> ClassificationReport:
    """Classify ``reps`` (the orbit representatives, ordinals = positions in
    the sorted enumeration).  Raises ``ValueError`` with the signature dump
    if the number of distinct signatures differs from ``expect_classes``."""
    if ordinals is None:
        ordinals = list(range(len(reps)))
    results = _run(_evaluate, [(t.rows, n_max, d_max) for t in reps], workers)
    sigs = [ClassSignature(g) for g, _, _ in results]
    if cache is not None:
        for o, sg in zip(ordinals, sigs):
            for n, row in enumerate(sg.grid, start=1):
                for d, c in enumerate(row, start=1):
                    cache.values[(o, n, d)] = c
        cache._dirty = True
    ids = number_classes(sigs)
    if expect_classes is not None and len(ids) != expect_classes:
        dump = "\n\n".join(f"{Counter(sigs)[s]} tensors:\n{s.format()}" for s in sorted(ids))
        raise ValueError(f"found {len(ids)} capacity signatures, expected {expect_classes}\n{dump}")
    omegas = sorted({om for _, _, om in results})
    omega_id = {om: i for i, om in enumerate(omegas)}
    records = [
        TensorRecord(o, s, ids[s], letter, omega_id[om])
        for o, s, (_, letter, om) in zip(ordinals, sigs, results)
    ]
    return ClassificationReport(records, {i: s for s, i in ids.items()}, omegas, n_max, d_max)


def load_representatives(workers: int = 1) -> tuple[list[StabilizerTensor], list[int]]:
    tensors = enumerate_lagrangians()
    canonical = orbit_table(tensors)
    ords = representatives(tensors, canonical)
    return [tensors[i] for i in ords], ords


# ---------------------------------------------------------------- cross-tabs


def phi_transmission_crosstab(report: ClassificationReport) -> dict[str, set[int]]:
    out: dict[str, set[int]] = defaultdict(set)
    for r in report.records:
        out[r.phi_class].add(r.transmission_class)
    return dict(sorted(out.items()))


def check_phi_crosstab(report: ClassificationReport) -> tuple[bool, str]:
    """Compare the Phi x transmission partition with PHI_TO_TRANSMISSION.

    Returns (exact match, message).  A partition of the wrong shape raises
    ``ValueError``.
    """
    cross = phi_transmission_crosstab(report)
    shape = sorted(len(v) for v in cross.values())
    want = sorted(len(v) for v in PHI_TO_TRANSMISSION.values())
    if shape != want:
        raise ValueError(f"Phi partition shape {shape} differs from {want}: {cross}")
    exact = {k: v for k, v in cross.items()} == PHI_TO_TRANSMISSION
    return exact, " ".join(f"{k}:{sorted(v)}" for k, v in cross.items())


@dataclass(frozen=True)
class OmegaCensus:
    n_classes: int
    trivial: int
    unique_elsewhere: bool


def omega_census(report: ClassificationReport) -> OmegaCensus:
    cross = report.omega_crosstab()
    trivial = len(cross.get(TRIVIAL, ()))
    unique = all(len(v) == 1 for k, v in cross.items() if k != TRIVIAL)
    return OmegaCensus(len(report.omega_vectors), trivial, unique)


# ---------------------------------------------------------------- local families


def _op(n: int, letters: dict[int, str]) -> int:
    out = 0
    for q, letter in letters.items():
        s = ["I"] * n
        s[q % n] = letter
        out ^= pauli_from_str("".join(s))
    return out


def _zs(n: int, sites: Iterable[int]) -> int:
    out = 0
    for q in sites:
        out ^= _op(n, {q: "Z"})
    return out


def _xs(n: int, sites: Iterable[int]) -> int:
    out = 0
    for q in sites:
        out ^= _op(n, {q: "X"})
    return out


def _z(n):
    return [_zs(n, [i]) for i in range(n)]


# Standard local generators of S_L: (Phi letter, generators on a ring of n)
LEFT_FAMILIES: dict[str, tuple[str, Callable[[int], list[int]]]] = {
    "Z": ("a", _z),
    "XZX": ("a", lambda n: [_xs(n, [i - 1, i + 1]) ^ _zs(n, [i]) for i in range(n)]),
    "ZZ,XX..X": ("a", lambda n: [_zs(n, [i, i + 1]) for i in range(n)] + [_xs(n, range(n))]),
    "Z,XX..X": ("b", lambda n: _z(n) + [_xs(n, range(n))]),
    "Z,XX": ("c", lambda n: _z(n) + [_xs(n, [i, i + 1]) for i in range(n)]),
    "Z,XIX": ("d", lambda n: _z(n) + [_xs(n, [i - 1, i + 1]) for i in range(n)]),
    "Z,XXX": ("e", lambda n: _z(n) + [_xs(n, [i - 1, i, i + 1]) for i in range(n)]),
    "Z,XX,XX..X": ("f", lambda n: _z(n) + [_xs(n, [i, i + 1]) for i in range(n)] + [_xs(n, range(n))]),
    "Z,X": ("g", lambda n: _z(n) + [_xs(n, [i]) for i in range(n)]),
}


def centre_family(name: str, n: int) -> list[int]:
    """Expected generators of Z_L for each left-edge family."""
    if name in ("Z", "XZX", "ZZ,XX..X"):
        return LEFT_FAMILIES[name][1](n)
    if name == "Z,XX..X":
        return [_zs(n, [i, i + 1]) for i in range(n)]
    if name == "Z,XX":
        return [_zs(n, range(n))]
    if name == "Z,XIX":
        if n % 2 == 0:
            return [_zs(n, range(0, n, 2)), _zs(n, range(1, n, 2))]
        return [_zs(n, range(n))]
    if name == "Z,XXX":
        if n % 3 == 0:
            return [_zs(n, [j for j in range(n) if j % 3 != 2]), _zs(n, [j for j in range(n) if j % 3 != 0])]
        return []
    if name == "Z,XX,XX..X":
        return [_zs(n, range(n))] if n % 2 == 0 else []
    if name == "Z,X":
        return []
    raise KeyError(name)


def _shift(v: int, n: int, k: int) -> int:
    mask = (1 << n) - 1
    x, z = v & mask, v >> n
    rot = lambda w: ((w << k) | (w >> (n - k))) & mask if k else w  # noqa: E731
    return rot(x) | (rot(z) << n)


def same_up_to_relabel(rows: Sequence[int], family: Sequence[int], n: int) -> bool:
    """Row spaces equal after one letter permutation applied at every site
    and a cyclic translation."""
    target = rref_rows(family)
    for s in GL2:
        mapped = [_apply_letter_maps(r, n, [s] * n) for r in rows]
        for k in range(n):
            if rref_rows(_shift(v, n, k) for v in mapped) == target:
                return True
    return False


def left_family(tensor: StabilizerTensor, ns: Sequence[int] = (4, 5, 6)) -> str | None:
    for name, (_, gens) in LEFT_FAMILIES.items():
        if all(same_up_to_relabel(phi1(tensor, n).left_span(), gens(n), n) for n in ns):
            return name
    return None


@dataclass(frozen=True)
class FamilyVerdict:
    family: str
    phi_letter: str
    representative: StabilizerTensor | None
    passed: bool
    detail: str = ""


def zl_table_check(reps: Sequence[StabilizerTensor], ns: Sequence[int] = (4, 5, 6)) -> list[FamilyVerdict]:
    """For the first representative of each left-edge family, compare Z_L
    with the expected centre generators for every n in ``ns``."""
    first: dict[str, StabilizerTensor] = {}
    for t in reps:
        fam = left_family(t, ns)
        if fam is not None and fam not in first:
            first[fam] = t
        if len(first) == len(LEFT_FAMILIES):
            break
    out = []
    for name, (letter, _) in LEFT_FAMILIES.items():
        t = first.get(name)
        if t is None:
            out.append(FamilyVerdict(name, letter, None, False, "no representative found"))
            continue
        bad = [n for n in ns if not same_up_to_relabel(phi1(t, n).a, centre_family(name, n), n)]
        detail = "" if not bad else f"Z_L mismatch at n={bad}"
        out.append(FamilyVerdict(name, letter, t, not bad, detail))
    return out


# ---------------------------------------------------------------- properties


@dataclass
class Verdict:
    name: str
    checked: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def fail(self, witness: str) -> None:
        self.failures.append(witness)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f" first counterexample: {self.failures[0]}" if self.failures else ""
        return f"{status} {self.name} ({self.checked} checks){extra}"


def proposition1_check(
    report: ClassificationReport,
    reps_by_ordinal: dict[int, StabilizerTensor],
    n_ext: int = 9,
    d_ext: int = 9,
    pairs: int = 100,
    seed: int = 0,
    cache: "CapacityCache | None" = None,
) -> Verdict:
    """Same-signature representatives must agree on the n <= n_ext,
    d <= d_ext grid.

    Compared: the first member of every class against its second and last
    members, plus ``pairs`` random same-class pairs.  Any disagreement is a
    witness against the implementation.
    """
    v = Verdict("same-signature stability")
    by_class: dict[int, list[int]] = defaultdict(list)
    for r in report.records:
        by_class[r.transmission_class].append(r.canonical_ordinal)
    rng = random.Random(seed)
    todo = []
    for cid, mem in sorted(by_class.items()):
        if len(mem) > 1:
            todo.append((mem[0], mem[1]))
            todo.append((mem[0], mem[-1]))
    classes = [c for c, m in sorted(by_class.items()) if len(m) > 1]
    for _ in range(pairs):
        cid = rng.choice(classes)
        a, b = rng.sample(by_class[cid], 2)
        todo.append((a, b))
    grids: dict[int, list[list[int]]] = {}

    def grid(o):
        if o not in grids:
            t = reps_by_ordinal[o]
            if cache is not None:
                grids[o] = [cache.capacities(o, t, n, d_ext) for n in range(1, n_ext + 1)]
            else:
                grids[o] = [capacities(t, n, d_ext) for n in range(1, n_ext + 1)]
        return grids[o]

    for a, b in todo:
        v.checked += 1
        ga, gb = grid(a), grid(b)
        if ga != gb:
            for n in range(n_ext):
                for d in range(d_ext):
                    if ga[n][d] != gb[n][d]:
                        v.fail(f"ordinals {a},{b} differ at n={n + 1}, d={d + 1}: {ga[n][d]} vs {gb[n][d]}")
                        break
                else:
                    continue
                break
    return v


def critical_depth(caps: Sequence[int]) -> int | None:
    """First d with C(d) == C(d+1), or None if the list never flattens."""
    for d in range(len(caps) - 1):
        if caps[d] == caps[d + 1]:
            return d + 1
    return None


def lemma_checks(tensor: StabilizerTensor, n: int, rng: random.Random, direct_limit: int = 4, depth: int = 12) -> dict[str, str | None]:
    """Run each lemma property for one (tensor, n); values are a witness
    string on failure, None on success, missing when not applicable."""
    out: dict[str, str | None] = {}
    caps = capacities(tensor, n, depth, stop_on_plateau=False)
    tag = f"{tensor} n={n}"
    out["monotone"] = None if all(a >= b for a, b in zip(caps, caps[1:])) else f"{tag} caps={caps}"
    dc = critical_depth(caps)
    plateau_ok = dc is not None and all(c == caps[dc - 1] for c in caps[dc - 1 :])
    out["plateau"] = None if plateau_ok else f"{tag} caps={caps}"
    bound_ok = dc is not None and dc <= caps[0] + 1
    out["critical depth"] = None if bound_ok else f"{tag} d_c={dc} C1={caps[0]}"
    rule = update_rule(tensor, n)
    dom = rule.domain
    if dom:
        x = combine(dom, rng.getrandbits(len(dom)))
        y = combine(dom, rng.getrandbits(len(dom)))
        tx, ty = rule(x), rule(y)
        ok = tx is not None and ty is not None and omega(x, y, n) == omega(tx, ty, n)
        out["T preserves commutation"] = None if ok else f"{tag} x={pauli_to_str(x, n)} y={pauli_to_str(y, n)}"
    if n <= direct_limit:
        d = rng.randint(1, direct_limit)
        c_direct = direct_capacity(tensor, n, d)
        out["algorithm vs direct"] = None if c_direct == caps[d - 1] else f"{tag} d={d}: {caps[d - 1]} vs {c_direct}"
    return out


def lemma_suites(
    reps: Sequence[StabilizerTensor],
    probes: int = 1000,
    seed: int = 0,
    n_max: int = 6,
    pool: Sequence[StabilizerTensor] | None = None,
) -> list[Verdict]:
    """Lemma properties over every representative and n <= n_max, plus
    ``probes`` random (tensor, n) draws from ``pool`` (default: reps)."""
    names = ["monotone", "plateau", "critical depth", "T preserves commutation", "algorithm vs direct"]
    verdicts = {k: Verdict(k) for k in names}
    rng = random.Random(seed)
    cases = [(t, n) for t in reps for n in range(1, n_max + 1)]
    pool = list(pool) if pool is not None else list(reps)
    cases += [(rng.choice(pool), rng.randint(1, n_max)) for _ in range(probes)]
    for t, n in cases:
        for k, w in lemma_checks(t, n, rng).items():
            verdicts[k].checked += 1
            if w is not None:
                verdicts[k].fail(w)
    return [verdicts[k] for k in names]


# ---------------------------------------------------------------- files


def format_report(report: ClassificationReport) -> str:
    buf = io.StringIO()
    buf.write(REPORT_HEADER + "\n")
    w = csv.writer(buf, lineterminator="\n")
    cols = [f"sig_c{n}{d}" for n in range(1, report.n_max + 1) for d in range(1, report.d_max + 1)]
    w.writerow(["canonical_ordinal", "transmission_class", "phi_class", "omega_class"] + cols)
    for r in report.records:
        w.writerow([r.canonical_ordinal, r.transmission_class, r.phi_class, r.omega_class] + r.signature.flat())
    return buf.getvalue()


def format_census(report: ClassificationReport) -> str:
    lines = [REPORT_HEADER, "class_id,count"]
    lines += [f"{k},{v}" for k, v in report.census().items()]
    return "\n".join(lines) + "\n"


def format_omega_classes(report: ClassificationReport) -> str:
    lines = [REPORT_HEADER, "omega_class,transmission_classes,n_records"]
    cross: dict[int, set[int]] = defaultdict(set)
    for r in report.records:
        cross[r.omega_class].add(r.transmission_class)
    for i, vec in enumerate(report.omega_vectors):
        classes = " ".join(str(c) for c in sorted(cross[i]))
        lines.append(f"{i},{classes}," + ";".join(vec))
    return "\n".join(lines) + "\n"


def parse_report(text: str) -> ClassificationReport:
    lines = text.splitlines()
    if not lines or lines[0] != REPORT_HEADER:
        raise ValueError("not a stabwire report")
    rows = list(csv.reader(lines[1:]))
    head, body = rows[0], rows[1:]
    n_cells = len(head) - 4
    side = int(round(n_cells**0.5))
    records = []
    sigs: dict[int, ClassSignature] = {}
    for row in body:
        cells = list(map(int, row[4:]))
        grid = tuple(tuple(cells[i * side : (i + 1) * side]) for i in range(side))
        s = ClassSignature(grid)
        cid = int(row[1])
        sigs[cid] = s
        records.append(TensorRecord(int(row[0]), s, cid, row[2], int(row[3])))
    n_omega = max((r.omega_class for r in records), default=-1) + 1
    return ClassificationReport(records, dict(sorted(sigs.items())), [()] * n_omega, side, side)


def checksum(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


class CapacityCache:
    """On-disk C(A, n, d) values keyed by (canonical ordinal, n, d).

    Stored as CSV lines ``ordinal,n,d,capacity`` under a versioned header.
    """

    HEADER = "# stabwire-capacity-cache v1"

    def __init__(self, path: str | os.PathLike | None):
        self.path = Path(path) if path else None
        self.values: dict[tuple[int, int, int], int] = {}
        self._dirty = False
        if self.path and self.path.exists():
            lines = self.path.read_text().splitlines()
            if lines and lines[0] == self.HEADER:
                for line in lines[1:]:
                    o, n, d, c = map(int, line.split(","))
                    self.values[(o, n, d)] = c

    def capacities(self, ordinal: int, tensor: StabilizerTensor, n: int, d_max: int) -> list[int]:
        keys = [(ordinal, n, d) for d in range(1, d_max + 1)]
        if all(k in self.values for k in keys):
            return [self.values[k] for k in keys]
        caps = capacities(tensor, n, d_max)
        for k, c in zip(keys, caps):
            self.values[k] = c
        self._dirty = True
        return caps

    def save(self) -> None:
        if not self.path or not self._dirty:
            return
        self.path.parent.mkdir(parents=True, exist_ok=True)
        body = "\n".join(f"{o},{n},{d},{c}" for (o, n, d), c in sorted(self.values.items()))
        self.path.write_text(self.HEADER + "\n" + body + "\n")
        self._dirty = False


def class_representatives(report: ClassificationReport) -> dict[int, int]:
    """transmission class -> first canonical ordinal in it."""
    out: dict[int, int] = {}
    for r in report.records:
        out.setdefault(r.transmission_class, r.canonical_ordinal)
    return dict(sorted(out.items()))


def left_rank_check(tensor: StabilizerTensor, letter: str, ns: Sequence[int] = range(1, 7)) -> list[int]:
    """n values where rank(S_L) differs from the family formula."""
    from .wire import PHI_RANKS, left_rank

    return [n for n in ns if left_rank(tensor, n) != PHI_RANKS[letter](n)]


def oracle_suite(
    cases: Sequence[tuple[StabilizerTensor, int, int]],
    name: str = "oracle equivalence",
    corrupt: bool = False,
) -> Verdict:
    """Update-rule capacities against dense contraction, one (tensor, n_max, d_max)
    block per case.  ``corrupt`` perturbs the first value as a negative
    control."""
    from .oracle import contract_cylinder, schmidt_qubits, spectrum_is_flat

    v = Verdict(name)
    first = True
    for t, n_max, d_max in cases:
        strings = t.to_strings()
        for n in range(1, n_max + 1):
            caps = capacities(t, n, d_max)
            for d in range(1, d_max + 1):
                want = caps[d - 1] + (1 if corrupt and first else 0)
                first = False
                edge = contract_cylinder(strings, n, d)
                got = schmidt_qubits(edge)
                v.checked += 1
                if got != want or not spectrum_is_flat(edge):
                    v.fail(f"{t} n={n} d={d}: algorithm {want}, dense {got}")
    return v
