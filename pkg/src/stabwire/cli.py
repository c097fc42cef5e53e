"""Command-line entry point: ``stabwire <subcommand> [options]``."""

from __future__ import annotations

import argparse
import os
import random
import sys
from dataclasses import dataclass
from pathlib import Path

from . import classify as cl
from .symplectic import pauli_to_str
from .tensor import (
    StabilizerTensor,
    enumerate_lagrangians,
    find_fixtures,
    orbit_table,
    parse_tensor,
    representatives,
)
from .wire import capacity, chain_fronts

LAGRANGIANS_FILE = "lagrangians.txt"
ORBITS_FILE = "orbits.csv"
CAPACITY_FILE = "capacity-cache.csv"
LAGRANGIANS_HEADER = "# stabwire-lagrangians v1"
ORBITS_HEADER = "# stabwire-orbits v1"


@dataclass
class RunConfig:
    subcommand: str
    n_max: int
    d_max: int
    cache_dir: Path
    output: Path
    workers: int
    seed: int

    def __post_init__(self):
        if self.n_max < 1 or self.d_max < 1:
            raise ValueError("--n-max and --d-max must be >= 1")
        if self.workers < 1:
            raise ValueError("--workers must be >= 1")


def _config(args) -> RunConfig:
    cache = args.cache_dir or os.environ.get("STABWIRE_CACHE") or ".stabwire-cache"
    return RunConfig(args.cmd, args.n_max, args.d_max, Path(cache), Path(args.out), args.workers, args.seed)


# ---------------------------------------------------------------- cache files


def _with_checksum(header: str, body: str) -> str:
    return f"{header}\n# sha256 {cl.checksum(body)}\n{body}"


def _read_checked(path: Path, header: str) -> str | None:
    """Body of a checksummed file, or None when missing or damaged."""
    if not path.exists():
        return None
    text = path.read_text()
    parts = text.split("\n", 2)
    if len(parts) < 3 or parts[0] != header or not parts[1].startswith("# sha256 "):
        return None
    body = parts[2]
    if cl.checksum(body) != parts[1][len("# sha256 ") :]:
        return None
    return body


def load_enumeration(cache_dir: Path, log=print) -> tuple[list[StabilizerTensor], list[int]]:
    """(all Lagrangians, canonical ordinal per Lagrangian), from cache when
    both files are intact, otherwise recomputed and rewritten."""
    lag_body = _read_checked(cache_dir / LAGRANGIANS_FILE, LAGRANGIANS_HEADER)
    orb_body = _read_checked(cache_dir / ORBITS_FILE, ORBITS_HEADER)
    if lag_body is not None and orb_body is not None:
        tensors = [StabilizerTensor.from_strings(line.split()) for line in lag_body.splitlines()]
        canonical = [int(line.split(",")[1]) for line in orb_body.splitlines()[1:]]
        if len(canonical) == len(tensors):
            log("cached")
            return tensors, canonical
    if (cache_dir / LAGRANGIANS_FILE).exists() or (cache_dir / ORBITS_FILE).exists():
        log("cache damaged or incomplete: regenerating")
    tensors = enumerate_lagrangians()
    canonical = orbit_table(tensors)
    cache_dir.mkdir(parents=True, exist_ok=True)
    lag = "".join(" ".join(t.to_strings()) + "\n" for t in tensors)
    orb = "ordinal,canonical_ordinal\n" + "".join(f"{i},{c}\n" for i, c in enumerate(canonical))
    (cache_dir / LAGRANGIANS_FILE).write_text(_with_checksum(LAGRANGIANS_HEADER, lag))
    (cache_dir / ORBITS_FILE).write_text(_with_checksum(ORBITS_HEADER, orb))
    return tensors, canonical


def _reps(cfg: RunConfig, log=print):
    tensors, canonical = load_enumeration(cfg.cache_dir, log)
    ords = representatives(tensors, canonical)
    return tensors, ords, [tensors[i] for i in ords]


# ---------------------------------------------------------------- commands


def cmd_enumerate(cfg: RunConfig, args) -> int:
    tensors, canonical = load_enumeration(cfg.cache_dir)
    orbits = len(set(canonical))
    print(f"lagrangians={len(tensors)} orbits={orbits}")
    return 0 if (len(tensors), orbits) == (75735, 2649) else 1


def cmd_capacity(cfg: RunConfig, args) -> int:
    try:
        t = parse_tensor(Path(args.tensor).read_text())
    except (OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    n, d = args.n, args.d
    if n < 1 or d < 1:
        print("error: n and d must be >= 1", file=sys.stderr)
        return 2
    if args.trace:
        for k, front in enumerate(chain_fronts(t, n, d), start=1):
            gens = " ".join(pauli_to_str(v, n) for v in front) or "(empty)"
            print(f"T_R depth {k}: rank {len(front)}: {gens}")
    print(f"C = {capacity(t, n, d)}")
    return 0


def _report_path(cfg: RunConfig) -> Path:
    return cfg.output / "report.csv"


def _run_sweep(cfg: RunConfig, reps, ords, n_max: int = 6, d_max: int = 6) -> cl.ClassificationReport:
    """The classification grid is 6 x 6 unless ``classify`` is asked for
    another one; class ids are only meaningful on the 6 x 6 grid."""
    cache = cl.CapacityCache(cfg.cache_dir / CAPACITY_FILE)
    report = cl.sweep(reps, ords, n_max, d_max, cfg.workers, expect_classes=None, cache=cache)
    cache.save()
    return report


def cmd_classify(cfg: RunConfig, args) -> int:
    _, ords, reps = _reps(cfg)
    report = _run_sweep(cfg, reps, ords, cfg.n_max, cfg.d_max)
    cfg.output.mkdir(parents=True, exist_ok=True)
    _report_path(cfg).write_text(cl.format_report(report))
    (cfg.output / "census.csv").write_text(cl.format_census(report))
    (cfg.output / "omega.csv").write_text(cl.format_omega_classes(report))
    census = report.census()
    print("class_id,count")
    for k, v in census.items():
        print(f"{k},{v}")
    ok = len(census) == cl.N_CLASSES
    try:
        exact, msg = cl.check_phi_crosstab(report)
        print(f"phi crosstab {'match' if exact else 'shape only'}: {msg}")
    except ValueError as e:
        print(f"phi crosstab mismatch: {e}")
        ok = False
    oc = cl.omega_census(report)
    print(f"classes={len(census)}")
    print(f"omega_classes={oc.n_classes} trivial_omega={oc.trivial} unique_elsewhere={oc.unique_elsewhere}")
    return 0 if ok else 1


def cmd_verify(cfg: RunConfig, args) -> int:
    tensors, ords, reps = _reps(cfg, log=lambda s: None)
    report = _run_sweep(cfg, reps, ords)
    byo = dict(zip(ords, reps))
    class_reps = [byo[o] for o in cl.class_representatives(report).values()]
    rng = random.Random(cfg.seed)
    n_or, d_or = min(cfg.n_max, 4), min(cfg.d_max, 4)
    cases = [(t, n_or, d_or) for t in class_reps]
    cases += [(rng.choice(tensors), min(cfg.n_max, 3), min(cfg.d_max, 3)) for _ in range(200)]
    suites = [cl.oracle_suite(cases, corrupt=args.corrupt_for_test)]
    suites += cl.lemma_suites(reps, probes=1000, seed=cfg.seed, n_max=cfg.n_max, pool=tensors)
    cache = cl.CapacityCache(cfg.cache_dir / CAPACITY_FILE)
    suites.append(cl.proposition1_check(report, byo, seed=cfg.seed, cache=cache))
    cache.save()
    for v in suites:
        print(v.line())
    return 0 if all(v.passed for v in suites) else 1


def _svg(grid: list[list[int]], title: str) -> str:
    cell = 28
    rows, cols = len(grid), len(grid[0])
    top = max(max(r) for r in grid) or 1
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{cols * cell + 40}" height="{rows * cell + 50}">',
        f'<text x="4" y="16" font-size="12">{title}</text>',
    ]
    for i, row in enumerate(grid):
        for j, c in enumerate(row):
            shade = 255 - int(200 * c / top)
            x, y = 30 + j * cell, 24 + i * cell
            out.append(f'<rect x="{x}" y="{y}" width="{cell}" height="{cell}" fill="rgb({shade},{shade},255)"/>')
            out.append(f'<text x="{x + 9}" y="{y + 18}" font-size="11">{c}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def cmd_heatmap(cfg: RunConfig, args) -> int:
    path = _report_path(cfg)
    if path.exists():
        report = cl.parse_report(path.read_text())
    else:
        _, ords, reps = _reps(cfg, log=lambda s: None)
        report = _run_sweep(cfg, reps, ords)
    members = report.members(args.class_id)
    if not members:
        print(f"error: unknown class id {args.class_id}", file=sys.stderr)
        return 2
    tensors, _ = load_enumeration(cfg.cache_dir, log=lambda s: None)
    t = tensors[members[0]]
    cache = cl.CapacityCache(cfg.cache_dir / CAPACITY_FILE)
    grid = [cache.capacities(members[0], t, n, cfg.d_max) for n in range(1, cfg.n_max + 1)]
    cache.save()
    cfg.output.mkdir(parents=True, exist_ok=True)
    lines = ["n,d,capacity"]
    lines += [f"{n},{d},{grid[n - 1][d - 1]}" for n in range(1, cfg.n_max + 1) for d in range(1, cfg.d_max + 1)]
    (cfg.output / f"heatmap_class{args.class_id}.csv").write_text("\n".join(lines) + "\n")
    width = len(str(cfg.n_max))
    text = ["n\\d " + " ".join(f"{d:>{width}}" for d in range(1, cfg.d_max + 1))]
    for n, row in enumerate(grid, start=1):
        text.append(f"{n:>3} " + " ".join(f"{c:>{width}}" for c in row))
    rendering = "\n".join(text) + "\n"
    (cfg.output / f"heatmap_class{args.class_id}.txt").write_text(rendering)
    print(f"class {args.class_id} ({len(members)} tensors)")
    print(rendering, end="")
    if args.svg:
        Path(args.svg).write_text(_svg(grid, f"class {args.class_id}"))
    return 0


def cmd_fixtures(cfg: RunConfig, args) -> int:
    from .tensor import format_tensor

    _, _, reps = _reps(cfg, log=lambda s: None)
    found = find_fixtures(reps)
    cfg.output.mkdir(parents=True, exist_ok=True)
    for name, t in sorted(found.items()):
        (cfg.output / f"{name}.stab").write_text(format_tensor(t))
        print(f"{name}: {t}")
    return 0


COMMANDS = {
    "enumerate": cmd_enumerate,
    "capacity": cmd_capacity,
    "classify": cmd_classify,
    "verify": cmd_verify,
    "heatmap": cmd_heatmap,
    "fixtures": cmd_fixtures,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n-max", type=int, default=6)
    common.add_argument("--d-max", type=int, default=6)
    common.add_argument("--cache-dir", default=None, help="default: $STABWIRE_CACHE or .stabwire-cache")
    common.add_argument("--out", default="stabwire-out")
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--seed", type=int, default=0)

    p = argparse.ArgumentParser(prog="stabwire", description="Quantum-wire capacity of stabilizer PEPS on a cylinder.")
    sub = p.add_subparsers(dest="cmd", required=True)
    sub.add_parser("enumerate", parents=[common], help="list all [5,1] tensors and their gauge orbits")
    c = sub.add_parser("capacity", parents=[common], help="C(A, n, d) for one tensor file")
    c.add_argument("tensor")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--d", type=int, required=True)
    c.add_argument("--trace", action="store_true", help="print T_R generators per depth")
    sub.add_parser("classify", parents=[common], help="sweep all representatives and write the report")
    v = sub.add_parser("verify", parents=[common], help="oracle, lemma and stability suites")
    v.add_argument("--corrupt-for-test", action="store_true", help=argparse.SUPPRESS)
    h = sub.add_parser("heatmap", parents=[common], help="capacity grid of one transmission class")
    h.add_argument("class_id", type=int)
    h.add_argument("--svg", default=None, help="also write an SVG rendering here")
    sub.add_parser("fixtures", parents=[common], help="write the cluster, GHZ and toric tensors")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _config(args)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    try:
        return COMMANDS[args.cmd](cfg, args)
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
