"""``obstructor`` command line: info, table, cycles, check, batch, verify."""

from __future__ import annotations

import argparse
import csv
import glob as globmod
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

from .cycles import CycleError, enumerate_simple_cycles
from .datasets import data_dir, resolve
from .engine import BOX_ROW_MODES, SearchConfig, render, search, verify
from .intersection import render_table
from .surface import SurfaceError, heawood_minimum, load_surface, surface_info
from .symmetry import MAX_VERTICES, automorphism_group, generators

EXIT_PROVEN = 0
EXIT_ERROR = 1
EXIT_INCONCLUSIVE = 2


class UsageError(Exception):
    pass


def _load(path: str):
    try:
        p = resolve(path)
    except FileNotFoundError as exc:
        raise UsageError(str(exc)) from None
    try:
        return p, load_surface(p.read_text(encoding="utf-8"))
    except (OSError, UnicodeDecodeError) as exc:
        raise UsageError(f"{p}: {exc}") from None
    except SurfaceError as exc:
        raise UsageError(f"{p}: {exc}") from None


def _out(text: str) -> None:
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def cmd_info(args) -> int:
    _, s = _load(args.path)
    info = surface_info(s)
    lines = [info.summary(), f"Heawood minimum for χ={info.euler_characteristic}: {heawood_minimum(info.euler_characteristic)} vertices"]
    if s.n_vertices <= MAX_VERTICES:
        group = automorphism_group(s)
        gens = generators(group)
        lines.append(f"automorphism group order {len(group)}")
        lines.append("generators: " + (" ".join(str(g) for g in gens) or "none"))
    else:
        lines.append(f"automorphism group not computed (more than {MAX_VERTICES} vertices)")
    _out("\n".join(lines))
    return 0


def cmd_table(args) -> int:
    _, s = _load(args.path)
    _out(render_table(s, None, args.format))
    return 0


def cmd_cycles(args) -> int:
    _, s = _load(args.path)
    try:
        cycles = enumerate_simple_cycles(s, args.max_len)
    except CycleError as exc:
        raise UsageError(str(exc)) from None
    if args.json:
        rows = [{"cycle": list(c.vertices), "w1": w} for c, w in cycles]
        _out(json.dumps(rows, indent=1))
    else:
        _out("\n".join(f"{c} w1={w}" for c, w in cycles) or "no cycles")
    return 0


def _config(args) -> SearchConfig:
    root = None
    if args.root_cycle:
        try:
            root = tuple(int(v) for v in args.root_cycle.split(","))
        except ValueError:
            raise UsageError("--root-cycle expects comma-separated vertices, e.g. 5,6,7") from None
    return SearchConfig(
        max_depth=args.depth,
        symmetry=not args.no_symmetry,
        branch=args.branch,
        root_cycle=root,
        box_rows=args.linear,
    )


def cmd_check(args) -> int:
    path, s = _load(args.path)
    try:
        verdict = search(s, _config(args))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    info = surface_info(s)
    _out(f"{path.name}: {info.summary()}")
    if verdict.non_immersible:
        cert = verdict.certificate
        check = verify(s, cert)
        if not check:  # pragma: no cover - would be an engine bug
            print(f"internal error: emitted certificate fails verification: {check}", file=sys.stderr)
            return EXIT_ERROR
        _out(f"verdict: NonImmersible (depth {cert.depth}, {cert.n_nodes} nodes, {len(cert.root_cases)} root cases)")
        if not args.quiet:
            _out(render(cert))
        if args.cert:
            Path(args.cert).write_text(cert.to_json(), encoding="utf-8", newline="\n")
        return EXIT_PROVEN
    _out(f"verdict: Inconclusive ({verdict.reason})")
    if verdict.residual is not None and not args.quiet:
        yes = sorted(str(c) for c, v in verdict.residual.items() if v)
        _out("residual model: " + (", ".join(yes) if yes else "no piercings"))
    return EXIT_INCONCLUSIVE


@dataclass
class RunReport:
    input: str
    V: int | str = ""
    E: int | str = ""
    F: int | str = ""
    chi: int | str = ""
    orientable: bool | str = ""
    genus: int | str = ""
    neighborly: bool | str = ""
    verdict: str = ""
    certificate: str = ""
    seconds: str = ""
    error: str = ""


def _run_one(job: tuple[str, str | None, dict]) -> RunReport:
    path, cert_dir, cfg = job
    report = RunReport(input=path)
    t0 = time.perf_counter()
    try:
        s = load_surface(Path(path).read_text(encoding="utf-8"))
        info = surface_info(s)
        report.V, report.E, report.F = info.f_vector
        report.chi = info.euler_characteristic
        report.orientable = info.orientable
        report.genus = info.genus
        report.neighborly = info.neighborly
        verdict = search(s, SearchConfig(**cfg))
        report.verdict = verdict.kind
        if verdict.non_immersible and cert_dir:
            out = Path(cert_dir) / (Path(path).stem + ".cert.json")
            out.write_text(verdict.certificate.to_json(), encoding="utf-8", newline="\n")
            report.certificate = str(out)
    except (OSError, UnicodeDecodeError, SurfaceError, ValueError) as exc:
        report.verdict = "Error"
        report.error = str(exc)
    report.seconds = f"{time.perf_counter() - t0:.3f}"
    return report


def cmd_batch(args) -> int:
    pattern = args.glob
    if not Path(pattern).is_absolute() and not globmod.glob(pattern):
        pattern = str(data_dir() / pattern)
    paths = sorted(set(globmod.glob(pattern)), key=lambda p: Path(p).name)
    if not paths:
        raise UsageError(f"no files match {args.glob}")
    if args.cert_dir:
        Path(args.cert_dir).mkdir(parents=True, exist_ok=True)
    cfg = asdict(_config(args))
    jobs = [(p, args.cert_dir, cfg) for p in paths]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            reports = list(pool.map(_run_one, jobs))
    else:
        reports = [_run_one(j) for j in jobs]
    fields = list(RunReport.__dataclass_fields__)
    if args.summary:
        with open(args.summary, "w", newline="", encoding="utf-8") as fh:
            w = csv.DictWriter(fh, fieldnames=fields, lineterminator="\n")
            w.writeheader()
            for r in reports:
                w.writerow(asdict(r))
    width = max(len(Path(r.input).name) for r in reports)
    for r in reports:
        extra = f"  ({r.error})" if r.error else ""
        _out(f"{Path(r.input).name.ljust(width)}  {r.verdict}{extra}")
    return EXIT_ERROR if any(r.error for r in reports) else 0


def cmd_verify(args) -> int:
    _, s = _load(args.path)
    try:
        text = Path(args.cert).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"{args.cert}: {exc}") from None
    result = verify(s, text)
    _out(str(result))
    return 0 if result else EXIT_ERROR


def _search_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--depth", type=int, default=8, help="maximum branching depth (default 8)")
    p.add_argument("--no-symmetry", action="store_true", help="do not reduce root cases by automorphisms")
    p.add_argument("--branch", choices=("edge", "box", "index"), default="edge", help="pierce-variable branching rule")
    p.add_argument("--root-cycle", help="split on this 3-cycle instead of choosing one, e.g. 5,6,7")
    p.add_argument(
        "--linear",
        choices=BOX_ROW_MODES,
        default="none",
        help="extra rows in the parity system: coupled-pair equalities or even-box rows (default none)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="obstructor",
        description="Inspect triangulated surfaces and prove that they have no polyhedral immersion in 3-space.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("info", help="surface summary, Heawood bound, automorphism group")
    p.add_argument("path")
    p.set_defaults(func=cmd_info)

    p = sub.add_parser("table", help="print the intersection table")
    p.add_argument("path")
    p.add_argument("--format", choices=("text", "csv", "json"), default="text")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("cycles", help="simple edge cycles with their orientation character")
    p.add_argument("path")
    p.add_argument("--max-len", type=int, default=3)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_cycles)

    p = sub.add_parser("check", help="try to prove that no polyhedral immersion exists")
    p.add_argument("path")
    _search_flags(p)
    p.add_argument("--cert", help="write the certificate JSON here when proven")
    p.add_argument("--quiet", action="store_true", help="print only the verdict")
    p.add_argument(
        "--seedless-deterministic",
        action="store_true",
        help="accepted for compatibility; the search never uses randomness",
    )
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("batch", help="check many files and write a CSV summary")
    p.add_argument("glob")
    _search_flags(p)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--summary", help="CSV output path")
    p.add_argument("--cert-dir", help="directory for certificates of proven inputs")
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("verify", help="replay a certificate against a triangulation")
    p.add_argument("path")
    p.add_argument("cert")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"obstructor: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
