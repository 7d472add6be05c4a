"""Command-line interface.

Exit codes: 0 success (whatever the verdict), 2 input error, 3 a requested
computation ran out of budget, 4 internal assertion failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from . import corpus
from .complex import canonical_cycles, classical_invariants, gradings
from .f2 import class_is_zero, replay_certificate
from .grid import GridDiagram, GridError, GridFormatError, ascii_grid, grid_to_json, parse_grid
from .kernels import BudgetExceeded

EXIT_OK, EXIT_INPUT, EXIT_BUDGET, EXIT_INTERNAL = 0, 2, 3, 4

# Chain map records list every column only up to this grid number.
MAX_EXPORT_N = 6


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    inputs: list[str]
    budget: int
    threads: int
    fmt: str
    cert_out: str | None

    def __post_init__(self):
        if self.budget <= 0:
            raise InputError("--budget must be positive")
        if self.threads <= 0:
            raise InputError("--threads must be positive")


def _read(path: str) -> tuple[str, str]:
    """Text of ``path``, falling back to a bundled corpus file."""
    p = Path(path)
    if p.is_file():
        try:
            return str(p), p.read_text()
        except OSError as exc:
            raise InputError(f"{path}: {exc.strerror}") from None
    for name in (path, path + ".grid"):
        if name in corpus.names():
            return f"<bundled>/{name}", corpus.read_text(name)
    raise InputError(f"{path}: no such file")


def _load_grid(path: str) -> GridDiagram:
    label, text = _read(path)
    try:
        return parse_grid(text)
    except GridFormatError as exc:
        raise InputError(f"{label}:{exc}") from None
    except GridError as exc:
        raise InputError(f"{label}: {exc}") from None


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _write(path: str, obj) -> None:
    try:
        Path(path).write_text(_dump(obj))
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None


# ---------------------------------------------------------------------------
# commands


def cmd_info(cfg: RunConfig, args) -> int:
    g = _load_grid(args.grid)
    tb, r, comps = classical_invariants(g)
    xp, xm = canonical_cycles(g)
    gp, gm = gradings(g, xp), gradings(g, xm)
    if cfg.fmt == "json":
        out = {
            "grid": grid_to_json(g),
            "n": g.n,
            "components": comps,
            "tb": tb,
            "r": r,
            "x_plus": {"perm": [v + 1 for v in xp], "maslov": gp.maslov, "alexander2": gp.alexander2},
            "x_minus": {"perm": [v + 1 for v in xm], "maslov": gm.maslov, "alexander2": gm.alexander2},
        }
        sys.stdout.write(_dump(out))
    else:
        lines = [
            f"n={g.n} components={comps} tb={tb} r={r}",
            f"x+ M={gp.maslov} A={gp.alexander2 / 2:g}",
            f"x- M={gm.maslov} A={gm.alexander2 / 2:g}",
        ]
        if g.n <= 20:
            lines.append(ascii_grid(g))
        sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_invariants(cfg: RunConfig, args) -> int:
    g = _load_grid(args.grid)
    signs = "+-" if args.sign == "both" else args.sign
    results, certs, status = {}, [], EXIT_OK
    for s in signs:
        try:
            cert = class_is_zero(g, s, cfg.budget)
        except BudgetExceeded as exc:
            results[s] = {"verdict": "inconclusive", "note": str(exc)}
            status = EXIT_BUDGET
            continue
        results[s] = {
            "verdict": cert.verdict,
            "sources_examined": cert.sources_examined,
            "targets_examined": cert.targets_examined,
        }
        certs.append(cert.to_json())
    if cfg.cert_out:
        _write(cfg.cert_out, certs)
    if cfg.fmt == "json":
        sys.stdout.write(_dump({"grid": grid_to_json(g), "lambda": results}))
    else:
        for s, res in results.items():
            sys.stdout.write(f"lambda{s}: {res['verdict']}\n")
            if "note" in res:
                sys.stdout.write(f"  {res['note']}\n")
    return status


def cmd_obstruct(cfg: RunConfig, args) -> int:
    from .obstruction import obstruct

    if args.genus is not None and args.genus < 0:
        raise InputError("--genus must be nonnegative")
    g_minus, g_plus = _load_grid(args.lower), _load_grid(args.upper)
    report = obstruct(g_minus, g_plus, args.genus, cfg.budget, cfg.threads)
    if cfg.cert_out:
        _write(
            cfg.cert_out,
            [c.to_json() for e in (report.lower, report.upper) for c in e.certificates.values()],
        )
    sys.stdout.write(report.dumps() + "\n" if cfg.fmt == "json" else report.to_text())
    return EXIT_OK


def cmd_filling(cfg: RunConfig, args) -> int:
    from .obstruction import filling_obstruction

    g = _load_grid(args.grid)
    verdict, e = filling_obstruction(g, cfg.budget, cfg.threads)
    if cfg.cert_out:
        _write(cfg.cert_out, [c.to_json() for c in e.certificates.values()])
    if cfg.fmt == "json":
        sys.stdout.write(_dump({"endpoint": e.to_json(), "verdict": verdict.to_json()}))
    else:
        sys.stdout.write(f"filling: {verdict.status}\n")
        sys.stdout.writelines(f"  {r}\n" for r in verdict.reasons)
    return EXIT_OK


def cmd_script(cfg: RunConfig, args) -> int:
    from .cobordism import ReplayError, compose_script, parse_script

    g = _load_grid(args.grid)
    label, text = _read(args.script)
    try:
        steps = parse_script(text)
        res = compose_script(g, steps, cfg.budget)
    except GridFormatError as exc:
        raise InputError(f"{label}:{exc}") from None
    except ReplayError as exc:
        raise InputError(f"{label}: replay failed at {exc}") from None
    out = {
        "lower": grid_to_json(res.g_minus),
        "upper": grid_to_json(res.g_plus),
        "steps": len(steps),
        "chi": res.chi,
        "births": res.births,
        "pinches": res.pinches,
        "notes": res.notes,
    }
    exp = res.expected_bidegree
    out["expected_bidegree"] = {"maslov": exp.maslov, "alexander2": exp.alexander2}
    if res.phi is not None:
        phi = res.phi
        chain = phi.preserves_canonical_cycles()
        homology = res.canonical_ok()
        out["map"] = {
            "kind": phi.kind,
            "bidegree": {"maslov": phi.bidegree.maslov, "alexander2": phi.bidegree.alexander2},
            "bidegree_ok": res.bidegree_ok(),
            "x_plus_chain": chain[0],
            "x_minus_chain": chain[1],
            "x_plus_homology": homology[0],
            "x_minus_homology": homology[1],
        }
        if args.map_out:
            gens = None if phi.source.n <= MAX_EXPORT_N else list(canonical_cycles(phi.source))
            record = phi.to_json(gens)
            record["columns_scope"] = "all" if gens is None else "canonical cycles"
            _write(args.map_out, record)
    else:
        out["map"] = None
    if args.out_grid:
        try:
            Path(args.out_grid).write_text(str(res.g_plus) + "\n")
        except OSError as exc:
            raise InputError(f"{args.out_grid}: {exc.strerror}") from None
    if cfg.fmt == "json":
        sys.stdout.write(_dump(out))
    else:
        lines = [f"upper grid: {res.g_plus}", f"chi={res.chi} expected bidegree {tuple(exp)}"]
        m = out["map"]
        if m is None:
            lines.append("no composite map")
        else:
            lines.append(f"map {m['kind']} bidegree {tuple(phi.bidegree)}: "
                         f"{'pass' if m['bidegree_ok'] else 'FAIL'}")
            for s, key in (("+", "plus"), ("-", "minus")):
                lines.append(
                    f"x{s}: chain level {'pass' if m[f'x_{key}_chain'] else 'fail'}, "
                    f"homology {'pass' if m[f'x_{key}_homology'] else 'FAIL'}"
                )
        lines.extend(res.notes)
        sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_verify(cfg: RunConfig, args) -> int:
    label, text = _read(args.certificate)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{label}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    items = data if isinstance(data, list) else [data]
    try:
        ok = [replay_certificate(c) for c in items]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{label}: malformed certificate ({exc})") from None
    if cfg.fmt == "json":
        sys.stdout.write(_dump({"verified": ok}))
    else:
        for c, good in zip(items, ok):
            sys.stdout.write(f"lambda{c.get('sign')} {c.get('verdict')}: "
                             f"{'verified' if good else 'REJECTED'}\n")
    return EXIT_OK if all(ok) else EXIT_INTERNAL


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--budget", type=int, default=10**8,
                        help="largest number of generators a computation may visit")
    common.add_argument("--threads", type=int, default=1,
                        help="worker threads; results do not depend on it")
    common.add_argument("--format", dest="fmt", choices=("text", "json"), default="text")
    common.add_argument("--cert-out", help="write vanishing certificates to this JSON file")

    parser = argparse.ArgumentParser(
        prog="gridlag",
        description="Tilde grid homology, GRID invariants and Lagrangian cobordism obstructions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("info", parents=[common], help="grid number, tb, r and gradings of x+-")
    p.add_argument("grid")
    p.set_defaults(func=cmd_info)

    p = sub.add_parser("invariants", parents=[common], help="decide whether lambda+- vanish")
    p.add_argument("grid")
    p.add_argument("--sign", choices=("+", "-", "both"), default="both")
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("obstruct", parents=[common],
                       help="obstructions to a decomposable cobordism from LOWER to UPPER")
    p.add_argument("lower")
    p.add_argument("upper")
    p.add_argument("--genus", type=int)
    p.set_defaults(func=cmd_obstruct)

    p = sub.add_parser("filling", parents=[common], help="obstructions to a decomposable filling")
    p.add_argument("grid")
    p.set_defaults(func=cmd_filling)

    p = sub.add_parser("script", parents=[common],
                       help="replay a move script and check the composite map")
    p.add_argument("grid")
    p.add_argument("script")
    p.add_argument("--out-grid", help="write the upper grid here")
    p.add_argument("--map-out", help="write the composite chain map record here")
    p.set_defaults(func=cmd_script)

    p = sub.add_parser("verify", parents=[common], help="replay certificate files")
    p.add_argument("certificate")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        inputs = [getattr(args, k) for k in ("grid", "lower", "upper", "script", "certificate")
                  if getattr(args, k, None)]
        cfg = RunConfig(args.command, inputs, args.budget, args.threads, args.fmt, args.cert_out)
        return args.func(cfg, args)
    except InputError as exc:
        sys.stderr.write(f"gridlag: error: {exc}\n")
        return EXIT_INPUT
    except BudgetExceeded as exc:
        sys.stderr.write(f"gridlag: inconclusive: {exc}\n")
        return EXIT_BUDGET
    except AssertionError as exc:
        sys.stderr.write(f"gridlag: internal failure: {exc}\n")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
