"""quatquot command line: validation, scans, descent, classification and the full pipeline.

Exit codes: 0 every check passed, 1 a check failed, 2 bad input or usage.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from importlib import resources
from pathlib import Path
from typing import Any, Callable

from . import _kernels
from .group_action import kernel_report
from .joyce import correspondence_check, nondegeneracy_scan, p_from_R
from .moment import scan_transversality
from .quotient_geom import descend_summary
from .toric_data import DataError, ToricInput, is_convex, parse_input, validate_R, validate_S
from .twistor_class import classification_report, deformability, deformability_bruteforce

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _resolve(path: str) -> Path:
    p = Path(path)
    if p.exists():
        return p
    packaged = resources.files("quatquot") / "fixtures" / p.name
    if packaged.is_file():
        return Path(str(packaged))
    raise UsageError(f"no such input file: {path}", "input")


def load_input(path: str) -> ToricInput:
    p = _resolve(path)
    try:
        doc = json.loads(p.read_text())
    except json.JSONDecodeError as e:
        raise UsageError(f"malformed JSON: {e.msg}", f"line {e.lineno} column {e.colno}") from e
    try:
        return parse_input(doc)
    except DataError as e:
        field, _, msg = str(e).partition(": ")
        raise UsageError(msg or str(e), field) from e


def _validation(inp: ToricInput) -> dict[str, Any]:
    vs = validate_S(inp.S)
    vr = validate_R(inp.theta)
    convex = is_convex(inp.S)
    issues = [i.to_json() for i in vs.issues + vr.issues]
    if not convex:
        issues.append({"check": "convex", "index": None, "message": "S is not convex"})
    checks = {**vs.checks, **vr.checks, "convex": convex}
    return {"status": "PASS" if all(checks.values()) else "FAIL", "checks": checks, "issues": issues,
            "index": vs.extra["index"], "simply_connected": vs.extra["simply_connected"]}


def cmd_validate(inp: ToricInput, args) -> tuple[Any, str, list]:
    v = _validation(inp)
    if args.format == "json":
        return v["issues"], v["status"], []
    return v, v["status"], []


def cmd_derive(inp: ToricInput, args):
    rep = {"T": [list(v) for v in inp.T.T], **kernel_report(inp.S)}
    return rep, rep["locally_free"], []


def _split_rows(rep: dict[str, Any]) -> tuple[dict[str, Any], list]:
    rep = dict(rep)
    return rep, rep.pop("rows", [])


def cmd_scan(inp: ToricInput, args):
    kw = {} if args.tol is None else {"tol": args.tol}
    rep, rows = _split_rows(scan_transversality(inp.S, inp.theta, args.grid, **kw))
    return rep, rep["status"], rows


def cmd_joyce(inp: ToricInput, args):
    nd, rows = _split_rows(nondegeneracy_scan(inp.T, p_from_R(inp.R), args.grid, tuple(args.eps)))
    kw = {} if args.tol is None else {"tol": args.tol}
    corr = correspondence_check(inp.S, inp.theta, args.grid, **kw)
    ok = nd["status"] == "PASS" and corr["status"] == "PASS"
    return {"nondegeneracy": nd, "correspondence": corr, "status": "PASS" if ok else "FAIL"}, \
        "PASS" if ok else "FAIL", rows


def cmd_descend(inp: ToricInput, args):
    kw = {} if args.tol is None else {"tol": args.tol}
    rep = descend_summary(inp.S, inp.theta, args.samples, args.seed, **kw)
    out = {
        "samples": rep["samples"],
        "summary": {"max_residual": rep["max_residual"], "skipped": rep["skipped"], "accepted": rep["accepted"]},
        "status": rep["status"],
    }
    return out, rep["status"], []


def cmd_classify(inp: ToricInput, args):
    kw = {} if args.tol is None else {"tol": args.tol}
    rep = classification_report(inp.S, inp.theta, n=args.samples, seed=args.seed, **kw)
    return rep, rep["status"], []


def _deform(inp: ToricInput) -> dict[str, Any]:
    rep = deformability(inp.T)
    brute = deformability_bruteforce(inp.T)
    agree = brute["extra_weights"] == rep["extra_weights"]
    return {**rep, "oracle_agrees": agree, "status": "PASS" if agree else "FAIL"}


def cmd_deform(inp: ToricInput, args):
    rep = _deform(inp)
    return rep, rep["status"], []


def cmd_pipeline(inp: ToricInput, args):
    stages: dict[str, Any] = {}
    stages["validation"] = _validation(inp)
    if stages["validation"]["checks"]["consecutive_independent"] and stages["validation"]["checks"]["sector"]:
        kr = kernel_report(inp.S)
        stages["kernel"] = {**kr, "status": kr["locally_free"]}
        stages["transversality"] = _split_rows(scan_transversality(inp.S, inp.theta, args.grid))[0]
        joyce, _, _ = cmd_joyce(inp, argparse.Namespace(grid=args.grid, eps=args.eps, tol=None))
        stages["joyce"] = joyce
        d, _, _ = cmd_descend(inp, argparse.Namespace(samples=args.samples, seed=args.seed, tol=None))
        d.pop("samples")
        stages["descent"] = d
        c = classification_report(inp.S, inp.theta, n=args.samples, seed=args.seed)
        stages["classification"] = c
        stages["deformability"] = _deform(inp)
    verdict = "PASS" if all(s["status"] == "PASS" for s in stages.values()) else "FAIL"
    if len(stages) == 1:
        verdict = "FAIL"
    rep = {"input": {"lattice_data": [list(u) for u in inp.S], "conformal_angles": list(inp.theta)},
           "stages": stages, "verdict": verdict}
    return rep, verdict, []


def _text(obj: Any, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        lines = []
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v and not all(isinstance(x, (int, float)) for x in v):
                lines.append(f"{pad}{k}:")
                lines.append(_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {json.dumps(v)}")
        return "\n".join(lines)
    if isinstance(obj, list):
        return "\n".join(_text(x, indent) if isinstance(x, dict) else f"{pad}- {json.dumps(x)}" for x in obj)
    return f"{pad}{obj}"


def _csv(rows: list) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "y", "det"])
    for r in rows:
        w.writerow([repr(float(c)) for c in r])
    return buf.getvalue()


COMMANDS: dict[str, tuple[Callable, str]] = {
    "validate": (cmd_validate, "check S and R"),
    "derive": (cmd_derive, "derived data T, kernel basis, locally-free screen"),
    "scan-transversality": (cmd_scan, "transversality determinant over a half-plane grid"),
    "joyce-check": (cmd_joyce, "Joyce nondegeneracy and its correspondence with transversality"),
    "descend": (cmd_descend, "descend the quaternionic structure at random points"),
    "classify": (cmd_classify, "twistor-line classification triple"),
    "deform": (cmd_deform, "G_S-invariant quadratic twistor functions"),
    "pipeline": (cmd_pipeline, "every stage; PASS only if all pass"),
}
CSV_COMMANDS = {"scan-transversality", "joyce-check"}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("input", help="JSON file; a bare fixture name (k3.json, ...) falls back to the packaged copy")
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="format", action="store_const", const="json")
    fmt.add_argument("--text", dest="format", action="store_const", const="text")
    fmt.add_argument("--csv", dest="format", action="store_const", const="csv")
    common.add_argument("--grid", type=int, default=50, metavar="N")
    common.add_argument("--samples", type=int, default=200, metavar="N")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=None, help="override the command's default tolerance")
    common.add_argument("--eps", type=float, nargs="+", default=[1e-3, 1e-5])
    common.set_defaults(format="text")

    parser = _Parser(prog="quatquot", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, (_, help_) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=help_)
    return parser


def _emit_error(message: str, field: str | None) -> int:
    sys.stderr.write(json.dumps({"error": message, "field": field}) + "\n")
    return EXIT_USAGE


def main(argv: list[str] | None = None) -> int:
    _kernels.set_threads_from_env()
    args = build_parser().parse_args(argv)
    if args.grid < 0 or args.samples < 0:
        return _emit_error("--grid and --samples must be non-negative", "--grid" if args.grid < 0 else "--samples")
    if args.format == "csv" and args.command not in CSV_COMMANDS:
        return _emit_error(f"--csv is only available for {', '.join(sorted(CSV_COMMANDS))}", "--csv")
    try:
        inp = load_input(args.input)
        func, _ = COMMANDS[args.command]
        report, status, rows = func(inp, args)
    except UsageError as e:
        return _emit_error(str(e), e.field)
    except DataError as e:
        return _emit_error(str(e), "input")
    if args.format == "json":
        sys.stdout.write(json.dumps(report, indent=2) + "\n")
    elif args.format == "csv":
        sys.stdout.write(_csv(rows))
    else:
        sys.stdout.write(_text(report) + "\n")
    return EXIT_PASS if status == "PASS" else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
