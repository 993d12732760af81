"""Command-line interface.

Every invocation is normalised into a :class:`JobSpec` (from flags or from a
``--job`` JSON file), executed, and reported as one JSON document.  Exit codes:
0 success, 2 negative verdict (not solvable, no such differential), 1 error.
Errors carry a machine-readable ``code``.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

from . import render as _render
from .applications import conjugate_witness, degeneration_family, kdiff_conjugate_range, kdiff_unique_zero, torsion_report
from .canonical import CurveConfig, CurveError, analyze
from .forward import DEFAULT_RMAX, DEFAULT_TOL, SynthesisError, detect, synthesize, verdict_at_degree, verify
from .inverse import Comb, InverseSolveError, OrderingError, round_trip, solve
from .polynomials import working_dtype
from .serialize import SerializationError, decode, encode

EXIT_OK, EXIT_ERROR, EXIT_NEGATIVE = 0, 1, 2

COMMANDS = ("forward", "solve", "inverse", "torsion", "kdiff", "degenerate", "render")
INPUT_SHAPES = {
    "forward": {"curve"},
    "solve": {"curve"},
    "torsion": {"curve"},
    "inverse": {"comb"},
    "degenerate": {"comb"},
    "kdiff": {"g", "k", "n"},
    "render": {"comb", "curve"},
}
REQUIRED_INPUT = {"kdiff": {"g", "k"}}
OPTIONS = {
    "forward": {"rmax", "tol", "render", "render_dir", "out"},
    "solve": {"r", "tol", "render", "render_dir", "out"},
    "torsion": {"rmax", "tol", "out"},
    "inverse": {"render", "render_dir", "out", "max_iter", "newton_tol"},
    "degenerate": {"shrink", "steps", "render", "render_dir", "out"},
    "kdiff": {"witness", "out"},
    "render": {"render", "render_dir", "out"},
}
RENDER_KINDS = {"comb", "flat", "quotient", "solution"}


class CliError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code
        self.message = message


@dataclass
class JobSpec:
    command: str
    input: dict[str, Any]
    options: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise CliError("E_JOB", f"unknown command {self.command!r}")
        if not isinstance(self.input, dict) or not isinstance(self.options, dict):
            raise CliError("E_JOB", "input and options must be objects")
        keys = set(self.input)
        shapes = INPUT_SHAPES[self.command]
        if not keys <= shapes:
            raise CliError("E_JOB", f"unknown input field(s) {sorted(keys - shapes)} for {self.command}")
        if self.command != "kdiff" and len(keys) != 1:
            raise CliError("E_JOB", f"{self.command} needs exactly one input of {sorted(shapes)}, got {sorted(keys)}")
        missing = REQUIRED_INPUT.get(self.command, set()) - keys
        if missing:
            raise CliError("E_JOB", f"missing input field(s) {sorted(missing)} for {self.command}")
        unknown = set(self.options) - OPTIONS[self.command]
        if unknown:
            raise CliError("E_JOB", f"unknown option(s) {sorted(unknown)} for {self.command}")
        kinds = set(self.options.get("render") or [])
        if not kinds <= RENDER_KINDS:
            raise CliError("E_JOB", f"unknown render kind(s) {sorted(kinds - RENDER_KINDS)}")

    @classmethod
    def from_json(cls, data: Any) -> "JobSpec":
        if not isinstance(data, dict):
            raise CliError("E_JOB", "job must be a JSON object")
        extra = set(data) - {"command", "input", "options"}
        if extra:
            raise CliError("E_JOB", f"unknown job field(s) {sorted(extra)}")
        if "command" not in data or "input" not in data:
            raise CliError("E_JOB", "job needs 'command' and 'input'")
        return cls(data["command"], data["input"], data.get("options", {}))


def _curve(data) -> CurveConfig:
    try:
        return decode(data, CurveConfig, "curve")
    except CurveError as exc:
        raise CliError("E_ORDER", str(exc)) from exc


def _comb(data) -> Comb:
    if not isinstance(data, dict):
        raise CliError("E_JOB", "comb must be an object {r, q, h}")
    try:
        return decode(data, Comb, "comb")
    except (ValueError, TypeError) as exc:
        if isinstance(exc, SerializationError):
            raise
        raise CliError("E_ORDER", str(exc)) from exc


def _int_option(opts, name, default):
    v = opts.get(name, default)
    if not isinstance(v, int) or isinstance(v, bool):
        raise CliError("E_JOB", f"option {name} must be an integer")
    return v


def _float_option(opts, name, default):
    v = opts.get(name, default)
    if not isinstance(v, (int, float)) or isinstance(v, bool):
        raise CliError("E_JOB", f"option {name} must be a number")
    return float(v)


def _solution_payload(curve, data, verdict):
    sol = synthesize(curve, data, verdict)
    cert = verify(curve, sol, data.R)
    chebyshev = curve.genus == 0
    return sol, {"solution": encode(sol), "certificate": encode(cert), "chebyshev": chebyshev}


def execute(job: JobSpec) -> tuple[int, dict, dict[str, str]]:
    """Run a job; returns (exit code, JSON payload, {file name: SVG text})."""
    opts = job.options
    inp = job.input
    kinds = list(opts.get("render") or [])
    svgs: dict[str, str] = {}
    cmd = job.command
    status = EXIT_OK
    result: dict[str, Any] = {}

    if cmd in ("forward", "solve"):
        bad = set(kinds) - {"solution"}
        if bad:
            raise CliError("E_JOB", f"render kind(s) {sorted(bad)} need a comb input")
        curve = _curve(inp["curve"])
        tol = _float_option(opts, "tol", DEFAULT_TOL)
        data = analyze(curve)
        if cmd == "forward":
            verdict = detect(curve, data, _int_option(opts, "rmax", DEFAULT_RMAX), tol)
        else:
            if "r" not in opts:
                raise CliError("E_JOB", "solve needs option r")
            verdict = verdict_at_degree(data, _int_option(opts, "r", 1), tol)
        result = {"curve": encode(curve), "canonical": encode(data), "verdict": encode(verdict), "chebyshev": curve.genus == 0}
        if verdict.solvable:
            sol, extra = _solution_payload(curve, data, verdict)
            result.update(extra)
            if "solution" in kinds:
                svgs["solution.svg"] = _render.render_solution(curve, sol)
        else:
            status = EXIT_NEGATIVE
    elif cmd == "torsion":
        curve = _curve(inp["curve"])
        rep = torsion_report(curve, _int_option(opts, "rmax", 50), _float_option(opts, "tol", DEFAULT_TOL))
        result = {"curve": encode(curve), "torsion": encode(rep)}
        if rep.divisor_order is None:
            status = EXIT_NEGATIVE
    elif cmd == "inverse":
        comb = _comb(inp["comb"])
        kw = {}
        if "max_iter" in opts:
            kw["max_iter"] = _int_option(opts, "max_iter", 40)
        if "newton_tol" in opts:
            kw["tol"] = _float_option(opts, "newton_tol", 1e-10)
        res = solve(comb, **kw)
        check = round_trip(res, comb)
        result = {"comb": encode(comb), "curve": encode(res.curve), "result": encode(res), "round_trip": encode(check)}
        if not check.ok:
            raise CliError("E_ROUNDTRIP", f"forward round trip failed (h error {check.h_error:.3g})")
        svgs.update(_comb_svgs(comb, kinds, res.curve))
    elif cmd == "degenerate":
        comb = _comb(inp["comb"])
        fam = degeneration_family(comb, _int_option(opts, "shrink", 1), _int_option(opts, "steps", 6))
        result = {"family": encode(fam), "min_gaps": encode(fam.min_gaps)}
        if not fam.completed:
            raise CliError("E_SOLVER", fam.error or "degeneration family ended early")
        for i, step in enumerate(fam.steps):
            for name, svg in _comb_svgs(comb.with_h(step.h), kinds, step.result.curve).items():
                svgs[f"step{i}_{name}"] = svg
    elif cmd == "kdiff":
        g, k = inp["g"], inp["k"]
        for name, v in (("g", g), ("k", k)):
            if not isinstance(v, int) or isinstance(v, bool):
                raise CliError("E_JOB", f"{name} must be an integer")
        witness = bool(opts.get("witness", False))
        try:
            if "n" in inp:
                n = inp["n"]
                ok = kdiff_conjugate_range(g, k, n)
                result = {"g": g, "k": k, "n": n, "in_range": ok}
                if ok and witness:
                    result["witness"] = encode(conjugate_witness(g, k, n))
                status = EXIT_OK if ok else EXIT_NEGATIVE
            else:
                rep = kdiff_unique_zero(g, k, build_witness=witness)
                result = {"kdiff": encode(rep)}
                status = EXIT_OK if rep.exists_unique_zero else EXIT_NEGATIVE
        except ValueError as exc:
            raise CliError("E_INPUT", str(exc)) from exc
    elif cmd == "render":
        if not kinds:
            raise CliError("E_JOB", "render needs at least one render kind")
        if "comb" in inp:
            comb = _comb(inp["comb"])
            curve = None
            if "solution" in kinds:
                curve = solve(comb).curve
            svgs.update(_comb_svgs(comb, kinds, curve))
            result = {"comb": encode(comb)}
        else:
            curve = _curve(inp["curve"])
            if set(kinds) != {"solution"}:
                raise CliError("E_JOB", "a curve input can only render 'solution'")
            data = analyze(curve)
            verdict = detect(curve, data, DEFAULT_RMAX)
            if not verdict.solvable:
                return EXIT_NEGATIVE, _envelope(cmd, EXIT_NEGATIVE, {"curve": encode(curve), "verdict": encode(verdict)}), {}
            svgs["solution.svg"] = _render.render_solution(curve, synthesize(curve, data, verdict))
            result = {"curve": encode(curve)}
    result["files"] = sorted(svgs)
    return status, _envelope(cmd, status, result), svgs


def _comb_svgs(comb: Comb, kinds, curve: Optional[CurveConfig]) -> dict[str, str]:
    out = {}
    if "comb" in kinds:
        out["comb.svg"] = _render.render_comb(comb)
    if "flat" in kinds:
        out["flat.svg"] = _render.render_flat_surface(comb)
    if "quotient" in kinds:
        out["quotient.svg"] = _render.render_flat_surface(comb, quotient=True)
    if "solution" in kinds and curve is not None:
        data = analyze(curve)
        verdict = verdict_at_degree(data, comb.r)
        if verdict.solvable:
            out["solution.svg"] = _render.render_solution(curve, synthesize(curve, data, verdict))
    return out


def _envelope(cmd: str, status: int, result: dict) -> dict:
    label = {EXIT_OK: "ok", EXIT_NEGATIVE: "negative"}[status]
    return {"command": cmd, "status": label, "precision": os.environ.get("PELL_ABEL_PRECISION", "double"), "result": result}


def _csv(kind):
    def parse(text: str):
        try:
            return [kind(v) for v in text.split(",") if v.strip()]
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from exc

    return parse


def _json_arg(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError("E_JSON", f"malformed JSON argument: {exc}") from exc


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pellabel", description="Pell-Abel equations on totally real hyperelliptic curves.")
    p.add_argument("--job", help="JSON job file (replaces the subcommand)")
    p.add_argument("--out", help="write the JSON result here instead of stdout")
    p.add_argument("--render-dir", default=".", help="directory for SVG output")
    io = argparse.ArgumentParser(add_help=False)
    io.add_argument("--out", default=argparse.SUPPRESS, help="write the JSON result here instead of stdout")
    io.add_argument("--render-dir", default=argparse.SUPPRESS, help="directory for SVG output")
    sub = p.add_subparsers(dest="command")

    def common(sp, render=True):
        if render:
            sp.add_argument("--render", type=_csv(str), default=[], help="comma list of comb,flat,quotient,solution")

    def comb_args(sp):
        sp.add_argument("--r", type=int, required=True, help="comb height (degree)")
        sp.add_argument("--q", type=_csv(int), default=[], help="slit heights, e.g. 1,2")
        sp.add_argument("--h", type=_csv(float), default=[], help="slit lengths, e.g. 1.0,1.0")

    sp = sub.add_parser("forward", parents=[io], help="detect the minimal degree and synthesise P, Q")
    sp.add_argument("--curve", required=True, help="JSON endpoint array")
    sp.add_argument("--rmax", type=int, default=DEFAULT_RMAX)
    sp.add_argument("--tol", type=float, default=DEFAULT_TOL)
    common(sp)

    sp = sub.add_parser("solve", parents=[io], help="synthesise a solution of a given degree")
    sp.add_argument("--curve", required=True)
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--tol", type=float, default=DEFAULT_TOL)
    common(sp)

    sp = sub.add_parser("inverse", parents=[io], help="curve realising a comb")
    comb_args(sp)
    common(sp)

    sp = sub.add_parser("torsion", parents=[io], help="torsion-order report")
    sp.add_argument("--curve", required=True)
    sp.add_argument("--rmax", type=int, default=50)

    sp = sub.add_parser("kdiff", parents=[io], help="k-differentials with a single zero")
    sp.add_argument("--g", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--n", type=int, help="zero order at z for the conjugate-support question")
    sp.add_argument("--witness", action="store_true", help="build a witness curve")

    sp = sub.add_parser("degenerate", parents=[io], help="shrink one slit repeatedly")
    comb_args(sp)
    sp.add_argument("--shrink", type=int, default=1)
    sp.add_argument("--steps", type=int, default=6)
    common(sp)

    sp = sub.add_parser("render", parents=[io], help="SVG pictures of a comb or a solution")
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--curve")
    g.add_argument("--comb", help='JSON {"r":..,"q":[..],"h":[..]}')
    common(sp)
    return p


def job_from_args(args: argparse.Namespace) -> JobSpec:
    cmd = args.command
    opts: dict[str, Any] = {}
    if getattr(args, "render", None):
        opts["render"] = list(args.render)
    if cmd in ("forward", "solve", "torsion"):
        inp = {"curve": _json_arg(args.curve)}
        if cmd != "solve":
            opts["rmax"] = args.rmax
        else:
            opts["r"] = args.r
        if cmd != "torsion":
            opts["tol"] = args.tol
    elif cmd in ("inverse", "degenerate"):
        inp = {"comb": {"r": args.r, "q": args.q, "h": args.h}}
        if cmd == "degenerate":
            opts.update(shrink=args.shrink, steps=args.steps)
    elif cmd == "kdiff":
        inp = {"g": args.g, "k": args.k}
        if args.n is not None:
            inp["n"] = args.n
        if args.witness:
            opts["witness"] = True
    elif cmd == "render":
        inp = {"curve": _json_arg(args.curve)} if args.curve else {"comb": _json_arg(args.comb)}
    else:
        raise CliError("E_USAGE", "a subcommand or --job is required")
    return JobSpec(cmd, inp, opts)


def _emit(payload: dict, out: Optional[str]):
    text = json.dumps(payload, sort_keys=True, indent=2, allow_nan=False) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def run(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_OK
    out = args.out
    try:
        working_dtype()
    except ValueError as exc:
        _emit({"status": "error", "error": {"code": "E_PRECISION", "message": str(exc)}}, out)
        return EXIT_ERROR
    try:
        if args.job:
            try:
                data = json.loads(Path(args.job).read_text(encoding="utf-8"))
            except json.JSONDecodeError as exc:
                raise CliError("E_JSON", f"malformed job file: {exc}") from exc
            except OSError as exc:
                raise CliError("E_IO", str(exc)) from exc
            job = JobSpec.from_json(data)
        else:
            job = job_from_args(args)
        out = job.options.get("out", out)
        render_dir = Path(job.options.get("render_dir", args.render_dir))
        status, payload, svgs = execute(job)
        if svgs:
            render_dir.mkdir(parents=True, exist_ok=True)
            for name, svg in svgs.items():
                (render_dir / name).write_text(svg, encoding="utf-8")
        _emit(payload, out)
        return status
    except CliError as exc:
        code, msg = exc.code, exc.message
    except SerializationError as exc:
        code, msg = "E_SCHEMA", str(exc)
    except (CurveError, OrderingError) as exc:
        code, msg = "E_ORDER", str(exc)
    except InverseSolveError as exc:
        code, msg = "E_SOLVER", str(exc)
    except SynthesisError as exc:
        code, msg = "E_SYNTHESIS", str(exc)
    except ValueError as exc:
        code, msg = "E_INPUT", str(exc)
    _emit({"status": "error", "error": {"code": code, "message": msg}}, out)
    return EXIT_ERROR


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
