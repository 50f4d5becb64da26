"""Command-line front end.

Exit codes:
  0  success (every requested proof succeeded)
  2  assumption or parameter violation (including bad command-line usage)
  3  proof not obtained (empty feasible set or failed verification)
  4  input/output error
  5  continuation stalled (partial output is still written)
  6  numerical failure (Newton divergence, singular matrix, fold)
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bounds import ProofParams
from .continuation import BranchPoint, branch_from_json, branch_to_json, trace_both
from .errors import (
    AssumptionError,
    ConvergenceError,
    DegenerateLU,
    EmptyFeasibleSet,
    FoldError,
    ParameterError,
    SingularError,
    StallError,
    UnsupportedRegime,
)
from .problem import QuadraticProblem, example4, f_proj, newton_solve, problem_from_json
from .prover import prove
from .seqspace import norm_s

EXIT_OK, EXIT_PARAM, EXIT_NOT_PROVED, EXIT_IO, EXIT_STALL, EXIT_NUMERIC = 0, 2, 3, 4, 5, 6


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, (AssumptionError, ParameterError, UnsupportedRegime)):
        return EXIT_PARAM
    if isinstance(exc, EmptyFeasibleSet):
        return EXIT_NOT_PROVED
    if isinstance(exc, StallError):
        return EXIT_STALL
    if isinstance(exc, (ConvergenceError, SingularError, FoldError, DegenerateLU)):
        return EXIT_NUMERIC
    if isinstance(exc, OSError):
        return EXIT_IO
    if isinstance(exc, ValueError):
        return EXIT_PARAM
    raise exc


@dataclass
class RunConfig:
    command: str
    problem: QuadraticProblem
    params: ProofParams = field(default_factory=ProofParams)
    r: float | None = None
    tol: float = 1e-14
    ds: float = 1e-3
    ds_max: float | None = None
    steps: int = 10
    prove: bool = False
    timestamp: bool = True
    threads: int | None = None
    x0: list | None = None
    out: str | None = None
    branch_out: str | None = None
    csv_out: str | None = None
    certs_out: str | None = None
    branch_in: str | None = None


def atomic_write(path: str, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def _fmt(v) -> str:
    return "" if v is None else format(float(v), ".17g")


def branch_csv(points, certs, s: float) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(["sigma", "x1", "norm_s", "proved", "r"])
    for i, p in enumerate(points):
        c = certs[i] if certs is not None else None
        proved = "" if c is None else ("true" if c.get("proved") else "false")
        r = None if c is None else c.get("r")
        x1 = p.x[1] if len(p.x) > 1 else 0.0
        w.writerow([_fmt(p.sigma), _fmt(x1), _fmt(norm_s(list(p.x), s)), proved, _fmt(r)])
    return buf.getvalue()


def _worker_count(cfg: RunConfig, n: int) -> int:
    env = os.environ.get("TRICONTRACT_THREADS")
    cap = cfg.threads or (int(env) if env and env.isdigit() and int(env) > 0 else os.cpu_count() or 1)
    return max(1, min(cap, n))


def prove_point(problem: QuadraticProblem, point: BranchPoint, cfg: RunConfig) -> dict:
    p = problem.with_sigma(point.sigma)
    try:
        cert = prove(list(point.x), p, cfg.params, r=cfg.r, timestamp=cfg.timestamp)
        return cert.to_json()
    except (EmptyFeasibleSet, SingularError, DegenerateLU) as exc:
        return {
            "schema": "tricontract.certificate/1",
            "sigma": point.sigma,
            "xbar": list(point.x),
            "proved": False,
            "r": None,
            "error": f"{type(exc).__name__}: {exc}",
        }


def batch_prove(problem: QuadraticProblem, points, cfg: RunConfig) -> list[dict]:
    n = len(points)
    if n == 0:
        return []
    workers = _worker_count(cfg, n)
    if workers == 1:
        return [prove_point(problem, pt, cfg) for pt in points]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda pt: prove_point(problem, pt, cfg), points))


def cmd_prove(cfg: RunConfig) -> int:
    m = cfg.params.m
    x0 = cfg.x0 if cfg.x0 is not None else cfg.problem.initial_guess(m)
    xbar = newton_solve(cfg.problem, x0, m, tol=cfg.tol)
    cert = prove(xbar, cfg.problem, cfg.params, r=cfg.r, timestamp=cfg.timestamp)
    out = cfg.out or "certificate.json"
    atomic_write(out, dump_json(cert.to_json()))
    I = "empty" if cert.I is None else f"[{cert.I[0]:.6e}, {cert.I[1]:.6e}]"
    print(f"sigma = {cert.sigma:.17g}")
    print(f"r = {cert.r:.6e}  I = {I}")
    print(f"worst margin P_{cert.worst_index}(r) <= {max(cert.margins):.6e}")
    print("proved" if cert.proved else "NOT proved")
    return EXIT_OK if cert.proved else EXIT_NOT_PROVED


def _write_branch_outputs(cfg: RunConfig, points, certs) -> None:
    if cfg.branch_out:
        atomic_write(cfg.branch_out, dump_json(branch_to_json(cfg.problem, points, cfg.params.m)))
    if cfg.csv_out:
        atomic_write(cfg.csv_out, branch_csv(points, certs, cfg.params.s))
    if cfg.certs_out and certs is not None:
        atomic_write(cfg.certs_out, dump_json({"certificates": certs}))


def cmd_continue_and_export(cfg: RunConfig) -> int:
    m = cfg.params.m
    base = cfg.problem
    x0 = cfg.x0 if cfg.x0 is not None else base.initial_guess(m)
    xbar = newton_solve(base, x0, m, tol=cfg.tol)
    res = float(np.max(np.abs(f_proj(base, xbar, m))))
    start = BranchPoint(base.sigma, tuple(float(v) for v in xbar), None, res)
    try:
        points = trace_both(base, start, cfg.steps, cfg.ds, ds_max=cfg.ds_max, tol=cfg.tol)
    except StallError as exc:
        _write_branch_outputs(cfg, exc.points, None)
        print(f"continuation stalled: {exc} ({len(exc.points)} points written)", file=sys.stderr)
        return EXIT_STALL
    certs = batch_prove(base, points, cfg) if cfg.prove else None
    _write_branch_outputs(cfg, points, certs)
    print(f"{len(points)} points, sigma in [{min(p.sigma for p in points):.6g}, {max(p.sigma for p in points):.6g}]")
    if certs is not None:
        n_ok = sum(1 for c in certs if c.get("proved"))
        print(f"{n_ok}/{len(certs)} proved")
        return EXIT_OK if n_ok == len(certs) else EXIT_NOT_PROVED
    return EXIT_OK


def cmd_batch(cfg: RunConfig) -> int:
    data = _read_json(cfg.branch_in)
    try:
        prob_json, points = branch_from_json(data)
        problem = problem_from_json(prob_json)
        m = int(data.get("m", len(points[0].x) if points else cfg.params.m))
    except (KeyError, ValueError, TypeError, IndexError) as exc:
        raise InputError(f"malformed branch file {cfg.branch_in}: {exc}") from None
    params = ProofParams(m=m, M=cfg.params.M, L=cfg.params.L, s=cfg.params.s)
    run_cfg = RunConfig(
        "batch", problem, params, r=cfg.r, timestamp=cfg.timestamp, threads=cfg.threads,
        csv_out=cfg.csv_out, certs_out=cfg.out or "certificates.json",
    )
    certs = batch_prove(problem, points, run_cfg)
    _write_branch_outputs(run_cfg, points, certs)
    n_ok = sum(1 for c in certs if c.get("proved"))
    print(f"{n_ok}/{len(certs)} proved")
    return EXIT_OK if n_ok == len(certs) else EXIT_NOT_PROVED


def _add_common(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group()
    src.add_argument("--builtin", choices=["example4"], default=None, help="built-in problem")
    src.add_argument("--problem", metavar="FILE", help="problem definition (JSON)")
    p.add_argument("--sigma", type=float, default=None, help="quadratic coefficient")
    p.add_argument("--m", type=int, default=20, help="number of finite modes")
    p.add_argument("--M", type=int, default=20, help="number of explicitly bounded tail modes")
    p.add_argument("--s", type=float, default=2.0, help="decay rate of the weighted norm")
    p.add_argument("--L", type=int, default=100, help="truncation length for tail sums")
    p.add_argument("--r", type=float, default=None, help="radius to verify (default: chosen from I)")
    p.add_argument("--tol", type=float, default=1e-14, help="Newton tolerance (sup norm)")
    p.add_argument("--x0", metavar="FILE", help="JSON list with the initial guess")
    p.add_argument("--no-timestamp", action="store_true", help="omit timestamps from certificates")
    p.add_argument("--threads", type=int, default=None, help="worker cap for batch proving")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tricontract", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prove", help="prove a single solution")
    _add_common(p)
    p.add_argument("--out", default="certificate.json", help="certificate output path")

    c = sub.add_parser("continue", help="trace the branch in sigma and optionally prove each point")
    _add_common(c)
    c.add_argument("--steps", type=int, default=10, help="steps in each direction")
    c.add_argument("--ds", type=float, default=1e-3, help="arclength step")
    c.add_argument("--ds-max", type=float, default=None, help="largest step after growth")
    c.add_argument("--prove", action="store_true", help="prove every traced point")
    c.add_argument("--branch-out", default="branch.json", help="branch JSON output path")
    c.add_argument("--csv-out", default="branch.csv", help="branch CSV output path")
    c.add_argument("--certs-out", default="certificates.json", help="certificates output path (with --prove)")

    b = sub.add_parser("batch", help="prove every point of an existing branch file")
    b.add_argument("--branch", required=True, metavar="FILE", help="branch JSON written by continue")
    b.add_argument("--M", type=int, default=20, help="number of explicitly bounded tail modes")
    b.add_argument("--s", type=float, default=2.0, help="decay rate of the weighted norm")
    b.add_argument("--L", type=int, default=100, help="truncation length for tail sums")
    b.add_argument("--r", type=float, default=None, help="radius to verify (default: chosen from I)")
    b.add_argument("--out", default="certificates.json", help="certificates output path")
    b.add_argument("--csv-out", default=None, help="optional branch CSV output path")
    b.add_argument("--no-timestamp", action="store_true", help="omit timestamps from certificates")
    b.add_argument("--threads", type=int, default=None, help="worker cap for batch proving")
    return ap


class InputError(OSError):
    """An input file exists but its contents are unusable."""


def _read_json(path: str):
    with open(path) as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: invalid JSON ({exc})") from None


def _load_problem(args) -> QuadraticProblem:
    if getattr(args, "problem", None):
        try:
            prob = problem_from_json(_read_json(args.problem))
        except (KeyError, ValueError, TypeError) as exc:
            raise InputError(f"{args.problem}: {exc}") from None
    else:
        prob = example4()
    if args.sigma is not None:
        prob = prob.with_sigma(args.sigma)
    return prob


def config_from_args(args) -> RunConfig:
    if args.command == "batch":
        return RunConfig(
            command="batch",
            problem=example4(),
            params=ProofParams(M=args.M, s=args.s, L=args.L),
            r=args.r,
            timestamp=not args.no_timestamp,
            threads=args.threads,
            out=args.out,
            csv_out=args.csv_out,
            branch_in=args.branch,
        )
    x0 = None
    if args.x0:
        try:
            x0 = [float(v) for v in _read_json(args.x0)]
        except (TypeError, ValueError) as exc:
            raise InputError(f"{args.x0}: expected a list of numbers ({exc})") from None
    cfg = RunConfig(
        command=args.command,
        problem=_load_problem(args),
        params=ProofParams(m=args.m, M=args.M, L=args.L, s=args.s),
        r=args.r,
        tol=args.tol,
        timestamp=not args.no_timestamp,
        threads=args.threads,
        x0=x0,
    )
    if args.command == "prove":
        cfg.out = args.out
    else:
        cfg.steps = args.steps
        cfg.ds = args.ds
        cfg.ds_max = args.ds_max
        cfg.prove = args.prove
        cfg.branch_out = args.branch_out
        cfg.csv_out = args.csv_out
        cfg.certs_out = args.certs_out
    return cfg


COMMANDS = {"prove": cmd_prove, "continue": cmd_continue_and_export, "batch": cmd_batch}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        return COMMANDS[cfg.command](cfg)
    except Exception as exc:  # mapped onto the documented exit codes
        code = exit_code_for(exc)
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
