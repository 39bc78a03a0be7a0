"""Command-line front end: problem I/O, solver orchestration, sweeps.

Problem files are JSON: {"m", "n", "N", "blocks"} with n+1 blocks of m*m
scalars row-major (Sigma_0 first).  Solution files carry the first block row
of the completion plus diagnostics.  Floats are serialized with Python's
shortest round-trip representation, which reparses bit-exactly.

Exit codes: 0 converged/answered, 1 I/O or parse error, 2 detected
infeasibility, 3 iteration budget exhausted.  Diagnostics never change exit
codes.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time

import numpy as np

from .blockcirc import BandData, BlockCirculant, circ_inverse, circulant_average
from .errors import BadInput, CircMaxentError, NoConvergence, NotPositiveDefinite, RequiresFullR
from .feasibility import eig_affine_forms, scalar_bw1_feasible
from .generate import random_feasible_band
from .ips import ips_solve, sk1_solve
from .solver import SolverConfig, solve, verify_solution
from .toeplitz import circulant_approx

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INFEASIBLE = 2
EXIT_MAXITER = 3


def _load_problem(path):
    with open(path) as fh:
        raw = json.load(fh)
    try:
        m, n, N = int(raw["m"]), int(raw["n"]), int(raw["N"])
        blocks = raw["blocks"]
    except (KeyError, TypeError, ValueError) as exc:
        raise BadInput(f"problem file {path}: missing or malformed field ({exc})") from exc
    if m < 1 or n < 0 or N < 2:
        raise BadInput(f"problem file {path}: m={m}, n={n}, N={N} out of range")
    if N < 2 * n + 2:
        raise BadInput(f"problem file {path}: N={N} < 2n+2={2 * n + 2}")
    if len(blocks) != n + 1:
        raise BadInput(f"problem file {path}: expected {n + 1} blocks, got {len(blocks)}")
    arr = np.zeros((n + 1, m, m))
    for k, blk in enumerate(blocks):
        flat = np.asarray(blk, dtype=float).reshape(-1)
        if flat.size != m * m:
            raise BadInput(f"problem file {path}: block {k} has {flat.size} scalars, expected {m * m}")
        arr[k] = flat.reshape(m, m)
    return BandData(m, n, arr), N


def _solution_payload(sigma: BlockCirculant, diagnostics: dict) -> dict:
    return {
        "m": sigma.m,
        "N": sigma.N,
        "first_block_row": [blk.reshape(-1).tolist() for blk in sigma.first_row],
        "diagnostics": diagnostics,
    }


def _emit(payload: dict, out: str) -> None:
    text = json.dumps(payload, indent=2)
    if out == "-":
        print(text)
    else:
        with open(out, "w") as fh:
            fh.write(text + "\n")


def _solver_config(args) -> SolverConfig:
    return SolverConfig(
        alpha=args.alpha,
        beta=args.beta,
        eta=args.tol,
        max_iter=args.max_iter,
    )


def cmd_solve(args) -> int:
    band, N = _load_problem(args.input)
    if band.m == 1 and band.n == 1:
        verdict = scalar_bw1_feasible(band.blocks[0, 0, 0], band.blocks[1, 0, 0], N)
        if not verdict.feasible:
            print(
                f"infeasible: sigma_1={float(band.blocks[1, 0, 0])!r} outside "
                f"({verdict.lower!r}, {verdict.upper!r}) for N={N}",
                file=sys.stderr,
            )
            return EXIT_INFEASIBLE

    if args.method == "gd":
        cfg = _solver_config(args)
        trace_fh = open(args.trace, "w") if args.trace else None
        try:
            if trace_fh is not None:
                cfg.trace = trace_fh
            result = solve(band, N, cfg, init=args.init)
        finally:
            if trace_fh is not None:
                trace_fh.close()
        report = verify_solution(result, band)
        diagnostics = {
            "iterations": result.iterations,
            "grad_norm": result.final_grad_norm,
            "jbar": result.objective_trace[-1],
            "band_residual": report.band_residual,
            "dempster_residual": report.dempster_residual,
            "entropy": report.entropy,
            "status": result.status,
            "init": result.init_mode,
        }
        _emit(_solution_payload(result.sigma, diagnostics), args.output)
        if result.status == "diverged":
            return EXIT_INFEASIBLE
        if result.status == "max_iter":
            return EXIT_MAXITER
        return EXIT_OK

    # baseline methods produce the same solution file via circulant averaging
    runner = ips_solve if args.method == "ips" else sk1_solve
    try:
        scaled = runner(band, N, tol=args.tol or 1e-9, max_cycles=args.max_cycles)
    except NoConvergence as exc:
        print(f"no convergence: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except RequiresFullR as exc:
        print(f"no starting completion: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    sigma = circulant_average(scaled.sigma, band.m)
    report = verify_solution(sigma, band)
    diagnostics = {
        "iterations": scaled.cycles,
        "grad_norm": None,
        "jbar": None,
        "band_residual": report.band_residual,
        "dempster_residual": report.dempster_residual,
        "entropy": report.entropy,
        "status": "converged",
        "init": args.method,
    }
    _emit(_solution_payload(sigma, diagnostics), args.output)
    return EXIT_OK


def cmd_extend(args) -> int:
    band, n_file = _load_problem(args.input)
    N = args.N or n_file
    approx = circulant_approx(band, N)
    try:
        inv = circ_inverse(approx)
        pd = True
        off = inv.first_row[band.n + 1: N - band.n]
        ref = float(np.linalg.norm(inv.first_row[0]))
        offband = float(max(np.linalg.norm(blk) for blk in off) / ref) if len(off) else 0.0
    except NotPositiveDefinite:
        pd = False
        offband = None
    diagnostics = {"pd": pd, "inverse_offband_norm": offband}
    _emit(_solution_payload(approx, diagnostics), args.output)
    return EXIT_OK


def cmd_feas(args) -> int:
    band, N = _load_problem(args.input)
    payload = {"N": N, "m": band.m, "n": band.n}
    if band.m == 1 and band.n == 1:
        verdict = scalar_bw1_feasible(band.blocks[0, 0, 0], band.blocks[1, 0, 0], N)
        payload.update(
            feasible=verdict.feasible,
            margin=verdict.margin,
            bounds=[verdict.lower, verdict.upper],
        )
    else:
        payload.update(feasible=None, margin=None, bounds=None)
        cfg = SolverConfig(max_iter=args.budget)
        result = solve(band, N, cfg)
        payload["evidence"] = {
            "status": result.status,
            "iterations": result.iterations,
            "grad_norm": result.final_grad_norm,
        }
        if result.converged:
            payload["feasible"] = True
        elif result.status == "diverged":
            payload["feasible"] = False
    if band.m == 1:
        payload["forms"] = [
            {
                "k": f.k,
                "constant": f.constant,
                "distances": f.distances.tolist(),
                "coeffs": f.coeffs.tolist(),
            }
            for f in eig_affine_forms(band, N)
        ]
    _emit(payload, args.output)
    return EXIT_OK


def _run_method(band, N, method, init, tol, max_iter, max_cycles):
    t0 = time.perf_counter()
    if method == "gd":
        cfg = SolverConfig(eta=tol, max_iter=max_iter)
        result = solve(band, N, cfg, init=init)
        elapsed = time.perf_counter() - t0
        report = verify_solution(result, band)
        dense = result.sigma.to_dense()
        return {
            "method": "gd",
            "init": init,
            "iterations": result.iterations,
            "seconds": elapsed,
            "band_residual": report.band_residual,
            "dempster_residual": report.dempster_residual,
            "dense": dense,
        }
    runner = ips_solve if method == "ips" else sk1_solve
    scaled = runner(band, N, tol=tol or 1e-9, max_cycles=max_cycles)
    elapsed = time.perf_counter() - t0
    report = verify_solution(scaled.sigma, band)
    return {
        "method": method,
        "init": "",
        "iterations": scaled.cycles,
        "seconds": elapsed,
        "band_residual": report.band_residual,
        "dempster_residual": report.dempster_residual,
        "dense": scaled.sigma,
    }


def cmd_compare(args) -> int:
    band, N = _load_problem(args.input)
    rows = [
        _run_method(band, N, "gd", "toeplitz", args.tol, args.max_iter, args.max_cycles),
        _run_method(band, N, "gd", "identity", args.tol, args.max_iter, args.max_cycles),
        _run_method(band, N, "ips", "", args.tol, args.max_iter, args.max_cycles),
    ]
    ref = rows[0]["dense"]
    ref_norm = np.linalg.norm(ref)
    writer = csv.writer(sys.stdout)
    writer.writerow(
        ["method", "init", "iterations", "seconds", "band_residual",
         "dempster_residual", "rel_dist_to_gd_toeplitz"]
    )
    for row in rows:
        dist = float(np.linalg.norm(row["dense"] - ref) / ref_norm)
        writer.writerow(
            [row["method"], row["init"], row["iterations"], f"{row['seconds']:.6f}",
             repr(row["band_residual"]), repr(row["dempster_residual"]), repr(dist)]
        )
    return EXIT_OK


def cmd_bench(args) -> int:
    rng = np.random.default_rng(args.seed)
    band = random_feasible_band(args.m, args.n, max(args.N), rng)
    writer = csv.writer(sys.stdout)
    writer.writerow(
        ["N", "m", "n", "method", "init", "iterations", "seconds",
         "band_residual", "dempster_residual"]
    )
    methods = args.method
    for N in args.N:
        for method in methods:
            inits = ["toeplitz", "identity"] if method == "gd" else [""]
            if method == "gd" and args.init != "both":
                inits = [args.init]
            for init in inits:
                row = _run_method(band, N, method, init, args.tol, args.max_iter, args.max_cycles)
                writer.writerow(
                    [N, args.m, args.n, row["method"], row["init"], row["iterations"],
                     f"{row['seconds']:.6f}", repr(row["band_residual"]),
                     repr(row["dempster_residual"])]
                )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="circmaxent",
        description="Maximum-entropy completion of banded block-circulant covariances",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("input", help="problem file (JSON)")
        p.add_argument("-o", "--output", default="-", help="output path, '-' for stdout")

    p = sub.add_parser("solve", help="compute the maximum-entropy completion")
    add_common(p)
    p.add_argument("--init", choices=["toeplitz", "identity"], default="toeplitz")
    p.add_argument("--method", choices=["gd", "ips", "sk1"], default="gd")
    p.add_argument("--alpha", type=float, default=0.3)
    p.add_argument("--beta", type=float, default=0.5)
    p.add_argument("--tol", type=float, default=None, help="gradient-norm stopping threshold")
    p.add_argument("--max-iter", type=int, default=1_000_000)
    p.add_argument("--max-cycles", type=int, default=2000)
    p.add_argument("--trace", default=None, help="per-iteration CSV trace file")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("extend", help="circulant approximant from the band extension")
    add_common(p)
    p.add_argument("--N", type=int, default=None, help="completion size (defaults to the file's N)")
    p.set_defaults(func=cmd_extend)

    p = sub.add_parser("feas", help="feasibility analysis")
    add_common(p)
    p.add_argument("--budget", type=int, default=2000, help="solver iterations for the generic case")
    p.set_defaults(func=cmd_feas)

    p = sub.add_parser("compare", help="run GD (both inits) and IPS on one problem")
    p.add_argument("input", help="problem file (JSON)")
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--max-iter", type=int, default=1_000_000)
    p.add_argument("--max-cycles", type=int, default=2000)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("ips", help="iterative proportional scaling baseline")
    add_common(p)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--max-cycles", type=int, default=2000)
    p.set_defaults(func=lambda a: cmd_solve(_as_ips(a)))

    p = sub.add_parser("bench", help="random-instance sweep, CSV to stdout")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--N", type=int, nargs="+", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--method", nargs="+", choices=["gd", "ips", "sk1"], default=["gd"])
    p.add_argument("--init", choices=["toeplitz", "identity", "both"], default="both")
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--max-iter", type=int, default=1_000_000)
    p.add_argument("--max-cycles", type=int, default=2000)
    p.set_defaults(func=cmd_bench)

    return parser


def _as_ips(args):
    args.method = "ips"
    args.alpha, args.beta, args.max_iter = 0.3, 0.5, 1_000_000
    args.init, args.trace = "toeplitz", None
    return args


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OSError, json.JSONDecodeError, BadInput) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except CircMaxentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
