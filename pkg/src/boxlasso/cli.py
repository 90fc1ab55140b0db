"""Command-line front end: ``boxlasso <command> ...``.

Machine-readable payloads go to stdout (JSON) or to files (CSV); every
diagnostic goes to stderr.

Exit codes
----------
0  success
2  invalid input, unreadable file, bad flags
3  method inapplicable (closed-form hypotheses fail, singular system)
4  solver did not converge
5  verification failed
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .denoise import (
    Transform,
    add_gaussian_noise,
    denoise_transform,
    denoising_multipliers,
    estimate_tau_gaussian,
    read_signal_csv,
    write_signal_csv,
)
from .errors import ConvergenceError, InapplicableError, InvalidInputError, SingularSystemError
from .generate import KINDS, generate_problem
from .geometry import GridSpec, export_g_grid, write_grid_csv
from .model import Problem, SolveResult, as_multipliers
from .multipliers import (
    DEFAULT_DIAG_TOL,
    auto_multipliers,
    diagonal_multipliers,
    gradient_sign_multipliers,
    gradient_sign_with_signature,
    scalar_problem_multipliers,
)
from .solvers import SolverConfig, solve_box_ls, solve_weighted_lasso, solve_weighted_tikhonov
from .verify import verify_equivalence

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_INAPPLICABLE = 3
EXIT_NO_CONVERGENCE = 4
EXIT_VERIFY_FAIL = 5

PROBLEM_SCHEMA = """\
Problem JSON schema:
  { "m": int, "n": int, "A": [row-major floats, length m*n], "b": [m floats], "tau": [n floats] }
All lengths are checked and every tau entry must be >= 0."""

EXIT_CODES = """\
Exit codes: 0 success, 2 invalid input, 3 method inapplicable,
4 solver non-convergence, 5 verification FAIL."""


class CLIError(Exception):
    def __init__(self, message: str, code: int = EXIT_INVALID):
        super().__init__(message)
        self.code = code


def _emit(payload: dict) -> None:
    sys.stdout.write(json.dumps(payload) + "\n")


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise CLIError(f"cannot read {path}: {exc.strerror}") from None


def _load_problem(path: str) -> Problem:
    return Problem.from_json(_read_text(path))


def _load_lambda(path: str, n: int) -> np.ndarray:
    """Accept a JSON list or any JSON object with a ``lambda`` list."""
    try:
        data = json.loads(_read_text(path))
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"malformed JSON ({exc})", "lambda") from None
    if isinstance(data, dict):
        if "lambda" not in data:
            raise InvalidInputError("object has no 'lambda' field", "lambda")
        data = data["lambda"]
    if not isinstance(data, list):
        raise InvalidInputError("expected a list of numbers", "lambda")
    return as_multipliers(data, n)


def _config(args) -> SolverConfig:
    return SolverConfig(max_iters=args.max_iters, tol=args.tol)


METHODS = {
    "auto": lambda p, tol: auto_multipliers(p, tol),
    "scalar": lambda p, tol: scalar_problem_multipliers(p),
    "diagonal": lambda p, tol: diagonal_multipliers(p, tol),
    "gradient-sign": lambda p, tol: gradient_sign_multipliers(p),
    "signature": lambda p, tol: gradient_sign_with_signature(p),
}


# -- commands --------------------------------------------------------------


def cmd_multipliers(args) -> int:
    p = _load_problem(args.problem)
    _emit(METHODS[args.method](p, args.diag_tol).to_dict())
    return EXIT_OK


def cmd_solve(args) -> int:
    p = _load_problem(args.problem)
    cfg = _config(args)
    if args.formulation != "box" and args.lambda_file is None:
        raise CLIError(f"--formulation {args.formulation} requires --lambda-file")
    if args.formulation == "box":
        res = solve_box_ls(p, cfg)
    else:
        lam = _load_lambda(args.lambda_file, p.n)
        if args.formulation == "lasso":
            res = solve_weighted_lasso(p.a, p.b, lam, cfg)
        else:
            x = solve_weighted_tikhonov(p.a, p.b, lam)
            res = SolveResult(x, p.objective(x) + float(lam @ (x * x)), 0, True, 0.0)
    _emit(res.to_dict())
    if not res.converged:
        print(f"solver stopped after {res.iterations} iterations without converging", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    return EXIT_OK


def _report_table(report, gap_tol: float, kkt_tol: float) -> str:
    rows = [
        ("p*", f"{report.p_star:.12g}"),
        ("H(lambda)", f"{report.dual_value:.12g}"),
        ("gap", f"{report.gap:.3e}  (tol {gap_tol:g})"),
        ("max KKT residual", f"{report.max_kkt_residual:.3e}  (tol {kkt_tol:g})"),
        ("solutions close", str(report.solutions_close)),
    ]
    width = max(len(k) for k, _ in rows)
    return "\n".join(f"{k:<{width}}  {v}" for k, v in rows)


def cmd_verify(args) -> int:
    p = _load_problem(args.problem)
    if args.lambda_file is not None:
        lam = _load_lambda(args.lambda_file, p.n)
    else:
        lam = METHODS[args.method](p, args.diag_tol).lam
    report = verify_equivalence(p, lam, _config(args))
    ok = report.passed(args.gap_tol, args.kkt_tol)
    payload = report.to_dict()
    payload["verdict"] = "PASS" if ok else "FAIL"
    _emit(payload)
    print(_report_table(report, args.gap_tol, args.kkt_tol), file=sys.stderr)
    print("PASS" if ok else "FAIL", file=sys.stderr)
    return EXIT_OK if ok else EXIT_VERIFY_FAIL


def _parse_axes(text: str) -> tuple[int, ...]:
    try:
        axes = tuple(int(t) for t in text.split(","))
    except ValueError:
        raise CLIError(f"bad --axes {text!r}; expected 'j' or 'j,k'") from None
    return axes


def _parse_range(text: str) -> tuple[float, float]:
    parts = text.split(":")
    if len(parts) != 2:
        raise CLIError(f"bad --range {text!r}; expected lo:hi")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError:
        raise CLIError(f"bad --range {text!r}; expected lo:hi") from None


def cmd_gfunc(args) -> int:
    p = _load_problem(args.problem)
    lo, hi = _parse_range(args.range)
    spec = GridSpec(_parse_axes(args.axes), lo, hi, args.step)
    rows = export_g_grid(p, spec, _config(args), args.diag_tol)
    with open(args.out, "w", newline="") as fh:
        write_grid_csv(rows, spec.axes, fh)
    print(f"wrote {len(rows)} rows to {args.out}", file=sys.stderr)
    return EXIT_OK


def cmd_denoise(args) -> int:
    with open(args.signal) if args.signal != "-" else sys.stdin as fh:
        sig = read_signal_csv(fh)
    t = Transform(args.transform, len(sig))
    if args.tau_file is not None:
        with open(args.tau_file) as fh:
            tau = read_signal_csv(fh).samples
        source, sigma = "tau-file", None
    else:
        tau = estimate_tau_gaussian(sig, args.tau_gaussian, t, args.headroom)
        source, sigma = "gaussian", args.tau_gaussian
    out = denoise_transform(sig, tau, t)
    lam = denoising_multipliers(t.analyze(sig), tau)
    with open(args.out, "w") as fh:
        write_signal_csv(out, fh)
    sidecar = Path(args.sidecar) if args.sidecar else Path(args.out).with_suffix(".json")
    sidecar.write_text(
        json.dumps(
            {
                "method": source,
                "transform": t.kind.value,
                "sigma": sigma,
                "lambda": lam.tolist(),
                "tau": np.asarray(tau).tolist(),
            }
        )
        + "\n"
    )
    print(f"wrote {args.out} and {sidecar}", file=sys.stderr)
    return EXIT_OK


def cmd_noise(args) -> int:
    with open(args.signal) as fh:
        sig = read_signal_csv(fh)
    noisy = add_gaussian_noise(sig, args.sigma, args.seed)
    with open(args.out, "w") as fh:
        write_signal_csv(noisy, fh)
    return EXIT_OK


def cmd_gen(args) -> int:
    p = generate_problem(args.kind, args.n, args.m, args.seed)
    Path(args.out).write_text(p.to_json() + "\n")
    print(f"wrote {args.kind} problem (m={p.m}, n={p.n}) to {args.out}", file=sys.stderr)
    return EXIT_OK


# -- parser ----------------------------------------------------------------


def _add_solver_flags(sp) -> None:
    sp.add_argument("--tol", type=float, default=1e-10, help="stopping tolerance (default 1e-10)")
    sp.add_argument("--max-iters", type=int, default=100_000, help="iteration cap (default 100000)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="boxlasso",
        description="Closed-form Lagrange multipliers turning box-constrained least squares "
        "into weighted LASSO problems.",
        epilog=PROBLEM_SCHEMA + "\n\n" + EXIT_CODES,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        sp = sub.add_parser(
            name, help=help_text, description=help_text, epilog=PROBLEM_SCHEMA,
            formatter_class=argparse.RawDescriptionHelpFormatter,
        )
        sp.set_defaults(func=func)
        return sp

    sp = add("multipliers", cmd_multipliers, "Compute closed-form multipliers; prints JSON.")
    sp.add_argument("problem", help="problem JSON file ('-' for stdin)")
    sp.add_argument("--method", choices=sorted(METHODS), default="auto")
    sp.add_argument("--diag-tol", type=float, default=DEFAULT_DIAG_TOL)

    sp = add("solve", cmd_solve, "Solve the box, weighted LASSO or weighted Tikhonov problem.")
    sp.add_argument("problem")
    sp.add_argument("--formulation", choices=["box", "lasso", "tikhonov"], default="box")
    sp.add_argument("--lambda-file", help="JSON list, or object with a 'lambda' list")
    _add_solver_flags(sp)

    sp = add("verify", cmd_verify, "Certify multipliers via duality gap and KKT residuals.")
    sp.add_argument("problem")
    sp.add_argument("--method", choices=sorted(METHODS), default="auto")
    sp.add_argument("--diag-tol", type=float, default=DEFAULT_DIAG_TOL)
    sp.add_argument("--lambda-file", help="verify these multipliers instead of computing them")
    sp.add_argument("--gap-tol", type=float, default=1e-6)
    sp.add_argument("--kkt-tol", type=float, default=1e-6)
    _add_solver_flags(sp)

    sp = add("gfunc", cmd_gfunc, "Tabulate the value function g(u) on a grid as CSV.")
    sp.add_argument("problem")
    sp.add_argument("--axes", required=True, help="'j' or 'j,k' (0-based coordinates of u)")
    sp.add_argument("--range", required=True, help="lo:hi, e.g. --range=-1:2")
    sp.add_argument("--step", type=float, required=True)
    sp.add_argument("--out", required=True, help="CSV output path")
    sp.add_argument("--diag-tol", type=float, default=DEFAULT_DIAG_TOL)
    _add_solver_flags(sp)

    sp = add("denoise", cmd_denoise, "Denoise a signal by clamping its transform coefficients.")
    sp.add_argument("signal", help="CSV, one float per line, optional '# label' first line")
    sp.add_argument("--transform", choices=["identity", "dct", "dft"], default="identity")
    src = sp.add_mutually_exclusive_group(required=True)
    src.add_argument("--tau-file", help="coefficient bounds, one float per line")
    src.add_argument("--tau-gaussian", type=float, metavar="SIGMA", help="estimate bounds by Gaussian smoothing")
    sp.add_argument("--headroom", type=float, default=1.0, help="multiplier on estimated bounds")
    sp.add_argument("--out", required=True)
    sp.add_argument("--sidecar", help="JSON sidecar path (default: --out with .json suffix)")

    sp = add("noise", cmd_noise, "Add seeded Gaussian noise to a signal.")
    sp.add_argument("signal")
    sp.add_argument("--sigma", type=float, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", required=True)

    sp = add("gen", cmd_gen, "Generate a problem satisfying a method's hypotheses.")
    sp.add_argument("--kind", choices=KINDS, required=True)
    sp.add_argument("--n", type=int, default=1)
    sp.add_argument("--m", type=int, default=None, help="rows (default: n)")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", required=True)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CLIError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except InvalidInputError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (InapplicableError, SingularSystemError) as exc:
        print(f"inapplicable: {exc}", file=sys.stderr)
        return EXIT_INAPPLICABLE
    except ConvergenceError as exc:
        print(f"no convergence: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
