"""Command-line surface: solve, analyze, sweep, envelope, and built-in demos.

Batch diagnostics only.  Angles are taken in degrees on the command line
and converted to radians internally.  Exit codes: 0 success/converged,
1 usage or input error, 2 iteration budget exhausted, 3 divergence
detected -- never any other value.  Messages go to stderr; data goes to
files or stdout.
"""

import argparse
import math
import sys

import numpy as np

from . import io as cio
from .iteration import (
    DEFAULT_MAX_ITER, DEFAULT_RESIDUAL_TOL, LinearSystem, Termination,
    cimmino_step, solve,
)
from .geometry import internormal_angle
from .linalg import JacobiConvergenceError
from .spectral import analyze, error_envelope, rho_two_weights

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_MAX_ITERATIONS = 2
EXIT_DIVERGED = 3

_TERMINATION_EXIT = {
    Termination.CONVERGED: EXIT_OK,
    Termination.MAX_ITERATIONS: EXIT_MAX_ITERATIONS,
    Termination.DIVERGED: EXIT_DIVERGED,
}

# Built-in demo systems (embedded so the demos run with zero setup).
_DEMO_EXAMPLE1 = (((2.0, 1.0), (1.0, 2.0)), (3.0, 3.0))
_DEMO_EXAMPLE2 = (((1.0, 1.0), (1.0, -1.0)), (2.0, 0.0))
# Unit normals at 120 degrees, both planes through the origin.
_DEMO_FIGURE1 = (((1.0, 0.0), (-0.5, math.sqrt(3.0) / 2.0)), (0.0, 0.0))


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors by default; 2 is reserved for the
    # iteration budget here, so remap usage errors to 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _parse_floats(text: str, label: str) -> np.ndarray:
    try:
        values = [float(tok) for tok in text.split(",") if tok != ""]
    except ValueError:
        raise ValueError(f"{label}: expected comma-separated reals, got {text!r}") from None
    if not values:
        raise ValueError(f"{label}: empty list")
    return np.array(values)


def _parse_weight_pairs(text: str) -> list[tuple[float, float]]:
    pairs = []
    for chunk in text.split(";"):
        values = _parse_floats(chunk, "--weights")
        if values.size != 2:
            raise ValueError(f"--weights: each pair needs exactly 2 values, got {chunk!r}")
        pairs.append((float(values[0]), float(values[1])))
    return pairs


def _parse_theta_grid(text: str) -> np.ndarray:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"--theta-grid: expected start:stop:step degrees, got {text!r}")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError:
        raise ValueError(f"--theta-grid: non-numeric bound in {text!r}") from None
    if step <= 0.0 or stop < start:
        raise ValueError(f"--theta-grid: need step > 0 and stop >= start, got {text!r}")
    count = int(math.floor((stop - start) / step + 1e-9))
    return start + step * np.arange(count + 1)


def _print_vector(label: str, values) -> None:
    print(f"{label}: " + " ".join(cio.format_float(v) for v in values))


def _cmd_solve(args) -> int:
    system = cio.load_system(args.matrix, args.rhs)
    weights = None if args.weights is None else _parse_floats(args.weights, "--weights")
    x0 = None if args.x0 is None else _parse_floats(args.x0, "--x0")
    solution = None if args.solution is None else _parse_floats(args.solution, "--solution")
    trace = solve(
        system,
        weights=weights,
        x0=x0,
        residual_tol=args.tol,
        max_iter=args.max_iter,
        known_solution=solution,
    )
    print(f"termination: {trace.terminated.value}")
    print(f"iterations: {trace.iterations}")
    print(f"final_residual: {cio.format_float(trace.residual_norms[-1])}")
    _print_vector("x", trace.final)
    if args.trace_out is not None:
        cio.write_trace_csv(trace, args.trace_out)
        print(f"trace written to {args.trace_out}", file=sys.stderr)
    return _TERMINATION_EXIT[trace.terminated]


def _cmd_analyze(args) -> int:
    matrix = cio.read_matrix_market(args.matrix)
    system = LinearSystem(matrix, np.zeros(matrix.shape[0]))
    weights = None if args.weights is None else _parse_floats(args.weights, "--weights")
    report = analyze(system, weights)
    print(f"n: {report.n}")
    _print_vector("weights", report.weights)
    if report.theta is not None:
        print(f"theta_deg: {cio.format_float(math.degrees(report.theta))}")
    _print_vector("eigenvalues", report.eigenvalues)
    print(f"spectral_radius: {cio.format_float(report.spectral_radius)}")
    print(f"condition_number: {cio.format_float(report.condition_number)}")
    print(f"class: {report.convergence_class.value}")
    print(f"optimal_alpha: {cio.format_float(report.optimal_alpha)}")
    print(f"optimal_scaled_rate: {cio.format_float(report.optimal_scaled_rate)}")
    print(f"tight_frame: {'true' if report.tight_frame else 'false'}")
    if args.json_out is not None:
        cio.write_report_json(report, args.json_out)
        print(f"report written to {args.json_out}", file=sys.stderr)
    return EXIT_OK


def _cmd_sweep(args) -> int:
    thetas_deg = _parse_theta_grid(args.theta_grid)
    pairs = _parse_weight_pairs(args.weights)
    thetas_rad = np.radians(thetas_deg)
    bad = (thetas_rad <= 0.0) | (thetas_rad >= math.pi)
    if np.any(bad):
        raise ValueError("--theta-grid: angles must lie strictly inside (0, 180) degrees")
    columns = [np.abs(np.cos(thetas_rad))]
    names = ["unit"]
    for w1, w2 in pairs:
        columns.append(rho_two_weights(w1, w2, thetas_rad))
        names.append(f"rho_{cio.format_float(w1)}_{cio.format_float(w2)}")
    lines = ["theta_deg," + ",".join(names)]
    for k in range(thetas_deg.size):
        cells = [cio.format_float(thetas_deg[k])]
        cells += [cio.format_float(col[k]) for col in columns]
        lines.append(",".join(cells))
    with open(args.out, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    print(f"sweep: {thetas_deg.size} angles x {len(pairs)} weight pairs -> {args.out}")
    return EXIT_OK


def _cmd_envelope(args) -> int:
    rates = [float(r) for r in _parse_floats(args.rho, "--rho")]
    if any(r < 0.0 for r in rates):
        raise ValueError("--rho: rates must be nonnegative")
    if args.e0 < 0.0:
        raise ValueError("--e0: initial error must be nonnegative")
    if args.steps < 0:
        raise ValueError("--steps: must be nonnegative")
    columns = [error_envelope(r, args.e0, args.steps) for r in rates]
    names = [f"rho_{cio.format_float(r)}" for r in rates]
    lines = ["nu," + ",".join(names)]
    for nu in range(args.steps + 1):
        lines.append(",".join([str(nu)] + [cio.format_float(col[nu]) for col in columns]))
    with open(args.out, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    print(f"envelope: {len(rates)} rate(s) over {args.steps} steps -> {args.out}")
    if len(rates) >= 2 and args.e0 > 0.0:
        slow, fast = max(rates), min(rates)
        if fast > 0.0:
            gap = (slow / fast) ** args.steps
            print(
                f"final-step gap between rho={cio.format_float(slow)} and "
                f"rho={cio.format_float(fast)}: ({cio.format_float(slow)}/"
                f"{cio.format_float(fast)})^{args.steps} = {cio.format_float(gap)}"
            )
            if args.steps == 12 and {slow, fast} == {0.9, 0.5}:
                # This twelve-step 0.9-vs-0.5 gap is sometimes quoted as a
                # factor of about 180; direct evaluation gives ~1156.8, so
                # the smaller figure is wrong.
                print(
                    "note: this gap is occasionally misquoted as ~180; "
                    "direct evaluation of (0.9/0.5)^12 gives "
                    f"{cio.format_float(gap)}"
                )
    return EXIT_OK


class _DemoChecker:
    def __init__(self):
        self.failures = 0

    def check(self, name: str, computed: float, expected: float, tol: float) -> None:
        diff = abs(computed - expected)
        ok = diff <= tol
        if not ok:
            self.failures += 1
        print(
            f"  {name}: expected {cio.format_float(expected)} "
            f"computed {cio.format_float(computed)} |diff| {diff:.3e} "
            f"tol {tol:.0e} -> {'PASS' if ok else 'FAIL'}"
        )


def _demo_example1(checker: _DemoChecker) -> None:
    (rows, rhs) = _DEMO_EXAMPLE1
    system = LinearSystem(np.array(rows), np.array(rhs))
    print("demo example1: 2x2 system with cos(theta) = 4/5")
    theta = internormal_angle(system.matrix[0], system.matrix[1])
    checker.check("cos(theta)", math.cos(theta), 0.8, 1e-15)
    report = analyze(system)
    checker.check("eigenvalue_low", report.eigenvalues[0], 0.2, 1e-12)
    checker.check("eigenvalue_high", report.eigenvalues[1], 1.8, 1e-12)
    checker.check("spectral_radius", report.spectral_radius, 0.8, 1e-12)
    trace = solve(system, max_iter=200)
    checker.check("solve_error", float(np.max(np.abs(trace.final - 1.0))), 0.0, 1e-8)


def _demo_example2(checker: _DemoChecker) -> None:
    (rows, rhs) = _DEMO_EXAMPLE2
    system = LinearSystem(np.array(rows), np.array(rhs))
    print("demo example2: orthogonal rows, single-step convergence")
    x1 = cimmino_step(system, np.array([3.0, -1.0]), np.ones(2))
    checker.check("x1[0]", x1[0], 1.0, 1e-14)
    checker.check("x1[1]", x1[1], 1.0, 1e-14)
    report = analyze(system)
    checker.check("spectral_radius", report.spectral_radius, 0.0, 1e-15)
    checker.check("tight_frame", 1.0 if report.tight_frame else 0.0, 1.0, 0.0)


def _demo_figure1(checker: _DemoChecker) -> None:
    (rows, rhs) = _DEMO_FIGURE1
    system = LinearSystem(np.array(rows), np.array(rhs))
    print("demo figure1: unit normals at 120 degrees, error halves each step")
    theta = internormal_angle(system.matrix[0], system.matrix[1])
    checker.check("theta_deg", math.degrees(theta), 120.0, 1e-12)
    trace = solve(
        system, x0=np.array([2.0, 0.0]), residual_tol=1e-300, max_iter=2,
        known_solution=np.zeros(2),
    )
    for nu, expected in enumerate((2.0, 1.0, 0.5)):
        checker.check(f"error_norm[{nu}]", float(trace.error_norms[nu]), expected, 1e-12)


_DEMOS = {
    "example1": _demo_example1,
    "example2": _demo_example2,
    "figure1": _demo_figure1,
}


def _cmd_demo(args) -> int:
    checker = _DemoChecker()
    _DEMOS[args.name](checker)
    if checker.failures:
        print(f"demo {args.name}: {checker.failures} check(s) FAILED")
        return EXIT_ERROR
    print(f"demo {args.name}: all checks passed")
    return EXIT_OK


def _build_parser() -> _Parser:
    parser = _Parser(prog="cimmino", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="run the reflection iteration on a system from disk")
    p_solve.add_argument("--matrix", required=True, help="Matrix Market file with the n x n matrix")
    p_solve.add_argument("--rhs", required=True, help="Matrix Market n x 1 array file with b")
    p_solve.add_argument("--weights", help="comma-separated positive weights (default: all ones)")
    p_solve.add_argument("--x0", help="comma-separated starting point (default: zeros)")
    p_solve.add_argument("--tol", type=float, default=DEFAULT_RESIDUAL_TOL,
                         help="relative residual tolerance (default: 1e-10)")
    p_solve.add_argument("--max-iter", type=int, default=DEFAULT_MAX_ITER,
                         help="iteration budget (default: 10000)")
    p_solve.add_argument("--solution", help="known solution; enables error/ratio columns")
    p_solve.add_argument("--trace-out", help="write the iteration trace CSV here")
    p_solve.set_defaults(handler=_cmd_solve)

    p_an = sub.add_parser("analyze", help="spectral report for a system matrix")
    p_an.add_argument("--matrix", required=True)
    p_an.add_argument("--weights", help="comma-separated positive weights (default: all ones)")
    p_an.add_argument("--json-out", help="write the report as JSON here")
    p_an.set_defaults(handler=_cmd_analyze)

    p_sw = sub.add_parser("sweep", help="contraction factor vs angle for 2x2 weight pairs")
    p_sw.add_argument("--theta-grid", required=True, metavar="START:STOP:STEP",
                      help="angle grid in degrees, e.g. 10:170:1")
    p_sw.add_argument("--weights", required=True,
                      help="semicolon-separated pairs, e.g. '1,1;1.4,1.4'")
    p_sw.add_argument("--out", required=True, help="output CSV path")
    p_sw.set_defaults(handler=_cmd_sweep)

    p_env = sub.add_parser("envelope", help="worst-case error envelopes e0 * rho^nu")
    p_env.add_argument("--rho", required=True, help="comma-separated contraction rates")
    p_env.add_argument("--e0", type=float, default=1.0, help="initial error norm (default: 1)")
    p_env.add_argument("--steps", type=int, required=True, help="number of steps")
    p_env.add_argument("--out", required=True, help="output CSV path")
    p_env.set_defaults(handler=_cmd_envelope)

    p_demo = sub.add_parser("demo", help="run a built-in configuration end to end")
    p_demo.add_argument("name", choices=sorted(_DEMOS), help="which demo to run")
    p_demo.set_defaults(handler=_cmd_demo)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (ValueError, OSError, JacobiConvergenceError) as exc:
        # Covers dimension errors, Matrix Market errors, singular matrices,
        # unreadable/unwritable paths.
        print(f"cimmino: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
