"""
Command-line entry point.

    python -m src kernel --alpha 0.5 --d 1 --t 1 --xs 0,1,2
    python -m src validate-asymptotics --alphas 0.9,0.95,0.99 --d 1
    python -m src tau --alphas 0.999,0.9999 --d 1
    python -m src solve  --config recipes/front_alpha1.cfg --output out/solve
    python -m src front  --config recipes/front_alpha1.cfg --output out/front
    python -m src sweep  --config recipes/transition_sweep.cfg --output out/sweep

Each command writes its files plus manifest.json into --output. Exit codes:
0 ok, 1 usage, 2 domain, 3 quadrature, 4 validation failure, 5 truncated run.
"""
import argparse
import math
import sys
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from config.recipes import Recipe, load_recipe
from config.settings import settings
from src.core.exceptions import LabError, UsageError
from src.core.logger import LabLogger
from src.core.utilities import performance_timer
from src.dynamics.front import FrontRecorder, fit_regimes
from src.dynamics.solver import run
from src.dynamics.sweep import SweepScenario, transition_sweep
from src.formats import writers
from src.fractional.asymptotics import critical_radius, residual_scaling_report
from src.fractional.kernel import (
    cross_validate_kernel,
    tabulate_kernel_quadrature,
    tabulate_kernel_spectral_at,
    KernelTable,
)
from src.fractional.params import FracParams
from utilities.run_reporter import RunReporter

logger = LabLogger.get_logger(__name__)

DEFAULT_SPECTRAL_N = {1: 2 ** 16, 2: 2 ** 11, 3: 2 ** 8}


class LabArgumentParser(argparse.ArgumentParser):
    """argparse reports usage problems as UsageError (exit 1) instead of exiting with 2"""

    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


def _float_list(raw: str) -> List[float]:
    try:
        return [float(v) for v in raw.split(",") if v.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got '{raw}'") from e


def _require_alphas(alphas: Optional[Sequence[float]]) -> List[float]:
    if not alphas:
        raise UsageError("At least one alpha is required")
    return list(alphas)


def _radii(args: argparse.Namespace) -> np.ndarray:
    if args.xs is not None:
        values = args.xs
    elif args.grid is not None:
        if len(args.grid) != 3 or not float(args.grid[2]).is_integer() or args.grid[2] < 2:
            raise UsageError("--grid expects start,stop,count with count >= 2")
        values = np.linspace(args.grid[0], args.grid[1], int(args.grid[2]))
    else:
        raise UsageError("Give --xs or --grid")
    radii = np.unique(np.abs(np.asarray(values, dtype=float)))
    if radii.size == 0:
        raise UsageError("No evaluation points given")
    return radii


def _tau_pair(alpha: float, d: int = 1) -> Dict[str, Optional[float]]:
    if alpha >= 1.0:
        return {"tau_alpha": None, "tau_log": None}
    return {"tau_alpha": critical_radius(FracParams(alpha, d)).tau_alpha, "tau_log": -math.log1p(-alpha)}


def cmd_kernel(args: argparse.Namespace, reporter: RunReporter) -> int:
    params = FracParams(args.alpha, args.d)
    radii = _radii(args)
    L = args.L if args.L is not None else max(10.0, 4.0 * float(radii[-1]))
    N = args.N if args.N is not None else DEFAULT_SPECTRAL_N.get(args.d, 2 ** 6)
    reporter.config.update({"L": L, "N": N, "xs": radii.tolist()})

    tables: List[KernelTable] = []
    with performance_timer.measure(f"kernel.{args.method}"):
        if args.method == "quadrature":
            tables.append(tabulate_kernel_quadrature(params, args.t, radii))
        elif args.method == "spectral":
            tables.append(tabulate_kernel_spectral_at(params, args.t, L, N, radii))
        else:
            check = cross_validate_kernel(params, args.t, L, N, radii)
            tables.append(KernelTable(params, args.t, radii, check.quadrature, "quadrature"))
            tables.append(tabulate_kernel_spectral_at(params, args.t, L, N, radii))
            reporter.add_result("max_discrepancy", check.max_discrepancy)

    reporter.add_result("clamped", sum(t.clamped for t in tables))
    reporter.add_file(writers.write_kernel_csv(reporter.path("kernel.csv"), tables))
    return 0


def cmd_validate_asymptotics(args: argparse.Namespace, reporter: RunReporter) -> int:
    alphas = _require_alphas(args.alphas)
    if len(args.x_range) != 2:
        raise UsageError("--x-range expects lo,hi")
    report = residual_scaling_report(FracParams(alphas[0], args.d), alphas, args.x_range, args.samples)
    reporter.add_file(writers.write_decomposition_csv(
        reporter.path("decomposition.csv"),
        (dec for entry in report.entries for dec in entry.decompositions)))
    reporter.add_file(writers.write_checked_json(reporter.path("scaling_report.json"), "scaling_report",
                                                 report.to_dict()))
    reporter.add_result("ratio", report.ratio)
    reporter.add_result("passed", report.passed)
    if not report.passed:
        logger.error(f"Residual boundedness check failed: ratio={report.ratio} "
                     f"(limit {report.ratio_limit})", ratio=report.ratio)
        return 4
    return 0


def cmd_tau(args: argparse.Namespace, reporter: RunReporter) -> int:
    alphas = _require_alphas(args.alphas)
    scales = [critical_radius(FracParams(a, args.d)).to_dict() for a in alphas]
    deviations = [abs(s["ratio"] - 1.0) for s in scales]
    monotone = all(b < a for a, b in zip(deviations, deviations[1:]))
    band = list(settings.tau_band)
    in_band = all(band[0] <= s["ratio"] <= band[1] for s in scales)
    reporter.add_file(writers.write_tau_csv(reporter.path("tau.csv"), scales))
    reporter.add_file(writers.write_checked_json(reporter.path("tau.json"), "transition_table", {
        "scales": scales, "monotone": monotone, "band": band, "in_band": in_band}))
    reporter.add_result("monotone", monotone)
    reporter.add_result("in_band", in_band)
    return 0


def _run_recipe(recipe: Recipe, args: argparse.Namespace, reporter: RunReporter,
                recorder: Optional[FrontRecorder] = None):
    config = recipe.solver_config()
    datum = recipe.datum()
    reporter.config.update({"solver": config.to_dict(), "datum": datum.to_dict()})
    observers = [recorder] if recorder is not None else []
    stream = None
    if args.snapshots == "all":
        stream = writers.SnapshotStream(reporter.path("snapshots.csv"), args.stride)
        observers.append(stream)
    try:
        result = run(config, datum, observers, keep="ends")
    finally:
        if stream is not None:
            stream.close()
            reporter.add_file(stream.path)
    if args.snapshots == "ends":
        reporter.add_file(writers.write_snapshots_csv(reporter.path("snapshots.csv"), result.snapshots,
                                                      args.stride))
    run_info = result.to_dict()
    run_info.pop("config")
    reporter.add_result("run", run_info)
    if result.truncated:
        logger.warning(f"Run truncated at t={result.truncated_at}: outputs are partial",
                       termination=result.termination)
    return result


def cmd_solve(args: argparse.Namespace, reporter: RunReporter) -> int:
    recipe = load_recipe(args.config)
    reporter.config.update({"recipe": recipe.to_dict()})
    result = _run_recipe(recipe, args, reporter)
    return 5 if result.truncated else 0


def cmd_front(args: argparse.Namespace, reporter: RunReporter) -> int:
    recipe = load_recipe(args.config)
    reporter.config.update({"recipe": recipe.to_dict()})
    recorder = FrontRecorder(recipe.level, recipe.side, recipe.origin)
    result = _run_recipe(recipe, args, reporter, recorder)
    trace = recorder.trace()
    reporter.add_file(writers.write_trace_csv(reporter.path("trace.csv"), recipe.alpha, [trace]))
    reporter.add_result("trace_complete", trace.complete)

    if recipe.linear_window is None or len(result.snapshots) < 2:
        logger.info("No linear window or a single snapshot: skipping fits")
    else:
        try:
            fit = fit_regimes(trace, recipe.linear_window, recipe.exp_window, recipe.crossover_factor)
            payload = {"alpha": recipe.alpha, **fit.to_dict(), **_tau_pair(recipe.alpha)}
            reporter.add_file(writers.write_checked_json(reporter.path("fit.json"), "fit", payload))
        except LabError as e:
            if not result.truncated:
                raise
            reporter.add_result("fit_error", f"{type(e).__name__}: {e}")
    return 5 if result.truncated else 0


def cmd_sweep(args: argparse.Namespace, reporter: RunReporter) -> int:
    recipe = load_recipe(args.config)
    alphas = _require_alphas(args.alphas if args.alphas is not None else recipe.alphas)
    if recipe.linear_window is None:
        raise UsageError("A sweep recipe needs linear_window")
    scenario = SweepScenario(recipe.solver_config(alphas[0]), recipe.datum(), recipe.linear_window,
                             recipe.exp_window, recipe.side, recipe.origin, recipe.crossover_factor)
    reporter.config.update({"recipe": recipe.to_dict(), "alphas": alphas})

    members = transition_sweep(alphas, scenario, recipe.level, args.threads)
    for member in members:
        folder = f"alpha_{member.alpha!r}"
        if member.result is not None:
            reporter.add_file(writers.write_snapshots_csv(
                reporter.path(folder) / "snapshots.csv", member.result.snapshots, args.stride))
        if member.trace is not None:
            reporter.add_file(writers.write_trace_csv(reporter.path(folder) / "trace.csv", member.alpha,
                                                      [member.trace]))
        if member.fit is not None:
            payload = {"alpha": member.alpha, **member.fit.to_dict(),
                       "tau_alpha": member.tau_alpha, "tau_log": member.tau_log}
            reporter.add_file(writers.write_checked_json(reporter.path(folder) / "fit.json", "fit", payload))
    reporter.add_file(writers.write_transition_csv(reporter.path("transition.csv"), members))
    reporter.add_result("members", [m.to_row() for m in members])

    if any(m.error for m in members):
        return 2
    return 5 if any(m.result.truncated for m in members) else 0


def _add_output(parser: argparse.ArgumentParser, default: str):
    parser.add_argument("--output", default=default, help="Output directory (default: %(default)s)")


def _add_run_outputs(parser: argparse.ArgumentParser, default_snapshots: str):
    parser.add_argument("--config", required=True, help="Recipe file (key = value lines)")
    parser.add_argument("--snapshots", choices=("all", "ends", "none"), default=default_snapshots,
                        help="Which snapshots go to snapshots.csv (default: %(default)s)")
    parser.add_argument("--stride", type=int, default=1, help="Write every k-th grid point")


def build_parser() -> argparse.ArgumentParser:
    parser = LabArgumentParser(prog="fkpp-lab", description="Fractional Fisher-KPP numerical laboratory")
    parser.add_argument("--log-level", default=None, help="Override FKPP_LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=LabArgumentParser)

    p_kernel = sub.add_parser("kernel", help="Evaluate the fractional heat kernel p(x, t)")
    p_kernel.add_argument("--alpha", type=float, required=True)
    p_kernel.add_argument("--d", type=int, default=1)
    p_kernel.add_argument("--t", type=float, default=1.0)
    p_kernel.add_argument("--xs", type=_float_list, help="Comma-separated radii")
    p_kernel.add_argument("--grid", type=_float_list, help="start,stop,count")
    p_kernel.add_argument("--method", choices=("quadrature", "spectral", "both"), default="quadrature")
    p_kernel.add_argument("--L", type=float, default=None, help="Spectral half-width")
    p_kernel.add_argument("--N", type=int, default=None, help="Spectral points per axis")
    _add_output(p_kernel, "results/kernel")
    p_kernel.set_defaults(func=cmd_kernel)

    p_asym = sub.add_parser("validate-asymptotics", help="Residual scaling of the two-term expansion")
    p_asym.add_argument("--alphas", type=_float_list, required=True)
    p_asym.add_argument("--d", type=int, default=1)
    p_asym.add_argument("--x-range", type=_float_list, default=[1.0, 100.0])
    p_asym.add_argument("--samples", type=int, default=40)
    _add_output(p_asym, "results/asymptotics")
    p_asym.set_defaults(func=cmd_validate_asymptotics)

    p_tau = sub.add_parser("tau", help="Critical radius and transition times")
    p_tau.add_argument("--alphas", type=_float_list, required=True)
    p_tau.add_argument("--d", type=int, default=1)
    _add_output(p_tau, "results/tau")
    p_tau.set_defaults(func=cmd_tau)

    p_solve = sub.add_parser("solve", help="Run the solver on a recipe")
    _add_run_outputs(p_solve, "all")
    _add_output(p_solve, "results/solve")
    p_solve.set_defaults(func=cmd_solve)

    p_front = sub.add_parser("front", help="Run, trace a level set and fit its regimes")
    _add_run_outputs(p_front, "all")
    _add_output(p_front, "results/front")
    p_front.set_defaults(func=cmd_front)

    p_sweep = sub.add_parser("sweep", help="Transition sweep over alpha")
    p_sweep.add_argument("--config", required=True, help="Recipe file (key = value lines)")
    p_sweep.add_argument("--alphas", type=_float_list, default=None, help="Override the recipe's alphas")
    p_sweep.add_argument("--threads", type=int, default=None, help="Override FKPP_THREADS")
    p_sweep.add_argument("--stride", type=int, default=1, help="Write every k-th grid point")
    _add_output(p_sweep, "results/sweep")
    p_sweep.set_defaults(func=cmd_sweep)
    return parser


def _config_echo(args: argparse.Namespace) -> Dict[str, Any]:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "command")}


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code

    if args.log_level:
        try:
            LabLogger.set_global_level(args.log_level)
        except AttributeError:
            print(f"error: unknown log level '{args.log_level}'", file=sys.stderr)
            return UsageError.exit_code
    if getattr(args, "stride", 1) < 1:
        print("error: --stride must be at least 1", file=sys.stderr)
        return UsageError.exit_code

    reporter = RunReporter(args.command, args.output, _config_echo(args), argv)
    try:
        code = args.func(args, reporter)
    except LabError as e:
        logger.error(f"{args.command} failed: {type(e).__name__}: {e}", exit_code=e.exit_code)
        print(f"error: {e}", file=sys.stderr)
        reporter.add_result("error", f"{type(e).__name__}: {e}")
        code = e.exit_code
    reporter.write(code)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
