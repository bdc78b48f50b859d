"""
yamabelab CLI - Nonlocal Yamabe Operator Lab

A click-based command-line interface for the kernel, first eigenvalue, periodic branch,
Morse index and Morse-index certificate computations of the operator P.
"""

import functools
import logging
import os
import sys
from typing import Optional

import click
import numpy as np
import pandas as pd

from yamabelab._version import __version__
from yamabelab.config import RunConfig, get_config_default, get_workers_default
from yamabelab.errors import EXIT_INVARIANT, EXIT_OK, InvariantViolation, YamabeLabError
from yamabelab.utils import Timer, prepare_output_dir, render_summary, run_sweep, write_csv, write_manifest, write_metrics

logger = logging.getLogger(__name__)

KERNEL_SMALL_T = np.geomspace(1e-4, 1e-2, 41)
KERNEL_LARGE_T = np.linspace(8.0, 16.0, 33)
KERNEL_MID_T = np.geomspace(2e-2, 7.5, 60)
KERNEL_SMALL_TOL = 1e-2
KERNEL_LARGE_TOL = 1e-3
LOWER_BRANCH_C1 = 0.5
MORSE_COARSENING = 4
EXPLICIT_TOL = 1e-2


class RunContext:
    """Resolved configuration, output directory and worker count shared by all commands."""

    def __init__(self, config_path: Optional[str], out: Optional[str], workers: Optional[int], command: str):
        self.command = command
        self.config_path = config_path or get_config_default()
        self.config = RunConfig.from_ini(self.config_path)
        self.output_dir = out or self.config.output_dir
        self.config.output_dir = self.output_dir
        self.workers = workers or get_workers_default()
        self.metrics = {}
        self.files = {}
        self._params = None

    @property
    def params(self):
        if self._params is None:
            from yamabelab.kernel.params import make_params

            config = self.config
            options = {"workers": self.workers} if config.gamma_mode == "calibrated" else {}
            with Timer(self.metrics, "gamma"):
                self._params = make_params(config.n, config.s, gamma_mode=config.gamma_mode,
                                           gamma_value=config.gamma_value, **options)
        return self._params

    def path(self, folder: str, name: str) -> str:
        return os.path.join(self.output_dir, folder, name)

    def constants(self, model=None) -> dict:
        constants = self.params.as_dict()
        if model is not None:
            constants.update(model.constants())
        return constants

    def finish(self, model=None, extra: Optional[dict] = None, sections: Optional[list] = None):
        """Write metrics, the manifest and reports/summary.md."""
        write_metrics(self.output_dir, self.command, self.metrics)
        manifest = write_manifest(self.output_dir, self.command, self.config.as_dict(), self.constants(model),
                                  self.files, extra)
        if sections:
            render_summary(self.output_dir, f"yamabelab {self.command}", sections)
        click.echo(click.style(f"\nManifest: {manifest}", fg="green"))


def common_options(func):
    """--config, --out, --workers and --verbose for every command."""

    @click.option("--config", "config_path", type=click.Path(), default=None,
                  help="INI configuration file. Defaults to $YAMABELAB_CONFIG, then the packaged config.ini.")
    @click.option("--out", "-o", "out", type=click.Path(), default=None,
                  help="Output directory. Overrides [output] directory and $YAMABELAB_OUTPUT_DIR.")
    @click.option("--workers", "-w", type=int, default=None,
                  help="Worker processes for sweeps (pandarallel). Defaults to $YAMABELAB_WORKERS or 1.")
    @click.option("--verbose", "-v", is_flag=True, default=False, help="Log at DEBUG level.")
    @functools.wraps(func)
    def wrapper(config_path, out, workers, verbose, **kwargs):
        logging.basicConfig(stream=sys.stdout, level=logging.DEBUG if verbose else logging.INFO,
                            format="%(message)s", force=True)
        try:
            ctx = RunContext(config_path, out, workers, func.__name__.replace("cmd_", ""))
            click.echo(click.style(f"yamabelab {ctx.command}", fg="green", bold=True))
            click.echo("=" * 50)
            click.echo(click.style("\nStep 0: Preparing output directory...", fg="cyan"))
            prepare_output_dir(ctx.output_dir)
            code = func(ctx, **kwargs)
        except YamabeLabError as exc:
            click.echo(click.style(f"\nError ({type(exc).__name__}): {exc}", fg="red", bold=True))
            sys.exit(exc.exit_code)
        sys.exit(code or EXIT_OK)

    return wrapper


def _load_profile(ctx: RunContext, profile_path: Optional[str]):
    from yamabelab.operators.profile import Profile

    if profile_path is None:
        return Profile.one(ctx.params)
    profile = Profile.from_json(profile_path)
    if profile.params is None:
        profile = profile.with_params(ctx.params)
    click.echo(f"  Profile: {profile!r} from {profile_path}")
    return profile


@click.group()
@click.version_option(version=__version__, prog_name="yamabelab")
def cli():
    """
    yamabelab - Nonlocal Yamabe Operator Lab

    Numerical experiments with the one-dimensional nonlocal operator P obtained from the
    fractional Yamabe equation in Emden-Fowler variables.

    \b
    Example usage:
        yamabelab kernel --config run.ini --out ./output
        yamabelab solve --out ./output
        yamabelab verify --profile ./output/profiles/profile_000.json --m 5
    """
    pass


@cli.command("kernel")
@common_options
@click.option("--pure-power", is_flag=True, default=False,
              help="Add the pure-power kernel A0|t|^(-1-2s) as a comparison column.")
def cmd_kernel(ctx: RunContext, pure_power: bool) -> int:
    """
    Tabulate K(t) with its small-t and large-t scalings.

    \b
    Examples:
        yamabelab kernel --out ./output
        yamabelab kernel --pure-power --config closed_form.ini
    """
    from yamabelab.kernel.model import get_kernel

    click.echo(click.style("\nStep 1: Building the kernel table...", fg="cyan"))
    with Timer(ctx.metrics, "kernel"):
        model = get_kernel(ctx.params)
        t = np.concatenate([KERNEL_SMALL_T, KERNEL_MID_T, KERNEL_LARGE_T])
        table = model.table(t)
        if pure_power:
            table["K_pure_power"] = model.A0 * t ** (-model.exponent)
            table["ratio_to_pure_power"] = table["K"] / table["K_pure_power"]

    click.echo(click.style("\nStep 2: Checking the asymptotic regimes...", fg="cyan"))
    small = table.loc[table["t"] <= KERNEL_SMALL_T[-1], "K_power_scaled"]
    large = table.loc[table["t"] >= KERNEL_LARGE_T[0], "K_exp_scaled"]
    small_spread = float(small.max() / small.min() - 1.0)
    large_spread = float(large.max() / large.min() - 1.0)
    click.echo(f"  K|t|^(1+2s) spread on [1e-4, 1e-2]: {small_spread:.3e}")
    click.echo(f"  K e^((n+2s)t/2) spread on [8, 16]: {large_spread:.3e}")

    ctx.files[write_csv(table, ctx.path("tables", "kernel.csv"))] = \
        "K(t) with K|t|^(1+2s) (constant near 0) and K e^((n+2s)t/2) (constant at infinity)"
    ctx.finish(model, extra={"small_t_spread": small_spread, "large_t_spread": large_spread}, sections=[{
        "heading": "Kernel asymptotics",
        "rows": [("A0", f"{model.A0:.10g}"), ("A_inf", f"{model.A_inf:.10g}"),
                 ("small-t spread", f"{small_spread:.3e}"), ("large-t spread", f"{large_spread:.3e}")],
    }])
    if small_spread > KERNEL_SMALL_TOL or large_spread > KERNEL_LARGE_TOL:
        raise InvariantViolation(f"kernel scalings not constant: {small_spread:.3e} near 0 (limit {KERNEL_SMALL_TOL}), "
                                 f"{large_spread:.3e} at infinity (limit {KERNEL_LARGE_TOL})")
    return EXIT_OK


@cli.command("lambda1")
@common_options
@click.option("--pure-power", is_flag=True, default=False, help="Use the pure-power kernel (μ₁ instead of λ₁).")
def cmd_lambda1(ctx: RunContext, pure_power: bool) -> int:
    """
    Sweep the first Dirichlet eigenvalue λ₁(M) over [grid] m_list.

    Each window uses [grid] nodes_per_window nodes, so h = 2M/nodes_per_window.
    """
    from yamabelab.kernel.model import get_kernel
    from yamabelab.spectral.eigen import fit_decay_rate, lambda1, lower_branch_constant

    params = ctx.params
    mode = "pure_power" if pure_power else "full"
    model = get_kernel(params, mode)
    nodes = ctx.config.nodes_per_window

    def row_lambda1(row):
        M = float(row["M"])
        return pd.Series(lambda1(model, M, 2.0 * M / nodes).as_row(params.s))

    click.echo(click.style(f"\nStep 1: Solving {len(ctx.config.m_list)} generalized eigenproblems ({mode})...",
                           fg="cyan"))
    with Timer(ctx.metrics, "lambda1"):
        frame = pd.DataFrame({"M": sorted(ctx.config.m_list)})
        table = run_sweep(frame, row_lambda1, ctx.workers, description="lambda1")
    c = lower_branch_constant(params.p, LOWER_BRANCH_C1)
    table["below_linear_coeff"] = table["lambda1"] < params.lin_coeff
    table["below_lower_branch"] = table["lambda1"] < c

    click.echo(click.style("\nStep 2: Checking positivity and monotonicity...", fg="cyan"))
    positive = bool((table["lambda1"] > 0).all())
    decreasing = bool(np.all(np.diff(table["lambda1"].to_numpy()) < 0))
    phi_positive = bool(table["phi1_positive"].astype(bool).all())
    fit = fit_decay_rate(table["M"], table["lambda1"]) if len(table) >= 3 and positive else None
    click.echo(f"  positive={positive} decreasing={decreasing} phi1_positive={phi_positive}")
    if fit is not None:
        click.echo(f"  log-log slope {fit['slope']:.4f} ± {fit['slope_stderr']:.4f} (reported only)")

    ctx.files[write_csv(table, ctx.path("tables", f"lambda1_{mode}.csv"))] = \
        "first Dirichlet eigenvalue of P on [-M, M], scaled by M^(2s), with eigenfunction positivity"
    ctx.finish(model, extra={"decay_fit": fit, "lower_branch_constant": c}, sections=[{
        "heading": f"First eigenvalue ({mode})",
        "rows": [(f"M={M:g}", f"{value:.10g}") for M, value in zip(table["M"], table["lambda1"])],
        "note": f"4s/(n-2s) = {params.lin_coeff:.6g}; chord constant c({LOWER_BRANCH_C1}) = {c:.6g}",
    }])
    if not (positive and decreasing and phi_positive):
        logger.error("lambda1 sweep violates positivity or monotonicity")
        return EXIT_INVARIANT
    return EXIT_OK


@cli.command("solve")
@common_options
def cmd_solve(ctx: RunContext) -> int:
    """
    Continue the branch of periodic solutions from the bifurcation period L*.

    The branch runs over [solver] l_start_factor·L* to l_end_factor·L*.
    """
    from yamabelab.solver.bifurcation import bifurcation_period, critical_frequency
    from yamabelab.solver.continuation import continue_branch, export_branch

    config = ctx.config
    click.echo(click.style("\nStep 1: Locating the bifurcation period...", fg="cyan"))
    with Timer(ctx.metrics, "bifurcation"):
        k_star = critical_frequency(ctx.params)
        L_star = bifurcation_period(ctx.params)
    click.echo(f"  k* = {k_star:.12g}, L* = {L_star:.12g}")

    click.echo(click.style(f"\nStep 2: Continuing the branch over {config.steps + 1} periods...", fg="cyan"))
    with Timer(ctx.metrics, "continuation"):
        points = continue_branch(ctx.params, config.l_start_factor * L_star, config.l_end_factor * L_star,
                                 config.steps, n_modes=config.n_modes, seed_amplitude=config.seed_amplitude,
                                 tol=config.newton_tol, progress=True)

    click.echo(click.style("\nStep 3: Writing profiles...", fg="cyan"))
    ctx.files.update(export_branch(points, os.path.join(ctx.output_dir, "profiles"),
                                   config.profile_samples_per_period))
    worst = max(point.residual for point in points)
    ctx.finish(extra={"k_star": k_star, "L_star": L_star, "max_residual": worst}, sections=[{
        "heading": "Periodic branch",
        "rows": [("L*", f"{L_star:.12g}")] + [(f"L={point.L:.8g}", f"amplitude {point.amplitude:.6g}, "
                                                                   f"residual {point.residual:.2e}")
                                              for point in points],
    }])
    if worst > config.newton_tol:
        logger.error(f"Branch residual {worst:.3e} above {config.newton_tol:.1e}")
        return EXIT_INVARIANT
    return EXIT_OK


@cli.command("morse")
@common_options
@click.option("--profile", "profile_path", type=click.Path(exists=True), default=None,
              help="Profile JSON written by 'yamabelab solve'. Defaults to v = 1.")
def cmd_morse(ctx: RunContext, profile_path: Optional[str]) -> int:
    """
    Count negative directions of Q_v on nested windows [grid] morse_m_list.
    """
    from yamabelab.spectral.morse import morse_sweep

    profile = _load_profile(ctx, profile_path)
    click.echo(click.style(f"\nStep 1: Counting negative eigenvalues with h={ctx.config.h:g}...", fg="cyan"))
    with Timer(ctx.metrics, "morse"):
        table = morse_sweep(profile, ctx.config.morse_m_list, ctx.config.h)
    ctx.files[write_csv(table, ctx.path("tables", "morse.csv"))] = \
        "number of negative eigenvalues of Q_v on nested windows, nondecreasing in M"
    nondecreasing = bool(table["nondecreasing"].all())
    ctx.finish(extra={"profile": profile_path, "nondecreasing": nondecreasing}, sections=[{
        "heading": "Morse counts",
        "rows": [(f"M={M:g}", str(count)) for M, count in zip(table["M"], table["count"])],
    }])
    return EXIT_OK if nondecreasing else EXIT_INVARIANT


@cli.command("verify")
@common_options
@click.option("--profile", "profile_path", type=click.Path(exists=True), default=None,
              help="Profile JSON written by 'yamabelab solve'. Defaults to v = 1.")
@click.option("--m", "family_size", type=int, default=None, help="Family size m. Overrides [verify] m.")
def cmd_verify(ctx: RunContext, profile_path: Optional[str], family_size: Optional[int]) -> int:
    """
    Certify ind(v) ≥ m.

    \b
    v = 1:          translated copies of the first eigenfunction on a window with λ₁ < 4s/(n-2s).
    nonconstant v:  oscillation certificate, negative direction |v'|, translated copies of it.
    """
    from yamabelab.kernel.model import get_kernel
    from yamabelab.spectral.morse import morse_count
    from yamabelab.verify.concavity import check_concavity_inequality
    from yamabelab.verify.family import covering_window, eigenfunction_template, translated_family_bound
    from yamabelab.verify.intersection import check_intersection
    from yamabelab.verify.negative import build_negative_direction, export_direction
    from yamabelab.verify.oscillation import OscillationCertificate, detect_oscillation

    config = ctx.config
    m = family_size or config.family_size
    profile = _load_profile(ctx, profile_path)
    model = get_kernel(profile.params)
    extra = {"profile": profile_path, "m": m}
    rows = []
    code = EXIT_OK

    if profile.is_constant_one(1e-12):
        click.echo(click.style(f"\nStep 1: Translated eigenfunctions for v = 1, m={m}...", fg="cyan"))
        with Timer(ctx.metrics, "family"):
            template = eigenfunction_template(model)
            report = translated_family_bound(profile, m, template=template, model=model)
        rows.append(("eigenfunction window M", f"{template.scale:.6g}"))
        morse_h = template.h
    else:
        click.echo(click.style("\nStep 1: Intersection with v = 1...", fg="cyan"))
        intersection = check_intersection(profile)
        extra["intersection"] = intersection.to_dict()
        rows.append(("sign changes of v - 1", str(intersection.crossings.size)))
        if intersection.kind == "violation":
            ctx.finish(model, extra=extra)
            raise InvariantViolation(f"nonconstant profile stays {intersection.side} 1")

        click.echo(click.style("\nStep 2: Concavity inequality...", fg="cyan"))
        concavity = check_concavity_inequality(profile, samples=16, model=model, epsrel=config.quad_epsrel)
        ctx.files[write_csv(concavity, ctx.path("tables", "concavity.csv"))] = \
            "P(v-1) - 4s/(n-2s)(v-1) >= 0 at sample points of the solution"
        if not concavity["ok"].all():
            code = EXIT_INVARIANT

        click.echo(click.style("\nStep 3: Oscillation Condition...", fg="cyan"))
        horizon, step = None, None
        if profile.is_periodic:
            horizon = config.horizon_periods * profile.period
            step = profile.period / config.h_per_period
        else:
            lo, hi = profile.domain
            horizon = min(-lo, hi)
            step = config.h
        with Timer(ctx.metrics, "oscillation"):
            cert = detect_oscillation(profile, horizon=horizon, h=step)
        extra["oscillation"] = cert.to_dict()

        if isinstance(cert, OscillationCertificate):
            rows.append(("oscillation (M, epsilon)", f"({cert.M_osc:.6g}, {cert.epsilon:.6g})"))
            click.echo(click.style("\nStep 4: Negative direction |v'|...", fg="cyan"))
            with Timer(ctx.metrics, "negative_direction"):
                direction = build_negative_direction(profile, cert, model=model)
            ctx.files.update(export_direction(direction, os.path.join(ctx.output_dir, "profiles")))
            rows.append(("Q_v[eta]", f"{direction.Q_value:.6e} (bound {direction.certified_bound:.6e})"))
            click.echo(click.style(f"\nStep 5: Translated family, m={m}...", fg="cyan"))
            with Timer(ctx.metrics, "family"):
                report = translated_family_bound(profile, m, template=direction, model=model)
            morse_h = MORSE_COARSENING * direction.h
        else:
            click.echo(click.style(f"\nStep 4: No oscillation certificate; bumps near the window "
                                   f"{cert.window} where v stays on one side...", fg="yellow"))
            template = eigenfunction_template(model)
            origin = cert.center - (template.start + 0.5 * template.width)
            with Timer(ctx.metrics, "family"):
                report = translated_family_bound(profile, m, template=template, model=model, origin=origin)
            morse_h = template.h
            code = EXIT_INVARIANT

    click.echo(click.style("\nStep 6: Morse count on a covering window...", fg="cyan"))
    center, M = covering_window(report, morse_h)
    with Timer(ctx.metrics, "morse"):
        count = morse_count(profile, M, morse_h, center=center, model=model)
    consistent = count.count >= report.implied_lower_bound
    extra.update({"index_report": report.to_dict(), "morse_count": count.as_row(), "consistent": consistent})
    ctx.files[report.to_json(ctx.path("reports", "index_report.json"))] = \
        f"Gram matrix of {m} translated negative directions; negative definite means ind(v) >= {m}"

    rows += [("family size m", str(m)), ("verdict", report.verdict), ("gap d", f"{report.d:.6g}"),
             ("largest Gram eigenvalue", f"{report.largest_eigenvalue:.6e}"),
             ("Morse count on covering window", str(count.count))]
    ctx.finish(model, extra=extra, sections=[{"heading": "Morse index certificate", "rows": rows}])
    click.echo(click.style(f"\n  ind(v) >= {report.implied_lower_bound} ({report.verdict})",
                           fg="green" if report.implied_lower_bound >= min(m, 2) else "red", bold=True))
    if report.implied_lower_bound < min(m, 2) or not consistent:
        return EXIT_INVARIANT
    return code


@cli.command("calibrate")
@common_options
@click.option("--resolution", type=float, default=1.0, show_default=True,
              help="Oracle resolution; larger values refine the n-dimensional quadrature.")
def cmd_calibrate(ctx: RunContext, resolution: float) -> int:
    """
    Fit the kernel normalization against the n-dimensional fractional Laplacian.
    """
    from yamabelab.kernel.params import make_params
    from yamabelab.operators.calibration import calibration_report, explicit_solution_check

    config = ctx.config
    base = make_params(config.n, config.s, gamma_mode="closed_form")
    click.echo(click.style("\nStep 1: Running the oracle on the bump battery...", fg="cyan"))
    with Timer(ctx.metrics, "calibration"):
        result = calibration_report(base, resolution=resolution, workers=ctx.workers)
    click.echo(f"  gamma = {result.gamma:.10g} (closed form {result.closed_form:.10g}), spread {result.spread:.3%}")
    ctx.files[write_csv(result.table, ctx.path("tables", "calibration.csv"))] = \
        "oracle (-Δ)^s against P v + v on radial bumps; gamma_point is the per-point normalization"

    click.echo(click.style("\nStep 2: Checking the explicit singular solution...", fg="cyan"))
    with Timer(ctx.metrics, "explicit_solution"):
        explicit = explicit_solution_check(base, resolution=resolution)
    ctx.files[write_csv(explicit, ctx.path("tables", "explicit_solution.csv"))] = \
        "(-Δ)^s u0 = u0^p for the singular solution u0 at several radii"
    worst = float(explicit["relative_error"].abs().max())

    calibrated = base.with_gamma(result.gamma, "calibrated")
    ctx._params = calibrated
    ctx.finish(extra={"calibration": result.as_dict(), "explicit_max_error": worst}, sections=[{
        "heading": "Kernel normalization",
        "rows": [("gamma (calibrated)", f"{result.gamma:.10g}"), ("gamma (closed form)", f"{result.closed_form:.10g}"),
                 ("spread", f"{result.spread:.3%}"), ("explicit solution error", f"{worst:.3%}")],
    }])
    if worst > EXPLICIT_TOL:
        raise InvariantViolation(f"explicit solution check off by {worst:.3%} (limit {EXPLICIT_TOL:.0%})")
    return EXIT_OK


def main():
    cli()


if __name__ == "__main__":
    main()
