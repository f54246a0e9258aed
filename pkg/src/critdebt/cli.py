"""Command-line front end.

    critdebt analyze book.csv [--dimension 2] [--format json] [--plot-dir figs]
    critdebt critical --E 2000 --sigma 10 --k 100
    critdebt fractional --alpha 0.75 --V 4
    critdebt fractional --alpha-range 0.55 0.95 0.05 --E 10
    critdebt mix --m 10000 --n 10 --s1 1 --s2 1 --L1 1 --L2 100

Reports go to stdout, warnings to stderr. Exit codes: 0 success, 2 input
error, 3 model-regime error, 4 solver failure.
"""

from __future__ import annotations

import argparse
import math
import sys
import traceback
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

from . import critical, fractional, mix, parastat, portfolio
from .errors import CritDebtError, InputError, ModelWarning, SmallK
from .report import Report, dumps, render_text
from .solvers import SolveConfig

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_REGIME = 3
EXIT_SOLVER = 4


@dataclass(frozen=True)
class AnalysisConfig:
    dimension: float = 2.0
    tol: float = 1e-10
    max_iter: int = 10_000
    rtol_verdict: float = 0.01
    grid_resolution: int = 1
    output_format: str = "text"

    def __post_init__(self):
        if not (self.dimension == 2 or 1 < self.dimension < 2):
            raise InputError(f"dimension must be 2 or lie in (1, 2), got {self.dimension}")
        if not self.tol > 0:
            raise InputError(f"tol must be positive, got {self.tol}")
        if not self.rtol_verdict >= 0:
            raise InputError(f"rtol must be non-negative, got {self.rtol_verdict}")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise InputError(f"max_iter must be a positive integer, got {self.max_iter}")
        if int(self.grid_resolution) != self.grid_resolution or self.grid_resolution < 1:
            raise InputError(f"grid_resolution must be a positive integer, got {self.grid_resolution}")
        if self.output_format not in ("text", "json"):
            raise InputError(f"unknown output format {self.output_format!r}")

    @property
    def solve(self):
        return SolveConfig(tol=self.tol, max_iter=self.max_iter)

    def echo(self):
        d = asdict(self)
        d.pop("output_format")
        return d


def exit_code_for(exc):
    if isinstance(exc, CritDebtError):
        return exc.exit_code
    if isinstance(exc, (ValueError, OSError)):
        return EXIT_INPUT
    return EXIT_SOLVER


def error_origin(exc):
    """Dotted name of the package module the exception was raised in."""
    origin = None
    for frame, _ in traceback.walk_tb(exc.__traceback__):
        name = frame.f_globals.get("__name__", "")
        if name.startswith(__package__ + ".") and name != __name__:
            origin = name
    return origin or __name__


def describe_error(exc):
    return f"{type(exc).__name__} [{error_origin(exc)}]: {exc}"


class _WarningLog:
    """Collects model warnings raised inside a block, verbatim and in order."""

    def __enter__(self):
        self._cm = warnings.catch_warnings(record=True)
        self._records = self._cm.__enter__()
        warnings.simplefilter("always")
        return self

    def __exit__(self, *exc):
        self._cm.__exit__(*exc)
        return False

    @property
    def messages(self):
        out = []
        for w in self._records:
            if issubclass(w.category, ModelWarning):
                out.append(f"{w.category.__name__}: {w.message}")
        return out


def _finish(report, log, errors=()):
    report.warnings = log.messages + [describe_error(e) for e in errors]
    codes = [exit_code_for(e) for e in errors]
    report.exit_code = max(codes, default=EXIT_OK)
    return report


def _critical_block(k, V, sigma, cfg):
    rep = critical.critical_report(k, V, sigma, cfg.rtol_verdict, cfg.solve)
    block = {
        "V": V,
        "sigma0": rep.sigma0_entropy,
        "sigma0_entropy": rep.sigma0_entropy,
        "sigma0_chempot": rep.sigma0_chempot,
        "sigma0_leading": rep.sigma0_leading,
        "coincidence_gap": rep.coincidence_gap,
        "K_const": rep.K_const,
    }
    return block, rep.verdict


def cmd_analyze(csv_path, config: AnalysisConfig = AnalysisConfig(), plot_dir=None) -> Report:
    """CSV book -> normalization -> fit -> critical values -> verdict.

    Model failures after normalization do not abort the report: the
    affected section is left null and the error is listed under warnings.
    """
    report = Report(input={"csv_path": str(csv_path), "config": config.echo()})
    errors = []
    with _WarningLog() as log:
        try:
            records = portfolio.read_debts_csv(csv_path)
            norm = portfolio.normalize(records, config.grid_resolution)
        except (CritDebtError, OSError) as exc:
            return _finish(report, log, [exc])
        report.normalized = norm.summary()
        if norm.k < critical.SMALL_K:
            warnings.warn(SmallK(f"k = {norm.k} < {critical.SMALL_K}; "
                                 "large-k critical formulas are unreliable"))

        if config.dimension == 2:
            _analyze_d2(report, norm, config, errors)
        else:
            _analyze_fractional(report, norm, config, errors)

        if plot_dir is not None:
            from . import plotting
            stem = Path(csv_path).stem
            plotting.plot_slots(norm, Path(plot_dir) / f"{stem}_slots.png")
            if report.critical:
                values = {key: v for key, v in report.critical.items()
                          if key.startswith("sigma0_") and v is not None}
                plotting.plot_critical(norm.k, norm.sigma, values,
                                       Path(plot_dir) / f"{stem}_critical.png")
    _finish(report, log, errors)
    if report.verdict is not None:
        # a verdict was reached by some route; failed routes stay as warnings
        report.exit_code = EXIT_OK
    return report


def _analyze_d2(report, norm, config, errors):
    fit = None
    if norm.k >= 2:
        try:
            fit = parastat.fit_params(norm.sigma, norm.E, norm.k, config.solve)
        except CritDebtError as exc:
            errors.append(exc)
    if fit is not None:
        report.fit = {"b": fit.b, "kappa": fit.kappa, "B": fit.B, "V": fit.V,
                      "residual_sigma": fit.residuals[0], "residual_E": fit.residuals[1]}

    aggregate = None
    try:
        aggregate = critical.critical_from_aggregates(norm.E, norm.sigma, norm.k)
    except CritDebtError as exc:
        errors.append(exc)

    if fit is not None:
        V, source = fit.V, "fit"
    elif aggregate is not None:
        V, source = aggregate[0], "aggregate"
    else:
        return
    try:
        block, verdict = _critical_block(norm.k, V, norm.sigma, config)
    except CritDebtError as exc:
        errors.append(exc)
        return
    block["V_source"] = source
    block["sigma0_aggregate"] = None if aggregate is None else aggregate[1]
    report.critical = block
    report.verdict = verdict.value


def _analyze_fractional(report, norm, config, errors):
    alpha = config.dimension / 2
    try:
        V = fractional.velocity_from_energy(norm.E, alpha)
        sigma0 = fractional.critical_sigma_frac(alpha, V)
    except CritDebtError as exc:
        errors.append(exc)
        return
    report.critical = {"alpha": alpha, "f_alpha": fractional.f_alpha(alpha), "V": V,
                       "V_source": "energy", "sigma0": sigma0, "sigma0_fractional": sigma0}
    report.verdict = critical.solvency_verdict(norm.sigma, sigma0, config.rtol_verdict).value


def cmd_critical(E, sigma, k, config: AnalysisConfig = AnalysisConfig(), plot_dir=None) -> Report:
    """Aggregate path ``V = (E - k sigma) / k``, ``sigma0 = V ln k``, plus both methods at V."""
    report = Report(input={"E": E, "sigma": sigma, "k": k, "config": config.echo()})
    with _WarningLog() as log:
        try:
            V, sigma0 = critical.critical_from_aggregates(E, sigma, k)
            block, _ = _critical_block(int(k), V, sigma, config)
        except CritDebtError as exc:
            return _finish(report, log, [exc])
        block["sigma0"] = sigma0
        block["sigma0_aggregate"] = sigma0
        report.critical = block
        report.verdict = critical.solvency_verdict(sigma, sigma0, config.rtol_verdict).value
        if plot_dir is not None:
            from . import plotting
            values = {key: v for key, v in block.items() if key.startswith("sigma0_")}
            plotting.plot_critical(int(k), sigma, values, Path(plot_dir) / "critical.png")
            plotting.plot_entropy(int(k), Path(plot_dir) / "entropy.png")
    return _finish(report, log)


def _alpha_grid(start, stop, step):
    if not step > 0:
        raise InputError(f"alpha step must be positive, got {step}")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    if n < 1:
        raise InputError(f"empty alpha range {start}..{stop}")
    return [round(start + i * step, 12) for i in range(n)]


def cmd_fractional(alpha=None, *, d=None, E=None, V=None, k=None, b=None, alpha_range=None,
                   config: AnalysisConfig = AnalysisConfig(), plot_dir=None) -> Report:
    """Fractional critical value at one alpha, or an alpha sweep over a range.

    With ``k`` the self-consistent quadrature value is reported as well,
    using ``b = 1 / V`` unless ``b`` is given.
    """
    report = Report(input={"alpha": alpha, "d": d, "E": E, "V": V, "k": k, "b": b,
                           "alpha_range": None if alpha_range is None else list(alpha_range),
                           "config": config.echo()})
    with _WarningLog() as log:
        try:
            if (E is None) == (V is None):
                raise InputError("give exactly one of E or V")
            if alpha_range is not None:
                rows = fractional.alpha_sweep(_alpha_grid(*alpha_range), E=E, V=V)
                report.critical = {"sweep": rows}
                if plot_dir is not None:
                    from . import plotting
                    plotting.plot_alpha_sweep(rows, Path(plot_dir) / "alpha_sweep.png")
                return _finish(report, log)
            if d is not None:
                alpha = fractional.Dimension(d).alpha
            if alpha is None:
                raise InputError("give alpha, d or an alpha range")
            vel = fractional.velocity_from_energy(E, alpha) if E is not None else V
            block = {"alpha": alpha, "f_alpha": fractional.f_alpha(alpha), "V": vel,
                     "sigma0": fractional.critical_sigma_frac(alpha, vel)}
            if k is not None:
                fc = fractional.sigma0_frac_numeric(alpha, b if b is not None else 1.0 / vel,
                                                    k, config.solve)
                block["numeric"] = {"b": fc.b, "k": fc.k, "sigma0": fc.sigma0, "B0": fc.B0,
                                    "sigma01": fc.sigma01, "sigma02": fc.sigma02,
                                    "expansion": fc.expansion, "leading": fc.leading}
            report.critical = block
        except CritDebtError as exc:
            return _finish(report, log, [exc])
    return _finish(report, log)


def cmd_mix(m, n, s1, s2, L1, L2, V=None, *, raw=False,
            config: AnalysisConfig = AnalysisConfig(), plot_dir=None) -> Report:
    """Short-dominant estimates for a two-block book, with the aggregate path alongside."""
    report = Report(input={"m": m, "n": n, "s1": s1, "s2": s2, "L1": L1, "L2": L2, "V": V,
                           "raw": raw, "config": config.echo()})
    errors = []
    with _WarningLog() as log:
        try:
            build = mix.MixedPortfolio.from_raw if raw else mix.MixedPortfolio
            p = build(m, n, s1, s2, L1, L2)
            approx = mix.short_dominant_approx(p)
        except CritDebtError as exc:
            return _finish(report, log, [exc])
        sigma, E = mix.mixed_aggregates(p)
        report.normalized = {"k": p.k, "sigma": sigma, "E": E, "s1": p.s1, "s2": p.s2,
                             "ratio": p.ratio}
        block = {"V": approx.V, "sigma0": approx.sigma0, "validity": approx.validity,
                 "aggregate": None, "sigma0_at_V": None}
        try:
            V_agg, s0_agg = mix.exact_path(p)
            block["aggregate"] = {"V": V_agg, "sigma0": s0_agg}
        except CritDebtError as exc:
            errors.append(exc)
        if V is not None:
            try:
                block["sigma0_at_V"] = mix.mixed_critical(m, n, V)
            except CritDebtError as exc:
                errors.append(exc)
        report.critical = block
        report.verdict = critical.solvency_verdict(sigma, approx.sigma0, config.rtol_verdict).value
        if plot_dir is not None:
            from . import plotting
            agg = block["aggregate"]["sigma0"] if block["aggregate"] else None
            plotting.plot_mix(p, approx, Path(plot_dir) / "mix.png", agg)
    # the aggregate path is informational here; only input errors change the exit code
    report.warnings = log.messages + [describe_error(e) for e in errors]
    report.exit_code = EXIT_OK
    return report


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text}")
    return v


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--dimension", type=float, default=2.0, help="d = 2 or 1 < d < 2")
    common.add_argument("--tol", type=float, default=1e-10)
    common.add_argument("--max-iter", type=int, default=10_000)
    common.add_argument("--rtol", type=float, default=0.01, help="verdict band around sigma0")
    common.add_argument("--grid-resolution", type=int, default=1)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--plot-dir", type=Path, default=None, help="write PNG figures here")

    parser = argparse.ArgumentParser(prog="critdebt", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="analyze CSV portfolios")
    p.add_argument("files", nargs="+", type=Path)
    p.add_argument("--jobs", type=_positive_int, default=1)

    p = sub.add_parser("critical", parents=[common], help="critical debt from aggregates")
    p.add_argument("--E", type=float, required=True)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--k", type=int, required=True)

    p = sub.add_parser("fractional", parents=[common], help="fractional-dimension critical debt")
    which = p.add_mutually_exclusive_group(required=True)
    which.add_argument("--alpha", type=float)
    which.add_argument("--d", type=float)
    which.add_argument("--alpha-range", type=float, nargs=3, metavar=("START", "STOP", "STEP"))
    given = p.add_mutually_exclusive_group(required=True)
    given.add_argument("--E", type=float)
    given.add_argument("--V", type=float)
    p.add_argument("--k", type=int, default=None, help="also solve the quadrature form on k slots")
    p.add_argument("--b", type=float, default=None)

    p = sub.add_parser("mix", parents=[common], help="short/long maturity mix")
    for name in ("m", "n"):
        p.add_argument(f"--{name}", type=int, required=True)
    for name in ("s1", "s2", "L1", "L2"):
        p.add_argument(f"--{name}", type=float, required=True)
    p.add_argument("--V", type=float, default=None)
    p.add_argument("--raw", action="store_true", help="s1, s2 are raw amounts; normalize them")
    return parser


def _render(reports, fmt, labels=None):
    if fmt == "json":
        if len(reports) == 1:
            return dumps(reports[0].to_dict())
        return dumps([r.to_dict() for r in reports])
    parts = []
    for i, r in enumerate(reports):
        head = f"== {labels[i]}\n" if labels and len(reports) > 1 else ""
        parts.append(head + render_text(r))
    return "\n".join(parts)


def _analyze_job(args):
    path, config, plot_dir = args
    return cmd_analyze(path, config, plot_dir)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = AnalysisConfig(dimension=args.dimension, tol=args.tol, max_iter=args.max_iter,
                                rtol_verdict=args.rtol, grid_resolution=args.grid_resolution,
                                output_format=args.format)
    except InputError as exc:
        print(f"error: {describe_error(exc)}", file=sys.stderr)
        return EXIT_INPUT

    labels = None
    if args.command == "analyze":
        jobs = [(f, config, args.plot_dir) for f in args.files]
        if args.jobs > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                reports = list(pool.map(_analyze_job, jobs))
        else:
            reports = [_analyze_job(j) for j in jobs]
        labels = [str(f) for f in args.files]
    elif args.command == "critical":
        reports = [cmd_critical(args.E, args.sigma, args.k, config, args.plot_dir)]
    elif args.command == "fractional":
        reports = [cmd_fractional(args.alpha, d=args.d, E=args.E, V=args.V, k=args.k, b=args.b,
                                  alpha_range=args.alpha_range, config=config,
                                  plot_dir=args.plot_dir)]
    else:
        reports = [cmd_mix(args.m, args.n, args.s1, args.s2, args.L1, args.L2, args.V,
                           raw=args.raw, config=config, plot_dir=args.plot_dir)]

    for r in reports:
        for w in r.warnings:
            print(f"warning: {w}", file=sys.stderr)
    sys.stdout.write(_render(reports, config.output_format, labels))
    return max(r.exit_code for r in reports)


if __name__ == "__main__":
    sys.exit(main())
