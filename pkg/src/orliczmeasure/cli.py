"""Command-line front end.

Subcommands: ``add``, ``divergence``, ``variation``, ``check``,
``star``, ``affine``. Global options set the seed, tolerance override,
output directory, and an optional flat INI config whose ``[common]``
section and per-command sections provide defaults (command-line values
win). Every report embeds the seed, tolerances, resolutions, gauge
identities, kernel backend, and library version; identical
configuration and seed produce byte-identical files.

Exit codes: 0 on success, 1 when a suite reports violations, 2 for
configuration or parameter errors.
"""

from __future__ import annotations

import configparser
import sys
from dataclasses import dataclass, field
from pathlib import Path

import click
import numpy as np

from . import __version__
from ._kernels import BACKEND
from .addition import check_monotone_bound, orlicz_add_measure
from .divergence import f_divergence
from .errors import OrliczError
from .fileio import (
    dumps_json,
    read_measure,
    read_star_body,
    write_density_field,
    write_report,
    write_star_body,
)
from .gauges import parse_compositor, parse_surface, parse_univariate, tau0
from .harness import SUITE_NAMES, run_check_suite
from .runtime import worker_count
from .affine import (
    GaussianFamilyPoint,
    EuclideanField,
    affine_surface_area,
    geominimal_surface_area,
)
from .stargeo import dual_orlicz_mixed_volume, radial_orlicz_sum, run_star_suite, volume
from .variation import DEFAULT_EPS_SCHEDULE, first_variation_fd

_FILE_KEYS = ("p", "q", "p1", "p2", "field", "fields", "body", "bodies", "target_file")


@dataclass
class ExperimentConfig:
    """Resolved run configuration: global options plus config-file defaults."""

    seed: int = 0
    tol: float | None = None
    out: str = "reports"
    sections: dict = field(default_factory=dict)

    def get(self, section: str, key: str, default=None):
        sec = self.sections.get(section, {})
        if key in sec:
            return sec[key]
        return self.sections.get("common", {}).get(key, default)


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    parser = configparser.ConfigParser()
    try:
        read = parser.read(path)
    except configparser.Error as exc:
        raise click.UsageError(f"config parse error: {exc}") from exc
    if not read:
        raise click.UsageError(f"config file not found: {path}")
    sections = {name: dict(parser.items(name)) for name in parser.sections()}
    for name, sec in sections.items():
        for key, val in sec.items():
            if key in _FILE_KEYS:
                for item in val.split(","):
                    if not Path(item.strip()).exists():
                        raise click.UsageError(
                            f"[{name}] {key}: referenced file {item.strip()!r} does not exist")
    return sections


@click.group()
@click.version_option(version=__version__)
@click.option("--seed", type=int, default=None, help="Master seed for randomized suites.")
@click.option("--tol", type=float, default=None, help="Tolerance override recorded in reports.")
@click.option("--out", type=click.Path(), default=None, help="Report output directory.")
@click.option("--config", "config_path", type=str, default=None,
              help="Flat INI config providing per-command defaults.")
@click.pass_context
def main(ctx, seed, tol, out, config_path):
    """Orlicz addition of measures: solvers, checks, and reports."""
    sections = _load_config(config_path)
    common = sections.get("common", {})
    ctx.obj = ExperimentConfig(
        seed=seed if seed is not None else int(common.get("seed", 0)),
        tol=tol if tol is not None else (
            float(common["tol"]) if "tol" in common else None),
        out=out if out is not None else common.get("out", "reports"),
        sections=sections,
    )


def _summary(cfg: ExperimentConfig, suite: str, params: dict, results: dict,
             passed: bool) -> dict:
    return {
        "suite": suite,
        "version": __version__,
        "backend": BACKEND,
        "threads": worker_count(),
        "seed": cfg.seed,
        "tolerances": {"override": cfg.tol},
        "params": params,
        "results": results,
        "passed": passed,
    }


def _finish(cfg: ExperimentConfig, name: str, summary: dict,
            rows=None, failed: bool = False) -> None:
    write_report(cfg.out, name, summary, rows)
    click.echo(dumps_json(summary), nl=False)
    if failed:
        sys.exit(1)


def _require(cfg: ExperimentConfig, section: str, key: str, value):
    value = value if value is not None else cfg.get(section, key)
    if value is None:
        raise click.UsageError(f"missing required option --{key} (or [{section}] {key})")
    return value


def _usage_on_error(fn):
    """Map parameter/domain errors to exit code 2 with a diagnostic."""
    import functools

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except OrliczError as exc:
            raise click.UsageError(str(exc)) from exc
        except OSError as exc:
            raise click.UsageError(str(exc)) from exc

    return wrapper


@main.command()
@click.option("--gauge", default=None, help="Compositor spec, e.g. power_sum:p=2,m=2.")
@click.option("--field", "field_paths", multiple=True, type=click.Path(exists=True),
              help="Density-field file (repeat m times).")
@click.option("--out-field", default=None, type=click.Path(),
              help="Where to write the summed density field.")
@click.pass_obj
@_usage_on_error
def add(cfg: ExperimentConfig, gauge, field_paths, out_field):
    """Orlicz-add density fields and report masses and the diagonal bound."""
    gauge = _require(cfg, "add", "gauge", gauge)
    if not field_paths:
        paths = cfg.get("add", "fields")
        if paths is None:
            raise click.UsageError("need at least two --field inputs")
        field_paths = tuple(p.strip() for p in paths.split(","))
    phi = parse_compositor(gauge)
    measures = [read_measure(p) for p in field_paths]
    summed = orlicz_add_measure(phi, measures)
    t0 = tau0(phi)
    masses = [m.total() for m in measures]
    bound = sum(masses) / t0
    report = check_monotone_bound(phi, [m.density for m in measures])
    if out_field:
        write_density_field(out_field, summed.density)
    results = {
        "input_masses": masses,
        "sum_mass": summed.total(),
        "tau0": t0,
        "mass_bound": bound,
        "bound_margin": bound - summed.total(),
        "pointwise_bound_ok": report.passed,
    }
    summary = _summary(cfg, "add", {"gauge": gauge, "fields": list(field_paths)},
                       results, bool(report.passed and summed.total() <= bound * (1 + 1e-12)))
    _finish(cfg, "add", summary, failed=not summary["passed"])


@main.command()
@click.option("--gauge", default=None, help="Divergence kernel spec, e.g. kl, chi2, power:p=2.")
@click.option("--p", "p_path", default=None, type=click.Path(exists=True))
@click.option("--q", "q_path", default=None, type=click.Path(exists=True))
@click.pass_obj
@_usage_on_error
def divergence(cfg: ExperimentConfig, gauge, p_path, q_path):
    """f-divergence of two density files plus the Jensen comparison."""
    gauge = _require(cfg, "divergence", "gauge", gauge)
    p_path = _require(cfg, "divergence", "p", p_path)
    q_path = _require(cfg, "divergence", "q", q_path)
    phi = parse_surface(gauge)
    P = read_measure(p_path)
    Q = read_measure(q_path)
    res = f_divergence(phi, P, Q)
    qtot = Q.total()
    bound = qtot * float(phi(P.total() / qtot))
    margin = res.value - bound
    equal = abs(margin) <= 1e-8 * max(abs(res.value), abs(bound), 1e-300)
    results = {"value": res.value, "bound": bound, "margin": margin, "equal": equal,
               "integrand_min": res.integrand_extrema[0],
               "integrand_max": res.integrand_extrema[1]}
    summary = _summary(cfg, "divergence",
                       {"gauge": gauge, "p": str(p_path), "q": str(q_path)},
                       results, True)
    _finish(cfg, "divergence", summary)


@main.command()
@click.option("--phi1", default=None, help="Univariate gauge spec, e.g. power:p=2.")
@click.option("--phi2", default=None, help="Univariate gauge spec.")
@click.option("--p1", "p1_path", default=None, type=click.Path(exists=True))
@click.option("--p2", "p2_path", default=None, type=click.Path(exists=True))
@click.option("--s", "s_value", type=float, default=None)
@click.option("--eps", default=None, help="Comma-separated decreasing schedule.")
@click.pass_obj
@_usage_on_error
def variation(cfg: ExperimentConfig, phi1, phi2, p1_path, p2_path, s_value, eps):
    """First-variation difference quotients against the exact integral."""
    phi1 = parse_univariate(_require(cfg, "variation", "phi1", phi1))
    phi2 = parse_univariate(_require(cfg, "variation", "phi2", phi2))
    p1 = read_measure(_require(cfg, "variation", "p1", p1_path)).density
    p2 = read_measure(_require(cfg, "variation", "p2", p2_path)).density
    if s_value is None:
        s_value = float(cfg.get("variation", "s", 1.0))
    eps = eps if eps is not None else cfg.get("variation", "eps")
    schedule = DEFAULT_EPS_SCHEDULE if eps is None else tuple(
        float(tok) for tok in str(eps).split(","))
    est = first_variation_fd(phi1, phi2, p1, p2, s=s_value, eps_schedule=schedule)
    tol = cfg.tol if cfg.tol is not None else 1e-4
    rows = [{"epsilon": e, "quotient": q}
            for e, q in zip(est.epsilons, est.fd_values)]
    summary = _summary(cfg, "variation",
                       {"phi1": phi1.name, "phi2": phi2.name, "s": s_value,
                        "eps_schedule": list(schedule)},
                       {"estimate": est, "tolerance": tol},
                       est.relative_error <= tol and not est.sign_mismatch)
    _finish(cfg, "variation", summary, rows, failed=not summary["passed"])


@main.command()
@click.option("--suite", type=click.Choice(SUITE_NAMES), default=None)
@click.option("--trials", type=int, default=None)
@click.pass_obj
@_usage_on_error
def check(cfg: ExperimentConfig, suite, trials):
    """Randomized inequality suites; nonzero exit on any violation."""
    suite = _require(cfg, "check", "suite", suite)
    trials = int(trials if trials is not None else cfg.get("check", "trials", 200))
    records, violations = run_check_suite(suite, trials, cfg.seed)
    failing = [r for r in records if not (r["passed"] and r["flags_consistent"])]
    results = {"trials": trials, "violations": violations,
               "failing_cases": failing[:20]}
    summary = _summary(cfg, f"check-{suite}",
                       {"suite": suite, "trials": trials},
                       results, violations == 0)
    _finish(cfg, f"check_{suite}", summary, records, failed=violations > 0)


@main.command()
@click.option("--action", type=click.Choice(["sum", "volume", "check"]), default=None)
@click.option("--gauge", default=None, help="Compositor spec for sums.")
@click.option("--body", "body_paths", multiple=True, type=click.Path(exists=True))
@click.option("--out-body", default=None, type=click.Path())
@click.option("--trials", type=int, default=None)
@click.option("--dimension", type=int, default=None)
@click.option("--resolution", type=int, default=None)
@click.pass_obj
@_usage_on_error
def star(cfg: ExperimentConfig, action, gauge, body_paths, out_body,
         trials, dimension, resolution):
    """Star-body sums, volumes, and the geometric randomized suite."""
    action = _require(cfg, "star", "action", action)
    if action == "volume":
        paths = body_paths or tuple(
            p.strip() for p in str(_require(cfg, "star", "body", None)).split(","))
        bodies = [read_star_body(p) for p in paths]
        results = {"volumes": [volume(b) for b in bodies]}
        summary = _summary(cfg, "star-volume", {"bodies": list(paths)}, results, True)
        _finish(cfg, "star_volume", summary)
    elif action == "sum":
        gauge = _require(cfg, "star", "gauge", gauge)
        phi = parse_compositor(gauge)
        paths = body_paths or tuple(
            p.strip() for p in str(_require(cfg, "star", "bodies", None)).split(","))
        bodies = [read_star_body(p) for p in paths]
        summed = radial_orlicz_sum(phi, bodies)
        if out_body:
            write_star_body(out_body, summed)
        results = {"volumes": [volume(b) for b in bodies],
                   "sum_volume": volume(summed),
                   "mixed_volume_id": dual_orlicz_mixed_volume(
                       lambda t: t, bodies[0], summed)}
        summary = _summary(cfg, "star-sum",
                           {"gauge": gauge, "bodies": list(paths)}, results, True)
        _finish(cfg, "star_sum", summary)
    else:
        trials = int(trials if trials is not None else cfg.get("star", "trials", 50))
        dimension = int(dimension if dimension is not None
                        else cfg.get("star", "dimension", 2))
        resolution = int(resolution if resolution is not None
                         else cfg.get("star", "resolution", 64))
        records, violations = run_star_suite(trials, cfg.seed, dimension, resolution)
        results = {"trials": trials, "violations": violations,
                   "failing_cases": [r for r in records if not r["passed"]][:20]}
        summary = _summary(cfg, "star-check",
                           {"trials": trials, "dimension": dimension,
                            "resolution": resolution}, results, violations == 0)
        _finish(cfg, "star_check", summary, records, failed=violations > 0)


@main.command()
@click.option("--target", default=None,
              help="gaussian:c=<scale>[,n=<dim>] or file:<density path>.")
@click.option("--gauge", default=None, help="Surface gauge spec, e.g. exp_neg.")
@click.option("--family", type=click.Choice(["scaled", "diag", "full"]), default=None)
@click.option("--resolution", type=int, default=None)
@click.option("--geominimal", is_flag=True, default=False,
              help="Restrict candidates to log-concave densities.")
@click.pass_obj
@_usage_on_error
def affine(cfg: ExperimentConfig, target, gauge, family, resolution, geominimal):
    """Dual functional Orlicz affine/geominimal surface area of a target."""
    target = _require(cfg, "affine", "target", target)
    gauge = _require(cfg, "affine", "gauge", gauge)
    family = family if family is not None else cfg.get("affine", "family", "scaled")
    phi = parse_surface(gauge)
    kind, _, rest = str(target).partition(":")
    if kind == "gaussian":
        params = dict(tok.split("=") for tok in rest.split(",") if tok)
        c = float(params.get("c", 1.0))
        n = int(params.get("n", 1))
        tgt = GaussianFamilyPoint.isotropic(c, n)
    elif kind == "file":
        if not Path(rest).exists():
            raise click.UsageError(f"target file not found: {rest}")
        density = read_measure(rest).density
        n = density.space.points.shape[1]
        res = int(round(len(density.values) ** (1.0 / n)))
        half = float(np.max(np.abs(density.space.points)))
        vals = density.values.reshape((res,) * n)
        tgt = EuclideanField(half_width=half, values=vals, check_tails=False)
    else:
        raise click.UsageError(f"unknown target kind {kind!r}")
    fn = geominimal_surface_area if geominimal else affine_surface_area
    result = fn(phi, tgt, family=family, resolution=resolution)
    summary = _summary(cfg, "affine",
                       {"target": str(target), "gauge": gauge, "family": family,
                        "resolution": resolution, "geominimal": geominimal},
                       {"surface_area": result}, True)
    _finish(cfg, "affine", summary)


if __name__ == "__main__":
    main()
