"""Command-line front end.

Exit codes: 0 success, 2 validation error, 3 resource cap exceeded. Every
randomized subcommand takes --seed (default 0, never wall clock), and the
payload printed to stdout is a deterministic function of the flags. Records
appended via --out additionally carry a timestamp and a config hash used
for deduplication.
"""

from __future__ import annotations

import csv
import io
import json
import statistics
import sys
import time

import click
import numpy as np

from . import bounds, svgplot
from .adversary import (
    ImpossibilityConfig,
    ToyConfig,
    imposs_probe,
    imposs_risk_floor,
    toy_attack_report,
    toy_poison,
    toy_sample_clean,
    toy_train_classifier,
    projections,
)
from .bounds import exact_type3_risk
from .detectors import type2_tv
from .distributions import Categorical, DistributionPair
from .errors import BdLimitsError, ResourceCapError
from .harness import DETECTORS, append_result, config_hash, estimate_risk


def _fail(message: str, code: int) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _emit(command: str, config: dict, payload, out: str | None) -> None:
    """Print the deterministic payload; optionally append a timestamped record."""
    digest = config_hash(config)
    click.echo(json.dumps({"command": command, "config_hash": digest, "payload": payload}))
    if out:
        append_result(
            out,
            {
                "command": command,
                "config_hash": digest,
                "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
                "payload": payload,
            },
        )


@click.group()
def main() -> None:
    """Feasibility bounds and simulators for training-data backdoor detection."""


@main.command("bounds-table")
@click.option("--alpha", default=0.1, show_default=True, type=float)
@click.option("--beta", default=0.001, show_default=True, type=float)
@click.option(
    "--catalog",
    "catalog_path",
    default=None,
    type=click.Path(),
    help="JSON list of dataset specs; defaults to the bundled catalog.",
)
@click.option("--format", "fmt", default="csv", show_default=True, type=click.Choice(["csv", "json"]))
@click.option("--out", default=None, type=click.Path(), help="Append the report to a JSON-lines file.")
def bounds_table(alpha: float, beta: float, catalog_path: str | None, fmt: str, out: str | None) -> None:
    """Minimum training-set sizes for alpha-error detection, per dataset."""
    try:
        catalog = bounds.load_catalog(catalog_path)
        rows = bounds.table_report(alpha, beta, catalog)
    except (BdLimitsError, OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
        _fail(str(exc), 2)
        return
    payload = [row.to_jsonable() for row in rows]
    if fmt == "json":
        click.echo(json.dumps(payload, indent=2))
    else:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["name", "log10_alphabet", "log10_min_n"])
        for row in rows:
            writer.writerow([row.name, f"{row.log10_alphabet:.2f}", row.min_n_exponent])
        click.echo(buf.getvalue().rstrip("\n"))
    if out:
        config = {"command": "bounds-table", "alpha": alpha, "beta": beta, "catalog": catalog_path}
        append_result(
            out,
            {
                "command": "bounds-table",
                "config_hash": config_hash(config),
                "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
                "payload": payload,
            },
        )


def _benchmark_pair(k: int, gamma: float, beta: float) -> DistributionPair:
    """Default instance: uniform clean distribution, point-mass backdoor."""
    return DistributionPair(
        Categorical.uniform(k), Categorical.point_mass(0, k), gamma=gamma, beta=beta
    )


@main.command("risk")
@click.option("--detector", "detector_name", default="np", show_default=True, type=click.Choice(sorted(DETECTORS)))
@click.option("--k", default=2, show_default=True, type=int)
@click.option("--n", default=2, show_default=True, type=int)
@click.option("--gamma", default=0.5, show_default=True, type=float)
@click.option("--beta", default=0.5, show_default=True, type=float)
@click.option(
    "--pair",
    "pair_path",
    default=None,
    type=click.Path(),
    help="JSON file {p0, pb, gamma, beta}; overrides --k/--gamma/--beta.",
)
@click.option("--trials", default=10000, show_default=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--oracle", is_flag=True, help="Also print the exact optimal risk from product enumeration.")
@click.option("--out", default=None, type=click.Path())
def risk(
    detector_name: str,
    k: int,
    n: int,
    gamma: float,
    beta: float,
    pair_path: str | None,
    trials: int,
    seed: int,
    oracle: bool,
    out: str | None,
) -> None:
    """Monte-Carlo risk of a detector on a distribution pair."""
    try:
        if pair_path is not None:
            with open(pair_path, "r", encoding="utf-8") as fh:
                pair = DistributionPair.from_jsonable(json.load(fh))
        else:
            pair = _benchmark_pair(k, gamma, beta)
        detector = DETECTORS[detector_name]()
        estimate = estimate_risk(detector, pair, n, trials, seed)
    except ResourceCapError as exc:
        _fail(str(exc), 3)
        return
    except (BdLimitsError, OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
        _fail(str(exc), 2)
        return
    payload = {
        "detector": detector_name,
        "k": pair.alphabet_size,
        "n": n,
        "gamma": pair.gamma,
        "beta": pair.beta,
        "trials": trials,
        "seed": seed,
        "risk": estimate.to_jsonable(),
        "oracle_exact": None,
        "oracle_gap": None,
    }
    if oracle:
        try:
            exact = exact_type3_risk(pair, n)
        except ResourceCapError as exc:
            _fail(str(exc), 3)
            return
        payload["oracle_exact"] = exact
        payload["oracle_gap"] = abs(estimate.p_hat - exact)
    config = {
        "command": "risk",
        "detector": detector_name,
        "pair": pair.to_jsonable(),
        "n": n,
        "trials": trials,
        "seed": seed,
        "oracle": oracle,
    }
    _emit("risk", config, payload, out)


def _boundary_points(clf, x_min: float, x_max: float) -> tuple[tuple[float, float], tuple[float, float]] | None:
    """Endpoints of the line w.z + b = 0 across [x_min, x_max], K = 2 only."""
    w0, w1 = float(clf.w[0]), float(clf.w[1])
    if abs(w1) > 1e-12:
        return ((x_min, -(w0 * x_min + clf.b) / w1), (x_max, -(w0 * x_max + clf.b) / w1))
    if abs(w0) > 1e-12:
        x = -clf.b / w0
        return ((x, x_min), (x, x_max))
    return None


def _toy_svg(path: str, config: ToyConfig, seed: int) -> None:
    clean = toy_sample_clean(config, config.n, seed)
    poisoned = toy_poison(clean, config.gamma, config, seed)
    clean_clf = toy_train_classifier(clean)
    poisoned_clf = toy_train_classifier(poisoned)
    panels = []

    if config.k == 2:
        zs = np.array([s.z for s in poisoned])
        ys = np.array([s.y for s in poisoned])
        lo = float(zs.min()) - 0.5
        hi = float(zs.max()) + 0.5
        scatter = svgplot.Panel("poisoned training set", lo, hi, lo, hi)
        for z, y in zip(zs, ys):
            scatter.point(z[0], z[1], "#d62728" if y == 1 else "#1f77b4")
        for clf, color, dash in ((clean_clf, "#2ca02c", None), (poisoned_clf, "#9467bd", "6,4")):
            pts = _boundary_points(clf, lo, hi)
            if pts:
                scatter.line(*pts[0], *pts[1], color, width=2.0, dash=dash)
        scatter.label("solid: clean fit, dashed: poisoned fit", lo + 0.1, hi - 0.3)
        panels.append(scatter)

    f_clean = projections(clean, config)
    f_pois = projections(poisoned, config)
    lo = float(min(f_clean.min(), f_pois.min())) - 0.2
    hi = float(max(f_clean.max(), f_pois.max())) + 0.2
    edges, dens_clean = svgplot.histogram_series(f_clean, 24, lo, hi)
    _, dens_pois = svgplot.histogram_series(f_pois, 24, lo, hi)
    top = float(max(dens_clean.max(), dens_pois.max())) * 1.1
    hist = svgplot.Panel("projection statistics", lo, hi, 0.0, top)
    for i in range(len(dens_clean)):
        hist.bar(edges[i], edges[i + 1], float(dens_clean[i]), "#1f77b4")
        hist.bar(edges[i], edges[i + 1], float(dens_pois[i]), "#d62728")
    hist.label("blue: clean, red: poisoned", lo + 0.1, top * 0.95)
    panels.append(hist)

    with open(path, "w", encoding="utf-8") as fh:
        fh.write(svgplot.render_document(panels))


def _toy_csv(path: str, config: ToyConfig, seeds: list[int]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["seed", "index", "poisoned", "label", "projection"]
            + [f"z{i}" for i in range(config.k)]
        )
        for seed in seeds:
            clean = toy_sample_clean(config, config.n, seed)
            poisoned = toy_poison(clean, config.gamma, config, seed)
            f = projections(poisoned, config)
            for idx, (c, s) in enumerate(zip(clean, poisoned)):
                writer.writerow(
                    [seed, idx, int(c.y != s.y), s.y, f"{f[idx]:.6f}"]
                    + [f"{z:.6f}" for z in s.z]
                )


@main.command("toy")
@click.option("--n", default=150, show_default=True, type=int)
@click.option("--gamma", default=0.5, show_default=True, type=float)
@click.option("--sigma", default=0.5, show_default=True, type=float)
@click.option("--v", "v_text", default="0.981,0.196", show_default=True, help="Projection direction, comma separated.")
@click.option("--seeds", default=1, show_default=True, type=int, help="Number of consecutive seeds to run.")
@click.option("--seed", default=0, show_default=True, type=int, help="First seed.")
@click.option("--svg", "svg_path", default=None, type=click.Path(), help="Write scatter and histogram panels for the first seed.")
@click.option("--csv", "csv_path", default=None, type=click.Path(), help="Write per-sample projection data for all seeds.")
@click.option("--out", default=None, type=click.Path())
def toy(
    n: int,
    gamma: float,
    sigma: float,
    v_text: str,
    seeds: int,
    seed: int,
    svg_path: str | None,
    csv_path: str | None,
    out: str | None,
) -> None:
    """Run the projection-evading attack on the Gaussian classification task."""
    try:
        v = np.array([float(part) for part in v_text.split(",")])
    except ValueError as exc:
        _fail(f"cannot parse --v: {exc}", 2)
        return
    norm = float(np.linalg.norm(v))
    if abs(norm - 1.0) > 1e-9 and norm > 0.0:
        click.echo(f"warning: |v| = {norm:.6f}, normalizing", err=True)
    try:
        config = ToyConfig.from_direction(v, sigma=sigma, gamma=gamma, n=n)
        if seeds < 1:
            raise BdLimitsError("--seeds must be >= 1")
        records = []
        for s in range(seed, seed + seeds):
            report = toy_attack_report(config, s)
            records.append({"seed": s, **report.to_jsonable()})
        if svg_path:
            _toy_svg(svg_path, config, seed)
        if csv_path:
            _toy_csv(csv_path, config, list(range(seed, seed + seeds)))
    except BdLimitsError as exc:
        _fail(str(exc), 2)
        return
    payload: dict = {
        "n": n,
        "gamma": gamma,
        "sigma": sigma,
        "v": [float(x) for x in config.v],
        "mu": config.mu,
        "records": records,
    }
    if seeds > 1:
        payload["summary"] = {
            "median_p_value": statistics.median(r["p_value"] for r in records),
            "median_attack_success_rate": statistics.median(
                r["attack_success_rate"] for r in records
            ),
            "median_clean_accuracy": statistics.median(
                r["clean_accuracy"] for r in records
            ),
        }
    config_doc = {
        "command": "toy",
        "n": n,
        "gamma": gamma,
        "sigma": sigma,
        "v": [float(x) for x in config.v],
        "seeds": seeds,
        "seed": seed,
    }
    _emit("toy", config_doc, payload, out)


@main.command("probe")
@click.option("--k", default=100000, show_default=True, type=int)
@click.option("--beta", default=0.01, show_default=True, type=float)
@click.option("--gamma", default=1.0, show_default=True, type=float)
@click.option("--n", default=20, show_default=True, type=int)
@click.option("--detector", "detector_name", default="type2-tv", show_default=True, type=click.Choice(["type2-tv"]))
@click.option("--trials", default=10000, show_default=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--out", default=None, type=click.Path())
def probe(
    k: int,
    beta: float,
    gamma: float,
    n: int,
    detector_name: str,
    trials: int,
    seed: int,
    out: str | None,
) -> None:
    """Measure a clean-distribution detector against the marginally-clean sampler."""
    try:
        config = ImpossibilityConfig(k=k, beta=beta, gamma=gamma, n=n)
        if config.m <= n:
            raise BdLimitsError(
                f"floor(beta*k) = {config.m} must exceed n = {n}; "
                "increase k or beta, or decrease n"
            )

        def detector(d, p0):
            return int(type2_tv(d, p0, gamma, beta))

        estimate = imposs_probe(detector, config, trials, seed)
        floor = imposs_risk_floor(n, config.m)
    except BdLimitsError as exc:
        _fail(str(exc), 2)
        return
    satisfied = floor <= estimate.p_hat + 3.0 * estimate.ci_width
    payload = {
        "k": k,
        "beta": beta,
        "gamma": gamma,
        "n": n,
        "m": config.m,
        "detector": detector_name,
        "trials": trials,
        "seed": seed,
        "risk": estimate.to_jsonable(),
        "floor": floor,
        "floor_satisfied": bool(satisfied),
    }
    config_doc = {
        "command": "probe",
        "k": k,
        "beta": beta,
        "gamma": gamma,
        "n": n,
        "detector": detector_name,
        "trials": trials,
        "seed": seed,
    }
    _emit("probe", config_doc, payload, out)
    click.echo(
        f"measured risk {estimate.p_hat:.4f} "
        f"[{estimate.ci_low:.4f}, {estimate.ci_high:.4f}], "
        f"floor {floor:.4f}: {'PASS' if satisfied else 'FAIL'}",
        err=True,
    )


if __name__ == "__main__":
    main()
