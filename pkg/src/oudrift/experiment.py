"""Seeded replicate experiments: sweep, persist, summarize.

A run sweeps horizons and replicates for one configuration.  Each replicate
draws its own ground-truth drift and path from hash-derived seeds (stable
under sweep extension), estimates the drift, and records error metrics plus
the cone/curvature/dual-bound certificates as one CSV row.  A JSON manifest
of the full configuration sits next to the results for reproducibility.

Penalty constants are calibrated from pilot replicates in two stages: a
quantile stage placing the certificate thresholds just above the observed
dual norms of the contrast gradient at the truth, and a risk stage rescaling
the solver's penalty levels to the pilot-risk-minimizing multiple of those.
"""

from __future__ import annotations

import csv
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .analysis import (
    cone_membership,
    compute_error_metrics,
    linear_fit,
    oracle_bound_compare,
    verify_dual_bounds,
    verify_rsc,
)
from .contrast import (
    DegenerateLocalizationError,
    build_context,
    gradient,
    localization_from_observations,
)
from .models import generate_drift, lyapunov_stationary_cov
from .simulate import (
    REGIME_TAGS,
    LevyRegime,
    ObservationSet,
    PathConfig,
    SimulationBlowupError,
    derive_seed,
    empirical_trunc_moment,
    simulate_path,
)
from .solver import SolverConfig, TuningConfig, gamma_factor, solve, tune_lambdas

__all__ = [
    "Calibration",
    "LocalizationRule",
    "ExperimentConfig",
    "RESULTS_SCHEMA_VERSION",
    "RESULT_COLUMNS",
    "OUTPUT_DIR_ENV",
    "regime_preset",
    "calibrate_tuning",
    "run_experiment",
    "run_single",
    "summarize",
    "total_noise_cov",
    "config_to_dict",
    "config_from_dict",
]

RESULTS_SCHEMA_VERSION = 1
OUTPUT_DIR_ENV = "OUDRIFT_OUT"

RESULT_COLUMNS = [
    "regime",
    "d",
    "r",
    "s",
    "delta_n",
    "substeps",
    "t_horizon",
    "replicate",
    "seed",
    "failed",
    "error",
    "n_obs",
    "n_active",
    "radius_b",
    "eta",
    "gamma_value",
    "lambda_star",
    "lambda_one",
    "cert_lambda_star",
    "cert_lambda_one",
    "frob_err_sq",
    "rank_l_hat",
    "support_precision",
    "support_recall",
    "lowrank_ratio",
    "sparse_ratio",
    "in_cone",
    "grad_op_norm",
    "grad_inf_norm",
    "dual_op_pass",
    "dual_inf_pass",
    "min_eig_cn",
    "c_b_proxy",
    "rsc_pass",
    "trunc_moment",
    "iterations",
    "converged",
    "wall_time_s",
]


@dataclass(frozen=True)
class LocalizationRule:
    """Multipliers for the data-driven ball radius and truncation level;
    explicit values override the multipliers."""

    radius_mult: float = 3.0
    eta_mult: float = 4.0
    radius_b: Optional[float] = None
    eta: Optional[float] = None


@dataclass(frozen=True)
class ExperimentConfig:
    regime: LevyRegime
    d: int
    r: int
    s: int
    t_sweep: tuple
    delta_n: float
    substeps: int = 10
    replicates: int = 20
    seed_base: int = 0
    localization: LocalizationRule = field(default_factory=LocalizationRule)
    tuning: TuningConfig = field(default_factory=TuningConfig)
    solver: SolverConfig = field(default_factory=SolverConfig)
    output_dir: str = "results"
    name: str = "experiment"
    spectral_floor: float = 0.5
    lowrank_scale: float = 1.0
    sparse_magnitude: tuple = (0.3, 1.0)
    gamma_auto: bool = True          # derive gamma from the regime and mesh
    calibrate: bool = True           # pilot-calibrate c_op, c_one per run
    calibration_quantile: float = 0.975
    calibration_reps: int = 30
    calibration_safety: float = 1.25  # headroom over the pilot quantile
    risk_calibration: bool = True    # rescale solver penalties to pilot risk
    risk_multipliers: tuple = (1.0, 0.5, 0.25, 0.125, 0.0625)

    def __post_init__(self):
        object.__setattr__(self, "t_sweep", tuple(float(t) for t in self.t_sweep))
        object.__setattr__(
            self, "sparse_magnitude", tuple(float(v) for v in self.sparse_magnitude)
        )
        object.__setattr__(
            self, "risk_multipliers", tuple(float(v) for v in self.risk_multipliers)
        )
        if not self.t_sweep or any(t <= 0 for t in self.t_sweep):
            raise ValueError("t_sweep must be nonempty with positive horizons")
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        if self.delta_n <= 0:
            raise ValueError("delta_n must be positive")


def _eta_scale(regime: LevyRegime, delta_n: float) -> float:
    """Regime-specific multiplier of the truncation level."""
    if regime.tag == "subweibull":
        return max(math.log(1.0 / delta_n), 1e-12) ** (1.0 / regime.alpha)
    if regime.tag == "polymoment":
        return delta_n ** (1.0 / regime.p)
    return 1.0


def _jump_second_moment(regime: LevyRegime) -> float:
    """E[R^2] for the jump radius law of the regime."""
    scale = regime.jump_scale
    if regime.tag == "bounded":
        c = min(regime.z0 / scale, 1.0)
        return scale**2 * (c**3 / 3.0) + regime.z0**2 * (1.0 - c)
    if regime.tag == "subweibull":
        return scale**2 * math.gamma(1.0 + 2.0 / regime.alpha)
    if regime.tag == "polymoment":
        a = regime.p + 0.5
        return scale**2 * a / (a - 2.0)
    return 0.0


def total_noise_cov(regime: LevyRegime, d: int) -> np.ndarray:
    """Instantaneous covariance of the driving noise: Brownian part plus
    isotropic compound-Poisson part.  Determines the stationary covariance
    through the Lyapunov balance for every square-integrable regime."""
    cov = np.zeros((d, d))
    if regime.sigma is not None:
        cov += regime.sigma @ regime.sigma.T
    if regime.tag != "continuous" and regime.jump_rate > 0:
        cov += regime.jump_rate * _jump_second_moment(regime) / d * np.eye(d)
    return cov


def regime_preset(name: str) -> ExperimentConfig:
    """Documented default configuration per noise regime.

    Values are desk-scale calibration outputs, not theory-derived constants;
    everything is overridable via dataclasses.replace.
    """
    if name == "continuous":
        d = 20
        regime = LevyRegime(tag="continuous", sigma=np.eye(d))
        return ExperimentConfig(
            regime=regime,
            d=d,
            r=2,
            s=20,
            t_sweep=(250.0, 500.0, 1000.0, 2000.0),
            delta_n=0.05,
            substeps=10,
            replicates=20,
            name="continuous",
        )
    if name == "bounded":
        d = 10
        regime = LevyRegime(
            tag="bounded", sigma=0.5 * np.eye(d), jump_rate=1.0, jump_scale=0.5, z0=1.0
        )
        return ExperimentConfig(
            regime=regime,
            d=d,
            r=1,
            s=10,
            t_sweep=(250.0, 500.0, 1000.0),
            delta_n=0.1,
            substeps=10,
            replicates=20,
            name="bounded",
        )
    if name == "subweibull":
        d = 10
        regime = LevyRegime(
            tag="subweibull", sigma=0.5 * np.eye(d), jump_rate=1.0, jump_scale=0.5, alpha=1.0
        )
        return ExperimentConfig(
            regime=regime,
            d=d,
            r=1,
            s=10,
            t_sweep=(250.0, 500.0, 1000.0),
            delta_n=0.1,
            substeps=10,
            replicates=20,
            name="subweibull",
        )
    if name == "polymoment":
        d = 10
        regime = LevyRegime(
            tag="polymoment", sigma=0.5 * np.eye(d), jump_rate=1.0, jump_scale=0.5, p=4.0
        )
        return ExperimentConfig(
            regime=regime,
            d=d,
            r=1,
            s=10,
            t_sweep=(250.0, 500.0, 1000.0),
            delta_n=0.1,
            substeps=10,
            replicates=20,
            name="polymoment",
        )
    raise ValueError(f"unknown preset {name!r}; expected one of {REGIME_TAGS}")


def _resolved_gamma(cfg: ExperimentConfig) -> float:
    if cfg.gamma_auto:
        return gamma_factor(cfg.regime, cfg.delta_n)
    return cfg.tuning.gamma_value


def _build_localized_context(cfg: ExperimentConfig, obs: ObservationSet):
    loc = localization_from_observations(
        obs,
        radius_mult=cfg.localization.radius_mult,
        eta_mult=cfg.localization.eta_mult,
        eta_scale=_eta_scale(cfg.regime, cfg.delta_n),
        radius_b=cfg.localization.radius_b,
        eta=cfg.localization.eta,
    )
    return loc, build_context(obs, loc)


@dataclass(frozen=True)
class Calibration:
    """Calibrated penalty constants.

    cert_tuning holds the quantile-calibrated constants: the half-penalty
    thresholds sit at the calibration quantile of the gradient dual norms at
    the truth over pilot replicates, which is what the certificate checks
    verify.  solver_tuning scales those constants by the pilot-risk-optimal
    multiplier and drives the estimator; the quantile constants are known to
    oversmooth.
    """

    cert_tuning: TuningConfig
    solver_tuning: TuningConfig
    risk_multiplier: float


def calibrate_tuning(cfg: ExperimentConfig, t_pilot: Optional[float] = None) -> Calibration:
    """Calibrate penalty constants on pilot replicates.

    Stage 1 sets c_op (c_one) so the half-penalty threshold sits at the
    calibration quantile of the operator (entrywise max) norm of the contrast
    gradient at the true drift, times a safety factor absorbing the quantile
    estimate's own sampling noise.  Stage 2 (when cfg.risk_calibration)
    rescales both constants by the multiplier minimizing the mean pilot
    squared error.
    """
    t = float(t_pilot if t_pilot is not None else max(cfg.t_sweep))
    gamma = _resolved_gamma(cfg)
    op_norms = []
    inf_norms = []
    pilots = []
    for k in range(cfg.calibration_reps):
        seed = derive_seed(cfg.seed_base, "calibration", k)
        model = generate_drift(
            cfg.d, cfg.r, cfg.s, seed=derive_seed(seed, "model"),
            spectral_floor=cfg.spectral_floor, lowrank_scale=cfg.lowrank_scale,
            sparse_magnitude=cfg.sparse_magnitude,
        )
        pcfg = PathConfig(
            delta_n=cfg.delta_n,
            n_obs=max(int(round(t / cfg.delta_n)), 1),
            substeps=cfg.substeps,
            seed=derive_seed(seed, "path"),
        )
        obs = simulate_path(model, cfg.regime, pcfg)
        _, ctx = _build_localized_context(cfg, obs)
        g = gradient(ctx, model.a0)
        sv = np.linalg.svd(g, compute_uv=False)
        op_norms.append(float(sv[0]))
        inf_norms.append(float(np.max(np.abs(g))))
        pilots.append((model, ctx))
    q = cfg.calibration_quantile
    safety = cfg.calibration_safety
    q_op = float(np.quantile(op_norms, q))
    q_inf = float(np.quantile(inf_norms, q))
    log_d = math.log(cfg.d)
    cert = replace(
        cfg.tuning,
        c_op=safety * q_op * math.sqrt(t / (gamma * log_d)),
        c_one=safety * q_inf * math.sqrt(t / (2.0 * gamma * log_d)),
        gamma_value=gamma,
    )

    best_mult = 1.0
    if cfg.risk_calibration:
        best_risk = math.inf
        for mult in cfg.risk_multipliers:
            tun = replace(cert, c_op=cert.c_op * mult, c_one=cert.c_one * mult)
            lambdas = tune_lambdas(cfg.d, t, tun)
            risk = 0.0
            for model, ctx in pilots:
                result = solve(ctx, lambdas, cfg.solver)
                diff = result.a_hat - model.a0
                risk += float(np.sum(diff * diff))
            if risk < best_risk:
                best_risk = risk
                best_mult = float(mult)
    solver_tuning = replace(
        cert, c_op=cert.c_op * best_mult, c_one=cert.c_one * best_mult
    )
    return Calibration(
        cert_tuning=cert, solver_tuning=solver_tuning, risk_multiplier=best_mult
    )


def _failed_row(cfg, t, rep, seed, message) -> dict:
    row = {col: "" for col in RESULT_COLUMNS}
    row.update(
        regime=cfg.regime.tag,
        d=cfg.d,
        r=cfg.r,
        s=cfg.s,
        delta_n=cfg.delta_n,
        substeps=cfg.substeps,
        t_horizon=t,
        replicate=rep,
        seed=seed,
        failed=1,
        error=message,
    )
    return row


def run_single(cfg: ExperimentConfig, calib: Calibration, t: float, rep: int) -> dict:
    """One replicate: generate, simulate, estimate, certify; returns a row."""
    start = time.perf_counter()
    seed = derive_seed(cfg.seed_base, "row", t, rep)
    model = generate_drift(
        cfg.d, cfg.r, cfg.s, seed=derive_seed(seed, "model"),
        spectral_floor=cfg.spectral_floor, lowrank_scale=cfg.lowrank_scale,
        sparse_magnitude=cfg.sparse_magnitude,
    )
    pcfg = PathConfig(
        delta_n=cfg.delta_n,
        n_obs=max(int(round(t / cfg.delta_n)), 1),
        substeps=cfg.substeps,
        seed=derive_seed(seed, "path"),
    )
    try:
        obs = simulate_path(model, cfg.regime, pcfg)
        loc, ctx = _build_localized_context(cfg, obs)
    except (SimulationBlowupError, DegenerateLocalizationError) as exc:
        return _failed_row(cfg, t, rep, seed, f"{type(exc).__name__}: {exc}")

    lambdas = tune_lambdas(cfg.d, t, calib.solver_tuning)
    cert_lambdas = tune_lambdas(cfg.d, t, calib.cert_tuning)
    result = solve(ctx, lambdas, cfg.solver)
    metrics = compute_error_metrics(model, result)
    cone = cone_membership(
        model.tangent, result.l_hat - model.l0, result.s_hat - model.s0
    )
    dual = verify_dual_bounds(ctx, model, cert_lambdas)
    reference = lyapunov_stationary_cov(model.a0, total_noise_cov(cfg.regime, cfg.d))
    rsc = verify_rsc(ctx, reference_cov=reference)
    return {
        "regime": cfg.regime.tag,
        "d": cfg.d,
        "r": cfg.r,
        "s": cfg.s,
        "delta_n": cfg.delta_n,
        "substeps": cfg.substeps,
        "t_horizon": t,
        "replicate": rep,
        "seed": seed,
        "failed": 0,
        "error": "",
        "n_obs": pcfg.n_obs,
        "n_active": ctx.n_active,
        "radius_b": loc.radius_b,
        "eta": loc.eta,
        "gamma_value": calib.solver_tuning.gamma_value,
        "lambda_star": lambdas[0],
        "lambda_one": lambdas[1],
        "cert_lambda_star": cert_lambdas[0],
        "cert_lambda_one": cert_lambdas[1],
        "frob_err_sq": metrics.frob_err_sq,
        "rank_l_hat": metrics.rank_l_hat,
        "support_precision": metrics.support_precision,
        "support_recall": metrics.support_recall,
        "lowrank_ratio": cone.lowrank_ratio,
        "sparse_ratio": cone.sparse_ratio,
        "in_cone": int(cone.in_cone),
        "grad_op_norm": dual.grad_op_norm,
        "grad_inf_norm": dual.grad_inf_norm,
        "dual_op_pass": int(dual.op_pass),
        "dual_inf_pass": int(dual.inf_pass),
        "min_eig_cn": rsc.min_eig_cn,
        "c_b_proxy": rsc.c_b_proxy,
        "rsc_pass": int(rsc.passes),
        "trunc_moment": empirical_trunc_moment(obs, loc.eta),
        "iterations": result.iterations,
        "converged": int(result.converged),
        "wall_time_s": time.perf_counter() - start,
    }


def _row_job(args):
    cfg, calib, t, rep = args
    return (t, rep), run_single(cfg, calib, t, rep)


def run_experiment(
    cfg: ExperimentConfig,
    parallel: int = 1,
    out_dir: Optional[str] = None,
) -> Path:
    """Execute the sweep and write `<name>_results.csv` plus a manifest.

    The output directory resolves as: explicit `out_dir` argument, else the
    OUDRIFT_OUT environment variable, else cfg.output_dir.  Failed replicates
    are flagged rows, never dropped.  Returns the results path.
    """
    target = Path(out_dir or os.environ.get(OUTPUT_DIR_ENV) or cfg.output_dir)
    target.mkdir(parents=True, exist_ok=True)

    if cfg.calibrate:
        calib = calibrate_tuning(cfg)
    else:
        tun = replace(cfg.tuning, gamma_value=_resolved_gamma(cfg))
        calib = Calibration(cert_tuning=tun, solver_tuning=tun, risk_multiplier=1.0)

    jobs = [(cfg, calib, t, rep) for t in cfg.t_sweep for rep in range(cfg.replicates)]
    if parallel > 1:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            results = dict(pool.map(_row_job, jobs))
    else:
        results = dict(_row_job(job) for job in jobs)

    rows = [results[(t, rep)] for t in cfg.t_sweep for rep in range(cfg.replicates)]
    results_path = target / f"{cfg.name}_results.csv"
    with open(results_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=RESULT_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)

    manifest = {
        "schema_version": RESULTS_SCHEMA_VERSION,
        "config": config_to_dict(cfg),
        "tuning_used": {
            "c_op": calib.solver_tuning.c_op,
            "c_one": calib.solver_tuning.c_one,
            "gamma_value": calib.solver_tuning.gamma_value,
            "explicit_lambdas": calib.solver_tuning.explicit_lambdas,
        },
        "cert_tuning": {
            "c_op": calib.cert_tuning.c_op,
            "c_one": calib.cert_tuning.c_one,
        },
        "risk_multiplier": calib.risk_multiplier,
    }
    with open(target / f"{cfg.name}_manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
    return results_path


def _mean_median_std(values) -> tuple:
    arr = np.asarray(values, dtype=float)
    return float(np.mean(arr)), float(np.median(arr)), float(np.std(arr))


def summarize(results_path, group_keys: Sequence[str]) -> dict:
    """Group result rows and aggregate risk and certificate frequencies.

    Writes `<stem>_summary.csv` and `<stem>_plotdata.csv` (x, y, y_err with
    x the first group key, y the mean squared error) next to the results.
    Malformed rows are skipped and counted.  When grouping by `t_horizon`
    with at least 3 horizons, a log-log rate fit and the risk-bound-shape
    regression (read from the manifest) are included.
    """
    results_path = Path(results_path)
    group_keys = list(group_keys)
    if not group_keys:
        raise ValueError("need at least one group key")
    rows = []
    skipped = 0
    with open(results_path, "r", newline="", encoding="utf-8") as fh:
        for raw in csv.DictReader(fh):
            try:
                if raw.get("failed") not in ("0", 0, "", None):
                    rows.append({"__failed__": True, **raw})
                    continue
                parsed = dict(raw)
                for key in ("frob_err_sq", "in_cone", "dual_op_pass", "dual_inf_pass", "rsc_pass"):
                    parsed[key] = float(raw[key])
                rows.append(parsed)
            except (KeyError, TypeError, ValueError):
                skipped += 1

    groups = {}
    for row in rows:
        if row.get("__failed__"):
            key = tuple(row.get(k, "") for k in group_keys)
            groups.setdefault(key, {"rows": [], "failures": 0})["failures"] += 1
            continue
        key = tuple(row[k] for k in group_keys)
        groups.setdefault(key, {"rows": [], "failures": 0})["rows"].append(row)

    def _sort_key(key):
        parts = []
        for x in key:
            try:
                parts.append((0, float(x)))
            except (TypeError, ValueError):
                parts.append((1, str(x)))
        return tuple(parts)

    summary_rows = []
    for key in sorted(groups, key=_sort_key):
        bucket = groups[key]
        entry = dict(zip(group_keys, key))
        entry["n"] = len(bucket["rows"])
        entry["failures"] = bucket["failures"]
        if bucket["rows"]:
            errs = [r["frob_err_sq"] for r in bucket["rows"]]
            mean, median, std = _mean_median_std(errs)
            entry.update(
                frob_err_sq_mean=mean,
                frob_err_sq_median=median,
                frob_err_sq_std=std,
                cone_pass_rate=float(np.mean([r["in_cone"] for r in bucket["rows"]])),
                dual_pass_rate=float(
                    np.mean(
                        [r["dual_op_pass"] * r["dual_inf_pass"] for r in bucket["rows"]]
                    )
                ),
                rsc_pass_rate=float(np.mean([r["rsc_pass"] for r in bucket["rows"]])),
            )
        summary_rows.append(entry)

    out = {"groups": summary_rows, "skipped": skipped}

    complete = [e for e in summary_rows if "frob_err_sq_mean" in e]
    if group_keys == ["t_horizon"] and len(complete) >= 3:
        keyed = {
            float(key[0]): [r["frob_err_sq"] for r in bucket["rows"]]
            for key, bucket in groups.items()
            if bucket["rows"]
        }
        t_sorted = sorted(keyed)
        means = [float(np.mean(keyed[t])) for t in t_sorted]
        slope, _, r2 = linear_fit(np.log(t_sorted), np.log(means))
        out["slope_log_t"] = slope
        out["slope_r_squared"] = r2
        manifest_path = results_path.with_name(
            results_path.name.replace("_results.csv", "_manifest.json")
        )
        if manifest_path.exists():
            with open(manifest_path, "r", encoding="utf-8") as fh:
                manifest = json.load(fh)
            c = manifest["config"]
            gamma = manifest["tuning_used"]["gamma_value"]
            fit = oracle_bound_compare(
                [keyed[t] for t in t_sorted], c["d"], c["r"], c["s"], t_sorted,
                [gamma] * len(t_sorted), c["delta_n"],
            )
            out["oracle_fit"] = {
                "c1": fit.c1,
                "c2": fit.c2,
                "r_squared": fit.r_squared,
                "slope_log_t": fit.slope_log_t,
            }

    stem = results_path.with_suffix("")
    summary_path = Path(f"{stem}_summary.csv")
    if summary_rows:
        fieldnames = sorted({k for e in summary_rows for k in e}, key=str)
        with open(summary_path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.DictWriter(fh, fieldnames=fieldnames)
            writer.writeheader()
            writer.writerows(summary_rows)
    plot_path = Path(f"{stem}_plotdata.csv")
    with open(plot_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "y", "y_err"])
        for e in complete:
            writer.writerow([e[group_keys[0]], e["frob_err_sq_mean"], e["frob_err_sq_std"]])
    out["summary_path"] = str(summary_path)
    out["plotdata_path"] = str(plot_path)
    return out


def config_to_dict(cfg: ExperimentConfig) -> dict:
    regime = cfg.regime
    return {
        "regime": {
            "tag": regime.tag,
            "sigma": None if regime.sigma is None else regime.sigma.tolist(),
            "jump_rate": regime.jump_rate,
            "jump_scale": regime.jump_scale,
            "z0": regime.z0,
            "alpha": regime.alpha,
            "p": regime.p,
        },
        "d": cfg.d,
        "r": cfg.r,
        "s": cfg.s,
        "t_sweep": list(cfg.t_sweep),
        "delta_n": cfg.delta_n,
        "substeps": cfg.substeps,
        "replicates": cfg.replicates,
        "seed_base": cfg.seed_base,
        "localization": {
            "radius_mult": cfg.localization.radius_mult,
            "eta_mult": cfg.localization.eta_mult,
            "radius_b": cfg.localization.radius_b,
            "eta": cfg.localization.eta,
        },
        "tuning": {
            "c_op": cfg.tuning.c_op,
            "c_one": cfg.tuning.c_one,
            "gamma_value": cfg.tuning.gamma_value,
            "explicit_lambdas": (
                None
                if cfg.tuning.explicit_lambdas is None
                else list(cfg.tuning.explicit_lambdas)
            ),
        },
        "solver": {
            "max_iters": cfg.solver.max_iters,
            "tol": cfg.solver.tol,
            "step_init": cfg.solver.step_init,
            "backtracking_factor": cfg.solver.backtracking_factor,
            "acceleration": cfg.solver.acceleration,
        },
        "output_dir": cfg.output_dir,
        "name": cfg.name,
        "spectral_floor": cfg.spectral_floor,
        "lowrank_scale": cfg.lowrank_scale,
        "sparse_magnitude": list(cfg.sparse_magnitude),
        "gamma_auto": cfg.gamma_auto,
        "calibrate": cfg.calibrate,
        "calibration_quantile": cfg.calibration_quantile,
        "calibration_reps": cfg.calibration_reps,
        "calibration_safety": cfg.calibration_safety,
        "risk_calibration": cfg.risk_calibration,
        "risk_multipliers": list(cfg.risk_multipliers),
    }


def config_from_dict(doc: dict) -> ExperimentConfig:
    reg = doc["regime"]
    regime = LevyRegime(
        tag=reg["tag"],
        sigma=None if reg["sigma"] is None else np.array(reg["sigma"], dtype=float),
        jump_rate=reg["jump_rate"],
        jump_scale=reg["jump_scale"],
        z0=reg["z0"],
        alpha=reg["alpha"],
        p=reg["p"],
    )
    tun = doc["tuning"]
    loc = doc["localization"]
    sol = doc["solver"]
    return ExperimentConfig(
        regime=regime,
        d=int(doc["d"]),
        r=int(doc["r"]),
        s=int(doc["s"]),
        t_sweep=tuple(doc["t_sweep"]),
        delta_n=float(doc["delta_n"]),
        substeps=int(doc["substeps"]),
        replicates=int(doc["replicates"]),
        seed_base=int(doc["seed_base"]),
        localization=LocalizationRule(
            radius_mult=loc["radius_mult"],
            eta_mult=loc["eta_mult"],
            radius_b=loc["radius_b"],
            eta=loc["eta"],
        ),
        tuning=TuningConfig(
            c_op=tun["c_op"],
            c_one=tun["c_one"],
            gamma_value=tun["gamma_value"],
            explicit_lambdas=(
                None
                if tun["explicit_lambdas"] is None
                else tuple(tun["explicit_lambdas"])
            ),
        ),
        solver=SolverConfig(
            max_iters=int(sol["max_iters"]),
            tol=float(sol["tol"]),
            step_init=sol["step_init"],
            backtracking_factor=float(sol["backtracking_factor"]),
            acceleration=bool(sol["acceleration"]),
        ),
        output_dir=doc["output_dir"],
        name=doc["name"],
        spectral_floor=float(doc["spectral_floor"]),
        lowrank_scale=float(doc["lowrank_scale"]),
        sparse_magnitude=tuple(doc["sparse_magnitude"]),
        gamma_auto=bool(doc["gamma_auto"]),
        calibrate=bool(doc["calibrate"]),
        calibration_quantile=float(doc["calibration_quantile"]),
        calibration_reps=int(doc["calibration_reps"]),
        calibration_safety=float(doc["calibration_safety"]),
        risk_calibration=bool(doc["risk_calibration"]),
        risk_multipliers=tuple(doc["risk_multipliers"]),
    )
