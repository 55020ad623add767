"""Command-line front end.

Exit status: 0 when every verdict passes, 1 when a verdict fails or the data
do not support the requested estimate, 2 on usage, configuration or I/O
errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import platform
import re
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .config import COMMANDS, ConfigError, RunConfig, emit_config, parse_config
from .estimation import (
    debiased_eigenvector,
    estimate_bias_split,
    recover_support,
    sparse_pca_estimate,
    threshold_level,
)
from .linalg import as_vector, effective_rank, operator_norm, read_csv_matrix
from .sampling import CovarianceModel, explicit_spectrum_model, model_from_spec, sample_covariance
from .perturbation import contour_for_cluster, riesz_projector
from .spectral import decompose, spectral_gap
from .verify import (
    combine,
    run_bias_estimator_experiment,
    run_bias_experiment,
    run_clt_experiment,
    run_operator_norm_experiment,
    run_remainder_concentration_experiment,
    run_risk_experiment,
    run_support_recovery_experiment,
)
from .verify.mc import SeparationError
from .verify.report import ExperimentReport, Verdict

log = logging.getLogger("specproj")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class DataError(Exception):
    """The data do not support the requested estimate; a report is still written."""

    def __init__(self, message: str, report: ExperimentReport):
        super().__init__(message)
        self.report = report


# ---------------------------------------------------------------- models and directions


def _model(spec: dict, cfg: RunConfig, p: int | None = None) -> CovarianceModel:
    spec = dict(spec)
    if spec.get("kind") == "identity":
        dim = p if p is not None else spec.get("p")
        if dim is None:
            raise ConfigError("identity model needs 'p' or a p_values sweep")
        return explicit_spectrum_model([1.0], [int(dim)], cluster_tol=cfg.cluster_tol)
    if p is not None:
        if spec.get("kind") != "spiked":
            raise ConfigError("p_values sweeps need an identity or spiked model")
        spec["p"] = p
    try:
        return model_from_spec(spec, cluster_tol=cfg.cluster_tol)
    except TypeError as exc:
        raise ConfigError(f"field 'model': {exc}") from None


def _vector(token, model: CovarianceModel, r: int) -> np.ndarray:
    p = model.dim
    dec = model.ground_truth
    if isinstance(token, dict) and set(token) == {"file"}:
        try:
            return as_vector(read_csv_matrix(token["file"]), p)
        except OSError as exc:
            raise UsageError(f"cannot read direction file: {exc}") from None
    if isinstance(token, str):
        m = re.fullmatch(r"theta(\d*)", token)
        if m:
            return dec.eigenvector(int(m.group(1)) if m.group(1) else r).copy()
        m = re.fullmatch(r"e(\d+)", token)
        if m and 1 <= int(m.group(1)) <= p:
            e = np.zeros(p)
            e[int(m.group(1)) - 1] = 1.0
            return e
    raise ConfigError(f"field 'directions': cannot interpret vector {token!r}")


def _directions(cfg: RunConfig, model: CovarianceModel):
    out = []
    for d in cfg.directions:
        name = d.get("name") or f"{d['u']},{d['v']}"
        out.append((str(name), _vector(d["u"], model, cfg.r), _vector(d["v"], model, cfg.r)))
    return out


def _sample_sizes(cfg: RunConfig) -> list[int]:
    return list(cfg.n_values) if cfg.n_values else [cfg.n]


# ---------------------------------------------------------------- commands


def cmd_verify_norm(cfg: RunConfig) -> ExperimentReport:
    ps = cfg.p_values or [None]
    cells = []
    for n in _sample_sizes(cfg):
        for p in ps:
            model = _model(cfg.model, cfg, p)
            cells.append((f"p={model.dim},n={n}", model, n))
    return run_operator_norm_experiment(cells, cfg.R, cfg.seed, chi2=(1.0, cells[0][2]), config=cfg.echo())


def cmd_verify_remainder(cfg: RunConfig) -> ExperimentReport:
    model = _model(cfg.model, cfg)
    return run_remainder_concentration_experiment(
        model, cfg.r, _sample_sizes(cfg), cfg.R, _directions(cfg, model), cfg.seed,
        max_nonseparated=cfg.max_nonseparated, config=cfg.echo(),
    )


def cmd_verify_clt(cfg: RunConfig) -> ExperimentReport:
    model = _model(cfg.model, cfg)
    return run_clt_experiment(
        model, cfg.r, cfg.n, cfg.R, _directions(cfg, model), cfg.seed,
        max_nonseparated=cfg.max_nonseparated, config=cfg.echo(),
    )


def cmd_verify_bias(cfg: RunConfig) -> ExperimentReport:
    ps = cfg.p_values or [None]
    models = [_model(cfg.model, cfg, p) for p in ps]
    decomposition = run_bias_experiment(
        models, cfg.r, cfg.n, cfg.R, cfg.seed, max_nonseparated=cfg.max_nonseparated,
    )
    parts = [decomposition]
    if cfg.n_values:
        parts.append(
            run_bias_estimator_experiment(
                models[0], cfg.r, cfg.n_values, cfg.estimator_R, cfg.seed ^ 0xB1A5,
                oracle_R=cfg.oracle_R, max_nonseparated=cfg.max_nonseparated,
            )
        )
    return combine("bias", parts, config=cfg.echo())


def cmd_verify_risk(cfg: RunConfig) -> ExperimentReport:
    model = _model(cfg.model, cfg)
    return run_risk_experiment(model, cfg.r, _sample_sizes(cfg), cfg.R, cfg.seed, config=cfg.echo())


def cmd_recover(cfg: RunConfig) -> ExperimentReport:
    model = _model(cfg.model, cfg)
    return run_support_recovery_experiment(
        model, cfg.r, cfg.t, cfg.n, cfg.R, cfg.seed,
        c_gamma=cfg.c_gamma, calibration_seed=cfg.calibration_seed, calibration_R=cfg.calibration_R,
        n_sweep=cfg.n_values, sweep_R=cfg.sweep_R, config=cfg.echo(),
    )


def _read_input(cfg: RunConfig) -> np.ndarray:
    try:
        return read_csv_matrix(cfg.input)
    except OSError as exc:
        raise UsageError(f"cannot read {cfg.input}: {exc.strerror or exc}") from None
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_decompose(cfg: RunConfig) -> ExperimentReport:
    sigma = _read_input(cfg)
    if sigma.shape[0] != sigma.shape[1]:
        raise UsageError(f"{cfg.input}: expected a square matrix, got {sigma.shape[0]}x{sigma.shape[1]}")
    dec = decompose(sigma, cfg.cluster_tol)
    rep = ExperimentReport("decompose", cfg.seed, cfg.echo())
    for c in dec.clusters:
        try:
            gap = spectral_gap(dec, c.index)
        except ValueError:
            gap = float("nan")
        row = {"r": c.index, "mu": c.value, "m": c.multiplicity, "gap": gap, "contour_error": float("nan")}
        if np.isfinite(gap) and gap > 0:
            # cross-check the eigensolver projector against the resolvent integral
            contour = contour_for_cluster(dec, c.index, cfg.nodes)
            row["contour_error"] = operator_norm(riesz_projector(dec.operator, contour) - c.projector)
        rep.cells.append(row)
    norm = operator_norm(dec.operator)
    rep.stats["operator_norm"] = norm
    rep.stats["effective_rank"] = effective_rank(dec.operator) if norm > 0 else float("nan")
    rep.stats["dim"] = dec.dim
    return rep


def cmd_estimate(cfg: RunConfig) -> ExperimentReport:
    x = _read_input(cfg)
    if x.shape[0] < 2:
        raise UsageError(f"{cfg.input}: need at least 2 data rows, got {x.shape[0]}")
    if x.shape[0] % 2:
        log.warning("odd number of rows (%d); dropping the last row", x.shape[0])
        x = x[:-1]
    n_half = x.shape[0] // 2
    p = x.shape[1]
    rep = ExperimentReport("estimate", cfg.seed, cfg.echo())
    full = decompose(sample_covariance(x), cfg.cluster_tol)
    if len(full) < 2:
        raise DataError("sample covariance has a single eigenvalue cluster; nothing to separate", rep)
    norm = operator_norm(full.operator)
    gap = spectral_gap(full, cfg.r)
    try:
        est = estimate_bias_split(x, cfg.r)
    except ValueError as exc:
        raise DataError(str(exc), rep) from None
    c_gamma = 1.0 if cfg.c_gamma is None else cfg.c_gamma
    beta = threshold_level(norm, gap, cfg.t, p, n_half, c_gamma)
    rep.stats.update(
        {
            "rows_used": int(x.shape[0]),
            "half_size": n_half,
            "plugin_operator_norm": norm,
            "plugin_gap": gap,
            "c_gamma": c_gamma,
            "t": cfg.t,
            "beta": beta,
            "theta_hat": est.theta,
            "b_hat": est.b_hat,
            "inner": est.inner,
            "separated": list(est.separated),
        }
    )
    rep.verdicts.append(Verdict("separated", est.all_separated, float(est.all_separated), "both halves",
                                "plug-in noise level below half the empirical gap"))
    try:
        tt = debiased_eigenvector(est.theta, est.b_hat)
    except ValueError as exc:
        rep.verdicts.append(Verdict("debias_floor", False, 1.0 + est.b_hat, "> 1e-3", str(exc)))
        return rep
    support = recover_support(tt, beta)
    rep.stats.update(
        {
            "theta_tilde": tt,
            "support": [int(j) + 1 for j in support],
            "sparse_estimate": sparse_pca_estimate(tt, support),
        }
    )
    rep.cells = [{"coordinate": j + 1, "theta_hat": est.theta[j], "theta_tilde": tt[j], "selected": bool(j in set(support))}
                 for j in range(p)]
    return rep


HELP = {
    "verify-norm": "operator-norm scaling of the sample covariance error",
    "verify-remainder": "concentration of the projector remainder beyond the linear term",
    "verify-clt": "normal approximation of projector and eigenvector fluctuations",
    "verify-bias": "bias of the empirical projector and the split-sample bias estimator",
    "verify-risk": "eigenvector risk against its first-order prediction",
    "recover": "support recovery by thresholding the debiased eigenvector",
    "estimate": "split-sample eigenvector estimate from a data CSV",
    "decompose": "cluster table of a symmetric matrix CSV",
}

HANDLERS = {
    "verify-norm": cmd_verify_norm,
    "verify-remainder": cmd_verify_remainder,
    "verify-clt": cmd_verify_clt,
    "verify-bias": cmd_verify_bias,
    "verify-risk": cmd_verify_risk,
    "recover": cmd_recover,
    "estimate": cmd_estimate,
    "decompose": cmd_decompose,
}


# ---------------------------------------------------------------- output


def _summary(rep: ExperimentReport, cfg: RunConfig) -> str:
    if cfg.command == "decompose":
        lines = [f"{'r':>3}  {'mu_r':>14}  {'m_r':>4}  {'gap_r':>14}  {'contour_err':>11}"]
        for c in rep.cells:
            lines.append(
                f"{c['r']:>3}  {c['mu']:>14.8g}  {c['m']:>4}  {c['gap']:>14.8g}  {c['contour_error']:>11.2e}"
            )
        lines.append(f"effective rank r(Sigma) = {rep.stats['effective_rank']:.8g}")
        return "\n".join(lines) + "\n"
    if cfg.command == "estimate":
        s = rep.stats
        lines = [
            f"b_hat = {s.get('b_hat', float('nan')):.6g}   beta = {s.get('beta', float('nan')):.6g}"
            f"   plug-in ||Sigma|| = {s.get('plugin_operator_norm', float('nan')):.6g}"
            f"   plug-in gap = {s.get('plugin_gap', float('nan')):.6g}",
        ]
        if "support" in s:
            lines.append("support = {" + ", ".join(str(j) for j in s["support"]) + "}")
        return "\n".join(lines) + "\n" + rep.to_text()
    return rep.to_text()


def write_outputs(rep: ExperimentReport, out: Path, metadata: dict) -> None:
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(rep.to_json())
    (out / "cells.csv").write_text(rep.cells_csv())
    (out / "metadata.json").write_text(json.dumps(metadata, sort_keys=True, indent=2) + "\n")


def run(cfg: RunConfig, out: Path | None = None, quiet: bool = False) -> int:
    """Execute a parsed configuration, write artifacts and return the exit status."""
    started = time.perf_counter()
    status = EXIT_OK
    message = None
    try:
        rep = HANDLERS[cfg.command](cfg)
    except DataError as exc:
        rep, status, message = exc.report, EXIT_FAIL, str(exc)
        rep.verdicts.append(Verdict("data", False, float("nan"), "usable data", message))
    except SeparationError as exc:
        log.error("%s", exc)
        return EXIT_FAIL
    if status == EXIT_OK and not rep.passed:
        status = EXIT_FAIL
        failed = ", ".join(v.name for v in rep.verdicts if not v.passed)
        message = f"failed: {failed}"
    metadata = {
        "version": __version__,
        "command": cfg.command,
        "seed": cfg.seed,
        "started_utc": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "wall_clock_seconds": round(time.perf_counter() - started, 3),
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
    }
    if out is not None:
        try:
            write_outputs(rep, out, metadata)
        except OSError as exc:
            log.error("cannot write outputs to %s: %s", out, exc)
            return EXIT_USAGE
        log.info("wrote %s", out)
    if not quiet:
        sys.stdout.write(_summary(rep, cfg))
    if message:
        log.error("%s", message)
    return status


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="specproj", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"specproj {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for name in COMMANDS:
        p = sub.add_parser(name, help=HELP[name])
        p.add_argument("--config", type=Path, help="JSON configuration file")
        p.add_argument("--seed", type=int, help="64-bit seed (overrides the config)")
        p.add_argument("--out", type=Path, help="output directory for report.json, cells.csv, metadata.json")
        p.add_argument("--quiet", action="store_true", help="no progress on stderr and no summary on stdout")
        p.add_argument("--print-config", action="store_true", help="print the resolved configuration and exit")
        if name in ("estimate", "decompose"):
            p.add_argument("input", nargs="?", help="header-less CSV input (overrides the config)")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        format="specproj: %(message)s",
        stream=sys.stderr,
        force=True,
    )
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if getattr(args, "input", None):
        overrides["input"] = args.input
    if args.out is not None:
        overrides["out"] = str(args.out)
    try:
        text = args.config.read_text() if args.config else "{}"
    except OSError as exc:
        log.error("cannot read config: %s", exc)
        return EXIT_USAGE
    try:
        cfg = parse_config(text, command=args.command, overrides=overrides)
        if args.print_config:
            sys.stdout.write(emit_config(cfg))
            return EXIT_OK
        out = Path(cfg.out) if cfg.out else None
        log.info("running %s (seed %d)", cfg.command, cfg.seed)
        return run(cfg, out, quiet=args.quiet)
    except (ConfigError, UsageError) as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    except ValueError as exc:
        log.error("invalid input: %s", exc)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
