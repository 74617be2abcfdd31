"""Command-line pipeline: ingest, metrics, simulate, validate, fit-tau.

Every command is deterministic given its inputs, flags, and seed;
re-running writes byte-identical files. Reports echo the effective
configuration and the sha256 of every input file so emitted numbers are
traceable to a specific extract. No timestamps, no machine state.

Exit codes: 0 success, 2 usage/config errors, and one documented code
per domain error class (see errors.py).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from . import fileio
from .errors import DegenerateInput, EcomplexError, ParseError
from .matrix import BinaryMatrix, ExportMatrix, binarize, prune_degenerate, rca_binarize
from .metrics import (
    CountryMetrics,
    ProductMetrics,
    eci_pci,
    fitness_complexity,
    tdi,
    tsi,
)
from .model import ModelParams, estimate_tau, simulate_world, world_distribution
from .validation import join_panel, rank_transform, run_paper_regressions

__all__ = ["RunConfig", "main", "entry",
           "cmd_ingest", "cmd_metrics", "cmd_simulate", "cmd_validate", "cmd_fit_tau"]

DATA_DIR_ENV = "ECOMPLEX_DATA_DIR"


@dataclass(frozen=True)
class RunConfig:
    """Effective run configuration after merging flags, config file, defaults."""

    filter: str = "none"
    rca_threshold: float = 1.0
    tol: float = 1e-10
    max_iter: int = 10000
    tau: float = 0.07
    K: int = 221
    seed: int = 0
    mode: str = "mc"
    samples: int = 5000
    out_dir: str = "."
    format: str = "csv"

    def __post_init__(self):
        if self.filter not in ("none", "rca"):
            raise ValueError(f"filter must be none or rca, got {self.filter!r}")
        if self.mode not in ("exact", "mc"):
            raise ValueError(f"mode must be exact or mc, got {self.mode!r}")
        if self.format not in ("csv", "json"):
            raise ValueError(f"format must be csv or json, got {self.format!r}")
        if self.rca_threshold < 0:
            raise ValueError("rca-threshold must be >= 0")
        if self.tol <= 0:
            raise ValueError("tol must be > 0")
        if self.max_iter < 1:
            raise ValueError("max-iter must be >= 1")
        if not (0 < self.tau <= 1):
            raise ValueError("tau must be in (0, 1]")
        if self.K < 0:
            raise ValueError("K must be >= 0")
        if self.samples < 1:
            raise ValueError("samples must be >= 1")


def _merge_config(args: argparse.Namespace) -> RunConfig:
    """flags > config file > defaults."""
    merged: dict = {}
    config_path = getattr(args, "config", None)
    if config_path:
        try:
            loaded = json.loads(Path(_resolve_input(config_path)).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ParseError(f"config file is not valid JSON: {exc}") from None
        if not isinstance(loaded, dict):
            raise ParseError("config file must hold a JSON object")
        known = {f.name for f in fields(RunConfig)}
        for key, value in loaded.items():
            if key not in known:
                raise ParseError(f"unknown config key {key!r}")
            merged[key] = value
    for f in fields(RunConfig):
        flag_value = getattr(args, f.name, None)
        if flag_value is not None:
            merged[f.name] = flag_value
    return RunConfig(**merged)


def _resolve_input(path: str) -> str:
    """Relative input paths fall back to $ECOMPLEX_DATA_DIR when not found."""
    p = Path(path)
    if p.exists() or p.is_absolute():
        return str(p)
    base = os.environ.get(DATA_DIR_ENV)
    if base:
        candidate = Path(base) / p
        if candidate.exists():
            return str(candidate)
    return str(p)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    return obj


def _write_json(path: Path, payload: dict) -> None:
    text = json.dumps(_jsonable(payload), indent=2, sort_keys=True)
    path.write_text(text + "\n", encoding="utf-8")


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    def cell(v) -> str:
        if v is None:
            return ""
        if isinstance(v, str):
            return v
        if isinstance(v, (int, np.integer)):
            return str(int(v))
        return repr(float(v))

    lines = [",".join(header)]
    lines.extend(",".join(cell(v) for v in row) for row in rows)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _write_table(path_stem: Path, fmt: str, header: list[str], rows: list[list]) -> Path:
    if fmt == "csv":
        path = path_stem.with_suffix(".csv")
        _write_csv(path, header, rows)
    else:
        path = path_stem.with_suffix(".json")
        records = [dict(zip(header, row)) for row in rows]
        _write_json(path, {"rows": records})
    return path


def _out_dir(config: RunConfig) -> Path:
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _config_echo(config: RunConfig) -> dict:
    return asdict(config)


def _load_binary(config: RunConfig, matrix_path: str) -> tuple[BinaryMatrix, str]:
    resolved = _resolve_input(matrix_path)
    mat = fileio.read_matrix(resolved)
    if isinstance(mat, ExportMatrix):
        if config.filter == "rca":
            bm = rca_binarize(mat, config.rca_threshold)
        else:
            bm = binarize(mat)
    else:
        if config.filter == "rca":
            raise ParseError("the rca filter needs a valued matrix file; "
                             "this one is already binary")
        bm = mat
    return prune_degenerate(bm), resolved


def cmd_ingest(args) -> int:
    config = _merge_config(args)
    out = _out_dir(config)
    resolved = _resolve_input(args.trade_csv)
    x = fileio.read_trade_csv(resolved)
    matrix_path = out / "matrix.txt"
    fileio.write_matrix(x, matrix_path)
    cells = x.n_countries * x.n_products
    fill = len(x.vals) / cells if cells else 0.0
    report = {
        "config": _config_echo(config),
        "inputs": {resolved: fileio.sha256_file(resolved)},
        "matrix": {
            "countries": x.n_countries,
            "products": x.n_products,
            "entries": int(len(x.vals)),
            "fill": fill,
        },
        "output": matrix_path.name,
    }
    _write_json(out / "ingest_report.json", report)
    print(f"countries={x.n_countries} products={x.n_products} "
          f"entries={len(x.vals)} fill={fill:.4f}")
    print(f"wrote {matrix_path}")
    return 0


def cmd_metrics(args) -> int:
    config = _merge_config(args)
    out = _out_dir(config)
    bm, resolved = _load_binary(config, args.matrix)

    errors: dict[str, str] = {}
    tdi_v = tsi_v = eci_v = pci_v = f_v = q_v = None
    eigen = None
    iters = None
    first_error: EcomplexError | None = None

    try:
        tdi_v = tdi(bm)
    except EcomplexError as exc:
        errors["tdi"] = f"{type(exc).__name__}: {exc}"
        first_error = first_error or exc
    try:
        tsi_v = tsi(bm)
    except EcomplexError as exc:
        errors["tsi"] = f"{type(exc).__name__}: {exc}"
        first_error = first_error or exc
    try:
        eci_v, pci_v, eigen = eci_pci(bm)
    except EcomplexError as exc:
        errors["eci_pci"] = f"{type(exc).__name__}: {exc}"
        first_error = first_error or exc
    try:
        f_v, q_v, iters = fitness_complexity(bm, tol=config.tol,
                                             max_iter=config.max_iter)
    except EcomplexError as exc:
        errors["fitness"] = f"{type(exc).__name__}: {exc}"
        first_error = first_error or exc

    def col(vec, i):
        return None if vec is None else float(vec[i])

    c_rows = [
        [lab, int(bm.diversification[i]), col(tdi_v, i), col(eci_v, i), col(f_v, i)]
        for i, lab in enumerate(bm.country_labels)
    ]
    p_rows = [
        [lab, int(bm.ubiquity[j]), col(tsi_v, j), col(pci_v, j), col(q_v, j)]
        for j, lab in enumerate(bm.product_labels)
    ]
    c_path = _write_table(out / "countries", config.format,
                          ["country", "d", "tdi", "eci", "fitness"], c_rows)
    p_path = _write_table(out / "products", config.format,
                          ["product", "u", "tsi", "pci", "q"], p_rows)

    report = {
        "config": _config_echo(config),
        "inputs": {resolved: fileio.sha256_file(resolved)},
        "matrix": {
            "countries": bm.n_countries,
            "products": bm.n_products,
            "entries": bm.n_entries,
        },
        "errors": errors,
        "eigen": None if eigen is None else {
            "leading_eigenvalue": eigen.leading_eigenvalue,
            "second_eigenvalue": eigen.second_eigenvalue,
            "eci_sign_flipped": eigen.eci_sign_flipped,
            "pci_sign_flipped": eigen.pci_sign_flipped,
            "solver": eigen.solver,
        },
        "fitness_iterations": iters,
        "outputs": [c_path.name, p_path.name],
    }
    _write_json(out / "metrics_report.json", report)
    print(f"wrote {c_path} {p_path}")

    all_failed = all(v is None for v in (tdi_v, tsi_v, eci_v, f_v))
    if all_failed and first_error is not None:
        print(f"error: every metric family failed: {first_error}", file=sys.stderr)
        return first_error.exit_code
    return 0


def cmd_simulate(args) -> int:
    config = _merge_config(args)
    out = _out_dir(config)
    params = ModelParams(tau=config.tau, K=config.K)
    world = simulate_world(params, mode="exact" if config.mode == "exact" else "monte_carlo",
                           samples=config.samples, seed=config.seed)
    matrix_path = out / "world.txt"
    fileio.write_matrix(world.matrix, matrix_path)

    predicted = world_distribution(params)
    pool = world.sophistication_counts("pool")
    per_country = world.sophistication_counts("per_country")
    pool_share = pool / pool.sum() if pool.sum() else pool
    pc_share = per_country / per_country.sum() if per_country.sum() else per_country
    rows = [
        [int(s), float(predicted.probabilities[s]), float(pool_share[s]),
         float(pc_share[s]), int(pool[s]), int(per_country[s])]
        for s in range(config.K + 1)
    ]
    hist_path = out / "sophistication.csv"
    _write_csv(hist_path,
               ["s", "predicted", "empirical_pool", "empirical_per_country",
                "count_pool", "count_per_country"],
               rows)

    report = {
        "config": _config_echo(config),
        "inputs": {},
        "world": {
            "countries": world.matrix.n_countries,
            "products": world.matrix.n_products,
            "entries": world.matrix.n_entries,
        },
        "diversification": world.matrix.diversification,
        "outputs": [matrix_path.name, hist_path.name],
    }
    _write_json(out / "simulate_report.json", report)
    print(f"wrote {matrix_path} {hist_path}")
    return 0


def cmd_validate(args) -> int:
    config = _merge_config(args)
    out = _out_dir(config)
    bm, resolved_matrix = _load_binary(config, args.matrix)
    resolved_income = _resolve_input(args.income_csv)
    panel = fileio.read_income_csv(resolved_income)

    tdi_v = tdi(bm)
    tsi_v = tsi(bm)
    eci_v, pci_v, eigen = eci_pci(bm)
    f_v, q_v, iters = fitness_complexity(bm, tol=config.tol, max_iter=config.max_iter)
    cm = CountryMetrics(bm.country_labels, bm.diversification.copy(),
                        tdi_v, eci_v, f_v)
    pm = ProductMetrics(bm.product_labels, bm.ubiquity.copy(), tsi_v, pci_v, q_v)

    rep = run_paper_regressions(bm, panel, cm, pm)

    def reg_block(block: dict) -> dict:
        payload = {}
        for key, val in block.items():
            if key == "closer_to_benchmark":
                payload[key] = val
            else:
                payload[key] = {
                    "coefficients": val.coefficients,
                    "standard_errors": val.standard_errors,
                    "p_values": val.p_values,
                    "r_squared": val.r_squared,
                    "intercept_included": val.intercept_included,
                }
        return payload

    def corr_block(c) -> dict:
        return {"statistic": c.statistic, "method": c.method, "n": c.n}

    report = {
        "config": _config_echo(config),
        "inputs": {
            resolved_matrix: fileio.sha256_file(resolved_matrix),
            resolved_income: fileio.sha256_file(resolved_income),
        },
        "join": {
            "matched": list(rep.join.matched),
            "unmatched_matrix": list(rep.join.unmatched_matrix),
            "unmatched_panel": list(rep.join.unmatched_panel),
        },
        "rent_offset": rep.rent_offset,
        "regressions": {
            "rank_rank": reg_block(rep.rank_rank),
            "log_log": reg_block(rep.log_log),
            "eci_on_tdi": reg_block(rep.eci_on_tdi),
            "fitness_on_dlogd": reg_block(rep.fitness_on_dlogd),
        },
        "spearman_gdp_d": corr_block(rep.spearman_gdp_d),
        "product_spearman": {k: corr_block(v) for k, v in rep.product_spearman.items()},
        "eigen": {
            "leading_eigenvalue": eigen.leading_eigenvalue,
            "second_eigenvalue": eigen.second_eigenvalue,
        },
        "fitness_iterations": iters,
    }
    _write_json(out / "validation_report.json", report)

    # Scatter tables for the joined sample, plot-ready.
    m_idx, p_idx, _ = join_panel(bm, panel)
    labels = [bm.country_labels[i] for i in m_idx]
    d = bm.diversification[m_idx].astype(float)
    gdp = np.asarray(panel.gdp, dtype=float)[p_idx]
    rents = np.asarray(panel.natural_rents, dtype=float)[p_idx]
    rank_gdp = rank_transform(gdp, reversed=True)
    rank_d = rank_transform(d, reversed=True)
    rank_rents = rank_transform(rents, reversed=True)
    _write_csv(out / "rank_rank.csv",
               ["country", "rank_gdp", "rank_d", "rank_rents"],
               [[lab, float(rank_gdp[i]), float(rank_d[i]), float(rank_rents[i])]
                for i, lab in enumerate(labels)])
    _write_csv(out / "log_log.csv",
               ["country", "log_gdp", "log_d", "log_rents_offset"],
               [[lab, float(np.log(gdp[i])), float(np.log(d[i])),
                 float(np.log(rents[i] + rep.rent_offset))]
                for i, lab in enumerate(labels)])
    _write_csv(out / "eci_tdi.csv",
               ["country", "tdi", "eci"],
               [[lab, float(cm.tdi[m_idx[i]]), float(cm.eci[m_idx[i]])]
                for i, lab in enumerate(labels)])
    dlogd = d * np.log(d)
    if dlogd.mean() > 0:
        dlogd = dlogd / dlogd.mean()
    _write_csv(out / "fitness_dlogd.csv",
               ["country", "dlogd_norm", "fitness"],
               [[lab, float(dlogd[i]), float(cm.fitness[m_idx[i]])]
                for i, lab in enumerate(labels)])
    _write_csv(out / "product_scatter.csv",
               ["product", "tsi", "pci", "q"],
               [[lab, float(pm.tsi[j]), float(pm.pci[j]), float(pm.q[j])]
                for j, lab in enumerate(bm.product_labels)])
    print(f"wrote {out / 'validation_report.json'} and scatter tables")
    return 0


def cmd_fit_tau(args) -> int:
    config = _merge_config(args)
    out = _out_dir(config)
    resolved = _resolve_input(args.metrics_csv)
    tsi_values = _read_tsi_column(resolved)
    tau_hat, ks = estimate_tau(tsi_values, config.K)

    dist = world_distribution(ModelParams(tau=tau_hat, K=config.K))
    x = dist.standardized_support
    model_cdf = dist.cdf()
    sample = np.sort(np.asarray(tsi_values))
    emp_cdf = np.searchsorted(sample, x, side="right") / len(sample)
    _write_csv(out / "tau_cdf.csv",
               ["x", "model_cdf", "empirical_cdf"],
               [[float(x[s]), float(model_cdf[s]), float(emp_cdf[s])]
                for s in range(len(x))])

    report = {
        "config": _config_echo(config),
        "inputs": {resolved: fileio.sha256_file(resolved)},
        "tau_hat": tau_hat,
        "ks_distance": ks,
        "n": int(len(tsi_values)),
        "outputs": ["tau_cdf.csv"],
    }
    _write_json(out / "tau_report.json", report)
    print(f"tau_hat={tau_hat} ks={ks:.6f}")
    return 0


def _read_tsi_column(path: str) -> np.ndarray:
    """Pull the tsi column out of a metrics products table (csv or json)."""
    import csv as _csv

    values: list[float] = []
    if path.endswith(".json"):
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        rows = payload.get("rows", payload if isinstance(payload, list) else [])
        for row in rows:
            v = row.get("tsi")
            if v is not None:
                values.append(float(v))
    else:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = _csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise ParseError("empty file", 1) from None
            if "tsi" not in header:
                raise ParseError("no tsi column in header", 1)
            idx = header.index("tsi")
            for lineno, row in enumerate(reader, start=2):
                if not row:
                    continue
                if idx >= len(row):
                    raise ParseError("short row", lineno)
                if row[idx] != "":
                    values.append(_parse_float(row[idx], lineno))
    if len(values) < 2:
        raise DegenerateInput("need at least two tsi values")
    return np.asarray(values)


def _parse_float(text: str, lineno: int) -> float:
    try:
        return float(text)
    except ValueError:
        raise ParseError(f"cannot parse value {text!r}", lineno) from None


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file with default option values")
    p.add_argument("--out-dir", dest="out_dir", help="output directory (default .)")
    p.add_argument("--format", dest="format", choices=["csv", "json"],
                   help="table format (default csv)")


def _add_filter(p: argparse.ArgumentParser) -> None:
    p.add_argument("--filter", choices=["none", "rca"],
                   help="binarization filter (default none)")
    p.add_argument("--rca-threshold", dest="rca_threshold", type=float,
                   help="RCA cutoff when --filter rca (default 1.0)")


def _add_fitness(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tol", type=float, help="fitness convergence tolerance")
    p.add_argument("--max-iter", dest="max_iter", type=int,
                   help="fitness iteration cap")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ecomplex",
        description="Economic-complexity metrics, a combinatorial knowhow "
                    "model, and the validation harness tying them together.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="trade CSV -> canonical matrix file")
    p.add_argument("trade_csv")
    _add_common(p)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("metrics", help="canonical matrix -> metric tables")
    p.add_argument("matrix")
    _add_common(p)
    _add_filter(p)
    _add_fitness(p)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("simulate", help="synthetic world + sophistication table")
    _add_common(p)
    p.add_argument("--tau", type=float, help="coherence probability (default 0.07)")
    p.add_argument("--K", type=int, help="maximum tech endowment (default 221)")
    p.add_argument("--seed", type=int, help="generator seed (default 0)")
    p.add_argument("--mode", choices=["exact", "mc"],
                   help="exact subset enumeration (K <= 20) or Monte Carlo")
    p.add_argument("--samples", type=int, help="Monte Carlo sample count")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("validate", help="regression/correlation battery")
    p.add_argument("matrix")
    p.add_argument("income_csv")
    _add_common(p)
    _add_filter(p)
    _add_fitness(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("fit-tau", help="estimate tau from a products table")
    p.add_argument("metrics_csv")
    _add_common(p)
    p.add_argument("--K", type=int, help="maximum tech endowment (default 221)")
    p.set_defaults(func=cmd_fit_tau)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except EcomplexError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    raise SystemExit(main())
