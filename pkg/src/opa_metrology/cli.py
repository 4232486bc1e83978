"""Command-line entry point: run sweeps from TOML configs or bundled presets."""
from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import analytic, config as cfg
from .analytic import ClusterParams, EprParams
from .cluster import ClusterScenario, sweep_cluster_1d, sweep_cluster_2d
from .epr import EprScenario, loss_grid, sweep_epr
from .homodyne import DegenerateEstimatorError
from .plotdata import emit_plotdata

OUT_DIR_ENV = "OPA_METROLOGY_OUT"

log = logging.getLogger("opa_metrology")


def epr_params(c: cfg.SweepConfig) -> EprParams:
    p = c.params
    return EprParams(
        r1=p["r1"], r2=p["r2"], r3=p["r3"], r4=p["r4"],
        alpha1=p["alpha"][0], alpha2=p["alpha"][1],
        beta1=p["beta"][0], beta2=p["beta"][1],
        theta=math.radians(p["theta_deg"]), phi=math.radians(p["phi_deg"]),
        lo_scale=p["lo_scale"],
    )


def cluster_params(c: cfg.SweepConfig) -> ClusterParams:
    p = c.params
    return ClusterParams(
        r=p["r"], r_prime=p["r_prime"], alpha=p["alpha"], beta=p["beta"],
        theta=math.radians(p["theta_deg"]), lo_scale=p["lo_scale"],
    )


def build_table(c: cfg.SweepConfig, threads: int = 1) -> dict[str, np.ndarray]:
    """Run the sweep described by ``c`` and add the dB-relative-to-SNL column."""
    g = c.grid
    grid = loss_grid(g.start, g.stop, g.step)
    columns = c.columns.enabled()
    if c.scenario == "epr":
        table = sweep_epr(EprScenario(epr_params(c), grid, c.convention, columns), threads)
        pairs = [("sigma_opa", "sigma_snl", "db_opa_vs_snl")]
    else:
        sc = ClusterScenario(
            cluster_params(c), grid, c.convention,
            modes=tuple(g.modes) if c.scenario == "cluster-2d" else None,
            fixed_eta=tuple(g.fixed_eta) if g.fixed_eta else (0.5,) * 4,
            columns=columns,
        )
        if c.scenario == "cluster-1d":
            table = sweep_cluster_1d(sc, threads)
            pairs = [("sigma1_opa", "sigma1_snl", "db1_opa_vs_snl"),
                     ("sigma_ave_opa", "sigma_ave_snl", "db_ave_opa_vs_snl")]
        else:
            table = sweep_cluster_2d(sc, threads)
            pairs = [("sigma_ave_opa", "sigma_ave_snl", "db_ave_opa_vs_snl")]
    for num, den, name in pairs:
        if num in table and den in table:
            with np.errstate(divide="ignore", invalid="ignore"):
                table[name] = 20 * np.log10(table[num] / table[den])
    return table


def crossover(loss, worse, ref):
    """First loss at which ``worse`` rises above ``ref``, linearly interpolated."""
    diff = np.asarray(worse) - np.asarray(ref)
    above = np.flatnonzero(np.isfinite(diff) & (diff > 0))
    if not len(above) or above[0] == 0:
        return None
    i = above[0]
    x0, x1, d0, d1 = loss[i - 1], loss[i], diff[i - 1], diff[i]
    return float(x0 + (x1 - x0) * (-d0) / (d1 - d0))


def summarize(table) -> list[str]:
    lines = []
    for name, col in table.items():
        if not name.startswith("sigma"):
            continue
        finite = col[np.isfinite(col)]
        if finite.size:
            lines.append(f"{name}: min {finite.min():.6g}  max {finite.max():.6g}")
        else:
            lines.append(f"{name}: no finite values")
    if "loss" in table:
        for prefix in ("sigma_", "sigma1_", "sigma_ave_"):
            a, b = f"{prefix}noopa", f"{prefix}snl"
            if a in table and b in table:
                x = crossover(table["loss"], table[a], table[b])
                if x is not None:
                    lines.append(f"{a} exceeds {b} above loss {x:.4f}")
    return lines


def report_text(c: cfg.SweepConfig) -> str:
    try:
        if c.scenario == "epr":
            items = analytic.discrepancies(epr=epr_params(c))
        else:
            items = analytic.discrepancies(cluster=cluster_params(c))
    except DegenerateEstimatorError as exc:
        return f"report unavailable: {exc}\n"
    return analytic.format_report(items)


def run(c: cfg.SweepConfig, out_dir, threads: int = 1) -> tuple[int, list[Path]]:
    """Run a validated config; return (warning count, written files)."""
    out_dir = Path(out_dir)
    table = build_table(c, threads)
    warnings = 0
    for name, col in table.items():
        bad = int(np.sum(~np.isfinite(col)))
        if bad:
            warnings += bad
            log.warning("%s: %d degenerate point(s) written as empty fields", name, bad)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    path = out_dir / f"{c.output.name}.{c.output.format}"
    emit_plotdata(table, path, c.output.format, c.output.log_sigma)
    written.append(path)
    if c.output.format != "csv":
        path = out_dir / f"{c.output.name}.csv"
        emit_plotdata(table, path, "csv")
        written.append(path)
    if c.columns.as_printed:
        path = out_dir / f"{c.output.name}.discrepancies.txt"
        path.write_text(report_text(c), encoding="utf-8")
        written.append(path)
    for line in summarize(table):
        print(line)
    return warnings, written


def _resolve(args) -> cfg.SweepConfig:
    if args.config is None and args.preset is None:
        raise cfg.ConfigError("give a config file or --preset NAME")
    data = cfg.read_toml(cfg.preset_text(args.preset)) if args.preset else {}
    if args.config is not None:
        try:
            text = Path(args.config).read_text(encoding="utf-8")
        except OSError as exc:
            raise cfg.ConfigError(f"cannot read config {args.config}: {exc.strerror}") from exc
        for key, value in cfg.read_toml(text).items():
            if isinstance(value, dict) and isinstance(data.get(key), dict):
                data[key] = {**data[key], **value}
            else:
                data[key] = value
    if args.convention:
        data["convention"] = args.convention
    if args.format:
        data.setdefault("output", {})["format"] = args.format
    return cfg.from_dict(data)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="opa-metrology",
        description="Loss sweeps of multi-phase estimation sensitivity with OPA-amplified EPR and cluster states.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a sweep and write CSV/SVG output")
    p_run.add_argument("config", nargs="?", help="TOML config file (overrides --preset values)")
    p_run.add_argument("--preset", help="start from a bundled preset")
    p_run.add_argument("--out", help=f"output directory (default: ${OUT_DIR_ENV} or .)")
    p_run.add_argument("--format", choices=cfg.FORMATS)
    p_run.add_argument("--convention", choices=cfg.CONVENTIONS)
    p_run.add_argument("--threads", type=int, default=1)

    p_presets = sub.add_parser("presets", help="list or show bundled presets")
    p_presets.add_argument("action", choices=("list", "show"))
    p_presets.add_argument("name", nargs="?")

    p_val = sub.add_parser("validate", help="check a config and print it with defaults filled in")
    p_val.add_argument("config")

    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")

    try:
        if args.command == "presets":
            if args.action == "list":
                for name in cfg.preset_names():
                    print(name)
            else:
                if not args.name:
                    raise cfg.ConfigError("presets show needs a preset name")
                print(cfg.dump_config(cfg.load_preset(args.name)), end="")
            return 0
        if args.command == "validate":
            try:
                c = cfg.load_config(args.config)
            except OSError as exc:
                raise cfg.ConfigError(f"cannot read config {args.config}: {exc.strerror}") from exc
            print(cfg.dump_config(c), end="")
            return 0
        if args.threads < 1:
            raise cfg.ConfigError(f"--threads must be at least 1, got {args.threads}")
        c = _resolve(args)
        out = args.out or os.environ.get(OUT_DIR_ENV) or "."
        try:
            warnings, written = run(c, out, args.threads)
        except OSError as exc:
            print(f"error: cannot write output in {out}: {exc}", file=sys.stderr)
            return 1
        for path in written:
            print(f"wrote {path}")
        if warnings:
            print(f"{warnings} warning(s)", file=sys.stderr)
        return 0
    except cfg.ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
