"""Command-line entry point.

Subcommands: convert, trace, sweep, compare, cnn-eval, calibrate.
Every subcommand accepts `--out PATH` (format chosen by extension:
.json, .csv, anything else = aligned text) plus `--format` to override,
and writes a `<out>.manifest.json` sidecar recording the command line,
config hashes, seed, and tool version.  Output bytes are deterministic
for a fixed command line and seed.
"""

from __future__ import annotations

import csv
import io
import json
import sys
from dataclasses import replace
from pathlib import Path

import click

from . import __version__, analog, metrics, sysmodel
from .costmodel import compare as compare_designs
from .costmodel import shipped_constants
from .errors import AgniError
from .manifest import build_manifest, write_output
from .numformat import StochasticWord
from .pipeline import TileConfig, convert as run_convert
from .schedule import SignalSchedule, default_schedule

BACKEND_ALIASES = {
    "agni": "AGNI",
    "ppc": "ParallelPC",
    "parallelpc": "ParallelPC",
    "spc": "SerialPC",
    "serialpc": "SerialPC",
}


def _fail(message: str) -> None:
    click.echo(json.dumps({"error": message}), err=True)
    sys.exit(1)


def _load_schedule(path: str | None) -> SignalSchedule:
    if path is None:
        return default_schedule()
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        return SignalSchedule.from_json(text)
    return SignalSchedule.from_text(text)


def _csv_from_rows(rows: list[dict]) -> str:
    buf = io.StringIO()
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    return buf.getvalue()


def _table_from_rows(rows: list[dict]) -> str:
    if not rows:
        return ""
    cols = list(rows[0])
    cells = [[_fmt(r[c]) for c in cols] for r in rows]
    widths = [max(len(cols[i]), max(len(row[i]) for row in cells)) for i in range(len(cols))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(cols, widths))]
    for row in cells:
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)))
    return "\n".join(lines) + "\n"


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def _emit(payload: dict, rows: list[dict], out: str | None, fmt: str | None,
          seed=None, config_paths=()) -> None:
    """Render as json/csv/table and write to --out (with manifest) or stdout."""
    if fmt is None:
        if out is None:
            fmt = "table"
        else:
            suffix = Path(out).suffix.lower()
            fmt = {"json": "json", ".json": "json", ".csv": "csv"}.get(suffix, "table")
    if fmt == "json":
        data = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    elif fmt == "csv":
        data = _csv_from_rows(rows)
    else:
        data = _table_from_rows(rows)
    if out is None:
        click.echo(data, nl=False)
    else:
        manifest = build_manifest(sys.argv[1:], seed=seed, config_paths=config_paths)
        write_output(out, data, manifest)


format_option = click.option(
    "--format", "fmt", type=click.Choice(["json", "csv", "table"]), default=None,
    help="Output format (default: by --out extension, else table).",
)
out_option = click.option("--out", default=None, help="Output file path.")


@click.group()
@click.version_option(__version__)
def main():
    """Stochastic-to-binary conversion simulator and cost models."""


def _tile_config(n, schedule_path, sigma, seed) -> tuple[TileConfig, list]:
    params = analog.default_params()
    if sigma is not None:
        params = replace(params, noise_sigma_mv=sigma)
    if seed is not None:
        params = replace(params, rng_seed=seed)
    cfg = TileConfig(n=n, analog=params, schedule=_load_schedule(schedule_path))
    return cfg, ([schedule_path] if schedule_path else [])


@main.command()
@click.option("--n", type=int, required=True, help="Operand length (BLgroup size).")
@click.option("--operand", required=True, help="Bit string, index0=left.")
@click.option("--trace", "trace_path", default=None,
              help="Also write the waveform trace (CSV or JSON by extension).")
@click.option("--schedule", "schedule_path", default=None,
              help="Custom schedule file (JSON or `t signal edge` lines).")
@click.option("--sigma", type=float, default=None, help="Comparator noise (mV).")
@click.option("--seed", type=int, default=None)
@out_option
@format_option
def convert(n, operand, trace_path, schedule_path, sigma, seed, out, fmt):
    """Convert one stochastic operand and report the binary result."""
    try:
        cfg, cfg_paths = _tile_config(n, schedule_path, sigma, seed)
        word = StochasticWord.from_string(operand)
        result = run_convert(cfg, word, trace=trace_path is not None)
        if trace_path is not None:
            wave = result.trace
            data = (wave.to_json() + "\n"
                    if trace_path.endswith(".json") else wave.to_csv())
            write_output(trace_path, data,
                         build_manifest(sys.argv[1:], seed=seed,
                                        config_paths=cfg_paths))
        payload = result.to_dict()
        _emit(payload, [payload], out, fmt, seed=seed, config_paths=cfg_paths)
    except (AgniError, ValueError) as exc:
        _fail(str(exc))


@main.command()
@click.option("--n", type=int, required=True)
@click.option("--operand", required=True)
@click.option("--schedule", "schedule_path", default=None)
@click.option("--sigma", type=float, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--step", type=float, default=0.25, help="Sample step (ns).")
@out_option
@format_option
def trace(n, operand, schedule_path, sigma, seed, step, out, fmt):
    """Emit the sampled waveform trace of one conversion."""
    try:
        cfg, cfg_paths = _tile_config(n, schedule_path, sigma, seed)
        cfg = replace(cfg, trace_step_ns=step)
        result = run_convert(cfg, StochasticWord.from_string(operand), trace=True)
        wave = result.trace
        rows = [
            {"t_ns": f"{t:.2f}", "series": name, "value": f"{v:.9g}"}
            for name in sorted(wave.series)
            for t, v in zip(wave.times, wave.series[name])
        ]
        payload = json.loads(wave.to_json())
        _emit(payload, rows, out, fmt or ("csv" if out is None else None),
              seed=seed, config_paths=cfg_paths)
    except (AgniError, ValueError) as exc:
        _fail(str(exc))


@main.command()
@click.option("--n", type=int, required=True)
@click.option("--exhaustive", is_flag=True, help="Enumerate all 2^N operands.")
@click.option("--samples", type=int, default=None, help="Random sample count.")
@click.option("--sigma", type=float, default=None, help="Comparator noise (mV).")
@click.option("--fit-sigma", "do_fit", is_flag=True,
              help="Search the noise level reproducing the reported MAPE.")
@click.option("--seed", type=int, default=None)
@click.option("--workers", type=int, default=1,
              help="Chunk count; results are independent of this value.")
@click.option("--force", is_flag=True, help="Allow exhaustive sweeps above N=16.")
@click.option("--schedule", "schedule_path", default=None)
@out_option
@format_option
def sweep(n, exhaustive, samples, sigma, do_fit, seed, workers, force,
          schedule_path, out, fmt):
    """Sweep the operand space and report MAE / MAPE / RMSE."""
    try:
        if sigma is not None and do_fit:
            raise click.UsageError("--sigma and --fit-sigma are exclusive")
        mode = "exhaustive" if exhaustive or samples is None else samples
        cfg, cfg_paths = _tile_config(n, schedule_path, sigma, seed)
        if do_fit:
            fit = metrics.fit_sigma(cfg, mode=mode, seed=seed)
            report = fit.report
            payload = report.to_dict() | {
                "fitted_sigma_mv": fit.sigma_mv,
                "target_mape_pct": fit.target_mape_pct,
                "fit_iterations": fit.iterations,
            }
        else:
            report = metrics.sweep(cfg, mode=mode, seed=seed,
                                   workers=workers, force=force)
            payload = report.to_dict()
        _emit(payload, [payload], out, fmt, seed=seed, config_paths=cfg_paths)
    except (AgniError, ValueError) as exc:
        _fail(str(exc))


@main.command()
@click.option("--n", "n_csv", required=True,
              help="Comma-separated BLgroup sizes, e.g. 16,32,64,128,256.")
@out_option
@format_option
def compare(n_csv, out, fmt):
    """Compare area / latency / energy of the three converter designs."""
    try:
        n_list = [int(x) for x in n_csv.split(",") if x]
        rows_obj = compare_designs(n_list, shipped_constants())
        rows = []
        for row in rows_obj:
            for design, rep in row.reports.items():
                d = rep.to_dict()
                if design != "AGNI":
                    area, al, edp = row.ratios[design]
                    d |= {"agni_adv_area": area, "agni_adv_area_latency": al,
                          "agni_adv_edp": edp}
                else:
                    d |= {"agni_adv_area": 1.0, "agni_adv_area_latency": 1.0,
                          "agni_adv_edp": 1.0}
                rows.append(d)
        payload = {"rows": [r.to_dict() for r in rows_obj]}
        _emit(payload, rows, out, fmt)
    except (AgniError, ValueError) as exc:
        _fail(str(exc))


@main.command(name="cnn-eval")
@click.option("--models", "models_dir", default=None,
              help="Directory of model spec JSONs (default: shipped four CNNs).")
@click.option("--backend", "backends_csv", default="agni,ppc,spc",
              help="Comma-separated back-ends: agni, ppc, spc.")
@click.option("--n", type=int, default=sysmodel.DEFAULT_SYSTEM_N)
@click.option("--tiles", type=int, default=sysmodel.DEFAULT_TILES)
@click.option("--l", "l_", type=int, default=512, help="Bitlines per tile.")
@out_option
@format_option
def cnn_eval(models_dir, backends_csv, n, tiles, l_, out, fmt):
    """Estimate CNN StoB-phase latency and EDP per back-end."""
    try:
        if models_dir is None:
            models = [sysmodel.builtin_model(m) for m in sysmodel.BUILTIN_MODELS]
            cfg_paths = []
        else:
            models = sysmodel.load_models_dir(models_dir)
            cfg_paths = sorted(str(p) for p in Path(models_dir).glob("*.json"))
        backends = []
        for b in backends_csv.split(","):
            key = b.strip().lower()
            if key not in BACKEND_ALIASES:
                raise click.UsageError(f"unknown backend {b!r}")
            backends.append(BACKEND_ALIASES[key])
        variants = [
            sysmodel.PimSystemConfig(backend=b, tiles=tiles, l=l_, n=n,
                                     constants=shipped_constants())
            for b in backends
        ]
        rep = sysmodel.report(models, variants)
        rows = [
            {
                "backend": b,
                "model": m,
                "latency_ns": rep.latency_ns[(b, m)],
                "latency_normalized": rep.latency_normalized[(b, m)],
                "edp_normalized": rep.edp_normalized[(b, m)],
            }
            for b in rep.backends
            for m in rep.models
        ]
        _emit(rep.to_dict(), rows, out, fmt, config_paths=cfg_paths)
    except (AgniError, ValueError) as exc:
        _fail(str(exc))


@main.command()
@click.option("--mode", type=click.Choice(["auto", "global", "per_n"]),
              default="auto")
@click.option("--target", "extra_targets", multiple=True,
              help="Extra N=mV target, e.g. --target 4=514.")
@click.option("--only-n4", is_flag=True,
              help="Fit only the N=4 single-point anchor.")
@out_option
@format_option
def calibrate(mode, extra_targets, only_n4, out, fmt):
    """Fit lane-charging parameters to the measured V_MAX targets."""
    try:
        if only_n4:
            targets = {4: analog.N4_VMAX_MV}
        else:
            targets = dict(analog.MEASURED_VMAX_MV)
        for t in extra_targets:
            k, v = t.split("=")
            targets[int(k)] = float(v)
        result = analog.calibrate(targets, mode=mode)
        rows = [
            {
                "n": n_,
                "target_mv": targets[n_],
                "model_mv": result.vmax_mv(n_),
                "residual_pct": result.residuals_pct[n_],
            }
            for n_ in sorted(targets)
        ]
        _emit(result.to_dict(), rows, out, fmt)
    except (AgniError, ValueError) as exc:
        _fail(str(exc))


if __name__ == "__main__":
    main()
