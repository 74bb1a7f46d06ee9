"""Command-line interface.

Commands mirror the pipeline stages: ``dataset gen``/``dataset split``,
``codebook gen``/``codebook calibrate``, ``train``, ``eval``, ``sweep-bits``,
``latency``, ``export-cdf``, and ``pipeline`` for an end-to-end seeded run.
Global options (``--seed``, ``--geometry``, ``--grid-step``, ``--config``)
set shared defaults; a flat JSON config file supplies any pipeline key, with
explicit command options taking precedence.  Failures exit nonzero after
printing a single-line JSON error object to stderr.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import numpy as np

from . import harness
from .array_core import DirectionGrid, planar_geometry
from .codebook import build_planar_codebook, calibrate_codebook, load_codebook, save_codebook
from .harness import (
    FRONT_AZ_LIMITS,
    BeamDataset,
    CodebookProvider,
    MgbProvider,
    PipelineConfig,
    RegressorProvider,
    SectorSpec,
)
from .neural import TrainConfig, load_model, save_model
from .metrics import quantiles


class CliState:
    def __init__(self):
        self.seed = 0
        self.geometry_spec = None  # (rows, cols, spacing)
        self.grid_step = None
        self.config: dict = {}

    def pipeline_config(self, **overrides) -> PipelineConfig:
        doc = dict(self.config)
        doc.update({k: v for k, v in overrides.items() if v is not None})
        if self.geometry_spec is not None:
            doc.setdefault("rows", self.geometry_spec[0])
            doc.setdefault("cols", self.geometry_spec[1])
            doc.setdefault("spacing_wl", self.geometry_spec[2])
        if self.grid_step is not None:
            doc.setdefault("grid_step_deg", self.grid_step)
        doc.setdefault("master_seed", self.seed)
        return PipelineConfig.from_flat_dict(doc)

    def geometry(self):
        return self.pipeline_config().geometry()

    def grid(self):
        return DirectionGrid.from_step(self.pipeline_config().grid_step_deg)


pass_state = click.make_pass_decorator(CliState, ensure=True)


def _parse_geometry(_ctx, _param, value):
    if value is None:
        return None
    try:
        rows, cols, spacing = value.split(",")
        return int(rows), int(cols), float(spacing)
    except ValueError as exc:
        raise click.BadParameter("expected rows,cols,spacing e.g. 8,8,0.5") from exc


@click.group()
@click.option("--seed", type=int, default=0, show_default=True, help="Master seed for every stage.")
@click.option("--geometry", callback=_parse_geometry, default=None, metavar="ROWS,COLS,SPACING",
              help="Planar array layout (spacing in wavelengths).")
@click.option("--grid-step", type=float, default=None, help="Pattern grid step in degrees.")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Flat JSON key/value config; explicit options win.")
@click.pass_context
def cli(ctx, seed, geometry, grid_step, config_path):
    """Planar-array beamforming toolkit: exact steering, codebooks, a neural
    phase regressor, and head-to-head benchmarks."""
    state = ctx.ensure_object(CliState)
    state.seed = seed
    state.geometry_spec = geometry
    state.grid_step = grid_step
    if config_path:
        with open(config_path) as fh:
            state.config = json.load(fh)


@cli.group()
def dataset():
    """Generate or split (angle, phases) datasets."""


@dataset.command("gen")
@click.option("--samples", type=int, required=True, help="Number of sector angles to sample.")
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@pass_state
def dataset_gen(state: CliState, samples, out):
    """Sample sector angles uniformly and pair them with exact steering phases."""
    cfg = state.pipeline_config(samples=samples)
    spec = SectorSpec(az_range=cfg.az_range, el_range=cfg.el_range, samples=samples, seed=cfg.master_seed)
    ds = harness.generate_dataset(spec, cfg.geometry())
    ds.save_csv(out)
    click.echo(f"wrote {len(ds)} rows to {out}")


@dataset.command("split")
@click.option("--data", "data_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--out-prefix", required=True, help="Writes <prefix>-train/val/test.csv")
@pass_state
def dataset_split(state: CliState, data_path, out_prefix):
    """Shuffle and split a dataset 70/15/15."""
    ds = BeamDataset.load_csv(data_path)
    parts = harness.split_dataset(ds, seed=state.pipeline_config().master_seed)
    for name, part in zip(("train", "val", "test"), parts):
        path = f"{out_prefix}-{name}.csv"
        part.save_csv(path)
        click.echo(f"wrote {len(part)} rows to {path}")


@cli.group("codebook")
def codebook_group():
    """Build or calibrate steering codebooks."""


@codebook_group.command("gen")
@click.option("--size", type=int, required=True, help="Codeword count K (square of a power of two).")
@click.option("--bits", type=int, default=None, help="Phase-shifter resolution used in generation.")
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@pass_state
def codebook_gen(state: CliState, size, bits, out):
    """Generate the separable planar codebook for the configured geometry."""
    cfg = state.pipeline_config(codebook_size=size, codebook_bits=bits)
    geom = cfg.geometry()
    cb = build_planar_codebook(geom, cfg.codebook_size, cfg.codebook_bits)
    save_codebook(cb, geom, out)
    click.echo(f"wrote {cb.size}-beam codebook (b={cb.bits}) to {out}")


@codebook_group.command("calibrate")
@click.option("--codebook", "codebook_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--coarse-step", type=float, default=None, help="Peak-search grid step in degrees.")
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@pass_state
def codebook_calibrate(state: CliState, codebook_path, coarse_step, out):
    """Measure every codeword's actual beam pointing angle."""
    cb, geom = load_codebook(codebook_path)
    step = coarse_step if coarse_step is not None else state.pipeline_config().peak_step_deg
    calibrated = calibrate_codebook(cb, geom, step, az_limits=FRONT_AZ_LIMITS)
    save_codebook(calibrated, geom, out)
    click.echo(f"calibrated {cb.size} codewords at {step} deg into {out}")


@cli.command()
@click.option("--train-data", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--val-data", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--epochs", type=int, default=None)
@click.option("--batch-size", type=int, default=None)
@click.option("--learning-rate", type=float, default=None)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@pass_state
def train(state: CliState, train_data, val_data, epochs, batch_size, learning_rate, out):
    """Train the phase regressor on pre-split normalized-on-the-fly data."""
    cfg = state.pipeline_config(epochs=epochs, batch_size=batch_size, learning_rate=learning_rate)
    train_cfg = TrainConfig(
        learning_rate=cfg.learning_rate, batch_size=cfg.batch_size, epochs=cfg.epochs, seed=cfg.master_seed
    )
    trained, history = harness.train_regressor(
        BeamDataset.load_csv(train_data), BeamDataset.load_csv(val_data), train_cfg, scaler_kind=cfg.scaler_kind
    )
    save_model(trained, out)
    click.echo(
        f"trained {cfg.epochs} epochs; best val MSE {history.best_val_loss:.6g} "
        f"at epoch {history.best_epoch}; model in {out}"
    )


def _provider_for(state: CliState, approach, model_path, codebook_path):
    if approach == "mgb":
        return MgbProvider(state.geometry()), state.geometry()
    if approach == "nn":
        if not model_path:
            raise click.UsageError("--model is required for the nn approach")
        trained = load_model(model_path)
        return RegressorProvider.from_regressor(trained), state.geometry()
    if not codebook_path:
        raise click.UsageError("--codebook is required for the cb approach")
    cb, geom = load_codebook(codebook_path)
    return CodebookProvider(cb), geom


@cli.command("eval")
@click.option("--approach", type=click.Choice(["mgb", "nn", "cb"]), required=True)
@click.option("--model", "model_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--codebook", "codebook_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--test-data", type=click.Path(exists=True, dir_okay=False), required=True,
              help="CSV whose az_deg/el_deg columns provide the target angles.")
@click.option("--max-samples", type=int, default=None)
@click.option("--bits", type=int, default=None, help="Quantize weights to this phase-shifter resolution.")
@click.option("--out-dir", type=click.Path(file_okay=False), required=True)
@pass_state
def eval_cmd(state: CliState, approach, model_path, codebook_path, test_data, max_samples, bits, out_dir):
    """Evaluate one approach: per-sample metrics, quantiles, CDFs."""
    provider, geom = _provider_for(state, approach, model_path, codebook_path)
    ds = BeamDataset.load_csv(test_data)
    bpas = ds.bpas if max_samples is None else ds.bpas[:max_samples]
    cfg = state.pipeline_config()
    report = harness.evaluate_approach(
        provider, bpas, geom, state.grid(), bits=bits, peak_step_deg=cfg.peak_step_deg, seed=cfg.master_seed
    )
    paths = harness.export_report(report, out_dir)
    summary = report.quantile_summary()
    click.echo(json.dumps({"approach": report.label, "bits": bits, "quantiles": summary}))
    click.echo(f"report files in {Path(out_dir).resolve()}", err=False)
    _ = paths


@cli.command("sweep-bits")
@click.option("--model", "model_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--codebook", "codebook_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--bits", default="2,3,4,5,6", show_default=True, help="Comma-separated resolutions.")
@click.option("--test-data", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--max-samples", type=int, default=None)
@click.option("--out-dir", type=click.Path(file_okay=False), required=True)
@pass_state
def sweep_bits(state: CliState, model_path, codebook_path, bits, test_data, max_samples, out_dir):
    """Quantization sweep for the regressor and a codebook on a shared test set."""
    bits_list = [int(b) for b in bits.split(",")]
    trained = load_model(model_path)
    cb, geom = load_codebook(codebook_path)
    ds = BeamDataset.load_csv(test_data)
    bpas = ds.bpas if max_samples is None else ds.bpas[:max_samples]
    cfg = state.pipeline_config()
    reports = harness.quantization_sweep(
        [RegressorProvider.from_regressor(trained), CodebookProvider(cb)],
        bits_list,
        bpas,
        geom,
        state.grid(),
        peak_step_deg=cfg.peak_step_deg,
        seed=cfg.master_seed,
    )
    for report in reports:
        harness.export_report(report, out_dir)
        medians = report.quantile_summary()
        click.echo(
            json.dumps(
                {
                    "approach": report.label,
                    "bits": report.bits,
                    "median_central_angle_deg": medians["central_angle_deg"]["p50"],
                    "median_cosine_similarity": medians["cosine_similarity"]["p50"],
                }
            )
        )


@cli.command()
@click.option("--model", "model_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--trials", type=int, default=1000, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@pass_state
def latency(state: CliState, model_path, trials, out):
    """Measure single-prediction latency (reported, never gated)."""
    trained = load_model(model_path)
    stats = harness.measure_inference_latency(trained.model, trained.scalers, n_trials=trials)
    payload = json.dumps(stats, indent=2, sort_keys=True)
    if out:
        Path(out).write_text(payload + "\n")
    click.echo(payload)


@cli.command("export-cdf")
@click.option("--samples", "samples_path", type=click.Path(exists=True, dir_okay=False), required=True,
              help="Per-sample CSV produced by eval/sweep-bits.")
@click.option("--metric", type=click.Choice(["central-angle", "cosine-similarity"]), required=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def export_cdf(samples_path, metric, out):
    """Re-derive a CDF CSV from a per-sample metrics file."""
    column = 4 if metric == "central-angle" else 5
    values = np.loadtxt(samples_path, delimiter=",", skiprows=1, usecols=column, ndmin=1)
    harness.write_cdf_csv(values, out)
    click.echo(f"wrote {metric} CDF ({values.size} samples) to {out}")


@cli.command()
@click.option("--samples", type=int, default=None, help="Dataset size (default from config).")
@click.option("--epochs", type=int, default=None)
@click.option("--eval-samples", type=int, default=None)
@click.option("--out-dir", type=click.Path(file_okay=False), required=True)
@pass_state
def pipeline(state: CliState, samples, epochs, eval_samples, out_dir):
    """End-to-end seeded run: generate, split, train, calibrate, evaluate, export."""
    cfg = state.pipeline_config(samples=samples, epochs=epochs, eval_samples=eval_samples)
    result = harness.run_pipeline(cfg, out_dir)
    medians = {
        r["approach"]: {
            "central_angle_p50": r["quantiles"]["central_angle_deg"]["p50"],
            "cosine_similarity_p50": r["quantiles"]["cosine_similarity"]["p50"],
        }
        for r in result["summary"]["approaches"]
    }
    click.echo(json.dumps({"summary": str(result["summary_path"]), "medians": medians}, indent=2))


def main():
    try:
        cli(standalone_mode=False)
    except click.ClickException as exc:
        print(json.dumps({"error": exc.format_message()}), file=sys.stderr)
        sys.exit(exc.exit_code or 1)
    except click.Abort:
        print(json.dumps({"error": "aborted"}), file=sys.stderr)
        sys.exit(130)
    except (ValueError, OSError) as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        sys.exit(1)


if __name__ == "__main__":
    main()
