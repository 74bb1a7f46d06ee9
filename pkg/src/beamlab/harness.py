"""End-to-end experiment pipelines.

Sector dataset generation, train/validation/test splitting, like-for-like
evaluation of weight providers (exact steering, trained regressor, codebook
lookup, each with optional phase quantization), quantization sweeps, report
and CDF export, and inference-latency measurement.  A single master seed
fans out deterministically to every stage, so a full pipeline run is
byte-for-byte reproducible.
"""

from __future__ import annotations

import csv
import hashlib
import json
import platform
import time
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Iterable, Protocol, Sequence

import numpy as np

from .array_core import (
    ArrayGeometry,
    BeamPointingAngle,
    DirectionGrid,
    PhaseVector,
    find_peak,
    mgb_weights,
    planar_geometry,
    quantize_phases,
    radiation_pattern,
)
from .codebook import Codebook, build_planar_codebook, calibrate_codebook, nearest_codeword
from .metrics import MetricSample, central_angle, cosine_similarity, quantiles
from .metrics import empirical_cdf as _empirical_cdf
from .neural import (
    MlpModel,
    ScalerPair,
    TrainConfig,
    TrainedRegressor,
    fit,
    fit_scaler,
    apply_scaler,
    predict_phases,
)

__all__ = [
    "SECTOR_AZ_RANGE",
    "SECTOR_EL_RANGE",
    "FRONT_AZ_LIMITS",
    "SectorSpec",
    "BeamDataset",
    "generate_dataset",
    "split_dataset",
    "MgbProvider",
    "CodebookProvider",
    "RegressorProvider",
    "EvalReport",
    "evaluate_approach",
    "quantization_sweep",
    "export_report",
    "write_cdf_csv",
    "measure_inference_latency",
    "train_regressor",
    "PipelineConfig",
    "run_pipeline",
    "stage_seeds",
]

SECTOR_AZ_RANGE = (0.0, 120.0)
SECTOR_EL_RANGE = (30.0, 150.0)
# Peak searches during evaluation stay in the front half-space of the default
# x-z planar array; a bare planar array mirrors every lobe through its plane,
# so the back half would alias each beam.
FRONT_AZ_LIMITS = (0.0, 180.0)

QUANTILE_PS = (25.0, 50.0, 75.0, 95.0)


# ---------------------------------------------------------------------------
# dataset
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SectorSpec:
    """Uniform sampling spec for the service sector."""

    az_range: tuple[float, float] = SECTOR_AZ_RANGE
    el_range: tuple[float, float] = SECTOR_EL_RANGE
    samples: int = 0
    seed: int = 0

    def __post_init__(self):
        az_lo, az_hi = self.az_range
        el_lo, el_hi = self.el_range
        if not 0.0 <= az_lo <= az_hi < 360.0 or not 0.0 <= el_lo <= el_hi <= 180.0:
            raise ValueError("sector ranges must lie inside the beam-pointing domain")
        if self.samples < 0:
            raise ValueError("sample count must be non-negative")


@dataclass(frozen=True, eq=False)
class BeamDataset:
    """Rows of (beam pointing angle, per-element steering phases)."""

    bpas: np.ndarray  # (m, 2) az_deg, el_deg
    phases_deg: np.ndarray  # (m, N)

    def __post_init__(self):
        bpas = np.asarray(self.bpas, dtype=np.float64).reshape(-1, 2)
        phases = np.asarray(self.phases_deg, dtype=np.float64)
        phases = phases.reshape(bpas.shape[0], -1) if phases.size else phases.reshape(0, 0)
        if phases.shape[0] != bpas.shape[0]:
            raise ValueError("angle and phase row counts differ")
        bpas.setflags(write=False)
        phases.setflags(write=False)
        object.__setattr__(self, "bpas", bpas)
        object.__setattr__(self, "phases_deg", phases)

    def __len__(self) -> int:
        return self.bpas.shape[0]

    def save_csv(self, path) -> None:
        n_phases = self.phases_deg.shape[1]
        header = ["az_deg", "el_deg"] + [f"p{i}" for i in range(n_phases)]
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for bpa_row, phase_row in zip(self.bpas, self.phases_deg):
                writer.writerow([repr(float(v)) for v in (*bpa_row, *phase_row)])

    @classmethod
    def load_csv(cls, path) -> "BeamDataset":
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2, dtype=np.float64)
        if data.size == 0:
            return cls(np.empty((0, 2)), np.empty((0, 0)))
        return cls(data[:, :2], data[:, 2:])


def generate_dataset(spec: SectorSpec, geom: ArrayGeometry) -> BeamDataset:
    """Sample ``spec.samples`` beam pointing angles i.i.d. uniform over the
    sector (seeded) and pair each with its exact steering phases."""
    rng = np.random.default_rng(spec.seed)
    az = rng.uniform(spec.az_range[0], spec.az_range[1], size=spec.samples)
    el = rng.uniform(spec.el_range[0], spec.el_range[1], size=spec.samples)
    bpas = np.column_stack([az, el])
    if spec.samples == 0:
        return BeamDataset(np.empty((0, 2)), np.empty((0, geom.n_elements)))
    # wrap(-360 * U . P^T) for all rows at once; identical to per-row mgb_weights
    u = np.column_stack(
        [
            np.sin(np.deg2rad(el)) * np.cos(np.deg2rad(az)),
            np.sin(np.deg2rad(el)) * np.sin(np.deg2rad(az)),
            np.cos(np.deg2rad(el)),
        ]
    )
    raw = -360.0 * (u @ geom.positions_wl.T)
    phases = -((-raw + 180.0) % 360.0 - 180.0) + 0.0
    return BeamDataset(bpas, phases)


def split_dataset(
    dataset: BeamDataset,
    ratios: tuple[float, float, float] = (0.70, 0.15, 0.15),
    seed: int = 0,
) -> tuple[BeamDataset, BeamDataset, BeamDataset]:
    """Disjoint, exhaustive train/validation/test split via a seeded shuffle.

    Split sizes land within one row of the exact ratios.
    """
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError("split ratios must sum to 1")
    n = len(dataset)
    order = np.random.default_rng(seed).permutation(n)
    n_train = int(round(ratios[0] * n))
    n_val = min(int(round(ratios[1] * n)), n - n_train)
    picks = (order[:n_train], order[n_train : n_train + n_val], order[n_train + n_val :])
    return tuple(BeamDataset(dataset.bpas[idx], dataset.phases_deg[idx]) for idx in picks)


# ---------------------------------------------------------------------------
# weight providers
# ---------------------------------------------------------------------------

class WeightProvider(Protocol):
    label: str

    def phases_for(self, bpa: BeamPointingAngle) -> PhaseVector: ...

    def cache_key(self, bpa: BeamPointingAngle):
        """Hashable key when the returned weights are shared between targets
        (lets the evaluator reuse peak searches); None for unique weights."""
        ...


class MgbProvider:
    """Exact phase-only steering; the ground-truth reference approach."""

    def __init__(self, geom: ArrayGeometry):
        self.label = "mgb"
        self._geom = geom

    def phases_for(self, bpa: BeamPointingAngle) -> PhaseVector:
        return mgb_weights(bpa, self._geom)

    def cache_key(self, bpa: BeamPointingAngle):
        return None


class CodebookProvider:
    """Nearest-calibrated-beam lookup in a finite codebook."""

    def __init__(self, cb: Codebook):
        if not cb.is_calibrated:
            raise ValueError("codebook provider needs a calibrated codebook")
        self.label = f"cb-{cb.size}"
        self.codebook = cb

    def phases_for(self, bpa: BeamPointingAngle) -> PhaseVector:
        return self.codebook.codeword(nearest_codeword(self.codebook, bpa))

    def cache_key(self, bpa: BeamPointingAngle):
        return nearest_codeword(self.codebook, bpa)


class RegressorProvider:
    """Trained neural regressor mapping the target angle to element phases."""

    def __init__(self, model: MlpModel, scalers: ScalerPair, label: str = "nn"):
        self.label = label
        self._model = model
        self._scalers = scalers

    @classmethod
    def from_regressor(cls, trained: TrainedRegressor, label: str = "nn") -> "RegressorProvider":
        return cls(trained.model, trained.scalers, label)

    def phases_for(self, bpa: BeamPointingAngle) -> PhaseVector:
        return predict_phases(self._model, self._scalers, bpa)

    def cache_key(self, bpa: BeamPointingAngle):
        return None


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

@dataclass
class EvalReport:
    """Per-sample metrics plus quantile summaries for one approach."""

    label: str
    bits: int | None
    samples: list[MetricSample]
    geometry: dict
    grid_step_deg: float
    peak_step_deg: float
    peak_az_limits: tuple[float, float]
    seed: int | None
    config_hash: str

    @property
    def central_angles(self) -> np.ndarray:
        return np.array([s.central_angle_deg for s in self.samples])

    @property
    def cosine_similarities(self) -> np.ndarray:
        return np.array([s.cosine_similarity for s in self.samples])

    def quantile_summary(self) -> dict:
        return {
            "central_angle_deg": {
                f"p{int(p)}": q for p, q in zip(QUANTILE_PS, quantiles(self.central_angles, QUANTILE_PS))
            },
            "cosine_similarity": {
                f"p{int(p)}": q for p, q in zip(QUANTILE_PS, quantiles(self.cosine_similarities, QUANTILE_PS))
            },
        }

    def summary_dict(self) -> dict:
        return {
            "approach": self.label,
            "bits": self.bits,
            "samples": len(self.samples),
            "seed": self.seed,
            "config_hash": self.config_hash,
            "geometry": self.geometry,
            "grid_step_deg": self.grid_step_deg,
            "peak_step_deg": self.peak_step_deg,
            "peak_az_limits": list(self.peak_az_limits),
            "quantiles": self.quantile_summary(),
        }


def _config_hash(payload: dict) -> str:
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()[:16]


def evaluate_approach(
    provider: WeightProvider,
    test_bpas,
    geom: ArrayGeometry,
    grid: DirectionGrid,
    bits: int | None = None,
    peak_step_deg: float = 1.0,
    peak_az_limits: tuple[float, float] = FRONT_AZ_LIMITS,
    seed: int | None = None,
) -> EvalReport:
    """Measure one approach over a shared test set.

    Per target: obtain weights (optionally quantized to ``bits``), synthesize
    the pattern, locate its peak, and score central angle against the request
    plus cosine similarity against the unquantized exact-steering pattern for
    the same request.  Weight vectors shared between targets (codebooks) have
    their peak search and pattern computed once.
    """
    test_bpas = np.atleast_2d(np.asarray(test_bpas, dtype=np.float64))
    if test_bpas.shape[0] == 0:
        raise ValueError("cannot evaluate on an empty test set")
    samples: list[MetricSample] = []
    shared: dict = {}
    for az, el in test_bpas:
        target = BeamPointingAngle(float(az), float(el))
        key = provider.cache_key(target)
        entry = shared.get(key) if key is not None else None
        if entry is None:
            pv = provider.phases_for(target)
            if bits is not None:
                pv = quantize_phases(pv, bits)
            pattern = radiation_pattern(pv, geom, grid)
            achieved = find_peak(pv, geom, peak_step_deg, az_limits=peak_az_limits)
            entry = (pattern, achieved)
            if key is not None:
                shared[key] = entry
        pattern, achieved = entry
        reference = radiation_pattern(mgb_weights(target, geom), geom, grid)
        samples.append(
            MetricSample(
                target=target,
                achieved=achieved,
                central_angle_deg=central_angle(achieved, target),
                cosine_similarity=cosine_similarity(pattern, reference),
            )
        )
    payload = {
        "approach": provider.label,
        "bits": bits,
        "geometry": geom.descriptor(),
        "grid": list(grid.key()),
        "peak_step_deg": peak_step_deg,
        "peak_az_limits": list(peak_az_limits),
        "n_samples": int(test_bpas.shape[0]),
        "seed": seed,
    }
    return EvalReport(
        label=provider.label,
        bits=bits,
        samples=samples,
        geometry=geom.descriptor(),
        grid_step_deg=grid.step_deg,
        peak_step_deg=peak_step_deg,
        peak_az_limits=peak_az_limits,
        seed=seed,
        config_hash=_config_hash(payload),
    )


def quantization_sweep(
    providers: Sequence[WeightProvider],
    bits_list: Iterable[int],
    test_bpas,
    geom: ArrayGeometry,
    grid: DirectionGrid,
    peak_step_deg: float = 1.0,
    peak_az_limits: tuple[float, float] = FRONT_AZ_LIMITS,
    seed: int | None = None,
) -> list[EvalReport]:
    """One EvalReport per (provider, bits): every provider's weights pushed
    through a b-bit phase shifter, scored on the shared test set."""
    reports = []
    for provider in providers:
        for bits in bits_list:
            reports.append(
                evaluate_approach(
                    provider,
                    test_bpas,
                    geom,
                    grid,
                    bits=bits,
                    peak_step_deg=peak_step_deg,
                    peak_az_limits=peak_az_limits,
                    seed=seed,
                )
            )
    return reports


# ---------------------------------------------------------------------------
# report export
# ---------------------------------------------------------------------------

def _report_stem(report: EvalReport) -> str:
    return report.label if report.bits is None else f"{report.label}-b{report.bits}"


def write_cdf_csv(values, path) -> None:
    """Empirical CDF as ``value,cumulative_fraction`` rows (monotone, ends at 1)."""
    points = _empirical_cdf(values)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["value", "cumulative_fraction"])
        for value, fraction in points:
            writer.writerow([repr(value), repr(fraction)])


def export_report(report: EvalReport, out_dir) -> dict[str, Path]:
    """Write per-sample CSV, quantile-summary JSON, and per-metric CDF CSVs.

    Returns the written paths keyed by artifact name.
    """
    if not report.samples:
        raise ValueError("cannot export an empty report")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stem = _report_stem(report)
    paths = {
        "samples": out / f"{stem}-samples.csv",
        "summary": out / f"{stem}-summary.json",
        "cdf_central_angle": out / f"{stem}-cdf-central-angle.csv",
        "cdf_cosine_similarity": out / f"{stem}-cdf-cosine-similarity.csv",
    }
    with open(paths["samples"], "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["target_phi", "target_theta", "achieved_phi", "achieved_theta", "central_angle_deg", "cosine_similarity"]
        )
        for s in report.samples:
            writer.writerow(
                [
                    repr(s.target.az_deg),
                    repr(s.target.el_deg),
                    repr(s.achieved.az_deg),
                    repr(s.achieved.el_deg),
                    repr(s.central_angle_deg),
                    repr(s.cosine_similarity),
                ]
            )
    with open(paths["summary"], "w") as fh:
        json.dump(report.summary_dict(), fh, indent=2, sort_keys=True)
    write_cdf_csv(report.central_angles, paths["cdf_central_angle"])
    write_cdf_csv(report.cosine_similarities, paths["cdf_cosine_similarity"])
    return paths


# ---------------------------------------------------------------------------
# latency
# ---------------------------------------------------------------------------

def measure_inference_latency(
    model: MlpModel,
    scalers: ScalerPair,
    n_trials: int = 1000,
    warmup: int = 100,
    bpa: BeamPointingAngle | None = None,
) -> dict:
    """Wall-clock per single-angle prediction after warm-up.

    Reports median/p95/mean microseconds plus a hardware descriptor for
    provenance.  Latency is machine-dependent and never treated as a gate.
    """
    if n_trials < 1:
        raise ValueError("latency measurement needs at least one trial")
    probe = bpa if bpa is not None else BeamPointingAngle(60.0, 90.0)
    for _ in range(warmup):
        predict_phases(model, scalers, probe)
    elapsed_us = np.empty(n_trials)
    for i in range(n_trials):
        start = time.perf_counter_ns()
        predict_phases(model, scalers, probe)
        elapsed_us[i] = (time.perf_counter_ns() - start) / 1e3
    med, p95 = quantiles(elapsed_us, [50.0, 95.0])
    return {
        "median_us": med,
        "p95_us": p95,
        "mean_us": float(elapsed_us.mean()),
        "n_trials": n_trials,
        "warmup": warmup,
        "hardware": f"{platform.platform()} / {platform.processor() or platform.machine()}",
        "python": platform.python_version(),
    }


# ---------------------------------------------------------------------------
# training orchestration + pipeline
# ---------------------------------------------------------------------------

def train_regressor(
    train_split: BeamDataset,
    val_split: BeamDataset,
    cfg: TrainConfig,
    scaler_kind: str = "standard",
):
    """Fit scalers on the training split only, normalize, and train.

    Returns (TrainedRegressor, FitHistory).
    """
    if len(train_split) == 0 or len(val_split) == 0:
        raise ValueError("training and validation splits must be non-empty")
    scalers = ScalerPair(
        inputs=fit_scaler(train_split.bpas, kind=scaler_kind),
        # the origin element's phase is identically 0, so the target matrix
        # always carries one constant column
        outputs=fit_scaler(train_split.phases_deg, kind=scaler_kind, allow_constant=True),
    )
    model, history = fit(
        apply_scaler(scalers.inputs, train_split.bpas),
        apply_scaler(scalers.outputs, train_split.phases_deg),
        apply_scaler(scalers.inputs, val_split.bpas),
        apply_scaler(scalers.outputs, val_split.phases_deg),
        cfg,
    )
    return TrainedRegressor(model=model, scalers=scalers, config=cfg), history


def stage_seeds(master_seed: int, n_stages: int = 4) -> list[int]:
    """Deterministic per-stage seeds fanned out from one master seed."""
    return [int(s) for s in np.random.SeedSequence(master_seed).generate_state(n_stages)]


@dataclass(frozen=True)
class PipelineConfig:
    """Flat configuration for a full generate/split/train/evaluate run."""

    master_seed: int = 0
    samples: int = 100_000
    az_range: tuple[float, float] = SECTOR_AZ_RANGE
    el_range: tuple[float, float] = SECTOR_EL_RANGE
    rows: int = 8
    cols: int = 8
    spacing_wl: float = 0.5
    element_model: str = "isotropic"
    plane: str = "xz"
    grid_step_deg: float = 2.0
    peak_step_deg: float = 1.0
    codebook_size: int = 1024
    codebook_bits: int = 16
    learning_rate: float = 0.0005
    batch_size: int = 1024
    epochs: int = 200
    eval_samples: int = 1000
    scaler_kind: str = "standard"

    def geometry(self) -> ArrayGeometry:
        return planar_geometry(self.rows, self.cols, self.spacing_wl, self.element_model, self.plane)

    def to_flat_dict(self) -> dict:
        doc = asdict(self)
        doc["az_range"] = list(doc["az_range"])
        doc["el_range"] = list(doc["el_range"])
        return doc

    @classmethod
    def from_flat_dict(cls, doc: dict) -> "PipelineConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        kwargs = dict(doc)
        for key in ("az_range", "el_range"):
            if key in kwargs:
                kwargs[key] = tuple(kwargs[key])
        return cls(**kwargs)


def run_pipeline(cfg: PipelineConfig, out_dir) -> dict:
    """generate -> split -> train -> calibrate codebook -> evaluate -> export.

    Writes the trained model, the calibrated codebook, per-approach report
    files, and a combined ``summary.json``; the summary is byte-identical for
    identical configs because every stage seed derives from the master seed.
    Returns {"summary_path", "summary", "paths"}.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    geom = cfg.geometry()
    seed_data, seed_split, seed_train, seed_eval = stage_seeds(cfg.master_seed, 4)

    dataset = generate_dataset(
        SectorSpec(az_range=cfg.az_range, el_range=cfg.el_range, samples=cfg.samples, seed=seed_data), geom
    )
    train_split, val_split, test_split = split_dataset(dataset, seed=seed_split)

    train_cfg = TrainConfig(
        learning_rate=cfg.learning_rate, batch_size=cfg.batch_size, epochs=cfg.epochs, seed=seed_train
    )
    trained, history = train_regressor(train_split, val_split, train_cfg, scaler_kind=cfg.scaler_kind)

    cb = calibrate_codebook(
        build_planar_codebook(geom, cfg.codebook_size, cfg.codebook_bits),
        geom,
        cfg.peak_step_deg,
        az_limits=FRONT_AZ_LIMITS,
    )

    n_eval = min(cfg.eval_samples, len(test_split))
    test_bpas = test_split.bpas[:n_eval]
    grid = DirectionGrid.from_step(cfg.grid_step_deg)
    reports = [
        evaluate_approach(
            RegressorProvider.from_regressor(trained), test_bpas, geom, grid,
            peak_step_deg=cfg.peak_step_deg, seed=seed_eval,
        ),
        evaluate_approach(
            CodebookProvider(cb), test_bpas, geom, grid,
            peak_step_deg=cfg.peak_step_deg, seed=seed_eval,
        ),
    ]

    from .codebook import save_codebook
    from .neural import save_model

    paths: dict[str, Path] = {"model": out / "model.json", "codebook": out / "codebook.json"}
    save_model(trained, paths["model"])
    save_codebook(cb, geom, paths["codebook"])
    for report in reports:
        for name, p in export_report(report, out).items():
            paths[f"{_report_stem(report)}:{name}"] = p

    summary = {
        "config": cfg.to_flat_dict(),
        "config_hash": _config_hash(cfg.to_flat_dict()),
        "stage_seeds": {"dataset": seed_data, "split": seed_split, "train": seed_train, "eval": seed_eval},
        "best_epoch": history.best_epoch,
        "best_val_loss": history.best_val_loss,
        "approaches": [report.summary_dict() for report in reports],
    }
    summary_path = out / "summary.json"
    with open(summary_path, "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
    paths["summary"] = summary_path
    return {"summary_path": summary_path, "summary": summary, "paths": paths}
