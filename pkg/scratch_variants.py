"""Quick comparative experiments for the snake frequency initialization."""
import sys
import time

import numpy as np

import beamlab as bl
from beamlab.harness import SectorSpec, generate_dataset, split_dataset, evaluate_approach, RegressorProvider
from beamlab.neural import (
    TrainConfig,
    TrainedRegressor,
    ScalerPair,
    apply_scaler,
    fit,
    fit_scaler,
)

geom = bl.planar_geometry(8, 8, 0.5)
ds = generate_dataset(SectorSpec(samples=20000, seed=11), geom)
tr, va, te = split_dataset(ds, seed=12)
scalers = ScalerPair(fit_scaler(tr.bpas), fit_scaler(tr.phases_deg, allow_constant=True))
tx, ty = apply_scaler(scalers.inputs, tr.bpas), apply_scaler(scalers.outputs, tr.phases_deg)
vx, vy = apply_scaler(scalers.inputs, va.bpas), apply_scaler(scalers.outputs, va.phases_deg)
grid = bl.DirectionGrid.from_step(2.0)

epochs = int(sys.argv[1]) if len(sys.argv) > 1 else 60
for a_init in (1.0, 3.0, 6.0, 12.0, 24.0):
    t0 = time.perf_counter()
    cfg = TrainConfig(epochs=epochs, seed=13)
    model, hist = fit(tx, ty, vx, vy, cfg, snake_a_init=a_init)
    trained = TrainedRegressor(model=model, scalers=scalers, config=cfg)
    rep = evaluate_approach(RegressorProvider.from_regressor(trained), te.bpas[:200], geom, grid)
    q = rep.quantile_summary()
    a_final = {i: float(a) for i, a in model.snake_a.items()}
    print(
        f"a0={a_init:5.1f}  val={hist.best_val_loss:.4f}  "
        f"CA50={q['central_angle_deg']['p50']:.3f}  CSim50={q['cosine_similarity']['p50']:.4f}  "
        f"a_fin={a_final}  ({time.perf_counter()-t0:.0f}s)",
        flush=True,
    )
