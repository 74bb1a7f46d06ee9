"""Feed-forward phase regressor, implemented from scratch on numpy.

Maps a normalized (azimuth, elevation) pair to the 64 per-element phases of a
planar array.  The stack is dense layers with snake activations on the first
two hidden layers, tanh on the third, batch normalization on hidden layers 2
and 3, a linear output, mean-squared-error loss, and Adam updates.  Forward,
backward, and optimizer steps are all explicit so every gradient can be
checked against finite differences.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field, asdict
from typing import Sequence

import numpy as np

from .array_core import BeamPointingAngle, PhaseVector, wrap_phase_deg

__all__ = [
    "SNAKE",
    "TSIGMOID",
    "snake_activation",
    "snake_frequency_grad",
    "tsigmoid_activation",
    "ScalerParams",
    "ScalerPair",
    "fit_scaler",
    "apply_scaler",
    "invert_scaler",
    "DenseLayer",
    "BatchNormLayer",
    "MlpModel",
    "init_model",
    "model_parameters",
    "set_model_parameters",
    "forward",
    "backward",
    "mse_loss",
    "TrainConfig",
    "init_adam_state",
    "adam_step",
    "FitHistory",
    "fit",
    "predict_phases",
    "predict_phase_matrix",
    "TrainedRegressor",
    "save_model",
    "load_model",
]

SNAKE = "snake"
TSIGMOID = "tsigmoid"

DEFAULT_LAYER_DIMS = (2, 32, 300, 600, 64)
DEFAULT_ACTIVATIONS = (SNAKE, SNAKE, TSIGMOID)
DEFAULT_BATCHNORM_LAYERS = (1, 2)  # hidden-layer indices carrying batch norm
DEFAULT_SNAKE_A_INIT = 1.0

# Keeps a collapsing snake frequency from ever reaching an exact zero, where
# sin^2(a*x)/a is undefined.
_SNAKE_A_FLOOR = 1e-8


# ---------------------------------------------------------------------------
# activations
# ---------------------------------------------------------------------------

def snake_activation(x, a: float):
    """Snake nonlinearity y = x + sin^2(a*x)/a and its input derivative
    1 + sin(2*a*x).  ``a`` is the (positive) frequency parameter."""
    if a <= 0:
        raise ValueError(f"snake frequency must be positive, got {a}")
    x = np.asarray(x, dtype=np.float64)
    y = x + np.sin(a * x) ** 2 / a
    dydx = 1.0 + np.sin(2.0 * a * x)
    return y, dydx


def snake_frequency_grad(x, a: float):
    """d/da of the snake output: x*sin(2ax)/a - sin^2(ax)/a^2."""
    if a <= 0:
        raise ValueError(f"snake frequency must be positive, got {a}")
    x = np.asarray(x, dtype=np.float64)
    return x * np.sin(2.0 * a * x) / a - np.sin(a * x) ** 2 / a**2


def tsigmoid_activation(x):
    """Bounded sigmoid-family activation y = tanh(x) with derivative 1 - y^2."""
    y = np.tanh(np.asarray(x, dtype=np.float64))
    return y, 1.0 - y**2


# ---------------------------------------------------------------------------
# feature scaling
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScalerParams:
    """Per-feature affine normalization z = (x - center) / scale.

    kind="standard" uses mean and standard deviation; kind="minmax" maps the
    fitted range onto [-1, 1].  Either way the transform is invertible.
    """

    center: np.ndarray
    scale: np.ndarray
    kind: str = "standard"

    def __post_init__(self):
        center = np.atleast_1d(np.asarray(self.center, dtype=np.float64))
        scale = np.atleast_1d(np.asarray(self.scale, dtype=np.float64))
        if center.shape != scale.shape:
            raise ValueError("center and scale must have matching shapes")
        if np.any(scale <= 0) or not np.all(np.isfinite(scale)):
            raise ValueError("scaler scale must be positive and finite")
        for name, arr in (("center", center), ("scale", scale)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


@dataclass(frozen=True)
class ScalerPair:
    inputs: ScalerParams
    outputs: ScalerParams


def fit_scaler(data, kind: str = "standard", allow_constant: bool = False) -> ScalerParams:
    """Fit per-feature normalization on (n, features) training data.

    Features with zero spread are rejected by default because they make the
    transform non-invertible.  ``allow_constant=True`` instead gives them a
    unit scale so they map to zero; phase targets need this because the
    origin element's phase is identically zero for every steering direction.
    """
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] < 1:
        raise ValueError("scaler data must be a non-empty (n, features) array")
    if kind == "standard":
        center = arr.mean(axis=0)
        scale = arr.std(axis=0)
    elif kind == "minmax":
        lo = arr.min(axis=0)
        hi = arr.max(axis=0)
        center = (lo + hi) / 2.0
        scale = (hi - lo) / 2.0
    else:
        raise ValueError(f"unknown scaler kind {kind!r}")
    if np.any(scale <= 0):
        if not allow_constant:
            raise ValueError("cannot fit a scaler on a zero-variance feature")
        scale = np.where(scale <= 0, 1.0, scale)
    return ScalerParams(center=center, scale=scale, kind=kind)


def apply_scaler(scaler: ScalerParams, data) -> np.ndarray:
    return (np.asarray(data, dtype=np.float64) - scaler.center) / scaler.scale


def invert_scaler(scaler: ScalerParams, data) -> np.ndarray:
    return np.asarray(data, dtype=np.float64) * scaler.scale + scaler.center


# ---------------------------------------------------------------------------
# model
# ---------------------------------------------------------------------------

@dataclass
class DenseLayer:
    weight: np.ndarray  # (fan_in, fan_out)
    bias: np.ndarray  # (fan_out,)


@dataclass
class BatchNormLayer:
    gamma: np.ndarray
    beta: np.ndarray
    running_mean: np.ndarray
    running_var: np.ndarray
    momentum: float = 0.9
    eps: float = 1e-5


@dataclass
class MlpModel:
    """Dense stack with per-hidden-layer activation tags, optional batch norm,
    and a linear output layer."""

    layer_dims: tuple[int, ...]
    hidden_activations: tuple[str, ...]
    batchnorm_layers: tuple[int, ...]
    dense: list[DenseLayer]
    batchnorm: dict[int, BatchNormLayer]
    snake_a: dict[int, np.ndarray]  # 0-d arrays, one per snake hidden layer

    @property
    def n_hidden(self) -> int:
        return len(self.layer_dims) - 2

    @property
    def input_dim(self) -> int:
        return self.layer_dims[0]

    @property
    def output_dim(self) -> int:
        return self.layer_dims[-1]


def init_model(
    layer_dims: Sequence[int] = DEFAULT_LAYER_DIMS,
    hidden_activations: Sequence[str] = DEFAULT_ACTIVATIONS,
    batchnorm_layers: Sequence[int] = DEFAULT_BATCHNORM_LAYERS,
    seed: int = 0,
    snake_a: float = 1.0,
    bn_momentum: float = 0.9,
    bn_eps: float = 1e-5,
) -> MlpModel:
    """Seeded uniform fan-in initialization: W ~ U(-1/sqrt(fan_in), +1/sqrt(fan_in)),
    zero biases, identity batch-norm parameters."""
    dims = tuple(int(d) for d in layer_dims)
    if len(dims) < 2 or any(d < 1 for d in dims):
        raise ValueError(f"need at least input and output dims, all positive, got {dims}")
    acts = tuple(hidden_activations)
    if len(acts) != len(dims) - 2:
        raise ValueError("need one activation tag per hidden layer")
    for tag in acts:
        if tag not in (SNAKE, TSIGMOID):
            raise ValueError(f"unknown activation tag {tag!r}")
    bn_set = tuple(sorted(int(i) for i in batchnorm_layers))
    if any(i < 0 or i >= len(dims) - 2 for i in bn_set):
        raise ValueError("batchnorm layer indices must address hidden layers")
    rng = np.random.default_rng(seed)
    dense = []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        bound = 1.0 / np.sqrt(fan_in)
        dense.append(DenseLayer(weight=rng.uniform(-bound, bound, size=(fan_in, fan_out)), bias=np.zeros(fan_out)))
    batchnorm = {
        i: BatchNormLayer(
            gamma=np.ones(dims[i + 1]),
            beta=np.zeros(dims[i + 1]),
            running_mean=np.zeros(dims[i + 1]),
            running_var=np.ones(dims[i + 1]),
            momentum=bn_momentum,
            eps=bn_eps,
        )
        for i in bn_set
    }
    snakes = {i: np.asarray(float(snake_a)) for i, tag in enumerate(acts) if tag == SNAKE}
    if snake_a <= 0:
        raise ValueError("snake frequency must be positive")
    return MlpModel(
        layer_dims=dims,
        hidden_activations=acts,
        batchnorm_layers=bn_set,
        dense=dense,
        batchnorm=batchnorm,
        snake_a=snakes,
    )


def model_parameters(model: MlpModel) -> dict[str, np.ndarray]:
    """Trainable parameters as a flat name -> array mapping (live references)."""
    params: dict[str, np.ndarray] = {}
    for i, layer in enumerate(model.dense):
        params[f"dense{i}.weight"] = layer.weight
        params[f"dense{i}.bias"] = layer.bias
    for i, bn in model.batchnorm.items():
        params[f"bn{i}.gamma"] = bn.gamma
        params[f"bn{i}.beta"] = bn.beta
    for i, a in model.snake_a.items():
        params[f"snake{i}.a"] = a
    return params


def set_model_parameters(model: MlpModel, params: dict[str, np.ndarray]) -> None:
    for i, layer in enumerate(model.dense):
        layer.weight = params[f"dense{i}.weight"]
        layer.bias = params[f"dense{i}.bias"]
    for i, bn in model.batchnorm.items():
        bn.gamma = params[f"bn{i}.gamma"]
        bn.beta = params[f"bn{i}.beta"]
    for i in model.snake_a:
        model.snake_a[i] = params[f"snake{i}.a"]


def _model_state(model: MlpModel) -> dict:
    """Deep copy of parameters plus batch-norm running statistics."""
    return {
        "params": {k: v.copy() for k, v in model_parameters(model).items()},
        "running": {i: (bn.running_mean.copy(), bn.running_var.copy()) for i, bn in model.batchnorm.items()},
    }


def _restore_model_state(model: MlpModel, state: dict) -> None:
    set_model_parameters(model, {k: v.copy() for k, v in state["params"].items()})
    for i, (mean, var) in state["running"].items():
        model.batchnorm[i].running_mean = mean.copy()
        model.batchnorm[i].running_var = var.copy()


# ---------------------------------------------------------------------------
# forward / backward
# ---------------------------------------------------------------------------

def forward(model: MlpModel, x, train: bool = False):
    """Run the network on a (batch, input_dim) array of normalized inputs.

    Inference mode uses batch-norm running statistics, so single rows and
    batches produce identical per-row outputs.  Training mode uses batch
    statistics, updates the running averages in place, and also returns the
    cache needed by :func:`backward`.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != model.input_dim:
        raise ValueError(f"expected input of shape (batch, {model.input_dim}), got {x.shape}")
    cache: list[dict] = []
    h = x
    for i in range(model.n_hidden):
        layer = model.dense[i]
        z = h @ layer.weight + layer.bias
        bn_vars = None
        if i in model.batchnorm:
            bn = model.batchnorm[i]
            if train:
                if z.shape[0] < 2:
                    raise ValueError("training-mode batch norm needs at least 2 rows")
                mean = z.mean(axis=0)
                var = z.var(axis=0)
                inv_std = 1.0 / np.sqrt(var + bn.eps)
                x_hat = (z - mean) * inv_std
                bn.running_mean = bn.momentum * bn.running_mean + (1.0 - bn.momentum) * mean
                bn.running_var = bn.momentum * bn.running_var + (1.0 - bn.momentum) * var
            else:
                inv_std = 1.0 / np.sqrt(bn.running_var + bn.eps)
                x_hat = (z - bn.running_mean) * inv_std
            a_in = bn.gamma * x_hat + bn.beta
            bn_vars = (x_hat, inv_std)
        else:
            a_in = z
        tag = model.hidden_activations[i]
        if tag == SNAKE:
            out, dydx = snake_activation(a_in, float(model.snake_a[i]))
        else:
            out, dydx = tsigmoid_activation(a_in)
        if train:
            cache.append({"h_in": h, "bn": bn_vars, "a_in": a_in, "dydx": dydx})
        h = out
    out_layer = model.dense[-1]
    y = h @ out_layer.weight + out_layer.bias
    if not train:
        return y
    cache.append({"h_in": h})
    return y, cache


def mse_loss(pred, target) -> float:
    """Mean squared error over every entry of the batch."""
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    return float(np.mean((pred - target) ** 2))


def backward(model: MlpModel, cache: list[dict], pred, target) -> dict[str, np.ndarray]:
    """Gradients of the MSE loss for every trainable parameter.

    ``cache`` must come from a training-mode forward on the same batch.
    """
    if not cache or len(cache) != model.n_hidden + 1:
        raise ValueError("backward needs the cache from a training-mode forward pass")
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if pred.shape != target.shape:
        raise ValueError(f"prediction shape {pred.shape} does not match target shape {target.shape}")
    grads: dict[str, np.ndarray] = {}
    batch = pred.shape[0]
    d = 2.0 * (pred - target) / pred.size

    out_layer = model.dense[-1]
    h_last = cache[-1]["h_in"]
    grads[f"dense{len(model.dense) - 1}.weight"] = h_last.T @ d
    grads[f"dense{len(model.dense) - 1}.bias"] = d.sum(axis=0)
    d = d @ out_layer.weight.T

    for i in range(model.n_hidden - 1, -1, -1):
        layer_cache = cache[i]
        tag = model.hidden_activations[i]
        a_in = layer_cache["a_in"]
        if tag == SNAKE:
            a = float(model.snake_a[i])
            grads[f"snake{i}.a"] = np.asarray(np.sum(d * snake_frequency_grad(a_in, a)))
        d = d * layer_cache["dydx"]
        if i in model.batchnorm:
            bn = model.batchnorm[i]
            x_hat, inv_std = layer_cache["bn"]
            grads[f"bn{i}.gamma"] = np.sum(d * x_hat, axis=0)
            grads[f"bn{i}.beta"] = np.sum(d, axis=0)
            d_gamma_scaled = d * bn.gamma
            d = (inv_std / batch) * (
                batch * d_gamma_scaled
                - d_gamma_scaled.sum(axis=0)
                - x_hat * np.sum(d_gamma_scaled * x_hat, axis=0)
            )
        layer = model.dense[i]
        h_in = layer_cache["h_in"]
        grads[f"dense{i}.weight"] = h_in.T @ d
        grads[f"dense{i}.bias"] = d.sum(axis=0)
        if i > 0:
            d = d @ layer.weight.T
    return grads


# ---------------------------------------------------------------------------
# Adam
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.0005
    batch_size: int = 1024
    epochs: int = 1200
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning rate must be positive")
        if self.batch_size < 1:
            raise ValueError("batch size must be at least 1")
        if self.epochs < 1:
            raise ValueError("epoch count must be at least 1")


def init_adam_state(params: dict[str, np.ndarray]) -> dict[str, dict[str, np.ndarray]]:
    return {name: {"m": np.zeros_like(p), "v": np.zeros_like(p)} for name, p in params.items()}


def adam_step(
    params: dict[str, np.ndarray],
    grads: dict[str, np.ndarray],
    state: dict[str, dict[str, np.ndarray]],
    t: int,
    cfg: TrainConfig,
) -> tuple[dict[str, np.ndarray], dict[str, dict[str, np.ndarray]]]:
    """One bias-corrected Adam update.  Pure: returns fresh parameter and
    state dicts, leaving the inputs untouched.  ``t`` is the 1-based step."""
    if t < 1:
        raise ValueError("Adam step index is 1-based")
    if set(params) != set(grads) or set(params) != set(state):
        raise ValueError("parameter, gradient, and state names must match")
    new_params: dict[str, np.ndarray] = {}
    new_state: dict[str, dict[str, np.ndarray]] = {}
    bc1 = 1.0 - cfg.beta1**t
    bc2 = 1.0 - cfg.beta2**t
    for name, p in params.items():
        g = grads[name]
        if g.shape != p.shape:
            raise ValueError(f"gradient shape mismatch for {name}")
        m = cfg.beta1 * state[name]["m"] + (1.0 - cfg.beta1) * g
        v = cfg.beta2 * state[name]["v"] + (1.0 - cfg.beta2) * g**2
        update = cfg.learning_rate * (m / bc1) / (np.sqrt(v / bc2) + cfg.epsilon)
        new_params[name] = p - update
        new_state[name] = {"m": m, "v": v}
    return new_params, new_state


# ---------------------------------------------------------------------------
# training loop
# ---------------------------------------------------------------------------

@dataclass
class FitHistory:
    train_loss: list[float] = field(default_factory=list)
    val_loss: list[float] = field(default_factory=list)
    best_epoch: int = -1

    @property
    def best_val_loss(self) -> float:
        return self.val_loss[self.best_epoch]


def fit(
    train_x,
    train_y,
    val_x,
    val_y,
    cfg: TrainConfig,
    layer_dims: Sequence[int] = DEFAULT_LAYER_DIMS,
    hidden_activations: Sequence[str] = DEFAULT_ACTIVATIONS,
    batchnorm_layers: Sequence[int] = DEFAULT_BATCHNORM_LAYERS,
    snake_a_init: float = DEFAULT_SNAKE_A_INIT,
) -> tuple[MlpModel, FitHistory]:
    """Train on normalized data with seeded shuffling; returns the parameters
    from the epoch with the lowest validation MSE plus the loss trace.

    Fully deterministic for a fixed config: initialization and batch order
    derive from ``cfg.seed``.
    """
    train_x = np.asarray(train_x, dtype=np.float64)
    train_y = np.asarray(train_y, dtype=np.float64)
    val_x = np.asarray(val_x, dtype=np.float64)
    val_y = np.asarray(val_y, dtype=np.float64)
    if train_x.shape[0] == 0 or val_x.shape[0] == 0:
        raise ValueError("training and validation splits must be non-empty")
    if train_x.shape[0] != train_y.shape[0] or val_x.shape[0] != val_y.shape[0]:
        raise ValueError("inputs and targets must have matching row counts")

    model = init_model(
        layer_dims=layer_dims,
        hidden_activations=hidden_activations,
        batchnorm_layers=batchnorm_layers,
        seed=cfg.seed,
        snake_a=snake_a_init,
    )
    params = {k: v.copy() for k, v in model_parameters(model).items()}
    state = init_adam_state(params)
    shuffle_rng = np.random.default_rng(cfg.seed)
    history = FitHistory()
    best = np.inf
    best_state = None
    n = train_x.shape[0]
    step = 0
    for epoch in range(cfg.epochs):
        order = shuffle_rng.permutation(n)
        sq_sum = 0.0
        for start in range(0, n, cfg.batch_size):
            batch_idx = order[start : start + cfg.batch_size]
            if batch_idx.size < 2 and model.batchnorm:
                continue  # a 1-row tail batch cannot feed batch statistics
            xb = train_x[batch_idx]
            yb = train_y[batch_idx]
            set_model_parameters(model, params)
            pred, cache = forward(model, xb, train=True)
            sq_sum += float(np.sum((pred - yb) ** 2))
            grads = backward(model, cache, pred, yb)
            step += 1
            params, state = adam_step(params, grads, state, step, cfg)
            for i in model.snake_a:
                params[f"snake{i}.a"] = np.maximum(params[f"snake{i}.a"], _SNAKE_A_FLOOR)
        set_model_parameters(model, params)
        history.train_loss.append(sq_sum / (n * train_y.shape[1]))
        val_pred = forward(model, val_x, train=False)
        val_loss = mse_loss(val_pred, val_y)
        history.val_loss.append(val_loss)
        if val_loss < best:
            best = val_loss
            best_state = _model_state(model)
            history.best_epoch = epoch
    if best_state is not None:
        _restore_model_state(model, best_state)
    return model, history


# ---------------------------------------------------------------------------
# prediction
# ---------------------------------------------------------------------------

def predict_phase_matrix(model: MlpModel, scalers: ScalerPair, bpas) -> np.ndarray:
    """De-normalized, wrapped phase predictions for an (m, 2) array of
    (az_deg, el_deg) rows; returns (m, output_dim) degrees."""
    bpas = np.atleast_2d(np.asarray(bpas, dtype=np.float64))
    normalized = apply_scaler(scalers.inputs, bpas)
    pred = forward(model, normalized, train=False)
    return wrap_phase_deg(invert_scaler(scalers.outputs, pred))


def predict_phases(model: MlpModel, scalers: ScalerPair, bpa: BeamPointingAngle) -> PhaseVector:
    """Predicted per-element phases for one beam pointing angle."""
    row = predict_phase_matrix(model, scalers, [[bpa.az_deg, bpa.el_deg]])[0]
    return PhaseVector(row)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

_MODEL_FORMAT = "beamlab-mlp-v1"


@dataclass
class TrainedRegressor:
    """A trained model bundled with its feature scalers and training config."""

    model: MlpModel
    scalers: ScalerPair
    config: TrainConfig

    def predict(self, bpa: BeamPointingAngle) -> PhaseVector:
        return predict_phases(self.model, self.scalers, bpa)


def _scaler_to_dict(s: ScalerParams) -> dict:
    return {"kind": s.kind, "center": s.center.tolist(), "scale": s.scale.tolist()}


def _scaler_from_dict(doc: dict) -> ScalerParams:
    return ScalerParams(
        center=np.asarray(doc["center"], dtype=np.float64),
        scale=np.asarray(doc["scale"], dtype=np.float64),
        kind=doc["kind"],
    )


def save_model(regressor: TrainedRegressor, path) -> None:
    """Serialize model, scalers, and training config as versioned JSON.

    Weights are stored as row-major flattened lists at full float precision,
    so a load produces bit-identical predictions.
    """
    model = regressor.model
    doc = {
        "format": _MODEL_FORMAT,
        "layer_dims": list(model.layer_dims),
        "hidden_activations": list(model.hidden_activations),
        "batchnorm_layers": list(model.batchnorm_layers),
        "dense": [
            {"weight": layer.weight.ravel().tolist(), "bias": layer.bias.tolist()}
            for layer in model.dense
        ],
        "batchnorm": {
            str(i): {
                "gamma": bn.gamma.tolist(),
                "beta": bn.beta.tolist(),
                "running_mean": bn.running_mean.tolist(),
                "running_var": bn.running_var.tolist(),
                "momentum": bn.momentum,
                "eps": bn.eps,
            }
            for i, bn in model.batchnorm.items()
        },
        "snake_a": {str(i): float(a) for i, a in model.snake_a.items()},
        "scalers": {
            "inputs": _scaler_to_dict(regressor.scalers.inputs),
            "outputs": _scaler_to_dict(regressor.scalers.outputs),
        },
        "train_config": asdict(regressor.config),
    }
    with open(path, "w") as fh:
        json.dump(doc, fh)


def load_model(path) -> TrainedRegressor:
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("format") != _MODEL_FORMAT:
        raise ValueError(f"unrecognized model file format in {path}")
    dims = tuple(doc["layer_dims"])
    dense = []
    for spec, (fan_in, fan_out) in zip(doc["dense"], zip(dims[:-1], dims[1:])):
        dense.append(
            DenseLayer(
                weight=np.asarray(spec["weight"], dtype=np.float64).reshape(fan_in, fan_out),
                bias=np.asarray(spec["bias"], dtype=np.float64),
            )
        )
    batchnorm = {
        int(i): BatchNormLayer(
            gamma=np.asarray(spec["gamma"], dtype=np.float64),
            beta=np.asarray(spec["beta"], dtype=np.float64),
            running_mean=np.asarray(spec["running_mean"], dtype=np.float64),
            running_var=np.asarray(spec["running_var"], dtype=np.float64),
            momentum=spec["momentum"],
            eps=spec["eps"],
        )
        for i, spec in doc["batchnorm"].items()
    }
    model = MlpModel(
        layer_dims=dims,
        hidden_activations=tuple(doc["hidden_activations"]),
        batchnorm_layers=tuple(doc["batchnorm_layers"]),
        dense=dense,
        batchnorm=batchnorm,
        snake_a={int(i): np.asarray(a) for i, a in doc["snake_a"].items()},
    )
    scalers = ScalerPair(
        inputs=_scaler_from_dict(doc["scalers"]["inputs"]),
        outputs=_scaler_from_dict(doc["scalers"]["outputs"]),
    )
    return TrainedRegressor(model=model, scalers=scalers, config=TrainConfig(**doc["train_config"]))
