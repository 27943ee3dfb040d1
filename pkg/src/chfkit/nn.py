"""From-scratch feedforward CHF regressor.

Default topology 5-61-51-28-39-26-21-20-14-1 (8471 trainable parameters):
five physical inputs (tube diameter, heated length, pressure, mass flux,
equilibrium quality), eight ReLU hidden layers, one linear output.
Features and targets are z-score normalized with statistics taken from
the training split and persisted inside the model, so inference consumes
and produces physical units. Training is plain mini-batch Adam on the
mean-squared error with inverted dropout (rate 0.01) after the first
hidden layer, learning-rate decay on validation plateau, and early
stopping. Everything is reproducible bit-for-bit from the seeds.

Model file layout (little-endian, documented for external tooling):

    bytes 0-4    magic b"CHFNN"
    u16          format version (1)
    i64          seed recorded at initialization
    u32          number of layer sizes (= hidden layers + 2)
    u32 * n      layer sizes
    per layer:   weights, float64, row-major (n_in rows, n_out columns),
                 then biases, float64 (n_out)
    float64 * 5  input means
    float64 * 5  input scales
    float64      output mean
    float64      output scale
"""

import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import (DivergenceError, EmptyDataset, FormatError,
                     NonFiniteInput, ShapeError, VersionError)

DEFAULT_LAYER_SIZES = (5, 61, 51, 28, 39, 26, 21, 20, 14, 1)
MAGIC = b"CHFNN"
FORMAT_VERSION = 1


@dataclass
class NnModel:
    layer_sizes: tuple
    weights: list                 # W[i]: (n_in, n_out) float64
    biases: list                  # b[i]: (n_out,) float64
    input_mean: np.ndarray
    input_scale: np.ndarray
    output_mean: float
    output_scale: float
    seed: int
    dropout_rate: float = 0.01
    dropout_rng: np.random.Generator = field(
        default_factory=lambda: np.random.default_rng(0), repr=False)

    @property
    def n_parameters(self) -> int:
        return sum(w.size + b.size for w, b in zip(self.weights, self.biases))


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.01
    plateau_patience: int = 20
    plateau_factor: float = 0.5
    min_learning_rate: float = 1e-5
    dropout_rate: float = 0.01
    batch_size: int = 64
    max_epochs: int = 2000
    early_stop_patience: int = 100
    validation_fraction: float = 0.2
    seed: int = 0


class PlateauScheduler:
    """Multiply the learning rate by `factor` whenever the monitored loss
    fails to improve for `patience` consecutive epochs (never below
    `min_lr`); feed one monitored value per epoch via step()."""

    def __init__(self, lr: float, patience: int, factor: float, min_lr: float):
        self.lr = lr
        self.patience = patience
        self.factor = factor
        self.min_lr = min_lr
        self.best = np.inf
        self.wait = 0

    def step(self, monitored: float) -> float:
        if monitored < self.best:
            self.best = monitored
            self.wait = 0
        else:
            self.wait += 1
            if self.wait >= self.patience:
                self.lr = max(self.lr * self.factor, self.min_lr)
                self.wait = 0
        return self.lr


def init_model(seed: int, layer_sizes=DEFAULT_LAYER_SIZES) -> NnModel:
    """He-initialized weights, zero biases, identity normalization."""
    rng = np.random.default_rng(seed)
    sizes = tuple(int(s) for s in layer_sizes)
    weights, biases = [], []
    for n_in, n_out in zip(sizes[:-1], sizes[1:]):
        weights.append(rng.normal(0.0, np.sqrt(2.0 / n_in), size=(n_in, n_out)))
        biases.append(np.zeros(n_out))
    return NnModel(
        layer_sizes=sizes, weights=weights, biases=biases,
        input_mean=np.zeros(sizes[0]), input_scale=np.ones(sizes[0]),
        output_mean=0.0, output_scale=1.0, seed=int(seed),
        dropout_rng=np.random.default_rng(seed))


def _check_features(model: NnModel, features) -> np.ndarray:
    x = np.asarray(features, dtype=float)
    if x.ndim == 1:
        x = x[None, :]
    if x.ndim != 2 or x.shape[1] != model.layer_sizes[0]:
        raise ShapeError(
            f"features have shape {np.asarray(features).shape}, expected "
            f"(n, {model.layer_sizes[0]})")
    if not np.all(np.isfinite(x)):
        raise NonFiniteInput("features contain NaN or infinity")
    return x


def _forward_pass(model: NnModel, x_norm: np.ndarray, dropout_mask=None):
    """Returns (normalized output (n,), post-activation list) for backprop."""
    acts = [x_norm]
    h = x_norm
    n_weight_layers = len(model.weights)
    for i in range(n_weight_layers - 1):
        h = np.maximum(h @ model.weights[i] + model.biases[i], 0.0)
        if i == 0 and dropout_mask is not None:
            h = h * dropout_mask
        acts.append(h)
    out = h @ model.weights[-1] + model.biases[-1]
    return out[:, 0], acts


def forward(model: NnModel, features, mode: str = "infer") -> np.ndarray:
    """Predictions in physical units; `mode="train"` applies dropout
    using the model's seeded generator (stateful), `mode="infer"` is
    deterministic."""
    if mode not in ("train", "infer"):
        raise ValueError(f"mode must be 'train' or 'infer', got {mode!r}")
    x = _check_features(model, features)
    x_norm = (x - model.input_mean) / model.input_scale
    mask = None
    if mode == "train" and model.dropout_rate > 0.0:
        keep = 1.0 - model.dropout_rate
        mask = (model.dropout_rng.random((x.shape[0], model.layer_sizes[1]))
                < keep) / keep
    y_norm, _ = _forward_pass(model, x_norm, mask)
    return y_norm * model.output_scale + model.output_mean


def _loss_and_gradients(model: NnModel, x_norm, y_norm, dropout_mask=None):
    """MSE on normalized targets and its gradients w.r.t. every W and b."""
    out, acts = _forward_pass(model, x_norm, dropout_mask)
    n = x_norm.shape[0]
    resid = out - y_norm
    loss = float(resid @ resid) / n
    d_out = (2.0 / n) * resid[:, None]

    grads_w = [None] * len(model.weights)
    grads_b = [None] * len(model.biases)
    delta = d_out
    for i in range(len(model.weights) - 1, -1, -1):
        grads_w[i] = acts[i].T @ delta
        grads_b[i] = delta.sum(axis=0)
        if i > 0:
            delta = delta @ model.weights[i].T
            if i - 1 == 0 and dropout_mask is not None:
                delta = delta * dropout_mask
            delta = delta * (acts[i] > 0.0)
    return loss, grads_w, grads_b


def _split(n: int, validation_fraction: float, rng: np.random.Generator):
    idx = rng.permutation(n)
    n_val = int(round(n * validation_fraction))
    if 0 < validation_fraction and n_val == 0 and n > 1:
        n_val = 1
    return idx[n_val:], idx[:n_val]


def train(model: NnModel, dataset, config: TrainConfig | None = None):
    """Train in place on (features, chf) pairs; returns (model, history).

    History holds per-epoch lists: "train_loss", "val_loss",
    "learning_rate" (validation entries are NaN when the split is empty).
    """
    if config is None:
        config = TrainConfig()
    pairs = list(dataset)
    if not pairs:
        raise EmptyDataset("training dataset is empty")
    x = np.array([np.asarray(f, dtype=float) for f, _ in pairs])
    y = np.array([float(t) for _, t in pairs])
    if x.ndim != 2 or x.shape[1] != model.layer_sizes[0]:
        raise ShapeError(
            f"training features have shape {x.shape}, expected "
            f"(n, {model.layer_sizes[0]})")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise NonFiniteInput("training data contains NaN or infinity")

    rng = np.random.default_rng(config.seed)
    model.dropout_rate = config.dropout_rate
    model.dropout_rng = rng  # one stream: split, shuffles, dropout
    train_idx, val_idx = _split(len(pairs), config.validation_fraction, rng)

    # normalization statistics from the training split only
    model.input_mean = x[train_idx].mean(axis=0)
    scale = x[train_idx].std(axis=0)
    model.input_scale = np.where(scale > 0.0, scale, 1.0)
    model.output_mean = float(y[train_idx].mean())
    out_scale = float(y[train_idx].std())
    model.output_scale = out_scale if out_scale > 0.0 else 1.0

    xn = (x - model.input_mean) / model.input_scale
    yn = (y - model.output_mean) / model.output_scale
    xt, yt = xn[train_idx], yn[train_idx]
    xv, yv = xn[val_idx], yn[val_idx]

    m_w = [np.zeros_like(w) for w in model.weights]
    v_w = [np.zeros_like(w) for w in model.weights]
    m_b = [np.zeros_like(b) for b in model.biases]
    v_b = [np.zeros_like(b) for b in model.biases]
    beta1, beta2, eps = 0.9, 0.999, 1e-8
    step = 0
    scheduler = PlateauScheduler(config.learning_rate, config.plateau_patience,
                                 config.plateau_factor, config.min_learning_rate)
    lr = scheduler.lr
    history = {"train_loss": [], "val_loss": [], "learning_rate": []}
    best_seen = np.inf
    stale_epochs = 0
    keep = 1.0 - config.dropout_rate

    for _ in range(config.max_epochs):
        order = rng.permutation(len(xt))
        epoch_loss = 0.0
        for start in range(0, len(xt), config.batch_size):
            batch = order[start:start + config.batch_size]
            xb, yb = xt[batch], yt[batch]
            mask = None
            if config.dropout_rate > 0.0:
                mask = (rng.random((len(batch), model.layer_sizes[1]))
                        < keep) / keep
            loss, gw, gb = _loss_and_gradients(model, xb, yb, mask)
            if not np.isfinite(loss):
                raise DivergenceError(f"training loss became {loss}")
            epoch_loss += loss * len(batch)
            step += 1
            c1 = 1.0 - beta1 ** step
            c2 = 1.0 - beta2 ** step
            for params, grads, ms, vs in (
                    (model.weights, gw, m_w, v_w),
                    (model.biases, gb, m_b, v_b)):
                for j, g in enumerate(grads):
                    ms[j] = beta1 * ms[j] + (1.0 - beta1) * g
                    vs[j] = beta2 * vs[j] + (1.0 - beta2) * g * g
                    params[j] -= lr * (ms[j] / c1) / (np.sqrt(vs[j] / c2) + eps)

        history["train_loss"].append(epoch_loss / len(xt))
        if len(xv):
            val_out, _ = _forward_pass(model, xv)
            val_resid = val_out - yv
            val_loss = float(val_resid @ val_resid) / len(xv)
        else:
            val_loss = np.nan
        history["val_loss"].append(val_loss)
        history["learning_rate"].append(lr)
        if not np.isfinite(val_loss) and len(xv):
            raise DivergenceError(f"validation loss became {val_loss}")

        monitored = val_loss if len(xv) else history["train_loss"][-1]
        if monitored < best_seen:
            best_seen = monitored
            stale_epochs = 0
        else:
            stale_epochs += 1
        lr = scheduler.step(monitored)
        if stale_epochs >= config.early_stop_patience:
            break
    return model, history


def gradient_check(model: NnModel, sample, step: float = 1e-5,
                   n_params: int = 200, seed: int = 0,
                   grad_fn=None) -> float:
    """Max relative error between analytic and central-difference gradients.

    Dropout is disabled. `grad_fn` (same signature and return layout as
    the internal analytic-gradient routine) exists for fault injection in
    tests. Relative error uses max(|analytic|, |numeric|, 1e-6) as the
    denominator.
    """
    features, target = sample
    x = _check_features(model, features)
    x_norm = (x - model.input_mean) / model.input_scale
    y = np.atleast_1d(np.asarray(target, dtype=float))
    y_norm = (y - model.output_mean) / model.output_scale

    if grad_fn is None:
        grad_fn = lambda m, xn, yn: _loss_and_gradients(m, xn, yn)[1:]
    gw, gb = grad_fn(model, x_norm, y_norm)

    flat = []
    for i, w in enumerate(model.weights):
        flat.extend(("w", i, r, c) for r in range(w.shape[0])
                    for c in range(w.shape[1]))
    for i, b in enumerate(model.biases):
        flat.extend(("b", i, j, None) for j in range(b.size))
    rng = np.random.default_rng(seed)
    picks = rng.choice(len(flat), size=min(n_params, len(flat)), replace=False)

    worst = 0.0
    for p in picks:
        kind, i, a, b_idx = flat[p]
        if kind == "w":
            ref = model.weights[i]
            key = (a, b_idx)
            analytic = gw[i][key]
        else:
            ref = model.biases[i]
            key = a
            analytic = gb[i][key]
        orig = ref[key]
        ref[key] = orig + step
        loss_hi, _, _ = _loss_and_gradients(model, x_norm, y_norm)
        ref[key] = orig - step
        loss_lo, _, _ = _loss_and_gradients(model, x_norm, y_norm)
        ref[key] = orig
        numeric = (loss_hi - loss_lo) / (2.0 * step)
        err = abs(analytic - numeric) / max(abs(analytic), abs(numeric), 1e-6)
        worst = max(worst, err)
    return worst


def save_model(model: NnModel, file) -> None:
    blob = bytearray()
    blob += MAGIC
    blob += struct.pack("<H", FORMAT_VERSION)
    blob += struct.pack("<q", model.seed)
    blob += struct.pack("<I", len(model.layer_sizes))
    blob += struct.pack(f"<{len(model.layer_sizes)}I", *model.layer_sizes)
    for w, b in zip(model.weights, model.biases):
        blob += np.ascontiguousarray(w, dtype="<f8").tobytes()
        blob += np.ascontiguousarray(b, dtype="<f8").tobytes()
    blob += np.ascontiguousarray(model.input_mean, dtype="<f8").tobytes()
    blob += np.ascontiguousarray(model.input_scale, dtype="<f8").tobytes()
    blob += struct.pack("<d", model.output_mean)
    blob += struct.pack("<d", model.output_scale)
    with open(file, "wb") as f:
        f.write(bytes(blob))


def load_model(file) -> NnModel:
    with open(file, "rb") as f:
        blob = f.read()
    if len(blob) < len(MAGIC) + 2 or blob[:len(MAGIC)] != MAGIC:
        raise FormatError("not a model file (bad magic)")
    pos = len(MAGIC)
    version, = struct.unpack_from("<H", blob, pos); pos += 2
    if version != FORMAT_VERSION:
        raise VersionError(f"model format version {version}, expected "
                           f"{FORMAT_VERSION}")
    try:
        seed, = struct.unpack_from("<q", blob, pos); pos += 8
        n_sizes, = struct.unpack_from("<I", blob, pos); pos += 4
        sizes = struct.unpack_from(f"<{n_sizes}I", blob, pos); pos += 4 * n_sizes
    except struct.error:
        raise FormatError("truncated model header") from None
    if n_sizes < 2 or any(s < 1 for s in sizes):
        raise FormatError(f"implausible layer sizes {sizes}")
    n_weights = sum(a * b + b for a, b in zip(sizes[:-1], sizes[1:]))
    expected = pos + 8 * (n_weights + 2 * sizes[0] + 2)
    if len(blob) != expected:
        raise FormatError(
            f"payload is {len(blob)} bytes, layer sizes require {expected}")

    def take(n):
        nonlocal pos
        arr = np.frombuffer(blob, dtype="<f8", count=n, offset=pos).copy()
        pos += 8 * n
        return arr

    weights, biases = [], []
    for n_in, n_out in zip(sizes[:-1], sizes[1:]):
        weights.append(take(n_in * n_out).reshape(n_in, n_out))
        biases.append(take(n_out))
    input_mean = take(sizes[0])
    input_scale = take(sizes[0])
    output_mean = float(take(1)[0])
    output_scale = float(take(1)[0])
    return NnModel(
        layer_sizes=tuple(int(s) for s in sizes), weights=weights,
        biases=biases, input_mean=input_mean, input_scale=input_scale,
        output_mean=output_mean, output_scale=output_scale, seed=seed,
        dropout_rng=np.random.default_rng(seed))
