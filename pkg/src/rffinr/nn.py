"""Dense ReLU coordinate MLP written directly against numpy.

Layer ``l`` computes ``z = h @ W_l.T + b_l`` with ``W_l`` of shape
``(out_l, in_l)``. Hidden layers apply ReLU, the output layer is linear.
The loss is the mean squared error averaged over every pixel and channel.
"""

from dataclasses import dataclass, field

import numpy as np

BINARY16_MAX = 65504.0


class DivergenceError(RuntimeError):
    """Raised when a loss or gradient stops being finite."""

    def __init__(self, message, iteration=None):
        super().__init__(message)
        self.iteration = iteration


@dataclass(frozen=True)
class MlpArch:
    input_dim: int
    hidden_layers: int
    hidden_width: int
    output_dim: int = 3

    def __post_init__(self):
        for name in ("input_dim", "hidden_layers", "hidden_width", "output_dim"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")

    @property
    def layer_dims(self):
        """``[(in, out), ...]`` for every dense layer, output layer last."""
        dims = [self.input_dim] + [self.hidden_width] * self.hidden_layers + [self.output_dim]
        return list(zip(dims[:-1], dims[1:]))

    @property
    def parameter_count(self):
        return sum(i * o + o for i, o in self.layer_dims)


def parameter_count(arch):
    return arch.parameter_count


@dataclass
class MlpParams:
    weights: list
    biases: list

    @property
    def arrays(self):
        """All parameter arrays in serialization order: W0, b0, W1, b1, ..."""
        out = []
        for w, b in zip(self.weights, self.biases):
            out.extend((w, b))
        return out

    @classmethod
    def from_arrays(cls, arrays):
        return cls(list(arrays[0::2]), list(arrays[1::2]))

    @property
    def dtype(self):
        return self.weights[0].dtype

    def astype(self, dtype):
        return MlpParams.from_arrays([a.astype(dtype) for a in self.arrays])

    def copy(self):
        return MlpParams.from_arrays([a.copy() for a in self.arrays])

    def zeros_like(self):
        return MlpParams.from_arrays([np.zeros_like(a) for a in self.arrays])

    def is_finite(self):
        return all(np.isfinite(a).all() for a in self.arrays)

    def flatten(self):
        return np.concatenate([a.ravel() for a in self.arrays])

    def check_arch(self, arch):
        dims = arch.layer_dims
        if len(self.weights) != len(dims) or len(self.biases) != len(dims):
            raise ValueError(f"expected {len(dims)} layers, params have {len(self.weights)}")
        for k, ((i, o), w, b) in enumerate(zip(dims, self.weights, self.biases)):
            if w.shape != (o, i) or b.shape != (o,):
                raise ValueError(
                    f"layer {k}: expected W {(o, i)} and b {(o,)}, got {w.shape} and {b.shape}"
                )


def mlp_init(arch, seed, dtype=np.float32):
    """Glorot-uniform weights, zero biases, deterministic in ``seed``."""
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for fan_in, fan_out in arch.layer_dims:
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_out, fan_in)).astype(dtype))
        biases.append(np.zeros(fan_out, dtype=dtype))
    return MlpParams(weights, biases)


def _check_features(params, features):
    features = np.asarray(features)
    if features.ndim != 2:
        raise ValueError(f"features must be a 2-D batch, got shape {features.shape}")
    expected = params.weights[0].shape[1]
    if features.shape[1] != expected:
        raise ValueError(
            f"feature length {features.shape[1]} does not match input_dim {expected}"
        )
    return features


def _forward_cached(params, features):
    h = features.astype(params.dtype, copy=False)
    acts = [h]
    last = len(params.weights) - 1
    for k, (w, b) in enumerate(zip(params.weights, params.biases)):
        h = h @ w.T
        h += b
        if k < last:
            np.maximum(h, 0, out=h)
        acts.append(h)
    return acts


def mlp_forward(params, features):
    """Evaluate the network on a ``(batch, input_dim)`` array."""
    features = _check_features(params, features)
    return _forward_cached(params, features)[-1]


def mlp_loss_and_grads(params, features, targets):
    """MSE over all outputs and its exact gradient for every weight and bias."""
    features = _check_features(params, features)
    targets = np.asarray(targets)
    if features.shape[0] == 0:
        raise ValueError("empty batch")
    if targets.shape != (features.shape[0], params.weights[-1].shape[0]):
        raise ValueError(
            f"targets shape {targets.shape} does not match batch/output "
            f"{(features.shape[0], params.weights[-1].shape[0])}"
        )
    acts = _forward_cached(params, features)
    err = acts[-1] - targets.astype(params.dtype, copy=False)
    mse = float(np.mean(err * err, dtype=np.float64))

    g = err * params.dtype.type(2.0 / err.size)
    # bias gradients as a matmul against ones: much faster than sum(axis=0)
    ones = np.ones(g.shape[0], dtype=g.dtype)
    n_layers = len(params.weights)
    gw = [None] * n_layers
    gb = [None] * n_layers
    for k in range(n_layers - 1, -1, -1):
        gw[k] = g.T @ acts[k]
        gb[k] = ones @ g
        if k:
            g = g @ params.weights[k]
            g *= acts[k] > 0
    return mse, MlpParams(gw, gb)


@dataclass
class AdamState:
    first_moment: MlpParams
    second_moment: MlpParams
    t: int = 0
    lr: float = 2e-4
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8

    @classmethod
    def zeros(cls, params, **hyper):
        return cls(params.zeros_like(), params.zeros_like(), **hyper)


def adam_step(state, params, grads):
    """One bias-corrected Adam update. Returns ``(new_state, new_params)``.

    Non-finite gradients raise :class:`DivergenceError` and leave both inputs
    untouched.
    """
    if not grads.is_finite():
        raise DivergenceError(f"non-finite gradient at step {state.t + 1}", state.t + 1)
    t = state.t + 1
    b1, b2 = state.beta1, state.beta2
    corr1 = 1.0 - b1**t
    corr2 = 1.0 - b2**t
    new_m, new_v, new_p = [], [], []
    for p, g, m, v in zip(
        params.arrays, grads.arrays, state.first_moment.arrays, state.second_moment.arrays
    ):
        dt = p.dtype.type
        m = dt(b1) * m + dt(1.0 - b1) * g
        v = dt(b2) * v + dt(1.0 - b2) * (g * g)
        m_hat = m / dt(corr1)
        v_hat = v / dt(corr2)
        new_p.append(p - dt(state.lr) * m_hat / (np.sqrt(v_hat) + dt(state.epsilon)))
        new_m.append(m)
        new_v.append(v)
    new_params = MlpParams.from_arrays(new_p)
    if not new_params.is_finite():
        raise DivergenceError(f"non-finite parameters after step {t}", t)
    new_state = AdamState(
        MlpParams.from_arrays(new_m),
        MlpParams.from_arrays(new_v),
        t,
        state.lr,
        b1,
        b2,
        state.epsilon,
    )
    return new_state, new_params


@dataclass
class QuantizedParams:
    """Parameters stored as IEEE 754 binary16, plus how many values saturated."""

    arrays: list
    saturated: int = field(default=0)

    def to_bytes(self):
        return b"".join(a.astype("<f2").tobytes() for a in self.arrays)


def quantize_binary16(params):
    """Round every parameter to binary16 (round-to-nearest-even).

    Values beyond the binary16 range saturate to +-65504 instead of becoming
    infinite; the number of such values is reported on the result.
    """
    arrays, saturated = [], 0
    for a in params.arrays:
        if not np.isfinite(a).all():
            raise ValueError("cannot quantize non-finite parameters")
        wide = a.astype(np.float64)
        over = np.abs(wide) > BINARY16_MAX
        saturated += int(over.sum())
        # float64 -> float16 rounds once, avoiding double rounding via float32
        arrays.append(np.clip(wide, -BINARY16_MAX, BINARY16_MAX).astype(np.float16))
    return QuantizedParams(arrays, saturated)


def dequantize_binary16(qparams, dtype=np.float32):
    """Exact widening of binary16 values back to training precision."""
    return MlpParams.from_arrays([a.astype(dtype) for a in qparams.arrays])
