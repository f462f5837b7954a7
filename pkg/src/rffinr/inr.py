"""Overfitting a coordinate MLP to a single image, and evaluating it back."""

import logging
from dataclasses import dataclass, field

import numpy as np

from .encoding import EncodingConfig, coord_grid, encode_coords
from .imageio import as_image
from .nn import AdamState, DivergenceError, MlpArch, MlpParams, adam_step, mlp_forward, mlp_init, mlp_loss_and_grads

logger = logging.getLogger(__name__)

DEFAULT_LR = 2e-4
DEFAULT_ITERATIONS = 50_000


@dataclass(frozen=True)
class TrainConfig:
    arch: MlpArch
    encoding: EncodingConfig
    lr: float = DEFAULT_LR
    iterations: int = DEFAULT_ITERATIONS
    init_seed: int = 0
    log_every: int = 100
    batch_size: int = 0  # 0: full image every step

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if not self.lr > 0:
            raise ValueError("lr must be positive")
        if self.arch.input_dim != self.encoding.mapping_size:
            raise ValueError(
                f"arch.input_dim={self.arch.input_dim} must equal "
                f"mapping_size={self.encoding.mapping_size}"
            )


@dataclass
class TrainedModel:
    params: MlpParams
    encoding: EncodingConfig
    arch: MlpArch
    loss_history: list = field(default_factory=list)

    def __post_init__(self):
        if self.arch.input_dim != self.encoding.mapping_size:
            raise ValueError("arch.input_dim must equal encoding.mapping_size")
        self.params.check_arch(self.arch)


def grid_features(width, height, encoding, dtype=np.float32):
    return encode_coords(coord_grid(width, height), encoding).astype(dtype)


def train(image, config, callback=None):
    """Fit the network with Adam on the embedded pixel grid.

    ``loss_history`` holds ``(iteration, mse)`` pairs, where the MSE is the
    loss of the parameters the step started from. Rows are logged every
    ``log_every`` iterations and at the last one.
    """
    image = as_image(image)
    height, width, _ = image.shape
    features = grid_features(width, height, config.encoding)
    targets = image.reshape(-1, 3).astype(np.float32)

    params = mlp_init(config.arch, config.init_seed)
    state = AdamState.zeros(params, lr=config.lr)
    batch_rng = np.random.default_rng(config.init_seed) if config.batch_size else None
    with np.errstate(over="ignore", invalid="ignore"):
        # overflow surfaces as a non-finite loss and is reported as divergence
        return _fit(features, targets, params, state, batch_rng, config, callback)


def _fit(features, targets, params, state, batch_rng, config, callback):
    history = []
    n = features.shape[0]
    for it in range(1, config.iterations + 1):
        if batch_rng is not None and config.batch_size < n:
            idx = batch_rng.choice(n, size=config.batch_size, replace=False)
            mse, grads = mlp_loss_and_grads(params, features[idx], targets[idx])
        else:
            mse, grads = mlp_loss_and_grads(params, features, targets)
        if not np.isfinite(mse):
            raise DivergenceError(f"loss became non-finite at iteration {it}", it)
        state, params = adam_step(state, params, grads)
        if it % config.log_every == 0 or it == config.iterations:
            history.append((it, mse))
            if callback is not None:
                callback(it, mse)
            logger.debug("iteration %d mse %.6g", it, mse)
    return TrainedModel(params, config.encoding, config.arch, history)


def reconstruct(model, width, height, chunk=1 << 16):
    """Evaluate the model at every pixel of a ``width x height`` grid, clamped to [0, 1].

    The grid is independent of the training size, so any resolution works.
    """
    features = grid_features(width, height, model.encoding, dtype=model.params.dtype)
    out = np.empty((features.shape[0], model.arch.output_dim), dtype=np.float64)
    for start in range(0, features.shape[0], chunk):
        out[start:start + chunk] = mlp_forward(model.params, features[start:start + chunk])
    return np.clip(out, 0.0, 1.0).reshape(height, width, model.arch.output_dim)
