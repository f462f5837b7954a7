import numpy as np
import pytest

from conftest import quick_model
from rffinr.encoding import EncodingConfig
from rffinr.imageio import center_crop
from rffinr.inr import TrainConfig, TrainedModel, reconstruct, train
from rffinr.metrics import psnr
from rffinr.nn import DivergenceError, MlpArch, mlp_init


def test_config_validation():
    with pytest.raises(ValueError, match="input_dim"):
        TrainConfig(MlpArch(8, 1, 4, 3), EncodingConfig("baseline", 16))
    with pytest.raises(ValueError):
        TrainConfig(MlpArch(8, 1, 4, 3), EncodingConfig("baseline", 8), iterations=0)


def test_default_hyperparameters():
    cfg = TrainConfig(MlpArch(8, 5, 20, 3), EncodingConfig("rff_cosine", 8))
    assert cfg.lr == 2e-4 and cfg.iterations == 50_000 and cfg.batch_size == 0


@pytest.mark.parametrize("kind", ["baseline", "rff_cosine"])
def test_constant_image_reaches_40db(kind):
    image = np.full((16, 16, 3), [0.2, 0.6, 0.9])
    cfg = TrainConfig(MlpArch(8, 5, 20, 3), EncodingConfig(kind, 8), iterations=500, lr=1e-2, log_every=100)
    model = train(image, cfg)
    assert psnr(reconstruct(model, 16, 16), image) >= 40.0


def test_training_is_deterministic(small_image):
    a = quick_model(small_image)
    b = quick_model(small_image)
    assert a.loss_history == b.loss_history
    for x, y in zip(a.params.arrays, b.params.arrays):
        assert np.array_equal(x, y)


def test_loss_history_schedule(small_image):
    model = quick_model(small_image, iterations=25)
    assert [it for it, _ in model.loss_history] == [10, 20, 25]


def test_loss_decreases(small_image):
    model = quick_model(small_image, iterations=200)
    losses = [mse for _, mse in model.loss_history]
    assert losses[-1] < losses[0]
    assert np.mean(losses[-5:]) <= np.mean(losses[:5])


def test_minibatch_option(small_image):
    cfg = TrainConfig(MlpArch(8, 2, 8, 3), EncodingConfig("baseline", 8), lr=1e-2, iterations=20, batch_size=50)
    a, b = train(small_image, cfg), train(small_image, cfg)
    assert a.loss_history == b.loss_history


def test_divergence_reports_iteration(small_image):
    cfg = TrainConfig(MlpArch(8, 2, 8, 3), EncodingConfig("baseline", 8), lr=1e30, iterations=50, log_every=1)
    with pytest.raises(DivergenceError) as info:
        train(small_image * 0 + 1.0, cfg)
    assert info.value.iteration is not None and info.value.iteration >= 1


def test_reconstruct_zero_model():
    arch = MlpArch(8, 2, 4, 3)
    model = TrainedModel(mlp_init(arch, 0).zeros_like(), EncodingConfig("rff_cosine", 8), arch)
    assert not reconstruct(model, 5, 4).any()


def test_reconstruct_pure_and_clamped(small_image):
    model = quick_model(small_image)
    a = reconstruct(model, 16, 12)
    assert np.array_equal(a, reconstruct(model, 16, 12))
    assert a.shape == (12, 16, 3) and a.min() >= 0 and a.max() <= 1


def test_reconstruct_any_resolution(small_image):
    model = quick_model(small_image)
    big = reconstruct(model, 32, 24)
    assert big.shape == (24, 32, 3)
    # grid corners coincide at any resolution
    small = reconstruct(model, 16, 12)
    assert np.allclose(big[0, 0], small[0, 0], atol=1e-6) and np.allclose(big[-1, -1], small[-1, -1], atol=1e-6)


def test_reported_psnr_is_reproducible(small_image):
    model = quick_model(small_image)
    p = psnr(reconstruct(model, 16, 12), small_image)
    assert abs(psnr(reconstruct(model, 16, 12), small_image) - p) < 1e-6


def test_encoding_is_only_difference(small_image):
    a = quick_model(small_image, kind="baseline")
    b = quick_model(small_image, kind="rff_cosine")
    # same init, same arch: the mapping is the only thing that changed
    assert a.arch == b.arch
    assert a.encoding.mapping_size == b.encoding.mapping_size
    assert a.loss_history != b.loss_history


def test_trailing_window_loss_non_increasing(desk_images):
    image = center_crop(desk_images[0], 32)
    cfg = TrainConfig(MlpArch(8, 5, 20, 3), EncodingConfig("rff_cosine", 8, 1.0, 1, 2), iterations=4000, log_every=1)
    losses = np.array([mse for _, mse in train(image, cfg).loss_history])
    window = np.convolve(losses, np.ones(1000) / 1000, mode="valid")[::100]
    assert np.all(np.diff(window) <= 0)


@pytest.mark.slow
def test_desk_crop_64_proposed_wins(desk_images):
    image = center_crop(desk_images[0], 64)
    scores = {}
    for kind in ("baseline", "rff_cosine"):
        cfg = TrainConfig(MlpArch(8, 5, 20, 3), EncodingConfig(kind, 8, 1.0, 0, 1), iterations=5000)
        scores[kind] = psnr(reconstruct(train(image, cfg), 64, 64), image)
    print(f"64x64 crop: baseline {scores['baseline']:.3f} dB, rff_cosine {scores['rff_cosine']:.3f} dB")
    assert scores["rff_cosine"] > scores["baseline"]
