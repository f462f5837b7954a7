"""Gaussian-kernel approximation with the two random Fourier feature maps.

A noisy sine wave ``3 sin(t) + U(0, 1)`` sampled on ``t in [0, 8 pi]`` is used
as the point set. The exact RBF kernel ``exp(-d^2 / (2 sigma^2))`` is compared
with the Gram matrices of the sin/cos map (``m/2`` frequencies) and of the
phase-shifted cosine map (``m`` frequencies), both with frequencies drawn
from ``N(0, 1/sigma^2)``. Here, unlike in :mod:`rffinr.encoding`, no ``2 pi``
factor goes inside the cosine, so both estimators are unbiased for the RBF
kernel over the same ``sigma``.
"""

import csv
import io
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist

from .encoding import EncodingConfig, EncodingKind, sample_basis
from .rng import Xoshiro256StarStar, derive_seed

DEFAULT_MAPPING_SIZES = (4, 8, 16, 32, 64, 128, 256, 512)


@dataclass(frozen=True, eq=False)
class KernelDataset:
    samples: np.ndarray  # y_i
    t: np.ndarray
    seed: int

    def points(self, inputs="values"):
        """Kernel inputs: the values ``y_i`` as 1-D points, or ``(t_i, y_i)`` pairs."""
        if inputs == "values":
            return self.samples[:, None]
        if inputs == "pairs":
            return np.stack([self.t, self.samples], axis=1)
        raise ValueError(f"inputs must be 'values' or 'pairs', got {inputs!r}")


def generate_sine_dataset(n=1000, seed=0, noise=True):
    if n < 2:
        raise ValueError("need at least 2 samples")
    t = np.linspace(0.0, 8.0 * np.pi, n)
    y = 3.0 * np.sin(t)
    if noise:
        y = y + Xoshiro256StarStar(seed).uniform(n)
    return KernelDataset(y, t, seed)


def _as_points(data, inputs="values"):
    if isinstance(data, KernelDataset):
        return data.points(inputs)
    x = np.asarray(data, dtype=np.float64)
    return x[:, None] if x.ndim == 1 else x


def percentile_bandwidth(data, p=5.0, inputs="values"):
    """``p``-th percentile (linear interpolation) of all pairwise distances."""
    x = _as_points(data, inputs)
    if x.shape[0] < 2:
        raise ValueError("need at least 2 samples")
    sigma = float(np.percentile(pdist(x), p))
    if not sigma > 0:
        raise ValueError("percentile of pairwise distances is 0; samples are (nearly) identical")
    return sigma


def rbf_kernel_matrix(data, sigma, inputs="values"):
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    x = _as_points(data, inputs)
    sq = np.sum(x * x, axis=1)
    d2 = np.maximum(sq[:, None] + sq[None, :] - 2.0 * (x @ x.T), 0.0)
    np.fill_diagonal(d2, 0.0)
    return np.exp(-d2 / (2.0 * sigma * sigma))


def feature_map(data, kind, m, sigma, seed_w=0, seed_b=1, inputs="values"):
    """Random features whose Gram matrix approximates the RBF kernel.

    The sin/cos map is scaled by ``1/sqrt(m/2)`` and the cosine map by
    ``1/sqrt(m)``, so ``Z @ Z.T`` is the kernel estimate directly.
    """
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    x = _as_points(data, inputs)
    kind = EncodingKind.parse(kind)
    basis = sample_basis(EncodingConfig(kind, m, 1.0, seed_w, seed_b), x.shape[1])
    proj = x @ (basis.frequencies / sigma).T
    if kind is EncodingKind.BASELINE:
        d = basis.num_basis
        return np.hstack([np.cos(proj), np.sin(proj)]) / np.sqrt(d)
    return np.sqrt(2.0 / m) * np.cos(proj + basis.phases)


def approx_kernel_matrix(data, kind, m, sigma, seed_w=0, seed_b=1, inputs="values"):
    z = feature_map(data, kind, m, sigma, seed_w, seed_b, inputs)
    return z @ z.T


def relative_frobenius_error(k, k_hat):
    k = np.asarray(k)
    k_hat = np.asarray(k_hat)
    if k.shape != k_hat.shape:
        raise ValueError(f"shape mismatch: {k.shape} vs {k_hat.shape}")
    return float(np.linalg.norm(k - k_hat) / np.linalg.norm(k))


def trial_seeds(root_seed, trial, m):
    """Seeds for one trial at one mapping size; both kinds share them."""
    return derive_seed(root_seed, "w", trial, m), derive_seed(root_seed, "b", trial, m)


@dataclass
class KernelExperimentResult:
    mapping_sizes: list
    error_baseline: list
    error_proposed: list
    std_baseline: list
    std_proposed: list
    trials: int
    sigma: float

    def crossover(self):
        """First mapping size where the baseline catches up with the cosine map.

        Returns the smallest size with ``baseline <= proposed`` that follows a
        size where the cosine map was strictly better, or ``None``.
        """
        b, p = self.error_baseline, self.error_proposed
        for i in range(1, len(self.mapping_sizes)):
            if p[i - 1] < b[i - 1] and b[i] <= p[i]:
                return self.mapping_sizes[i]
        return None

    def rows(self):
        out = []
        for i, m in enumerate(self.mapping_sizes):
            out.append((m, "baseline", self.error_baseline[i], self.std_baseline[i], self.trials))
            out.append((m, "rff_cosine", self.error_proposed[i], self.std_proposed[i], self.trials))
        return out

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["mapping_size", "kind", "mean_error", "stddev_error", "trials"])
        for m, kind, mean, std, trials in self.rows():
            w.writerow([m, kind, f"{mean:.6f}", f"{std:.6f}", trials])
        return buf.getvalue()


def run_kernel_experiment(
    mapping_sizes=DEFAULT_MAPPING_SIZES,
    trials=20,
    seed=0,
    n=1000,
    percentile=5.0,
    inputs="values",
    dataset=None,
):
    """Mean relative Frobenius error of both maps at every mapping size."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    data = dataset if dataset is not None else generate_sine_dataset(n, seed)
    sigma = percentile_bandwidth(data, percentile, inputs)
    k = rbf_kernel_matrix(data, sigma, inputs)
    k_norm = np.linalg.norm(k)
    sizes = [int(m) for m in mapping_sizes]
    means = {EncodingKind.BASELINE: [], EncodingKind.RFF_COSINE: []}
    stds = {EncodingKind.BASELINE: [], EncodingKind.RFF_COSINE: []}
    for m in sizes:
        errs = {kind: [] for kind in means}
        for trial in range(trials):
            seed_w, seed_b = trial_seeds(seed, trial, m)
            for kind in errs:
                k_hat = approx_kernel_matrix(data, kind, m, sigma, seed_w, seed_b, inputs)
                errs[kind].append(np.linalg.norm(k - k_hat) / k_norm)
        for kind, values in errs.items():
            means[kind].append(float(np.mean(values)))
            stds[kind].append(float(np.std(values)))
    return KernelExperimentResult(
        sizes,
        means[EncodingKind.BASELINE],
        means[EncodingKind.RFF_COSINE],
        stds[EncodingKind.BASELINE],
        stds[EncodingKind.RFF_COSINE],
        trials,
        sigma,
    )
