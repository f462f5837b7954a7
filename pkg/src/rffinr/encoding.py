"""Random Fourier positional encodings for coordinate networks.

Two mappings of a point ``v`` into ``m`` features are provided:

``BASELINE`` (sin/cos pairs)
    ``m/2`` frequency rows ``w_i``; features are interleaved as
    ``cos(2 pi w_1.v), sin(2 pi w_1.v), cos(2 pi w_2.v), ...``.
``RFF_COSINE``
    ``m`` frequency rows and ``m`` phases ``b_i ~ U[0, 2 pi)``; features are
    ``sqrt(2) cos(2 pi w_i.v + b_i)``.

For the same mapping size the cosine variant samples twice as many
frequencies. Frequencies are ``N(0, sigma^2)`` and are drawn with the
portable generator in :mod:`rffinr.rng`, so a basis is fully determined by
``(kind, m, sigma, seed_w, seed_b, coord_dim)`` on any platform.
"""

import enum
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .rng import Xoshiro256StarStar

__all__ = [
    "EncodingKind",
    "EncodingConfig",
    "FourierBasis",
    "sample_basis",
    "embed",
    "encode_coords",
    "coord_grid",
]


class EncodingKind(enum.IntEnum):
    # values are the bitstream kind byte
    BASELINE = 0
    RFF_COSINE = 1

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        if isinstance(value, int):
            return cls(value)
        key = str(value).strip().lower().replace("-", "_")
        aliases = {
            "baseline": cls.BASELINE,
            "sincos": cls.BASELINE,
            "sin_cos": cls.BASELINE,
            "existing": cls.BASELINE,
            "rff_cosine": cls.RFF_COSINE,
            "rffcosine": cls.RFF_COSINE,
            "cosine": cls.RFF_COSINE,
            "proposed": cls.RFF_COSINE,
        }
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown encoding kind {value!r}") from None

    @property
    def label(self):
        return "baseline" if self is EncodingKind.BASELINE else "rff_cosine"


@dataclass(frozen=True)
class EncodingConfig:
    """Which mapping to use and everything needed to resample its basis.

    ``sigma`` is rounded to binary32 on construction because that is how the
    bitstream stores it; encoder and decoder then sample from the same value.
    """

    kind: EncodingKind
    mapping_size: int
    sigma: float = 1.0
    seed_w: int = 0
    seed_b: int = 1

    def __post_init__(self):
        object.__setattr__(self, "kind", EncodingKind.parse(self.kind))
        if int(self.mapping_size) != self.mapping_size or self.mapping_size < 2:
            raise ValueError(f"mapping_size must be an integer >= 2, got {self.mapping_size!r}")
        if self.mapping_size % 2:
            raise ValueError(f"mapping_size must be even, got {self.mapping_size}")
        sigma = float(np.float32(self.sigma))
        if not sigma > 0 or not np.isfinite(sigma):
            raise ValueError(f"sigma must be positive and finite, got {self.sigma!r}")
        object.__setattr__(self, "sigma", sigma)
        for name in ("seed_w", "seed_b"):
            seed = int(getattr(self, name))
            if not 0 <= seed < 2**64:
                raise ValueError(f"{name} must fit in an unsigned 64-bit integer")
            object.__setattr__(self, name, seed)

    @property
    def num_basis(self):
        if self.kind is EncodingKind.BASELINE:
            return self.mapping_size // 2
        return self.mapping_size


@dataclass(frozen=True, eq=False)
class FourierBasis:
    frequencies: np.ndarray  # (num_basis, coord_dim)
    phases: np.ndarray  # (num_basis,) for RFF_COSINE, (0,) for BASELINE
    kind: EncodingKind

    @property
    def num_basis(self):
        return self.frequencies.shape[0]

    @property
    def coord_dim(self):
        return self.frequencies.shape[1]

    @property
    def output_dim(self):
        if self.kind is EncodingKind.BASELINE:
            return 2 * self.num_basis
        return self.num_basis


def sample_basis(config, coord_dim=2):
    """Draw the frequency matrix (row-major normals) and, for the cosine map, phases."""
    if int(coord_dim) != coord_dim or coord_dim < 1:
        raise ValueError(f"coord_dim must be >= 1, got {coord_dim!r}")
    return _sample_basis_cached(config, int(coord_dim))


@lru_cache(maxsize=64)
def _sample_basis_cached(config, coord_dim):
    n = config.num_basis
    gen_w = Xoshiro256StarStar(config.seed_w)
    freqs = gen_w.normal(n * coord_dim, scale=config.sigma).reshape(n, coord_dim)
    if config.kind is EncodingKind.RFF_COSINE:
        phases = Xoshiro256StarStar(config.seed_b).uniform(n, 0.0, 2.0 * np.pi)
    else:
        phases = np.empty(0, dtype=np.float64)
    freqs.setflags(write=False)
    phases.setflags(write=False)
    return FourierBasis(freqs, phases, config.kind)


def embed(coords, basis, kind=None):
    """Map ``(batch, coord_dim)`` points to ``(batch, m)`` features in float64."""
    kind = basis.kind if kind is None else EncodingKind.parse(kind)
    if kind is not basis.kind:
        raise ValueError(f"basis was sampled for {basis.kind.label}, not {kind.label}")
    coords = np.asarray(coords, dtype=np.float64)
    if coords.ndim == 1:
        coords = coords[:, None]
    if coords.ndim != 2 or coords.shape[1] != basis.coord_dim:
        raise ValueError(
            f"coords of shape {coords.shape} do not match basis coord_dim {basis.coord_dim}"
        )
    proj = 2.0 * np.pi * (coords @ basis.frequencies.T)
    if kind is EncodingKind.BASELINE:
        out = np.empty((coords.shape[0], 2 * basis.num_basis))
        out[:, 0::2] = np.cos(proj)
        out[:, 1::2] = np.sin(proj)
        return out
    return np.sqrt(2.0) * np.cos(proj + basis.phases)


def encode_coords(coords, config):
    """Sample the basis for ``config`` and embed ``coords`` with it."""
    coords = np.asarray(coords, dtype=np.float64)
    coord_dim = 1 if coords.ndim == 1 else coords.shape[1]
    return embed(coords, sample_basis(config, coord_dim))


def coord_grid(width, height):
    """Pixel centres in ``[-1, 1]^2``, rows outer, columns inner, as ``(x, y)``.

    Endpoints are inclusive; a single row or column sits at 0.
    """
    if width < 1 or height < 1:
        raise ValueError(f"grid dimensions must be >= 1, got {width}x{height}")
    xs = _axis(width)
    ys = _axis(height)
    gy, gx = np.meshgrid(ys, xs, indexing="ij")
    return np.stack([gx.ravel(), gy.ravel()], axis=1)


def _axis(n):
    if n == 1:
        return np.zeros(1)
    return -1.0 + 2.0 * np.arange(n) / (n - 1)
