"""Implicit neural representation image codec with random Fourier feature encodings."""

from .codec import ARCHITECTURES, Bitstream, bits_per_pixel, decode, encode, named_arch
from .encoding import EncodingConfig, EncodingKind, FourierBasis, coord_grid, embed, sample_basis
from .inr import TrainConfig, TrainedModel, reconstruct, train
from .metrics import RdCurve, RdPoint, bd_rate, psnr, rd_table
from .nn import MlpArch, MlpParams

__version__ = "0.1.0"

__all__ = [
    "ARCHITECTURES",
    "Bitstream",
    "EncodingConfig",
    "EncodingKind",
    "FourierBasis",
    "MlpArch",
    "MlpParams",
    "RdCurve",
    "RdPoint",
    "TrainConfig",
    "TrainedModel",
    "bd_rate",
    "bits_per_pixel",
    "coord_grid",
    "decode",
    "embed",
    "encode",
    "named_arch",
    "psnr",
    "rd_table",
    "reconstruct",
    "sample_basis",
    "train",
]
