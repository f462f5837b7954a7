"""Reading and writing RGB images as float arrays in [0, 1].

Images are ``(height, width, 3)`` float arrays. PNG and binary PPM (P6,
8-bit) are decoded through Pillow; values are divided by 255.
"""

from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError


class ImageReadError(OSError):
    pass


def as_image(pixels):
    """Validate an ``(H, W, 3)`` array with every value in [0, 1]."""
    arr = np.asarray(pixels, dtype=np.float64)
    if arr.ndim != 3 or arr.shape[2] != 3 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"expected an (H, W, 3) image, got shape {arr.shape}")
    if not np.isfinite(arr).all() or arr.min() < 0.0 or arr.max() > 1.0:
        raise ValueError("image values must lie in [0, 1]")
    return arr


def load_image(path):
    path = Path(path)
    try:
        with Image.open(path) as im:
            if im.format not in ("PNG", "PPM"):
                raise ImageReadError(f"{path}: unsupported format {im.format}, expected PNG or PPM")
            im = im.convert("RGB")
            data = np.asarray(im, dtype=np.uint8)
    except FileNotFoundError:
        raise ImageReadError(f"{path}: no such file") from None
    except (UnidentifiedImageError, OSError, SyntaxError) as exc:
        if isinstance(exc, ImageReadError):
            raise
        raise ImageReadError(f"{path}: cannot decode image ({exc})") from None
    return data.astype(np.float64) / 255.0


def to_uint8(image):
    return np.clip(np.rint(np.asarray(image) * 255.0), 0, 255).astype(np.uint8)


def save_image(path, image):
    """Write PNG, or PPM when the suffix is ``.ppm``."""
    path = Path(path)
    fmt = "PPM" if path.suffix.lower() == ".ppm" else "PNG"
    Image.fromarray(to_uint8(image), mode="RGB").save(path, format=fmt)


def center_crop(image, size):
    """Central ``size x size`` crop; ``size`` 0 or larger than the image is a no-op per axis."""
    if not size:
        return image
    h, w = image.shape[:2]
    ch, cw = min(size, h), min(size, w)
    top = (h - ch) // 2
    left = (w - cw) // 2
    return image[top:top + ch, left:left + cw]
