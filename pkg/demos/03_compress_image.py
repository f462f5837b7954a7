"""Compress one image into a .inrb file and read it back.

    python demos/03_compress_image.py [image] [iterations]

Defaults to a 128x128 test crop and a short run so it finishes in seconds;
short runs say little about which encoding wins, so raise the iteration
count (5000 or more) before comparing.
"""

import sys
import tempfile
from pathlib import Path

from rffinr import codec
from rffinr.encoding import EncodingConfig
from rffinr.imageio import center_crop, load_image, save_image
from rffinr.inr import reconstruct
from rffinr.sweep import compress_image

here = Path(__file__).resolve().parent
path = Path(sys.argv[1]) if len(sys.argv) > 1 else here.parent / "tests" / "data" / "chelsea_128.png"
iterations = int(sys.argv[2]) if len(sys.argv) > 2 else 300

image = center_crop(load_image(path), 128)
h, w, _ = image.shape
arch = codec.named_arch("Q1", 8)
print(f"{path.name}: {w}x{h}, {arch.parameter_count} parameters, {codec.bits_per_pixel(arch, w, h):.4f} bpp")

out = Path(tempfile.mkdtemp())
for kind in ("baseline", "rff_cosine"):
    enc = EncodingConfig(kind, 8, sigma=1.0, seed_w=0, seed_b=1)
    stream, stats = compress_image(image, arch, enc, iterations=iterations, lr=1e-3)
    target = out / f"{kind}.inrb"
    codec.write_bitstream(target, stream)
    print(f"{kind:>10}: {stats['psnr_after_quantization']:.2f} dB after binary16, "
          f"{stats['psnr_float']:.2f} dB before, {target.stat().st_size} bytes")

# decoding needs nothing but the file: the seeds regenerate the basis
model, (w, h) = codec.decode(target.read_bytes())
save_image(out / "decoded.png", reconstruct(model, w, h))
save_image(out / "decoded_2x.png", reconstruct(model, 2 * w, 2 * h))
print("header:", codec.inspect_bytes(target.read_bytes()))
print("wrote", out)
