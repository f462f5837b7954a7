"""Both positional encodings at the same mapping size.

With m features the sin/cos map draws m/2 frequency vectors and emits a cos
and a sin for each, while the cosine map draws m vectors and shifts each by a
random phase. Same width going into the network, twice the frequencies.
"""

import numpy as np

from rffinr.encoding import EncodingConfig, coord_grid, encode_coords, sample_basis

m = 8
base = EncodingConfig("baseline", m, sigma=1.0, seed_w=0)
cos = EncodingConfig("rff_cosine", m, sigma=1.0, seed_w=0, seed_b=1)

for cfg in (base, cos):
    basis = sample_basis(cfg)
    print(f"{cfg.kind.label:>10}: {basis.num_basis} frequency vectors -> {basis.output_dim} features")
    print("  |w| per basis:", np.round(np.linalg.norm(basis.frequencies, axis=1), 3))

# the grid spans [-1, 1] on both axes, rows outer
grid = coord_grid(4, 3)
print("\ncoordinates of a 4x3 grid:\n", grid)

feats = encode_coords(grid, base)
print("\nbaseline at the grid corner, (cos, sin) interleaved:\n", np.round(feats[0], 3))
print("cos^2 + sin^2 per pair:", np.round(feats[0, 0::2] ** 2 + feats[0, 1::2] ** 2, 6))

feats = encode_coords(grid, cos)
print("\ncosine map at the same corner:\n", np.round(feats[0], 3))
print("mean square over the grid (should sit near 1):", round(float(np.mean(feats**2)), 3))
