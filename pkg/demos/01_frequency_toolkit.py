"""Tour of the shape and transform helpers everything else is built on.

A SignalShape pins down two things at once: the extent of the signals the
toolkit works on and the extent of the small filters it learns. All heavy
math happens on flat arrays of length shape.size, so images move through
the library as ravelled vectors and only come back to 2-D at the edges.
"""

import numpy as np

from ocsc import (
    SignalShape,
    circular_convolve,
    crop_filter,
    forward_dft,
    forward_dft_cols,
    inverse_dft,
    pad_filter,
    pad_filter_cols,
    reconstruct,
)

rng = np.random.default_rng(7)

# Signals of 16 samples, filters supported on the leading 5.
shape = SignalShape((16,), (5,))
print(f"signal extent {shape.dims}, filter extent {shape.filter_dims}, "
      f"flat size {shape.size}")

# The forward transform is the plain unnormalized DFT, the inverse divides
# by the size, so a round trip is exact to machine precision.
x = rng.normal(size=shape.size)
x_freq = forward_dft(x, shape)
back = inverse_dft(x_freq, shape)
print(f"round-trip error: {np.abs(back - x).max():.2e}")

# Filters live on their small support. pad_filter embeds the support in a
# full-length array, crop_filter takes it back out.
filt = rng.normal(size=5)
padded = pad_filter(filt, shape)
print(f"padded filter: {padded.shape[0]} entries, "
      f"crop matches: {np.array_equal(crop_filter(padded, shape), filt)}")

# Convolutions in this toolkit are circular. In the frequency domain they
# are plain elementwise products, which is the whole point of moving there.
# circular_convolve takes the filter on its small support and pads inside.
sig = rng.normal(size=shape.size)
direct = circular_convolve(filt, sig, shape)
via_freq = inverse_dft(forward_dft(padded, shape) * forward_dft(sig, shape), shape)
print(f"spatial vs spectral convolution: {np.abs(direct - via_freq).max():.2e}")

# reconstruct() sums one circular convolution per filter. With a one-hot
# code it just shifts the filter, which makes the convention easy to see.
filters = rng.normal(size=(5, 3))
dict_freq = forward_dft_cols(pad_filter_cols(filters, shape), shape)
code = np.zeros((shape.size, 3))
code[4, 1] = 1.0
out = reconstruct(dict_freq, code, shape)
print(f"one-hot code shifts filter 1 by 4: "
      f"{np.abs(out - np.roll(pad_filter(filters[:, 1], shape), 4)).max():.2e}")

# Everything above works unchanged for images; the shape does the
# bookkeeping and the flat arrays stay flat.
image_shape = SignalShape((8, 8), (3, 3))
img = rng.normal(size=image_shape.size)
print(f"2-D round-trip error: "
      f"{np.abs(inverse_dft(forward_dft(img, image_shape), image_shape) - img).max():.2e}")
