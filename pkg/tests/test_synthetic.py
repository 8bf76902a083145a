"""Synthetic instance generator tests."""

import time

import numpy as np

from ocsc import (
    CodingConfig,
    SignalShape,
    circular_convolve,
    forward_dft_cols,
    infer_code,
    pad_filter_cols,
    reconstruct,
    synth_generate,
)


class TestSynthGenerate:
    def test_deterministic_given_seed(self):
        shape = SignalShape((32,), (5,))
        a = synth_generate(shape, 4, 3, seed=7)
        b = synth_generate(shape, 4, 3, seed=7)
        assert np.array_equal(a.dictionary, b.dictionary)
        assert np.array_equal(a.codes, b.codes)
        assert np.array_equal(a.raw, b.raw)
        assert np.array_equal(a.consistent, b.consistent)

    def test_seed_changes_instance(self):
        shape = SignalShape((32,), (5,))
        a = synth_generate(shape, 4, 3, seed=7)
        b = synth_generate(shape, 4, 3, seed=8)
        assert not np.array_equal(a.dictionary, b.dictionary)

    def test_filters_inside_unit_ball(self):
        shape = SignalShape((64,), (9,))
        data = synth_generate(shape, 20, 1, seed=1)
        norms = np.linalg.norm(data.dictionary, axis=0)
        assert np.all(norms <= 1.0 + 1e-12)

    def test_consistent_variant_is_the_convolution_sum(self):
        shape = SignalShape((16,), (4,))
        data = synth_generate(shape, 3, 2, seed=2, noise=0.0)
        for i in range(2):
            direct = sum(
                circular_convolve(data.dictionary[:, k], data.codes[i][:, k], shape)
                for k in range(3)
            )
            assert np.abs(data.consistent[i] - direct).max() < 1e-10

    def test_noise_scale(self):
        shape = SignalShape((64,), (4,))
        clean = synth_generate(shape, 3, 4, seed=3, noise=0.0)
        noisy = synth_generate(shape, 3, 4, seed=3, noise=0.01)
        diff = noisy.consistent - clean.consistent
        assert 0.0 < np.abs(diff).max() < 0.1

    def test_noiseless_coding_recovers_reconstruction(self):
        shape = SignalShape((64,), (6,))
        data = synth_generate(shape, 3, 1, seed=4, noise=0.0)
        dict_freq = forward_dft_cols(pad_filter_cols(data.dictionary, shape), shape)
        x = data.consistent[0]
        state = infer_code(
            x, dict_freq, shape, CodingConfig(beta=1e-4, max_iters=2000, rel_tol=1e-8)
        )
        rec = reconstruct(dict_freq, state.code, shape)
        rel = np.linalg.norm(rec - x) / np.linalg.norm(x)
        assert rel < 1e-2

    def test_benchmark_scale_constructs_quickly(self):
        shape = SignalShape((10000,), (11,))
        start = time.perf_counter()
        data = synth_generate(shape, 100, 1, seed=5)
        elapsed = time.perf_counter() - start
        assert data.codes.shape == (1, 10000, 100)
        assert elapsed < 10.0
