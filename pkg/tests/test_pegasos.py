"""Kernelized stochastic subgradient SVM with count-based state."""

import numpy as np
import pytest

from noisyq.classifiers import (
    accuracy,
    load_model,
    pegasos_train,
    save_model,
    to_binary,
)
from noisyq.data import make_synthetic_benchmark
from noisyq.featuremaps import FeatureMapKind
from noisyq.kernels import EncodingSpec, KernelMatrix
from oracles import oracle_pegasos_counts


def _bench_kernel(seed=0, fm=FeatureMapKind.Z):
    train, test = make_synthetic_benchmark(seed=seed)
    spec = EncodingSpec(fm=fm)
    return train, test, spec, spec.gram(train.X)


class TestTraining:
    def test_counts_match_scratch_recomputation_oracle(self):
        """Incremental coefficient cache vs per-step from-scratch sums."""
        train, _, _, K = _bench_kernel()
        lam, T, seed = 0.01, 500, 11
        model = pegasos_train(K, train.y, lam=lam, T=T, seed=seed)
        ref_counts = oracle_pegasos_counts(K.entries, train.y, lam, T, seed)
        np.testing.assert_array_equal(np.asarray(model.counts), ref_counts)

    def test_benchmark_train_accuracy(self):
        train, _, spec, K = _bench_kernel()
        model = pegasos_train(K, train.y, lam=0.01, T=1000, seed=0,
                              train_X=train.X, encoding=spec)
        acc = accuracy(train.y, to_binary(model.decision_values(K.entries)))
        assert acc == 1.0

    def test_seed_determinism(self):
        train, _, _, K = _bench_kernel()
        a = pegasos_train(K, train.y, lam=0.01, T=800, seed=5)
        b = pegasos_train(K, train.y, lam=0.01, T=800, seed=5)
        np.testing.assert_array_equal(np.asarray(a.counts), np.asarray(b.counts))
        np.testing.assert_array_equal(np.asarray(a.margins), np.asarray(b.margins))
        c = pegasos_train(K, train.y, lam=0.01, T=800, seed=6)
        assert not np.array_equal(np.asarray(a.counts), np.asarray(c.counts))

    def test_margin_trace_length_and_replay(self):
        """Stored margins replay the run bit-exactly."""
        train, _, _, K = _bench_kernel()
        lam, T, seed = 0.02, 300, 4
        model = pegasos_train(K, train.y, lam=lam, T=T, seed=seed)
        margins = np.asarray(model.margins)
        assert margins.shape == (T,)
        ys = 2 * np.asarray(train.y) - 1
        counts = np.zeros(train.y.size)
        coeff = np.zeros(train.y.size)
        rng = np.random.Generator(np.random.PCG64(seed))
        for t in range(1, T + 1):
            i = int(rng.integers(0, train.y.size))
            margin = ys[i] * float(K.entries[i] @ coeff) / (lam * t)
            assert margin == margins[t - 1]
            if margin < 1.0:
                counts[i] += 1
                coeff[i] += ys[i]
        np.testing.assert_array_equal(counts, np.asarray(model.counts))

    def test_update_only_on_margin_violation(self):
        """Once the decision function is strong enough no more counts
        accumulate."""
        train, _, _, K = _bench_kernel()
        short = pegasos_train(K, train.y, lam=0.01, T=2000, seed=0)
        margins = np.asarray(short.margins)
        late = margins[1500:]
        # on a separable problem late margins mostly clear the threshold
        assert (late >= 1.0).mean() > 0.5

    def test_invalid_hyperparameters(self):
        train, _, _, K = _bench_kernel()
        with pytest.raises(ValueError):
            pegasos_train(K, train.y, lam=0.0, T=100, seed=0)
        with pytest.raises(ValueError):
            pegasos_train(K, train.y, lam=0.01, T=0, seed=0)

    def test_size_mismatch(self):
        train, _, _, K = _bench_kernel()
        with pytest.raises(ValueError):
            pegasos_train(K, train.y[:-1], lam=0.01, T=100, seed=0)


class TestPegasosModel:
    def test_decision_scale_includes_step_normalization(self):
        train, _, _, K = _bench_kernel()
        lam, T = 0.01, 400
        model = pegasos_train(K, train.y, lam=lam, T=T, seed=2)
        ys = 2 * np.asarray(train.y) - 1
        coeff = np.asarray(model.counts) * ys
        expected = K.entries @ coeff / (lam * T)
        np.testing.assert_allclose(
            model.decision_values(K.entries), expected, atol=1e-12
        )

    def test_no_bias_term(self):
        train, _, _, K = _bench_kernel()
        model = pegasos_train(K, train.y, lam=0.01, T=200, seed=1)
        zero_rows = np.zeros((2, train.y.size))
        np.testing.assert_array_equal(model.decision_values(zero_rows), [0.0, 0.0])

    def test_serialization_round_trip(self, tmp_path):
        train, test, spec, K = _bench_kernel(seed=4, fm=FeatureMapKind.ZZ)
        model = pegasos_train(K, train.y, lam=0.01, T=600, seed=9,
                              train_X=train.X, encoding=spec)
        path = tmp_path / "pegasos.json"
        save_model(model, path)
        loaded = load_model(path)
        np.testing.assert_array_equal(
            np.asarray(loaded.counts), np.asarray(model.counts)
        )
        assert loaded.seed == 9
        np.testing.assert_array_equal(
            loaded.predict_features(test.X), model.predict_features(test.X)
        )

    def test_kernel_rows_shape_check(self):
        train, _, _, K = _bench_kernel()
        model = pegasos_train(K, train.y, lam=0.01, T=100, seed=0)
        with pytest.raises(ValueError):
            model.decision_values(np.zeros((2, train.y.size + 1)))
