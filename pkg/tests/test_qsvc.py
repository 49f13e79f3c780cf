"""Dual SVM training on precomputed Gram matrices."""

import numpy as np
import pytest
from sklearn.svm import SVC

from noisyq.classifiers import (
    LabeledDataset,
    accuracy,
    load_model,
    qsvc_train,
    save_model,
    signed,
    to_binary,
)
from noisyq.data import make_synthetic_benchmark
from noisyq.featuremaps import FeatureMapKind
from noisyq.kernels import EncodingSpec, cross_gram_from_states, gram_from_states


def _linear_toy(rng, n=20):
    """Linearly separable toy problem with a linear kernel."""
    X = np.vstack([
        rng.normal(-2.0, 0.5, size=(n // 2, 2)),
        rng.normal(2.0, 0.5, size=(n // 2, 2)),
    ])
    y = np.array([0] * (n // 2) + [1] * (n // 2))
    K = X @ X.T
    from noisyq.kernels import KernelMatrix
    return KernelMatrix((K + K.T) / 2), X, y


class TestSmo:
    def test_separable_toy_reaches_full_accuracy(self, rng):
        K, _, y = _linear_toy(rng)
        model = qsvc_train(K, y, C=10.0)
        assert model.converged
        pred = to_binary(model.decision_values(K.entries))
        np.testing.assert_array_equal(pred, y)

    def test_kkt_residual_below_tolerance(self, rng):
        K, _, y = _linear_toy(rng)
        model = qsvc_train(K, y, C=1.0)
        assert model.kkt_residual <= 1e-5

    def test_box_constraints_hold(self, rng):
        K, _, y = _linear_toy(rng)
        C = 0.7
        model = qsvc_train(K, y, C=C)
        alphas = np.asarray(model.alphas)
        assert (alphas >= -1e-12).all()
        assert (alphas <= C + 1e-12).all()
        # stationarity of the dual: sum alpha_i y_i = 0
        np.testing.assert_allclose(np.dot(alphas, signed(y)), 0.0, atol=1e-10)

    def test_deterministic_given_same_inputs(self, rng):
        K, _, y = _linear_toy(rng)
        m1 = qsvc_train(K, y, C=1.0)
        m2 = qsvc_train(K, y, C=1.0)
        np.testing.assert_array_equal(m1.alphas, m2.alphas)
        assert m1.bias == m2.bias

    def test_sign_agreement_with_reference_solver(self, rng):
        train, test = make_synthetic_benchmark(seed=3)
        spec = EncodingSpec(fm=FeatureMapKind.ZZ)
        enc_tr = spec.encode(train.X)
        enc_te = spec.encode(test.X)
        K = gram_from_states(enc_tr)
        Kx = cross_gram_from_states(enc_te, enc_tr)
        model = qsvc_train(K, train.y, C=1.0)
        ref = SVC(kernel="precomputed", C=1.0).fit(K.entries, train.y)
        ours = to_binary(model.decision_values(Kx))
        theirs = ref.predict(Kx)
        agreement = (ours == theirs).mean()
        assert agreement >= 0.99

    def test_single_class_rejected(self, rng):
        K, _, _ = _linear_toy(rng)
        y = np.zeros(20, dtype=int)
        with pytest.raises(ValueError):
            qsvc_train(K, y)

    def test_size_mismatch_rejected(self, rng):
        K, _, y = _linear_toy(rng)
        with pytest.raises(ValueError):
            qsvc_train(K, y[:-1])

    def test_invalid_c_rejected(self, rng):
        K, _, y = _linear_toy(rng)
        with pytest.raises(ValueError):
            qsvc_train(K, y, C=0.0)


class TestQsvcModel:
    def test_benchmark_train_accuracy(self):
        train, _ = make_synthetic_benchmark(seed=0)
        spec = EncodingSpec(fm=FeatureMapKind.Z)
        K = spec.gram(train.X)
        model = qsvc_train(K, train.y, C=1.0, train_X=train.X, encoding=spec)
        acc = accuracy(train.y, to_binary(model.decision_values(K.entries)))
        assert acc == 1.0

    def test_predict_features_re_encodes(self):
        train, test = make_synthetic_benchmark(seed=1)
        spec = EncodingSpec(fm=FeatureMapKind.ZZ)
        K = spec.gram(train.X)
        model = qsvc_train(K, train.y, C=1.0, train_X=train.X, encoding=spec)
        enc_te = spec.encode(test.X)
        enc_tr = spec.encode(train.X)
        direct = to_binary(model.decision_values(cross_gram_from_states(enc_te, enc_tr)))
        np.testing.assert_array_equal(model.predict_features(test.X), direct)

    def test_serialization_round_trip(self, tmp_path):
        train, test = make_synthetic_benchmark(seed=2)
        spec = EncodingSpec(fm=FeatureMapKind.Z)
        K = spec.gram(train.X)
        model = qsvc_train(K, train.y, C=1.0, train_X=train.X, encoding=spec)
        path = tmp_path / "qsvc.json"
        save_model(model, path)
        loaded = load_model(path)
        np.testing.assert_array_equal(loaded.alphas, model.alphas)
        assert loaded.bias == model.bias
        np.testing.assert_array_equal(
            loaded.predict_features(test.X), model.predict_features(test.X)
        )

    def test_decision_rule_tie_goes_to_class_one(self):
        assert to_binary(np.array([0.0]))[0] == 1
        assert to_binary(np.array([-1e-300]))[0] == 0


class TestLabeledDataset:
    def test_rejects_mismatched_sizes(self):
        with pytest.raises(ValueError):
            LabeledDataset(np.zeros((3, 2)), np.array([0, 1]))

    def test_rejects_non_binary_labels(self):
        with pytest.raises(ValueError):
            LabeledDataset(np.zeros((2, 2)), np.array([0, 2]))

    def test_signed_mapping(self):
        np.testing.assert_array_equal(signed(np.array([0, 1, 0])), [-1, 1, -1])
