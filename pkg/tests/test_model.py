import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from confcf.model import (
    LogisticModel,
    ModelError,
    TrainingConfig,
    confidence,
    load_model,
    loss_and_gradient,
    predict,
    predict_proba,
    rank_features,
    save_model,
    train,
)
from confcf.tabular import (
    CATEGORICAL,
    CONTINUOUS,
    DistanceWeights,
    FeatureSchema,
    FeatureSpec,
    Instance,
    encode,
)


def cont_schema(n=1, lo=-100.0, hi=100.0):
    return FeatureSchema(
        tuple(FeatureSpec(f"x{i}", CONTINUOUS, lower=lo, upper=hi) for i in range(n))
    )


class TestPredictProba:
    def test_zero_model_gives_half(self):
        model = LogisticModel(0.0, np.zeros(2), ("neg", "pos"))
        assert predict_proba(model, np.array([3.0, -4.0])) == 0.5

    def test_bias_ln3_gives_three_quarters(self):
        model = LogisticModel(math.log(3), np.zeros(1), ("neg", "pos"))
        assert predict_proba(model, np.array([0.0])) == pytest.approx(0.75, abs=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(
        st.lists(st.floats(-3, 3), min_size=1, max_size=5),
        st.floats(-3, 3),
        st.lists(st.floats(-5, 5), min_size=1, max_size=5),
    )
    def test_negation_maps_p_to_one_minus_p(self, coefs, bias, xs):
        n = min(len(coefs), len(xs))
        coefs, xs = np.array(coefs[:n]), np.array(xs[:n])
        m = LogisticModel(bias, coefs, ("neg", "pos"))
        m_neg = LogisticModel(-bias, -coefs, ("neg", "pos"))
        assert predict_proba(m_neg, xs) == pytest.approx(
            1.0 - predict_proba(m, xs), abs=1e-12
        )

    def test_width_mismatch_rejected(self):
        model = LogisticModel(0.0, np.zeros(2), ("neg", "pos"))
        with pytest.raises(ModelError):
            predict_proba(model, np.zeros(3))

    def test_strictly_monotone_in_score(self):
        model = LogisticModel(0.0, np.array([1.0]), ("neg", "pos"))
        xs = np.linspace(-30, 30, 500)
        ps = [predict_proba(model, np.array([x])) for x in xs]
        assert all(b > a for a, b in zip(ps, ps[1:]))


class TestConfidence:
    def test_boundary_is_zero(self):
        assert confidence(0.5) == 0.0

    def test_certainty_is_one(self):
        assert confidence(1.0) == 1.0

    def test_direct_substitution(self):
        assert confidence(0.75) == pytest.approx(0.5)

    @settings(max_examples=200, deadline=None)
    @given(st.floats(0.0, 1.0))
    def test_symmetry(self, p):
        assert confidence(p) == pytest.approx(confidence(1.0 - p), abs=1e-12)

    @settings(max_examples=200, deadline=None)
    @given(st.floats(0.0, 1.0))
    def test_bounded_and_zero_only_at_half(self, p):
        u = confidence(p)
        assert 0.0 <= u <= 1.0
        if p != 0.5:
            assert u > 0.0

    def test_out_of_range_rejected(self):
        with pytest.raises(ModelError):
            confidence(1.2)


class TestPredict:
    def test_class_and_confidence(self):
        schema = cont_schema()
        # bias chosen so P = 0.915 exactly
        model = LogisticModel(math.log(0.915 / 0.085), np.zeros(1), ("neg", "pos"))
        pred = predict(model, Instance((0.0,)), schema)
        assert pred.predicted_class == "pos"
        assert pred.confidence == pytest.approx(0.83, abs=1e-12)

    def test_tie_at_boundary_is_positive(self):
        schema = cont_schema()
        model = LogisticModel(0.0, np.zeros(1), ("neg", "pos"))
        pred = predict(model, Instance((1.0,)), schema)
        assert pred.probability == 0.5
        assert pred.predicted_class == "pos"

    def test_low_probability_is_negative(self):
        schema = cont_schema()
        model = LogisticModel(math.log(0.2 / 0.8), np.zeros(1), ("neg", "pos"))
        pred = predict(model, Instance((0.0,)), schema)
        assert pred.predicted_class == "neg"
        assert pred.confidence == pytest.approx(0.6, abs=1e-12)

    def test_custom_boundary_honored(self):
        schema = cont_schema()
        model = LogisticModel(
            math.log(0.3 / 0.7), np.zeros(1), ("neg", "pos"), decision_boundary=0.25
        )
        pred = predict(model, Instance((0.0,)), schema)
        assert pred.predicted_class == "pos"

    def test_schema_hash_mismatch_rejected(self):
        schema = cont_schema()
        model = LogisticModel(
            0.0, np.zeros(1), ("neg", "pos"), schema_hash="not-this-schema"
        )
        with pytest.raises(ModelError):
            predict(model, Instance((0.0,)), schema)


class TestTraining:
    def test_separable_sign(self):
        schema = cont_schema(lo=-5, hi=5)
        data = [Instance((-1.0,)), Instance((1.0,))]
        model = train(data, ["neg", "pos"], schema)
        assert model.coefficients[0] > 0

    def test_constant_features_learn_the_prior(self):
        schema = cont_schema(lo=-5, hi=5)
        data = [Instance((2.0,))] * 10
        labels = ["pos"] * 7 + ["neg"] * 3
        model = train(data, labels, schema)
        p = predict(model, Instance((2.0,)), schema).probability
        assert abs(p - 0.7) < 1e-3

    def test_loss_monotone_non_increasing(self):
        rng = np.random.default_rng(0)
        schema = cont_schema(n=3, lo=-10, hi=10)
        X = rng.uniform(-2, 2, size=(40, 3))
        y = (X @ np.array([1.0, -2.0, 0.5]) + rng.normal(0, 0.4, 40) > 0).astype(float)
        data = [Instance(tuple(row)) for row in X]
        labels = ["pos" if t else "neg" for t in y]
        losses: list[float] = []
        train(data, labels, schema, TrainingConfig(max_epochs=200), loss_history=losses)
        assert len(losses) > 2
        assert all(b <= a for a, b in zip(losses, losses[1:]))

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(3)
        for _ in range(5):
            n, d = 12, 4
            X = rng.uniform(-2, 2, size=(n, d))
            y = (rng.random(n) < 0.5).astype(float)
            coefs = rng.normal(0, 1, d)
            bias = float(rng.normal())
            l2 = 1e-3
            _, grad_c, grad_b = loss_and_gradient(X, y, coefs, bias, l2)
            h = 1e-6
            for j in range(d):
                up, dn = coefs.copy(), coefs.copy()
                up[j] += h
                dn[j] -= h
                fd = (
                    loss_and_gradient(X, y, up, bias, l2)[0]
                    - loss_and_gradient(X, y, dn, bias, l2)[0]
                ) / (2 * h)
                assert grad_c[j] == pytest.approx(fd, rel=1e-5, abs=1e-9)
            fd_b = (
                loss_and_gradient(X, y, coefs, bias + h, l2)[0]
                - loss_and_gradient(X, y, coefs, bias - h, l2)[0]
            ) / (2 * h)
            assert grad_b == pytest.approx(fd_b, rel=1e-5, abs=1e-9)

    def test_single_class_rejected(self):
        schema = cont_schema()
        with pytest.raises(ModelError):
            train([Instance((1.0,)), Instance((2.0,))], ["pos", "pos"], schema)

    def test_deterministic_given_seed(self):
        schema = cont_schema(lo=-5, hi=5)
        data = [Instance((float(v),)) for v in (-2, -1, 1, 2)]
        labels = ["neg", "neg", "pos", "pos"]
        a = train(data, labels, schema, TrainingConfig(seed=9))
        b = train(data, labels, schema, TrainingConfig(seed=9))
        assert a.bias == b.bias
        assert np.array_equal(a.coefficients, b.coefficients)

    def test_income_fixture_beats_majority(self, income_fixture):
        config, instances, labels, _, _ = income_fixture
        split = int(0.8 * len(instances))
        model = train(instances[:split], labels[:split], config.schema)
        held_inst, held_lab = instances[split:], labels[split:]
        correct = sum(
            predict(model, i, config.schema).predicted_class == l
            for i, l in zip(held_inst, held_lab)
        )
        majority = max(held_lab.count(c) for c in set(held_lab))
        assert correct / len(held_lab) > majority / len(held_lab)


class TestPersistence:
    def test_round_trip(self, tmp_path, income_fixture):
        config, instances, _, model, weights = income_fixture
        path = tmp_path / "model.json"
        save_model(path, model, weights)
        loaded, loaded_weights = load_model(path)
        assert loaded.bias == model.bias
        assert np.array_equal(loaded.coefficients, model.coefficients)
        assert loaded.class_labels == model.class_labels
        assert loaded.decision_boundary == model.decision_boundary
        assert loaded.schema_hash == config.schema.schema_hash
        assert loaded_weights.continuous == weights.continuous
        assert loaded_weights.categorical == weights.categorical
        pred_a = predict(model, instances[0], config.schema)
        pred_b = predict(loaded, instances[0], config.schema)
        assert pred_a == pred_b

    def test_unsupported_version_rejected(self, tmp_path):
        path = tmp_path / "model.json"
        path.write_text('{"format_version": 99}', encoding="utf-8")
        with pytest.raises(ModelError):
            load_model(path)

    def test_missing_file_rejected(self, tmp_path):
        with pytest.raises(ModelError):
            load_model(tmp_path / "nope.json")


class TestRanking:
    def test_orders_by_score_swing(self):
        schema = FeatureSchema(
            (
                FeatureSpec("c", CATEGORICAL, levels=("a", "b")),
                FeatureSpec("x", CONTINUOUS, lower=-10.0, upper=10.0),
                FeatureSpec("dead", CONTINUOUS, lower=-10.0, upper=10.0),
            )
        )
        model = LogisticModel(0.0, np.array([0.0, 3.0, 1.0, 0.0]), ("neg", "pos"))
        ranking = rank_features(model, schema)
        assert [name for name, _ in ranking] == ["c", "x", "dead"]
        assert ranking[-1][1] == 0.0
