import math

import numpy as np
import pytest

from rationale_lab import (
    NetworkConfig,
    TrainConfig,
    TrainingDivergedError,
    accuracy,
    gen_tort,
    gen_welfare,
    init_params,
    load_model,
    loss_and_grads,
    predict,
    save_model,
    train,
)
from rationale_lab.network import (
    AdamState,
    ModelParams,
    adam_update,
    forward,
    schema_scaling,
)

from conftest import finite_difference_grads, max_relative_error


def tiny_model(weights, biases, schema_id="tort", feature_names=None, input_width=None):
    """Assemble a TrainedModel around hand-set parameters."""
    from rationale_lab.network import FeatureScaling, TrainedModel

    params = ModelParams([np.array(w, float) for w in weights],
                         [np.array(b, float) for b in biases])
    width = input_width or params.weights[0].shape[0]
    return TrainedModel(
        config=NetworkConfig(width, tuple(w.shape[1] for w in params.weights[:-1]),
                             allow_nonstandard=True),
        train_config=TrainConfig(iterations=1),
        params=params,
        scaling=FeatureScaling(np.zeros(width), np.ones(width)),
        schema_id=schema_id,
        feature_names=feature_names or tuple(f"f{i}" for i in range(width)),
    )


class TestConfigs:
    def test_standard_shapes_accepted(self):
        for hidden in [(12,), (24, 6), (24, 10, 3)]:
            NetworkConfig(64, hidden)

    def test_nonstandard_shape_needs_override(self):
        with pytest.raises(ValueError, match="standard"):
            NetworkConfig(64, (7, 7))
        NetworkConfig(64, (7, 7), allow_nonstandard=True)

    def test_train_config_bounds(self):
        with pytest.raises(ValueError):
            TrainConfig(iterations=0)
        with pytest.raises(ValueError):
            TrainConfig(learning_rate=0.0)
        with pytest.raises(ValueError):
            TrainConfig(batch_size=0)


class TestInit:
    def test_deterministic_in_seed(self):
        cfg = NetworkConfig(10, (24, 10, 3), init_seed=77)
        assert init_params(cfg).allclose(init_params(cfg))

    def test_layer_shapes(self):
        params = init_params(NetworkConfig(10, (24, 10, 3), init_seed=1))
        assert params.shapes() == [(10, 24), (24, 10), (10, 3), (3, 1)]

    def test_fan_balanced_bounds_and_zero_biases(self):
        params = init_params(NetworkConfig(64, (12,), init_seed=3))
        limit = math.sqrt(6.0 / (64 + 12))
        assert np.all(np.abs(params.weights[0]) <= limit)
        assert all(not b.any() for b in params.biases)


class TestForward:
    def test_zero_params_give_half(self):
        model = tiny_model([np.zeros((4, 12)), np.zeros((12, 1))],
                           [np.zeros(12), np.zeros(1)])
        x = np.arange(8, dtype=float).reshape(2, 4)
        assert np.allclose(model.outputs(x), 0.5)

    def test_hand_computed_2_2_1(self):
        w1 = [[0.5, -0.25], [0.1, 0.3]]
        b1 = [0.05, -0.1]
        w2 = [[0.7], [-0.6]]
        b2 = [0.2]
        model = tiny_model([w1, w2], [b1, b2])
        x = [0.4, 0.9]

        sig = lambda v: 1.0 / (1.0 + math.exp(-v))
        h1 = sig(0.4 * 0.5 + 0.9 * 0.1 + 0.05)
        h2 = sig(0.4 * -0.25 + 0.9 * 0.3 - 0.1)
        expected = sig(h1 * 0.7 + h2 * -0.6 + 0.2)
        assert abs(forward(model, np.array(x)) - expected) < 1e-12

    def test_sigmoid_monotone_end_to_end(self):
        model = tiny_model([[[2.0]]], [[0.0]])
        outputs = [forward(model, np.array([x])) for x in (-3.0, -1.0, 0.0, 1.0, 3.0)]
        assert outputs == sorted(outputs)
        assert all(0.0 < o < 1.0 for o in outputs)

    def test_width_mismatch_rejected(self):
        model = tiny_model([np.zeros((4, 1))], [np.zeros(1)])
        with pytest.raises(ValueError, match="4-wide"):
            model.outputs(np.zeros((3, 5)))

    def test_non_finite_input_rejected(self):
        model = tiny_model([np.zeros((2, 1))], [np.zeros(1)])
        with pytest.raises(ValueError, match="non-finite"):
            model.outputs(np.array([np.nan, 0.0]))


class TestLossAndGrads:
    def test_loss_vanishes_for_perfect_prediction(self):
        params = ModelParams([np.array([[20.0]])], [np.array([0.0])])
        loss, _ = loss_and_grads(params, np.array([[1.0]]), np.array([1.0]))
        assert loss < 1e-8

    def test_gradients_match_finite_differences(self):
        rng = np.random.default_rng(11)
        cfg = NetworkConfig(4, (12,), init_seed=5)
        params = init_params(cfg)
        for _ in range(10):
            x = rng.random((8, 4))
            y = rng.integers(0, 2, 8)
            _, backprop = loss_and_grads(params, x, y)
            oracle = finite_difference_grads(params, x, y)
            assert max_relative_error(backprop, oracle) < 1e-4

    def test_symmetric_batch_zeroes_output_gradients(self):
        # labels 0 and 1 on the same input cancel when the output is 0.5
        params = init_params(NetworkConfig(4, (12,), init_seed=5))
        params.weights[-1][:] = 0.0
        params.biases[-1][:] = 0.0
        x = np.tile(np.array([[0.1, 0.4, 0.9, 0.3]]), (2, 1))
        _, grads = loss_and_grads(params, x, np.array([0.0, 1.0]))
        assert np.allclose(grads.biases[-1], 0.0)
        assert np.allclose(grads.weights[-1], 0.0)

    def test_empty_batch_rejected(self):
        params = init_params(NetworkConfig(4, (12,), init_seed=0))
        with pytest.raises(ValueError, match="non-empty"):
            loss_and_grads(params, np.empty((0, 4)), np.empty(0))

    def test_non_finite_loss_reported_distinctly(self):
        params = ModelParams([np.array([[np.nan]])], [np.array([0.0])])
        with pytest.raises(TrainingDivergedError):
            loss_and_grads(params, np.array([[1.0]]), np.array([1.0]))


class TestAdam:
    def test_first_step_closed_form(self):
        # t=1: bias correction makes m_hat=g, v_hat=g^2, so the step is
        # -lr * g / (|g| + eps)
        params = ModelParams([np.array([[0.0]])], [np.array([0.0])])
        grads = ModelParams([np.array([[0.3]])], [np.array([0.0])])
        cfg = TrainConfig(iterations=1)
        adam_update(params, AdamState(params), grads, 1, cfg)
        expected = -0.001 * 0.3 / (0.3 + 1e-8)
        assert abs(params.weights[0][0, 0] - expected) < 1e-15

    def test_zero_gradient_is_a_no_op_from_rest(self):
        params = ModelParams([np.array([[1.5]])], [np.array([0.25])])
        state = AdamState(params)
        zero = params.zeros_like()
        for t in (1, 2, 3):
            adam_update(params, state, zero, t, TrainConfig(iterations=1))
        assert params.weights[0][0, 0] == 1.5 and params.biases[0][0] == 0.25
        assert not state.m.weights[0].any() and not state.v.weights[0].any()

    def test_moments_decay_toward_zero(self):
        params = ModelParams([np.array([[1.5]])], [np.array([0.25])])
        state = AdamState(params)
        state.m.weights[0][:] = 0.8
        state.v.weights[0][:] = 0.4
        zero = params.zeros_like()
        adam_update(params, state, zero, 1, TrainConfig(iterations=1))
        assert state.m.weights[0][0, 0] == pytest.approx(0.8 * 0.9)
        assert state.v.weights[0][0, 0] == pytest.approx(0.4 * 0.999)

    def test_identical_gradient_sequences_identical_params(self):
        rng = np.random.default_rng(4)
        seq = [rng.normal(size=(3, 1)) for _ in range(20)]
        runs = []
        for _ in range(2):
            params = ModelParams([np.zeros((3, 1))], [np.zeros(1)])
            state = AdamState(params)
            for t, g in enumerate(seq, start=1):
                grads = ModelParams([g], [np.zeros(1)])
                adam_update(params, state, grads, t, TrainConfig())
            runs.append(params.weights[0].copy())
        assert np.array_equal(runs[0], runs[1])


class TestTrain:
    def test_bit_deterministic(self):
        ds = gen_tort("regular", size=200, seed=3)
        cfg = NetworkConfig(10, (12,), init_seed=9)
        tc = TrainConfig(iterations=200, shuffle_seed=17)
        a, b = train(ds, cfg, tc), train(ds, cfg, tc)
        for wa, wb in zip(a.params.weights + a.params.biases,
                          b.params.weights + b.params.biases):
            assert np.array_equal(wa, wb)
        assert np.array_equal(a.loss_trace, b.loss_trace)

    def test_one_iteration_moves_params(self):
        ds = gen_tort("regular", size=200, seed=3)
        cfg = NetworkConfig(10, (12,), init_seed=9)
        model = train(ds, cfg, TrainConfig(iterations=1, shuffle_seed=1))
        assert not model.params.allclose(init_params(cfg))

    def test_loss_trace_recorded_and_finite(self):
        ds = gen_tort("regular", size=200, seed=3)
        model = train(ds, NetworkConfig(10, (12,), init_seed=2),
                      TrainConfig(iterations=150, shuffle_seed=5))
        assert model.loss_trace.shape == (150,)
        assert np.isfinite(model.loss_trace).all()

    def test_width_mismatch_rejected(self):
        ds = gen_tort("regular", size=200, seed=3)
        with pytest.raises(ValueError, match="inputs"):
            train(ds, NetworkConfig(64, (12,), init_seed=0), TrainConfig(iterations=1))

    def test_scaling_uses_schema_ranges(self, welfare_schema):
        scaling = schema_scaling("welfare")
        age = welfare_schema.index_of("Age")
        resources = welfare_schema.index_of("Resources")
        row = np.zeros(64)
        row[age], row[resources] = 100, 10_000
        scaled = scaling.apply(row[None, :])
        assert scaled[0, age] == 1.0 and scaled[0, resources] == 1.0
        assert scaling.scales.min() >= 1

    def test_case_row_and_matrix_agree(self, tort_schema):
        """Raw cases are scaled exactly once regardless of input form."""
        ds = gen_tort("regular", size=200, seed=3)
        model = train(ds, NetworkConfig(10, (12,), init_seed=2),
                      TrainConfig(iterations=100, shuffle_seed=5))
        case = tort_schema.row_to_case(ds.values[0])
        via_case = forward(model, case)
        via_row = forward(model, ds.values[0])
        via_matrix = model.outputs(ds.values[:1])[0]
        assert via_case == via_row == via_matrix


class TestPredict:
    def test_tie_breaks_positive(self):
        model = tiny_model([np.zeros((10, 1))], [np.zeros(1)],
                           schema_id="tort")
        ds = gen_tort("unique")
        assert forward(model, ds.values[0]) == 0.5
        assert predict(model, ds.values[0]) is True
        assert model.predict_matrix(ds.values).all()


class TestPersistence:
    def test_round_trip_bit_exact(self, tmp_path):
        ds = gen_tort("regular", size=200, seed=3)
        model = train(ds, NetworkConfig(10, (24, 6), init_seed=2),
                      TrainConfig(iterations=120, shuffle_seed=5))
        path = tmp_path / "model.json"
        save_model(model, path)
        back = load_model(path)
        for a, b in zip(model.params.weights + model.params.biases,
                        back.params.weights + back.params.biases):
            assert np.array_equal(a, b)
        assert np.array_equal(model.scaling.offsets, back.scaling.offsets)
        assert back.config == model.config
        assert back.train_config == model.train_config
        assert back.feature_names == model.feature_names
        # identical outputs after the round trip
        assert np.array_equal(model.outputs(ds.values), back.outputs(ds.values))

    def test_rejects_foreign_file(self, tmp_path):
        path = tmp_path / "model.json"
        path.write_text('{"format": "something-else"}')
        with pytest.raises(ValueError, match="not a"):
            load_model(path)


class TestFullBudgetBehaviour:
    """Single training runs at the published budget (50,000 steps)."""

    def test_tort_full_information_is_perfect(self):
        ds = gen_tort("unique")
        model = train(ds, NetworkConfig(10, (12,), init_seed=41),
                      TrainConfig(iterations=50_000, shuffle_seed=42))
        assert accuracy(model, ds) == 1.0

    def test_simplified_type_b_generalises(self):
        train_set = gen_welfare("type-b", size=50_000, seed=61, simplified=True)
        test_set = gen_welfare("type-a", size=50_000, seed=62, simplified=True)
        model = train(train_set, NetworkConfig(4, (24, 10, 3), init_seed=63),
                      TrainConfig(iterations=50_000, shuffle_seed=64))
        assert accuracy(model, test_set) >= 0.98
