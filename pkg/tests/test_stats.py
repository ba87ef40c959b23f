import numpy as np
import pytest
from hypothesis import given, strategies as st

from analysis.stats import (
    LogisticConfig, RegressionModel, bin_levels, class_weight_vector, classification_report,
    logistic_fit, logistic_predict, pearson, regime_labels, regression_summary, sigmoid,
    spearman, train_test_split, weighted_nll, weighted_nll_gradient
)
from errors import DegenerateInput, DimensionMismatch, NonFiniteFeatures, SingleClass, ValidationError


def sigmoid_grid(slope=3.0):
    """Repeated x grid with positives in proportion to sigmoid(slope * x)."""
    xs, labels = [], []
    for x in np.linspace(-1.5, 1.5, 20):
        positives = int(round(10 * float(sigmoid(slope * x))))
        xs.extend([x] * 10)
        labels.extend([1] * positives + [0] * (10 - positives))
    return np.array(xs), np.array(labels)


def test_pearson_hand_example():
    result = pearson([1, 2, 3, 4], [2, 1, 4, 3])
    assert result.r == pytest.approx(0.6)
    assert result.n == 4
    assert 0.0 < result.p <= 1.0


def test_perfect_line_hits_the_permutation_floor():
    x = np.arange(20, dtype=float)
    result = pearson(x, 2 * x, n_permutations=10_000, seed=0)
    assert result.r == pytest.approx(1.0)
    assert result.p <= 3 / 10_001


def test_independent_noise_is_not_significant():
    rng = np.random.default_rng(1)
    result = pearson(rng.normal(size=40), rng.normal(size=40), n_permutations=2000, seed=1)
    assert abs(result.r) < 0.5
    assert 0.0 < result.p <= 1.0


def test_pearson_p_value_is_seeded():
    rng = np.random.default_rng(2)
    x, y = rng.normal(size=30), rng.normal(size=30)
    assert pearson(x, y, 500, seed=4) == pearson(x, y, 500, seed=4)


@given(st.lists(st.floats(-100, 100), min_size=3, max_size=30).filter(lambda v: np.ptp(v) > 1e-3),
       st.floats(0.1, 10), st.floats(-50, 50))
def test_pearson_identities(x, a, b):
    x = np.asarray(x)
    assert pearson(x, x, n_permutations=10).r == pytest.approx(1.0)
    assert pearson(x, -x, n_permutations=10).r == pytest.approx(-1.0)
    y = np.cos(x)
    if np.ptp(y) > 1e-6:
        base = pearson(x, y, n_permutations=10).r
        assert -1.0 <= base <= 1.0
        assert pearson(a * x + b, y, n_permutations=10).r == pytest.approx(base, abs=1e-6)


@pytest.mark.parametrize('x, y, error', [
    ([1, 1, 1], [1, 2, 3], DegenerateInput),
    ([1, 2, 3], [5, 5, 5], DegenerateInput),
    ([1, 2], [1, 2], ValidationError),
    ([1, 2, 3], [1, 2], DimensionMismatch),
    ([1, 2, np.nan], [1, 2, 3], NonFiniteFeatures),
])
def test_pearson_rejects_bad_input(x, y, error):
    with pytest.raises(error):
        pearson(x, y)


def test_spearman_on_monotone_data():
    assert spearman([1, 2, 3, 4], [1, 8, 27, 64]).r == pytest.approx(1.0)


def test_gradient_matches_central_differences():
    rng = np.random.default_rng(3)
    for _ in range(20):
        X = rng.normal(size=(15, 3))
        y = (rng.random(15) < 0.5).astype(float)
        y[:2] = (0.0, 1.0)
        weights, _ = class_weight_vector(y, balance=True)
        params = rng.normal(size=4)
        analytic = weighted_nll_gradient(params, X, y, weights)
        numeric = np.zeros(4)
        for k in range(4):
            step = np.zeros(4)
            step[k] = 1e-5
            numeric[k] = (weighted_nll(params + step, X, y, weights)
                          - weighted_nll(params - step, X, y, weights)) / 2e-5
        assert analytic == pytest.approx(numeric, rel=1e-6, abs=1e-9)


def test_balanced_class_weights():
    weights, per_class = class_weight_vector([0, 0, 0, 1], balance=True)
    assert per_class == {0: 4 / 6, 1: 2.0}
    assert list(weights) == [4 / 6, 4 / 6, 4 / 6, 2.0]


def test_balance_is_a_no_op_on_balanced_classes():
    x, labels = sigmoid_grid()
    balanced = logistic_fit(x, labels, balance=True)
    plain = logistic_fit(x, labels, balance=False)
    assert balanced.weights == plain.weights
    assert balanced.bias == plain.bias


def test_recovers_the_generating_slope():
    x, labels = sigmoid_grid(3.0)
    model = logistic_fit(x, labels)
    assert model.converged
    assert model.weights[0] == pytest.approx(3.0, abs=0.5)
    assert abs(model.bias) < 0.1


def test_separable_data_is_classified_perfectly():
    x = [-2.0, -1.0, 1.0, 2.0]
    model = logistic_fit(x, [0, 0, 1, 1], config=LogisticConfig(max_iter=500))
    predicted, probabilities = logistic_predict(model, x)
    assert list(predicted) == [0, 0, 1, 1]
    assert probabilities[3] > 0.9


def test_regime_endpoints_classify_perfectly():
    S = [1.0, 1.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0]
    si = [0.9, 1.0, 0.8, 0.0, 0.0, 0.1, 0.0, 0.0]
    labels = regime_labels(si)
    model = logistic_fit(S, labels)
    predicted, _ = logistic_predict(model, S)
    assert classification_report(labels, predicted)['accuracy'] == 1.0


def test_single_class_rejected():
    with pytest.raises(SingleClass):
        logistic_fit([1.0, 2.0, 3.0, 4.0], [0, 0, 0, 1])


def test_non_finite_features_rejected():
    with pytest.raises(NonFiniteFeatures):
        logistic_fit([1.0, np.inf, 3.0, 4.0], [0, 0, 1, 1])


def test_prediction_at_the_boundary():
    model = RegressionModel(weights=(2.0,), bias=-2.0, class_weights={0: 1.0, 1: 1.0})
    labels, probabilities = logistic_predict(model, [1.0, 50.0])
    assert probabilities[0] == 0.5 and labels[0] == 1
    assert probabilities[1] == pytest.approx(1.0)
    with pytest.raises(DimensionMismatch):
        logistic_predict(model, np.ones((3, 2)))


def test_classification_report_layout():
    report = classification_report([0, 0, 1, 1], [0, 1, 1, 1])
    assert report['accuracy'] == 0.75
    assert report['per_class']['1'] == pytest.approx(
        {'precision': 2 / 3, 'recall': 1.0, 'f1': 0.8, 'support': 2})
    assert report['per_class']['0']['recall'] == 0.5


def test_train_test_split():
    train, test = train_test_split(10, 0.8, seed=0)
    assert (len(train), len(test)) == (8, 2)
    assert sorted(np.concatenate([train, test])) == list(range(10))
    assert [len(part) for part in train_test_split(2, 0.8)] == [1, 1]
    with pytest.raises(ValidationError):
        train_test_split(10, 1.0)


def test_bin_levels():
    assert bin_levels([0.0, 5.0, 10.0]) == ['low', 'medium', 'high']
    assert bin_levels([3.0, 3.0]) == ['low', 'low']
    assert bin_levels([]) == []


def test_regression_summary_with_logistic():
    S = np.repeat([1.0, 1.5, 2.0, 3.0, 4.0], 4)
    si = np.where(S < 1.8, 0.9, 0.1) + np.tile([0.0, 0.01, 0.02, 0.03], 5)
    summary = regression_summary(S, si, logistic=True, n_permutations=200)
    assert summary['n'] == 20
    assert summary['r'] < 0
    assert summary['logistic']['train']['accuracy'] == 1.0
    assert summary['logistic']['model']['feature_names'] == []
    assert 'spearman' in summary


def test_explicit_balance_overrides_the_config():
    x = [-2.0, -1.5, -1.0, -0.5, 0.5, 1.0, 1.5, 2.0]
    labels = [0, 0, 0, 0, 0, 0, 1, 1]
    config = LogisticConfig(max_iter=50)
    assert logistic_fit(x, labels, config=config).class_weights == {0: 8 / 12, 1: 2.0}
    plain = logistic_fit(x, labels, balance=False, config=config)
    assert plain.class_weights == {0: 1.0, 1: 1.0}
    assert plain.iterations <= 50
