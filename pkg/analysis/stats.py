"""Correlation tests and class-weighted logistic regression."""

import logging
from dataclasses import dataclass, replace

import numpy as np
from scipy import stats
from sklearn.metrics import accuracy_score, precision_recall_fscore_support

from config import (
    N_PERMUTATIONS, LOGISTIC_LEARNING_RATE, LOGISTIC_MAX_ITER, LOGISTIC_TOL,
    TEST_SPLIT, SI_THRESHOLD
)
from errors import (
    DegenerateInput, DimensionMismatch, NonFiniteFeatures, SingleClass, ValidationError
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CorrelationResult:
    r: float
    p: float
    n: int

    def to_dict(self) -> dict:
        return {'r': self.r, 'p': self.p, 'n': self.n}


def _pair(x, y) -> tuple:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 1 or y.ndim != 1:
        raise ValidationError("correlation inputs must be 1-D")
    if x.shape != y.shape:
        raise DimensionMismatch(len(x), len(y))
    if len(x) < 3:
        raise ValidationError(f"correlation needs at least 3 pairs, got {len(x)}")
    if not (np.isfinite(x).all() and np.isfinite(y).all()):
        raise NonFiniteFeatures()
    if np.ptp(x) == 0:
        raise DegenerateInput('x')
    if np.ptp(y) == 0:
        raise DegenerateInput('y')
    return x, y


def _pearson_statistic(y):
    yc = y - y.mean()
    y_norm = np.sqrt(np.sum(yc * yc))

    def statistic(x, axis=-1):
        xc = x - x.mean(axis=axis, keepdims=True)
        x_norm = np.sqrt(np.sum(xc * xc, axis=axis))
        return np.clip(np.sum(xc * yc, axis=axis) / (x_norm * y_norm), -1.0, 1.0)

    return statistic


def pearson(x, y, n_permutations: int = N_PERMUTATIONS, seed: int = 0) -> CorrelationResult:
    """Product-moment r with a two-sided permutation-test p-value.

    Only x is shuffled (pairings), so the test is exact for small samples
    and seeded otherwise.
    """
    x, y = _pair(x, y)
    r = float(stats.pearsonr(x, y).statistic)
    test = stats.permutation_test(
        (x,), _pearson_statistic(y), permutation_type='pairings',
        n_resamples=n_permutations, alternative='two-sided', vectorized=True,
        random_state=np.random.default_rng(seed),
    )
    p = float(min(1.0, test.pvalue))
    logger.debug(f"pearson: r={r:.4f} p={p:.5f} n={len(x)}")
    return CorrelationResult(r, p, len(x))


def spearman(x, y) -> CorrelationResult:
    x, y = _pair(x, y)
    result = stats.spearmanr(x, y)
    return CorrelationResult(float(result.statistic), float(result.pvalue), len(x))


# Logistic regression

@dataclass(frozen=True)
class LogisticConfig:
    learning_rate: float = LOGISTIC_LEARNING_RATE
    max_iter: int = LOGISTIC_MAX_ITER
    tol: float = LOGISTIC_TOL
    balance: bool = True

    def __post_init__(self):
        if self.learning_rate <= 0 or self.max_iter < 1 or self.tol <= 0:
            raise ValidationError("learning_rate, max_iter and tol must be positive")


@dataclass(frozen=True)
class RegressionModel:
    weights: tuple
    bias: float
    class_weights: dict
    feature_names: tuple = ()
    iterations: int = 0
    converged: bool = False

    def to_dict(self) -> dict:
        return {
            'weights': list(self.weights),
            'bias': self.bias,
            'class_weights': {str(k): v for k, v in sorted(self.class_weights.items())},
            'feature_names': list(self.feature_names),
            'iterations': self.iterations,
            'converged': self.converged,
        }


def sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * np.asarray(z, dtype=float)))


def _design(features) -> np.ndarray:
    X = np.asarray(features, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if X.ndim != 2:
        raise ValidationError("features must be a vector or a matrix")
    if not np.isfinite(X).all():
        raise NonFiniteFeatures()
    return X


def class_weight_vector(labels, balance: bool) -> tuple:
    """Per-sample weights and the per-class weight map n / (2 n_c)."""
    y = np.asarray(labels, dtype=int)
    n = len(y)
    counts = {c: int((y == c).sum()) for c in (0, 1)}
    if balance:
        weights = {c: n / (2.0 * counts[c]) for c in (0, 1)}
    else:
        weights = {0: 1.0, 1: 1.0}
    return np.where(y == 1, weights[1], weights[0]), weights


def weighted_nll(params: np.ndarray, X: np.ndarray, y: np.ndarray, sample_weights: np.ndarray) -> float:
    """Mean class-weighted negative log-likelihood; params = (w..., b)."""
    z = X @ params[:-1] + params[-1]
    return float(np.mean(sample_weights * (np.logaddexp(0.0, z) - y * z)))


def weighted_nll_gradient(params: np.ndarray, X: np.ndarray, y: np.ndarray,
                          sample_weights: np.ndarray) -> np.ndarray:
    z = X @ params[:-1] + params[-1]
    residual = sample_weights * (sigmoid(z) - y) / len(y)
    return np.append(X.T @ residual, residual.sum())


def logistic_fit(features, labels, balance: bool = None, config: LogisticConfig = None,
                 feature_names=()) -> RegressionModel:
    """Full-batch gradient descent with backtracking line search.

    An explicit ``balance`` overrides the one in ``config``; otherwise the
    config decides, and class weighting is on by default.
    """
    config = config or LogisticConfig()
    if balance is not None:
        config = replace(config, balance=balance)
    X = _design(features)
    y = np.asarray(labels, dtype=float)
    if len(y) != X.shape[0]:
        raise DimensionMismatch(X.shape[0], len(y))
    if not np.isin(y, (0.0, 1.0)).all():
        raise ValidationError("labels must be 0 or 1")
    for c in (0, 1):
        if (y == c).sum() < 2:
            raise SingleClass(c, f"class {c} has {int((y == c).sum())} examples, need at least 2")

    sample_weights, class_weights = class_weight_vector(y, config.balance)
    params = np.zeros(X.shape[1] + 1)
    loss = weighted_nll(params, X, y, sample_weights)
    step = config.learning_rate
    converged = False
    iteration = 0
    for iteration in range(1, config.max_iter + 1):
        grad = weighted_nll_gradient(params, X, y, sample_weights)
        grad_sq = float(grad @ grad)
        if np.sqrt(grad_sq) < config.tol:
            converged = True
            break
        # Armijo backtracking
        while True:
            candidate = params - step * grad
            candidate_loss = weighted_nll(candidate, X, y, sample_weights)
            if candidate_loss <= loss - 0.5 * step * grad_sq or step < 1e-12:
                break
            step *= 0.5
        params, loss = candidate, candidate_loss
        step = min(config.learning_rate, step * 2.0)

    if not converged:
        logger.info(f"logistic_fit stopped at max_iter={config.max_iter} (separable data?)")
    return RegressionModel(
        weights=tuple(float(w) for w in params[:-1]),
        bias=float(params[-1]),
        class_weights=class_weights,
        feature_names=tuple(feature_names),
        iterations=iteration,
        converged=converged,
    )


def logistic_predict(model: RegressionModel, features) -> tuple:
    """Returns (labels, probabilities); label 1 iff probability >= 0.5."""
    X = _design(features)
    if X.shape[1] != len(model.weights):
        raise DimensionMismatch(len(model.weights), X.shape[1])
    probabilities = sigmoid(X @ np.asarray(model.weights) + model.bias)
    return (probabilities >= 0.5).astype(int), probabilities


def classification_report(y_true, y_pred) -> dict:
    """Accuracy plus per-class precision, recall and F1."""
    y_true = np.asarray(y_true, dtype=int)
    y_pred = np.asarray(y_pred, dtype=int)
    precision, recall, f1, support = precision_recall_fscore_support(
        y_true, y_pred, labels=[0, 1], zero_division=0)
    return {
        'accuracy': float(accuracy_score(y_true, y_pred)),
        'per_class': {
            str(c): {
                'precision': float(precision[c]),
                'recall': float(recall[c]),
                'f1': float(f1[c]),
                'support': int(support[c]),
            }
            for c in (0, 1)
        },
    }


def regime_labels(si_values, threshold: float = SI_THRESHOLD) -> np.ndarray:
    """1 = specialist (SI >= threshold)."""
    return (np.asarray(si_values, dtype=float) >= threshold).astype(int)


def train_test_split(n: int, split: float = TEST_SPLIT, seed: int = 0) -> tuple:
    """Seeded shuffle into (train, test) index arrays; both non-empty."""
    if not (0.0 < split < 1.0):
        raise ValidationError(f"split must lie in (0, 1), got {split}")
    if n < 2:
        raise ValidationError("need at least 2 rows to split")
    order = np.random.default_rng(seed).permutation(n)
    cut = min(n - 1, max(1, int(round(split * n))))
    return np.sort(order[:cut]), np.sort(order[cut:])


def bin_levels(values, labels=('low', 'medium', 'high')) -> list:
    """Equal-width bins over the observed range."""
    values = np.asarray(values, dtype=float)
    if len(values) == 0:
        return []
    lo, hi = float(values.min()), float(values.max())
    if hi == lo:
        return [labels[0]] * len(values)
    k = len(labels)
    index = np.minimum(((values - lo) / (hi - lo) * k).astype(int), k - 1)
    return [labels[i] for i in index]


def regression_summary(x, y, threshold: float = SI_THRESHOLD, logistic: bool = False,
                       split: float = TEST_SPLIT, seed: int = 0,
                       n_permutations: int = N_PERMUTATIONS) -> dict:
    """Everything `parlens stats` reports for one (x, y) column pair."""
    corr = pearson(x, y, n_permutations, seed)
    summary = {
        'n': corr.n,
        'r': corr.r,
        'p': corr.p,
        'spearman': spearman(x, y).r,
    }
    if not logistic:
        return summary

    x = np.asarray(x, dtype=float)
    labels = regime_labels(y, threshold)
    model = logistic_fit(x, labels, balance=True)
    predicted, _ = logistic_predict(model, x)
    summary['logistic'] = {
        'threshold': threshold,
        'model': model.to_dict(),
        'train': classification_report(labels, predicted),
    }

    train_idx, test_idx = train_test_split(len(x), split, seed)
    try:
        held = logistic_fit(x[train_idx], labels[train_idx], balance=True)
    except SingleClass as e:
        logger.warning(f"Skipping held-out evaluation: {e}")
        summary['logistic']['test'] = None
    else:
        test_pred, _ = logistic_predict(held, x[test_idx])
        summary['logistic']['test'] = classification_report(labels[test_idx], test_pred)
        summary['logistic']['split'] = split
    return summary
