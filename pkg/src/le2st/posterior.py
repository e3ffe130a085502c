"""Logistic-regression posterior model with optional Platt calibration."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import expit

from .errors import DegenerateTrainingError, InvalidInputError

__all__ = [
    "TrainConfig",
    "PosteriorModel",
    "logistic_loss",
    "logistic_grad",
    "train_logistic",
    "stratified_folds",
    "cross_val_scores",
    "platt_calibrate",
    "posterior",
]

PROB_FLOOR = 1e-12


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.1
    iterations: int = 500
    l2_penalty: float = 1e-3
    cv_folds: int = 3
    seed: int = 0
    calibrate: bool = False

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise InvalidInputError("learning_rate must be positive")
        if self.iterations < 0:
            raise InvalidInputError("iterations must be nonnegative")
        if self.l2_penalty < 0:
            raise InvalidInputError("l2_penalty must be nonnegative")
        if self.cv_folds < 2:
            raise InvalidInputError("cv_folds must be at least 2")


@dataclass(frozen=True)
class PosteriorModel:
    """Linear score ``w.s + b``, optionally passed through a Platt sigmoid.

    ``calibration = (A, B)`` maps a raw score ``f`` to ``1 / (1 + exp(A f + B))``.
    """

    weights: np.ndarray
    bias: float = 0.0
    calibration: Optional[tuple[float, float]] = None

    def __post_init__(self):
        w = np.array(self.weights, dtype=float).ravel()
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "bias", float(self.bias))

    @classmethod
    def constant(cls, d: int) -> "PosteriorModel":
        """The untrained model: posterior 0.5 everywhere."""
        return cls(np.zeros(d), 0.0)

    @property
    def d(self) -> int:
        return self.weights.shape[0]

    def _check(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[None, :] if X.shape[0] == self.d else X[:, None]
        if X.shape[-1] != self.d:
            raise InvalidInputError(f"point dimension {X.shape[-1]} != model dimension {self.d}")
        return X

    def score(self, X) -> np.ndarray:
        """Raw margin ``w.s + b`` for each row of ``X``."""
        return self._check(X) @ self.weights + self.bias

    def logit(self, X) -> np.ndarray:
        """Unclamped log-odds of ``z = 1``; strictly monotone in the posterior."""
        f = self.score(X)
        if self.calibration is None:
            return f
        A, B = self.calibration
        return -(A * f + B)

    def prob1(self, X) -> np.ndarray:
        return np.clip(expit(self.logit(X)), PROB_FLOOR, 1.0 - PROB_FLOOR)

    def prob0(self, X) -> np.ndarray:
        return 1.0 - self.prob1(X)


def posterior(model: PosteriorModel, point) -> float:
    """``P(z = 1 | point)`` clamped to ``[1e-12, 1 - 1e-12]``."""
    p = np.asarray(point, dtype=float).ravel()
    if p.shape[0] != model.d:
        raise InvalidInputError(f"point dimension {p.shape[0]} != model dimension {model.d}")
    return float(model.prob1(p[None, :])[0])


def logistic_loss(w, b, X, y, l2: float) -> float:
    """Mean log-loss plus ``l2/2 * |w|^2`` (bias unpenalized)."""
    s = X @ w + b
    return float(np.mean(np.logaddexp(0.0, s) - y * s) + 0.5 * l2 * np.dot(w, w))


def logistic_grad(w, b, X, y, l2: float) -> tuple[np.ndarray, float]:
    r = expit(X @ w + b) - y
    return X.T @ r / X.shape[0] + l2 * w, float(np.mean(r))


def _as_xy(features, labels):
    X = np.asarray(features, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    y = np.asarray(labels, dtype=float).ravel()
    if X.shape[0] != y.shape[0]:
        raise InvalidInputError(f"{X.shape[0]} rows but {y.shape[0]} labels")
    if not np.all(np.isfinite(X)):
        raise InvalidInputError("features contain non-finite values")
    if not np.all((y == 0) | (y == 1)):
        raise InvalidInputError("labels must be 0 or 1")
    return X, y


def _fit_linear(X, y, cfg: TrainConfig) -> PosteriorModel:
    w = np.zeros(X.shape[1])
    b = 0.0
    for _ in range(cfg.iterations):
        gw, gb = logistic_grad(w, b, X, y, cfg.l2_penalty)
        w = w - cfg.learning_rate * gw
        b = b - cfg.learning_rate * gb
    return PosteriorModel(w, b)


def train_logistic(features, labels, cfg: TrainConfig = TrainConfig()) -> PosteriorModel:
    """Full-batch gradient descent on the L2-regularized logistic loss.

    Starts from the zero model and takes ``cfg.iterations`` fixed-size steps.
    With ``cfg.calibrate`` the returned model also carries Platt parameters
    fitted to out-of-fold scores from ``cfg.cv_folds``-fold refits.

    Raises
    ------
    DegenerateTrainingError
        If only one class is present.
    """
    X, y = _as_xy(features, labels)
    if y.min() == y.max():
        raise DegenerateTrainingError(f"single-class training set ({X.shape[0]} points)")
    model = _fit_linear(X, y, cfg)
    if cfg.calibrate:
        A, B = platt_calibrate(cross_val_scores(X, y, cfg), y)
        model = PosteriorModel(model.weights, model.bias, (A, B))
    return model


def stratified_folds(labels, k: int, seed: int) -> np.ndarray:
    """Fold index per example; each class is shuffled and dealt round-robin."""
    y = np.asarray(labels).ravel()
    rng = np.random.default_rng(seed)
    fold = np.empty(y.shape[0], dtype=np.int64)
    offset = 0
    for c in (0, 1):
        idx = np.flatnonzero(y == c)
        idx = idx[rng.permutation(idx.shape[0])]
        fold[idx] = (np.arange(idx.shape[0]) + offset) % k
        offset += idx.shape[0]
    return fold


def cross_val_scores(features, labels, cfg: TrainConfig = TrainConfig()) -> np.ndarray:
    """Out-of-fold raw scores from ``cfg.cv_folds`` stratified refits."""
    X, y = _as_xy(features, labels)
    if min(np.sum(y == 0), np.sum(y == 1)) < 2:
        raise DegenerateTrainingError("cross-validation needs at least two examples per class")
    fold = stratified_folds(y, cfg.cv_folds, cfg.seed)
    out = np.empty(X.shape[0])
    for k in range(cfg.cv_folds):
        test = fold == k
        if not test.any():
            continue
        m = _fit_linear(X[~test], y[~test], cfg)
        out[test] = m.score(X[test])
    return out


def platt_calibrate(scores, labels, max_iter: int = 100) -> tuple[float, float]:
    """Fit ``p(z=1|f) = 1/(1 + exp(A f + B))`` by regularized Newton steps.

    Targets are smoothed to ``(N+ + 1)/(N+ + 2)`` and ``1/(N- + 2)``.  The
    slope is constrained to ``A <= 0`` so that calibration never reverses the
    ranking of raw scores; if the free fit has ``A > 0`` only ``B`` is refit.
    """
    f = np.asarray(scores, dtype=float).ravel()
    y = np.asarray(labels).ravel()
    if f.shape[0] != y.shape[0]:
        raise InvalidInputError(f"{f.shape[0]} scores but {y.shape[0]} labels")
    n_pos = int(np.sum(y == 1))
    n_neg = int(np.sum(y == 0))
    if n_pos == 0 or n_neg == 0:
        raise DegenerateTrainingError("Platt calibration needs both classes")
    t = np.where(y == 1, (n_pos + 1.0) / (n_pos + 2.0), 1.0 / (n_neg + 2.0))

    A, B = _platt_newton(f, t, 0.0, np.log((n_neg + 1.0) / (n_pos + 1.0)), max_iter, fit_a=True)
    if A > 0.0:
        A, B = _platt_newton(f, t, 0.0, B, max_iter, fit_a=False)
    return float(A), float(B)


def _platt_objective(f, t, A, B) -> float:
    z = A * f + B
    # t*z + log(1 + exp(-z)), written to avoid overflow for either sign of z
    return float(np.sum(t * z + np.logaddexp(0.0, -z)))


def _platt_newton(f, t, A, B, max_iter, fit_a):
    sigma = 1e-12
    obj = _platt_objective(f, t, A, B)
    for _ in range(max_iter):
        p = expit(-(A * f + B))
        d1 = t - p
        d2 = p * (1.0 - p)
        gB = np.sum(d1)
        hBB = np.sum(d2) + sigma
        if fit_a:
            gA = np.sum(f * d1)
            hAA = np.sum(f * f * d2) + sigma
            hAB = np.sum(f * d2)
            if abs(gA) < 1e-10 and abs(gB) < 1e-10:
                break
            det = hAA * hBB - hAB * hAB
            dA = -(hBB * gA - hAB * gB) / det
            dB = -(-hAB * gA + hAA * gB) / det
            gd = gA * dA + gB * dB
        else:
            if abs(gB) < 1e-10:
                break
            dA, dB = 0.0, -gB / hBB
            gd = gB * dB
        step = 1.0
        while step >= 1e-10:
            nA, nB = A + step * dA, B + step * dB
            nobj = _platt_objective(f, t, nA, nB)
            if nobj < obj + 1e-4 * step * gd:
                A, B, obj = nA, nB, nobj
                break
            step /= 2.0
        else:
            break
    return A, B
