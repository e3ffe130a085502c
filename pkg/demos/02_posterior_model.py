"""Train the stage-one logistic model and optionally calibrate it.

Thirty labeled points are all the model sees.  The calibrated model keeps the
ranking of the raw scores, so any query scheme built on it selects the same
points as it would with the raw model.
"""
import numpy as np

from le2st import TrainConfig, posterior, train_logistic

rng = np.random.default_rng(1)
z = rng.integers(0, 2, 30)
X = rng.normal(size=(30, 2)) + np.where(z[:, None] == 0, [1.0, 0.0], [-1.0, 0.0])

raw = train_logistic(X, z)
cal = train_logistic(X, z, TrainConfig(calibrate=True))
print("weights", np.round(raw.weights, 3), "bias", round(raw.bias, 3))
print("Platt (A, B)", tuple(round(v, 3) for v in cal.calibration))

for point in ([2.0, 0.0], [0.0, 0.0], [-2.0, 0.0]):
    print(point, f"raw P(z=1)={posterior(raw, point):.3f}", f"calibrated={posterior(cal, point):.3f}")
