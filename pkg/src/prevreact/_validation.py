"""Input checks shared by the model types, the solvers and the estimator."""
import math

import numpy as np
from sklearn.utils import check_array

from .exceptions import ValidationError


def check_real(value, name, *, low=None, high=None, strict_low=False):
    try:
        x = float(value)
    except (TypeError, ValueError):
        raise ValidationError(f"{name} must be a real number, got {value!r}") from None
    if not math.isfinite(x):
        raise ValidationError(f"{name} must be finite, got {x}")
    if low is not None and (x < low or (strict_low and x == low)):
        op = ">" if strict_low else ">="
        raise ValidationError(f"{name} must be {op} {low}, got {x}")
    if high is not None and x > high:
        raise ValidationError(f"{name} must be <= {high}, got {x}")
    return x


def check_probability(value, name):
    return check_real(value, name, low=0.0, high=1.0)


def check_vector(values, name, *, n=None, low=None, high=None):
    """Return `values` as a finite 1-D float array, optionally bounded."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise ValidationError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if n is not None and arr.shape[0] != n:
        raise ValidationError(f"{name} must have length {n}, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} must be finite")
    if low is not None and np.any(arr < low):
        raise ValidationError(f"{name} must be >= {low}")
    if high is not None and np.any(arr > high):
        raise ValidationError(f"{name} must be <= {high}")
    return arr


def check_node_matrix(X):
    """Validate an (n_nodes, 4) matrix with columns Y, v, epsilon, delta."""
    X = check_array(X, dtype=float, ensure_2d=True)
    if X.shape[1] != 4:
        raise ValidationError(
            f"node matrix needs 4 columns (Y, v, epsilon, delta), got {X.shape[1]}"
        )
    if np.any(X[:, :3] <= 0):
        raise ValidationError("Y, v and epsilon must be strictly positive")
    if np.any(X[:, 3] < 0):
        raise ValidationError("delta must be nonnegative")
    return X


def check_signals(S, n_nodes):
    """Validate a (n_signals, n_nodes) binary matrix; a 1-D input is one signal."""
    S = np.asarray(S)
    if S.ndim == 1:
        S = S.reshape(1, -1)
    S = check_array(S, dtype=None, ensure_2d=True)
    if S.shape[1] != n_nodes:
        raise ValidationError(f"signals must have {n_nodes} columns, got {S.shape[1]}")
    if not np.all((S == 0) | (S == 1)):
        raise ValidationError("signals must be binary")
    return S.astype(np.int8)
