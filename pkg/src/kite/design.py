"""Regularized design-matrix inverse maintained through rank-one updates.

The state tracks V^{-1} for V = beta*I + sum_i x_i x_i^T. Every quadratic
form the selection and analysis rules need (relevance, diversity, marginal
gain, coherence) reduces to a^T V^{-1} b against this inverse.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError, NumericalDegeneracyError


@dataclass
class DesignState:
    dim: int
    beta: float
    inv: np.ndarray
    count: int = field(default=0)


def init_design(dim: int, beta: float) -> DesignState:
    """Fresh state with inv = (1/beta) * I_dim and no updates applied."""
    if not isinstance(dim, (int, np.integer)) or dim < 1:
        raise InvalidArgumentError(f"dim must be a positive integer, got {dim!r}")
    beta = float(beta)
    if not np.isfinite(beta) or beta <= 0:
        raise InvalidArgumentError(f"beta must be positive, got {beta!r}")
    return DesignState(dim=int(dim), beta=beta, inv=np.eye(dim) / beta)


def _check_vector(state: DesignState, v, name: str) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (state.dim,):
        raise InvalidArgumentError(
            f"{name} has shape {v.shape}, expected ({state.dim},)"
        )
    return v


def quad_form(state: DesignState, a, b) -> float:
    """a^T V^{-1} b. Symmetric in (a, b).

    A self form (a identical to b) that comes out non-positive for a
    nonzero vector means the maintained inverse has lost positive
    definiteness; that is reported, never clamped.
    """
    a = _check_vector(state, a, "a")
    b = _check_vector(state, b, "b")
    value = float(a @ state.inv @ b)
    if (a is b or np.array_equal(a, b)) and value <= 0.0 and np.any(a != 0.0):
        raise NumericalDegeneracyError(
            f"self quadratic form is {value!r}; V^{{-1}} lost positive definiteness"
        )
    return value


def rank_one_update(state: DesignState, x) -> DesignState:
    """Apply V <- V + x x^T to the maintained inverse (Sherman-Morrison).

    The result is re-symmetrized to suppress floating-point drift.
    """
    x = _check_vector(state, x, "x")
    if not np.all(np.isfinite(x)):
        raise InvalidArgumentError("update vector has non-finite entries")
    u = state.inv @ x
    denom = 1.0 + float(x @ u)
    if denom <= 0.0:
        raise NumericalDegeneracyError(
            f"1 + x^T V^{{-1}} x = {denom!r}; V^{{-1}} lost positive definiteness"
        )
    state.inv -= np.outer(u, u / denom)
    state.inv += state.inv.T
    state.inv *= 0.5
    state.count += 1
    return state


def log_det_increment(state: DesignState, x) -> float:
    """log det(V + x x^T) - log det(V) = log(1 + x^T V^{-1} x).

    This is the information-gain (D-optimal) increment of adding x;
    it is non-negative for any x.
    """
    x = _check_vector(state, x, "x")
    v = quad_form(state, x, x)
    return float(np.log1p(v))
