"""Kernel evaluation and incremental maintenance of the residual kernel.

For a selected set S, the residual kernel is

    k_S(a, b) = k(a, b) - k_S(a)^T (K_S + beta*I)^{-1} k_S(b),

where K_S is the gram matrix over S and k_S(v) the kernel vector against S.
The state keeps a lower-triangular factor L with L L^T = K_S + beta*I,
grown one row per selection, so residual evaluations are two triangular
solves instead of a fresh inverse.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bank import EmbeddingBank
from .errors import InvalidArgumentError, NumericalDegeneracyError

KINDS = ("linear", "polynomial", "gaussian")

# numeric codes shared with the hot loops
KIND_CODE = {"linear": 0, "polynomial": 1, "gaussian": 2}

SELF_KERNEL_SLACK = 1e-9


@dataclass(frozen=True)
class KernelSpec:
    """Tagged kernel choice; parameters unused by the active kind are ignored.

    linear:      k(x, y) = x . y
    polynomial:  k(x, y) = (x . y + c)^m
    gaussian:    k(x, y) = exp(-||x - y||^2 / (2 sigma^2))
    """

    kind: str = "linear"
    c: float = 1.0
    m: int = 3
    sigma: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidArgumentError(
                f"kernel kind must be one of {KINDS}, got {self.kind!r}"
            )
        if self.kind == "polynomial" and (int(self.m) != self.m or self.m < 1):
            raise InvalidArgumentError(f"polynomial degree m must be >= 1, got {self.m!r}")
        if self.kind == "gaussian" and not self.sigma > 0:
            raise InvalidArgumentError(f"gaussian sigma must be > 0, got {self.sigma!r}")


def parse_kernel_spec(text: str) -> KernelSpec:
    """Decode the CLI encoding: `linear`, `poly:c=<real>,m=<int>`, `rbf:sigma=<real>`."""
    head, _, tail = text.strip().partition(":")
    params = {}
    if tail:
        for item in tail.split(","):
            key, eq, value = item.partition("=")
            if not eq:
                raise InvalidArgumentError(f"bad kernel parameter {item!r} in {text!r}")
            params[key.strip()] = value.strip()
    allowed = {"linear": set(), "poly": {"c", "m"}, "rbf": {"sigma"}}
    if head not in allowed:
        raise InvalidArgumentError(f"unknown kernel {head!r} (expected linear, poly or rbf)")
    unknown = set(params) - allowed[head]
    if unknown:
        raise InvalidArgumentError(f"unknown kernel parameters {sorted(unknown)} in {text!r}")
    try:
        if head == "linear":
            return KernelSpec("linear")
        if head == "poly":
            return KernelSpec("polynomial", c=float(params.get("c", 1.0)), m=int(params.get("m", 3)))
        return KernelSpec("gaussian", sigma=float(params.get("sigma", 1.0)))
    except ValueError as exc:
        raise InvalidArgumentError(f"bad kernel spec {text!r}: {exc}") from exc


def format_kernel_spec(spec: KernelSpec) -> str:
    if spec.kind == "linear":
        return "linear"
    if spec.kind == "polynomial":
        return f"poly:c={spec.c!r},m={spec.m}"
    return f"rbf:sigma={spec.sigma!r}"


def kernel_eval(spec: KernelSpec, x, y) -> float:
    """k(x, y) for a single pair; symmetric; gaussian output lies in (0, 1]."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise InvalidArgumentError(f"shape mismatch: {x.shape} vs {y.shape}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise InvalidArgumentError("kernel inputs must be finite")
    if spec.kind == "linear":
        return float(x @ y)
    if spec.kind == "polynomial":
        return float((x @ y + spec.c) ** int(spec.m))
    diff = x - y
    return float(np.exp(-(diff @ diff) / (2.0 * spec.sigma**2)))


def kernel_matrix(spec: KernelSpec, X, Y=None) -> np.ndarray:
    """All-pairs kernel values between rows of X and rows of Y (default X)."""
    X = np.asarray(X, dtype=np.float64)
    Y = X if Y is None else np.asarray(Y, dtype=np.float64)
    if spec.kind == "linear":
        return X @ Y.T
    if spec.kind == "polynomial":
        return (X @ Y.T + spec.c) ** int(spec.m)
    sq = np.maximum(
        np.sum(X * X, axis=1)[:, None] + np.sum(Y * Y, axis=1)[None, :] - 2.0 * X @ Y.T,
        0.0,
    )
    return np.exp(-sq / (2.0 * spec.sigma**2))


def kernel_vector(spec: KernelSpec, X, v) -> np.ndarray:
    """Kernel values between each row of X and a single vector v."""
    return kernel_matrix(spec, np.asarray(X, dtype=np.float64), np.asarray(v, dtype=np.float64)[None, :])[:, 0]


@dataclass
class KernelState:
    """Grow-by-one factorization of (K_S + beta*I) over the selected set."""

    spec: KernelSpec
    beta: float
    selected: list[int] = field(default_factory=list)
    chol: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    rows: np.ndarray | None = None  # cached selected vectors, |S| x d

    @property
    def size(self) -> int:
        return len(self.selected)


def init_kernel_state(spec: KernelSpec, beta: float) -> KernelState:
    beta = float(beta)
    if not np.isfinite(beta) or beta <= 0:
        raise InvalidArgumentError(f"beta must be positive, got {beta!r}")
    return KernelState(spec=spec, beta=beta)


def _check_bank(state: KernelState, bank: EmbeddingBank) -> None:
    if state.selected and max(state.selected) >= bank.n:
        raise InvalidArgumentError("state references indices outside the bank")
    if state.rows is not None and state.rows.shape[1] != bank.dim:
        raise InvalidArgumentError(
            f"state dimension {state.rows.shape[1]} != bank dimension {bank.dim}"
        )


def _solve_against_selected(state: KernelState, v) -> np.ndarray:
    """Forward-substitute L u = k_S(v); empty selection gives an empty vector."""
    if state.size == 0:
        return np.zeros(0)
    kv = kernel_vector(state.spec, state.rows, v)
    return np.linalg.solve(state.chol, kv)


def residual_kernel(state: KernelState, bank: EmbeddingBank, a, b) -> float:
    """k_S(a, b); the self value k_S(a, a) is clamped to 0 within -1e-9 slack."""
    _check_bank(state, bank)
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.shape != (bank.dim,):
        raise InvalidArgumentError(f"expected vectors of shape ({bank.dim},)")
    value = kernel_eval(state.spec, a, b)
    if state.size:
        ua = _solve_against_selected(state, a)
        ub = ua if (a is b or np.array_equal(a, b)) else _solve_against_selected(state, b)
        value -= float(ua @ ub)
    if a is b or np.array_equal(a, b):
        if value < -SELF_KERNEL_SLACK:
            raise NumericalDegeneracyError(
                f"residual self-kernel {value!r} below -{SELF_KERNEL_SLACK} slack"
            )
        value = max(value, 0.0)
    return float(value)


def extend_kernel_state(state: KernelState, bank: EmbeddingBank, idx: int) -> KernelState:
    """Grow the factor by the bank row `idx` via the block Cholesky step."""
    _check_bank(state, bank)
    idx = int(idx)
    if not 0 <= idx < bank.n:
        raise InvalidArgumentError(f"index {idx} outside bank of size {bank.n}")
    if idx in state.selected:
        raise InvalidArgumentError(f"index {idx} already selected")
    x = bank.vectors[idx]
    r = _solve_against_selected(state, x)
    diag2 = kernel_eval(state.spec, x, x) + state.beta - float(r @ r)
    if not np.isfinite(diag2) or diag2 < -SELF_KERNEL_SLACK:
        raise NumericalDegeneracyError(
            f"new pivot {diag2!r} at index {idx}: kernel matrix not positive "
            f"definite enough for beta={state.beta}"
        )
    diag = np.sqrt(max(diag2, 0.0))
    s = state.size
    grown = np.zeros((s + 1, s + 1))
    grown[:s, :s] = state.chol
    grown[s, :s] = r
    grown[s, s] = diag
    state.chol = grown
    state.selected.append(idx)
    row = bank.vectors[idx][None, :]
    state.rows = row.copy() if state.rows is None else np.vstack([state.rows, row])
    return state
