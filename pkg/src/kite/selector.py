"""Greedy relevance+diversity selection, in feature space or through kernels.

Each step picks the unselected candidate maximizing

    rel(x) + lambda * div(x)

where, against the current selection S and query z,

    rel(x) = (z^T V_S^{-1} x)^2 / (1 + x^T V_S^{-1} x)   relevance gain
    div(x) = log(1 + x^T V_S^{-1} x)                     D-optimal gain

and the kernelized path evaluates the same quantities through the residual
kernel: rel = k_S(z,x)^2 / (beta*(beta+k_S(x,x))), div = log(1+k_S(x,x)/beta).
With a linear kernel the two paths coincide step for step.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import backend
from .bank import EmbeddingBank
from .design import DesignState, quad_form
from .errors import InvalidArgumentError, NumericalDegeneracyError
from .kernels import (
    KIND_CODE,
    KernelSpec,
    KernelState,
    _solve_against_selected,
    format_kernel_spec,
    kernel_eval,
)


@dataclass(frozen=True)
class SelectionConfig:
    k: int
    beta: float = 0.02
    lam: float = 0.5
    kernel: KernelSpec = KernelSpec("linear")
    tie_break: str = "lowest_index"
    normalize_inputs: bool = False
    # Score with the unnormalized residual forms k_S(z,x)^2/(beta+k_S(x,x))
    # and log(beta+k_S(x,x)). Relative to the default this scales relevance
    # by beta and offsets diversity by log(beta): the relevance-only argmax
    # is unchanged but lambda's effective weight is not.
    raw_kernel_scores: bool = False

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise InvalidArgumentError(f"k must be a positive integer, got {self.k!r}")
        if not self.beta > 0 or not math.isfinite(self.beta):
            raise InvalidArgumentError(f"beta must be positive, got {self.beta!r}")
        if self.lam < 0 or not math.isfinite(self.lam):
            raise InvalidArgumentError(f"lambda must be >= 0, got {self.lam!r}")
        if self.tie_break != "lowest_index":
            raise InvalidArgumentError(f"unsupported tie_break {self.tie_break!r}")

    def to_dict(self) -> dict:
        return {
            "k": int(self.k),
            "beta": float(self.beta),
            "lambda": float(self.lam),
            "kernel": format_kernel_spec(self.kernel),
            "tie_break": self.tie_break,
            "normalize_inputs": self.normalize_inputs,
            "raw_kernel_scores": self.raw_kernel_scores,
        }


@dataclass
class StepRecord:
    index: int
    rel: float
    div: float
    total: float

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "rel": self.rel,
            "div": self.div,
            "total": self.total,
        }


@dataclass
class SelectionResult:
    indices: list[int]
    steps: list[StepRecord]
    config: dict
    wall_time: float = 0.0
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "indices": list(self.indices),
            "steps": [s.to_dict() for s in self.steps],
            "config": dict(self.config),
            "warnings": list(self.warnings),
        }


def _normalize_rows(X: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(X, axis=1, keepdims=True)
    return X / np.where(norms > 0, norms, 1.0)


def score_candidate(state, z, x, config: SelectionConfig):
    """(rel, div, total) of candidate x against the state's current selection.

    Accepts either a DesignState (feature-space path) or a KernelState.
    """
    z = np.asarray(z, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    beta = config.beta
    if isinstance(state, DesignState):
        cross = quad_form(state, z, x)
        self_q = quad_form(state, x, x)
        rel = cross * cross / (1.0 + self_q)
        div = math.log1p(self_q)
        if config.raw_kernel_scores:
            rel *= beta
            div += math.log(beta)
    elif isinstance(state, KernelState):
        if abs(state.beta - beta) > 1e-12 * max(1.0, beta):
            raise InvalidArgumentError(
                f"state beta {state.beta} != config beta {beta}"
            )
        cross = kernel_eval(state.spec, z, x)
        self_k = kernel_eval(state.spec, x, x)
        if state.size:
            uz = _solve_against_selected(state, z)
            ux = _solve_against_selected(state, x)
            cross -= float(uz @ ux)
            self_k -= float(ux @ ux)
        if self_k < 0.0:
            if self_k < -1e-9:
                raise NumericalDegeneracyError(
                    f"residual self-kernel {self_k!r} below slack"
                )
            self_k = 0.0
        if config.raw_kernel_scores:
            rel = cross * cross / (beta + self_k)
            div = math.log(beta + self_k)
        else:
            rel = cross * cross / (beta * (beta + self_k))
            div = math.log1p(self_k / beta)
    else:
        raise InvalidArgumentError(f"unsupported state type {type(state).__name__}")
    total = rel + config.lam * div
    return rel, div, total


def select(bank: EmbeddingBank, z, config: SelectionConfig, engine: str = "auto") -> SelectionResult:
    """Run min(k, n) greedy steps over the bank for query z.

    `engine` picks the state representation: "design" maintains the d x d
    inverse (linear kernel only), "kernel" the grow-by-one factor; "auto"
    uses the design path for the linear kernel when d <= 4k. Both are
    exact, so the choice is performance-only; results are deterministic
    with ties broken toward the lowest candidate index.
    """
    t0 = time.perf_counter()
    if not isinstance(bank, EmbeddingBank):
        raise InvalidArgumentError("bank must be an EmbeddingBank")
    z = np.asarray(z, dtype=np.float64)
    if z.shape != (bank.dim,):
        raise InvalidArgumentError(
            f"query has shape {z.shape}, bank dimension is {bank.dim}"
        )
    if not np.all(np.isfinite(z)):
        raise InvalidArgumentError("query has non-finite entries")
    if engine not in ("auto", "design", "kernel"):
        raise InvalidArgumentError(f"unknown engine {engine!r}")

    linear = config.kernel.kind == "linear" and not config.raw_kernel_scores
    if engine == "design" and not linear:
        raise InvalidArgumentError(
            "engine='design' requires the linear kernel with default scoring"
        )
    if engine == "auto":
        engine = "design" if (linear and bank.dim <= 4 * config.k) else "kernel"

    X = np.ascontiguousarray(bank.vectors)
    if config.normalize_inputs:
        X = _normalize_rows(X)
        nz = float(np.linalg.norm(z))
        z = z / nz if nz > 0 else z

    warnings_ = []
    steps = min(config.k, bank.n)
    if config.k > bank.n:
        warnings_.append(
            f"k={config.k} exceeds bank size n={bank.n}; selecting all {bank.n}"
        )

    if engine == "design":
        idx, rel, div, tot, status = backend.lite_loop(
            X, z, steps, float(config.beta), float(config.lam)
        )
    else:
        spec = config.kernel
        idx, rel, div, tot, status = backend.kite_loop(
            X,
            z,
            steps,
            float(config.beta),
            float(config.lam),
            KIND_CODE[spec.kind],
            float(spec.c),
            int(spec.m),
            float(spec.sigma),
            not config.raw_kernel_scores,
        )
    if status != backend.OK:
        raise NumericalDegeneracyError(
            "selection scores degenerated (non-finite or residual below slack); "
            "check input scale and beta"
        )

    config_echo = config.to_dict()
    config_echo["engine"] = engine
    result = SelectionResult(
        indices=[int(i) for i in idx],
        steps=[
            StepRecord(int(idx[s]), float(rel[s]), float(div[s]), float(tot[s]))
            for s in range(steps)
        ],
        config=config_echo,
        warnings=warnings_,
    )
    result.wall_time = time.perf_counter() - t0
    return result
