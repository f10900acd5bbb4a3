"""Reference selection strategies: random, dense top-k, and greedy DPP-MAP.

The DPP baseline runs greedy MAP inference over the query-conditioned
kernel L = diag(q) S diag(q), where S_ij = k(x_i, x_j) from a KernelSpec
and the quality term is q_i = exp(similarity(x_i, z) / tau). This is a
declared construction: it mirrors quality-times-diversity DPP retrieval
without any learned components.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import backend
from .bank import EmbeddingBank
from .errors import InvalidArgumentError, NumericalDegeneracyError
from .kernels import KIND_CODE, KernelSpec, format_kernel_spec
from .selector import SelectionResult, StepRecord

SIMILARITIES = ("cosine", "dot")


@dataclass(frozen=True)
class BaselineSpec:
    method: str = "dpp_greedy"
    similarity: str = "cosine"
    kernel: KernelSpec = KernelSpec("linear")
    relevance_temp: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.method not in ("random", "dense_topk", "dpp_greedy"):
            raise InvalidArgumentError(f"unknown baseline method {self.method!r}")
        if self.similarity not in SIMILARITIES:
            raise InvalidArgumentError(f"unknown similarity {self.similarity!r}")
        if not self.relevance_temp > 0:
            raise InvalidArgumentError(
                f"relevance_temp must be > 0, got {self.relevance_temp!r}"
            )


def _check_k(k) -> int:
    if int(k) != k or k < 1:
        raise InvalidArgumentError(f"k must be a positive integer, got {k!r}")
    return int(k)


def _check_query(bank: EmbeddingBank, z) -> np.ndarray:
    z = np.asarray(z, dtype=np.float64)
    if z.shape != (bank.dim,):
        raise InvalidArgumentError(
            f"query has shape {z.shape}, bank dimension is {bank.dim}"
        )
    return z


def _result(method, indices, scores, config, warnings, t0) -> SelectionResult:
    # baselines carry their step score as rel with div = 0, so the
    # total = rel + lambda*div identity holds for any lambda
    res = SelectionResult(
        indices=[int(i) for i in indices],
        steps=[
            StepRecord(int(i), float(s), 0.0, float(s))
            for i, s in zip(indices, scores)
        ],
        config=config,
        warnings=warnings,
    )
    res.wall_time = time.perf_counter() - t0
    return res


def similarities(bank: EmbeddingBank, z, similarity: str) -> np.ndarray:
    """Similarity of every bank row to z; cosine maps zero-norm rows to -inf."""
    z = _check_query(bank, z)
    dots = bank.vectors @ z
    if similarity == "dot":
        return dots
    if similarity != "cosine":
        raise InvalidArgumentError(f"unknown similarity {similarity!r}")
    norms = np.linalg.norm(bank.vectors, axis=1) * float(np.linalg.norm(z))
    with np.errstate(invalid="ignore", divide="ignore"):
        sims = np.where(norms > 0, dots / np.where(norms > 0, norms, 1.0), -np.inf)
    return sims


def select_random(bank: EmbeddingBank, k, seed) -> SelectionResult:
    """min(k, n) uniform draws without replacement from a seeded generator."""
    t0 = time.perf_counter()
    k = _check_k(k)
    take = min(k, bank.n)
    warnings_ = []
    if k > bank.n:
        warnings_.append(f"k={k} exceeds bank size n={bank.n}; selecting all {bank.n}")
    rng = np.random.default_rng(seed)
    indices = rng.choice(bank.n, size=take, replace=False)
    config = {"method": "random", "k": k, "seed": int(seed)}
    return _result("random", indices, np.zeros(take), config, warnings_, t0)


def select_dense_topk(bank: EmbeddingBank, z, k, similarity: str = "cosine") -> SelectionResult:
    """Indices of the k largest similarities, descending, ties to lowest index."""
    t0 = time.perf_counter()
    k = _check_k(k)
    sims = similarities(bank, z, similarity)
    take = min(k, bank.n)
    warnings_ = []
    if k > bank.n:
        warnings_.append(f"k={k} exceeds bank size n={bank.n}; selecting all {bank.n}")
    order = np.argsort(-sims, kind="stable")[:take]
    config = {"method": "dense_topk", "k": k, "similarity": similarity}
    return _result("dense_topk", order, sims[order], config, warnings_, t0)


def select_dpp_greedy(bank: EmbeddingBank, z, k, spec: BaselineSpec | None = None) -> SelectionResult:
    """Greedy MAP for the quality-scaled kernel; deterministic, lowest-index ties.

    Step scores record the log-det increment of L restricted to the selection.
    """
    t0 = time.perf_counter()
    k = _check_k(k)
    spec = spec or BaselineSpec()
    z = _check_query(bank, z)
    sims = similarities(bank, z, spec.similarity)
    # exp(-inf) = 0: zero-norm rows get zero quality and are never picked
    # ahead of any positive-quality candidate
    qual = np.exp(sims / spec.relevance_temp)
    take = min(k, bank.n)
    warnings_ = []
    if k > bank.n:
        warnings_.append(f"k={k} exceeds bank size n={bank.n}; selecting all {bank.n}")
    kern = spec.kernel
    idx, gains, status = backend.dpp_loop(
        np.ascontiguousarray(bank.vectors),
        qual,
        take,
        KIND_CODE[kern.kind],
        float(kern.c),
        int(kern.m),
        float(kern.sigma),
    )
    if status != backend.OK:
        raise NumericalDegeneracyError(
            "DPP conditional variance went non-positive beyond slack"
        )
    config = {
        "method": "dpp_greedy",
        "k": k,
        "similarity": spec.similarity,
        "kernel": format_kernel_spec(kern),
        "relevance_temp": float(spec.relevance_temp),
    }
    return _result("dpp_greedy", idx, gains, config, warnings_, t0)
