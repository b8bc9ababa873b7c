"""Trial-by-trial simulation of the randomly gated two-lab experiment.

Random stream
-------------
A run uses one ``numpy.random.Generator(PCG64(seed))`` with a 64-bit seed
and consumes exactly three ``Generator.random()`` doubles per trial, in this
order: A-side gate, B-side gate, outcome. Each double is mapped by inverse
CDF: gates over the weights ``u`` / ``v`` in index order, outcomes over the
context table in the order ``(+,+), (+,-), (-,+), (-,-)``. A draw ``x``
selects the first index whose cumulative probability exceeds ``x``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

import numpy as np

from .correlations import (
    ChshStatistic,
    CANONICAL_PATTERNS,
    CHSH_CONTEXTS,
    absolute_correlation,
    bounds_from_values,
    check_pattern,
    conditional_correlation,
    signed_sum,
)
from .errors import DimensionMismatch, EmptyContext, NotTwoByTwo, RecordError, ValidationError
from .space import ContextWeights, KolmogorovSpace
from .tables import OUTCOMES, ContextFamily

SEED_MAX = 2**64 - 1

# product eps * eps' in canonical outcome order
_PRODUCT_SIGN = np.array([e * f for e, f in OUTCOMES], dtype=float)
_OUTCOME_A = np.array([e for e, _ in OUTCOMES])
_OUTCOME_B = np.array([f for _, f in OUTCOMES])


class TrialRecord(NamedTuple):
    trial_id: int
    eta_a: int
    eta_b: int
    a: int
    b: int

    def A(self, i: int) -> int:
        """Reading of Alice's ``i``-th observable (0 if that channel was blocked)."""
        return self.a if i == self.eta_a else 0

    def B(self, j: int) -> int:
        return self.b if j == self.eta_b else 0


@dataclass(frozen=True)
class SimulationConfig:
    family: ContextFamily
    trials: int
    seed: int
    weights: ContextWeights | None = None

    def __post_init__(self):
        if self.weights is None:
            object.__setattr__(self, "weights", ContextWeights.uniform(self.family.m, self.family.n))
        if self.weights.shape != self.family.shape:
            raise DimensionMismatch(
                f"weights are {self.weights.shape}, family is {self.family.shape}"
            )
        if int(self.trials) != self.trials or self.trials < 1:
            raise ValidationError(f"trials must be a positive integer, got {self.trials!r}")
        if int(self.seed) != self.seed or not 0 <= self.seed <= SEED_MAX:
            raise ValidationError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")


@dataclass(frozen=True, eq=False)
class TrialBatch:
    """Column-wise storage for a stream of :class:`TrialRecord`."""

    trial_id: np.ndarray
    eta_a: np.ndarray
    eta_b: np.ndarray
    a: np.ndarray
    b: np.ndarray

    def __len__(self):
        return len(self.trial_id)

    def __iter__(self):
        cols = (self.trial_id, self.eta_a, self.eta_b, self.a, self.b)
        for row in zip(*(c.tolist() for c in cols)):
            yield TrialRecord(*row)

    def __getitem__(self, k) -> TrialRecord:
        return TrialRecord(int(self.trial_id[k]), int(self.eta_a[k]), int(self.eta_b[k]),
                           int(self.a[k]), int(self.b[k]))

    def __eq__(self, other):
        if not isinstance(other, TrialBatch):
            return NotImplemented
        return all(
            np.array_equal(x, y)
            for x, y in zip(
                (self.trial_id, self.eta_a, self.eta_b, self.a, self.b),
                (other.trial_id, other.eta_a, other.eta_b, other.a, other.b),
            )
        )

    @classmethod
    def from_records(cls, records: Iterable) -> "TrialBatch":
        rows = [tuple(r) for r in records]
        if not rows:
            cols = [np.zeros(0, dtype=np.int64)] * 5
        else:
            arr = np.asarray(rows, dtype=np.int64)
            if arr.ndim != 2 or arr.shape[1] != 5:
                raise RecordError("records must have 5 fields")
            cols = [arr[:, k].copy() for k in range(5)]
        return cls(*cols)


def _inverse_cdf(probs: np.ndarray) -> np.ndarray:
    """Cumulative sums along the last axis, pinned to 1 from the last nonzero entry on."""
    cdf = np.cumsum(probs, axis=-1)
    positive = probs > 0
    last = probs.shape[-1] - 1 - np.argmax(positive[..., ::-1], axis=-1)
    idx = np.arange(probs.shape[-1])
    cdf = np.where(idx >= last[..., None], 1.0, cdf)
    return cdf


def _pick(cdf: np.ndarray, x: np.ndarray) -> np.ndarray:
    # first index with cdf > x
    return np.minimum((x[:, None] >= cdf).sum(axis=1), cdf.shape[-1] - 1)


def simulate(config: SimulationConfig) -> TrialBatch:
    """Run ``config.trials`` trials; identical configs give identical batches."""
    fam = config.family
    rng = np.random.Generator(np.random.PCG64(config.seed))
    draws = rng.random(3 * config.trials).reshape(config.trials, 3)

    cdf_a = _inverse_cdf(np.array(config.weights.u))
    cdf_b = _inverse_cdf(np.array(config.weights.v))
    ia = _pick(np.broadcast_to(cdf_a, (config.trials, fam.m)), draws[:, 0])
    jb = _pick(np.broadcast_to(cdf_b, (config.trials, fam.n)), draws[:, 1])

    table_cdf = _inverse_cdf(fam.as_array())  # (m, n, 4)
    k = _pick(table_cdf[ia, jb], draws[:, 2])

    return TrialBatch(
        trial_id=np.arange(config.trials, dtype=np.int64),
        eta_a=(ia + 1).astype(np.int64),
        eta_b=(jb + 1).astype(np.int64),
        a=_OUTCOME_A[k].astype(np.int64),
        b=_OUTCOME_B[k].astype(np.int64),
    )


def _as_batch(records) -> TrialBatch:
    return records if isinstance(records, TrialBatch) else TrialBatch.from_records(records)


def validate_records(batch: TrialBatch, m: int, n: int) -> None:
    """Raise :class:`RecordError` naming the first bad row (1-based)."""
    checks = (
        (batch.eta_a, (batch.eta_a < 1) | (batch.eta_a > m), f"eta_a outside 1..{m}"),
        (batch.eta_b, (batch.eta_b < 1) | (batch.eta_b > n), f"eta_b outside 1..{n}"),
        (batch.a, (batch.a != 1) & (batch.a != -1), "a must be -1 or +1"),
        (batch.b, (batch.b != 1) & (batch.b != -1), "b must be -1 or +1"),
    )
    first = None
    for col, bad, msg in checks:
        hits = np.flatnonzero(bad)
        if hits.size and (first is None or hits[0] < first[0]):
            first = (hits[0], f"{msg} (got {col[hits[0]]})")
    if first is not None:
        raise RecordError(first[1], row=int(first[0]) + 1)


@dataclass(frozen=True, eq=False)
class EmpiricalEstimate:
    """Frequency estimates from a record set.

    Arrays are indexed ``[i-1, j-1]`` (and ``[..., k]`` over the canonical
    outcomes). Contexts without trials hold NaN and are listed in
    ``empty_contexts``.
    """

    m: int
    n: int
    trials: int
    counts: np.ndarray
    p_hat: np.ndarray
    p_stderr: np.ndarray
    conditional: np.ndarray
    conditional_stderr: np.ndarray
    absolute: np.ndarray
    absolute_stderr: np.ndarray
    empty_contexts: tuple = field(default=())

    def context_counts(self) -> np.ndarray:
        return self.counts.sum(axis=-1)

    def chsh(self, sign_pattern=(1, 1, 1, -1)) -> ChshStatistic:
        if (self.m, self.n) != (2, 2):
            raise NotTwoByTwo(self.m, self.n)
        pattern = check_pattern(sign_pattern)
        cond = [self.conditional[i - 1, j - 1] for i, j in CHSH_CONTEXTS]
        absl = [self.absolute[i - 1, j - 1] for i, j in CHSH_CONTEXTS]
        return ChshStatistic(pattern, signed_sum(pattern, cond), signed_sum(pattern, absl))

    def max_chsh(self) -> ChshStatistic:
        stats = [self.chsh(p) for p in CANONICAL_PATTERNS]
        return max(stats, key=lambda s: abs(s.value_conditional))

    def chsh_stderr(self) -> tuple:
        """Standard errors of the conditional and absolute CHSH sums.

        Context estimates are treated as independent.
        """
        cs = math.sqrt(float(np.sum(self.conditional_stderr ** 2)))
        as_ = math.sqrt(float(np.sum(self.absolute_stderr ** 2)))
        return cs, as_

    def bounds(self):
        if (self.m, self.n) != (2, 2):
            raise NotTwoByTwo(self.m, self.n)
        cond = [self.conditional[i - 1, j - 1] for i, j in CHSH_CONTEXTS]
        absl = [self.absolute[i - 1, j - 1] for i, j in CHSH_CONTEXTS]
        # |sum +-E_hat| <= sum of context frequencies = 1 for any record set
        return bounds_from_values(cond, absl, uniform=True)

    def to_dict(self) -> dict:
        out = {"m": self.m, "n": self.n, "trials": self.trials, "contexts": []}
        for i in range(1, self.m + 1):
            for j in range(1, self.n + 1):
                c = (i - 1, j - 1)
                out["contexts"].append({
                    "i": i, "j": j,
                    "count": int(self.counts[c].sum()),
                    "counts": [int(x) for x in self.counts[c]],
                    "p_hat": _floats(self.p_hat[c]),
                    "conditional": _float(self.conditional[c]),
                    "conditional_stderr": _float(self.conditional_stderr[c]),
                    "absolute": _float(self.absolute[c]),
                    "absolute_stderr": _float(self.absolute_stderr[c]),
                    "empty": (i, j) in self.empty_contexts,
                })
        return out


def _float(x):
    x = float(x)
    return None if math.isnan(x) else x


def _floats(xs):
    return [_float(x) for x in xs]


def _from_counts(counts: np.ndarray, trials: int) -> EmpiricalEstimate:
    m, n, _ = counts.shape
    ctx = counts.sum(axis=-1).astype(float)
    with np.errstate(invalid="ignore", divide="ignore"):
        p_hat = counts / ctx[..., None]
        p_se = np.sqrt(p_hat * (1.0 - p_hat) / ctx[..., None])
        cond = (p_hat * _PRODUCT_SIGN).sum(axis=-1)
        cond_se = np.sqrt(np.maximum(0.0, 1.0 - cond ** 2) / ctx)
    absl = (counts * _PRODUCT_SIGN).sum(axis=-1) / trials
    freq = ctx / trials
    abs_se = np.sqrt(np.maximum(0.0, freq - absl ** 2) / trials)
    empty = tuple((i + 1, j + 1) for i in range(m) for j in range(n) if ctx[i, j] == 0)
    return EmpiricalEstimate(m, n, trials, counts, p_hat, p_se, cond, cond_se,
                             absl, abs_se, empty)


def count_records(records, m: int, n: int) -> np.ndarray:
    """Outcome counts with shape ``(m, n, 4)``."""
    batch = _as_batch(records)
    validate_records(batch, m, n)
    k = 2 * (batch.a == -1) + (batch.b == -1)
    flat = ((batch.eta_a - 1) * n + (batch.eta_b - 1)) * 4 + k
    return np.bincount(flat, minlength=m * n * 4).reshape(m, n, 4)


def estimate(records, m: int, n: int, allow_empty: bool = False) -> EmpiricalEstimate:
    """Empirical tables and correlations for an ``m x n`` record set.

    Raises
    ------
    RecordError
        A record has an index or value out of range.
    EmptyContext
        Some context has no trials and ``allow_empty`` is false.
    """
    counts = count_records(records, m, n)
    total = int(counts.sum())
    if total == 0:
        raise RecordError("no records")
    est = _from_counts(counts, total)
    if est.empty_contexts and not allow_empty:
        raise EmptyContext(*est.empty_contexts[0])
    return est


def merge_counts(*count_arrays: np.ndarray) -> EmpiricalEstimate:
    """Estimate from several partial count arrays (partition-and-merge)."""
    counts = np.sum(count_arrays, axis=0)
    return _from_counts(counts, int(counts.sum()))


def expected_estimate(space: KolmogorovSpace, trials: int = 1) -> EmpiricalEstimate:
    """Estimate carrying the exact values of ``space`` and zero standard errors."""
    m, n = space.m, space.n
    p = space.family.as_array()
    w = np.array([[space.context_weight(i, j) for j in range(1, n + 1)] for i in range(1, m + 1)])
    cond = np.array([[conditional_correlation(space, i, j) for j in range(1, n + 1)]
                     for i in range(1, m + 1)])
    absl = np.array([[absolute_correlation(space, i, j) for j in range(1, n + 1)]
                     for i in range(1, m + 1)])
    zeros = np.zeros((m, n))
    return EmpiricalEstimate(m, n, trials, p * w[..., None] * trials, p, np.zeros_like(p),
                             cond, zeros, absl, zeros.copy(), ())


@dataclass(frozen=True)
class ConvergenceItem:
    quantity: str  # "p", "conditional" or "absolute"
    i: int
    j: int
    outcome: tuple | None
    estimate: float
    exact: float
    stderr: float
    threshold: float

    @property
    def deviation(self) -> float:
        return abs(self.estimate - self.exact)

    @property
    def passed(self) -> bool:
        # NaN (empty context) never passes
        return bool(self.deviation <= self.threshold)

    def to_dict(self) -> dict:
        return {
            "quantity": self.quantity, "i": self.i, "j": self.j,
            "outcome": None if self.outcome is None else list(self.outcome),
            "estimate": _float(self.estimate), "exact": self.exact,
            "stderr": _float(self.stderr), "threshold": _float(self.threshold),
            "pass": self.passed,
        }


@dataclass(frozen=True)
class ConvergenceReport:
    items: list
    tolerance: float

    @property
    def passed(self) -> bool:
        return all(it.passed for it in self.items)

    @property
    def failures(self) -> list:
        return [it for it in self.items if not it.passed]

    def to_dict(self) -> dict:
        return {"tolerance": self.tolerance, "pass": self.passed,
                "items": [it.to_dict() for it in self.items]}


def convergence_check(est: EmpiricalEstimate, space: KolmogorovSpace,
                      tolerance: float = 0.01) -> ConvergenceReport:
    """Compare every estimate with its exact value.

    An item fails when it deviates by more than
    ``max(tolerance, 5 * stderr)``, with the stderr taken from the estimate.
    """
    if (est.m, est.n) != (space.m, space.n):
        raise DimensionMismatch(f"estimate is {est.m}x{est.n}, space is {space.m}x{space.n}")
    items = []
    for i in range(1, space.m + 1):
        for j in range(1, space.n + 1):
            c = (i - 1, j - 1)
            table = space.family.tables[(i, j)]
            for k, outcome in enumerate(OUTCOMES):
                se = float(est.p_stderr[c + (k,)])
                items.append(ConvergenceItem("p", i, j, outcome, float(est.p_hat[c + (k,)]),
                                             table[outcome], se, max(tolerance, 5 * se)))
            se = float(est.conditional_stderr[c])
            items.append(ConvergenceItem("conditional", i, j, None, float(est.conditional[c]),
                                         conditional_correlation(space, i, j), se,
                                         max(tolerance, 5 * se)))
            se = float(est.absolute_stderr[c])
            items.append(ConvergenceItem("absolute", i, j, None, float(est.absolute[c]),
                                         absolute_correlation(space, i, j), se,
                                         max(tolerance, 5 * se)))
    return ConvergenceReport(items, tolerance)
