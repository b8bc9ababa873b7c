"""Absolute and conditional correlations, CHSH statistics and their bounds.

The *conditional* correlation of context ``(i, j)`` is the mean of
``A^(i) B^(j)`` given that gates ``i`` and ``j`` opened; it equals the
correlation of the context's own table. The *absolute* correlation is the
plain expectation over the whole space and is smaller by the factor
``P(eta_a=i, eta_b=j)``.

Every correlation is computed twice (from the table and from the measure)
and the two results must agree to 1e-12, otherwise
:class:`~kolmobell.errors.InvariantViolation` is raised.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import BadSignPattern, InvariantViolation, NotTwoByTwo
from .space import (
    KolmogorovSpace,
    a_value,
    b_value,
    conditional_probability,
    eval_A,
    eval_B,
    gate_a,
    gate_b,
    _check_index,
)

CROSS_CHECK_TOL = 1e-12
BOUND_SLACK = 1e-9

#: Context order of every sign pattern.
CHSH_CONTEXTS = ((1, 1), (1, 2), (2, 1), (2, 2))

#: One-minus patterns; the three-minus ones are their negations.
CANONICAL_PATTERNS = (
    (1, 1, 1, -1),
    (1, 1, -1, 1),
    (1, -1, 1, 1),
    (-1, 1, 1, 1),
)


def _cross_check(name, a, b):
    if abs(a - b) > CROSS_CHECK_TOL:
        raise InvariantViolation(f"{name}: {a!r} (table) vs {b!r} (measure)")


def conditional_correlation(space: KolmogorovSpace, i: int, j: int) -> float:
    """``E(A^(i) B^(j) | eta_a=i, eta_b=j)``."""
    _check_index(i, space.m, "A")
    _check_index(j, space.n, "B")
    direct = space.family.tables[(i, j)].correlation()
    given = gate_a(i) & gate_b(j)
    via_measure = math.fsum(
        e * f * conditional_probability(space, a_value(i, e) & b_value(j, f), given)
        for e in (1, -1)
        for f in (1, -1)
    )
    _cross_check(f"conditional correlation ({i},{j})", direct, via_measure)
    return direct


def absolute_correlation(space: KolmogorovSpace, i: int, j: int) -> float:
    """``E(A^(i) B^(j))`` over the whole space."""
    _check_index(i, space.m, "A")
    _check_index(j, space.n, "B")
    enumerated = math.fsum(
        eval_A(w, i) * eval_B(w, j) * p for w, p in space.measure.items()
    )
    # nonzero products only occur on context (i, j) atoms
    scaled = space.context_weight(i, j) * space.family.tables[(i, j)].correlation()
    _cross_check(f"absolute correlation ({i},{j})", scaled, enumerated)
    return enumerated


@dataclass(frozen=True)
class CorrelationPair:
    i: int
    j: int
    absolute: float
    conditional: float

    def to_dict(self) -> dict:
        return {"i": self.i, "j": self.j, "conditional": self.conditional,
                "absolute": self.absolute}


def correlation_pairs(space: KolmogorovSpace) -> list:
    return [
        CorrelationPair(i, j, absolute_correlation(space, i, j), conditional_correlation(space, i, j))
        for (i, j) in space.family.contexts()
    ]


@dataclass(frozen=True)
class ChshStatistic:
    sign_pattern: tuple
    value_conditional: float
    value_absolute: float

    def to_dict(self) -> dict:
        return {"pattern": list(self.sign_pattern), "conditional": self.value_conditional,
                "absolute": self.value_absolute}


def check_pattern(pattern: Sequence[int]) -> tuple:
    pattern = tuple(int(s) for s in pattern)
    if len(pattern) != 4 or any(s not in (1, -1) for s in pattern):
        raise BadSignPattern(f"pattern must be four signs +-1, got {pattern}")
    if pattern.count(-1) % 2 != 1:
        raise BadSignPattern(f"pattern needs an odd number of minus signs, got {pattern}")
    return pattern


def signed_sum(pattern: Sequence[int], values: Sequence[float]) -> float:
    """``sum(s * x)`` over the four CHSH contexts in canonical order."""
    return math.fsum(s * x for s, x in zip(pattern, values))


def _require_2x2(space):
    if (space.m, space.n) != (2, 2):
        raise NotTwoByTwo(space.m, space.n)


def chsh(space: KolmogorovSpace, sign_pattern: Sequence[int] = (1, 1, 1, -1)) -> ChshStatistic:
    """Signed sums of the four conditional and four absolute correlations."""
    _require_2x2(space)
    pattern = check_pattern(sign_pattern)
    cond = [conditional_correlation(space, i, j) for i, j in CHSH_CONTEXTS]
    absl = [absolute_correlation(space, i, j) for i, j in CHSH_CONTEXTS]
    return ChshStatistic(pattern, signed_sum(pattern, cond), signed_sum(pattern, absl))


def max_chsh(space: KolmogorovSpace) -> ChshStatistic:
    """Statistic with the largest ``|value_conditional|`` over the canonical patterns."""
    _require_2x2(space)
    stats = [chsh(space, p) for p in CANONICAL_PATTERNS]
    return max(stats, key=lambda s: abs(s.value_conditional))


def max_abs_over_patterns(values: Sequence[float]) -> float:
    return max(abs(signed_sum(p, values)) for p in CANONICAL_PATTERNS)


@dataclass(frozen=True)
class Bound:
    value: float
    limit: float
    applicable: bool = True

    @property
    def passed(self) -> bool:
        return self.value <= self.limit + BOUND_SLACK

    def to_dict(self) -> dict:
        return {"value": self.value, "limit": self.limit, "pass": self.passed,
                "applicable": self.applicable}


@dataclass(frozen=True)
class BoundReport:
    """Bound verdicts on the worst-case (over sign patterns) statistics.

    ``b2`` and ``b1`` concern absolute correlations, ``b4`` and ``b8``
    conditional ones. ``b1`` is only claimed at uniform gate weights; it is
    still evaluated otherwise but marked not applicable.
    """

    b2: Bound
    b1: Bound
    b4: Bound
    b8: Bound

    @property
    def all_passed(self) -> bool:
        return all(b.passed for b in (self.b2, self.b1, self.b4, self.b8) if b.applicable)

    def to_dict(self) -> dict:
        return {"b2": self.b2.to_dict(), "b1": self.b1.to_dict(),
                "b4": self.b4.to_dict(), "b8": self.b8.to_dict()}


def bounds_from_values(conditional: Sequence[float], absolute: Sequence[float],
                       uniform: bool) -> BoundReport:
    cond = max_abs_over_patterns(conditional)
    absl = max_abs_over_patterns(absolute)
    return BoundReport(
        b2=Bound(absl, 2.0),
        b1=Bound(absl, 1.0, applicable=uniform),
        b4=Bound(cond, 4.0),
        b8=Bound(cond, 8.0),
    )


def bound_report(space: KolmogorovSpace) -> BoundReport:
    _require_2x2(space)
    cond = [conditional_correlation(space, i, j) for i, j in CHSH_CONTEXTS]
    absl = [absolute_correlation(space, i, j) for i, j in CHSH_CONTEXTS]
    uniform = space.weights is not None and space.weights.is_uniform()
    return bounds_from_values(cond, absl, uniform)


@dataclass(frozen=True)
class CorrelationReport:
    """Everything :func:`analyze` computes; ``chsh`` and ``bounds`` are
    ``None`` unless the family is 2x2."""

    pairs: list
    chsh: ChshStatistic | None
    bounds: BoundReport | None

    def to_dict(self) -> dict:
        return {
            "pairs": [p.to_dict() for p in self.pairs],
            "chsh": None if self.chsh is None else self.chsh.to_dict(),
            "bounds": None if self.bounds is None else self.bounds.to_dict(),
        }


def analyze(space: KolmogorovSpace) -> CorrelationReport:
    pairs = correlation_pairs(space)
    if (space.m, space.n) != (2, 2):
        return CorrelationReport(pairs, None, None)
    return CorrelationReport(pairs, max_chsh(space), bound_report(space))
