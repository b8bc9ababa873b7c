"""Per-context outcome tables and context families.

A context ``(i, j)`` is one choice of setting on each side. For every
context the family holds an :class:`OutcomeTable`: the joint law of the two
dichotomic outcomes. Entries are always ordered ``(+,+), (+,-), (-,+), (-,-)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, NamedTuple, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    EntryAboveOne,
    IndexOutOfRange,
    MissingContext,
    NegativeEntry,
    NonFiniteEntry,
    SumNotOne,
    TableError,
    ValidationError,
)

#: Canonical outcome order used by every table, file and sampler.
OUTCOMES = ((1, 1), (1, -1), (-1, 1), (-1, -1))

#: Slack allowed on the sum of a table.
SUM_TOL = 1e-12

_OUTCOME_INDEX = {o: k for k, o in enumerate(OUTCOMES)}


class SettingId(NamedTuple):
    """Setting ``index`` (1-based) on ``side`` ``"A"`` or ``"B"``."""

    side: str
    index: int

    def check(self, m: int, n: int) -> None:
        if self.side not in ("A", "B"):
            raise ValidationError(f"side must be 'A' or 'B', got {self.side!r}")
        limit = m if self.side == "A" else n
        if not 1 <= self.index <= limit:
            raise IndexOutOfRange(
                f"setting {self.side}{self.index} outside 1..{limit}"
            )


@dataclass(frozen=True)
class OutcomeTable:
    """Joint probabilities ``p(eps, eps')`` for one context.

    Build instances with :func:`validate_table` or :func:`singlet_table`; the
    constructor itself does not check anything.
    """

    values: tuple

    def __getitem__(self, outcome):
        return self.values[_OUTCOME_INDEX[outcome]]

    def __iter__(self):
        return iter(self.values)

    def as_array(self) -> np.ndarray:
        return np.array(self.values, dtype=float)

    def items(self):
        return zip(OUTCOMES, self.values)

    def correlation(self) -> float:
        """Sum of ``eps * eps' * p(eps, eps')``."""
        return math.fsum(e * f * p for (e, f), p in self.items())

    def marginal_a(self, eps: int) -> float:
        return self[(eps, 1)] + self[(eps, -1)]

    def marginal_b(self, eps: int) -> float:
        return self[(1, eps)] + self[(-1, eps)]


def validate_table(raw: Sequence[float]) -> OutcomeTable:
    """Check four numbers form a distribution and wrap them.

    Raises
    ------
    NonFiniteEntry, NegativeEntry, EntryAboveOne, SumNotOne
    """
    values = tuple(float(x) for x in raw)
    if len(values) != 4:
        raise TableError(f"expected 4 entries, got {len(values)}")
    for outcome, p in zip(OUTCOMES, values):
        if not math.isfinite(p):
            raise NonFiniteEntry(outcome, p)
        if p < 0.0:
            raise NegativeEntry(outcome, p)
        if p > 1.0:
            raise EntryAboveOne(outcome, p)
    total = math.fsum(values)
    if abs(total - 1.0) > SUM_TOL:
        raise SumNotOne(total)
    return OutcomeTable(values)


def _check_angle(theta: float) -> float:
    theta = float(theta)
    if not math.isfinite(theta):
        raise ValidationError(f"angle must be finite, got {theta!r}")
    return theta


def singlet_table(theta: float, theta_prime: float) -> OutcomeTable:
    """Singlet polarization statistics for PBS angles ``theta``, ``theta_prime``.

    Equal outcomes get ``cos^2(d/2)/2`` and opposite outcomes
    ``sin^2(d/2)/2`` with ``d = theta - theta_prime`` in radians.
    """
    d = _check_angle(theta) - _check_angle(theta_prime)
    same = 0.5 * math.cos(d / 2) ** 2
    diff = 0.5 * math.sin(d / 2) ** 2
    return validate_table((same, diff, diff, same))


@dataclass(frozen=True)
class ContextFamily:
    """An ``m x n`` grid of contexts with one outcome table each."""

    m: int
    n: int
    tables: Mapping
    model: str = "explicit"
    angles_a: tuple | None = None
    angles_b: tuple | None = None

    def table(self, i: int, j: int) -> OutcomeTable:
        if not (1 <= i <= self.m and 1 <= j <= self.n):
            raise IndexOutOfRange(f"context ({i},{j}) outside {self.m}x{self.n}")
        return self.tables[(i, j)]

    @property
    def shape(self):
        return (self.m, self.n)

    def contexts(self):
        return [(i, j) for i in range(1, self.m + 1) for j in range(1, self.n + 1)]

    def as_array(self) -> np.ndarray:
        """Tables stacked into shape ``(m, n, 4)``."""
        return np.array(
            [[self.tables[(i, j)].values for j in range(1, self.n + 1)]
             for i in range(1, self.m + 1)]
        )


def build_family(
    tables: Mapping | None = None,
    *,
    m: int | None = None,
    n: int | None = None,
    angles_a: Sequence[float] | None = None,
    angles_b: Sequence[float] | None = None,
    model: str | None = None,
) -> ContextFamily:
    """Assemble a complete, validated :class:`ContextFamily`.

    Either pass ``tables`` (a mapping ``(i, j) -> 4 probabilities`` or
    :class:`OutcomeTable`) together with ``m`` and ``n``, or pass per-side
    angle lists with ``model="singlet"``.
    """
    if model is None:
        model = "explicit" if tables is not None else "singlet"

    if model == "singlet":
        if tables is not None:
            raise ValidationError("singlet model takes angles, not tables")
        if angles_a is None or angles_b is None:
            raise ValidationError("singlet model needs angles_a and angles_b")
        a = tuple(_check_angle(t) for t in angles_a)
        b = tuple(_check_angle(t) for t in angles_b)
        if m is not None and m != len(a):
            raise DimensionMismatch(f"m={m} but {len(a)} A-side angles")
        if n is not None and n != len(b):
            raise DimensionMismatch(f"n={n} but {len(b)} B-side angles")
        m, n = len(a), len(b)
        if m < 1 or n < 1:
            raise DimensionMismatch("need at least one setting per side")
        grid = {
            (i, j): singlet_table(a[i - 1], b[j - 1])
            for i in range(1, m + 1)
            for j in range(1, n + 1)
        }
        return ContextFamily(m, n, grid, "singlet", a, b)

    if model != "explicit":
        raise ValidationError(f"unknown model {model!r}")
    if tables is None:
        raise ValidationError("explicit model needs tables")
    if angles_a is not None or angles_b is not None:
        raise ValidationError("explicit model takes tables, not angles")
    keys = list(tables)
    if m is None:
        m = max((k[0] for k in keys), default=0)
    if n is None:
        n = max((k[1] for k in keys), default=0)
    if m < 1 or n < 1:
        raise DimensionMismatch(f"need m, n >= 1, got {m}x{n}")
    for (i, j) in keys:
        if not (1 <= i <= m and 1 <= j <= n):
            raise IndexOutOfRange(f"table for ({i},{j}) outside {m}x{n}")
    grid = {}
    for i in range(1, m + 1):
        for j in range(1, n + 1):
            if (i, j) not in tables:
                raise MissingContext(i, j)
            raw = tables[(i, j)]
            try:
                grid[(i, j)] = validate_table(raw.values if isinstance(raw, OutcomeTable) else raw)
            except TableError as exc:
                exc.context = (i, j)
                raise
    return ContextFamily(m, n, grid, "explicit")


@dataclass(frozen=True)
class SignalingReport:
    """Marginal-consistency verdict for one family.

    ``deviation_a[i-1]`` is the largest change of Alice's marginal at setting
    ``i`` when Bob's setting varies; ``deviation_b`` is the mirror image.
    """

    deviation_a: tuple
    deviation_b: tuple
    threshold: float = 1e-9
    signaling: bool = field(init=False)

    def __post_init__(self):
        worst = max(self.deviation_a + self.deviation_b, default=0.0)
        object.__setattr__(self, "signaling", worst > self.threshold)

    @property
    def max_deviation(self) -> float:
        return max(self.deviation_a + self.deviation_b, default=0.0)

    def to_dict(self) -> dict:
        return {
            "signaling": self.signaling,
            "max_deviation": self.max_deviation,
            "deviation_a": list(self.deviation_a),
            "deviation_b": list(self.deviation_b),
            "threshold": self.threshold,
        }


def no_signaling_report(family: ContextFamily, threshold: float = 1e-9) -> SignalingReport:
    """Check whether each side's marginals ignore the other side's setting."""
    dev_a = []
    for i in range(1, family.m + 1):
        worst = 0.0
        for eps in (1, -1):
            marg = [family.tables[(i, j)].marginal_a(eps) for j in range(1, family.n + 1)]
            worst = max(worst, max(marg) - min(marg))
        dev_a.append(worst)
    dev_b = []
    for j in range(1, family.n + 1):
        worst = 0.0
        for eps in (1, -1):
            marg = [family.tables[(i, j)].marginal_b(eps) for i in range(1, family.m + 1)]
            worst = max(worst, max(marg) - min(marg))
        dev_b.append(worst)
    return SignalingReport(tuple(dev_a), tuple(dev_b), threshold)
