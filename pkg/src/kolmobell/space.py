"""The single classical probability space that holds every context.

Each atom records which channel opened on each side and the value seen
behind it. The mass of atom ``(i, eps, j, eps')`` is ``u_i * v_j *
p_ij(eps, eps')``: the chance the gates pick context ``(i, j)`` times the
outcome law of that context. Observables of closed channels read 0.

All queries enumerate the ``4 m n`` atoms directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import Callable, Iterable, Mapping, NamedTuple, Sequence

from .errors import (
    ConditionHasZeroProbability,
    DimensionMismatch,
    IndexOutOfRange,
    InvalidWeights,
    ValidationError,
)
from .tables import OUTCOMES, ContextFamily

WEIGHT_TOL = 1e-12
MASS_TOL = 1e-12


class Atom(NamedTuple):
    """Elementary outcome: A-channel ``i`` open showing ``eps``, B-channel ``j`` showing ``eps_prime``."""

    i: int
    eps: int
    j: int
    eps_prime: int


def to_slot_tuple(atom: Atom, m: int = 2, n: int = 2) -> tuple:
    """Zero-padded form: one slot per channel, 0 in the closed ones.

    For ``m = n = 2`` this gives 4-tuples like ``(eps1, 0, 0, eps2')``.
    """
    left = [0] * m
    right = [0] * n
    left[atom.i - 1] = atom.eps
    right[atom.j - 1] = atom.eps_prime
    return tuple(left + right)


def from_slot_tuple(coords: Sequence[int], m: int = 2, n: int = 2) -> Atom:
    if len(coords) != m + n:
        raise DimensionMismatch(f"expected {m + n} coordinates, got {len(coords)}")
    left, right = list(coords[:m]), list(coords[m:])
    open_a = [k for k, x in enumerate(left) if x != 0]
    open_b = [k for k, x in enumerate(right) if x != 0]
    if len(open_a) != 1 or len(open_b) != 1:
        raise ValidationError(f"{tuple(coords)} must have exactly one open channel per side")
    ka, kb = open_a[0], open_b[0]
    if left[ka] not in (1, -1) or right[kb] not in (1, -1):
        raise ValidationError(f"{tuple(coords)} has a value outside {{-1, 0, +1}}")
    return Atom(ka + 1, left[ka], kb + 1, right[kb])


@dataclass(frozen=True)
class ContextWeights:
    """Gate probabilities ``u`` (A side) and ``v`` (B side)."""

    u: tuple
    v: tuple

    def __post_init__(self):
        u = tuple(float(x) for x in self.u)
        v = tuple(float(x) for x in self.v)
        for name, w in (("u", u), ("v", v)):
            if not w:
                raise InvalidWeights(f"{name} is empty")
            if any(not math.isfinite(x) or x <= 0.0 for x in w):
                raise InvalidWeights(f"{name} entries must be finite and > 0, got {w}")
            total = math.fsum(w)
            if abs(total - 1.0) > WEIGHT_TOL:
                raise InvalidWeights(f"{name} sums to {total!r}, not 1")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    @classmethod
    def uniform(cls, m: int, n: int) -> "ContextWeights":
        return cls((1.0 / m,) * m, (1.0 / n,) * n)

    @property
    def shape(self):
        return (len(self.u), len(self.v))

    def joint(self, i: int, j: int) -> float:
        return self.u[i - 1] * self.v[j - 1]

    def is_uniform(self) -> bool:
        return self == ContextWeights.uniform(*self.shape)


class Event:
    """A subset of the sample space given by a predicate on atoms.

    Events combine with ``&``, ``|`` and ``~``.
    """

    def __init__(self, predicate: Callable[[Atom], bool], label: str = "event"):
        self._predicate = predicate
        self.label = label

    def __call__(self, atom: Atom) -> bool:
        return bool(self._predicate(atom))

    def __and__(self, other: "Event") -> "Event":
        return Event(lambda w: self(w) and other(w), f"({self.label} & {other.label})")

    def __or__(self, other: "Event") -> "Event":
        return Event(lambda w: self(w) or other(w), f"({self.label} | {other.label})")

    def __invert__(self) -> "Event":
        return Event(lambda w: not self(w), f"~{self.label}")

    def __repr__(self):
        return f"Event({self.label})"

    @classmethod
    def from_atoms(cls, atoms: Iterable[Atom], label: str = "atoms") -> "Event":
        members = frozenset(Atom(*a) for a in atoms)
        return cls(lambda w: w in members, label)


OMEGA = Event(lambda w: True, "Omega")
EMPTY = Event(lambda w: False, "empty")


class KolmogorovSpace:
    """Finite sample space with its measure over a context family.

    Use :func:`build_space`; :meth:`from_measure` exists so tests can inject
    an arbitrary (e.g. non-product) measure.
    """

    def __init__(self, family: ContextFamily, weights: ContextWeights | None,
                 measure: Mapping[Atom, float]):
        self.family = family
        self.weights = weights
        self.m, self.n = family.m, family.n
        self._atoms = tuple(sorted(measure))
        self.measure = MappingProxyType(dict(measure))

    @classmethod
    def from_measure(cls, family: ContextFamily, measure: Mapping) -> "KolmogorovSpace":
        measure = {Atom(*a): float(p) for a, p in measure.items()}
        expected = set(_enumerate_atoms(family.m, family.n))
        if set(measure) != expected:
            raise DimensionMismatch("measure must cover exactly the atoms of the family")
        return cls(family, None, measure)

    @property
    def atoms(self) -> tuple:
        """All atoms sorted by ``(i, eps, j, eps')`` with -1 before +1."""
        return self._atoms

    def mass(self, atom) -> float:
        return self.measure[Atom(*atom)]

    def total_mass(self) -> float:
        return math.fsum(self.measure.values())

    def context_weight(self, i: int, j: int) -> float:
        """``P(eta_a = i, eta_b = j)`` read off the measure."""
        return probability(self, gate_a(i) & gate_b(j))


def _enumerate_atoms(m: int, n: int):
    for i in range(1, m + 1):
        for eps in (-1, 1):
            for j in range(1, n + 1):
                for eps_prime in (-1, 1):
                    yield Atom(i, eps, j, eps_prime)


def build_space(family: ContextFamily, weights: ContextWeights | None = None) -> KolmogorovSpace:
    """Build the unified space; ``weights`` default to uniform gates."""
    if weights is None:
        weights = ContextWeights.uniform(family.m, family.n)
    if weights.shape != family.shape:
        raise DimensionMismatch(
            f"weights are {weights.shape[0]}x{weights.shape[1]}, family is {family.m}x{family.n}"
        )
    measure = {}
    for atom in _enumerate_atoms(family.m, family.n):
        p = family.tables[(atom.i, atom.j)][(atom.eps, atom.eps_prime)]
        measure[atom] = weights.joint(atom.i, atom.j) * p
    space = KolmogorovSpace(family, weights, measure)
    total = space.total_mass()
    if abs(total - 1.0) > MASS_TOL:
        raise ValidationError(f"measure has total mass {total!r}")
    return space


def _check_index(k: int, limit: int | None, side: str) -> None:
    if k < 1 or (limit is not None and k > limit):
        raise IndexOutOfRange(f"{side}-side index {k} outside 1..{limit}")


def eval_A(atom, i: int, m: int | None = None) -> int:
    """Value of ``A^(i)``: the outcome if channel ``i`` is open, else 0.

    Only the A-side coordinates of ``atom`` are read. Pass ``m`` to have
    ``i`` range-checked.
    """
    _check_index(i, m, "A")
    i_open, eps = atom[0], atom[1]
    return eps if i_open == i else 0


def eval_B(atom, j: int, n: int | None = None) -> int:
    _check_index(j, n, "B")
    j_open, eps_prime = atom[2], atom[3]
    return eps_prime if j_open == j else 0


def eval_eta_a(atom) -> int:
    return atom[0]


def eval_eta_b(atom) -> int:
    return atom[2]


# event constructors

def a_value(i: int, value: int) -> Event:
    _check_index(i, None, "A")
    return Event(lambda w: eval_A(w, i) == value, f"A{i}={value:+d}")


def b_value(j: int, value: int) -> Event:
    _check_index(j, None, "B")
    return Event(lambda w: eval_B(w, j) == value, f"B{j}={value:+d}")


def gate_a(i: int) -> Event:
    return Event(lambda w: eval_eta_a(w) == i, f"eta_a={i}")


def gate_b(j: int) -> Event:
    return Event(lambda w: eval_eta_b(w) == j, f"eta_b={j}")


def probability(space: KolmogorovSpace, event: Event) -> float:
    return math.fsum(p for atom, p in space.measure.items() if event(atom))


def conditional_probability(space: KolmogorovSpace, event: Event, given: Event) -> float:
    """Bayes ratio ``P(event & given) / P(given)``.

    Raises
    ------
    ConditionHasZeroProbability
        If ``P(given) == 0``.
    """
    denom = probability(space, given)
    if denom <= 0.0:
        raise ConditionHasZeroProbability(f"P({given.label}) = 0")
    return probability(space, event & given) / denom


def joint_distribution(space: KolmogorovSpace, i: int, j: int) -> dict:
    """Law of ``(A^(i), B^(j))`` on ``{-1, 0, 1}^2``, zero cells included."""
    _check_index(i, space.m, "A")
    _check_index(j, space.n, "B")
    cells = {(a, b): [] for a in (-1, 0, 1) for b in (-1, 0, 1)}
    for atom, p in space.measure.items():
        cells[(eval_A(atom, i), eval_B(atom, j))].append(p)
    return {k: math.fsum(v) for k, v in cells.items()}


@dataclass(frozen=True)
class IndependenceReport:
    independent: bool
    max_deviation: float
    threshold: float

    def to_dict(self) -> dict:
        return {
            "independent": self.independent,
            "max_deviation": self.max_deviation,
            "threshold": self.threshold,
        }


def independence_check_eta(space: KolmogorovSpace, threshold: float = 1e-12) -> IndependenceReport:
    """Compare ``P(eta_a=i, eta_b=j)`` with ``P(eta_a=i) P(eta_b=j)`` for all cells."""
    pa = [probability(space, gate_a(i)) for i in range(1, space.m + 1)]
    pb = [probability(space, gate_b(j)) for j in range(1, space.n + 1)]
    worst = 0.0
    for i in range(1, space.m + 1):
        for j in range(1, space.n + 1):
            joint = probability(space, gate_a(i) & gate_b(j))
            worst = max(worst, abs(joint - pa[i - 1] * pb[j - 1]))
    return IndependenceReport(worst < threshold, worst, threshold)


def dump_space(space: KolmogorovSpace) -> list:
    """Canonical atom list for serialization."""
    return [
        {"i": a.i, "eps": a.eps, "j": a.j, "eps_prime": a.eps_prime, "p": space.measure[a]}
        for a in space.atoms
    ]


__all__ = [
    "Atom", "ContextWeights", "Event", "KolmogorovSpace", "OMEGA", "EMPTY",
    "build_space", "eval_A", "eval_B", "eval_eta_a", "eval_eta_b",
    "a_value", "b_value", "gate_a", "gate_b", "probability",
    "conditional_probability", "joint_distribution", "independence_check_eta",
    "IndependenceReport", "dump_space", "to_slot_tuple", "from_slot_tuple",
    "OUTCOMES",
]
