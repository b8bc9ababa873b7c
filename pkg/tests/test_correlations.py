import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kolmobell import (
    BadSignPattern,
    ContextWeights,
    KolmogorovSpace,
    NotTwoByTwo,
    absolute_correlation,
    analyze,
    bound_report,
    build_family,
    build_space,
    chsh,
    conditional_correlation,
    max_chsh,
)
from kolmobell.correlations import CANONICAL_PATTERNS, Bound
from kolmobell.errors import IndexOutOfRange, InvariantViolation

from conftest import random_grid

UNIFORM = [0.25] * 4
DIAGONAL = [0.5, 0.0, 0.0, 0.5]
ANTI = [0.0, 0.5, 0.5, 0.0]
# 40-digit mpmath values
TWO_SQRT2 = 2.8284271247461900976
HALF_SQRT2 = 0.7071067811865475244


def grid_space(tables, weights=None):
    grid = dict(zip([(1, 1), (1, 2), (2, 1), (2, 2)], tables))
    return build_space(build_family(grid, m=2, n=2), weights)


@pytest.mark.parametrize("delta, expected", [(0.0, 1.0), (math.pi / 3, 0.5)])
def test_conditional_singlet(delta, expected):
    space = build_space(build_family(angles_a=[delta], angles_b=[0.0], model="singlet"))
    assert conditional_correlation(space, 1, 1) == pytest.approx(expected, abs=1e-12)


def test_conditional_uniform():
    assert conditional_correlation(grid_space([UNIFORM] * 4), 2, 1) == 0.0


def test_absolute_examples():
    space = build_space(build_family(angles_a=[0.0, 1.0], angles_b=[0.0, 2.0], model="singlet"))
    assert absolute_correlation(space, 1, 1) == pytest.approx(0.25, abs=1e-15)
    one = build_space(build_family({(1, 1): [0.6, 0.1, 0.2, 0.1]}, m=1, n=1))
    assert absolute_correlation(one, 1, 1) == pytest.approx(conditional_correlation(one, 1, 1),
                                                            abs=1e-15)
    assert absolute_correlation(grid_space([UNIFORM] * 4), 1, 2) == 0.0


def test_index_checks(optimal_space):
    with pytest.raises(IndexOutOfRange):
        conditional_correlation(optimal_space, 3, 1)
    with pytest.raises(IndexOutOfRange):
        absolute_correlation(optimal_space, 1, 0)


@given(st.lists(st.floats(-10, 10), min_size=2, max_size=2),
       st.lists(st.floats(-10, 10), min_size=2, max_size=2))
def test_conditional_is_cosine(a, b):
    space = build_space(build_family(angles_a=a, angles_b=b, model="singlet"))
    for i in (1, 2):
        for j in (1, 2):
            assert abs(conditional_correlation(space, i, j) - math.cos(a[i - 1] - b[j - 1])) <= 1e-12


def test_chsh_optimal(optimal_space):
    s = chsh(optimal_space, (1, 1, 1, -1))
    assert s.value_conditional == pytest.approx(TWO_SQRT2, abs=1e-12)
    assert s.value_absolute == pytest.approx(HALF_SQRT2, abs=1e-12)
    best = max_chsh(optimal_space)
    assert abs(best.value_conditional) == pytest.approx(TWO_SQRT2, abs=1e-12)


def test_chsh_uniform():
    s = chsh(grid_space([UNIFORM] * 4))
    assert s.value_conditional == 0.0 and s.value_absolute == 0.0
    assert max_chsh(grid_space([UNIFORM] * 4)).value_conditional == 0.0


def test_chsh_deterministic_grid():
    space = grid_space([DIAGONAL] * 4)
    assert chsh(space).value_conditional == 2.0
    assert max_chsh(space).value_conditional == 2.0


def test_chsh_three_minus_pattern_is_negation(optimal_space):
    s = chsh(optimal_space, (-1, -1, -1, 1))
    assert s.value_conditional == pytest.approx(-TWO_SQRT2, abs=1e-12)


@pytest.mark.parametrize("pattern", [(1, 1, 1, 1), (1, -1, -1, 1), (1, 1, 2, -1), (1, 1, -1)])
def test_bad_patterns(optimal_space, pattern):
    with pytest.raises(BadSignPattern):
        chsh(optimal_space, pattern)


def test_not_two_by_two():
    space = build_space(build_family(angles_a=[0, 1, 2], angles_b=[0, 1], model="singlet"))
    with pytest.raises(NotTwoByTwo):
        chsh(space)
    with pytest.raises(NotTwoByTwo):
        bound_report(space)
    rep = analyze(space)
    assert len(rep.pairs) == 6 and rep.chsh is None and rep.bounds is None


def test_bound_report_optimal(optimal_space):
    rep = bound_report(optimal_space)
    assert rep.all_passed
    assert rep.b4.value == pytest.approx(TWO_SQRT2, abs=1e-12)
    assert rep.b1.value == pytest.approx(HALF_SQRT2, abs=1e-12)
    assert rep.b1.applicable


def test_bound_report_deterministic():
    rep = bound_report(grid_space([DIAGONAL] * 4))
    assert rep.b4.value == 2.0 and rep.b2.value == 0.5 and rep.all_passed


def test_bound_four_attained_by_hand_grid():
    space = grid_space([DIAGONAL, DIAGONAL, DIAGONAL, ANTI])
    assert chsh(space, (1, 1, 1, -1)).value_conditional == 4.0
    rep = bound_report(space)
    assert rep.b4.value == 4.0 and rep.b4.passed
    assert rep.b1.value == 1.0 and rep.b1.passed


def test_bound_verdict_slack():
    assert Bound(2.0 + 5e-10, 2.0).passed
    assert not Bound(2.0 + 2e-9, 2.0).passed


def test_b1_marked_not_applicable_for_nonuniform_weights():
    space = grid_space([DIAGONAL] * 4, ContextWeights((0.3, 0.7), (0.5, 0.5)))
    assert not bound_report(space).b1.applicable


@st.composite
def two_by_two(draw):
    seed = draw(st.integers(0, 2**32 - 1))
    grid = random_grid(np.random.default_rng(seed), sparse=draw(st.booleans()))
    u = draw(st.floats(0.05, 0.95))
    v = draw(st.floats(0.05, 0.95))
    return build_space(build_family(grid, m=2, n=2), ContextWeights((u, 1 - u), (v, 1 - v)))


@settings(max_examples=200)
@given(two_by_two())
def test_absolute_is_weighted_conditional(space):
    for i in (1, 2):
        for j in (1, 2):
            w = space.weights.joint(i, j)
            assert abs(absolute_correlation(space, i, j) - w * conditional_correlation(space, i, j)) <= 1e-12


@settings(max_examples=200)
@given(two_by_two())
def test_absolute_chsh_obeys_theorem(space):
    for p in CANONICAL_PATTERNS:
        s = chsh(space, p)
        assert abs(s.value_absolute) <= 2 + 1e-9
        assert abs(s.value_conditional) <= 4 + 1e-9


def test_cross_check_catches_corrupted_measure(optimal_family):
    # measure that disagrees with the tables: conditional law of (1,1) is uniform
    measure = {}
    for a in build_space(optimal_family).atoms:
        p = optimal_family.table(a.i, a.j)[(a.eps, a.eps_prime)]
        measure[a] = 0.25 * (0.25 if (a.i, a.j) == (1, 1) else p)
    space = KolmogorovSpace.from_measure(optimal_family, measure)
    with pytest.raises(InvariantViolation):
        conditional_correlation(space, 1, 1)
    assert conditional_correlation(space, 2, 2) == pytest.approx(-HALF_SQRT2, abs=1e-12)


def test_report_dict(optimal_space):
    doc = analyze(optimal_space).to_dict()
    assert set(doc) == {"pairs", "chsh", "bounds"}
    assert set(doc["bounds"]) == {"b1", "b2", "b4", "b8"}
    assert doc["pairs"][0] == {"i": 1, "j": 1, "conditional": pytest.approx(HALF_SQRT2, abs=1e-12),
                               "absolute": pytest.approx(HALF_SQRT2 / 4, abs=1e-12)}
