import math

import numpy as np
import pytest

from kolmobell import (
    ContextWeights,
    EmptyContext,
    RecordError,
    SimulationConfig,
    TrialRecord,
    build_family,
    build_space,
    convergence_check,
    estimate,
    simulate,
)
from kolmobell.errors import DimensionMismatch, ValidationError
from kolmobell.simulation import (
    TrialBatch,
    count_records,
    expected_estimate,
    merge_counts,
)

from conftest import OPTIMAL_A, OPTIMAL_B


@pytest.fixture(scope="module")
def big_run():
    fam = build_family(angles_a=OPTIMAL_A, angles_b=OPTIMAL_B, model="singlet")
    batch = simulate(SimulationConfig(fam, 10**6, 20261016))
    return fam, batch, estimate(batch, 2, 2)


def test_single_deterministic_trial():
    fam = build_family({(1, 1): [1.0, 0.0, 0.0, 0.0]}, m=1, n=1)
    for seed in (0, 1, 2**64 - 1):
        batch = simulate(SimulationConfig(fam, 1, seed))
        assert list(batch) == [TrialRecord(0, 1, 1, 1, 1)]


def test_reproducible(optimal_family):
    cfg = SimulationConfig(optimal_family, 5000, 123)
    assert simulate(cfg) == simulate(cfg)
    assert not simulate(cfg) == simulate(SimulationConfig(optimal_family, 5000, 124))


def test_stream_schedule(optimal_family):
    """Three sequential doubles per trial, mapped by inverse CDF."""
    cfg = SimulationConfig(optimal_family, 200, 99, ContextWeights((0.3, 0.7), (0.6, 0.4)))
    batch = simulate(cfg)
    rng = np.random.Generator(np.random.PCG64(99))
    order = [(1, 1), (1, -1), (-1, 1), (-1, -1)]
    for rec in batch:
        xa, xb, xo = rng.random(), rng.random(), rng.random()
        i = 1 if xa < 0.3 else 2
        j = 1 if xb < 0.6 else 2
        acc, k = 0.0, 0
        for k, p in enumerate(optimal_family.table(i, j).values):
            acc += p
            if xo < acc:
                break
        assert (rec.eta_a, rec.eta_b, rec.a, rec.b) == (i, j) + order[k]


def test_zero_probability_outcomes_never_drawn():
    fam = build_family({(1, 1): [0.0, 0.3, 0.7, 0.0], (1, 2): [0.5, 0.0, 0.0, 0.5]}, m=1, n=2)
    batch = simulate(SimulationConfig(fam, 20000, 5))
    c = count_records(batch, 1, 2)
    assert c[0, 0, 0] == 0 and c[0, 0, 3] == 0
    assert c[0, 1, 1] == 0 and c[0, 1, 2] == 0


def test_config_validation(optimal_family):
    with pytest.raises(ValidationError):
        SimulationConfig(optimal_family, 0, 1)
    with pytest.raises(ValidationError):
        SimulationConfig(optimal_family, 10, 2**64)
    with pytest.raises(DimensionMismatch):
        SimulationConfig(optimal_family, 10, 1, ContextWeights.uniform(3, 2))


def test_records_are_exclusive(optimal_family):
    batch = simulate(SimulationConfig(optimal_family, 2000, 3))
    for rec in batch:
        assert sum(rec.A(i) != 0 for i in (1, 2)) == 1
        assert sum(rec.B(j) != 0 for j in (1, 2)) == 1


def test_context_counts_concentrate(big_run):
    _, _, est = big_run
    n = 10**6
    band = 4 * math.sqrt(n * 0.25 * 0.75)
    assert np.all(np.abs(est.context_counts() - n / 4) < band)


def test_estimate_all_one_context():
    recs = [TrialRecord(k, 1, 1, 1, 1) for k in range(10)]
    est = estimate(recs, 1, 1)
    assert est.p_hat[0, 0].tolist() == [1.0, 0.0, 0.0, 0.0]
    assert est.conditional[0, 0] == 1.0
    assert est.absolute[0, 0] == 1.0
    assert est.conditional_stderr[0, 0] == 0.0


def test_estimate_known_counts():
    # context (1,1): ++ x3, -- x1; context (2,1): +- x4
    recs = [(0, 1, 1, 1, 1)] * 3 + [(0, 1, 1, -1, -1)] + [(0, 2, 1, 1, -1)] * 4
    est = estimate(recs, 2, 1)
    assert est.counts[0, 0].tolist() == [3, 0, 0, 1]
    assert est.conditional.tolist() == [[1.0], [-1.0]]
    assert est.absolute.tolist() == [[0.5], [-0.5]]
    assert est.p_stderr[0, 0, 0] == pytest.approx(math.sqrt(0.75 * 0.25 / 4))


def test_estimate_empty_context():
    recs = [TrialRecord(0, 1, 1, 1, -1)]
    with pytest.raises(EmptyContext) as exc:
        estimate(recs, 2, 2)
    assert exc.value.context == (1, 2)
    est = estimate(recs, 2, 2, allow_empty=True)
    assert est.empty_contexts == ((1, 2), (2, 1), (2, 2))
    assert math.isnan(est.conditional[1, 1])


def test_estimate_rejects_bad_rows():
    recs = [TrialRecord(0, 1, 1, 1, 1), TrialRecord(1, 1, 1, 0, 1), TrialRecord(2, 3, 1, 1, 1)]
    with pytest.raises(RecordError) as exc:
        estimate(recs, 2, 2)
    assert exc.value.row == 2
    with pytest.raises(RecordError) as exc:
        estimate(recs[::2], 2, 2, allow_empty=True)
    assert exc.value.row == 2 and "eta_a" in str(exc.value)


def test_big_run_matches_cosines(big_run):
    _, _, est = big_run
    for i in (1, 2):
        for j in (1, 2):
            exact = math.cos(OPTIMAL_A[i - 1] - OPTIMAL_B[j - 1])
            assert abs(est.conditional[i - 1, j - 1] - exact) < 0.01
            assert abs(est.absolute[i - 1, j - 1] - est.conditional[i - 1, j - 1] / 4) < 0.01


def test_big_run_chsh(big_run):
    _, _, est = big_run
    s = est.chsh()
    assert abs(s.value_conditional - 2 * math.sqrt(2)) < 0.02
    se_c, se_a = est.chsh_stderr()
    assert abs(s.value_absolute) < 1 + 3 * se_a
    assert est.bounds().all_passed


def test_convergence_big_run(big_run):
    fam, _, est = big_run
    rep = convergence_check(est, build_space(fam), 0.01)
    assert rep.passed
    assert len(rep.items) == 4 * 6


def test_convergence_exact_against_itself(optimal_space):
    est = expected_estimate(optimal_space, 1000)
    for tol in (0.0, 1e-12, 0.5):
        assert convergence_check(est, optimal_space, tol).passed


def test_convergence_not_vacuous(optimal_family, optimal_space):
    # At N=100 the 5-sigma band is wide; failures come from cells never
    # observed, whose plug-in stderr is 0 so only the tolerance applies.
    failed = 0
    for seed in range(200):
        est = estimate(simulate(SimulationConfig(optimal_family, 100, seed)), 2, 2,
                       allow_empty=True)
        rep = convergence_check(est, optimal_space, 1e-6)
        failed += not rep.passed
        assert rep.passed == (not rep.failures)
    assert failed >= 100


def test_convergence_flags_wrong_model(big_run):
    _, _, est = big_run
    wrong = build_space(build_family({c: [0.25] * 4 for c in [(1, 1), (1, 2), (2, 1), (2, 2)]},
                                     m=2, n=2))
    rep = convergence_check(est, wrong, 0.01)
    assert {it.quantity for it in rep.failures} == {"p", "conditional", "absolute"}


def test_convergence_dimension_check(big_run):
    _, _, est = big_run
    with pytest.raises(DimensionMismatch):
        convergence_check(est, build_space(build_family({(1, 1): [0.25] * 4}, m=1, n=1)))


def test_gate_frequencies_over_seeds(optimal_family):
    u = (0.3, 0.7)
    weights = ContextWeights(u, (0.5, 0.5))
    n = 10**4
    inside = 0
    for seed in range(100):
        batch = simulate(SimulationConfig(optimal_family, n, seed, weights))
        freq = np.mean(batch.eta_a == 1)
        inside += abs(freq - u[0]) < 5 * math.sqrt(u[0] * (1 - u[0]) / n)
    assert inside >= 99


def test_partition_and_merge(big_run):
    _, batch, est = big_run
    half = len(batch) // 2
    first = TrialBatch(*(c[:half] for c in (batch.trial_id, batch.eta_a, batch.eta_b, batch.a, batch.b)))
    second = TrialBatch(*(c[half:] for c in (batch.trial_id, batch.eta_a, batch.eta_b, batch.a, batch.b)))
    merged = merge_counts(count_records(first, 2, 2), count_records(second, 2, 2))
    assert np.array_equal(merged.counts, est.counts)
    assert np.array_equal(merged.conditional, est.conditional)
