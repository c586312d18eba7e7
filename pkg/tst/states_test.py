#!/usr/bin/env python3
"""
States Test - bipartite states and the separability criteria

Covers state validation, partial transpose and trace, realignment, witness
application on either factor, the criteria battery, reference states and
the mixing threshold.
"""

import logging
import sys
from pathlib import Path

import numpy as np
import pytest
from numpy.testing import assert_allclose
from pydantic import ValidationError

# Add the project root to Python path for imports
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from src.posmap.errors import StateError
from src.posmap.linalg import hermitian_eig
from src.posmap.maps import gamma_map, gamma_prime_map, reduction_map, transpose_map
from src.posmap.states import (
    BipartiteState,
    CriterionReport,
    Side,
    Verdict,
    apply_map_side,
    apply_to_factor,
    bell_state,
    default_battery,
    gamma_detected_state,
    is_ppt,
    map_witness_test,
    maximally_entangled_state,
    mixing_threshold,
    partial_trace,
    partial_transpose,
    ppt_entangled_operator,
    ppt_entangled_state,
    product_state,
    random_density,
    random_separable,
    realign,
    realignment_criterion,
    run_battery,
)


def maximally_mixed(dim_a, dim_b):
    size = dim_a * dim_b
    return BipartiteState(dim_a=dim_a, dim_b=dim_b, matrix=np.eye(size) / size)


def test_state_names_the_failed_invariant():
    with pytest.raises(StateError, match="trace"):
        BipartiteState(dim_a=2, dim_b=2, matrix=0.9 * np.eye(4) / 4)
    with pytest.raises(StateError, match="hermitian"):
        BipartiteState(dim_a=2, dim_b=1, matrix=[[0.5, 0.5], [0, 0.5]])
    with pytest.raises(StateError, match="positive semidefinite"):
        BipartiteState(dim_a=2, dim_b=1, matrix=np.diag([1.5, -0.5]))
    with pytest.raises(StateError, match="shape"):
        BipartiteState(dim_a=2, dim_b=2, matrix=np.eye(3) / 3)


def test_invalid_state_is_logged(caplog):
    with caplog.at_level(logging.ERROR, logger="src.posmap.states"):
        with pytest.raises(StateError):
            BipartiteState(dim_a=2, dim_b=2, matrix=0.9 * np.eye(4) / 4)
    assert any("trace invariant violated" in r.getMessage() for r in caplog.records)


def test_bell_partial_transpose():
    rho = bell_state()
    values = hermitian_eig(partial_transpose(rho)).values
    assert_allclose(values, [-0.5, 0.5, 0.5, 0.5], atol=1e-12)
    outcome = is_ppt(rho)
    assert not outcome.passed
    assert outcome.value == pytest.approx(-0.5)


def test_partial_transpose_sides_agree_up_to_full_transpose():
    rho = random_separable(2, 3, terms=3, seed=1, factors="mixed")
    full = partial_transpose(rho, Side.LEFT)
    assert_allclose(full.T, partial_transpose(rho, Side.RIGHT), atol=1e-14)


def test_partial_trace_of_bell():
    assert_allclose(partial_trace(bell_state(), Side.LEFT), np.eye(2) / 2, atol=1e-14)
    assert_allclose(partial_trace(bell_state(), Side.RIGHT), np.eye(2) / 2, atol=1e-14)


def test_partial_trace_of_product():
    rho_a = random_density(2, seed=3)
    rho_b = random_density(3, seed=4)
    rho = product_state(rho_a, rho_b)
    assert_allclose(partial_trace(rho, Side.LEFT), rho_a, atol=1e-14)
    assert_allclose(partial_trace(rho, Side.RIGHT), rho_b, atol=1e-14)


@pytest.mark.parametrize("d", [2, 3])
def test_realignment_of_maximally_entangled(d):
    outcome = realignment_criterion(maximally_entangled_state(d))
    assert not outcome.passed
    assert outcome.value == pytest.approx(float(d))


def test_realignment_of_product_is_rank_one():
    rho = product_state(random_density(2, seed=5), random_density(2, seed=6))
    assert np.linalg.matrix_rank(realign(rho), tol=1e-10) == 1
    assert realignment_criterion(rho).passed


@pytest.mark.parametrize("dims", [(2, 2), (2, 3), (3, 2)])
def test_realignment_norm_of_product_is_product_of_frobenius_norms(dims):
    rho_a = random_density(dims[0], seed=7)
    rho_b = random_density(dims[1], seed=8)
    outcome = realignment_criterion(product_state(rho_a, rho_b))
    assert outcome.value == pytest.approx(np.linalg.norm(rho_a) * np.linalg.norm(rho_b), abs=1e-12)
    assert outcome.passed


@pytest.mark.parametrize("side", [Side.LEFT, Side.RIGHT])
def test_partial_transpose_is_an_involution(side):
    for seed in range(5):
        rho = random_separable(2, 3, terms=3, seed=seed, factors="mixed")
        once = BipartiteState(dim_a=2, dim_b=3, matrix=partial_transpose(rho, side))
        assert_allclose(partial_transpose(once, side), rho.matrix, atol=1e-15)


def test_gamma_witness_doubles_the_trace():
    for seed in range(10):
        rho = BipartiteState(dim_a=3, dim_b=3, matrix=random_density(9, seed=seed))
        witnessed = apply_map_side(rho, gamma_map(), Side.RIGHT)
        assert np.trace(witnessed) == pytest.approx(2.0, abs=1e-12)


def test_realign_shape_for_unequal_factors():
    rho = maximally_mixed(2, 3)
    assert realign(rho).shape == (4, 9)


def test_apply_to_factor_side_mismatch():
    with pytest.raises(StateError, match="dimension"):
        apply_map_side(bell_state(), transpose_map(3))


def test_transpose_witness_matches_partial_transpose():
    rho = random_separable(3, 2, terms=2, seed=2, factors="mixed")
    assert_allclose(apply_map_side(rho, transpose_map(2), Side.RIGHT), partial_transpose(rho, Side.RIGHT), atol=1e-13)
    assert_allclose(apply_map_side(rho, transpose_map(3), Side.LEFT), partial_transpose(rho, Side.LEFT), atol=1e-13)


def test_reduction_witness_matches_partial_trace_form():
    rho = random_separable(3, 3, terms=4, seed=8, factors="mixed")
    expected = np.kron(partial_trace(rho, Side.LEFT), np.eye(3)) - rho.matrix
    assert_allclose(apply_map_side(rho, reduction_map(3), Side.RIGHT), expected, atol=1e-13)


def test_witnesses_detect_bell():
    transpose = map_witness_test(bell_state(), transpose_map(2))
    reduction = map_witness_test(bell_state(), reduction_map(2), spectrum=True)
    assert transpose.verdict == Verdict.FAIL
    assert reduction.verdict == Verdict.FAIL
    assert reduction.min_eigenvalue == pytest.approx(-0.5)
    assert len(reduction.spectrum) == 4


def test_default_battery():
    assert [phi.label for phi, _ in default_battery(3, 3)] == ["gamma", "gamma-prime", "transpose", "reduction"]
    assert [phi.label for phi, _ in default_battery(2, 2)] == ["transpose", "reduction"]
    assert default_battery(2, 1) == []


def test_battery_on_maximally_mixed():
    report = run_battery(maximally_mixed(3, 3))
    assert report.overall == "separable-consistent"
    assert not report.entangled
    assert len(report.witnesses) == 4


def test_battery_on_bell():
    report = run_battery(bell_state())
    assert report.entangled
    assert report.ppt.verdict == Verdict.FAIL
    assert report.witness("reduction").verdict == Verdict.FAIL


def test_report_rejects_inconsistent_overall():
    report = run_battery(bell_state())
    payload = report.model_dump()
    payload["overall"] = "separable-consistent"
    with pytest.raises(ValidationError):
        CriterionReport(**payload)


def test_gamma_detected_state_is_exact():
    rho = gamma_detected_state()
    assert np.trace(rho.matrix).real == pytest.approx(1.0, abs=1e-15)
    entries = np.unique(np.round(rho.matrix.real * 195, 8))
    assert_allclose(entries, [0.0, 0.99, 1.01, 63.0])


def test_ppt_entangled_operator_pattern():
    rho0 = ppt_entangled_operator(0.5, 2.0)
    assert_allclose(np.diag(rho0).real, [1, 0.5, 2, 2, 1, 0.5, 0.5, 2, 1])
    rho = ppt_entangled_state(0.5, 2.0)
    assert_allclose(rho.matrix, rho0 / (3 * 3.5))


def test_ppt_entangled_state_is_invariant_under_partial_transpose():
    rho = ppt_entangled_state(0.5, 2.0)
    assert_allclose(partial_transpose(rho), rho.matrix, atol=1e-15)
    assert is_ppt(rho).passed


def test_ppt_entangled_state_parameters():
    with pytest.raises(StateError, match="differ from 1"):
        ppt_entangled_state(1.0, 2.0)
    with pytest.raises(StateError, match="positive"):
        ppt_entangled_state(0.0, 2.0)
    with pytest.raises(StateError, match="positive semidefinite"):
        ppt_entangled_state(0.5, 0.5)


def test_gamma_eigenvector_on_unnormalized_operator():
    v = np.zeros(9)
    v[[0, 4, 8]] = 1.0
    detected = apply_to_factor(ppt_entangled_operator(0.5, 2.0), 3, 3, gamma_map())
    assert_allclose(detected @ v, -0.5 * v, atol=1e-10)
    mirrored = apply_to_factor(ppt_entangled_operator(2.0, 0.5), 3, 3, gamma_prime_map())
    assert_allclose(mirrored @ v, -0.5 * v, atol=1e-10)


def test_gamma_blind_when_a_exceeds_one():
    rho = ppt_entangled_state(2.0, 0.5)
    assert map_witness_test(rho, gamma_map()).verdict == Verdict.PASS
    assert map_witness_test(rho, gamma_prime_map()).verdict == Verdict.FAIL


def test_random_density():
    rho = random_density(4, seed=1, rank=2)
    assert np.trace(rho).real == pytest.approx(1.0)
    values = np.linalg.eigvalsh(rho)
    assert values[0] >= -1e-12
    assert np.sum(values > 1e-10) == 2
    with pytest.raises(StateError):
        random_density(0)


def test_random_separable_is_deterministic():
    first = random_separable(3, 3, terms=4, seed=7)
    second = random_separable(3, 3, terms=4, seed=7)
    assert_allclose(first.matrix, second.matrix)
    with pytest.raises(StateError, match="terms"):
        random_separable(2, 2, terms=0)
    with pytest.raises(StateError, match="factors"):
        random_separable(2, 2, factors="entangled")


def test_mixing_threshold_of_bell_with_noise():
    threshold = mixing_threshold(bell_state(), maximally_mixed(2, 2), transpose_map(2))
    assert threshold.epsilon == pytest.approx(2 / 3, abs=1e-6)
    assert threshold.detected_min_eigenvalue < 0 <= threshold.undetected_min_eigenvalue + 1e-9


def test_mixing_threshold_requires_a_detected_start():
    with pytest.raises(StateError, match="does not detect"):
        mixing_threshold(maximally_mixed(2, 2), bell_state(), transpose_map(2))


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
