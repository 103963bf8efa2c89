"""Tests for product-state minimization, classification and refinement."""

import numpy as np
import pytest

from snwitness import (
    Dims,
    NotHermitianError,
    Operator,
    OptimizerConfig,
    ParameterError,
    PreconditionError,
    PureState,
    classify_schmidt_witness,
    detects,
    expectation,
    finer_certificate,
    is_entanglement_witness,
    lambda_max_subtraction,
    lift_operator,
    make_isotropic_witness,
    maximally_entangled_state,
    min_eigenpair,
    min_product_expectation,
    optimality_certificate,
    random_hermitian,
    random_pure_state,
    refine_by_subtraction,
    schmidt_rank,
    subtract,
    trace_pair,
)
from snwitness.families import IsotropicWitnessSpec
from snwitness.witness import POSITIVE, SCHMIDT_WITNESS, seesaw_once

D33 = Dims(3, 3)
CFG = OptimizerConfig(seed=7, restarts=24)


def isotropic(a, d=3):
    return make_isotropic_witness(IsotropicWitnessSpec(a, d))


def identity_over_nine():
    return Operator(D33, np.eye(9) / 9, hermitian=True)


def bell_witness():
    """(id - 2 P) / 2 on 2x2: vanishes on products aligned with the Bell state."""
    phi = maximally_entangled_state(2).amplitudes
    mat = (np.eye(4) - 2 * np.outer(phi, phi.conj())) / 2
    return Operator(Dims(2, 2), mat, hermitian=True)


def projector(state):
    return Operator(
        state.dims, np.outer(state.amplitudes, state.amplitudes.conj()), hermitian=True
    )


def states_detected_by(w, count, seed, spread=0.4):
    """Random pure states near the maximally entangled one that w detects."""
    phi = maximally_entangled_state(3).amplitudes
    rng = np.random.default_rng(seed)
    found = []
    for _ in range(50 * count):
        g = rng.normal(size=9) + 1j * rng.normal(size=9)
        vec = phi + spread * g / np.linalg.norm(g)
        vec /= np.linalg.norm(vec)
        rho = projector(PureState(D33, vec, normalized=True))
        if trace_pair(w, rho) < -1e-9:
            found.append(rho)
            if len(found) == count:
                return found
    raise AssertionError(f"could not sample {count} detected states")


# ---------------------------------------------------------------------------
# see-saw minimization


def test_product_min_of_scaled_identity():
    w = Operator(Dims(2, 3), np.eye(6) / 6, hermitian=True)
    result = min_product_expectation(w, CFG)
    assert abs(result.value - 1 / 6) < 1e-12
    assert result.converged


def test_product_min_of_bell_witness_is_zero():
    result = min_product_expectation(bell_witness(), CFG)
    assert abs(result.value) < 1e-9


def test_product_min_of_isotropic_family():
    # closed form: the best product overlap with the entangled projector is 1/d
    for a in (0.125, 1 / 3):
        result = min_product_expectation(isotropic(a), CFG)
        assert abs(result.value - (1 / 9 - a / 3) / (1 - a)) < 1e-6


def test_product_min_value_matches_its_minimizer():
    w = random_hermitian(Dims(2, 3), seed=60)
    result = min_product_expectation(w, CFG)
    assert abs(result.value - expectation(w, result.minimizer())) < 1e-9


def test_product_min_dominates_smallest_eigenvalue():
    for t in range(10):
        w = random_hermitian(Dims(2, 3), seed=(61, t))
        result = min_product_expectation(w, CFG)
        assert result.value >= min_eigenpair(w)[0] - 1e-9


def test_seesaw_iterations_never_increase():
    for t in range(10):
        w = random_hermitian(D33, seed=(62, t))
        rng = np.random.default_rng((63, t))
        start = rng.normal(size=3) + 1j * rng.normal(size=3)
        _, _, _, history, _ = seesaw_once(w, start)
        diffs = np.diff(history)
        assert np.all(diffs <= 1e-12)


def test_seesaw_monotone_on_lifted_operator():
    w = lift_operator(isotropic(0.2), 2).operator
    rng = np.random.default_rng(64)
    start = rng.normal(size=6) + 1j * rng.normal(size=6)
    value, _, _, history, converged = seesaw_once(w, start)
    assert np.all(np.diff(history) <= 1e-12)
    assert converged
    assert value >= (1 / 18 - 0.2 / 3) / 0.8 - 1e-9


def test_product_min_requires_hermitian():
    w = Operator(Dims(2, 2), np.diag([1.0, 2, 3, 4]) + np.eye(4, k=1))
    with pytest.raises(NotHermitianError):
        min_product_expectation(w, CFG)


def test_config_validation():
    with pytest.raises(ParameterError):
        OptimizerConfig(restarts=0)


def test_config_json_roundtrip():
    cfg = OptimizerConfig(seed=5, restarts=8, max_iters=99)
    assert OptimizerConfig.from_json(cfg.to_json()) == cfg


# ---------------------------------------------------------------------------
# witness verdicts


def test_positive_operator_is_not_a_witness():
    check = is_entanglement_witness(identity_over_nine(), CFG)
    assert not check.is_witness
    assert check.detected is None


def test_three_witness_is_an_entanglement_witness():
    check = is_entanglement_witness(isotropic(1 / 8), CFG)
    assert check.is_witness
    assert check.min_eigenvalue < 0
    assert expectation(isotropic(1 / 8), check.detected) < -1e-9


def test_small_parameter_family_member_is_positive():
    assert not is_entanglement_witness(isotropic(0.05), CFG).is_witness


# ---------------------------------------------------------------------------
# classification


def test_classify_positive_member():
    cls = classify_schmidt_witness(isotropic(0.05), config=CFG)
    assert cls.verdict == POSITIVE
    assert cls.k is None


def test_classify_order_three_member():
    cls = classify_schmidt_witness(isotropic(1 / 8), config=CFG)
    assert cls.verdict == SCHMIDT_WITNESS
    assert cls.k == 3
    assert cls.per_level_product_min[1] >= -1e-7
    assert cls.per_level_product_min[2] >= -1e-7
    assert cls.per_level_product_min[3] < -1e-7
    assert expectation(isotropic(1 / 8), cls.detected_state) < -1e-9
    assert schmidt_rank(cls.detected_state) == 3


def test_classify_order_two_member():
    cls = classify_schmidt_witness(isotropic(0.2), config=CFG)
    assert cls.k == 2
    assert expectation(isotropic(0.2), cls.detected_state) < -1e-9
    assert schmidt_rank(cls.detected_state) == 2


def test_classify_per_level_minima_are_nested():
    for a in (1 / 8, 0.2):
        cls = classify_schmidt_witness(isotropic(a), config=CFG)
        levels = sorted(cls.per_level_product_min)
        values = [cls.per_level_product_min[l] for l in levels]
        assert np.all(np.diff(values) <= 1e-9)


def test_classify_operator_negative_on_products():
    # beyond a = 1/3 the family goes negative on product states; order 1
    # flags that it is not a valid witness of any Schmidt class
    s = isotropic(0.4)
    cls = classify_schmidt_witness(s, config=CFG)
    assert cls.k == 1
    assert abs(cls.per_level_product_min[1] - (1 / 9 - 0.4 / 3) / 0.6) < 1e-8
    assert schmidt_rank(cls.detected_state) == 1
    assert expectation(s, cls.detected_state) < -1e-7


def test_classify_respects_max_k():
    with pytest.raises(ParameterError):
        classify_schmidt_witness(isotropic(0.2), max_k=4, config=CFG)
    # a 3-SW scanned only to level 2 is reported beyond the scanned range
    cls = classify_schmidt_witness(isotropic(1 / 8), max_k=2, config=CFG)
    assert cls.k == 3
    assert cls.detected_state is None


# ---------------------------------------------------------------------------
# detection of mixed states


def test_detects_entangled_projector():
    w = isotropic(0.2)
    rho = projector(maximally_entangled_state(3))
    assert detects(w, rho, tol=1e-9)
    assert abs(trace_pair(w, rho) - (1 / 9 - 0.2) / 0.8) < 1e-12


def test_detects_nothing_on_the_uniform_state():
    w = isotropic(0.2)
    uniform = Operator(D33, np.eye(9) / 9, hermitian=True)
    assert not detects(w, uniform, tol=1e-9)


def test_psd_operator_detects_nothing():
    w = identity_over_nine()
    rho = projector(maximally_entangled_state(3))
    assert not detects(w, rho, tol=1e-9)


def test_detects_rejects_non_state():
    w = isotropic(0.2)
    not_psd = Operator(D33, np.diag([1.0] * 8 + [-1.0]), hermitian=True)
    with pytest.raises(ParameterError):
        detects(w, not_psd, tol=1e-9)


# ---------------------------------------------------------------------------
# subtraction and refinement


def test_subtract_zero_is_identity():
    w = isotropic(0.2)
    z = identity_over_nine()
    assert np.array_equal(subtract(w, z, 0.0).matrix, w.matrix)


def test_coarsening_lands_back_in_the_family():
    mixed = subtract(isotropic(1 / 3), identity_over_nine(), 0.5)
    assert np.abs(mixed.matrix - isotropic(1 / 5).matrix).max() < 1e-12


def test_coarsening_inequality_for_psd_direction():
    w1 = isotropic(0.25)
    z = identity_over_nine()
    eps = 0.3
    w2 = subtract(w1, z, eps)
    for t in range(20):
        psi = random_pure_state(D33, rank=1, seed=(65, t))
        rho = projector(psi)
        assert trace_pair(w2, rho) - (1 - eps) * trace_pair(w1, rho) >= -1e-12


def test_subtract_validates_epsilon():
    with pytest.raises(ParameterError):
        subtract(isotropic(0.2), identity_over_nine(), 1.0)


def test_finer_candidate_direction():
    w = isotropic(1 / 8)
    z = identity_over_nine()
    eps = 0.1
    finer = subtract(w, z, -eps)
    expected = (1 + eps) * w.matrix - eps * z.matrix
    assert np.abs(finer.matrix - expected).max() < 1e-15


def test_refine_by_subtraction_formula():
    s = isotropic(1 / 8)
    z = identity_over_nine()
    lam = 0.2
    refined = refine_by_subtraction(s, z, lam)
    assert np.abs(refined.matrix - (s.matrix - lam * z.matrix) / (1 - lam)).max() == 0.0
    # same operator through the signed-epsilon convention
    via_subtract = subtract(s, z, -lam / (1 - lam))
    assert np.abs(refined.matrix - via_subtract.matrix).max() < 1e-12
    with pytest.raises(ParameterError):
        refine_by_subtraction(s, z, 1.0)


def test_refinement_keeps_previously_detected_states():
    # subtract the lifted direction upstairs; by linearity of the lift the
    # result is the lift of the refined operator, which we check downstairs
    s = isotropic(1 / 8)
    z = identity_over_nine()
    eps = 0.1
    level = 2
    lifted_refined = (1 + eps) * lift_operator(s, level).operator.matrix \
        - eps * lift_operator(z, level).operator.matrix
    finer = subtract(s, z, -eps)
    assert np.abs(lifted_refined - lift_operator(finer, level).operator.matrix).max() < 1e-12
    for rho in states_detected_by(s, 20, seed=66):
        assert trace_pair(finer, rho) <= trace_pair(s, rho) + 1e-12


# ---------------------------------------------------------------------------
# finer-witness certificates


def test_identical_witnesses_are_trivially_finer():
    w = isotropic(0.2)
    cert = finer_certificate(w, w)
    assert cert.found and cert.epsilon == 0.0


def test_finer_certificate_for_family_pair():
    cert = finer_certificate(isotropic(1 / 3), isotropic(1 / 5), grid=200)
    assert cert.found
    assert abs(cert.epsilon - 0.5) < 1e-12
    assert np.abs(cert.z.matrix - np.eye(9) / 9).max() < 1e-9
    assert abs(cert.z.trace() - 1.0) < 1e-12


def test_finer_certificate_refuted_in_reverse():
    cert = finer_certificate(isotropic(1 / 5), isotropic(1 / 3), grid=200)
    assert not cert.found
    assert cert.z is None
    assert cert.min_eigenvalue < -1e-3
    assert all(me < -1e-6 for _, me in cert.evidence)


def test_finer_witness_orders_expectations_on_detected_states():
    w1, w2 = isotropic(1 / 3), isotropic(1 / 5)
    for rho in states_detected_by(w2, 30, seed=67):
        assert trace_pair(w1, rho) <= trace_pair(w2, rho) + 1e-10


def test_finer_witness_on_kernel_states():
    # states with exactly vanishing w2 expectation: |<psi|phi>|^2 = 5/9
    w1, w2 = isotropic(1 / 3), isotropic(1 / 5)
    phi = maximally_entangled_state(3).amplitudes
    rng = np.random.default_rng(68)
    for _ in range(30):
        g = rng.normal(size=9) + 1j * rng.normal(size=9)
        perp = g - np.vdot(phi, g) * phi
        perp /= np.linalg.norm(perp)
        vec = np.sqrt(5 / 9) * phi + np.sqrt(4 / 9) * perp
        rho = projector(PureState(D33, vec, normalized=True))
        assert abs(trace_pair(w2, rho)) < 1e-10
        assert trace_pair(w1, rho) <= 1e-9


def test_finer_certificate_validates_traces():
    w = isotropic(0.2)
    bad = Operator(D33, 2 * np.eye(9), hermitian=True)
    with pytest.raises(ParameterError):
        finer_certificate(w, bad)


# ---------------------------------------------------------------------------
# largest subtraction weight


def test_identity_pencil_threshold_is_one():
    s = isotropic(1 / 8)
    result = lambda_max_subtraction(s, s, 3, CFG)
    assert abs(result.lambda0 - 1.0) < 1e-9
    assert abs(result.formula_sup_inv - 1.0) < 1e-9


def test_subtraction_threshold_for_family_instance():
    s = isotropic(1 / 8)
    z = identity_over_nine()
    result = lambda_max_subtraction(s, z, 3, CFG)
    assert abs(result.lambda0 - 2 / 7) < 1e-6
    assert abs(result.formula_min - result.formula_sup_inv) < 1e-4
    assert result.refined is not None
    assert abs(result.refined.trace() - 1.0) < 1e-12


def test_subtraction_rejects_directions_negative_on_the_class():
    s = isotropic(1 / 8)
    bad = Operator(D33, -np.eye(9) / 9, hermitian=True)
    with pytest.raises(PreconditionError):
        lambda_max_subtraction(s, bad, 3, CFG)


def test_subtraction_refine_at_requested_weight():
    s = isotropic(1 / 8)
    z = identity_over_nine()
    result = lambda_max_subtraction(s, z, 3, CFG, refine_at=0.1)
    expected = (s.matrix - 0.1 * z.matrix) / 0.9
    assert np.abs(result.refined.matrix - expected).max() < 1e-15
    with pytest.raises(ParameterError):
        lambda_max_subtraction(s, z, 3, CFG, refine_at=1.0)


# ---------------------------------------------------------------------------
# optimality certificates


def test_optimality_requires_a_witness():
    with pytest.raises(PreconditionError):
        optimality_certificate(identity_over_nine(), CFG)


def test_bell_witness_is_optimal():
    span_dim, optimal = optimality_certificate(bell_witness(), CFG)
    assert span_dim == 4
    assert optimal


def test_boundary_family_member_is_optimal():
    span_dim, optimal = optimality_certificate(isotropic(1 / 3), CFG)
    assert span_dim == 9
    assert optimal


def test_interior_family_member_is_inconclusive():
    # away from the boundary the product minimum is strictly positive, so no
    # zero products exist and the certificate cannot conclude anything
    span_dim, optimal = optimality_certificate(isotropic(0.2), CFG)
    assert span_dim == 0
    assert not optimal
