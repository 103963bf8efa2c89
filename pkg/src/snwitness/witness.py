"""Witness predicates, product-state see-saw minimization, Schmidt-number
classification, subtraction-based refinement and optimality certificates.

The central primitive is ``min_product_expectation``: the infimum of
<A,B|W|A,B> over unit product states.  Fixing one factor turns the problem
into an exact eigenproblem for the other (via ``partial_expectation``), so
the optimizer alternates exact half-steps; the per-iteration value is
non-increasing.  Certification is one-sided: the optimizer yields an upper
bound on the true infimum, so "non-negative on products" verdicts carry the
restart count as evidence and are validated against brute force at small
dimensions (see ``checks``).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .embedding import lift_operator, lower_state
from .errors import DimensionError, ParameterError, PreconditionError
from .hilbert import (
    Operator,
    PureState,
    _require_hermitian,
    a_factor_state,
    b_factor_state,
    expectation,
    min_eigenpair,
    normalize,
    product_state,
    trace_pair,
)

POSITIVE = "PositiveOperator"
SCHMIDT_WITNESS = "SchmidtWitness"


@dataclass(frozen=True)
class OptimizerConfig:
    """Seeded optimizer settings shared by all restart-based searches."""

    seed: int = 0
    restarts: int = 64
    max_iters: int = 500
    convergence_tol: float = 1e-10
    positivity_tol: float = 1e-7
    zero_tol: float = 1e-6

    def __post_init__(self):
        if self.restarts < 1:
            raise ParameterError(f"restarts must be >= 1, got {self.restarts}")
        if self.max_iters < 1:
            raise ParameterError(f"max_iters must be >= 1, got {self.max_iters}")

    def to_json(self) -> dict:
        return {
            "seed": self.seed,
            "restarts": self.restarts,
            "maxIters": self.max_iters,
            "convergenceTol": self.convergence_tol,
            "positivityTol": self.positivity_tol,
            "zeroTol": self.zero_tol,
        }

    @classmethod
    def from_json(cls, data: dict) -> "OptimizerConfig":
        return cls(
            seed=data["seed"],
            restarts=data["restarts"],
            max_iters=data["maxIters"],
            convergence_tol=data["convergenceTol"],
            positivity_tol=data["positivityTol"],
            zero_tol=data["zeroTol"],
        )


@dataclass(frozen=True)
class ProductMinResult:
    """Best product-state minimum found by the see-saw, with its minimizers."""

    value: float
    arg_a: PureState
    arg_b: PureState
    restarts_used: int
    converged: bool
    trace: tuple[float, ...]

    def minimizer(self) -> PureState:
        """The minimizing product state as a vector on the full space."""
        return product_state(self.arg_a, self.arg_b)


@dataclass(frozen=True)
class WitnessCheck:
    """Entanglement-witness verdict with the evidence that produced it."""

    is_witness: bool
    min_eigenvalue: float
    product_min: ProductMinResult
    detected: PureState | None


@dataclass(frozen=True)
class WitnessClassification:
    """Schmidt-number classification of a Hermitian operator.

    ``verdict`` is POSITIVE or SCHMIDT_WITNESS.  For a witness, ``k`` is the
    lowest Schmidt class it detects: the per-level product minima stay above
    -tol for every ancilla level l <= k-1 and dip below -tol at level k.
    k = 1 means the operator is negative already on a product state, i.e. it
    is not a valid witness of any Schmidt class.
    """

    verdict: str
    k: int | None
    min_eigenvalue: float
    per_level_product_min: dict[int, float]
    detected_state: PureState | None
    converged: bool = True


@dataclass(frozen=True)
class SubtractionResult:
    """Largest subtraction weight along a fixed direction, both formulations."""

    lambda0: float
    formula_min: float
    formula_sup_inv: float
    refined: Operator | None


@dataclass(frozen=True)
class FinerCertificate:
    """Certificate (or refutation) that one witness is finer than another."""

    found: bool
    epsilon: float
    min_eigenvalue: float
    z: Operator | None
    evidence: tuple[tuple[float, float], ...] = field(repr=False, default=())


def _random_unit(rng, n: int) -> np.ndarray:
    vec = rng.normal(size=n) + 1j * rng.normal(size=n)
    return vec / np.linalg.norm(vec)


def _conditional_b(w4: np.ndarray, a: np.ndarray) -> np.ndarray:
    """<a|W|a> over the A factor, as a matrix on the B factor."""
    t = np.tensordot(a.conj(), w4, axes=(0, 0))  # (b, a, b)
    return np.tensordot(t, a, axes=(1, 0))


def _conditional_a(w4: np.ndarray, b: np.ndarray) -> np.ndarray:
    """<b|W|b> over the B factor, as a matrix on the A factor."""
    t = np.tensordot(w4, b, axes=(3, 0))  # (a, b, a)
    return np.tensordot(b.conj(), t.transpose(1, 0, 2), axes=(0, 0))


def seesaw_once(
    w: Operator, start_a: np.ndarray, max_iters: int = 500, tol: float = 1e-10
) -> tuple[float, np.ndarray, np.ndarray, list[float], bool]:
    """One see-saw run from a fixed A-side start vector.

    Returns (value, a, b, history, converged); ``history`` holds the
    objective after every exact half-step and is non-increasing.
    """
    d = w.dims
    w4 = w.matrix.reshape(d.a_dim, d.b_dim, d.a_dim, d.b_dim)
    a = np.asarray(start_a, dtype=np.complex128)
    a = a / np.linalg.norm(a)
    history: list[float] = []
    b = None
    converged = False
    prev = np.inf
    for _ in range(max_iters):
        vals_b, vecs_b = np.linalg.eigh(_conditional_b(w4, a))
        b = vecs_b[:, 0]
        history.append(float(vals_b[0]))
        vals_a, vecs_a = np.linalg.eigh(_conditional_a(w4, b))
        a = vecs_a[:, 0]
        value = float(vals_a[0])
        history.append(value)
        if prev - value < tol:
            converged = True
            break
        prev = value
    return history[-1], a, b, history, converged


def min_product_expectation(w: Operator, config: OptimizerConfig) -> ProductMinResult:
    """Minimize <A,B|W|A,B> over unit product states by restarted see-saw."""
    _require_hermitian(w)
    if config.restarts < 1:
        raise ParameterError("at least one restart is required")
    d = w.dims
    best = None
    per_restart: list[float] = []
    for r in range(config.restarts):
        rng = np.random.default_rng((config.seed, r))
        value, a, b, _, converged = seesaw_once(
            w, _random_unit(rng, d.a_dim), config.max_iters, config.convergence_tol
        )
        per_restart.append(value)
        if best is None or value < best[0]:
            best = (value, a, b, converged)
    value, a, b, converged = best
    return ProductMinResult(
        value=value,
        arg_a=a_factor_state(a, d, normalized=True),
        arg_b=b_factor_state(b, d, normalized=True),
        restarts_used=config.restarts,
        converged=converged,
        trace=tuple(per_restart),
    )


def is_entanglement_witness(w: Operator, config: OptimizerConfig) -> WitnessCheck:
    """True iff W is non-negative on products but has a negative eigenvalue."""
    min_eig, eigvec = min_eigenpair(w)
    product_min = min_product_expectation(w, config)
    tol = config.positivity_tol
    verdict = product_min.value >= -tol and min_eig < -tol
    return WitnessCheck(
        is_witness=verdict,
        min_eigenvalue=min_eig,
        product_min=product_min,
        detected=eigvec if verdict else None,
    )


def classify_schmidt_witness(
    s: Operator, max_k: int | None = None, config: OptimizerConfig = OptimizerConfig()
) -> WitnessClassification:
    """Classify a Hermitian operator as positive or as a k-Schmidt witness.

    Product minima of the lifted operator are scanned level by level; the
    witness order k is the first ancilla level whose product minimum drops
    below -positivity_tol.  The detected state is the lowered (and
    normalized) minimizer from that level, a state of Schmidt rank <= k with
    a negative expectation value.
    """
    if not s.dims.unextended:
        raise DimensionError("classification expects an operator without ancillas")
    limit = min(s.dims.dA, s.dims.dB)
    if max_k is None:
        max_k = limit
    if max_k < 1 or max_k > limit:
        raise ParameterError(f"max_k must be in [1, {limit}], got {max_k}")
    min_eig, _ = min_eigenpair(s)
    tol = config.positivity_tol
    if min_eig >= -tol:
        return WitnessClassification(POSITIVE, None, min_eig, {}, None)
    per_level: dict[int, float] = {}
    converged = True
    for level in range(1, max_k + 1):
        lifted = lift_operator(s, level).operator
        result = min_product_expectation(lifted, config)
        per_level[level] = result.value
        converged = converged and result.converged
        if result.value < -tol:
            detected = normalize(lower_state(result.minimizer(), level))
            return WitnessClassification(
                SCHMIDT_WITNESS, level, min_eig, per_level, detected, converged
            )
    # negative eigenvalue exists but no level up to max_k detects it
    return WitnessClassification(
        SCHMIDT_WITNESS, max_k + 1, min_eig, per_level, None, converged
    )


def detects(w: Operator, rho: Operator, tol: float = 1e-9) -> bool:
    """True iff the state rho is detected by W, i.e. Tr(W rho) < -tol."""
    if w.dims != rho.dims:
        raise DimensionError(f"dims mismatch: {w.dims} vs {rho.dims}")
    rho_min = float(np.linalg.eigvalsh(rho.matrix)[0])
    if rho_min < -tol:
        raise ParameterError(f"rho is not positive semidefinite (min eig {rho_min:g})")
    return trace_pair(w, rho) < -tol


def subtract(w1: Operator, z: Operator, epsilon: float) -> Operator:
    """Affine combination of a witness with a direction operator.

    epsilon >= 0 coarsens: (1-eps) W1 + eps Z (requires eps < 1).
    epsilon < 0 produces the finer candidate (1+|eps|) W1 - |eps| Z.
    """
    if w1.dims != z.dims:
        raise DimensionError(f"dims mismatch: {w1.dims} vs {z.dims}")
    hermitian = w1.hermitian and z.hermitian
    if epsilon >= 0:
        if epsilon >= 1:
            raise ParameterError(f"coarsening epsilon must be < 1, got {epsilon}")
        matrix = (1 - epsilon) * w1.matrix + epsilon * z.matrix
    else:
        eps = -epsilon
        matrix = (1 + eps) * w1.matrix - eps * z.matrix
    return Operator(w1.dims, matrix, hermitian=hermitian)


def refine_by_subtraction(s: Operator, z: Operator, lam: float) -> Operator:
    """The rescaled subtraction (S - lam Z) / (1 - lam) for lam < 1."""
    if lam >= 1:
        raise ParameterError(f"subtraction weight must be < 1, got {lam}")
    if s.dims != z.dims:
        raise DimensionError(f"dims mismatch: {s.dims} vs {z.dims}")
    matrix = (s.matrix - lam * z.matrix) / (1 - lam)
    return Operator(s.dims, matrix, hermitian=s.hermitian and z.hermitian)


def finer_certificate(
    w1: Operator, w2: Operator, grid: int = 200, tol: float = 1e-9
) -> FinerCertificate:
    """Search for (eps, Z PSD) with W2 = (1-eps) W1 + eps Z.

    Success certifies that W1 is finer than W2 (relative to positivity on
    all states).  The returned eps maximizes the smallest eigenvalue of the
    candidate Z over the grid; on failure that same pair is the refutation
    evidence.
    """
    if w1.dims != w2.dims:
        raise DimensionError(f"dims mismatch: {w1.dims} vs {w2.dims}")
    for name, op in (("W1", w1), ("W2", w2)):
        tr = op.trace()
        if abs(tr - 1.0) > 1e-8:
            raise ParameterError(f"{name} must be trace-normalized, got trace {tr}")
    if grid < 2:
        raise ParameterError(f"grid must have at least 2 points, got {grid}")
    if float(np.abs(w1.matrix - w2.matrix).max()) < 1e-12:
        return FinerCertificate(True, 0.0, 0.0, None)
    evidence = []
    best = None
    for i in range(1, grid):
        eps = i / grid
        candidate = (w2.matrix - (1 - eps) * w1.matrix) / eps
        min_eig = float(np.linalg.eigvalsh(candidate)[0])
        evidence.append((eps, min_eig))
        if best is None or min_eig > best[1]:
            best = (eps, min_eig, candidate)
    eps, min_eig, candidate = best
    found = min_eig >= -tol
    z = Operator(w1.dims, candidate, hermitian=True) if found else None
    return FinerCertificate(found, eps, min_eig, z, tuple(evidence))


def _pencil_extreme(p: np.ndarray, q: np.ndarray, largest: bool):
    """Extremal eigenpair of the quadratic-form ratio <v|P|v>/<v|Q|v>.

    Whitens by the pseudo-inverse square root of Q on its support.  Returns
    (value, vector, negative_on_kernel); the value is None when Q has no
    support (a degenerate direction, skipped by the caller).
    """
    evals, evecs = np.linalg.eigh(q)
    scale = max(abs(float(evals[0])), abs(float(evals[-1])), 1e-300)
    support = evals > scale * 1e-10
    negative_on_kernel = False
    if not support.all():
        kernel = evecs[:, ~support]
        overlap = kernel.conj().T @ p @ kernel
        if overlap.size and float(np.linalg.eigvalsh(overlap)[0]) < -scale * 1e-8:
            negative_on_kernel = True
    if not support.any():
        return None, None, negative_on_kernel
    cols = evecs[:, support] / np.sqrt(evals[support])
    reduced = cols.conj().T @ p @ cols
    vals, vecs = np.linalg.eigh(reduced)
    idx = -1 if largest else 0
    vector = cols @ vecs[:, idx]
    return float(vals[idx]), vector / np.linalg.norm(vector), negative_on_kernel


def _pencil_seesaw(
    p4: np.ndarray, q4: np.ndarray, a_dim: int, config: OptimizerConfig, largest: bool
):
    """Extremize the product-state ratio <AB|P|AB>/<AB|Q|AB> by alternation.

    Each half-step solves the generalized eigenproblem for one factor with
    the other fixed, so the ratio is monotone along a run.  Returns the best
    ratio over restarts (None if every direction was degenerate) and whether
    P was found negative on the kernel of Q anywhere.
    """
    best = None
    kernel_flag = False
    for r in range(config.restarts):
        rng = np.random.default_rng((config.seed, 104729, r))
        a = _random_unit(rng, a_dim)
        value = None
        prev = None
        for _ in range(config.max_iters):
            val_b, b, neg = _pencil_extreme(
                _conditional_b(p4, a), _conditional_b(q4, a), largest
            )
            kernel_flag = kernel_flag or neg
            if val_b is None:
                break
            val_a, a, neg = _pencil_extreme(
                _conditional_a(p4, b), _conditional_a(q4, b), largest
            )
            kernel_flag = kernel_flag or neg
            if val_a is None:
                break
            value = val_a
            if prev is not None and abs(prev - value) < config.convergence_tol:
                break
            prev = value
        if value is None:
            continue
        if best is None or (value > best if largest else value < best):
            best = value
    return best, kernel_flag


def lambda_max_subtraction(
    s: Operator,
    z: Operator,
    k: int,
    config: OptimizerConfig = OptimizerConfig(),
    refine_at: float | None = None,
) -> SubtractionResult:
    """Largest lambda keeping (S - lambda Z)/(1 - lambda) a k-Schmidt witness.

    Estimates the threshold by extremizing the two equivalent quadratic-form
    ratios of the lifted pair at ancilla level k-1, each by restarted
    alternation.  Degenerate directions (no support of the denominator form)
    are skipped; if the numerator form is negative on the denominator's
    kernel the threshold is reported as 0.  The caller asserts that Z is
    non-negative on Schmidt class k; this is spot-checked by sampling.
    """
    if k < 2:
        raise ParameterError(f"k must be >= 2, got {k}")
    if refine_at is not None and refine_at >= 1:
        raise ParameterError(f"subtraction weight must be < 1, got {refine_at}")
    if s.dims != z.dims:
        raise DimensionError(f"dims mismatch: {s.dims} vs {z.dims}")
    if not s.dims.unextended:
        raise DimensionError("expected operators without ancillas")
    _require_hermitian(s)
    _require_hermitian(z)
    _spot_check_positive_on_class(z, k, config)

    level = k - 1
    dims = s.dims.with_ancillas(level)
    shape = (dims.a_dim, dims.b_dim, dims.a_dim, dims.b_dim)
    s4 = lift_operator(s, level).operator.matrix.reshape(shape)
    z4 = lift_operator(z, level).operator.matrix.reshape(shape)

    min_ratio, neg_kernel = _pencil_seesaw(s4, z4, dims.a_dim, config, largest=False)
    if neg_kernel:
        formula_min = 0.0
    elif min_ratio is None:
        raise PreconditionError("every sampled direction was degenerate")
    else:
        formula_min = max(min_ratio, 0.0)

    sup_ratio, _ = _pencil_seesaw(z4, s4, dims.a_dim, config, largest=True)
    if sup_ratio is None or sup_ratio <= 0.0:
        formula_sup_inv = np.inf
    else:
        formula_sup_inv = 1.0 / sup_ratio

    lambda0 = formula_min
    lam = refine_at if refine_at is not None else lambda0
    refined = refine_by_subtraction(s, z, lam) if lam < 1.0 else None
    return SubtractionResult(lambda0, formula_min, formula_sup_inv, refined)


def _spot_check_positive_on_class(z: Operator, k: int, config: OptimizerConfig):
    """Sample states of Schmidt rank <= k and check <psi|Z|psi> >= -tol."""
    from .families import random_pure_state

    for trial in range(50):
        rank = 1 + trial % k
        psi = random_pure_state(z.dims, rank, seed=(config.seed, 15485863, trial))
        value = expectation(z, psi)
        if value < -config.positivity_tol:
            raise PreconditionError(
                f"Z is negative ({value:g}) on a sampled state of Schmidt rank {rank}"
            )


def optimality_certificate(
    w: Operator, config: OptimizerConfig = OptimizerConfig()
) -> tuple[int, bool]:
    """Dimension of the span of near-zero product states and an optimality flag.

    Runs independent single-restart product minimizations, keeps the product
    states whose expectation is within zero_tol of zero, and reports the
    dimension of their linear span.  A True flag (span equals the full space
    dimension) certifies that no strictly finer witness exists; a False flag
    is inconclusive.
    """
    check = is_entanglement_witness(w, config)
    if not check.is_witness:
        raise PreconditionError("operator is not an entanglement witness")
    d = w.dims
    zeros = []
    for r in range(config.restarts):
        rng = np.random.default_rng((config.seed, 7919, r))
        value, a, b, _, _ = seesaw_once(
            w, _random_unit(rng, d.a_dim), config.max_iters, config.convergence_tol
        )
        if abs(value) <= config.zero_tol:
            zeros.append(np.outer(a, b).ravel())
    if not zeros:
        return 0, False
    singular = np.linalg.svd(np.array(zeros), compute_uv=False)
    span_dim = int(np.sum(singular > singular[0] * 1e-8))
    return span_dim, span_dim == d.total
