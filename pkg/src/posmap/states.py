#!/usr/bin/env python3
"""
Posmap States - bipartite density matrices and separability criteria

This module provides:
- BipartiteState with validated invariants (hermitian, unit trace, PSD)
- Partial transpose, partial trace and realignment
- PPT, realignment and positive-map witness criteria
- The criteria battery and its structured report
- Reference states: the (a, b) PPT family, the gamma-detected state, Bell states
- Seeded random densities and separable states

Index convention: row = i_a * dim_b + i_b, so the first factor indexes blocks.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import List, Literal, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field, model_validator

from src.posmap.config import DEFAULT_SEED, DEFAULT_TOL
from src.posmap.errors import LinalgError, StateError
from src.posmap.linalg import as_matrix, haar_vectors, hermitian_eig, is_psd, trace_norm
from src.posmap.maps import (
    ElementaryOperator,
    gamma_map,
    gamma_prime_map,
    reduction_map,
    transpose_map,
)


logger = logging.getLogger(__name__)


def _invalid(message: str) -> None:
    logger.error(f"Invalid state: {message}")
    raise StateError(message)


class Side(str, Enum):
    LEFT = "left"
    RIGHT = "right"


class Verdict(str, Enum):
    PASS = "pass"
    FAIL = "fail"


@dataclass(frozen=True, eq=False)
class BipartiteState:
    """Density matrix on C^dim_a (x) C^dim_b"""
    dim_a: int
    dim_b: int
    matrix: np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        if int(self.dim_a) < 1 or int(self.dim_b) < 1:
            _invalid(f"factor dimensions must be positive, got {self.dim_a}x{self.dim_b}")
        try:
            matrix = as_matrix(self.matrix, "state matrix")
        except LinalgError as e:
            _invalid(str(e))
        size = int(self.dim_a) * int(self.dim_b)
        if matrix.shape != (size, size):
            _invalid(f"shape invariant violated: expected {size}x{size}, got {matrix.shape}")
        deviation = float(np.max(np.abs(matrix - matrix.conj().T)))
        if deviation > self.tol:
            _invalid(f"hermitian invariant violated: max |rho - rho^dagger| = {deviation:.3e}")
        trace = complex(np.trace(matrix))
        if abs(trace - 1.0) > self.tol:
            _invalid(f"trace invariant violated: trace is {trace.real:.12g}, expected 1")
        check = is_psd(matrix, self.tol)
        if not check.is_psd:
            _invalid(f"positive semidefinite invariant violated: min eigenvalue {check.min_eigenvalue:.6e}")
        matrix.flags.writeable = False
        object.__setattr__(self, "dim_a", int(self.dim_a))
        object.__setattr__(self, "dim_b", int(self.dim_b))
        object.__setattr__(self, "matrix", matrix)

    @property
    def dims(self) -> Tuple[int, int]:
        return self.dim_a, self.dim_b


class CriterionOutcome(NamedTuple):
    passed: bool
    value: float


class PptVerdict(BaseModel):
    min_eigenvalue: float
    verdict: Verdict


class RealignmentVerdict(BaseModel):
    trace_norm: float
    verdict: Verdict


class WitnessVerdict(BaseModel):
    map_label: str
    side: Side
    min_eigenvalue: float
    verdict: Verdict
    spectrum: Optional[List[float]] = None


class CriterionReport(BaseModel):
    """Structured verdicts of the criteria battery for one state"""
    dim_a: int
    dim_b: int
    tol: float
    ppt: PptVerdict
    realignment: RealignmentVerdict
    witnesses: List[WitnessVerdict] = Field(default_factory=list)
    overall: Literal["separable-consistent", "entangled-detected"]

    @model_validator(mode="after")
    def _overall_matches_verdicts(self):
        failed = (self.ppt.verdict == Verdict.FAIL or self.realignment.verdict == Verdict.FAIL
                  or any(w.verdict == Verdict.FAIL for w in self.witnesses))
        expected = "entangled-detected" if failed else "separable-consistent"
        if self.overall != expected:
            raise ValueError(f"overall must be '{expected}' for these verdicts")
        return self

    @property
    def entangled(self) -> bool:
        return self.overall == "entangled-detected"

    def witness(self, label: str) -> WitnessVerdict:
        """Witness verdict by map label"""
        for verdict in self.witnesses:
            if verdict.map_label == label:
                return verdict
        raise KeyError(label)


def _blocks(matrix: np.ndarray, dim_a: int, dim_b: int) -> np.ndarray:
    """View as T[i_a, i_b, j_a, j_b]"""
    return matrix.reshape(dim_a, dim_b, dim_a, dim_b)


def partial_transpose(rho: BipartiteState, side: Side = Side.RIGHT) -> np.ndarray:
    """Transpose the chosen tensor factor"""
    tensor = _blocks(rho.matrix, rho.dim_a, rho.dim_b)
    axes = (0, 3, 2, 1) if Side(side) == Side.RIGHT else (2, 1, 0, 3)
    return tensor.transpose(axes).reshape(rho.matrix.shape)


def partial_trace(rho: BipartiteState, keep: Side = Side.LEFT) -> np.ndarray:
    """Reduced density matrix of the kept factor"""
    tensor = _blocks(rho.matrix, rho.dim_a, rho.dim_b)
    if Side(keep) == Side.LEFT:
        return np.einsum('ikjk->ij', tensor)
    return np.einsum('kikj->ij', tensor)


def realign(rho: BipartiteState) -> np.ndarray:
    """
    Realignment matrix of size dim_a^2 x dim_b^2

    Block (i, j) of rho (size dim_b) is flattened row-major into row i*dim_a + j:
    R[i*dim_a + j, k*dim_b + l] = rho[i*dim_b + k, j*dim_b + l].
    """
    tensor = _blocks(rho.matrix, rho.dim_a, rho.dim_b)
    return tensor.transpose(0, 2, 1, 3).reshape(rho.dim_a ** 2, rho.dim_b ** 2)


def is_ppt(rho: BipartiteState, tol: float = DEFAULT_TOL) -> CriterionOutcome:
    """PSD check of the partial transpose on the right factor; failure certifies entanglement"""
    check = is_psd(partial_transpose(rho, Side.RIGHT), tol)
    return CriterionOutcome(check.is_psd, check.min_eigenvalue)


def realignment_criterion(rho: BipartiteState, tol: float = DEFAULT_TOL) -> CriterionOutcome:
    """Trace norm of the realigned state; above 1 + tol certifies entanglement"""
    norm = trace_norm(realign(rho))
    return CriterionOutcome(norm <= 1 + tol, norm)


def apply_to_factor(matrix: np.ndarray, dim_a: int, dim_b: int, phi: ElementaryOperator,
                    side: Side = Side.RIGHT) -> np.ndarray:
    """
    (I (x) phi) or (phi (x) I) applied to any operator on C^dim_a (x) C^dim_b

    Args:
        matrix: (dim_a*dim_b) square operator, normalized or not
        dim_a: First factor dimension
        dim_b: Second factor dimension
        phi: Map acting on the chosen factor
        side: RIGHT acts on the second factor, LEFT on the first

    Returns:
        Operator whose acted factor has dimension phi.dim_out
    """
    side = Side(side)
    acted = dim_b if side == Side.RIGHT else dim_a
    if acted != phi.dim_in:
        raise StateError(f"{phi.label} acts on dimension {phi.dim_in}, but the {side.value} factor has dimension {acted}")
    tensor = _blocks(as_matrix(matrix, "operator"), dim_a, dim_b)
    plus, minus = phi.stacked("plus"), phi.stacked("minus")
    if side == Side.RIGHT:
        pattern = 'kab,ibjc,kdc->iajd'
        shape = dim_a * phi.dim_out
    else:
        pattern = 'kax,xiyj,kdy->aidj'
        shape = phi.dim_out * dim_b
    result = np.einsum(pattern, plus, tensor, plus.conj()) - np.einsum(pattern, minus, tensor, minus.conj())
    return result.reshape(shape, shape)


def apply_map_side(rho: BipartiteState, phi: ElementaryOperator, side: Side = Side.RIGHT) -> np.ndarray:
    """Apply phi blockwise to the chosen factor of a state"""
    return apply_to_factor(rho.matrix, rho.dim_a, rho.dim_b, phi, side)


def map_witness_test(rho: BipartiteState, phi: ElementaryOperator, side: Side = Side.RIGHT,
                     tol: float = DEFAULT_TOL, spectrum: bool = False) -> WitnessVerdict:
    """
    Positive-map criterion: a negative eigenvalue of the mapped state certifies entanglement

    phi must be a positive map for a failure to mean anything; that is the caller's
    responsibility.
    """
    side = Side(side)
    values = hermitian_eig(apply_map_side(rho, phi, side), tol).values
    min_eigenvalue = float(values[0])
    verdict = Verdict.FAIL if min_eigenvalue < -tol else Verdict.PASS
    logger.debug(f"{phi.label} ({side.value}) witness: min eigenvalue {min_eigenvalue:.6e} -> {verdict.value}")
    return WitnessVerdict(map_label=phi.label, side=side, min_eigenvalue=min_eigenvalue, verdict=verdict,
                          spectrum=[float(v) for v in values] if spectrum else None)


def default_battery(dim_a: int, dim_b: int) -> List[Tuple[ElementaryOperator, Side]]:
    """gamma, gamma-prime, transpose, reduction on 3x3; transpose and reduction otherwise"""
    if dim_b < 2:
        return []
    battery = []
    if dim_b == 3:
        battery += [(gamma_map(), Side.RIGHT), (gamma_prime_map(), Side.RIGHT)]
    battery += [(transpose_map(dim_b), Side.RIGHT), (reduction_map(dim_b), Side.RIGHT)]
    return battery


def run_battery(rho: BipartiteState, maps: Optional[Sequence[Tuple[ElementaryOperator, Side]]] = None,
                tol: float = DEFAULT_TOL) -> CriterionReport:
    """
    PPT, realignment and every witness map on one state

    Args:
        rho: State under test
        maps: (map, side) pairs; default_battery when None
        tol: Tolerance of every criterion

    Returns:
        CriterionReport
    """
    if maps is None:
        maps = default_battery(rho.dim_a, rho.dim_b)
    ppt = is_ppt(rho, tol)
    realignment = realignment_criterion(rho, tol)
    witnesses = [map_witness_test(rho, phi, side, tol) for phi, side in maps]
    failed = not ppt.passed or not realignment.passed or any(w.verdict == Verdict.FAIL for w in witnesses)
    report = CriterionReport(
        dim_a=rho.dim_a,
        dim_b=rho.dim_b,
        tol=tol,
        ppt=PptVerdict(min_eigenvalue=ppt.value, verdict=Verdict.PASS if ppt.passed else Verdict.FAIL),
        realignment=RealignmentVerdict(trace_norm=realignment.value,
                                       verdict=Verdict.PASS if realignment.passed else Verdict.FAIL),
        witnesses=witnesses,
        overall="entangled-detected" if failed else "separable-consistent",
    )
    logger.info(f"✓ Battery on {rho.dim_a}x{rho.dim_b} state: {report.overall}")
    return report


@dataclass(frozen=True)
class MixingThreshold:
    """Largest weight eps of sigma in (1-eps) rho + eps sigma still detected by the witness"""
    epsilon: float
    detected_min_eigenvalue: float
    undetected_min_eigenvalue: float


def mixing_threshold(rho: BipartiteState, sigma: BipartiteState, phi: ElementaryOperator,
                     side: Side = Side.RIGHT, tol: float = DEFAULT_TOL, iterations: int = 60) -> MixingThreshold:
    """
    Bisect the detection threshold of a witness along the segment from rho to sigma

    Args:
        rho: State detected by phi
        sigma: State not detected by phi (e.g. separable)
        phi: Positive map used as witness
        side: Factor phi acts on
        tol: Witness tolerance
        iterations: Bisection steps

    Returns:
        MixingThreshold with the bracket's eigenvalues
    """
    if rho.dims != sigma.dims:
        raise StateError(f"cannot mix states of dimensions {rho.dims} and {sigma.dims}")

    def lowest(eps: float) -> float:
        mixed = (1 - eps) * rho.matrix + eps * sigma.matrix
        return float(hermitian_eig(apply_to_factor(mixed, rho.dim_a, rho.dim_b, phi, side), tol).values[0])

    low, high = 0.0, 1.0
    low_value, high_value = lowest(low), lowest(high)
    if low_value >= -tol:
        raise StateError(f"{phi.label} does not detect the starting state")
    if high_value < -tol:
        raise StateError(f"{phi.label} also detects the mixing partner")
    for _ in range(iterations):
        middle = (low + high) / 2
        value = lowest(middle)
        if value < -tol:
            low, low_value = middle, value
        else:
            high, high_value = middle, value
    return MixingThreshold(epsilon=low, detected_min_eigenvalue=low_value, undetected_min_eigenvalue=high_value)


def ppt_entangled_operator(a: float, b: float) -> np.ndarray:
    """
    Unnormalized 9x9 operator rho_0(a, b) on C^3 (x) C^3

    Ones on the {|00>, |11>, |22>} block, diagonal (1, a, b, b, 1, a, a, b, 1) and
    unit couplings between |01>,|10>; |02>,|20>; |12>,|21>.
    """
    if not (a > 0 and b > 0):
        raise StateError(f"parameters must be positive, got a={a}, b={b}")
    rho = np.diag([1, a, b, b, 1, a, a, b, 1]).astype(np.complex128)
    for i in (0, 4, 8):
        for j in (0, 4, 8):
            rho[i, j] = 1.0
    for i, j in ((1, 3), (2, 6), (5, 7)):
        rho[i, j] = rho[j, i] = 1.0
    return rho


def ppt_entangled_state(a: float, b: float, tol: float = DEFAULT_TOL) -> BipartiteState:
    """
    rho_0(a, b) / (3 (1 + a + b)), PPT and invariant under partial transpose

    gamma detects it for a < 1, gamma-prime for b < 1. Positivity needs ab >= 1 and is
    verified per instance.
    """
    if a == 1:
        raise StateError("parameter a must differ from 1")
    matrix = ppt_entangled_operator(a, b) / (3 * (1 + a + b))
    return BipartiteState(dim_a=3, dim_b=3, matrix=matrix, tol=tol)


def gamma_detected_state() -> BipartiteState:
    """
    PPT state on C^3 (x) C^3 detected by gamma, entries in {0, 0.99, 1.01, 63}/195

    (I (x) gamma) of it has spectrum {-2, 301, 301, 6201, 6401, 6401, 6401, 6498, 6498}/19500.
    """
    rho = np.diag([0.99, 63, 1.01, 1.01, 0.99, 63, 63, 1.01, 0.99]).astype(np.complex128)
    for group, weight in (((0, 4, 8), 0.99), ((2, 3, 7), 1.01)):
        for i in group:
            for j in group:
                rho[i, j] = weight
    return BipartiteState(dim_a=3, dim_b=3, matrix=rho / 195)


def maximally_entangled_state(d: int) -> BipartiteState:
    """|Phi+><Phi+| with |Phi+> = sum_i |ii> / sqrt(d)"""
    vector = np.eye(d, dtype=np.complex128).reshape(d * d) / np.sqrt(d)
    return BipartiteState(dim_a=d, dim_b=d, matrix=np.outer(vector, vector.conj()))


def bell_state() -> BipartiteState:
    return maximally_entangled_state(2)


def product_state(rho_a: np.ndarray, rho_b: np.ndarray, tol: float = DEFAULT_TOL) -> BipartiteState:
    rho_a = as_matrix(rho_a, "first factor")
    rho_b = as_matrix(rho_b, "second factor")
    return BipartiteState(dim_a=rho_a.shape[0], dim_b=rho_b.shape[0], matrix=np.kron(rho_a, rho_b), tol=tol)


def random_density(dim: int, seed: int = DEFAULT_SEED, rank: Optional[int] = None) -> np.ndarray:
    """
    G G^dagger / Tr(G G^dagger) for a seeded complex Gaussian G (dim x rank)

    Args:
        dim: Dimension, >= 1
        seed: Seed or numpy Generator
        rank: Columns of G; full rank by default

    Returns:
        Density matrix
    """
    if dim < 1:
        raise StateError(f"dimension must be positive, got {dim}")
    rng = np.random.default_rng(seed)
    columns = dim if rank is None else rank
    g = rng.standard_normal((dim, columns)) + 1j * rng.standard_normal((dim, columns))
    gram = g @ g.conj().T
    return gram / np.trace(gram).real


def random_separable(dim_a: int, dim_b: int, terms: int = 1, seed: int = DEFAULT_SEED,
                     factors: Literal["pure", "mixed"] = "pure") -> BipartiteState:
    """
    Seeded convex combination sum_i p_i rho_i (x) sigma_i

    Args:
        dim_a: First factor dimension
        dim_b: Second factor dimension
        terms: Number of product terms, >= 1
        seed: Seed of every random draw
        factors: "pure" for Haar pure factors, "mixed" for full-rank Wishart factors

    Returns:
        Separable BipartiteState
    """
    if terms < 1:
        raise StateError(f"terms must be >= 1, got {terms}")
    if factors not in ("pure", "mixed"):
        raise StateError(f"factors must be 'pure' or 'mixed', got {factors}")
    rng = np.random.default_rng(seed)
    weights = rng.dirichlet(np.ones(terms))
    matrix = np.zeros((dim_a * dim_b, dim_a * dim_b), dtype=np.complex128)
    for weight in weights:
        if factors == "pure":
            u = haar_vectors(rng, 1, dim_a)[0]
            v = haar_vectors(rng, 1, dim_b)[0]
            first, second = np.outer(u, u.conj()), np.outer(v, v.conj())
        else:
            first, second = random_density(dim_a, rng), random_density(dim_b, rng)
        matrix += weight * np.kron(first, second)
    return BipartiteState(dim_a=dim_a, dim_b=dim_b, matrix=matrix)
