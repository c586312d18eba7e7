#!/usr/bin/env python3
"""
Posmap Maps - elementary operators in signed Kraus form

This module provides:
- ElementaryOperator: X -> sum A_i X A_i^dagger - sum C_j X C_j^dagger
- Choi matrices and complete-positivity verdicts
- A sampling falsifier for positivity (one-sided: it only certifies NON-positivity)
- Local and global contraction checks on the Kraus coefficients
- Quick CP-if-positive / NCP filters
- Compression to subspaces
- The catalog: transpose, reduction, delta-t, diagonal-family, gamma, gamma-prime

Coefficient convention: C_j psi = sum_i omega_ji A_i psi, so Omega is l x k and
multiplies the stacked A-column from the left; least squares solves for Omega^T.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Literal, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, FiniteFloat

from src.posmap.config import DEFAULT_SAMPLES, DEFAULT_SEED, DEFAULT_TOL, DISAGREEMENT_SLACK, FILTER_SAMPLES
from src.posmap.errors import LinalgError, MapError
from src.posmap.linalg import as_matrix, haar_vectors, hermitian_eig, is_psd, matrix_unit, operator_norm, range_basis


logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ElementaryOperator:
    """Hermitian-preserving map given by a plus and a minus Kraus family"""
    dim_in: int
    dim_out: int
    plus_kraus: Tuple[np.ndarray, ...]
    minus_kraus: Tuple[np.ndarray, ...] = ()
    label: str = "map"

    def __post_init__(self):
        if int(self.dim_in) < 1 or int(self.dim_out) < 1:
            raise MapError(f"dimensions must be positive, got dim_in={self.dim_in}, dim_out={self.dim_out}")
        expected = (int(self.dim_out), int(self.dim_in))
        families = []
        for family_name, family in (("plus_kraus", self.plus_kraus), ("minus_kraus", self.minus_kraus)):
            converted = []
            for index, kraus in enumerate(family):
                try:
                    matrix = as_matrix(kraus, f"{family_name}[{index}]")
                except LinalgError as e:
                    raise MapError(str(e))
                if matrix.shape != expected:
                    raise MapError(f"{family_name}[{index}] has shape {matrix.shape}, expected {expected}")
                matrix.flags.writeable = False
                converted.append(matrix)
            families.append(tuple(converted))
        object.__setattr__(self, "dim_in", int(self.dim_in))
        object.__setattr__(self, "dim_out", int(self.dim_out))
        object.__setattr__(self, "plus_kraus", families[0])
        object.__setattr__(self, "minus_kraus", families[1])

    @classmethod
    def from_kraus(cls, plus_kraus: Sequence, minus_kraus: Sequence = (), label: str = "map") -> "ElementaryOperator":
        """Build an operator inferring its dimensions from the first Kraus matrix"""
        first = list(plus_kraus) + list(minus_kraus)
        if not first:
            raise MapError("cannot infer dimensions from empty Kraus families")
        shape = np.shape(first[0])
        if len(shape) != 2:
            raise MapError(f"Kraus matrices must be 2-dimensional, got shape {shape}")
        return cls(dim_in=shape[1], dim_out=shape[0], plus_kraus=tuple(plus_kraus),
                   minus_kraus=tuple(minus_kraus), label=label)

    @property
    def k(self) -> int:
        return len(self.plus_kraus)

    @property
    def l(self) -> int:
        return len(self.minus_kraus)

    def stacked(self, family: str) -> np.ndarray:
        """Kraus family as a (count, dim_out, dim_in) array"""
        kraus = self.plus_kraus if family == "plus" else self.minus_kraus
        if not kraus:
            return np.zeros((0, self.dim_out, self.dim_in), dtype=np.complex128)
        return np.array(kraus)


class CpCheck(NamedTuple):
    is_cp: bool
    min_choi_eigenvalue: float


@dataclass(frozen=True)
class FalsifierResult:
    """Outcome of positivity sampling; a witness proves the map is not positive"""
    witness: Optional[np.ndarray]
    min_eigenvalue: float
    sample_index: Optional[int]
    samples_checked: int

    @property
    def found(self) -> bool:
        return self.witness is not None


@dataclass(frozen=True)
class LocalCoefficientResult:
    """Coefficient matrix Omega (l x k) solving C = Omega A, with its contraction verdict"""
    feasible: bool
    omega: Optional[np.ndarray]
    operator_norm: Optional[float]
    residual: float
    unique: bool
    psd_min_eigenvalue: Optional[float] = None


@dataclass(frozen=True)
class NcpFilterReport:
    """Which cheap structural CP / NCP conditions apply to a map"""
    plus_count: int
    minus_count: int
    span_dimension: int
    few_plus_terms: bool
    small_span: bool
    independent_vector_found: bool
    ncp_possible: bool
    non_contractive_minus: Tuple[int, ...] = field(default_factory=tuple)

    @property
    def cp_if_positive(self) -> bool:
        """Positivity would already imply complete positivity"""
        return self.few_plus_terms or self.small_span or self.independent_vector_found

    @property
    def not_cp_certified(self) -> bool:
        return bool(self.non_contractive_minus)

    def summary(self) -> List[str]:
        lines = [
            f"plus terms k = {self.plus_count}, minus terms l = {self.minus_count}, span dimension = {self.span_dimension}",
            f"k <= 2 (positive implies CP): {'yes' if self.few_plus_terms else 'no'}",
            f"span <= 2 (positive implies CP): {'yes' if self.small_span else 'no'}",
            f"some psi with A_i psi independent (positive implies CP): {'yes' if self.independent_vector_found else 'no'}",
            f"k >= 3 and span >= 3 (NCP not excluded): {'yes' if self.ncp_possible else 'no'}",
        ]
        if self.non_contractive_minus:
            indices = ", ".join(str(j) for j in self.non_contractive_minus)
            lines.append(f"minus terms not a contractive combination (not CP): {indices}")
        return lines


class FilterSummary(BaseModel):
    plus_count: int
    minus_count: int
    span_dimension: int
    cp_if_positive: bool
    ncp_possible: bool
    non_contractive_minus: List[int]


class PositivitySummary(BaseModel):
    falsified: bool
    min_eigenvalue: FiniteFloat
    samples_checked: int


class ChoiReport(BaseModel):
    """CP verdict of one map with its filters and, when not CP, the falsifier outcome"""
    map_label: str
    dim_in: int
    dim_out: int
    min_choi_eigenvalue: FiniteFloat
    verdict: Literal["cp", "not-cp"]
    channel_kind: Optional[str] = None
    filters: FilterSummary
    positivity: Optional[PositivitySummary] = None


def choi_report(phi: ElementaryOperator, check: CpCheck, filters: NcpFilterReport,
                falsifier: Optional[FalsifierResult] = None, channel_kind: Optional[str] = None) -> ChoiReport:
    return ChoiReport(
        map_label=phi.label,
        dim_in=phi.dim_in,
        dim_out=phi.dim_out,
        min_choi_eigenvalue=check.min_choi_eigenvalue,
        verdict="cp" if check.is_cp else "not-cp",
        channel_kind=channel_kind,
        filters=FilterSummary(plus_count=filters.plus_count, minus_count=filters.minus_count,
                              span_dimension=filters.span_dimension, cp_if_positive=filters.cp_if_positive,
                              ncp_possible=filters.ncp_possible,
                              non_contractive_minus=list(filters.non_contractive_minus)),
        positivity=None if falsifier is None else PositivitySummary(
            falsified=falsifier.found, min_eigenvalue=falsifier.min_eigenvalue,
            samples_checked=falsifier.samples_checked),
    )


def apply(phi: ElementaryOperator, x: np.ndarray) -> np.ndarray:
    """
    Evaluate sum A_i X A_i^dagger - sum C_j X C_j^dagger

    Args:
        phi: Elementary operator
        x: dim_in x dim_in matrix

    Returns:
        dim_out x dim_out matrix
    """
    x = as_matrix(x, "map input")
    if x.shape != (phi.dim_in, phi.dim_in):
        raise MapError(f"{phi.label} expects a {phi.dim_in}x{phi.dim_in} input, got {x.shape}")
    plus = phi.stacked("plus")
    minus = phi.stacked("minus")
    return (np.einsum('kab,bc,kdc->ad', plus, x, plus.conj())
            - np.einsum('kab,bc,kdc->ad', minus, x, minus.conj()))


def choi_matrix(phi: ElementaryOperator) -> np.ndarray:
    """Choi matrix sum_ij E_ij (x) phi(E_ij), of size dim_in*dim_out"""
    n, m = phi.dim_in, phi.dim_out
    choi = np.zeros((n * m, n * m), dtype=np.complex128)
    for i in range(n):
        for j in range(n):
            choi[i * m:(i + 1) * m, j * m:(j + 1) * m] = apply(phi, matrix_unit(n, i, j))
    return choi


def is_completely_positive(phi: ElementaryOperator, tol: float = DEFAULT_TOL) -> CpCheck:
    """CP verdict from the positivity of the Choi matrix"""
    check = is_psd(choi_matrix(phi), tol)
    return CpCheck(check.is_psd, check.min_eigenvalue)


def _outputs_on_vectors(phi: ElementaryOperator, vectors: np.ndarray) -> np.ndarray:
    """phi(psi psi^dagger) for each row psi of vectors, as a (count, dim_out, dim_out) array"""
    plus_images = np.einsum('kab,sb->ska', phi.stacked("plus"), vectors)
    minus_images = np.einsum('kab,sb->ska', phi.stacked("minus"), vectors)
    return (np.einsum('ska,skd->sad', plus_images, plus_images.conj())
            - np.einsum('ska,skd->sad', minus_images, minus_images.conj()))


def positivity_falsifier(phi: ElementaryOperator, samples: int = DEFAULT_SAMPLES, seed: int = DEFAULT_SEED,
                         tol: float = DEFAULT_TOL, witnesses: Optional[Sequence] = None,
                         batch_size: int = 2048) -> FalsifierResult:
    """
    Search for a unit vector psi with phi(psi psi^dagger) not PSD

    Caller-supplied witnesses are tried first, then `samples` Haar vectors drawn
    from `seed`. The first vector (in that order) whose output has an eigenvalue
    below -tol is returned. No witness is evidence of positivity, not proof.

    Args:
        phi: Map under test
        samples: Number of Haar-random vectors
        seed: Seed of the sampler
        tol: Negative-eigenvalue tolerance
        witnesses: Optional candidate vectors (normalized here)
        batch_size: Vectors evaluated per vectorized batch

    Returns:
        FalsifierResult with the witness or the smallest eigenvalue seen
    """
    if samples < 0:
        raise MapError(f"samples must be >= 0, got {samples}")
    if samples == 0 and (witnesses is None or len(witnesses) == 0):
        raise MapError("positivity falsifier needs at least one sample or witness vector")
    candidates = []
    if witnesses is not None and len(witnesses) > 0:
        supplied = np.array([np.asarray(w, dtype=np.complex128).ravel() for w in witnesses])
        if supplied.shape[1] != phi.dim_in:
            raise MapError(f"witness vectors must have length {phi.dim_in}")
        candidates.append(supplied / np.linalg.norm(supplied, axis=1, keepdims=True))
    rng = np.random.default_rng(seed)
    remaining = samples
    while remaining > 0:
        size = min(batch_size, remaining)
        candidates.append(haar_vectors(rng, size, phi.dim_in))
        remaining -= size

    lowest = np.inf
    offset = 0
    for batch in candidates:
        minima = np.linalg.eigvalsh(_outputs_on_vectors(phi, batch))[:, 0]
        hits = np.flatnonzero(minima < -tol)
        if hits.size:
            first = int(hits[0])
            logger.info(f"✓ {phi.label} is not positive: sample {offset + first} gives eigenvalue {minima[first]:.6e}")
            return FalsifierResult(witness=batch[first].copy(), min_eigenvalue=float(minima[first]),
                                   sample_index=offset + first, samples_checked=offset + first + 1)
        lowest = min(lowest, float(minima.min()))
        offset += batch.shape[0]
    logger.debug(f"{phi.label}: no positivity witness in {offset} samples (lowest eigenvalue {lowest:.3e})")
    return FalsifierResult(witness=None, min_eigenvalue=lowest, sample_index=None, samples_checked=offset)


def _solve_coefficients(basis: np.ndarray, targets: np.ndarray, tol: float):
    """
    Minimum-norm least squares for targets = basis @ Omega^T

    Returns:
        (omega, operator norm, residual, rank, target scale)
    """
    k = basis.shape[1]
    l = targets.shape[1]
    scale = max(1.0, float(np.linalg.norm(targets)))
    if k == 0:
        return np.zeros((l, 0), dtype=np.complex128), 0.0, float(np.linalg.norm(targets)), 0, scale
    rank = int(np.linalg.matrix_rank(basis))
    if l == 0:
        return np.zeros((0, k), dtype=np.complex128), 0.0, 0.0, rank, scale
    solution, _, _, _ = np.linalg.lstsq(basis, targets, rcond=None)
    residual = float(np.linalg.norm(basis @ solution - targets))
    omega = solution.T
    return omega, operator_norm(omega), residual, rank, scale


def _coefficient_result(omega, norm, residual, rank, scale, k, tol, psd_min=None) -> LocalCoefficientResult:
    solvable = residual <= tol * scale
    feasible = solvable and norm <= 1 + tol
    return LocalCoefficientResult(feasible=feasible,
                                  omega=omega if solvable else None,
                                  operator_norm=norm if solvable else None,
                                  residual=residual,
                                  unique=rank == k,
                                  psd_min_eigenvalue=psd_min)


def local_combination_check(phi: ElementaryOperator, psi: Sequence, tol: float = DEFAULT_TOL) -> LocalCoefficientResult:
    """
    Is (C_j psi) a contractive combination of (A_i psi)?

    Solves M_C = M_A Omega^T with M_A = [A_1 psi ... A_k psi] and M_C = [C_1 psi ... C_l psi]
    using the pseudoinverse, then cross-checks against PSD-ness of phi(psi psi^dagger).

    Args:
        phi: Elementary operator
        psi: Unit vector of length dim_in
        tol: Residual, contraction and PSD tolerance

    Returns:
        LocalCoefficientResult including the PSD cross-check eigenvalue
    """
    vector = np.asarray(psi, dtype=np.complex128).ravel()
    if vector.shape[0] != phi.dim_in:
        raise MapError(f"psi must have length {phi.dim_in}, got {vector.shape[0]}")
    if abs(np.linalg.norm(vector) - 1.0) > tol:
        raise MapError(f"psi must be a unit vector, norm is {np.linalg.norm(vector):.12g}")

    plus_columns = np.einsum('kab,b->ak', phi.stacked("plus"), vector)
    minus_columns = np.einsum('kab,b->ak', phi.stacked("minus"), vector)
    omega, norm, residual, rank, scale = _solve_coefficients(plus_columns, minus_columns, tol)
    output = plus_columns @ plus_columns.conj().T - minus_columns @ minus_columns.conj().T
    psd = is_psd(output, tol)
    result = _coefficient_result(omega, norm, residual, rank, scale, phi.k, tol, psd.min_eigenvalue)

    if result.feasible != psd.is_psd:
        slack = DISAGREEMENT_SLACK * tol
        loosely_feasible = residual <= DISAGREEMENT_SLACK * tol * scale and norm <= 1 + slack
        loosely_psd = psd.min_eigenvalue >= -slack
        if (result.feasible and not loosely_psd) or (psd.is_psd and not loosely_feasible):
            logger.error(f"{phi.label}: contraction verdict {result.feasible} disagrees with PSD check "
                         f"(norm {norm:.6e}, residual {residual:.3e}, min eigenvalue {psd.min_eigenvalue:.6e})")
            raise MapError(f"local coefficient verdict disagrees with the PSD check for {phi.label}: "
                           f"norm {norm:.6e}, min eigenvalue {psd.min_eigenvalue:.6e}")
    return result


def contractive_linear_combination_check(phi: ElementaryOperator, tol: float = DEFAULT_TOL) -> LocalCoefficientResult:
    """
    Is each C_j = sum_i omega_ji A_i with ||Omega|| <= 1?

    Kraus matrices are stacked as vectors of length dim_in*dim_out. The
    pseudoinverse solution is also the minimum operator-norm solution, so the
    verdict is definitive; `unique` tells whether the plus family is independent.
    """
    size = phi.dim_in * phi.dim_out
    plus_vectors = phi.stacked("plus").reshape(phi.k, size).T
    minus_vectors = phi.stacked("minus").reshape(phi.l, size).T
    omega, norm, residual, rank, scale = _solve_coefficients(plus_vectors, minus_vectors, tol)
    return _coefficient_result(omega, norm, residual, rank, scale, phi.k, tol)


def ncp_quick_filters(phi: ElementaryOperator, samples: int = FILTER_SAMPLES, seed: int = DEFAULT_SEED,
                      tol: float = DEFAULT_TOL) -> NcpFilterReport:
    """
    Cheap structural conditions for "positive implies CP" and for "not CP"

    Filters:
        k <= 2, or span of the plus family <= 2: positive implies CP
        some sampled psi with {A_i psi} linearly independent: positive implies CP
        k >= 3 and span >= 3: necessary for positive-but-not-CP
        a single C_j that is not a contractive combination of the A_i: not CP
    """
    size = phi.dim_in * phi.dim_out
    plus_vectors = phi.stacked("plus").reshape(phi.k, size).T
    span = int(np.linalg.matrix_rank(plus_vectors)) if phi.k else 0

    independent = False
    if 0 < phi.k <= phi.dim_out:
        rng = np.random.default_rng(seed)
        for vector in haar_vectors(rng, samples, phi.dim_in):
            columns = np.einsum('kab,b->ak', phi.stacked("plus"), vector)
            if np.linalg.matrix_rank(columns) == phi.k:
                independent = True
                break

    offenders = []
    for j, minus in enumerate(phi.minus_kraus):
        target = minus.reshape(size, 1)
        omega, norm, residual, _, scale = _solve_coefficients(plus_vectors, target, tol)
        if residual > tol * scale or norm > 1 + tol:
            offenders.append(j)

    report = NcpFilterReport(plus_count=phi.k, minus_count=phi.l, span_dimension=span,
                             few_plus_terms=phi.k <= 2, small_span=span <= 2,
                             independent_vector_found=independent,
                             ncp_possible=phi.k >= 3 and span >= 3,
                             non_contractive_minus=tuple(offenders))
    logger.debug(f"{phi.label} filters: {report}")
    return report


def compress(phi: ElementaryOperator, p: np.ndarray, q: np.ndarray, tol: float = DEFAULT_TOL) -> ElementaryOperator:
    """
    Restrict phi to X -> Q phi(P X P) Q on the ranges of P and Q

    Kraus matrices become V_Q^dagger A V_P where V_P, V_Q are the orthonormal
    range bases returned by linalg.range_basis (standard vectors for diagonal
    projections). Those bases are the coordinate maps of the compressed operator:
    for V_P = range_basis(p, tol) and V_Q = range_basis(q, tol),

        apply(compress(phi, p, q), V_P^dagger X V_P) == V_Q^dagger phi(P X P) V_Q

    Args:
        phi: Elementary operator
        p: Orthogonal projection on the input space
        q: Orthogonal projection on the output space
        tol: Projection tolerance

    Returns:
        Compressed operator of dimensions rank(P) -> rank(Q)
    """
    p = as_matrix(p, "P")
    q = as_matrix(q, "Q")
    if p.shape != (phi.dim_in, phi.dim_in) or q.shape != (phi.dim_out, phi.dim_out):
        raise MapError(f"projections must be {phi.dim_in}x{phi.dim_in} and {phi.dim_out}x{phi.dim_out}")
    try:
        basis_in = range_basis(p, tol)
        basis_out = range_basis(q, tol)
    except LinalgError as e:
        logger.error(f"Failed to compress {phi.label}: {str(e)}")
        raise MapError(f"compression needs orthogonal projections: {str(e)}")
    if basis_in.shape[1] == 0 or basis_out.shape[1] == 0:
        raise MapError("compression onto a zero subspace")
    return ElementaryOperator(
        dim_in=basis_in.shape[1],
        dim_out=basis_out.shape[1],
        plus_kraus=tuple(basis_out.conj().T @ a @ basis_in for a in phi.plus_kraus),
        minus_kraus=tuple(basis_out.conj().T @ c @ basis_in for c in phi.minus_kraus),
        label=f"{phi.label}|compressed",
    )


def canonical_form(phi: ElementaryOperator, tol: float = DEFAULT_TOL) -> ElementaryOperator:
    """
    Equivalent operator with linearly independent plus and minus families

    Read off the Choi eigendecomposition: each eigenvalue lambda with eigenvector v
    contributes sqrt(|lambda|) * unvec(v) to the plus (lambda > 0) or minus family.
    A CP map comes back with an empty minus family.
    """
    choi = choi_matrix(phi)
    spectrum = hermitian_eig(choi, tol)
    cutoff = tol * max(1.0, float(np.max(np.abs(spectrum.values), initial=0.0)))
    plus, minus = [], []
    for value, vector in zip(spectrum.values, spectrum.vectors.T):
        if abs(value) <= cutoff:
            continue
        kraus = np.sqrt(abs(value)) * vector.reshape(phi.dim_in, phi.dim_out).T
        (plus if value > 0 else minus).append(kraus)
    if not plus and not minus:
        plus.append(np.zeros((phi.dim_out, phi.dim_in), dtype=np.complex128))
    return ElementaryOperator(dim_in=phi.dim_in, dim_out=phi.dim_out, plus_kraus=tuple(plus),
                              minus_kraus=tuple(minus), label=f"{phi.label}|canonical")


def identity_map(n: int) -> ElementaryOperator:
    return ElementaryOperator(dim_in=n, dim_out=n, plus_kraus=(np.eye(n),), label="identity")


def transpose_map(n: int) -> ElementaryOperator:
    """
    T -> T^t as sum E_ii T E_ii + sum_{i<j} A_ij T A_ij^dagger - sum_{i<j} C_ij T C_ij^dagger

    A_ij = (E_ij + E_ji)/sqrt(2), C_ij = (E_ij - E_ji)/sqrt(2).
    """
    if n < 2:
        _reject(f"transpose map needs n >= 2, got {n}")
    plus = [matrix_unit(n, i, i) for i in range(n)]
    minus = []
    for i in range(n):
        for j in range(i + 1, n):
            plus.append((matrix_unit(n, i, j) + matrix_unit(n, j, i)) / np.sqrt(2))
            minus.append((matrix_unit(n, i, j) - matrix_unit(n, j, i)) / np.sqrt(2))
    logger.info(f"✓ Built transpose map for n={n}")
    return ElementaryOperator(dim_in=n, dim_out=n, plus_kraus=tuple(plus), minus_kraus=tuple(minus),
                              label="transpose")


def reduction_map(n: int) -> ElementaryOperator:
    """
    T -> Tr(T) I - T

    Plus family: E_ij (i != j) and G_ij = (E_ii - E_jj)/sqrt(2); minus family
    F_ij = (E_ii + E_jj)/sqrt(2), both over pairs i < j.
    """
    if n < 2:
        _reject(f"reduction map needs n >= 2, got {n}")
    plus = [matrix_unit(n, i, j) for i in range(n) for j in range(n) if i != j]
    minus = []
    for i in range(n):
        for j in range(i + 1, n):
            plus.append((matrix_unit(n, i, i) - matrix_unit(n, j, j)) / np.sqrt(2))
            minus.append((matrix_unit(n, i, i) + matrix_unit(n, j, j)) / np.sqrt(2))
    logger.info(f"✓ Built reduction map for n={n}")
    return ElementaryOperator(dim_in=n, dim_out=n, plus_kraus=tuple(plus), minus_kraus=tuple(minus),
                              label="reduction")


def delta_t_map(n: int, t: float) -> ElementaryOperator:
    """X -> t sum_i E_ii X E_ii - X; positive iff CP iff t >= n"""
    if n < 1:
        _reject(f"delta-t map needs n >= 1, got {n}")
    if not t > 0:
        _reject(f"delta-t map needs t > 0, got {t}")
    plus = tuple(np.sqrt(t) * matrix_unit(n, i, i) for i in range(n))
    logger.info(f"✓ Built delta-t map for n={n}, t={t:g}")
    return ElementaryOperator(dim_in=n, dim_out=n, plus_kraus=plus, minus_kraus=(np.eye(n),),
                              label=f"delta-t(t={t:g})")


def _reject(message: str) -> None:
    logger.error(message)
    raise MapError(message)


def _coefficient_matrix(rows: Sequence[Sequence[float]], n: int, family: str) -> np.ndarray:
    """Real rows of exactly n entries, stacked as an (m, n) array"""
    checked = []
    for index, row in enumerate(rows if rows is not None else []):
        try:
            row = np.asarray(row, dtype=np.complex128)
        except (TypeError, ValueError) as e:
            _reject(f"{family} coefficient row {index + 1} is not numeric: {str(e)}")
        if row.ndim != 1 or row.shape[0] != n:
            _reject(f"{family} coefficient row {index + 1} must have {n} entries, got shape {row.shape}")
        if np.any(row.imag != 0):
            _reject(f"diagonal-family coefficients must be real, {family} row {index + 1} is complex")
        checked.append(row.real)
    if not checked:
        return np.zeros((0, n))
    return np.vstack(checked)


def diagonal_family_map(n: int, a: Sequence[Sequence[float]], b: Sequence[Sequence[float]],
                        tol: float = DEFAULT_TOL) -> ElementaryOperator:
    """
    T -> sum_k A_k T A_k^dagger + sum_{i!=j} E_ij T E_ij^dagger - sum_l B_l T B_l^dagger

    A_k = diag(a[k]), B_l = diag(b[l]) with real coefficients. Positivity holds when
    f_ii = sum_k a_ki^2 - sum_l b_li^2 >= 0 and |f_ij| = |sum_k a_ki a_kj - sum_l b_li b_lj| <= 1
    for i != j; the B_l being independent of the plus family makes the map NCP.

    Args:
        n: Dimension
        a: s x n plus coefficients
        b: t x n minus coefficients, t >= 1
        tol: Slack on the inequalities

    Returns:
        The positive, not completely positive operator
    """
    a = _coefficient_matrix(a, n, "plus")
    b = _coefficient_matrix(b, n, "minus")
    s, t = a.shape[0], b.shape[0]
    if t < 1:
        _reject("diagonal-family map needs at least one minus term (t >= 1)")
    if s + t > n:
        _reject(f"diagonal-family map needs s + t <= n, got s={s}, t={t}, n={n}")
    if np.linalg.matrix_rank(np.vstack([a, b])) < s + t:
        _reject("diagonal-family coefficients violate linear independence of {A_k, B_l}")

    f = a.T @ a - b.T @ b
    for i in range(n):
        if f[i, i] < -tol:
            _reject(f"inequality f_{i + 1}{i + 1} = sum a^2 - sum b^2 >= 0 fails: f = {f[i, i]:g}")
    for i in range(n):
        for j in range(i + 1, n):
            if abs(f[i, j]) > 1 + tol:
                _reject(f"inequality |f_{i + 1}{j + 1}| <= 1 fails: |f| = {abs(f[i, j]):g}")

    plus = [np.diag(row).astype(np.complex128) for row in a]
    plus += [matrix_unit(n, i, j) for i in range(n) for j in range(n) if i != j]
    minus = [np.diag(row).astype(np.complex128) for row in b]
    logger.info(f"✓ Built diagonal-family map (n={n}, s={s}, t={t})")
    return ElementaryOperator(dim_in=n, dim_out=n, plus_kraus=tuple(plus), minus_kraus=tuple(minus),
                              label="diagonal-family")


def _gamma_family(cyclic: Sequence[Tuple[int, int]], label: str) -> ElementaryOperator:
    plus = [matrix_unit(3, i, i) for i in range(3)]
    plus += [matrix_unit(3, i, j) for i, j in cyclic]
    minus = []
    for i in range(3):
        for j in range(3):
            if i != j:
                plus.append((matrix_unit(3, i, i) - matrix_unit(3, j, j)) / 2)
                minus.append((matrix_unit(3, i, i) + matrix_unit(3, j, j)) / 2)
    logger.info(f"✓ Built {label} map")
    return ElementaryOperator(dim_in=3, dim_out=3, plus_kraus=tuple(plus), minus_kraus=tuple(minus), label=label)


def gamma_map() -> ElementaryOperator:
    """Indecomposable positive map on 3x3 matrices: diagonal gets a11+a22, a22+a33, a33+a11; off-diagonals negated"""
    return _gamma_family([(0, 1), (1, 2), (2, 0)], "gamma")


def gamma_prime_map() -> ElementaryOperator:
    """Mirror of gamma: diagonal gets a11+a33, a22+a11, a33+a22"""
    return _gamma_family([(1, 0), (2, 1), (0, 2)], "gamma-prime")


def _require_3x3(a) -> np.ndarray:
    a = as_matrix(a, "gamma input")
    if a.shape != (3, 3):
        raise MapError(f"gamma maps act on 3x3 matrices, got {a.shape}")
    return a


def gamma_closed_form(a) -> np.ndarray:
    """Entrywise action of gamma"""
    a = _require_3x3(a)
    out = -a
    out[0, 0] = a[0, 0] + a[1, 1]
    out[1, 1] = a[1, 1] + a[2, 2]
    out[2, 2] = a[2, 2] + a[0, 0]
    return out


def gamma_prime_closed_form(a) -> np.ndarray:
    """Entrywise action of gamma-prime"""
    a = _require_3x3(a)
    out = -a
    out[0, 0] = a[0, 0] + a[2, 2]
    out[1, 1] = a[1, 1] + a[0, 0]
    out[2, 2] = a[2, 2] + a[1, 1]
    return out


BUILTIN_MAPS = ("identity", "transpose", "reduction", "delta-t", "gamma", "gamma-prime", "diagonal-family", "prop51")

MAP_ALIASES = {"prop51": "diagonal-family"}


def builtin_map(name: str, n: Optional[int] = None, t: Optional[float] = None,
                a: Optional[Sequence] = None, b: Optional[Sequence] = None) -> ElementaryOperator:
    """
    Resolve a catalog map by name

    Args:
        name: One of BUILTIN_MAPS
        n: Dimension (identity, transpose, reduction, delta-t, diagonal-family)
        t: Parameter of delta-t
        a: Plus coefficients of diagonal-family
        b: Minus coefficients of diagonal-family

    Returns:
        The catalog operator
    """
    name = MAP_ALIASES.get(name, name)
    if name in ("gamma", "gamma-prime"):
        return gamma_map() if name == "gamma" else gamma_prime_map()
    if name not in BUILTIN_MAPS:
        raise MapError(f"unknown map '{name}', expected one of {', '.join(BUILTIN_MAPS)}")
    if n is None:
        raise MapError(f"map '{name}' needs a dimension n")
    if name == "identity":
        return identity_map(n)
    if name == "transpose":
        return transpose_map(n)
    if name == "reduction":
        return reduction_map(n)
    if name == "delta-t":
        if t is None:
            raise MapError("map 'delta-t' needs a parameter t")
        return delta_t_map(n, t)
    return diagonal_family_map(n, a if a is not None else [], b if b is not None else [])
