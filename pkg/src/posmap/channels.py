#!/usr/bin/env python3
"""
Posmap Channels - Kraus-form quantum channels

E(rho) = sum M_i rho M_i^dagger with sum M_i^dagger M_i = I (trace-preserving)
or <= I (trace-nonincreasing). The kind is audited from the Kraus family, never declared.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence, Tuple

import numpy as np

from src.posmap.config import DEFAULT_SEED, DEFAULT_TOL
from src.posmap.errors import ChannelError, LinalgError
from src.posmap.linalg import as_matrix, is_psd, matrix_unit
from src.posmap.maps import ElementaryOperator


logger = logging.getLogger(__name__)


class ChannelKind(str, Enum):
    TRACE_PRESERVING = "trace-preserving"
    TRACE_NONINCREASING = "trace-nonincreasing"


def _kraus_gram(kraus: Sequence[np.ndarray]) -> np.ndarray:
    stacked = np.stack(kraus)
    return np.einsum('kab,kac->bc', stacked.conj(), stacked)


def _classify(kraus: Sequence[np.ndarray], tol: float) -> ChannelKind:
    gram = _kraus_gram(kraus)
    identity = np.eye(gram.shape[0])
    if np.max(np.abs(gram - identity)) <= tol:
        return ChannelKind.TRACE_PRESERVING
    check = is_psd(identity - gram, tol)
    if check.is_psd:
        return ChannelKind.TRACE_NONINCREASING
    raise ChannelError(f"not a channel: sum M^dagger M exceeds the identity by {-check.min_eigenvalue:.3e}")


@dataclass(frozen=True, eq=False)
class QuantumChannel:
    """Completely positive, trace-nonincreasing map in Kraus form"""
    dim_in: int
    dim_out: int
    kraus: Tuple[np.ndarray, ...]
    kind: Optional[ChannelKind] = None
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        if int(self.dim_in) < 1 or int(self.dim_out) < 1:
            raise ChannelError(f"dimensions must be positive, got dim_in={self.dim_in}, dim_out={self.dim_out}")
        if len(self.kraus) == 0:
            raise ChannelError("a channel needs at least one Kraus operator")
        converted = []
        for index, m in enumerate(self.kraus):
            try:
                matrix = as_matrix(m, f"kraus[{index}]")
            except LinalgError as e:
                raise ChannelError(str(e))
            if matrix.shape != (int(self.dim_out), int(self.dim_in)):
                raise ChannelError(f"kraus[{index}] has shape {matrix.shape}, expected ({self.dim_out}, {self.dim_in})")
            matrix.flags.writeable = False
            converted.append(matrix)
        audited = _classify(converted, self.tol)
        if self.kind is not None and ChannelKind(self.kind) != audited:
            logger.warning(f"declared kind {ChannelKind(self.kind).value} replaced by audited {audited.value}")
        object.__setattr__(self, "dim_in", int(self.dim_in))
        object.__setattr__(self, "dim_out", int(self.dim_out))
        object.__setattr__(self, "kraus", tuple(converted))
        object.__setattr__(self, "kind", audited)

    @classmethod
    def from_kraus(cls, kraus: Sequence, tol: float = DEFAULT_TOL) -> "QuantumChannel":
        """Build a channel, inferring dimensions from the first Kraus operator"""
        if len(kraus) == 0:
            raise ChannelError("a channel needs at least one Kraus operator")
        first = np.asarray(kraus[0])
        if first.ndim != 2:
            raise ChannelError(f"kraus[0] must be 2-dimensional, got shape {first.shape}")
        return cls(dim_in=first.shape[1], dim_out=first.shape[0], kraus=tuple(kraus), tol=tol)

    @property
    def trace_preserving(self) -> bool:
        return self.kind == ChannelKind.TRACE_PRESERVING


def audit(ch: QuantumChannel, tol: float = DEFAULT_TOL) -> ChannelKind:
    """
    Classify by S = sum M_i^dagger M_i

    Returns:
        TRACE_PRESERVING if max|S - I| <= tol, TRACE_NONINCREASING if I - S is PSD within tol

    Raises:
        ChannelError: S - I has an eigenvalue above tol
    """
    return _classify(ch.kraus, tol)


def evolve(ch: QuantumChannel, rho: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Apply the channel to a dim_in density matrix"""
    try:
        rho = as_matrix(rho, "input state")
    except LinalgError as e:
        raise ChannelError(str(e))
    if rho.shape != (ch.dim_in, ch.dim_in):
        raise ChannelError(f"input state has shape {rho.shape}, channel expects {ch.dim_in}x{ch.dim_in}")
    trace = complex(np.trace(rho))
    if abs(trace - 1.0) > tol:
        raise ChannelError(f"input state has trace {trace.real:.12g}, expected 1")
    try:
        check = is_psd(rho, tol)
    except LinalgError as e:
        raise ChannelError(f"invalid input state: {str(e)}")
    if not check.is_psd:
        raise ChannelError(f"input state is not positive semidefinite (min eigenvalue {check.min_eigenvalue:.3e})")
    stacked = np.stack(ch.kraus)
    return np.einsum('kab,bc,kdc->ad', stacked, rho, stacked.conj())


def heisenberg(ch: QuantumChannel, observable: np.ndarray) -> np.ndarray:
    """
    Dual map Y -> sum M_i^dagger Y M_i

    Tr(E(rho) Y) = Tr(rho E^dagger(Y)); E is trace-preserving iff its dual is unital.
    """
    try:
        y = as_matrix(observable, "observable")
    except LinalgError as e:
        raise ChannelError(str(e))
    if y.shape != (ch.dim_out, ch.dim_out):
        raise ChannelError(f"observable has shape {y.shape}, channel output is {ch.dim_out}x{ch.dim_out}")
    stacked = np.stack(ch.kraus)
    return np.einsum('kba,bc,kcd->ad', stacked.conj(), y, stacked)


def compose(ch2: QuantumChannel, ch1: QuantumChannel) -> QuantumChannel:
    """ch2 after ch1, Kraus family {N_j M_i} over all pairs"""
    if ch1.dim_out != ch2.dim_in:
        raise ChannelError(f"cannot compose: first channel outputs dimension {ch1.dim_out}, second expects {ch2.dim_in}")
    kraus = tuple(n @ m for n in ch2.kraus for m in ch1.kraus)
    return QuantumChannel(dim_in=ch1.dim_in, dim_out=ch2.dim_out, kraus=kraus, tol=max(ch1.tol, ch2.tol))


def as_elementary_operator(ch: QuantumChannel, label: str = "channel") -> ElementaryOperator:
    """All-plus elementary operator with the same action"""
    return ElementaryOperator(dim_in=ch.dim_in, dim_out=ch.dim_out, plus_kraus=ch.kraus, label=label)


def random_channel(dim: int, kraus_count: int, seed: int = DEFAULT_SEED) -> QuantumChannel:
    """
    Trace-preserving channel from the block rows of a Haar-random isometry

    Args:
        dim: Input and output dimension
        kraus_count: Number of Kraus operators
        seed: Seed or numpy Generator

    Returns:
        QuantumChannel with sum M^dagger M = I to machine precision
    """
    if dim < 1 or kraus_count < 1:
        raise ChannelError(f"dimension and Kraus count must be positive, got {dim} and {kraus_count}")
    rng = np.random.default_rng(seed)
    shape = (dim * kraus_count, dim)
    gaussian = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    isometry, _ = np.linalg.qr(gaussian)
    kraus = tuple(isometry[i * dim:(i + 1) * dim, :] for i in range(kraus_count))
    return QuantumChannel(dim_in=dim, dim_out=dim, kraus=kraus)


def identity_channel(n: int) -> QuantumChannel:
    return QuantumChannel(dim_in=n, dim_out=n, kraus=(np.eye(n, dtype=np.complex128),))


def dephasing_channel(n: int) -> QuantumChannel:
    """Kraus family {E_ii}: kills off-diagonal entries"""
    kraus = tuple(matrix_unit(n, i, i) for i in range(n))
    return QuantumChannel(dim_in=n, dim_out=n, kraus=kraus)
