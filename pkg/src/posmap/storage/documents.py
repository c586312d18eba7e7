"""
Documents Module - File format for states, maps and channels

This module provides:
- Self-describing JSON documents with a "kind" discriminator
- Complex matrices as nested [real, imaginary] pairs
- Canonical serialization (17 significant digits, one matrix row per line)
- Loading from a path or stdin ("-") and saving to a path or stdout ("-")
"""

import json
import logging
import sys
from pathlib import Path
from typing import Annotated, List, Literal, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field, FiniteFloat, PositiveInt, TypeAdapter, ValidationError, model_validator

from src.posmap.channels import QuantumChannel
from src.posmap.config import DEFAULT_TOL, FLOAT_FORMAT
from src.posmap.errors import DocumentError
from src.posmap.maps import ElementaryOperator
from src.posmap.states import BipartiteState


logger = logging.getLogger(__name__)

ComplexPair = Tuple[FiniteFloat, FiniteFloat]
MatrixRows = List[List[ComplexPair]]


def _check_shape(rows: MatrixRows, shape: Tuple[int, int], name: str) -> None:
    if len(rows) != shape[0] or any(len(row) != shape[1] for row in rows):
        found = f"{len(rows)} rows of lengths {sorted({len(row) for row in rows})}"
        raise ValueError(f"{name} must be {shape[0]}x{shape[1]}, found {found}")


class StateDocument(BaseModel):
    kind: Literal["state"] = "state"
    dim_a: PositiveInt
    dim_b: PositiveInt
    matrix: MatrixRows

    @model_validator(mode="after")
    def _dims_match(self):
        size = self.dim_a * self.dim_b
        _check_shape(self.matrix, (size, size), "matrix")
        return self


class MapDocument(BaseModel):
    kind: Literal["map"] = "map"
    dim_in: PositiveInt
    dim_out: PositiveInt
    label: str = "map"
    plus_kraus: List[MatrixRows]
    minus_kraus: List[MatrixRows] = Field(default_factory=list)

    @model_validator(mode="after")
    def _dims_match(self):
        for family in ("plus_kraus", "minus_kraus"):
            for index, rows in enumerate(getattr(self, family)):
                _check_shape(rows, (self.dim_out, self.dim_in), f"{family}[{index}]")
        return self


class ChannelDocument(BaseModel):
    kind: Literal["channel"] = "channel"
    dim_in: PositiveInt
    dim_out: PositiveInt
    kraus: List[MatrixRows] = Field(min_length=1)

    @model_validator(mode="after")
    def _dims_match(self):
        for index, rows in enumerate(self.kraus):
            _check_shape(rows, (self.dim_out, self.dim_in), f"kraus[{index}]")
        return self


MatrixDocument = Annotated[Union[StateDocument, MapDocument, ChannelDocument], Field(discriminator="kind")]
Domain = Union[BipartiteState, ElementaryOperator, QuantumChannel]

_document_adapter = TypeAdapter(MatrixDocument)


def _to_array(rows: MatrixRows) -> np.ndarray:
    pairs = np.array(rows, dtype=np.float64).reshape(len(rows), -1, 2)
    return pairs[..., 0] + 1j * pairs[..., 1]


def _to_rows(matrix: np.ndarray) -> MatrixRows:
    return [[(float(z.real), float(z.imag)) for z in row] for row in np.asarray(matrix, dtype=np.complex128)]


def to_domain(document: MatrixDocument, tol: float = DEFAULT_TOL) -> Domain:
    """
    Build the validated domain object for a document

    Raises:
        StateError, MapError, ChannelError: the domain invariants fail (trace, PSD, audit...)
    """
    if isinstance(document, StateDocument):
        return BipartiteState(dim_a=document.dim_a, dim_b=document.dim_b, matrix=_to_array(document.matrix), tol=tol)
    if isinstance(document, MapDocument):
        return ElementaryOperator(
            dim_in=document.dim_in,
            dim_out=document.dim_out,
            plus_kraus=tuple(_to_array(rows) for rows in document.plus_kraus),
            minus_kraus=tuple(_to_array(rows) for rows in document.minus_kraus),
            label=document.label,
        )
    return QuantumChannel(dim_in=document.dim_in, dim_out=document.dim_out,
                          kraus=tuple(_to_array(rows) for rows in document.kraus), tol=tol)


def from_domain(obj: Domain) -> MatrixDocument:
    if isinstance(obj, BipartiteState):
        return StateDocument(dim_a=obj.dim_a, dim_b=obj.dim_b, matrix=_to_rows(obj.matrix))
    if isinstance(obj, ElementaryOperator):
        return MapDocument(dim_in=obj.dim_in, dim_out=obj.dim_out, label=obj.label,
                           plus_kraus=[_to_rows(m) for m in obj.plus_kraus],
                           minus_kraus=[_to_rows(m) for m in obj.minus_kraus])
    if isinstance(obj, QuantumChannel):
        return ChannelDocument(dim_in=obj.dim_in, dim_out=obj.dim_out, kraus=[_to_rows(m) for m in obj.kraus])
    raise DocumentError(f"no document kind for {type(obj).__name__}")


def _number(x: float) -> str:
    # +0.0 folds negative zero
    return format(float(x) + 0.0, FLOAT_FORMAT)


def _matrix_lines(rows: MatrixRows, indent: str) -> str:
    lines = [indent + "  [" + ", ".join(f"[{_number(re)}, {_number(im)}]" for re, im in row) + "]" for row in rows]
    return "[\n" + ",\n".join(lines) + "\n" + indent + "]"


def _matrix_list(matrices: List[MatrixRows], indent: str) -> str:
    if not matrices:
        return "[]"
    inner = indent + "  "
    return "[\n" + ",\n".join(inner + _matrix_lines(rows, inner) for rows in matrices) + "\n" + indent + "]"


def serialize(document: MatrixDocument) -> str:
    """
    Canonical text of a document

    Keys in a fixed order, numbers with 17 significant digits, one matrix row per
    line. serialize(parse(serialize(d))) == serialize(d) byte for byte.
    """
    fields = [("kind", json.dumps(document.kind))]
    if isinstance(document, StateDocument):
        fields += [("dim_a", str(document.dim_a)), ("dim_b", str(document.dim_b)),
                   ("matrix", _matrix_lines(document.matrix, "  "))]
    elif isinstance(document, MapDocument):
        fields += [("dim_in", str(document.dim_in)), ("dim_out", str(document.dim_out)),
                   ("label", json.dumps(document.label)),
                   ("plus_kraus", _matrix_list(document.plus_kraus, "  ")),
                   ("minus_kraus", _matrix_list(document.minus_kraus, "  "))]
    else:
        fields += [("dim_in", str(document.dim_in)), ("dim_out", str(document.dim_out)),
                   ("kraus", _matrix_list(document.kraus, "  "))]
    body = ",\n".join(f'  "{key}": {value}' for key, value in fields)
    return "{\n" + body + "\n}\n"


def parse_document(text: str) -> MatrixDocument:
    """Validate JSON text as a state, map or channel document"""
    try:
        return _document_adapter.validate_json(text)
    except ValidationError as e:
        errors = "; ".join(f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in e.errors()[:5])
        logger.error(f"Invalid document: {errors}")
        raise DocumentError(f"invalid document: {errors}")


def load_document(path: str) -> MatrixDocument:
    """
    Read and validate a document

    Args:
        path: File path, or "-" for stdin

    Returns:
        StateDocument, MapDocument or ChannelDocument
    """
    try:
        raw = getattr(sys.stdin, "buffer", sys.stdin).read() if path == "-" else Path(path).read_bytes()
        text = raw.decode("utf-8") if isinstance(raw, bytes) else raw
    except OSError as e:
        logger.error(f"Failed to read {path}: {str(e)}")
        raise DocumentError(f"cannot read {path}: {str(e)}")
    except UnicodeDecodeError as e:
        logger.error(f"Failed to decode {path}: {str(e)}")
        raise DocumentError(f"{path} is not UTF-8 text: {str(e)}")
    logger.info(f"Loading document from {'stdin' if path == '-' else path}")
    return parse_document(text)


def save_document(obj: Union[MatrixDocument, Domain], path: str = "-") -> None:
    """
    Write the canonical text of a document or domain object

    Args:
        obj: Document, or a BipartiteState / ElementaryOperator / QuantumChannel
        path: File path, or "-" for stdout
    """
    document = obj if isinstance(obj, (StateDocument, MapDocument, ChannelDocument)) else from_domain(obj)
    text = serialize(document)
    if path == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
        logger.info(f"✓ Saved {document.kind} document to {path}")
    except OSError as e:
        logger.error(f"Failed to write {path}: {str(e)}")
        raise DocumentError(f"cannot write {path}: {str(e)}")
