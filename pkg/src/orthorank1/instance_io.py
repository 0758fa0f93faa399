"""Instance files: one JSON object describing A = Q + a b^T.

Fields: n (dimension), q (the string "identity", "permutation:<comma-separated
indices>", or a row-major numeric array), a, b (numeric arrays of length n).
Numbers are written as shortest round-trip decimals, so a dump/parse cycle
reproduces the instance bit for bit.

The permutation convention: "permutation:2,0,1" builds the matrix whose
column j has its single 1 in row indices[j], i.e. Q e_j = e_indices[j].
"""

from __future__ import annotations

import json

import numpy as np

from .core import OrthogonalMatrix, OrthogonalPlusRankOne, validate_orthogonal


class ParseError(ValueError):
    """Instance file malformed or inconsistent."""


def _numeric_list(value, length: int, name: str) -> np.ndarray:
    if not isinstance(value, list) or len(value) != length:
        raise ParseError(f"{name} must be a list of {length} numbers")
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{name} holds a non-numeric entry: {exc}") from exc
    if arr.ndim != 1 or not np.isfinite(arr).all():
        raise ParseError(f"{name} must be flat and finite")
    return arr


def _parse_permutation(text: str, n: int) -> np.ndarray:
    body = text[len("permutation:"):]
    try:
        indices = [int(part) for part in body.split(",")] if body else []
    except ValueError as exc:
        raise ParseError(f"bad permutation indices {body!r}") from exc
    if sorted(indices) != list(range(n)):
        raise ParseError(f"indices {indices} are not a permutation of 0..{n - 1}")
    mat = np.zeros((n, n))
    mat[indices, np.arange(n)] = 1.0
    return mat


def _parse_q(value, n: int, orthogonality_tol: float) -> OrthogonalMatrix | None:
    if value == "identity":
        return None
    if isinstance(value, str):
        if value.startswith("permutation:"):
            return OrthogonalMatrix(_parse_permutation(value, n), 0.0)
        raise ParseError(f"unknown q specifier {value!r}")
    if not isinstance(value, list):
        raise ParseError("q must be 'identity', 'permutation:<indices>', or an array")
    if value and isinstance(value[0], list):
        if len(value) != n or any(not isinstance(row, list) or len(row) != n for row in value):
            raise ParseError(f"q rows must form an {n}x{n} array")
        flat = [entry for row in value for entry in row]
    else:
        flat = value
    arr = _numeric_list(flat, n * n, "q").reshape(n, n)
    return validate_orthogonal(arr, orthogonality_tol)


def parse_instance(text: str, orthogonality_tol: float = 1e-10) -> OrthogonalPlusRankOne:
    """Parse an instance file; NotOrthogonalError passes through untouched."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ParseError("top level must be an object")
    expected = {"n", "q", "a", "b"}
    extra = set(data) - expected
    if extra:
        raise ParseError(f"unknown fields: {sorted(extra)}")
    missing = expected - set(data)
    if missing:
        raise ParseError(f"missing fields: {sorted(missing)}")
    n = data["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ParseError(f"n must be a positive integer, got {n!r}")
    a = _numeric_list(data["a"], n, "a")
    b = _numeric_list(data["b"], n, "b")
    q = _parse_q(data["q"], n, orthogonality_tol)
    return OrthogonalPlusRankOne(q, a, b)


def format_instance(m: OrthogonalPlusRankOne) -> str:
    """Serialize with shortest round-trip decimals."""
    q_value = "identity" if m.q is None else [[float(x) for x in row] for row in m.q.matrix]
    payload = {
        "n": m.dim,
        "q": q_value,
        "a": [float(x) for x in m.a],
        "b": [float(x) for x in m.b],
    }
    return json.dumps(payload, indent=2) + "\n"


def load_instance(path, orthogonality_tol: float = 1e-10) -> OrthogonalPlusRankOne:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_instance(handle.read(), orthogonality_tol)


def dump_instance(m: OrthogonalPlusRankOne, path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(format_instance(m))
