"""JSON wire formats for matrices, relations, and diagonal symbols.

Complex scalars travel as [re, im]; a matrix as {rows, cols, data} with data
row-major [re, im] pairs; a relation as {n, m, graph_basis}; a symbol as
{head, tail} where head entries are [re, im] (or the markers "inf",
"trivial", "full") and the tail is {coeff: [re, im], power: "p/q"}.  Floats
round-trip exactly, so serialize/deserialize is value-exact.
"""

from __future__ import annotations

import json
from fractions import Fraction

import numpy as np

from .diagmodel import FULL, INF, TRIVIAL, DiagRel, DiagSymbol, _Marker
from .errors import ParseError
from .linrel import LinRel, rel_from_graph
from .numkernel import Subspace, as_matrix

__all__ = [
    "complex_to_json",
    "complex_from_json",
    "matrix_to_json",
    "matrix_from_json",
    "relation_to_json",
    "relation_from_json",
    "symbol_to_json",
    "symbol_from_json",
    "payload_to_json",
    "payload_from_json",
    "loads",
]

_MARKER_NAMES = {"inf": INF, "trivial": TRIVIAL, "full": FULL}


def complex_to_json(z):
    z = complex(z)
    return [z.real, z.imag]


def complex_from_json(obj, where="scalar"):
    if isinstance(obj, (int, float)):
        return complex(obj)
    if isinstance(obj, list) and len(obj) == 2 and all(isinstance(x, (int, float)) for x in obj):
        return complex(obj[0], obj[1])
    raise ParseError(f"{where}: expected a number or [re, im], got {obj!r}")


def matrix_to_json(M):
    M = as_matrix(M)
    data = [complex_to_json(z) for z in M.reshape(-1)]
    return {"rows": M.shape[0], "cols": M.shape[1], "data": data}


def matrix_from_json(obj, where="matrix"):
    try:
        rows, cols, data = obj["rows"], obj["cols"], obj["data"]
    except (TypeError, KeyError) as exc:
        raise ParseError(f"{where}: missing field {exc}") from exc
    if not isinstance(rows, int) or not isinstance(cols, int) or rows < 0 or cols < 0:
        raise ParseError(f"{where}: rows/cols must be nonnegative integers")
    if not isinstance(data, list) or len(data) != rows * cols:
        raise ParseError(f"{where}: data must hold rows*cols = {rows * cols} entries")
    flat = [complex_from_json(z, f"{where}.data[{i}]") for i, z in enumerate(data)]
    return np.array(flat, dtype=np.complex128).reshape(rows, cols)


def relation_to_json(R: LinRel):
    return {
        "n": R.dom_dim,
        "m": R.codom_dim,
        "graph_basis": matrix_to_json(R.graph.basis),
    }


def relation_from_json(obj, where="relation"):
    try:
        n, m = obj["n"], obj["m"]
        basis = matrix_from_json(obj["graph_basis"], f"{where}.graph_basis")
    except (TypeError, KeyError) as exc:
        raise ParseError(f"{where}: missing field {exc}") from exc
    if basis.shape[0] != n + m:
        raise ParseError(f"{where}: graph basis must have n+m = {n + m} rows")
    gram = basis.conj().T @ basis
    if np.linalg.norm(gram - np.eye(basis.shape[1])) <= 1e-12:
        # already orthonormal: keep the stored floats so round trips are exact
        return LinRel(n, m, Subspace(n + m, basis))
    return rel_from_graph(basis, n, m)


def symbol_to_json(D):
    sym = D.symbol if isinstance(D, DiagRel) else D
    head = []
    for v in sym.head:
        head.append(v.name if isinstance(v, _Marker) else complex_to_json(v))
    power = Fraction(sym.tail_power)
    return {
        "head": head,
        "tail": {"coeff": complex_to_json(sym.tail_coeff), "power": str(power)},
    }


def symbol_from_json(obj, where="symbol"):
    try:
        head_raw = obj["head"]
        tail = obj.get("tail", {"coeff": [0.0, 0.0], "power": "0"})
    except TypeError as exc:
        raise ParseError(f"{where}: expected an object") from exc
    head = []
    for i, v in enumerate(head_raw):
        if isinstance(v, str):
            if v not in _MARKER_NAMES:
                raise ParseError(f"{where}.head[{i}]: unknown marker {v!r}")
            head.append(_MARKER_NAMES[v])
        else:
            head.append(complex_from_json(v, f"{where}.head[{i}]"))
    coeff = complex_from_json(tail.get("coeff", [0.0, 0.0]), f"{where}.tail.coeff")
    try:
        power = Fraction(str(tail.get("power", "0")))
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"{where}.tail.power: not a rational p/q") from exc
    return DiagRel(DiagSymbol(head=tuple(head), tail_coeff=coeff, tail_power=power))


NAMED_SYMBOLS = {
    "zero": DiagSymbol(tail_coeff=0),
    "one": DiagSymbol(tail_coeff=1, tail_power=Fraction(0)),
    "n": DiagSymbol(tail_coeff=1, tail_power=Fraction(1)),
    "n2": DiagSymbol(tail_coeff=1, tail_power=Fraction(2)),
    "sqrt_n": DiagSymbol(tail_coeff=1, tail_power=Fraction(1, 2)),
    "inv_n": DiagSymbol(tail_coeff=1, tail_power=Fraction(-1)),
    "inv_sqrt_n": DiagSymbol(tail_coeff=1, tail_power=Fraction(-1, 2)),
}


def payload_from_json(obj, where="input"):
    """Dispatch on shape: matrix, relation, symbol, or a named symbol."""
    if isinstance(obj, str):
        if obj in NAMED_SYMBOLS:
            return DiagRel(NAMED_SYMBOLS[obj])
        raise ParseError(f"{where}: unknown named symbol {obj!r}")
    if isinstance(obj, dict):
        if "rows" in obj:
            return matrix_from_json(obj, where)
        if "graph_basis" in obj:
            return relation_from_json(obj, where)
        if "head" in obj or "tail" in obj:
            return symbol_from_json(obj, where)
    raise ParseError(f"{where}: unrecognized payload shape")


def payload_to_json(value):
    if isinstance(value, LinRel):
        return relation_to_json(value)
    if isinstance(value, (DiagRel, DiagSymbol)):
        return symbol_to_json(value)
    return matrix_to_json(value)


def loads(text: str):
    """json.loads with line/column diagnostics folded into ParseError."""
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
