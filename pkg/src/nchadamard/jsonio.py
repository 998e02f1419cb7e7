"""Matrix files and deterministic JSON output.

A matrix file is a JSON object::

    {"version": 1, "rows": R, "cols": C, "shape": [K_1, ..., K_m],
     "entries": [[[block_1, ..., block_m], ...], ...]}

where each ``block_x`` is a ``K_x x K_x`` array of ``[re, im]`` pairs.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .errors import MatrixFileError
from .hadamard import NCMatrix

FORMAT_VERSION = 1


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    text = format(x, ".17g")
    # keep floats recognisable as floats so that -0.0 and 1.0 survive a round trip
    return text if any(ch in text for ch in ".en") else text + ".0"


def _encode(obj) -> str:
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_encode(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_encode(v) for v in obj) + "]"
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist())
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj) -> str:
    """JSON text with floats at 17 significant digits, keys in insertion order."""
    return _encode(obj)


def matrix_to_dict(H: NCMatrix) -> dict:
    entries = []
    for i in range(H.rows):
        row = []
        for j in range(H.cols):
            row.append([[[[float(z.real), float(z.imag)] for z in line] for line in b[i, j]] for b in H.blocks])
        entries.append(row)
    return {
        "version": FORMAT_VERSION,
        "rows": H.rows,
        "cols": H.cols,
        "shape": list(H.shape),
        "entries": entries,
    }


def _number(v, where: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float, str)):
        raise MatrixFileError(MatrixFileError.SCHEMA, f"{where}: expected a number, got {v!r}")
    if isinstance(v, str):
        try:
            f = float(v)
        except ValueError:
            raise MatrixFileError(MatrixFileError.SCHEMA, f"{where}: expected a number, got {v!r}") from None
        if math.isfinite(f):
            raise MatrixFileError(MatrixFileError.SCHEMA, f"{where}: numbers must not be quoted")
    else:
        f = float(v)
    if not math.isfinite(f):
        raise MatrixFileError(MatrixFileError.NONFINITE, f"{where}: non-finite value {v!r}")
    return f


def _require_int(data: dict, key: str) -> int:
    v = data.get(key)
    if isinstance(v, bool) or not isinstance(v, int) or v < 1:
        raise MatrixFileError(MatrixFileError.SCHEMA, f"'{key}' must be a positive integer")
    return v


def matrix_from_dict(data) -> NCMatrix:
    if not isinstance(data, dict):
        raise MatrixFileError(MatrixFileError.SCHEMA, "top level must be an object")
    for key in ("version", "rows", "cols", "shape", "entries"):
        if key not in data:
            raise MatrixFileError(MatrixFileError.SCHEMA, f"missing key '{key}'")
    if data["version"] != FORMAT_VERSION:
        raise MatrixFileError(MatrixFileError.VERSION, f"unsupported version {data['version']!r}")
    rows, cols = _require_int(data, "rows"), _require_int(data, "cols")
    shape = data["shape"]
    if not isinstance(shape, list) or not shape or any(
        isinstance(k, bool) or not isinstance(k, int) or k < 1 for k in shape
    ):
        raise MatrixFileError(MatrixFileError.SCHEMA, "'shape' must be a non-empty list of positive integers")
    entries = data["entries"]
    if not isinstance(entries, list) or len(entries) != rows:
        raise MatrixFileError(MatrixFileError.DIM_MISMATCH, f"expected {rows} rows of entries")
    blocks = [np.zeros((rows, cols, k, k), dtype=np.complex128) for k in shape]
    for i, row in enumerate(entries):
        if not isinstance(row, list) or len(row) != cols:
            raise MatrixFileError(MatrixFileError.DIM_MISMATCH, f"row {i}: expected {cols} entries")
        for j, entry in enumerate(row):
            if not isinstance(entry, list) or len(entry) != len(shape):
                raise MatrixFileError(MatrixFileError.DIM_MISMATCH, f"entry ({i},{j}): expected {len(shape)} fiber blocks")
            for x, (block, k) in enumerate(zip(entry, shape)):
                if not isinstance(block, list) or len(block) != k:
                    raise MatrixFileError(MatrixFileError.DIM_MISMATCH, f"entry ({i},{j}) fiber {x}: expected {k} rows")
                for r, line in enumerate(block):
                    if not isinstance(line, list) or len(line) != k:
                        raise MatrixFileError(MatrixFileError.DIM_MISMATCH, f"entry ({i},{j}) fiber {x} row {r}: expected {k} values")
                    for c, z in enumerate(line):
                        where = f"entry ({i},{j}) fiber {x} [{r},{c}]"
                        if not isinstance(z, list) or len(z) != 2:
                            raise MatrixFileError(MatrixFileError.DIM_MISMATCH, f"{where}: expected a [re, im] pair")
                        blocks[x][i, j, r, c] = complex(_number(z[0], where), _number(z[1], where))
    return NCMatrix(tuple(blocks))


def loads(text: str) -> NCMatrix:
    try:
        data = json.loads(text)  # bare NaN/Infinity parse to floats, rejected as NONFINITE
    except json.JSONDecodeError as exc:
        raise MatrixFileError(MatrixFileError.MALFORMED_JSON, str(exc)) from None
    return matrix_from_dict(data)


def load(path) -> NCMatrix:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise MatrixFileError(MatrixFileError.IO, str(exc)) from None
    return loads(text)


def save(H: NCMatrix, path) -> None:
    Path(path).write_text(dumps(matrix_to_dict(H)) + "\n")
