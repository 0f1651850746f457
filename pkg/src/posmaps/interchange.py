"""JSON documents for matrices, affine maps and dynamical maps.

Floats are written with 17 significant digits so that documents round-trip
bit-exactly and identical inputs give byte-identical files.
"""
from __future__ import annotations

import json
import math
import os
import tempfile

import numpy as np

from .ballmaps import AffineBallMap
from .errors import DimensionMismatchError, PosmapsError
from .maps import DynamicalMap

BASIS_ID = "gellmann-standard-v1"


class DocumentError(PosmapsError):
    """Malformed or inconsistent interchange document."""


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        raise DocumentError(f"cannot serialize non-finite value {x!r}")
    s = "%.17g" % x
    if not any(ch in s for ch in ".en"):
        s += ".0"
    return s


def _encode(obj, indent: int) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad}  {json.dumps(str(k))}: {_encode(v, indent + 1)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_encode(v, indent + 1) for v in obj) + "]"
    if isinstance(obj, (bool, np.bool_)) or obj is None or isinstance(obj, str):
        return json.dumps(obj if not isinstance(obj, np.bool_) else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist(), indent)
    raise DocumentError(f"cannot serialize object of type {type(obj).__name__}")


def dumps(doc) -> str:
    return _encode(doc, 0) + "\n"


def write_document(path: str, doc) -> None:
    """Write atomically: nothing appears at ``path`` unless the whole write succeeds."""
    text = dumps(doc)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".posmaps-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_document(path: str) -> dict:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise DocumentError(f"{path}: expected a JSON object at top level")
    return doc


def _require(doc: dict, *keys):
    missing = [k for k in keys if k not in doc]
    if missing:
        raise DocumentError(f"document is missing field(s): {', '.join(missing)}")


def matrix_to_doc(a) -> dict:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {a.shape}")
    return {"dim": a.shape[0], "entries": [[z.real, z.imag] for z in a.reshape(-1)]}


def matrix_from_doc(doc: dict) -> np.ndarray:
    _require(doc, "dim", "entries")
    n = int(doc["dim"])
    entries = np.asarray(doc["entries"], dtype=float)
    if entries.shape != (n * n, 2):
        raise DocumentError(f"matrix of dim {n} needs {n * n} [re, im] pairs, got shape {entries.shape}")
    return (entries[:, 0] + 1j * entries[:, 1]).reshape(n, n)


def affine_to_doc(amap: AffineBallMap) -> dict:
    return {
        "dim": amap.dim,
        "T": amap.T.reshape(-1),
        "b": amap.b,
        "certificate": amap.certificate,
    }


def affine_from_doc(doc: dict) -> AffineBallMap:
    """Rebuild an affine map; a stored certificate is re-verified, never trusted."""
    _require(doc, "dim", "T", "b")
    m = int(doc["dim"])
    T = np.asarray(doc["T"], dtype=float)
    b = np.asarray(doc["b"], dtype=float)
    if T.size != m * m or b.size != m:
        raise DocumentError(f"affine map of dim {m} needs {m * m} T entries and {m} b entries")
    amap = AffineBallMap(T.reshape(m, m), b)
    if doc.get("certificate") is not None:
        amap = amap.certify()
    return amap


def map_to_doc(phi: DynamicalMap, **extra) -> dict:
    doc = {
        "dim": phi.dim,
        "basis_id": BASIS_ID,
        "L": phi.L.reshape(-1),
        "provenance": phi.provenance,
    }
    doc.update(extra)
    return doc


def map_from_doc(doc: dict) -> DynamicalMap:
    _require(doc, "dim", "L")
    if doc.get("basis_id", BASIS_ID) != BASIS_ID:
        raise DocumentError(f"unsupported basis_id {doc['basis_id']!r}")
    n = int(doc["dim"])
    L = np.asarray(doc["L"], dtype=float)
    if L.size != n**4:
        raise DocumentError(f"map on M_{n} needs {n**4} entries in L, got {L.size}")
    return DynamicalMap(n, L.reshape(n * n, n * n), doc.get("provenance", "imported"))
