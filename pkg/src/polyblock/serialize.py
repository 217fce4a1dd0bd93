"""Bit-exact JSON encoding of floats and numpy arrays.

Every real is stored as a hex-float string (``float.hex``), so documents
round-trip without any loss; files stay self-describing text.
"""

from __future__ import annotations

import json
import math

import numpy as np


def encode_float(v: float) -> str:
    v = float(v)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if math.isnan(v):
        return "nan"
    return v.hex()


def decode_float(s: str) -> float:
    if s == "inf":
        return math.inf
    if s == "-inf":
        return -math.inf
    if s == "nan":
        return math.nan
    return float.fromhex(s)


def encode_array(a: np.ndarray) -> dict:
    a = np.asarray(a, dtype=np.float64)
    return {
        "shape": list(a.shape),
        "data": [encode_float(v) for v in a.ravel().tolist()],
    }


def decode_array(d: dict) -> np.ndarray:
    flat = np.array([decode_float(s) for s in d["data"]], dtype=np.float64)
    return flat.reshape(d["shape"])


def dump_document(doc: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_document(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)
