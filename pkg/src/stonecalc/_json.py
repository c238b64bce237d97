"""Scalar encoding shared by the JSON forms: infinities travel as strings."""

from __future__ import annotations

import math


def encode_scalar(v: float) -> float | str:
    v = float(v)
    if v == math.inf:
        return "inf"
    if v == -math.inf:
        return "-inf"
    if math.isnan(v):
        raise ValueError("NaN has no JSON encoding")
    return v


def decode_scalar(v) -> float:
    if isinstance(v, str):
        if v in ("inf", "+inf"):
            return math.inf
        if v == "-inf":
            return -math.inf
        raise ValueError(f"unrecognised scalar string {v!r}")
    return float(v)


def encode_array(values) -> list:
    return [encode_scalar(v) for v in values]


def decode_array(values) -> list[float]:
    return [decode_scalar(v) for v in values]
