"""Conversion of report payloads to plain JSON-ready Python values."""

from __future__ import annotations

import math

import numpy as np


def plain(obj):
    """Recursively turn numpy scalars/arrays, tuples and complex numbers into JSON types.

    Complex numbers become [re, im]; non-finite floats become the strings
    "inf", "-inf" or "nan" so output stays strict JSON.
    """
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [plain(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [plain(float(obj.real)), plain(float(obj.imag))]
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isfinite(x):
            return x
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    return obj
