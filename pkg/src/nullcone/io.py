"""JSON formats for tensors, supports and certificates (1-based indices)."""

from __future__ import annotations

import json
import math
from fractions import Fraction
from typing import Any

import numpy as np

from .tensor import Support, Tensor, exact_parts, gaussian


class ParseError(ValueError):
    """Input JSON does not match the expected format."""


def _number(v, where: str):
    if isinstance(v, bool) or not isinstance(v, (int, float, str)):
        raise ParseError(f"{where}: expected a number, got {v!r}")
    if isinstance(v, str):
        try:
            return Fraction(v)
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"{where}: cannot parse {v!r} as a rational") from exc
    if isinstance(v, float) and not math.isfinite(v):
        raise ParseError(f"{where}: non-finite value")
    return v


def tensor_from_json(obj: Any) -> Tensor:
    """Parse ``{"dims": [...], "entries": [{"idx": [...], "re": .., "im": ..}]}``.

    Integer (or rational-string) entries give an exact tensor; any float
    entry switches to floating mode.  Omitted entries are zero.
    """
    if not isinstance(obj, dict) or "dims" not in obj:
        raise ParseError("tensor JSON must be an object with 'dims' and 'entries'")
    dims = obj["dims"]
    if (not isinstance(dims, list) or len(dims) < 2
            or any(isinstance(n, bool) or not isinstance(n, int) or n < 1 for n in dims)):
        raise ParseError("'dims' must list at least two positive integers")
    entries = obj.get("entries", [])
    if not isinstance(entries, list):
        raise ParseError("'entries' must be a list")
    parsed = []
    exact = True
    for k, e in enumerate(entries):
        if not isinstance(e, dict) or "idx" not in e:
            raise ParseError(f"entry {k}: expected an object with 'idx'")
        idx = e["idx"]
        if (not isinstance(idx, list) or len(idx) != len(dims)
                or any(isinstance(j, bool) or not isinstance(j, int) for j in idx)):
            raise ParseError(f"entry {k}: 'idx' must list {len(dims)} integers")
        if any(not 1 <= j <= n for j, n in zip(idx, dims)):
            raise ParseError(f"entry {k}: index {idx} out of range for dims {dims}")
        re = _number(e.get("re", 0), f"entry {k} re")
        im = _number(e.get("im", 0), f"entry {k} im")
        if isinstance(re, float) or isinstance(im, float):
            exact = False
        parsed.append((tuple(j - 1 for j in idx), re, im))
    if exact:
        arr = np.empty(tuple(dims), dtype=object)
        arr[...] = Fraction(0)
        for idx, re, im in parsed:
            arr[idx] = arr[idx] + gaussian(re, im)
        return Tensor.from_array(arr, exact=True)
    arr = np.zeros(tuple(dims), dtype=np.complex128)
    for idx, re, im in parsed:
        arr[idx] += complex(float(re), float(im))
    return Tensor(arr)


def _json_number(x: Fraction):
    return int(x) if x.denominator == 1 else str(x)


def tensor_to_json(X: Tensor) -> dict:
    entries = []
    if X.exact is not None:
        for idx in np.ndindex(*X.dims):
            v = X.exact[idx]
            if v:
                re, im = exact_parts(v)
                entries.append({"idx": [j + 1 for j in idx], "re": _json_number(re),
                                "im": _json_number(im)})
    else:
        for idx in np.ndindex(*X.dims):
            v = complex(X.entries[idx])
            if v != 0:
                entries.append({"idx": [j + 1 for j in idx], "re": v.real, "im": v.imag})
    return {"dims": list(X.dims), "entries": entries}


def support_from_json(obj: Any) -> Support:
    if not isinstance(obj, dict) or "dims" not in obj or "tuples" not in obj:
        raise ParseError("support JSON must be an object with 'dims' and 'tuples'")
    dims, tuples = obj["dims"], obj["tuples"]
    if not isinstance(dims, list) or not dims or any(
            isinstance(n, bool) or not isinstance(n, int) or n < 1 for n in dims):
        raise ParseError("'dims' must list positive integers")
    if not isinstance(tuples, list):
        raise ParseError("'tuples' must be a list")
    out = []
    for t in tuples:
        if (not isinstance(t, list) or len(t) != len(dims)
                or any(isinstance(j, bool) or not isinstance(j, int) for j in t)):
            raise ParseError(f"bad tuple {t!r}")
        if any(not 1 <= j <= n for j, n in zip(t, dims)):
            raise ParseError(f"tuple {t} out of range for dims {dims}")
        out.append(tuple(j - 1 for j in t))
    return Support(tuple(dims), frozenset(out))


def support_to_json(S: Support) -> dict:
    return {"dims": list(S.dims), "tuples": [[j + 1 for j in t] for t in S.sorted()]}


def matrix_to_json(A: np.ndarray) -> list:
    A = np.asarray(A, dtype=np.complex128)
    return [[[float(z.real), float(z.imag)] for z in row] for row in A]


def load_json(path: str) -> Any:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from exc


def dumps(obj: Any) -> str:
    """Deterministic JSON rendering used for every report."""
    return json.dumps(obj, sort_keys=True, indent=2)
