"""Chain files (``walkbench-chain-v1``) and small JSON helpers."""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .chain import StochasticMatrix, stochastic_violation
from .errors import ValidationError

CHAIN_FORMAT = "walkbench-chain-v1"
CONVENTION = "column-stochastic"


def chain_to_dict(P: StochasticMatrix) -> dict:
    doc = {
        "format": CHAIN_FORMAT,
        "n": P.n,
        "convention": CONVENTION,
        "symmetric": P.symmetric,
        "data": [float(v) for v in P.entries.ravel()],
    }
    if P.meta:
        doc["meta"] = P.meta
    return doc


def chain_from_dict(doc: dict) -> StochasticMatrix:
    if not isinstance(doc, dict) or doc.get("format") != CHAIN_FORMAT:
        raise ValidationError(f"not a {CHAIN_FORMAT} document")
    if doc.get("convention") != CONVENTION:
        raise ValidationError(f"unsupported convention {doc.get('convention')!r}")
    n = doc.get("n")
    data = doc.get("data")
    if not isinstance(n, int) or n < 1:
        raise ValidationError(f"bad dimension n={n!r}")
    if not isinstance(data, list) or len(data) != n * n:
        raise ValidationError(f"data must hold n*n = {n * n} numbers")
    try:
        a = np.array(data, dtype=float).reshape(n, n)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"data is not numeric: {exc}") from None
    problem = stochastic_violation(a)
    if problem is not None:
        raise ValidationError(f"invalid chain: {problem}")
    return StochasticMatrix(a, bool(doc.get("symmetric", False)), doc.get("meta"))


def dumps(doc) -> str:
    """JSON text with non-finite floats written as ``null``."""
    return json.dumps(_finite(doc), indent=2) + "\n"


def _finite(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    if isinstance(obj, np.generic):
        return _finite(obj.item())
    return obj


def save_chain(P: StochasticMatrix, path) -> None:
    Path(path).write_text(dumps(chain_to_dict(P)), encoding="utf-8")


def load_chain(path) -> StochasticMatrix:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path} is not valid JSON: {exc}") from None
    return chain_from_dict(doc)
