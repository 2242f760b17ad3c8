"""Input checks shared by the estimator front end."""

from __future__ import annotations

from typing import Iterable

import numpy as np

from .errors import ValidationError
from .instance import FiniteDomain, LabeledSample, check_label


def check_points(X, domain: FiniteDomain) -> list[str]:
    """Coerce ``X`` to a list of point ids, all in ``domain``.

    Accepts a flat sequence of ids or a single-column 2-D array.
    """
    if isinstance(X, str):
        raise ValidationError("X must be a sequence of point ids, not a string")
    arr = np.asarray(X, dtype=object)
    if arr.ndim == 2:
        if arr.shape[1] != 1:
            raise ValidationError(f"X must have one column of point ids, got {arr.shape[1]}")
        arr = arr[:, 0]
    elif arr.ndim != 1:
        raise ValidationError(f"X must be 1-D or a single column, got {arr.ndim} dimensions")
    pts = [str(x) for x in arr]
    missing = sorted({x for x in pts if x not in domain})
    if missing:
        raise ValidationError(f"points outside the domain: {', '.join(missing[:5])}")
    return pts


def check_labels(y: Iterable, n: int | None = None) -> list[int]:
    """Labels as a list of +1/-1 ints; 0/1 and bools are not accepted."""
    arr = np.asarray(list(y) if not isinstance(y, np.ndarray) else y).ravel()
    out = []
    for v in arr.tolist():
        if isinstance(v, bool):
            raise ValidationError("labels must be -1 or +1, not booleans")
        out.append(check_label(v))
    if n is not None and len(out) != n:
        raise ValidationError(f"X has {n} points but y has {len(out)} labels")
    return out


def check_sample(X, y, domain: FiniteDomain) -> LabeledSample:
    pts = check_points(X, domain)
    return LabeledSample(tuple(zip(pts, check_labels(y, len(pts)))))
