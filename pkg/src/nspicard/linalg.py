"""Small shared linear-algebra helpers."""

from __future__ import annotations

import numpy as np


def numeric_rank(m, tol: float = 1e-8) -> int:
    """Numeric rank by singular-value thresholding.

    ``tol`` is relative to the largest singular value.  A non-positive
    tolerance is rejected rather than silently treated as exact rank.
    """
    if tol <= 0:
        raise ValueError(f"rank tolerance must be positive, got {tol}")
    m = np.asarray(m)
    if m.size == 0:
        return 0
    s = np.linalg.svd(m, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.sum(s > tol * s[0]))
