"""Pure NumPy split-scan kernels (fallback for the compiled extension).

Both backends must choose bit-identical splits.  That works because the
quantities compared are built from exact integer counts (Gini) or from
strictly sequential running sums (SSE), evaluated with the same float64
expressions in the same order as the C loops in ``_ckernels.pyx``.

Both scans take feature values pre-sorted ascending (with their targets
permuted accordingly) and return ``(proxy, threshold)`` where the proxy is
to be *maximized*; ``(-inf, nan)`` means no valid split (all values equal).
Candidate thresholds are midpoints between consecutive distinct values, and
ties on the proxy keep the lowest threshold.
"""

from __future__ import annotations

import numpy as np

NO_SPLIT = (-np.inf, np.nan)


def scan_split_gini(x_sorted, y_sorted, n_classes):
    """Gini proxy = sum_c count_c^2 / n, left + right; maximizing it minimizes
    the weighted Gini impurity."""
    n = len(x_sorted)
    if n < 2:
        return NO_SPLIT
    valid = x_sorted[1:] > x_sorted[:-1]
    if not np.any(valid):
        return NO_SPLIT

    onehot = np.zeros((n, n_classes), dtype=np.int64)
    onehot[np.arange(n), y_sorted] = 1
    left = np.cumsum(onehot, axis=0)[:-1]
    right = left[-1] + onehot[-1] - left

    n_left = np.arange(1, n, dtype=np.int64)
    n_right = n - n_left
    s_left = np.sum(left * left, axis=1)
    s_right = np.sum(right * right, axis=1)
    proxy = s_left / n_left + s_right / n_right

    proxy = np.where(valid, proxy, -np.inf)
    i = int(np.argmax(proxy))
    if not np.isfinite(proxy[i]):
        return NO_SPLIT
    return float(proxy[i]), float((x_sorted[i] + x_sorted[i + 1]) / 2.0)


def scan_split_sse(x_sorted, r_sorted):
    """SSE proxy = S_left^2/n_left + S_right^2/n_right; maximizing it minimizes
    the total within-child sum of squared errors."""
    n = len(x_sorted)
    if n < 2:
        return NO_SPLIT
    valid = x_sorted[1:] > x_sorted[:-1]
    if not np.any(valid):
        return NO_SPLIT

    cumulative = np.cumsum(r_sorted)
    s_left = cumulative[:-1]
    s_right = cumulative[-1] - s_left
    n_left = np.arange(1, n, dtype=np.float64)
    n_right = n - n_left
    proxy = s_left * s_left / n_left + s_right * s_right / n_right

    proxy = np.where(valid, proxy, -np.inf)
    i = int(np.argmax(proxy))
    if not np.isfinite(proxy[i]):
        return NO_SPLIT
    return float(proxy[i]), float((x_sorted[i] + x_sorted[i + 1]) / 2.0)
