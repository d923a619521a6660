"""NumPy fallback for the preference-sweep kernels.

Must stay bit-identical to the compiled extension: per-country bucket sums
are accumulated in partner-index order (np.bincount walks its input
sequentially, same as the C loop), and the tie rule is keep-current on a
tied maximum, otherwise the lowest currency index.
"""

from __future__ import annotations

import numpy as np


def sweep(
    coupling_t: np.ndarray,
    prefs: np.ndarray,
    order: np.ndarray,
    scratch: np.ndarray,
) -> int:
    """One asynchronous update pass over `order`; mutates prefs in place.

    Returns the number of countries that changed preference.
    """
    k = scratch.shape[0]
    p = prefs.astype(np.intp)
    changes = 0
    for c in order:
        buckets = np.bincount(p, weights=coupling_t[c], minlength=k)
        cur = int(prefs[c])
        m = buckets[cur]
        best = cur
        for j in range(k):
            if buckets[j] > m:
                m = buckets[j]
                best = j
        if best != cur:
            prefs[c] = best
            p[c] = best
            changes += 1
    return changes


def fixed_point(
    coupling_t: np.ndarray,
    prefs: np.ndarray,
    order: np.ndarray,
    scratch: np.ndarray,
) -> bool:
    """True when no country in `order` would change preference."""
    k = scratch.shape[0]
    p = prefs.astype(np.intp)
    for c in order:
        buckets = np.bincount(p, weights=coupling_t[c], minlength=k)
        if np.any(buckets > buckets[int(prefs[c])]):
            return False
    return True
