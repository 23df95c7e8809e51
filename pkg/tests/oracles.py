"""Independent brute-force implementations used as test oracles.

Everything here loops literally over pairs and grid nodes, mirroring the
definitions one-to-one. Kept deliberately naive and separate from the
package so the two code paths share nothing.
"""

import numpy as np


def brute_modified_band_depth(values):
    n, m = values.shape
    pairs = n * (n - 1) / 2
    out = np.zeros(n)
    for i in range(n):
        acc = 0.0
        for j in range(n):
            for k in range(j + 1, n):
                inside = 0
                for node in range(m):
                    lo = min(values[j, node], values[k, node])
                    hi = max(values[j, node], values[k, node])
                    if lo <= values[i, node] <= hi:
                        inside += 1
                acc += inside / m
        out[i] = acc / pairs
    return out


def brute_band_depth(values):
    n, m = values.shape
    pairs = n * (n - 1) / 2
    out = np.zeros(n)
    for i in range(n):
        count = 0
        for j in range(n):
            for k in range(j + 1, n):
                contained = True
                for node in range(m):
                    lo = min(values[j, node], values[k, node])
                    hi = max(values[j, node], values[k, node])
                    if not lo <= values[i, node] <= hi:
                        contained = False
                        break
                if contained:
                    count += 1
        out[i] = count / pairs
    return out


def brute_mhi(values, x):
    n, m = values.shape
    total = 0.0
    for i in range(n):
        below = 0
        for node in range(m):
            if values[i, node] <= x[node]:
                below += 1
        total += below / m
    return total / n


def brute_pointwise_simplicial(values):
    n, m = values.shape
    pairs = n * (n - 1) / 2
    out = np.zeros((n, m))
    for i in range(n):
        for node in range(m):
            count = 0
            for j in range(n):
                for k in range(j + 1, n):
                    lo = min(values[j, node], values[k, node])
                    hi = max(values[j, node], values[k, node])
                    if lo <= values[i, node] <= hi:
                        count += 1
            out[i, node] = count / pairs
    return out


def brute_quantile_integrated_depth(values, fraction):
    """Two passes: pointwise depths first, then quantile-restricted average."""
    d = brute_pointwise_simplicial(values)
    n = values.shape[0]
    out = np.zeros(n)
    for i in range(n):
        q = np.quantile(d[i], fraction)
        kept = [v for v in d[i] if v <= q]
        out[i] = sum(kept) / len(kept)
    return out
