"""Small numerical helpers: quadrature, scalar searches, rank decisions."""

from __future__ import annotations

from typing import Callable, Optional

import numpy as np

_INVPHI = (np.sqrt(5.0) - 1.0) / 2.0
_INVPHI2 = (3.0 - np.sqrt(5.0)) / 2.0


def adaptive_simpson(f: Callable[[float], np.ndarray], a: float, b: float,
                     tol: float, max_depth: int = 24) -> np.ndarray:
    """Integrate a (possibly vector-valued) f over [a, b] to absolute tolerance."""
    fa, fm, fb = f(a), f((a + b) / 2.0), f(b)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    return _simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth)


def _simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth):
    m = (a + b) / 2.0
    lm, rm = (a + m) / 2.0, (m + b) / 2.0
    flm, frm = f(lm), f(rm)
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    err = float(np.max(np.abs(left + right - whole)))
    if depth <= 0 or err <= 15.0 * tol:
        return left + right + (left + right - whole) / 15.0
    half = tol / 2.0
    return (_simpson_rec(f, a, m, fa, flm, fm, left, half, depth - 1)
            + _simpson_rec(f, m, b, fm, frm, fb, right, half, depth - 1))


def golden_min(f: Callable[[float], float], a: float, b: float,
               xtol: float) -> tuple[float, float]:
    """Golden-section minimum of a unimodal f on [a, b]; returns (x, f(x) estimate)."""
    h = b - a
    if h <= xtol:
        x = (a + b) / 2.0
        return x, f(x)
    c, d = a + _INVPHI2 * h, a + _INVPHI * h
    fc, fd = f(c), f(d)
    while h > xtol:
        if fc < fd:
            b, d, fd = d, c, fc
            h = b - a
            c = a + _INVPHI2 * h
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            h = b - a
            d = a + _INVPHI * h
            fd = f(d)
    return (a + b) / 2.0, min(fc, fd)


def bisect_root(f: Callable[[float], float], a: float, b: float,
                fa: Optional[float] = None, fb: Optional[float] = None,
                xtol: float = 1e-12, max_iter: int = 200) -> float:
    """Bisection on a sign change; endpoints must bracket a root."""
    fa = f(a) if fa is None else fa
    fb = f(b) if fb is None else fb
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if fa * fb > 0.0:
        raise ValueError("bisect_root: endpoints do not bracket a sign change")
    for _ in range(max_iter):
        m = 0.5 * (a + b)
        if b - a <= xtol:
            return m
        fm = f(m)
        if fm == 0.0:
            return m
        if fa * fm < 0.0:
            b, fb = m, fm
        else:
            a, fa = m, fm
    return 0.5 * (a + b)


def nonzero_integer_near(x: float, rel: float) -> Optional[int]:
    """Round x to the nearest nonzero integer if it is within rel * max(1, |x|)."""
    n = int(round(x))
    if n != 0 and abs(x - n) <= rel * max(1.0, abs(x)):
        return n
    return None


def null_space_basis(a: np.ndarray, rtol: float) -> np.ndarray:
    """Orthonormal basis (columns) of the numerical null space of a.

    The cutoff is rtol * max(sigma_max, 1) so that a uniformly tiny matrix is
    reported as identically zero rather than full rank.
    """
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if a.size == 0:
        return np.zeros((a.shape[1], 0))
    _, s, vh = np.linalg.svd(a)
    cutoff = rtol * max(float(s[0]) if s.size else 0.0, 1.0)
    rank = int(np.sum(s > cutoff))
    return vh[rank:].T.copy()


def cluster_scalars(values: np.ndarray, atol: float) -> list[tuple[float, np.ndarray]]:
    """Group nearly equal scalars; returns (mean, index array) per cluster."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return []
    order = np.argsort(values)
    clusters: list[tuple[float, np.ndarray]] = []
    start = 0
    sorted_vals = values[order]
    for i in range(1, values.size + 1):
        if i == values.size or sorted_vals[i] - sorted_vals[i - 1] > atol:
            idx = order[start:i]
            clusters.append((float(np.mean(values[idx])), idx))
            start = i
    return clusters
