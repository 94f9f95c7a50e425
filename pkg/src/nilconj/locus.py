"""Sampling the conjugate locus inside exp(v) and its tubular neighborhood.

For a one-dimensional nondegenerate center with unit vector z (sign
eps = <z,z>), a straight horizontal geodesic with velocity x0 has its first
conjugate point at t = 2 sqrt(3) / Delta, where

    Delta^2 = sum_l lambda_l^2 eps <B_l,B_l> - sum_k lambda_k^2 eps <A_k,A_k>

over the real-rate (B) and imaginary-rate (A) components of x0 under J_z.
No conjugate point exists unless Delta^2 > 0.  The tubular neighborhood is
traced by the ray family gdot_a = a z + x0, following the root t(a) of the
scalar conjugacy equation away from a = 0 by a predictor-corrector
continuation; t(a) -> 2 sqrt(3)/Delta as a -> 0.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .algebra import MetricLieAlgebra, inner_v, j_map
from .config import DEFAULT_TOL, Tolerances
from .conjugate import _ducot, _ducoth, _ucot, _ucoth, polynomial_times
from .errors import CenterNotLineError, NoConjugateError, RootLostError, UnsupportedCaseError
from .geometry import GeodesicSpec, geodesic_point
from .spectral import eigen_components, spectrum

__all__ = [
    "LocusSample",
    "conjugate_rate",
    "sample_horizontal_locus",
    "continuation",
    "export_samples",
    "load_samples",
]

_2SQRT3 = 2.0 * np.sqrt(3.0)


@dataclass(frozen=True)
class LocusSample:
    """One conjugate-locus point: direction, family parameter, time, position."""

    x0: np.ndarray
    a: float
    t: float
    point: np.ndarray    # exponential coordinates, center block first
    delta: float


def _unit_center(alg: MetricLieAlgebra) -> tuple[np.ndarray, float]:
    if alg.dim_center != 1:
        raise CenterNotLineError("this construction requires a one-dimensional center")
    g = float(alg.gram_center[0, 0])
    return np.array([1.0 / np.sqrt(abs(g))]), float(np.sign(g))


def _rate_components(alg: MetricLieAlgebra, x0: np.ndarray,
                     tol: Tolerances) -> tuple[list, list, float, float]:
    """(neg (lam, <A,A>), pos (lam, <B,B>), <ker,ker>, eps) for the unit-center J."""
    zu, eps = _unit_center(alg)
    spec = spectrum(j_map(alg, zu), tol)
    comps = eigen_components(spec, x0)   # raises NotDiagonalizableError when defective
    neg = [(lam, inner_v(alg, a, a)) for lam, a in comps.neg]
    pos = [(lam, inner_v(alg, b, b)) for lam, b in comps.pos]
    return neg, pos, float(inner_v(alg, comps.kernel, comps.kernel)), eps


def conjugate_rate(alg: MetricLieAlgebra, x0: np.ndarray,
                   tol: Tolerances = DEFAULT_TOL) -> float:
    """Delta > 0 such that the first conjugate time along x0 is 2 sqrt(3)/Delta.

    Raises NoConjugateError when the signed rate sum is not positive (then the
    straight geodesic has no conjugate points at all).
    """
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    neg, pos, _, eps = _rate_components(alg, x0, tol)
    d2 = (sum(lam * lam * eps * b2 for lam, b2 in pos)
          - sum(lam * lam * eps * a2 for lam, a2 in neg))
    if d2 <= tol.zero_rel:
        raise NoConjugateError("signed squared-rate sum is not positive; "
                               "no conjugate point on this straight geodesic")
    return float(np.sqrt(d2))


def sample_horizontal_locus(alg: MetricLieAlgebra, directions: list[np.ndarray],
                            tol: Tolerances = DEFAULT_TOL,
                            method: str = "auto") -> list[LocusSample]:
    """First conjugate points of straight geodesics, one sample per direction.

    method "delta" uses the rate formula (one-dimensional center only);
    "general" uses the eigenvalue route valid for any center dimension; both
    agree where both apply.  Directions without conjugate points are skipped.
    """
    if method == "auto":
        method = "delta" if alg.dim_center == 1 else "general"
    out = []
    for direction in directions:
        x0 = np.asarray(direction, dtype=float).reshape(-1)
        if method == "delta":
            try:
                delta = conjugate_rate(alg, x0, tol)
            except NoConjugateError:
                continue
            t = _2SQRT3 / delta
        elif method == "general":
            geo0 = GeodesicSpec(alg, np.zeros(alg.dim_center), x0)
            times = polynomial_times(geo0, t_max=1e12, tol=tol)
            if not times:
                continue
            t = min(ct.t for ct in times)
            delta = _2SQRT3 / t
        else:
            raise ValueError(f"unknown method {method!r}")
        geo = GeodesicSpec(alg, np.zeros(alg.dim_center), x0)
        point = geodesic_point(geo, t, tol).coords()
        out.append(LocusSample(x0, 0.0, float(t), point, float(delta)))
    return out


def _family_value(neg: list, pos: list, ker2: float, s: float, t: float) -> float:
    val = ker2
    for lam, a2 in neg:
        val += a2 * _ucot(0.5 * s * lam * t)
    for lam, b2 in pos:
        val += b2 * _ucoth(0.5 * s * lam * t)
    return val


def _family_derivative(neg: list, pos: list, s: float, t: float) -> float:
    val = 0.0
    for lam, a2 in neg:
        val += a2 * 0.5 * s * lam * _ducot(0.5 * s * lam * t)
    for lam, b2 in pos:
        val += b2 * 0.5 * s * lam * _ducoth(0.5 * s * lam * t)
    return val


def _track_root(neg: list, pos: list, ker2: float, speed0: float, eps: float,
                s: float, predictor: float, a: float) -> float:
    """Root of g_a(t) = speed_a nearest the predictor; Newton, bisection fallback."""

    def f(t: float) -> float:
        return _family_value(neg, pos, ker2, s, t) - speed0 - s * s * eps

    t = predictor
    lo, hi = 0.5 * predictor, 1.5 * predictor
    for _ in range(60):
        ft = f(t)
        df = _family_derivative(neg, pos, s, t)
        if df == 0.0 or not np.isfinite(df):
            break
        t_new = t - ft / df
        if not (lo < t_new < hi):
            break
        if abs(t_new - t) <= 1e-13 * max(1.0, t):
            return t_new
        t = t_new
    # bisection fallback inside the trust window
    grid = np.linspace(lo, hi, 65)
    fv = [f(x) for x in grid]
    for i in range(len(grid) - 1):
        if np.isfinite(fv[i]) and np.isfinite(fv[i + 1]) and fv[i] * fv[i + 1] < 0.0:
            a_, b_ = float(grid[i]), float(grid[i + 1])
            fa = fv[i]
            for _ in range(200):
                mid = 0.5 * (a_ + b_)
                fm = f(mid)
                if fm == 0.0 or (b_ - a_) < 1e-13 * max(1.0, mid):
                    return mid
                if fa * fm < 0.0:
                    b_ = mid
                else:
                    a_, fa = mid, fm
            return 0.5 * (a_ + b_)
    raise RootLostError(f"continuation lost the conjugate-time root at a = {a}")


def continuation(alg: MetricLieAlgebra, x0: np.ndarray, a_grid: list[float],
                 tol: Tolerances = DEFAULT_TOL) -> list[LocusSample]:
    """Track t(a) for the ray family gdot_a = a z + x0 from the a = 0 limit.

    Processes the grid by increasing |a| so each root is predicted by its
    neighbor; the family is even in a, so both signs share one track.  Every
    sample's geodesic has speed <x0,x0> + a^2 eps.
    """
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    zu, eps = _unit_center(alg)
    delta = conjugate_rate(alg, x0, tol)    # rejects Delta <= 0 up front
    neg, pos, ker2, _ = _rate_components(alg, x0, tol)
    speed0 = inner_v(alg, x0, x0)
    t_limit = _2SQRT3 / delta
    track: dict[float, float] = {0.0: t_limit}
    for s in sorted({abs(float(a)) for a in a_grid if a != 0.0}):
        predictor = track[max(k for k in track if k < s)]
        track[s] = _track_root(neg, pos, ker2, speed0, eps, s, predictor, s)
    out = []
    for a in a_grid:
        a = float(a)
        t = track[abs(a)]
        geo = GeodesicSpec(alg, a * zu, x0)
        point = geodesic_point(geo, t, tol).coords()
        out.append(LocusSample(x0, a, float(t), point, delta))
    return out


def export_samples(samples: list[LocusSample], path: str, fmt: str = "csv") -> None:
    """Write samples as CSV (a, t, delta, point coords) or an OBJ vertex cloud."""
    if fmt == "csv":
        n = samples[0].point.size if samples else 0
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["a", "t", "delta"] + [f"point_{i + 1}" for i in range(n)])
            for s in samples:
                writer.writerow([f"{s.a:.17g}", f"{s.t:.17g}", f"{s.delta:.17g}"]
                                + [f"{c:.17g}" for c in s.point])
    elif fmt == "obj":
        if samples and samples[0].point.size != 3:
            raise UnsupportedCaseError("OBJ export needs three-dimensional points")
        with open(path, "w") as fh:
            fh.write("# conjugate locus vertex cloud\n")
            for s in samples:
                fh.write("v " + " ".join(f"{c:.17g}" for c in s.point) + "\n")
    else:
        raise ValueError(f"unknown export format {fmt!r}")


def load_samples(path: str) -> list[tuple[float, float, float, np.ndarray]]:
    """Read back a CSV written by export_samples as (a, t, delta, point) rows."""
    out = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        n = len(header) - 3
        for row in reader:
            vals = [float(c) for c in row]
            out.append((vals[0], vals[1], vals[2], np.asarray(vals[3:3 + n])))
    return out
