"""Closed-form conjugate times, multiplicities, and Jacobi-field witnesses.

Case split on the initial data (z0, x0) of the geodesic, with J the
skew-adjoint operator of z0:

* J = 0 and x0 = 0: no conjugate points.
* J = 0, x0 != 0 ("polynomial"): times sqrt(-12/mu) for the real negative
  eigenvalues mu of the center coupling operator at x0.
* J != 0, x0 = 0 ("lattice"): times 2 pi n / lambda_k for the rates of the
  negative part of the spectrum, with summed eigenspace multiplicities.
* J != 0, x0 != 0 and one-dimensional center ("mixed"): lattice times with
  corrected multiplicities plus the simple roots of the scalar conjugacy
  function g(t) = <gdot, gdot>.

Higher-dimensional centers with J != 0 != x0 have no closed form here and
raise UnsupportedCaseError; the oracle module covers them numerically.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import expm

from .algebra import bracket_v, inner_v, inner_z, j_map
from .config import DEFAULT_TOL, Tolerances
from .errors import (
    CenterNotLineError,
    NoConjugateError,
    NotInImageError,
    PoleError,
    UnsupportedCaseError,
)
from .geometry import GeodesicSpec, JacobiField
from .numerics import bisect_root, cluster_scalars, golden_min, nonzero_integer_near
from .spectral import Spectrum, eigen_components, image_membership, center_coupling, spectrum

__all__ = [
    "ConjugateTime",
    "conjugate_times",
    "polynomial_times",
    "lattice_times",
    "mixed_times",
    "conjugacy_function",
    "conjugacy_function_closed",
    "build_jacobi_field",
    "attach_witnesses",
]


@dataclass(frozen=True, eq=False)
class ConjugateTime:
    """A conjugate time with its multiplicity and originating branch."""

    t: float
    multiplicity: int
    branch: str                 # "polynomial" | "lattice" | "transcendental"
    tangent: bool = False       # transcendental double root detected by tangency
    certificate: Optional[JacobiField] = None


def _is_zero_matrix(j: np.ndarray, scale: float, tol: Tolerances) -> bool:
    m = float(np.abs(j).max()) if j.size else 0.0
    return m <= tol.zero_rel * max(1.0, scale)


def _is_zero_vector(x: np.ndarray, tol: Tolerances) -> bool:
    m = float(np.abs(x).max()) if x.size else 0.0
    return m <= tol.zero_rel


def conjugate_times(geo: GeodesicSpec, t_max: float, tol: Tolerances = DEFAULT_TOL,
                    witnesses: bool = False) -> list[ConjugateTime]:
    """All conjugate times in (0, t_max], sorted, with multiplicities."""
    if t_max <= 0.0:
        raise ValueError("t_max must be positive")
    z_scale = float(np.abs(geo.z0).max()) if geo.z0.size else 0.0
    j_zero = _is_zero_matrix(geo.J, z_scale, tol)
    x_zero = _is_zero_vector(geo.x0, tol)
    if j_zero and x_zero:
        out: list[ConjugateTime] = []
    elif j_zero:
        out = polynomial_times(geo, t_max, tol)
    elif x_zero:
        out = lattice_times(geo, t_max, tol)
    elif geo.alg.dim_center == 1:
        out = mixed_times(geo, t_max, tol)
    else:
        raise UnsupportedCaseError(
            "no closed form for a higher-dimensional center with z0 != 0 != x0; "
            "use the numerical oracle")
    out = sorted(out, key=lambda ct: ct.t)
    if witnesses:
        out = attach_witnesses(geo, out, tol)
    return out


def polynomial_times(geo: GeodesicSpec, t_max: float,
                     tol: Tolerances = DEFAULT_TOL) -> list[ConjugateTime]:
    """Conjugate times of a straight geodesic (J = 0, x0 != 0)."""
    coupling = center_coupling(geo.alg, geo.x0)
    w = np.linalg.eigvals(coupling)
    scale = float(np.abs(w).max()) if w.size else 0.0
    thr = tol.cluster_rel * max(scale, 1e-300)
    real_neg = [val.real for val in w if abs(val.imag) <= thr and val.real < -thr]
    out = []
    for mu, _ in cluster_scalars(np.asarray(real_neg), thr):
        t = float(np.sqrt(-12.0 / mu))
        if t <= t_max * (1.0 + 1e-12):
            basis = _plain_eigroom(coupling, mu, tol)
            out.append(ConjugateTime(t, basis.shape[1], "polynomial"))
    return out


def _plain_eigroom(mat: np.ndarray, mu: float, tol: Tolerances) -> np.ndarray:
    shifted = mat - mu * np.eye(mat.shape[0])
    _, s, vh = np.linalg.svd(shifted)
    cutoff = tol.rank_rel * max(float(s[0]) if s.size else 0.0, 1.0)
    rank = int(np.sum(s > cutoff))
    return vh[rank:].T.copy()


def _distinct_lattice_times(spec: Spectrum, t_max: float, tol: Tolerances) -> list[float]:
    raw = []
    for line in spec.neg:
        n_max = int(np.floor(t_max * line.rate / (2.0 * np.pi) * (1.0 + 1e-12)))
        raw.extend(2.0 * np.pi * n / line.rate for n in range(1, n_max + 1))
    if not raw:
        return []
    atol = tol.merge_rel * (1.0 + t_max)
    return [rep for rep, _ in cluster_scalars(np.asarray(raw), atol)]


def _lattice_match(spec: Spectrum, t: float, tol: Tolerances) -> tuple[int, np.ndarray]:
    """Summed eigenspace multiplicity at t and the matching kernel basis."""
    total = 0
    cols = []
    for line in spec.neg:
        if nonzero_integer_near(t * line.rate / (2.0 * np.pi), tol.integer_rel) is not None:
            total += line.mult
            cols.append(line.basis)
    kernel = np.hstack(cols) if cols else np.zeros((spec.dim_v, 0))
    return total, kernel


def lattice_times(geo: GeodesicSpec, t_max: float,
                  tol: Tolerances = DEFAULT_TOL) -> list[ConjugateTime]:
    """Conjugate times of a central geodesic (x0 = 0, J != 0)."""
    spec = spectrum(geo.J, tol)
    out = []
    for t in _distinct_lattice_times(spec, t_max, tol):
        total, _ = _lattice_match(spec, t, tol)
        if total > 0:
            out.append(ConjugateTime(t, total, "lattice"))
    return out


# ---------------------------------------------------------------------------
# scalar conjugacy function for the one-dimensional-center mixed case


def _ucot(u: float) -> float:
    if abs(u) < 1e-4:
        u2 = u * u
        return 1.0 - u2 / 3.0 - u2 * u2 / 45.0
    return u * np.cos(u) / np.sin(u)


def _ducot(u: float) -> float:
    # d/du (u cot u) = cot u - u (1 + cot^2 u)
    if abs(u) < 1e-4:
        return -2.0 * u / 3.0 - 4.0 * u ** 3 / 45.0
    c = np.cos(u) / np.sin(u)
    return c - u * (1.0 + c * c)


def _ucoth(u: float) -> float:
    if abs(u) < 1e-4:
        u2 = u * u
        return 1.0 + u2 / 3.0 - u2 * u2 / 45.0
    if abs(u) > 350.0:
        return abs(u)
    return u / np.tanh(u)


def _ducoth(u: float) -> float:
    # d/du (u coth u) = coth u - u (coth^2 u - 1)
    if abs(u) < 1e-4:
        return 2.0 * u / 3.0 - 4.0 * u ** 3 / 45.0
    if abs(u) > 350.0:
        return 1.0 if u > 0 else -1.0
    c = 1.0 / np.tanh(u)
    return c - u * (c * c - 1.0)


def _closed_data(geo: GeodesicSpec, spec: Spectrum,
                 tol: Tolerances) -> Optional[tuple[list, list, float]]:
    """Metric squares of the eigenspace components of x0, or None without the
    diagonalizability certificate."""
    if not spec.diagonalizable:
        return None
    comps = eigen_components(spec, geo.x0)
    neg = [(lam, inner_v(geo.alg, a, a)) for lam, a in comps.neg]
    pos = [(lam, inner_v(geo.alg, b, b)) for lam, b in comps.pos]
    ker2 = inner_v(geo.alg, comps.kernel, comps.kernel)
    return neg, pos, float(ker2)


def _closed_value(data: tuple[list, list, float], t: float) -> float:
    neg, pos, ker2 = data
    val = ker2
    for lam, a2 in neg:
        val += a2 * _ucot(0.5 * lam * t)
    for lam, b2 in pos:
        val += b2 * _ucoth(0.5 * lam * t)
    return float(val)


def _closed_derivative(data: tuple[list, list, float], t: float) -> float:
    neg, pos, _ = data
    val = 0.0
    for lam, a2 in neg:
        val += a2 * 0.5 * lam * _ducot(0.5 * lam * t)
    for lam, b2 in pos:
        val += b2 * 0.5 * lam * _ducoth(0.5 * lam * t)
    return float(val)


def conjugacy_function(geo: GeodesicSpec, t: float,
                       tol: Tolerances = DEFAULT_TOL) -> float:
    """g(t) = <J x0, v> with (exp(-tJ) - I) v = t x0; poles at lattice times.

    Conjugate times of the transcendental branch are the solutions of
    g(t) = <gdot, gdot>.
    """
    if t == 0.0:
        raise PoleError("conjugacy function is a limit at t = 0, not a value")
    member, v = image_membership(geo.J, t, geo.x0, geo.alg.gram_v, tol)
    if not member:
        spec = spectrum(geo.J, tol)
        total, _ = _lattice_match(spec, t, tol)
        if total > 0:
            raise PoleError(f"t = {t} is a lattice pole of the conjugacy function")
        raise NotInImageError(
            "x0 is not in the image of exp(-tJ) - I; no transcendental root can occur here")
    return inner_v(geo.alg, geo.J @ geo.x0, v)


def conjugacy_function_closed(geo: GeodesicSpec, t: float,
                              tol: Tolerances = DEFAULT_TOL) -> float:
    """Explicit cot/coth form of the conjugacy function.

    Requires the real-split certificate of the spectrum; each negative rate
    contributes <A,A> (lt/2) cot(lt/2), each positive rate <B,B> (lt/2)
    coth(lt/2), and a kernel component contributes its constant metric square
    (the zero-rate limit).
    """
    if t == 0.0:
        raise PoleError("conjugacy function is a limit at t = 0, not a value")
    spec = spectrum(geo.J, tol)
    data = _closed_data(geo, spec, tol)
    if data is None:
        raise NotInImageError("closed form requires a diagonalizable operator")
    return _closed_value(data, t)


def _kernel_obstruction(geo: GeodesicSpec, spec: Spectrum, tol: Tolerances) -> bool:
    """True when x0 metrically pairs with ker J, so x0 is never in the image."""
    if spec.zero_basis.shape[1] == 0:
        return False
    pair = spec.zero_basis.T @ (geo.alg.gram_v @ geo.x0)
    return bool(np.any(np.abs(pair) > tol.ortho_rel * (1.0 + np.linalg.norm(geo.x0))))


def _scan_transcendental(geo: GeodesicSpec, spec: Spectrum, poles: list[float],
                         t_max: float, tol: Tolerances) -> list[ConjugateTime]:
    if _kernel_obstruction(geo, spec, tol):
        return []
    data = _closed_data(geo, spec, tol)

    def g_minus_speed(t: float) -> float:
        if data is not None:
            return _closed_value(data, t) - geo.speed
        try:
            return conjugacy_function(geo, t, tol) - geo.speed
        except (PoleError, NotInImageError):
            return np.nan

    neg_rates = [line.rate for line in spec.neg]
    lam_max = max(neg_rates) if neg_rates else 0.0
    edges = [0.0] + [p for p in poles if p < t_max] + [t_max]
    fscale = abs(geo.speed) + abs(inner_v(geo.alg, geo.x0, geo.x0)) + 1.0
    roots: list[tuple[float, bool]] = []
    for a, b in zip(edges[:-1], edges[1:]):
        margin = 1e-9 * max(1.0, b)
        lo, hi = a + margin, b - margin
        if hi <= lo:
            continue
        delta = (hi - lo) / 64.0
        if lam_max > 0.0:
            delta = min(delta, np.pi / (4.0 * lam_max))
        npts = int(np.clip(np.ceil((hi - lo) / delta) + 1, 9, 4097))
        ts = np.linspace(lo, hi, npts)
        fv = np.array([g_minus_speed(t) for t in ts])
        for i in range(npts - 1):
            f0, f1 = fv[i], fv[i + 1]
            if not (np.isfinite(f0) and np.isfinite(f1)):
                continue
            if f0 == 0.0:
                roots.append((float(ts[i]), False))
                continue
            if f0 * f1 < 0.0:
                root = bisect_root(g_minus_speed, float(ts[i]), float(ts[i + 1]),
                                   fa=float(f0), fb=float(f1), xtol=tol.bisect_tol)
                if data is not None:
                    for _ in range(2):  # Newton polish on the closed form
                        d = _closed_derivative(data, root)
                        if d == 0.0 or not np.isfinite(d):
                            break
                        step = (_closed_value(data, root) - geo.speed) / d
                        if abs(step) > delta:
                            break
                        root -= step
                roots.append((float(root), False))
        if fv[-1] == 0.0 and np.isfinite(fv[-1]):
            roots.append((float(ts[-1]), False))
        # tangency sweep: interior |f| minima without a sign change
        for i in range(1, npts - 1):
            window = fv[i - 1:i + 2]
            if not np.all(np.isfinite(window)):
                continue
            if abs(fv[i]) <= abs(fv[i - 1]) and abs(fv[i]) <= abs(fv[i + 1]):
                if fv[i - 1] * fv[i + 1] > 0.0 and abs(fv[i]) < 1e-6 * fscale:
                    x_min, f_min = golden_min(lambda t: abs(g_minus_speed(t)),
                                              float(ts[i - 1]), float(ts[i + 1]),
                                              xtol=tol.refine_tol)
                    if f_min <= 1e-8 * fscale:
                        roots.append((float(x_min), True))
    out = []
    seen: list[float] = []
    for root, tangent in sorted(roots):
        if any(abs(root - s) <= tol.merge_rel * max(1.0, root) + 2e-9 for s in seen):
            continue
        if any(abs(root - p) <= tol.merge_rel * max(1.0, p) + 2e-9 for p in poles):
            continue
        seen.append(root)
        if root <= t_max * (1.0 + 1e-12):
            out.append(ConjugateTime(root, 1, "transcendental", tangent=tangent))
    return out


def mixed_times(geo: GeodesicSpec, t_max: float,
                tol: Tolerances = DEFAULT_TOL) -> list[ConjugateTime]:
    """Conjugate times for a one-dimensional center with z0 != 0 != x0.

    Lattice times get the summed eigenspace multiplicity corrected by the
    membership of x0 in im(exp(-tJ) - I): minus one when the pairing
    functional <J x0, .> is nonzero on the matching kernel (in particular
    whenever x0 is not in the image with a generic regular part), plus one
    when a preimage v of t x0 satisfies <J x0, v> = <gdot, gdot>.  Entries
    with corrected multiplicity zero are dropped.  On top of that, every
    root of g(t) = <gdot, gdot> between consecutive poles contributes a
    simple conjugate time.
    """
    if geo.alg.dim_center != 1:
        raise CenterNotLineError("mixed closed form requires a one-dimensional center")
    spec = spectrum(geo.J, tol)
    poles = _distinct_lattice_times(spec, t_max, tol)
    gjx = geo.alg.gram_v @ (geo.J @ geo.x0)
    out = []
    for t in poles:
        total, kernel = _lattice_match(spec, t, tol)
        member, v = image_membership(geo.J, t, geo.x0, geo.alg.gram_v, tol)
        if member:
            pairing = inner_v(geo.alg, geo.J @ geo.x0, v)
            speed_scale = 1.0 + abs(geo.speed) + abs(pairing)
            bonus = abs(pairing - geo.speed) <= tol.speed_eq_rel * speed_scale
            mult = total + 1 if bonus else total
        else:
            func = kernel.T @ gjx if kernel.shape[1] else np.zeros(0)
            nonvanishing = bool(np.any(np.abs(func) > tol.ortho_rel
                                       * (1.0 + np.linalg.norm(gjx))))
            mult = total - 1 if nonvanishing else total
        if mult > 0:
            out.append(ConjugateTime(t, mult, "lattice"))
    out.extend(_scan_transcendental(geo, spec, poles, t_max, tol))
    return sorted(out, key=lambda ct: ct.t)


# ---------------------------------------------------------------------------
# explicit witness fields


def _witness_grid(geo: GeodesicSpec, t0: float, tol: Tolerances) -> np.ndarray:
    jnorm = float(np.linalg.norm(geo.J, 2)) if geo.J.size else 0.0
    h = tol.fd_step / max(1.0, jnorm * jnorm)
    n = int(np.clip(np.ceil(t0 / h) + 1, 9, 400_001))
    return np.linspace(0.0, t0, n)


def _transport_rows(j: np.ndarray, times: np.ndarray, vec: np.ndarray) -> np.ndarray:
    """Rows exp(-t_i J) vec on a uniform grid, by a stepwise recurrence."""
    n = times.size
    out = np.empty((n, vec.size))
    step = expm(-(times[1] - times[0]) * j) if n > 1 else np.eye(vec.size)
    cur = expm(-times[0] * j) @ vec
    for i in range(n):
        out[i] = cur
        cur = step @ cur
    return out


def _alpha_from(geo: GeodesicSpec, times: np.ndarray, g_rows: np.ndarray,
                w: np.ndarray, c: float) -> np.ndarray:
    """Center coefficient alpha(t) = c t + <Jx0, Jinv g(t) + t w> / <z0, z0>.

    g_rows holds (exp(-tJ) - I) w per row, which always lies in im J, so the
    least-squares solve is exact up to roundoff and any kernel ambiguity is
    killed by the pairing with J x0.
    """
    y, *_ = np.linalg.lstsq(geo.J, g_rows.T, rcond=None)
    gjx = geo.alg.gram_v @ (geo.J @ geo.x0)
    szz = inner_z(geo.alg, geo.z0, geo.z0)
    return c * times + (y.T @ gjx + times * float(w @ gjx)) / szz


def _normalize_field(geo: GeodesicSpec, times: np.ndarray, z_rows: np.ndarray,
                     v_rows: np.ndarray, zeta: np.ndarray) -> JacobiField:
    n = times.size
    stride = max(1, n // 2048)
    idx = np.arange(0, n, stride)
    if idx[-1] != n - 1:
        idx = np.append(idx, n - 1)
    amp = float(np.abs(z_rows[idx]).max()) if z_rows.size else 0.0
    step = expm(times[stride] * geo.J) if n > stride else np.eye(geo.alg.dim_v)
    cur = np.eye(geo.alg.dim_v)
    for k in idx[:-1] if idx.size > 1 else idx:
        amp = max(amp, float(np.abs(cur @ v_rows[k]).max()))
        cur = step @ cur
    amp = max(amp, float(np.abs(expm(times[-1] * geo.J) @ v_rows[-1]).max()))
    if amp <= 0.0:
        raise NoConjugateError("witness construction produced the zero field")
    return JacobiField(zeta / amp, times, z_rows / amp, v_rows / amp)


def _polynomial_witness(geo: GeodesicSpec, t0: float, tol: Tolerances) -> JacobiField:
    coupling = center_coupling(geo.alg, geo.x0)
    mu = -12.0 / (t0 * t0)
    basis = _plain_eigroom(coupling, mu, tol)
    if basis.shape[1] == 0:
        raise NoConjugateError(f"no eigenvector for the requested time {t0}")
    zeta = basis[:, 0]
    b = j_map(geo.alg, zeta) @ geo.x0
    brk = bracket_v(geo.alg, b, geo.x0)
    times = _witness_grid(geo, t0, tol)
    v_rows = (0.5 * times * (times - t0))[:, None] * b[None, :]
    z_rows = ((times ** 3 / 6.0 - t0 * times ** 2 / 4.0)[:, None] * brk[None, :]
              + times[:, None] * zeta[None, :])
    return _normalize_field(geo, times, z_rows, v_rows, zeta)


def _lattice_witness(geo: GeodesicSpec, t0: float, tol: Tolerances) -> JacobiField:
    spec = spectrum(geo.J, tol)
    _, kernel = _lattice_match(spec, t0, tol)
    if kernel.shape[1] == 0:
        raise NoConjugateError(f"no lattice kernel at t = {t0}")
    x_zero = _is_zero_vector(geo.x0, tol)
    if x_zero:
        v0 = kernel[:, 0]
    else:
        gjx = geo.alg.gram_v @ (geo.J @ geo.x0)
        func = kernel.T @ gjx
        if np.all(np.abs(func) <= tol.ortho_rel * (1.0 + np.linalg.norm(gjx))):
            v0 = kernel[:, 0]
        else:
            if kernel.shape[1] < 2:
                raise NoConjugateError(f"no admissible lattice witness at t = {t0}")
            # combination annihilating the pairing functional
            _, _, vh = np.linalg.svd(func[None, :])
            v0 = kernel @ vh[1:].T[:, 0]
    times = _witness_grid(geo, t0, tol)
    transported = _transport_rows(geo.J, times, v0)
    v_rows = transported - v0[None, :]
    if x_zero:
        z_rows = np.zeros((times.size, geo.alg.dim_center))
    else:
        alpha = _alpha_from(geo, times, v_rows, v0, c=0.0)
        z_rows = alpha[:, None] * geo.z0[None, :]
    return _normalize_field(geo, times, z_rows, v_rows, np.zeros(geo.alg.dim_center))


def _transcendental_witness(geo: GeodesicSpec, t0: float, tol: Tolerances) -> JacobiField:
    member, u = image_membership(geo.J, t0, geo.x0, geo.alg.gram_v, tol)
    if not member:
        raise NotInImageError(f"no preimage for the transcendental witness at t = {t0}")
    times = _witness_grid(geo, t0, tol)
    transported = _transport_rows(geo.J, times, u)
    g_rows = u[None, :] - transported          # (exp(-tJ) - I) (-u)
    v_rows = times[:, None] * geo.x0[None, :] + g_rows
    alpha = _alpha_from(geo, times, g_rows, -u, c=1.0)
    z_rows = alpha[:, None] * geo.z0[None, :]
    return _normalize_field(geo, times, z_rows, v_rows, geo.z0.copy())


def build_jacobi_field(geo: GeodesicSpec, ct: ConjugateTime,
                       tol: Tolerances = DEFAULT_TOL) -> JacobiField:
    """Explicit nontrivial Jacobi field vanishing at 0 and at ct.t.

    The field is normalized so that its largest frame-coordinate sample has
    unit magnitude, which keeps finite-difference residual checks meaningful.
    """
    if ct.branch == "polynomial":
        return _polynomial_witness(geo, ct.t, tol)
    if ct.branch == "lattice":
        return _lattice_witness(geo, ct.t, tol)
    if ct.branch == "transcendental":
        return _transcendental_witness(geo, ct.t, tol)
    raise ValueError(f"unknown branch {ct.branch!r}")


def attach_witnesses(geo: GeodesicSpec, cts: list[ConjugateTime],
                     tol: Tolerances = DEFAULT_TOL) -> list[ConjugateTime]:
    return [dataclasses.replace(ct, certificate=build_jacobi_field(geo, ct, tol))
            for ct in cts]
