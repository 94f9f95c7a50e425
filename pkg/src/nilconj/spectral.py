"""Spectral analysis of the skew-adjoint operators on the complement.

Covers the splitting of the squared operator into negative / positive / zero
eigenvalue parts, kernels of exp(tJ) - I restricted to the invertible part,
image membership with preimages, and the coupling operator on the center
induced by a fixed complement vector.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
from scipy.linalg import expm

from .algebra import MetricLieAlgebra, bracket_v
from .config import DEFAULT_TOL, Tolerances
from .errors import NotDiagonalizableError
from .numerics import cluster_scalars, nonzero_integer_near, null_space_basis

__all__ = [
    "EigenLine",
    "Spectrum",
    "spectrum",
    "lattice_kernel",
    "image_membership",
    "center_coupling",
    "EigenComponents",
    "eigen_components",
]


@dataclass(frozen=True, eq=False)
class EigenLine:
    """One real spectral line of the squared operator."""

    rate: float          # lambda > 0; the eigenvalue of J^2 is -lambda^2 (neg) or +lambda^2 (pos)
    mult: int            # plain eigenspace dimension
    basis: np.ndarray    # (dim_v, mult) orthonormal columns


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Real spectral data of J^2 on the complement."""

    neg: tuple[EigenLine, ...]
    pos: tuple[EigenLine, ...]
    zero_mult: int            # algebraic multiplicity of 0 (generalized null space dim)
    zero_basis: np.ndarray    # plain kernel of J
    complex_dim: int          # eigenvalues of J off both axes (diagnostic only)
    diagonalizable: bool      # plain eigenspace dims sum to dim_v (real split certificate)
    dim_v: int


def spectrum(j: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> Spectrum:
    """Classify the spectrum of J via the eigenvalues of J itself.

    Eigenvalues are taken from J, not J^2, for better conditioning when J is
    defective; purely imaginary ones feed the negative list of J^2, purely
    real nonzero ones the positive list.  Eigenspace bases and multiplicities
    come from rank-revealing factorizations of J^2 -+ lambda^2 I.
    """
    j = np.asarray(j, dtype=float)
    q = j.shape[0]
    w = np.linalg.eigvals(j)
    scale = float(np.abs(w).max()) if w.size else 0.0
    thr = tol.cluster_rel * scale
    neg_rates: list[float] = []
    pos_rates: list[float] = []
    zero_mult = 0
    complex_dim = 0
    for val in w:
        re, im = abs(val.real), abs(val.imag)
        if re <= thr and im <= thr:
            zero_mult += 1
        elif re <= thr:
            neg_rates.append(im)
        elif im <= thr:
            pos_rates.append(re)
        else:
            complex_dim += 1
    j2 = j @ j
    eye = np.eye(q)
    neg_lines = []
    for lam, _ in cluster_scalars(np.asarray(neg_rates), thr):
        basis = null_space_basis(j2 + lam * lam * eye, tol.rank_rel)
        neg_lines.append(EigenLine(lam, basis.shape[1], basis))
    pos_lines = []
    for lam, _ in cluster_scalars(np.asarray(pos_rates), thr):
        basis = null_space_basis(j2 - lam * lam * eye, tol.rank_rel)
        pos_lines.append(EigenLine(lam, basis.shape[1], basis))
    zero_basis = null_space_basis(j, tol.rank_rel)
    plain_sum = (sum(l.mult for l in neg_lines) + sum(l.mult for l in pos_lines)
                 + zero_basis.shape[1])
    return Spectrum(
        neg=tuple(neg_lines),
        pos=tuple(pos_lines),
        zero_mult=zero_mult,
        zero_basis=zero_basis,
        complex_dim=complex_dim,
        diagonalizable=bool(plain_sum == q),
        dim_v=q,
    )


def lattice_kernel(j: np.ndarray, t: float, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Basis of ker(exp(tJ) - I) inside the part where J is invertible.

    Equals the direct sum of the eigenspaces ker(J^2 + lambda^2 I) over the
    rates with t * lambda in 2 pi Z \\ {0}; the plain kernel of J is excluded
    by construction.
    """
    spec = spectrum(np.asarray(j, dtype=float), tol)
    cols = [line.basis for line in spec.neg
            if nonzero_integer_near(t * line.rate / (2.0 * np.pi), tol.integer_rel) is not None]
    if not cols:
        return np.zeros((spec.dim_v, 0))
    return np.hstack(cols)


def image_membership(j: np.ndarray, t: float, x: np.ndarray, gram_v: np.ndarray,
                     tol: Tolerances = DEFAULT_TOL) -> tuple[bool, Optional[np.ndarray]]:
    """Decide x in im(exp(-tJ) - I) and return v with (exp(-tJ) - I) v = t x.

    Membership is metric orthogonality of x to ker(exp(-tJ) - I); any
    least-squares preimage is acceptable because the downstream pairing
    <Jx, v> does not depend on the choice.
    """
    j = np.asarray(j, dtype=float)
    x = np.asarray(x, dtype=float)
    op = expm(-t * j) - np.eye(j.shape[0])
    kern = null_space_basis(op, tol.rank_rel)
    xnorm = float(np.linalg.norm(x))
    if kern.shape[1]:
        pairings = kern.T @ (gram_v @ x)
        if np.any(np.abs(pairings) > tol.ortho_rel * (1.0 + xnorm)):
            return False, None
    v, *_ = np.linalg.lstsq(op, t * x, rcond=None)
    resid = float(np.linalg.norm(op @ v - t * x))
    if resid > tol.ortho_rel * (1.0 + abs(t)) * (1.0 + xnorm):
        # Defensive: orthogonality said member but the solve disagrees.
        return False, None
    return True, v


def center_coupling(alg: MetricLieAlgebra, x0: np.ndarray) -> np.ndarray:
    """Matrix on the center of z -> [x0, J_z x0].

    Self-adjoint for the center metric; its real negative eigenvalues encode
    the conjugate times of straight-line geodesics through x0.
    """
    x0 = np.asarray(x0, dtype=float)
    cols = [bracket_v(alg, x0, alg._j_basis[a] @ x0) for a in range(alg.dim_center)]
    return np.stack(cols, axis=1)


class EigenComponents(NamedTuple):
    """Decomposition of a complement vector along the real eigenspaces of J^2."""

    neg: list[tuple[float, np.ndarray]]   # (rate, component) per negative line
    pos: list[tuple[float, np.ndarray]]   # (rate, component) per positive line
    kernel: np.ndarray                    # component in the plain kernel of J


def eigen_components(spec: Spectrum, x0: np.ndarray) -> EigenComponents:
    """Split x0 along the eigenspace bases of a diagonalizable spectrum."""
    if not spec.diagonalizable:
        raise NotDiagonalizableError(
            "eigenspace decomposition requires the real-split certificate")
    blocks = [line.basis for line in spec.neg] + [line.basis for line in spec.pos]
    if spec.zero_basis.shape[1]:
        blocks.append(spec.zero_basis)
    basis = np.hstack(blocks) if blocks else np.zeros((spec.dim_v, 0))
    if basis.shape != (spec.dim_v, spec.dim_v):
        raise NotDiagonalizableError("eigenspace bases do not span the complement")
    coeff = np.linalg.solve(basis, np.asarray(x0, dtype=float))
    neg: list[tuple[float, np.ndarray]] = []
    pos: list[tuple[float, np.ndarray]] = []
    offset = 0
    for line in spec.neg:
        neg.append((line.rate, line.basis @ coeff[offset:offset + line.mult]))
        offset += line.mult
    for line in spec.pos:
        pos.append((line.rate, line.basis @ coeff[offset:offset + line.mult]))
        offset += line.mult
    kernel = spec.zero_basis @ coeff[offset:] if spec.zero_basis.shape[1] else np.zeros(spec.dim_v)
    return EigenComponents(neg, pos, kernel)
