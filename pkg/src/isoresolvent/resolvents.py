"""Generalized resolvents of an isometric operator and their boundary behavior.

The resolvent is defined on the open disk by the parametrized formulas
(base point 0: Chumakin, general base point: Inin through the orthogonal
extension) and on the exterior by the reflection identity
R_z^* = E - R_{1/conj(z)}.  It is never the rational continuation of the
interior formula: for non-unitary parameters those differ, and the object of
interest is the pair of branches.

Spectral measures are extracted only for in-space unitary extensions (equal
defect dimensions and a unitary parameter); in finite dimension they are
finite lists of unimodular atoms with orthogonal projector weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .extensions import ParameterFamily, extend_full, orthogonal_extension
from .isometry import IsometricOperator, defect_spaces, reflected_point
from .numerics import (
    DEFAULT_TOL,
    Subspace,
    TolerancePolicy,
    UnitarySpectralData,
    as_matrix,
    guarded_inverse,
    identity,
    max_abs,
    operator_norm,
    subspace_gap,
    unitary_eig,
)

__all__ = [
    "ResolventFn",
    "HerglotzSample",
    "chumakin",
    "inin",
    "exterior_value",
    "spectral_data",
    "verify_inversion",
    "herglotz_samples",
    "herglotz_check",
    "gap_on_arc",
    "continuation_consistency",
]

TWO_PI = 2.0 * math.pi


def chumakin(
    v: IsometricOperator, fam: ParameterFamily, zeta, tol: TolerancePolicy = DEFAULT_TOL
) -> np.ndarray:
    """Resolvent by the base-point-0 formula: [E - zeta (V + F(zeta))]^{-1}.

    Always nonsingular for |zeta| < 1 because the extended operator is a
    contraction.  The family must be based at 0.
    """
    zeta = complex(zeta)
    if abs(zeta) >= 1.0:
        raise ValueError("interior formula requires |zeta| < 1")
    if fam.z0 != 0:
        raise ValueError("family must be based at 0")
    value = fam.value_at(zeta, tol)
    plus = extend_full(v, 0.0, value, tol)
    n = v.ambient_dim
    return guarded_inverse(identity(n) - zeta * plus.matrix, tol, "interior resolvent")


def inin(
    v: IsometricOperator, z0, fam: ParameterFamily, zeta, tol: TolerancePolicy = DEFAULT_TOL
) -> np.ndarray:
    """Resolvent by the general-base-point formula through the orthogonal extension.

    Coincides with :func:`chumakin` at z0 = 0.
    """
    zeta = complex(zeta)
    z0 = complex(z0)
    if abs(zeta) >= 1.0:
        raise ValueError("interior formula requires |zeta| < 1")
    if fam.z0 != z0:
        raise ValueError("family base point does not match z0")
    value = fam.value_at(zeta, tol)
    ext = orthogonal_extension(v, z0, value, tol)
    n = v.ambient_dim
    return guarded_inverse(identity(n) - zeta * ext.matrix, tol, "interior resolvent")


@dataclass(frozen=True)
class ResolventFn:
    """A generalized resolvent: operator, parameter family, and base point."""

    v: IsometricOperator
    fam: ParameterFamily
    z0: complex = 0j

    def __post_init__(self):
        object.__setattr__(self, "z0", complex(self.z0))
        if self.fam.z0 != self.z0:
            raise ValueError("family base point does not match the resolvent base point")
        src = defect_spaces(self.v, self.z0).n
        dst = defect_spaces(self.v, reflected_point(self.z0)).n
        if self.fam.src.dim != src.dim or subspace_gap(self.fam.src, src) > 1e-6:
            raise ValueError("family source does not match the defect space at z0")
        if self.fam.dst.dim != dst.dim or subspace_gap(self.fam.dst, dst) > 1e-6:
            raise ValueError("family target does not match the reflected defect space")

    def interior(self, zeta, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
        if self.z0 == 0:
            return chumakin(self.v, self.fam, zeta, tol)
        return inin(self.v, self.z0, self.fam, zeta, tol)

    def at(self, z, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
        """Value on either branch; points of the unit circle are rejected."""
        z = complex(z)
        if abs(z) < 1.0:
            return self.interior(z, tol)
        if abs(z) > 1.0:
            return exterior_value(self, z, tol)
        raise ValueError("the two branches meet the circle only through the gap criteria")


def exterior_value(r: ResolventFn, z, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Exterior branch via the reflection identity: E - (interior at 1/conj(z))^H."""
    z = complex(z)
    if abs(z) <= 1.0:
        raise ValueError("exterior branch requires |z| > 1")
    inner = r.interior(1.0 / z.conjugate(), tol)
    return identity(r.v.ambient_dim) - inner.conj().T


def spectral_data(u, tol: TolerancePolicy = DEFAULT_TOL) -> UnitarySpectralData:
    """Spectral measure of an in-space unitary extension, atoms ordered by angle."""
    return unitary_eig(u, tol)


def verify_inversion(u, samples, tol: TolerancePolicy = DEFAULT_TOL) -> float:
    """Residual of the inversion formula linking resolvent and spectral measure.

    For a unitary U with atoms (lambda_k, P_k) the identity
    ((E - zU)^{-1} h, g) = sum_k (P_k h, g) / (1 - z lambda_k) must hold at
    every interior z.  ``samples`` is a list of (z, h, g) triples; returns
    the max absolute deviation (caller asserts it below 10 * eps_eq).
    """
    u = as_matrix(u)
    n = u.shape[0]
    data = unitary_eig(u, tol)
    worst = 0.0
    for z, h, g in samples:
        z = complex(z)
        h = np.asarray(h, dtype=complex).reshape(-1)
        g = np.asarray(g, dtype=complex).reshape(-1)
        resolvent_h = np.linalg.solve(identity(n) - z * u, h)
        lhs = complex(np.vdot(g, resolvent_h))
        rhs = 0j
        for atom in data.atoms:
            rhs += complex(np.vdot(g, atom.projector @ h)) / (1.0 - z * atom.value)
        worst = max(worst, abs(lhs - rhs))
    return worst


@dataclass(frozen=True)
class HerglotzSample:
    """One positivity sample of the disk function attached to the resolvent."""

    z: complex
    h: np.ndarray
    value: complex


def herglotz_samples(
    r: ResolventFn, grid, vectors, tol: TolerancePolicy = DEFAULT_TOL
) -> list[HerglotzSample]:
    """Evaluate f_h(z) = (R_z h, h) - ||h||^2 / 2 over a grid of interior
    points and probe vectors; its real part must be nonnegative on the disk."""
    out = []
    for z in grid:
        z = complex(z)
        rz = r.interior(z, tol)
        for h in vectors:
            h = np.asarray(h, dtype=complex).reshape(-1)
            value = complex(np.vdot(h, rz @ h)) - 0.5 * float(np.vdot(h, h).real)
            out.append(HerglotzSample(z, h, value))
    return out


def herglotz_check(r: ResolventFn, grid, vectors, tol: TolerancePolicy = DEFAULT_TOL) -> float:
    """Minimum real part over the sampled disk function (>= -eps_eq expected)."""
    samples = herglotz_samples(r, grid, vectors, tol)
    if not samples:
        raise ValueError("empty sample set")
    return min(s.value.real for s in samples)


def gap_on_arc(
    sd: UnitarySpectralData,
    embed: Subspace,
    arc: tuple[float, float],
    tol: TolerancePolicy = DEFAULT_TOL,
):
    """Whether the compressed spectral measure vanishes on an open arc.

    The arc is the angle interval (t1, t2) within [0, 2*pi]; wrapping arcs
    are supplied as two arcs.  ``embed`` is the subspace playing H inside the
    extension space (the full space for in-space extensions).  Returns
    (gap, witnesses) where witnesses lists the offending atoms as
    (atom index, angle, compressed weight norm).
    """
    t1, t2 = float(arc[0]), float(arc[1])
    if not (0.0 <= t1 < t2 <= TWO_PI):
        raise ValueError("arc must satisfy 0 <= t1 < t2 <= 2*pi")
    p_embed = embed.basis @ embed.basis.conj().T
    witnesses = []
    for index, atom in enumerate(sd.atoms):
        if t1 < atom.angle < t2:
            weight = operator_norm(p_embed @ atom.projector @ p_embed)
            if weight > tol.eps_eq:
                witnesses.append((index, atom.angle, weight))
    return not witnesses, witnesses


def continuation_consistency(r: ResolventFn, lam, tol: TolerancePolicy = DEFAULT_TOL) -> float:
    """Boundary gluing residual of the two resolvent branches at |lam| = 1.

    Freezes the orthogonal extension T at the boundary point (the parameter
    family must be evaluable there) and measures

        || (E - conj(lam) T^H)^{-1} + (E - lam T)^{-1} - E ||_max.

    A residual within eps_eq certifies that the interior and the reflected
    exterior values glue at lam; a singular E - lam T (conj(lam) an
    eigenvalue of T) raises SingularOperator, signalling no continuation.
    """
    lam = complex(lam)
    if abs(abs(lam) - 1.0) > tol.eps_unit:
        raise ValueError("gluing point must lie on the unit circle")
    value = r.fam.value_at(lam, tol)
    ext = orthogonal_extension(r.v, r.z0, value, tol)
    n = r.v.ambient_dim
    forward = guarded_inverse(identity(n) - lam * ext.matrix, tol, "boundary continuation")
    backward = guarded_inverse(
        identity(n) - lam.conjugate() * ext.matrix.conj().T, tol, "boundary continuation"
    )
    return max_abs(forward + backward - identity(n))
