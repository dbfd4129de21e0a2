"""Instance generators and deterministic grids for the randomized suites.

Random isometric operators are Haar-like unitaries restricted to a random
coordinate subspace, which exercises every defect-index combination
(n - d, n - d) as the dimensions vary.  Everything is driven by an explicit
numpy Generator so suites are reproducible from a seed.
"""

from __future__ import annotations

import math

import numpy as np

from .extensions import ContractionOp
from .isometry import IsometricOperator, defect_spaces, reflected_point, regular_type
from .numerics import DEFAULT_TOL, TolerancePolicy, operator_norm

__all__ = [
    "random_unitary",
    "random_isometry",
    "random_contraction_matrix",
    "random_parameter",
    "random_unitary_parameter",
    "random_disk_point",
    "random_boundary_point",
    "regular_boundary_point",
    "disk_grid",
]


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    """Haar-like random unitary: QR of a complex Ginibre matrix with the
    phases of the R diagonal absorbed."""
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(g)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_isometry(
    rng: np.random.Generator,
    n_max: int = 8,
    n_min: int = 1,
    allow_full: bool = True,
    allow_empty: bool = True,
) -> IsometricOperator:
    """Random closed isometric operator: a Haar-like unitary restricted to a
    random coordinate subspace of the domain."""
    n = int(rng.integers(n_min, n_max + 1))
    d_lo = 0 if allow_empty else 1
    d_hi = n if allow_full else n - 1
    d = int(rng.integers(d_lo, d_hi + 1))
    u = random_unitary(rng, n)
    idx = np.sort(rng.choice(n, size=d, replace=False))
    domain = np.eye(n, dtype=complex)[:, idx]
    image = u[:, idx]
    return IsometricOperator(n, domain, image)


def random_contraction_matrix(
    rng: np.random.Generator, rows: int, cols: int, norm_range=(0.2, 0.95)
) -> np.ndarray:
    """Random strict contraction of the given shape with norm in norm_range."""
    if rows == 0 or cols == 0:
        return np.zeros((rows, cols), dtype=complex)
    g = rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
    nrm = operator_norm(g)
    target = rng.uniform(*norm_range)
    return g * (target / nrm)


def random_parameter(
    rng: np.random.Generator,
    v: IsometricOperator,
    z0=0j,
    unitary: bool = False,
    tol: TolerancePolicy = DEFAULT_TOL,
) -> ContractionOp:
    """Random contraction parameter between the canonical defect spaces of v."""
    src = defect_spaces(v, z0, tol).n
    dst = defect_spaces(v, reflected_point(z0), tol).n
    if unitary:
        if src.dim != dst.dim:
            raise ValueError("unitary parameter needs equal defect dimensions")
        matrix = random_unitary(rng, src.dim)
    else:
        matrix = random_contraction_matrix(rng, dst.dim, src.dim)
    return ContractionOp(src, dst, matrix)


def random_unitary_parameter(
    rng: np.random.Generator, v: IsometricOperator, z0=0j, tol: TolerancePolicy = DEFAULT_TOL
) -> ContractionOp:
    return random_parameter(rng, v, z0, unitary=True, tol=tol)


def random_disk_point(rng: np.random.Generator, r_min: float = 0.0, r_max: float = 0.9) -> complex:
    radius = rng.uniform(r_min, r_max)
    angle = rng.uniform(0.0, 2.0 * math.pi)
    return radius * complex(math.cos(angle), math.sin(angle))


def random_boundary_point(rng: np.random.Generator) -> complex:
    angle = rng.uniform(0.0, 2.0 * math.pi)
    return complex(math.cos(angle), math.sin(angle))


def regular_boundary_point(
    rng: np.random.Generator,
    v: IsometricOperator,
    margin: float = 1e-3,
    max_tries: int = 200,
) -> complex:
    """Boundary point whose circle-inverse is of regular type for v with a
    quantitative margin, so the eps_rank cutoffs downstream are meaningful."""
    for _ in range(max_tries):
        lam = random_boundary_point(rng)
        if regular_type(v, lam.conjugate()).sigma_min > margin:
            return lam
    raise RuntimeError("could not draw a regular boundary point")


def disk_grid(count: int, radius: float = 0.9) -> list[complex]:
    """Deterministic interior grid: increasing radii on a sweeping angle."""
    out = []
    for k in range(count):
        r = radius * (k + 1) / (count + 1)
        theta = 2.0 * math.pi * k / count
        out.append(r * complex(math.cos(theta), math.sin(theta)))
    return out
