"""2D projection of entity vectors via principal component analysis.

Only the top two components are needed, so the covariance eigenvectors are
found by power iteration with deflation (no eigensolver dependency).  A
third deflated component is iterated as guard basis and the small Ritz
problem is diagonalized exactly with Jacobi rotations, which keeps the
top-2 axes accurate even when neighbouring eigenvalues nearly coincide.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

CONVERGENCE_TOL = 1e-10
MAX_ITERATIONS = 1000
_BASIS_SEEDS = (7, 11, 13)


@dataclass(frozen=True)
class ProjectedPoint:
    entity: str
    coarse_type: str
    x: float
    y: float


def _power_iteration(mat: np.ndarray, seed: int) -> np.ndarray:
    n = mat.shape[0]
    v = np.random.default_rng(seed).standard_normal(n)
    v /= np.linalg.norm(v)
    for _ in range(MAX_ITERATIONS):
        w = mat @ v
        norm = np.linalg.norm(w)
        if norm == 0.0:
            break  # vector in the null space; caller handles rank deficiency
        w /= norm
        if min(np.linalg.norm(w - v), np.linalg.norm(w + v)) < CONVERGENCE_TOL:
            v = w
            break
        v = w
    return v


def _fix_sign(v: np.ndarray) -> np.ndarray:
    # largest-magnitude coordinate made positive: deterministic orientation
    if v[np.argmax(np.abs(v))] < 0:
        return -v
    return v


def _complete_orthonormal(basis: list[np.ndarray], dim: int) -> np.ndarray:
    """Deterministic unit vector orthogonal to the current basis."""
    for i in range(dim):
        e = np.zeros(dim)
        e[i] = 1.0
        for u in basis:
            e -= (e @ u) * u
        norm = np.linalg.norm(e)
        if norm > 1e-6:
            return e / norm
    raise ValueError("cannot extend orthonormal basis")


def _top_basis(cov: np.ndarray, k: int) -> np.ndarray:
    """k orthonormal directions spanning the dominant eigenspace, from
    repeated power iteration with deflation."""
    basis: list[np.ndarray] = []
    work = cov.copy()
    scale = float(np.abs(cov).max())
    for comp in range(k):
        if np.abs(work).max() < CONVERGENCE_TOL * max(1.0, scale):
            v = _complete_orthonormal(basis, cov.shape[0])
        else:
            v = _power_iteration(work, seed=_BASIS_SEEDS[comp % len(_BASIS_SEEDS)])
            for u in basis:
                v = v - (v @ u) * u
            norm = np.linalg.norm(v)
            if norm < 1e-8:
                v = _complete_orthonormal(basis, cov.shape[0])
            else:
                v = v / norm
        basis.append(v)
        work = work - (v @ work @ v) * np.outer(v, v)
    return np.stack(basis, axis=1)


def _jacobi_eigh(M: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a tiny symmetric matrix by cyclic Jacobi
    rotations; returns (values, column eigenvectors), unordered."""
    A = M.copy()
    n = A.shape[0]
    V = np.eye(n)
    scale = max(float(np.abs(A).max()), 1e-300)
    for _ in range(64):
        off = max(abs(A[p, q]) for p in range(n - 1) for q in range(p + 1, n))
        if off <= 1e-15 * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(A[p, q]) <= 1e-18 * scale:
                    continue
                theta = 0.5 * np.arctan2(2.0 * A[p, q], A[p, p] - A[q, q])
                c, s = np.cos(theta), np.sin(theta)
                rot = np.eye(n)
                rot[p, p] = rot[q, q] = c
                rot[p, q] = -s
                rot[q, p] = s
                A = rot.T @ A @ rot
                V = V @ rot
    return np.diag(A).copy(), V


def pca_project(
    vectors: np.ndarray, entities: Sequence[tuple[str, str]]
) -> tuple[list[ProjectedPoint], tuple[float, float]]:
    """Project labeled vectors onto the top-2 principal axes.

    Data is mean-centered; the sample covariance (divisor N-1) is
    eigen-decomposed iteratively with deflation (tolerance 1e-10, at most
    1000 iterations per component); each eigenvector's sign is fixed so
    its largest-magnitude coordinate is positive.  Returns the projected
    points (input order) and the explained variance per axis.
    """
    X = np.asarray(vectors, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] < 2:
        raise ValueError("need a 2-D matrix with at least 2 columns")
    if X.shape[0] < 3:
        raise ValueError(f"need at least 3 vectors, got {X.shape[0]}")
    if len(entities) != X.shape[0]:
        raise ValueError("one (entity, type) label required per vector")

    Xc = X - X.mean(axis=0)
    cov = (Xc.T @ Xc) / (X.shape[0] - 1)
    total_var = float(np.trace(cov))
    if total_var <= 1e-300:
        raise ValueError("zero-variance data cannot be projected")

    B = _top_basis(cov, k=min(3, cov.shape[0]))
    ritz_vals, ritz_vecs = _jacobi_eigh(B.T @ cov @ B)
    order = np.argsort(ritz_vals)[::-1]
    v1 = _fix_sign(B @ ritz_vecs[:, order[0]])
    v2 = _fix_sign(B @ ritz_vecs[:, order[1]])
    lam1 = float(ritz_vals[order[0]])
    lam2 = float(ritz_vals[order[1]])

    xs = Xc @ v1
    ys = Xc @ v2
    points = [
        ProjectedPoint(entity=token, coarse_type=ctype, x=float(xs[i]), y=float(ys[i]))
        for i, (token, ctype) in enumerate(entities)
    ]
    return points, (lam1, lam2)


def write_pca_csv(points: Sequence[ProjectedPoint], path: str) -> None:
    """CSV with header entity,type,x,y; rows in input order."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("entity,type,x,y\n")
        for p in points:
            fh.write(f"{p.entity},{p.coarse_type},{p.x!r},{p.y!r}\n")
