"""Cyclic Jacobi eigensolver for dense symmetric matrices.

Rotations are applied in round-robin (tournament) order: each round holds
n/2 disjoint index pairs, so a whole round is one vectorized update of the
affected rows and columns.  A sweep is n-1 rounds and touches every pair once.
"""
from __future__ import annotations

import numpy as np

from .errors import NumericError

DEFAULT_TOL = 1e-10
DEFAULT_MAX_SWEEPS = 100


def _tournament(n):
    """Pair schedule for an even ``n``: list of (p, q) index arrays, one per round."""
    players = list(range(n))
    rounds = []
    for _ in range(n - 1):
        top = np.array(players[: n // 2])
        bottom = np.array(players[n // 2:][::-1])
        p = np.minimum(top, bottom)
        q = np.maximum(top, bottom)
        rounds.append((p, q))
        # keep players[0] fixed, rotate the rest
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def off_norm(A: np.ndarray) -> float:
    """Frobenius norm of the off-diagonal part."""
    off = A.copy()
    np.fill_diagonal(off, 0.0)
    return float(np.linalg.norm(off))


def jacobi_eigh(A, tol: float = DEFAULT_TOL, max_sweeps: int = DEFAULT_MAX_SWEEPS):
    """Eigenvalues and eigenvectors of the symmetric matrix ``A``.

    Iterates until the off-diagonal Frobenius norm is at most
    ``tol * ||A||_F``. Returns ``(eigenvalues, vectors, sweeps)`` with
    eigenvalues in the order they sit on the final diagonal (unsorted) and
    eigenvectors as columns.

    Raises
    ------
    NumericError
        If ``max_sweeps`` sweeps do not reach the tolerance.
    """
    a = np.array(A, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    a = 0.5 * (a + a.T)
    if n == 0:
        return np.zeros(0), np.zeros((0, 0)), 0
    size = n + (n % 2)
    if size != n:
        # pad with an isolated zero row/column; it never couples to the rest
        padded = np.zeros((size, size))
        padded[:n, :n] = a
        a = padded
    vt = np.eye(size)
    threshold = tol * float(np.linalg.norm(a))
    schedule = _tournament(size) if size > 1 else []

    sweeps = 0
    off = off_norm(a)
    while off > threshold:
        if sweeps >= max_sweeps:
            raise NumericError(
                f"Jacobi iteration did not converge in {max_sweeps} sweeps "
                f"(off-diagonal norm {off:.3e} > {threshold:.3e})",
                residual=off,
            )
        for p, q in schedule:
            apq = a[p, q]
            active = apq != 0.0
            if not active.any():
                continue
            app = a[p, p]
            aqq = a[q, q]
            theta = np.divide(aqq - app, 2.0 * apq, out=np.zeros_like(apq), where=active)
            t = np.where(theta >= 0, 1.0, -1.0) / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
            t = np.where(active, t, 0.0)
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c

            cs = c[:, None]
            ss = s[:, None]
            # A' = Jᵀ A J; apply the row rotation to A, then to (Jᵀ A)ᵀ = A J,
            # which is the same as rotating columns but keeps memory access row-wise
            for _ in range(2):
                rp = a[p]
                rq = a[q]
                a[p] = cs * rp - ss * rq
                a[q] = ss * rp + cs * rq
                a = np.ascontiguousarray(a.T)
            a[p, q] = 0.0
            a[q, p] = 0.0
            # eigenvectors kept as rows of vt
            vp = vt[p]
            vq = vt[q]
            vt[p] = cs * vp - ss * vq
            vt[q] = ss * vp + cs * vq
        sweeps += 1
        off = off_norm(a)

    return np.diag(a)[:n].copy(), vt[:n, :n].T.copy(), sweeps
