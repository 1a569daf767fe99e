"""Kernel PCA: centering, eigendecomposition, dimension choice, projection."""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .eigen import DEFAULT_MAX_SWEEPS, DEFAULT_TOL, jacobi_eigh
from .errors import DegenerateKernelError, EmptyInputError, ParameterError

#: Matrices up to this size go to the Jacobi solver under ``method="auto"``.
JACOBI_MAX_SIZE = 256
CLAMP_RTOL = 1e-10


def _readonly(a):
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class CenteredKernel:
    values: np.ndarray
    source_kind: str = "linear"

    def __post_init__(self):
        object.__setattr__(self, "values", _readonly(np.asarray(self.values, dtype=np.float64)))

    @property
    def size(self):
        return self.values.shape[0]


@dataclass(frozen=True)
class EigenSpectrum:
    """Eigenvalues in descending order with matching orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "eigenvalues", _readonly(np.asarray(self.eigenvalues, dtype=np.float64)))
        object.__setattr__(self, "eigenvectors", _readonly(np.asarray(self.eigenvectors, dtype=np.float64)))

    @property
    def positive_count(self) -> int:
        return int(np.count_nonzero(self.eigenvalues > 0))

    def cumulative_ratios(self) -> np.ndarray:
        """Running share of the positive eigenvalue mass, one entry per eigenvalue."""
        pos = np.clip(self.eigenvalues, 0.0, None)
        total = pos.sum()
        if total <= 0:
            return np.zeros_like(pos)
        return np.cumsum(pos) / total


@dataclass(frozen=True)
class Projection:
    """Low-dimensional coordinates; column i is document i."""

    coordinates: np.ndarray
    retained_variance_ratio: float

    def __post_init__(self):
        object.__setattr__(self, "coordinates", _readonly(np.asarray(self.coordinates, dtype=np.float64)))

    @property
    def dimension(self) -> int:
        return self.coordinates.shape[0]

    @property
    def points(self) -> np.ndarray:
        """Coordinates as an (m, d) array of row vectors."""
        return self.coordinates.T


def center_kernel(K) -> CenteredKernel:
    """Double-center a kernel: ``J K J`` with ``J = I - ones/m``.

    Computed as ``K - row means - column means + grand mean``, which is the
    same product without forming ``J``.
    """
    Kv = np.asarray(getattr(K, "values", K), dtype=np.float64)
    if Kv.ndim != 2 or Kv.shape[0] != Kv.shape[1]:
        raise ParameterError(f"kernel must be square, got shape {Kv.shape}")
    if Kv.shape[0] == 0:
        raise EmptyInputError("cannot center an empty kernel")
    col_means = Kv.mean(axis=0, keepdims=True)
    Kc = Kv - col_means
    Kc = Kc - Kc.mean(axis=1, keepdims=True)
    Kc = 0.5 * (Kc + Kc.T)
    kind = getattr(K, "kind", getattr(K, "source_kind", "linear"))
    return CenteredKernel(Kc, kind)


def centering_matrix(m: int) -> np.ndarray:
    return np.eye(m) - np.full((m, m), 1.0 / m)


def _canonical_signs(W):
    idx = np.argmax(np.abs(W), axis=0)
    signs = np.sign(W[idx, np.arange(W.shape[1])])
    signs[signs == 0] = 1.0
    return W * signs


def symmetric_eigendecomposition(K, method: str = "auto", tol: float = DEFAULT_TOL,
                                 max_sweeps: int = DEFAULT_MAX_SWEEPS) -> EigenSpectrum:
    """Full eigendecomposition of a symmetric (centered) kernel.

    Parameters
    ----------
    K : CenteredKernel or array
    method : {"auto", "jacobi", "lapack"}
        ``"jacobi"`` runs the cyclic Jacobi solver in :mod:`dkpca.eigen`;
        ``"lapack"`` uses ``numpy.linalg.eigh``. ``"auto"`` picks Jacobi for
        matrices up to ``JACOBI_MAX_SIZE`` rows.

    Eigenvalues with magnitude below ``1e-10 * max|eigenvalue|`` are set to
    exactly zero, the order is descending, and each eigenvector is flipped
    so that its largest-magnitude entry is positive.
    """
    Kv = np.asarray(getattr(K, "values", K), dtype=np.float64)
    if Kv.ndim != 2 or Kv.shape[0] != Kv.shape[1]:
        raise ParameterError(f"matrix must be square, got shape {Kv.shape}")
    if Kv.shape[0] == 0:
        raise EmptyInputError("empty matrix")
    if method == "auto":
        method = "jacobi" if Kv.shape[0] <= JACOBI_MAX_SIZE else "lapack"
    if method == "jacobi":
        w, W, _ = jacobi_eigh(Kv, tol=tol, max_sweeps=max_sweeps)
    elif method == "lapack":
        w, W = np.linalg.eigh(0.5 * (Kv + Kv.T))
    else:
        raise ParameterError(f"unknown eigensolver {method!r}")

    # stable sort keeps tied eigenvalues in solver order
    order = np.argsort(-w, kind="stable")
    w = w[order]
    W = W[:, order]
    scale = np.abs(w).max() if w.size else 0.0
    w = np.where(np.abs(w) < CLAMP_RTOL * scale, 0.0, w)
    return EigenSpectrum(w, _canonical_signs(W))


def select_dimension(spectrum: EigenSpectrum, d: int | None = None, threshold: float | None = None) -> int:
    """Number of components to keep.

    Exactly one of ``d`` (explicit count, clamped to the number of positive
    eigenvalues) or ``threshold`` (smallest d whose cumulative share of the
    positive eigenvalue mass reaches it) may be given. With neither, every
    positive component is kept.
    """
    if d is not None and threshold is not None:
        raise ParameterError("give either an explicit dimension or a variance threshold, not both")
    if len(spectrum.eigenvalues) == 0:
        raise EmptyInputError("empty spectrum")
    positive = spectrum.positive_count
    if positive == 0:
        raise DegenerateKernelError("centered kernel has no positive eigenvalue")
    if threshold is not None:
        if not 0 < threshold <= 1:
            raise ParameterError(f"variance threshold must lie in (0, 1], got {threshold}")
        ratios = spectrum.cumulative_ratios()[:positive]
        # tiny slack so that e.g. 8/10 counts as reaching 0.8
        return int(np.argmax(ratios >= threshold - 1e-12) + 1)
    if d is None:
        return positive
    if int(d) != d or d < 1:
        raise ParameterError(f"dimension must be a positive integer, got {d}")
    return min(int(d), positive)


def project(spectrum: EigenSpectrum, d: int) -> Projection:
    """Coordinates ``Y = Λ_d^{1/2} W_dᵀ`` (shape d x m)."""
    positive = spectrum.positive_count
    if int(d) != d or d < 1:
        raise ParameterError(f"dimension must be a positive integer, got {d}")
    if d > positive:
        raise ParameterError(f"dimension {d} exceeds the {positive} positive eigenvalues")
    d = int(d)
    lam = spectrum.eigenvalues[:d]
    Y = np.sqrt(lam)[:, None] * spectrum.eigenvectors[:, :d].T
    total = spectrum.eigenvalues[:positive].sum()
    return Projection(Y, float(lam.sum() / total))


def write_spectrum_csv(spectrum: EigenSpectrum, path_or_file) -> None:
    """``index,eigenvalue,cumulative_ratio`` rows, index starting at 1."""
    ratios = spectrum.cumulative_ratios()

    def _write(fh):
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["index", "eigenvalue", "cumulative_ratio"])
        for i, (lam, r) in enumerate(zip(spectrum.eigenvalues, ratios), start=1):
            writer.writerow([i, repr(float(lam)), f"{r:.6f}"])

    if hasattr(path_or_file, "write"):
        _write(path_or_file)
    else:
        with open(path_or_file, "w", encoding="utf-8", newline="") as fh:
            _write(fh)


def kernel_pca(K, d: int | None = None, threshold: float | None = None, method: str = "auto"):
    """Center, decompose and project in one call. Returns ``(projection, spectrum)``."""
    spectrum = symmetric_eigendecomposition(center_kernel(K), method=method)
    dim = select_dimension(spectrum, d=d, threshold=threshold)
    return project(spectrum, dim), spectrum
