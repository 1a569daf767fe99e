"""Gram matrices over bag-of-words rows, including the semantic diffusion kernel.

The diffusion kernel spreads term similarity along co-occurrence chains.
With ``G = BᵀB`` the term co-occurrence matrix,

    S = sum_{p=0}^{steps} lam**p * G**p / p!

and the document kernel is ``K = (D S)(D S)ᵀ``.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .corpus import DocumentTermMatrix, IncidenceMatrix
from .errors import ParameterError

KINDS = ("linear", "rbf", "poly", "diffusion")
DEFAULT_LAMBDA = 0.0039
DEFAULT_STEPS = 3
MAX_STEPS = 8


def _readonly(a):
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


def _as_array(x) -> np.ndarray:
    return np.asarray(getattr(x, "values", x))


@dataclass(frozen=True)
class KernelMatrix:
    values: np.ndarray
    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise ParameterError(f"kernel matrix must be square, got shape {values.shape}")
        if self.kind not in KINDS:
            raise ParameterError(f"unknown kernel kind {self.kind!r}")
        object.__setattr__(self, "values", _readonly(values))

    @property
    def size(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class CooccurrenceMatrix:
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _readonly(np.asarray(self.values)))


@dataclass(frozen=True)
class SemanticMatrix:
    values: np.ndarray
    lam: float
    steps: int

    def __post_init__(self):
        object.__setattr__(self, "values", _readonly(np.asarray(self.values, dtype=np.float64)))


def gram_linear(D) -> KernelMatrix:
    X = _as_array(D).astype(np.float64, copy=False)
    if X.size == 0:
        raise ParameterError("empty data matrix")
    return KernelMatrix(X @ X.T, "linear")


def _squared_distances(X):
    sq = np.einsum("ij,ij->i", X, X)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (X @ X.T)
    np.maximum(d2, 0.0, out=d2)
    np.fill_diagonal(d2, 0.0)
    return 0.5 * (d2 + d2.T)


def gram_rbf(D, sigma: float, squared: bool = True) -> KernelMatrix:
    """Gaussian kernel ``exp(-||x_i - x_j||^2 / (2 sigma^2))``.

    ``squared=False`` uses the plain (unsquared) distance in the exponent,
    which is a Laplacian-type kernel and still positive semi-definite.
    """
    if not sigma > 0:
        raise ParameterError(f"sigma must be positive, got {sigma}")
    X = _as_array(D).astype(np.float64, copy=False)
    d2 = _squared_distances(X)
    dist = d2 if squared else np.sqrt(d2)
    K = np.exp(-dist / (2.0 * sigma * sigma))
    return KernelMatrix(K, "rbf", {"sigma": float(sigma), "squared": squared})


def gram_poly(D, degree: int = 3) -> KernelMatrix:
    if int(degree) != degree or degree < 1:
        raise ParameterError(f"degree must be a positive integer, got {degree}")
    X = _as_array(D).astype(np.float64, copy=False)
    K = (X @ X.T + 1.0) ** int(degree)
    return KernelMatrix(K, "poly", {"degree": int(degree)})


def cooccurrence_matrix(B) -> CooccurrenceMatrix:
    """Term-by-term co-occurrence counts ``G = BᵀB``.

    ``B`` is normally the binary incidence matrix, so ``G[j, j]`` counts the
    documents containing term j and ``G[j, k]`` the documents holding both.
    A raw tf matrix may be passed instead for ablation.
    """
    A = _as_array(B)
    if A.size == 0:
        raise ParameterError("empty incidence matrix")
    if np.issubdtype(A.dtype, np.integer) or np.array_equal(A, np.round(A)):
        A = A.astype(np.int64)
    return CooccurrenceMatrix(A.T @ A)


def _check_series_args(lam, steps, max_steps):
    if lam < 0 or not np.isfinite(lam):
        raise ParameterError(f"lambda must be a finite value >= 0, got {lam}")
    if int(steps) != steps or steps < 0:
        raise ParameterError(f"steps must be a non-negative integer, got {steps}")
    if steps > max_steps:
        raise ParameterError(f"steps={steps} exceeds the cap of {max_steps}")


def diffusion_semantic_matrix(G, lam: float = DEFAULT_LAMBDA, steps: int = DEFAULT_STEPS,
                              max_steps: int = MAX_STEPS) -> SemanticMatrix:
    """Truncated exponential series of the co-occurrence matrix.

    Powers are accumulated by repeated multiplication, with the coefficient
    ``lam**p / p!`` updated incrementally.
    """
    _check_series_args(lam, steps, max_steps)
    Gv = _as_array(G).astype(np.float64)
    if Gv.ndim != 2 or Gv.shape[0] != Gv.shape[1]:
        raise ParameterError(f"co-occurrence matrix must be square, got {Gv.shape}")
    n = Gv.shape[0]
    S = np.eye(n)
    power = np.eye(n)
    coeff = 1.0
    if lam > 0:
        for p in range(1, int(steps) + 1):
            power = power @ Gv
            coeff *= lam / p
            S += coeff * power
    return SemanticMatrix(S, float(lam), int(steps))


def gram_diffusion(D, S) -> KernelMatrix:
    X = _as_array(D).astype(np.float64, copy=False)
    Sv = _as_array(S)
    if Sv.shape != (X.shape[1], X.shape[1]):
        raise ParameterError(f"semantic matrix {Sv.shape} does not match {X.shape[1]} terms")
    P = X @ Sv
    params = {}
    if isinstance(S, SemanticMatrix):
        params = {"lambda": S.lam, "steps": S.steps}
    return KernelMatrix(P @ P.T, "diffusion", params)


def diffused_features(D, A, lam: float = DEFAULT_LAMBDA, steps: int = DEFAULT_STEPS,
                      max_steps: int = MAX_STEPS) -> np.ndarray:
    """``D @ S`` for ``G = AᵀA`` without forming any N x N matrix.

    Uses ``D Gᵖ = (D Aᵀ)(A Aᵀ)^(p-1) A`` so the cost is O(m²N + steps·m³)
    instead of O(steps·N³). Preferable whenever documents are fewer than terms.
    """
    _check_series_args(lam, steps, max_steps)
    X = _as_array(D).astype(np.float64)
    Av = _as_array(A).astype(np.float64)
    if Av.shape[1] != X.shape[1]:
        raise ParameterError(f"factor has {Av.shape[1]} columns, data has {X.shape[1]} terms")
    if lam == 0 or steps == 0:
        return X
    C = X @ Av.T
    M = Av @ Av.T
    acc = np.zeros_like(C)
    Q = C
    coeff = 1.0
    for p in range(1, int(steps) + 1):
        if p > 1:
            Q = Q @ M
        coeff *= lam / p
        acc += coeff * Q
    return X + acc @ Av


def gram_diffusion_factored(D, A, lam: float = DEFAULT_LAMBDA, steps: int = DEFAULT_STEPS,
                            max_steps: int = MAX_STEPS) -> KernelMatrix:
    P = diffused_features(D, A, lam, steps, max_steps)
    return KernelMatrix(P @ P.T, "diffusion", {"lambda": float(lam), "steps": int(steps)})


@dataclass(frozen=True)
class MercerVerdict:
    passed: bool
    max_asymmetry: float
    min_eigenvalue: float
    symmetry_tol: float
    eigen_tol: float

    def __bool__(self):
        return self.passed


def validate_mercer(K, tol: float | None = None) -> MercerVerdict:
    """Check symmetry and positive semi-definiteness up to round-off.

    With ``tol=None`` the thresholds are relative to the largest entry:
    ``1e-9 * max|K|`` for asymmetry and ``1e-8 * max|K|`` for negative
    eigenvalues. An explicit ``tol`` is used for both.
    """
    Kv = _as_array(K).astype(np.float64)
    if Kv.ndim != 2 or Kv.shape[0] != Kv.shape[1]:
        raise ParameterError(f"matrix must be square, got shape {Kv.shape}")
    if Kv.size == 0:
        return MercerVerdict(True, 0.0, 0.0, 0.0, 0.0)
    scale = float(np.abs(Kv).max())
    sym_tol, eig_tol = (1e-9 * scale, 1e-8 * scale) if tol is None else (tol, tol)
    asym = float(np.abs(Kv - Kv.T).max())
    min_eig = float(np.linalg.eigvalsh(0.5 * (Kv + Kv.T))[0])
    ok = asym <= sym_tol and min_eig >= -eig_tol
    return MercerVerdict(ok, asym, min_eig, sym_tol, eig_tol)


# Kernel cache: magic, version u32, kind u8, m u64, then m*m little-endian float64.
_MAGIC = b"DKPK"
_VERSION = 1
_HEADER = struct.Struct("<4sIBQ")


def save_kernel(path, K: KernelMatrix) -> None:
    m = K.size
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(_MAGIC, _VERSION, KINDS.index(K.kind), m))
        fh.write(np.ascontiguousarray(K.values, dtype="<f8").tobytes())


def load_kernel(path) -> KernelMatrix:
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise ValueError("truncated kernel cache header")
    magic, version, kind, m = _HEADER.unpack_from(data)
    if magic != _MAGIC:
        raise ValueError(f"not a kernel cache file (magic {magic!r})")
    if version != _VERSION:
        raise ValueError(f"unsupported kernel cache version {version}")
    if kind >= len(KINDS):
        raise ValueError(f"unknown kernel kind code {kind}")
    body = data[_HEADER.size:]
    if len(body) != 8 * m * m:
        raise ValueError(f"expected {8 * m * m} payload bytes, found {len(body)}")
    values = np.frombuffer(body, dtype="<f8").reshape(m, m).astype(np.float64)
    return KernelMatrix(values, KINDS[kind])


def build_kernel(kind: str, dtm: DocumentTermMatrix, incidence: IncidenceMatrix | None = None, *,
                 sigma: float = 1.0, degree: int = 3, lam: float = DEFAULT_LAMBDA,
                 steps: int = DEFAULT_STEPS, rbf_squared: bool = True, g_from_tf: bool = False,
                 route: str = "auto") -> KernelMatrix:
    """Dispatch to the requested kernel constructor.

    For the diffusion kernel, ``route`` picks between the explicit semantic
    matrix (``"explicit"``), the low-rank factorization (``"factored"``) or
    whichever is cheaper (``"auto"``: factored when documents < terms).
    """
    if kind == "linear":
        return gram_linear(dtm)
    if kind == "rbf":
        return gram_rbf(dtm, sigma, squared=rbf_squared)
    if kind == "poly":
        return gram_poly(dtm, degree)
    if kind != "diffusion":
        raise ParameterError(f"unknown kernel kind {kind!r}; expected one of {KINDS}")
    if g_from_tf:
        factor = dtm.values
    else:
        factor = (incidence if incidence is not None else IncidenceMatrix.from_doc_term(dtm)).values
    if route not in ("auto", "explicit", "factored"):
        raise ParameterError(f"unknown diffusion route {route!r}")
    if route == "factored" or (route == "auto" and dtm.doc_count < dtm.term_count):
        return gram_diffusion_factored(dtm, factor, lam, steps)
    S = diffusion_semantic_matrix(cooccurrence_matrix(factor), lam, steps)
    return gram_diffusion(dtm, S)
