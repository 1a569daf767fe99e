"""
Kernel PCA by hand
==================

Center a kernel, diagonalise it with the Jacobi solver, pick a dimension
and project. With a linear kernel the coordinates are ordinary PCA scores.
"""
import numpy as np

from dkpca.kernels import gram_linear
from dkpca.kpca import center_kernel, project, select_dimension, symmetric_eigendecomposition

rng = np.random.default_rng(1)
X = rng.normal(size=(10, 3)) @ np.diag([3.0, 1.0, 0.2])

Kc = center_kernel(gram_linear(X))
print("row sums after centering:", np.abs(Kc.values.sum(axis=1)).max())

spec = symmetric_eigendecomposition(Kc, method="jacobi")
print("eigenvalues:", np.round(spec.eigenvalues, 4))
print("cumulative share:", np.round(spec.cumulative_ratios(), 4))

d = select_dimension(spec, threshold=0.95)
proj = project(spec, d)
print(f"{d} components keep {proj.retained_variance_ratio:.3f} of the variance")

# compare with PCA scores from the covariance matrix
Xc = X - X.mean(axis=0)
w, V = np.linalg.eigh(Xc.T @ Xc)
scores = Xc @ V[:, ::-1][:, :d]
print("matches PCA up to sign:", np.allclose(np.abs(proj.points), np.abs(scores)))
