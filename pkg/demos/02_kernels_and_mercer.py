"""
Kernel matrices and the Mercer check
====================================

Builds every supported kernel on a random term-count matrix, validates
symmetry and positive semi-definiteness, and shows what an invalid matrix
looks like. Kernels can be cached to disk and read back bit for bit.
"""
import tempfile
from pathlib import Path

import numpy as np

from dkpca.kernels import (cooccurrence_matrix, diffusion_semantic_matrix, gram_diffusion, gram_linear, gram_poly,
                           gram_rbf, load_kernel, save_kernel, validate_mercer)

rng = np.random.default_rng(0)
D = rng.integers(0, 3, size=(8, 12)).astype(float)
S = diffusion_semantic_matrix(cooccurrence_matrix(D > 0), lam=0.1, steps=3)

for K in (gram_linear(D), gram_rbf(D, sigma=2.0), gram_poly(D, degree=3), gram_diffusion(D, S)):
    v = validate_mercer(K)
    print(f"{K.kind:<10} passed={v.passed}  asym={v.max_asymmetry:.1e}  min_eig={v.min_eigenvalue:+.3e}")

# an indefinite symmetric matrix fails the eigenvalue test
print(validate_mercer(np.array([[1.0, 2.0], [2.0, 1.0]])))

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "rbf.bin"
    K = gram_rbf(D, sigma=2.0)
    save_kernel(path, K)
    print("cache round trip exact:", np.array_equal(load_kernel(path).values, K.values))
