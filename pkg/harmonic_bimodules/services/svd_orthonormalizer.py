"""
Orthonormalization backend based on the singular value decomposition.
"""

import numpy as np
import scipy.linalg

from .orthonormalizer_interface import IOrthonormalizer


class SvdOrthonormalizer(IOrthonormalizer):
    """Right singular vectors of the spanning family above the relative threshold."""

    name = "svd"

    def orthonormalize(self, vectors: np.ndarray, tol: float) -> np.ndarray:
        vectors = np.atleast_2d(np.asarray(vectors, dtype=complex))
        dim = vectors.shape[1]
        if vectors.shape[0] == 0 or not np.any(vectors):
            return np.zeros((0, dim), dtype=complex)

        _, s, vh = scipy.linalg.svd(vectors, full_matrices=False)
        rank = int(np.sum(s > tol * s[0]))
        return vh[:rank]
