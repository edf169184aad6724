"""
Orthonormalization backend using modified Gram-Schmidt with
re-orthogonalization.
"""

import numpy as np
from numpy.linalg import norm

from .orthonormalizer_interface import IOrthonormalizer


class GramSchmidtOrthonormalizer(IOrthonormalizer):
    """
    Twice-applied modified Gram-Schmidt.

    A second projection pass runs whenever a vector lost more than 30% of its
    norm in the first one.
    """

    name = "gram-schmidt"

    def orthonormalize(self, vectors: np.ndarray, tol: float) -> np.ndarray:
        vectors = np.atleast_2d(np.asarray(vectors, dtype=complex))
        dim = vectors.shape[1]
        if vectors.shape[0] == 0:
            return np.zeros((0, dim), dtype=complex)

        scale = max(norm(v) for v in vectors)
        if scale == 0.0:
            return np.zeros((0, dim), dtype=complex)

        basis: list[np.ndarray] = []
        for v in vectors:
            x = v.copy()
            norm_init = norm(x)
            if norm_init <= tol * scale:
                continue
            for _ in range(2):
                for q in basis:
                    x -= np.vdot(q, x) * q
                if norm(x) >= 0.7 * norm_init:
                    break
                norm_init = norm(x)
            if norm(x) > tol * scale:
                basis.append(x / norm(x))

        if not basis:
            return np.zeros((0, dim), dtype=complex)
        return np.array(basis)
