"""
Interface for orthonormalization backends used by harmonic_bimodules.

Every subspace in the package is stored through an orthonormal basis; the
backend decides how a spanning family is turned into that basis.
"""

from abc import ABC, abstractmethod

import numpy as np


class IOrthonormalizer(ABC):
    """
    Abstract base class for orthonormalization backends.
    """

    name: str = ""

    @abstractmethod
    def orthonormalize(self, vectors: np.ndarray, tol: float) -> np.ndarray:
        """
        Orthonormalize the rows of a spanning family.

        Args:
            vectors: Array of shape (m, d); each row is one spanning vector.
            tol: Rank threshold relative to the largest singular value (or
                largest row norm). Directions below it are discarded.

        Returns:
            np.ndarray: Array of shape (k, d) with orthonormal rows spanning
            the same space, k <= min(m, d).
        """
        pass
