"""Services subpackage providing orthonormalization backends."""

from .orthonormalizer_interface import IOrthonormalizer
from .svd_orthonormalizer import SvdOrthonormalizer
from .gram_schmidt_orthonormalizer import GramSchmidtOrthonormalizer
from ..exceptions import InvalidBackendTypeException

ORTHONORMALIZER_CLASSES = {
    "svd": SvdOrthonormalizer,
    "gram-schmidt": GramSchmidtOrthonormalizer,
}


def get_orthonormalizer(name: str) -> IOrthonormalizer:
    """Instantiate the backend registered under `name`."""
    backend_class = ORTHONORMALIZER_CLASSES.get(name)
    if not backend_class:
        raise InvalidBackendTypeException(
            f"Unsupported orthonormalizer: {name}\n"
            f"Supported types: {list(ORTHONORMALIZER_CLASSES.keys())}"
        )
    return backend_class()


__all__ = [
    "IOrthonormalizer",
    "SvdOrthonormalizer",
    "GramSchmidtOrthonormalizer",
    "ORTHONORMALIZER_CLASSES",
    "get_orthonormalizer",
]
