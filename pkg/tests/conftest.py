import itertools

import numpy as np
import pytest

from fanolattice import LatticeSpec

# Device parameters shared across the suite: two matched sites at 0.5/mm,
# weakly coupled (0.2/mm) to a chain with 0.5/mm hopping.
REF = dict(eps1=0.5, eps2=0.5, kappa1=0.2, kappa2=0.2, kappa=0.5)


@pytest.fixture
def device_spec() -> LatticeSpec:
    """The physical 25-site-chain device."""
    return LatticeSpec(**REF, n_chain=25)


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    """Haar-ish random unitary from the QR of a complex Gaussian matrix."""
    q, r = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    d = np.diag(r)
    return q * (d / np.abs(d))


def naive_permanent(m: np.ndarray) -> complex:
    """n!-term permanent expansion; independent oracle, n <= ~7 only."""
    n = m.shape[0]
    total = 0j
    for perm in itertools.permutations(range(n)):
        product = 1.0 + 0j
        for i, j in enumerate(perm):
            product *= m[i, j]
        total += product
    return total
