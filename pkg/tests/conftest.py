import numpy as np
import pytest

from mee_dynamics.qstate import SIGMA_YY


def brute_concurrence(rho):
    """Wootters concurrence from the spectrum of R via numpy's general eigensolver."""
    R = rho @ SIGMA_YY @ rho.conj() @ SIGMA_YY
    lam = np.sort(np.sqrt(np.abs(np.linalg.eigvals(R).real)))[::-1]
    return max(0.0, lam[0] - lam[1] - lam[2] - lam[3])


def charpoly_eigenvalues(m):
    """Eigenvalues as roots of the characteristic polynomial."""
    return np.sort(np.roots(np.poly(m)).real)


def random_hermitian(rng, scale=1.0):
    g = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    return scale * (g + g.conj().T) / 2


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
