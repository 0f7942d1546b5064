"""Concurrence and related entanglement checks for two qubits."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import Unphysical
from .qstate import (
    SIGMA_YY,
    XStateParams,
    eig_hermitian4,
    sqrtm_psd,
    validate_density,
)

TETRAHEDRON_TOL = 1e-10


@dataclass(frozen=True)
class BellDiagonalState:
    """State ``1/4 (1 + sum_i C_i sigma_i (x) sigma_i)``."""

    c1: float
    c2: float
    c3: float

    def __post_init__(self):
        for name in ("c1", "c2", "c3"):
            object.__setattr__(self, name, float(getattr(self, name)))

    def as_tuple(self):
        return (self.c1, self.c2, self.c3)

    def eigenvalues(self) -> np.ndarray:
        c1, c2, c3 = self.as_tuple()
        return np.array(
            [
                (1 + c1 - c2 + c3) / 4,
                (1 - c1 + c2 + c3) / 4,
                (1 + c1 + c2 - c3) / 4,
                (1 - c1 - c2 - c3) / 4,
            ]
        )

    def is_physical(self, tol: float = TETRAHEDRON_TOL) -> bool:
        lam = self.eigenvalues()
        return bool(np.all(np.isfinite(lam)) and lam.min() >= -tol and lam.max() <= 1 + tol)

    def to_x_params(self) -> XStateParams:
        return XStateParams.from_bell(*self.as_tuple())


def concurrence(rho) -> float:
    """Wootters concurrence of a two-qubit density matrix.

    The eigenvalues ``R_i`` of ``rho rho~`` are taken from the Hermitian matrix
    ``sqrt(rho) rho~ sqrt(rho)``, which has the same spectrum.
    """
    rho = validate_density(rho)
    s = sqrtm_psd(rho)
    rho_tilde = SIGMA_YY @ rho.conj() @ SIGMA_YY
    r = eig_hermitian4(s @ rho_tilde @ s)
    # r >= 0 up to rounding; square roots of tiny negatives are clipped
    roots = np.sqrt(np.clip(r, 0.0, None))
    value = 2 * roots[-1] - roots.sum()
    return float(min(1.0, max(0.0, value)))


def concurrence_bell_diagonal(s: BellDiagonalState, tol: float = TETRAHEDRON_TOL) -> float:
    """Concurrence ``max(0, 2 rho_max - sum rho_i)`` of a Bell-diagonal state."""
    if not s.is_physical(tol):
        raise Unphysical(f"{s} lies outside the tetrahedron of physical states")
    lam = s.eigenvalues()
    return float(min(1.0, max(0.0, 2 * lam.max() - lam.sum())))


def concurrence_x_state(x: XStateParams, check: bool = True) -> float:
    """Closed-form concurrence of a symmetric X state.

    ``check=False`` skips the physicality test, for states whose rounding
    noise was amplified by a strong filter after the input was validated.
    """
    if check:
        x.check_physical()
    r11, r44, r22, r14, r23 = x.elements()
    p = math.sqrt(max(r11 * r44, 0.0))
    value = 2 * max(0.0, abs(r23) - p, abs(r14) - r22)
    return float(min(1.0, value))


def partial_transpose_b(rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex).reshape(2, 2, 2, 2)
    return rho.transpose(0, 3, 2, 1).reshape(4, 4)


def ppt_min_eigenvalue(rho) -> float:
    """Smallest eigenvalue of the partial transpose over qubit B.

    Negative exactly when the two-qubit state is entangled.
    """
    rho = validate_density(rho)
    return float(eig_hermitian4(partial_transpose_b(rho))[0])
