"""Master equations for two qubits coupled to thermal or squeezed baths.

Three generators are provided: independent thermal baths on each qubit, a
common thermal bath coupling through ``sigma_a + sigma_b``, and a common
squeezed bath. All preserve the symmetric X family, for which reduced
four-parameter right-hand sides are given in closed form.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import NegativeTime, NonPositiveN, NotXForm
from .qstate import LOWER, SINGLET, XStateParams, ket

# reduced dynamics for the squeezed bath needs a real squeezing parameter
PHASE_TOL = 1e-15


class BathKind(enum.Enum):
    INDEPENDENT_THERMAL = "independent"
    COMMON_THERMAL = "common"
    COMMON_SQUEEZED = "squeezed"


@dataclass(frozen=True)
class BathModel:
    """Bath parameters: decay rate ``gamma``, mean photon number ``n`` and,
    for the squeezed bath, the squeezing phase ``psi``."""

    kind: BathKind
    gamma: float
    n: float = 0.0
    psi: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", BathKind(self.kind))
        for name in ("gamma", "n", "psi"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)
        if self.gamma <= 0:
            raise ValueError(f"gamma must be positive, got {self.gamma!r}")
        if self.n < 0:
            raise ValueError(f"n must be nonnegative, got {self.n!r}")

    @property
    def m(self) -> float:
        """Squeezing strength ``sqrt(n (n + 1))``; zero for thermal baths."""
        if self.kind is not BathKind.COMMON_SQUEEZED:
            return 0.0
        return math.sqrt(self.n * (self.n + 1))

    @property
    def rate_scale(self) -> float:
        """``gamma (1 + 2 n)``, the stiffness scale used by step-size guards."""
        return self.gamma * (1 + 2 * self.n)


_I2 = np.eye(2, dtype=complex)
SIGMA_A = np.kron(LOWER, _I2)
SIGMA_B = np.kron(_I2, LOWER)
SIGMA_AB = SIGMA_A + SIGMA_B


def _dissipator(L, rho):
    Ld = L.conj().T
    LdL = Ld @ L
    return 2 * L @ rho @ Ld - LdL @ rho - rho @ LdL


def lindblad_rhs(model: BathModel, rho) -> np.ndarray:
    """Time derivative of ``rho`` under the model's master equation.

    The squeezed-bath term is ``-gamma m / 2 [e^{i psi} K + e^{-i psi} K^dag]``
    with ``K = 2 s^dag rho s^dag - s^dag s^dag rho - rho s^dag s^dag``.
    """
    rho = np.asarray(rho, dtype=complex)
    g, n = model.gamma, model.n
    if model.kind is BathKind.INDEPENDENT_THERMAL:
        out = (n + 1) * (_dissipator(SIGMA_A, rho) + _dissipator(SIGMA_B, rho))
        out += n * (_dissipator(SIGMA_A.conj().T, rho) + _dissipator(SIGMA_B.conj().T, rho))
        return g / 2 * out
    s = SIGMA_AB
    out = g / 2 * ((n + 1) * _dissipator(s, rho) + n * _dissipator(s.conj().T, rho))
    if model.kind is BathKind.COMMON_SQUEEZED and model.m:
        sd = s.conj().T
        sd2, s2 = sd @ sd, s @ s
        K = 2 * sd @ rho @ sd - sd2 @ rho - rho @ sd2
        # K^dag written out so the map stays linear on non-Hermitian inputs
        K_adj = 2 * s @ rho @ s - rho @ s2 - s2 @ rho
        phase = np.exp(1j * model.psi)
        out -= g * model.m / 2 * (phase * K + np.conj(phase) * K_adj)
    return out


@lru_cache(maxsize=64)
def _liouvillian_cached(model: BathModel) -> np.ndarray:
    cols = []
    for k in range(16):
        e = np.zeros(16, dtype=complex)
        e[k] = 1.0
        cols.append(lindblad_rhs(model, e.reshape(4, 4)).reshape(16))
    L = np.array(cols).T
    L.setflags(write=False)
    return L


def liouvillian(model: BathModel) -> np.ndarray:
    """16x16 matrix of :func:`lindblad_rhs` acting on row-major ``vec(rho)``."""
    return _liouvillian_cached(model)


def _effective_m(model: BathModel) -> float:
    m = model.m
    if m == 0:
        return 0.0
    if abs(m * math.sin(model.psi)) > PHASE_TOL:
        raise NotXForm(
            "a complex squeezing phase takes the state out of the real X family; "
            "integrate the full density matrix instead"
        )
    return m * math.cos(model.psi)


def x_rhs_array(model: BathModel, v) -> np.ndarray:
    """Unchecked reduced right-hand side on ``v = (a, b, c, d)``."""
    a, b, c, d = v
    g = model.gamma
    k = 1 + 2 * model.n
    if model.kind is BathKind.INDEPENDENT_THERMAL:
        return np.array(
            [-g * k * a, -g * k * b, -2 * g * (d + k * c), -g * (1 + k * d)]
        )
    m2 = 2 * _effective_m(model)
    kp, km = k + m2, k - m2
    return g * np.array(
        [
            -kp * a + kp * c + d,
            -km * b + km * c + d,
            kp * a + km * b - 2 * k * c - 2 * d,
            -(a + b) / 2 - k * d - 1,
        ]
    )


def x_rhs(model: BathModel, x: XStateParams):
    """Reduced derivatives ``(da/dt, db/dt, dc/dt, dd/dt)`` on the X family."""
    x.check_physical()
    return tuple(float(v) for v in x_rhs_array(model, x.as_tuple()))


def x_fixed_point_independent(n: float) -> XStateParams:
    """Gibbs fixed point of the independent-bath reduced dynamics."""
    k = 1 + 2 * n
    d = -1 / k
    return XStateParams(0.0, 0.0, d * d, d)


def analytic_independent(t: float, gamma: float, n: float = 0.0) -> XStateParams:
    """Closed-form independent-bath trajectory from ``(a, b, c) = (1, 1, -1)``."""
    if t < 0:
        raise NegativeTime(f"t = {t!r}")
    k = 1 + 2 * n
    u = math.exp(-gamma * k * t)
    return XStateParams(
        u,
        u,
        -u * u - (2 * u - u * u - 1) / (k * k),
        (u - 1) / k,
    )


@dataclass(frozen=True, eq=False)
class DfsBasis:
    phi1: np.ndarray
    phi2: np.ndarray


def dfs_states(n: float, psi: float = 0.0) -> DfsBasis:
    """Decoherence-free pair of the common squeezed bath.

    ``phi1 = (n |++> + m e^{-i psi} |-->) / sqrt(n^2 + m^2)`` and the singlet.
    At ``n = 0`` the limit ``phi1 = e^{-i psi} |-->`` is returned.
    """
    if not (math.isfinite(n) and n >= 0):
        raise NonPositiveN(f"n = {n!r}")
    phase = np.exp(-1j * psi)
    if n == 0:
        phi1 = phase * ket("--")
    else:
        m = math.sqrt(n * (n + 1))
        phi1 = (n * ket("++") + m * phase * ket("--")) / math.sqrt(n * n + m * m)
    return DfsBasis(phi1, SINGLET.copy())
