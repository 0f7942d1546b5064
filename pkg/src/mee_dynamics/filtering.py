"""Local filtering, the filter/Lorentz correspondence and optimal extraction.

Invertible local filters ``A (x) B`` act on the correlation tensor as
``c -> L_A c L_B^T`` (up to normalization), with ``L_A`` a proper orthochronous
Lorentz transformation. For symmetric X states the optimal pair is a common
boost along z with rapidity ``asinh(alpha)``; the resulting Bell-diagonal
state gives the maximum extractable entanglement (MEE).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .entanglement import BellDiagonalState, concurrence, concurrence_bell_diagonal, concurrence_x_state
from .errors import (
    BoostCapExceeded,
    DegenerateC,
    NoConvergence,
    NonPositiveDenominator,
    SingularBoost,
    SingularFilter,
    ZeroSuccessProbability,
)
from .qstate import POSITIVITY_TOL, XStateParams, extract_x_params, validate_density

SINGULAR_EPS = 1e-12
ALPHA_CAP = 1e4
ALPHA_MAX = 1e6
LIMIT_TOL = 1e-6
MIN_SUCCESS = 1e-14
MIN_DET = 1e-14

METRIC = np.diag([1.0, -1.0, -1.0, -1.0])
T_MATRIX = np.array(
    [[1, 0, 0, 1], [0, 1, 1, 0], [0, 1j, -1j, 0], [1, 0, 0, -1]], dtype=complex
) / math.sqrt(2)


@dataclass(frozen=True, eq=False)
class LocalFilter:
    """Pair of 2x2 filter matrices applied as ``A (x) B``."""

    A: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "A", np.asarray(self.A, dtype=complex))
        object.__setattr__(self, "B", np.asarray(self.B, dtype=complex))

    @classmethod
    def identity(cls) -> "LocalFilter":
        return cls(np.eye(2), np.eye(2))

    def check_invertible(self) -> "LocalFilter":
        for name, m in (("A", self.A), ("B", self.B)):
            if abs(np.linalg.det(m)) <= MIN_DET:
                raise SingularFilter(f"filter {name} is not invertible")
        return self


@dataclass(frozen=True)
class OptimalBoost:
    alpha: float
    beta: float
    singular: bool = False


@dataclass(frozen=True, eq=False)
class MinkowskiPair:
    m: np.ndarray
    n: np.ndarray


@dataclass(frozen=True)
class ExtractionResult:
    """Everything the optimal-filter computation produces for one state.

    ``alpha`` is the boost actually used: the closed-form value, or the capped
    boost at which the singular limit converged.
    """

    mee: float
    bell: BellDiagonalState
    boost: OptimalBoost
    alpha: float
    converged: bool = True
    denominator: float = field(default=1.0, repr=False)


def apply_filter(rho, f: LocalFilter) -> np.ndarray:
    """Normalized filtered state ``(A (x) B) rho (A (x) B)^dag / Tr[...]``."""
    rho = validate_density(rho)
    f.check_invertible()
    m = np.kron(f.A, f.B)
    out = m @ rho @ m.conj().T
    p = np.trace(out).real
    if p <= MIN_SUCCESS:
        raise ZeroSuccessProbability(f"filter success probability {p!r}")
    out = out / p
    return (out + out.conj().T) / 2


def filtered_concurrence(rho, f: LocalFilter, c0: float | None = None) -> float:
    """Concurrence after filtering, from the transformation law

    ``C' = C |det A| |det B| / Tr[(A^dag A (x) B^dag B) rho]``.

    ``c0`` may carry a precomputed concurrence of ``rho``.
    """
    rho = validate_density(rho)
    f.check_invertible()
    weight = np.kron(f.A.conj().T @ f.A, f.B.conj().T @ f.B)
    p = np.trace(weight @ rho).real
    if p <= MIN_SUCCESS:
        raise ZeroSuccessProbability(f"filter success probability {p!r}")
    if c0 is None:
        c0 = concurrence(rho)
    return float(c0 * abs(np.linalg.det(f.A)) * abs(np.linalg.det(f.B)) / p)


def filter_to_lorentz(A) -> np.ndarray:
    """Lorentz matrix ``T (A (x) A*) T^dag / |det A|`` of a 2x2 filter."""
    A = np.asarray(A, dtype=complex)
    det = abs(np.linalg.det(A))
    if det <= MIN_DET:
        raise SingularFilter("filter is not invertible")
    L = T_MATRIX @ np.kron(A, A.conj()) @ T_MATRIX.conj().T / det
    if np.abs(L.imag).max() > 1e-10 * max(1.0, np.abs(L).max()):
        raise ArithmeticError("Lorentz image has a non-negligible imaginary part")
    return L.real


def is_lorentz(L, tol: float = 1e-10) -> bool:
    """True for proper orthochronous Lorentz matrices."""
    L = np.asarray(L, dtype=float)
    scale = max(1.0, np.abs(L).max() ** 2)
    return bool(
        np.abs(L.T @ METRIC @ L - METRIC).max() <= tol * scale
        and L[0, 0] >= 1 - tol
        and abs(np.linalg.det(L) - 1) <= tol * scale**2
    )


def boost_matrix(alpha: float) -> np.ndarray:
    """z boost with ``L00 = L33 = sqrt(1 + alpha^2)`` and ``L03 = L30 = alpha``."""
    beta = math.sqrt(1 + alpha * alpha)
    L = np.eye(4)
    L[0, 0] = L[3, 3] = beta
    L[0, 3] = L[3, 0] = alpha
    return L


def _boost_diag(alpha: float):
    """``(sqrt(beta + alpha), sqrt(beta - alpha))`` without cancellation."""
    beta = math.sqrt(1 + alpha * alpha)
    if alpha >= 0:
        plus = beta + alpha
        minus = 1 / plus
    else:
        minus = beta - alpha
        plus = 1 / minus
    return math.sqrt(plus), math.sqrt(minus)


def boost_to_filter(ob: OptimalBoost) -> LocalFilter:
    """Filter ``A = B = diag(sqrt(beta + alpha), sqrt(beta - alpha))``, ``det A = 1``."""
    if ob.singular or not math.isfinite(ob.alpha):
        raise SingularBoost("an infinite boost has no filter realization")
    p, m = _boost_diag(ob.alpha)
    A = np.diag([p, m])
    return LocalFilter(A, A.copy())


def optimal_boost(x: XStateParams, tol: float = POSITIVITY_TOL) -> OptimalBoost:
    """Closed-form optimal common z boost for a symmetric X state.

    ``alpha^2 = -1/2 + (1/2)(1 + c)/sqrt((1 + c)^2 - 4 d^2)`` with the sign of
    ``-d``. States with ``(1 + c)^2 - 4 d^2 < SINGULAR_EPS`` need an infinite
    boost and are flagged singular.
    """
    x.check_physical(tol)
    c, d = x.c, x.d
    if d == 0:
        return OptimalBoost(0.0, 1.0)
    one_p = 1 + c
    if one_p <= 0:
        raise DegenerateC(f"1 + c = {one_p!r} with d = {d!r}")
    disc = one_p * one_p - 4 * d * d
    if disc < SINGULAR_EPS:
        return OptimalBoost(math.copysign(math.inf, -d), math.inf, singular=True)
    alpha2 = max(0.0, -0.5 + 0.5 * one_p / math.sqrt(disc))
    alpha = math.copysign(math.sqrt(alpha2), -d)
    return OptimalBoost(alpha, math.sqrt(1 + alpha2))


def boost_residual(x: XStateParams, alpha: float) -> float:
    """Stationarity residual ``alpha (1 + c) beta + d (1 + 2 alpha^2)``."""
    beta = math.sqrt(1 + alpha * alpha)
    return alpha * (1 + x.c) * beta + x.d * (1 + 2 * alpha * alpha)


def _denominator(x: XStateParams, alpha: float, on_locus: bool = False) -> float:
    # beta^2 + 2 alpha beta d + alpha^2 c, regrouped so the O(alpha^2) terms
    # cancel analytically instead of in floating point
    if alpha == 0:
        return 1.0
    s = 1.0 if alpha > 0 else -1.0
    p = abs(alpha)
    beta = math.sqrt(1 + p * p)
    tail = 2 * s * x.d * p / (p + beta)
    if on_locus:
        return 1 + tail
    return 1 + p * p * (1 + x.c + 2 * s * x.d) + tail


def _boosted_bell(x: XStateParams, alpha: float, on_locus: bool = False):
    D = _denominator(x, alpha, on_locus)
    if not D > 1e-12:
        raise NonPositiveDenominator(f"normalization {D!r} at alpha = {alpha!r}")
    if D == 1.0:
        return BellDiagonalState(x.a, x.b, x.c), D
    return BellDiagonalState(x.a / D, x.b / D, 1 + (x.c - 1) / D), D


def _bell_distance(u: BellDiagonalState, v: BellDiagonalState) -> float:
    return max(abs(p - q) for p, q in zip(u.as_tuple(), v.as_tuple()))


def optimal_filtering(
    x: XStateParams,
    alpha_cap: float = ALPHA_CAP,
    alpha_max: float = ALPHA_MAX,
    tol: float = POSITIVITY_TOL,
) -> ExtractionResult:
    """Optimal boost, the Bell-diagonal image and its concurrence.

    In the singular case the state is taken on the locus
    ``(1 + c)^2 = 4 d^2`` and boosted at ``alpha_cap``, doubling the boost
    until successive Bell coordinates agree within ``LIMIT_TOL``.
    """
    ob = optimal_boost(x, tol)
    if not ob.singular:
        bell, D = _boosted_bell(x, ob.alpha)
        return ExtractionResult(
            concurrence_bell_diagonal(bell, tol / D), bell, ob, ob.alpha, True, D
        )
    sign = math.copysign(1.0, ob.alpha)
    alpha = alpha_cap
    bell, D = _boosted_bell(x, sign * alpha, on_locus=True)
    converged = False
    while alpha < alpha_max:
        nxt, D = _boosted_bell(x, sign * 2 * alpha, on_locus=True)
        alpha *= 2
        done = _bell_distance(bell, nxt) <= LIMIT_TOL
        bell = nxt
        if done:
            converged = True
            break
    return ExtractionResult(
        concurrence_bell_diagonal(bell, tol / D), bell, ob, sign * alpha, converged, D
    )


def optimal_bell_state(x: XStateParams) -> BellDiagonalState:
    """Bell-diagonal image of ``x`` under its optimal filter."""
    res = optimal_filtering(x)
    if not res.converged:
        raise NoConvergence("singular-limit Bell state did not converge below ALPHA_MAX")
    return res.bell


def max_extractable_entanglement(x: XStateParams) -> float:
    return optimal_filtering(x).mee


def partial_extraction(x: XStateParams, alpha: float) -> float:
    """Concurrence reached with the finite boost ``alpha`` (not necessarily optimal)."""
    if not abs(alpha) <= ALPHA_MAX:
        raise BoostCapExceeded(f"|alpha| = {abs(alpha)!r} exceeds {ALPHA_MAX!r}")
    x.check_physical()
    if alpha == 0:
        return concurrence_x_state(x)
    rho = x.density()
    # populations inside the positivity slack are rounding noise; the boost
    # would amplify them by up to (2 alpha)^2
    diag = rho.diagonal().real
    rho[np.diag_indices(4)] = np.where((diag < 0) & (diag > -1e-10), 0.0, diag)
    rho /= np.trace(rho).real
    out = apply_filter(rho, boost_to_filter(OptimalBoost(alpha, math.sqrt(1 + alpha * alpha))))
    return concurrence_x_state(extract_x_params(out), check=False)


def _best_response(w: np.ndarray) -> tuple[np.ndarray, float]:
    # argmin over unit future timelike n of w . n (plain Euclidean dot on
    # lower-index components); requires w timelike
    norm2 = w[0] * w[0] - w[1:] @ w[1:]
    if not (w[0] > 0 and norm2 > 0):
        raise NoConvergence("F is unbounded below; state is not full rank")
    norm = math.sqrt(norm2)
    n = np.concatenate(([w[0]], -w[1:])) / norm
    return n, norm


def _hyperboloid_point(rapidity: float, direction: np.ndarray) -> np.ndarray:
    return np.concatenate(([math.cosh(rapidity)], math.sinh(rapidity) * direction))


def minimize_F_oracle(
    t, seed: int = 0, starts: int = 8, tol: float = 1e-12, max_iter: int = 10_000
) -> tuple[MinkowskiPair, float]:
    """Brute-force minimizer of ``F(m, n) = c[mu, nu] m_mu n_nu``.

    Alternates exact minimization over ``n`` (``m`` fixed) and over ``m``
    (``n`` fixed) from ``starts`` random hyperboloid points, each
    ``(cosh r, sinh r u)``. Independent of the closed-form boost and meant
    only to check it.
    """
    t = np.asarray(t, dtype=float)
    rng = np.random.default_rng(seed)
    best = None
    for k in range(starts):
        if k == 0:
            m = np.array([1.0, 0.0, 0.0, 0.0])
        else:
            u = rng.normal(size=3)
            m = _hyperboloid_point(rng.uniform(0, 2), u / np.linalg.norm(u))
        F_old = math.inf
        for _ in range(max_iter):
            n, _ = _best_response(t.T @ m)
            m_new, F = _best_response(t @ n)
            step = np.abs(m_new - m).max()
            m = m_new
            if abs(F_old - F) <= tol and step <= 1e-10:
                break
            F_old = F
        else:
            raise NoConvergence(f"no convergence after {max_iter} iterations")
        n, F = _best_response(t.T @ m)
        # strict margin so the identity start wins ties
        if best is None or F < best[2] - 1e-14:
            best = (m, n, F)
    m, n, F = best
    return MinkowskiPair(m, n), float(F)
