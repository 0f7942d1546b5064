"""Fixed-step integration of the bath dynamics and event detection."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .baths import BathKind, BathModel, dfs_states, liouvillian, x_rhs_array
from .entanglement import BellDiagonalState, concurrence, concurrence_x_state
from .errors import NotXForm, PhysicalityLost, StepTooLarge
from .filtering import optimal_filtering
from .qstate import (
    XStateParams,
    eig_hermitian4,
    extract_x_params,
    fidelity_pure,
    x_entropy,
    x_params_up_to_local_phases,
    x_purity,
)

DRIFT_TOL = 1e-8
MAX_STEP_SCALE = 0.1
TARGET_SAMPLES = 2000
DEATH_EPS = 1e-6
REVIVAL_EPS = 1e-4
# differences below this count as flat when locating minima
FLAT_EPS = 1e-12


@dataclass(frozen=True)
class Sample:
    """Observables recorded at one instant.

    ``bell`` is the optimal Bell-diagonal image (the limiting one when
    ``mee_singular``); ``alpha`` is ``None`` for singular samples.
    """

    t: float
    x: XStateParams
    concurrence: float
    mee: float
    mee_singular: bool
    mee_converged: bool
    entropy: float
    purity: float
    bell: Optional[BellDiagonalState]
    alpha: Optional[float]
    fidelity_phi1: Optional[float] = None


@dataclass
class Trajectory:
    model: BathModel
    samples: list = field(default_factory=list)
    states: Optional[np.ndarray] = None

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.samples])

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(s, name) for s in self.samples], dtype=float)

    @property
    def concurrence(self) -> np.ndarray:
        return self.column("concurrence")

    @property
    def mee(self) -> np.ndarray:
        return self.column("mee")

    @property
    def entropy(self) -> np.ndarray:
        return self.column("entropy")

    @property
    def params(self) -> np.ndarray:
        """``(len, 4)`` array of ``(a, b, c, d)``."""
        return np.array([s.x.as_tuple() for s in self.samples])


@dataclass(frozen=True)
class EventReport:
    sudden_death_time: Optional[float]
    revival_windows: list
    concurrence_revival_windows: list = field(default_factory=list)


def rk4_step(f: Callable, y, h: float):
    k1 = f(y)
    k2 = f(y + 0.5 * h * k1)
    k3 = f(y + 0.5 * h * k2)
    k4 = f(y + h * k3)
    return y + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)


def _step_plan(model: BathModel, t_end: float, dt: float, stride: Optional[int]):
    if not (math.isfinite(t_end) and t_end >= 0):
        raise ValueError(f"t_end must be finite and nonnegative, got {t_end!r}")
    if not (math.isfinite(dt) and dt > 0):
        raise ValueError(f"dt must be positive, got {dt!r}")
    if t_end > 0 and dt > t_end:
        raise ValueError(f"dt = {dt!r} exceeds t_end = {t_end!r}")
    if dt * model.rate_scale > MAX_STEP_SCALE:
        raise StepTooLarge(
            f"dt * gamma (1 + 2n) = {dt * model.rate_scale!r} > {MAX_STEP_SCALE}"
        )
    steps = 0 if t_end == 0 else max(1, math.ceil(t_end / dt - 1e-9))
    h = t_end / steps if steps else 0.0
    if stride is None:
        stride = max(1, steps // TARGET_SAMPLES)
    return steps, h, stride


def observe(model: BathModel, t: float, x: XStateParams, tol: float = DRIFT_TOL) -> Sample:
    """Compute every recorded observable of a symmetric X state."""
    res = optimal_filtering(x, tol=tol)
    fid = None
    if model.kind is BathKind.COMMON_SQUEEZED:
        fid = fidelity_pure(x.density(), dfs_states(model.n, model.psi).phi1)
    singular = res.boost.singular
    return Sample(
        t=float(t),
        x=x,
        concurrence=concurrence_x_state(x, check=False),
        mee=res.mee,
        mee_singular=singular,
        mee_converged=res.converged,
        entropy=x_entropy(x),
        purity=x_purity(x),
        bell=res.bell,
        alpha=None if singular else float(res.alpha),
        fidelity_phi1=fid,
    )


def integrate(
    model: BathModel,
    x0: XStateParams,
    t_end: float,
    dt: float,
    stride: Optional[int] = None,
) -> Trajectory:
    """Classical RK4 integration of the reduced X-family equations.

    Samples every ``stride`` steps plus the final time. No renormalization
    is applied; a physicality drift beyond ``DRIFT_TOL`` raises
    :class:`PhysicalityLost`.
    """
    x0.check_physical()
    steps, h, stride = _step_plan(model, t_end, dt, stride)
    x_rhs_array(model, x0.as_tuple())  # rejects complex squeezing up front
    traj = Trajectory(model)
    f = lambda v: x_rhs_array(model, v)  # noqa: E731
    v = np.array(x0.as_tuple(), dtype=float)
    for k in range(steps + 1):
        if k:
            v = rk4_step(f, v, h)
        x = XStateParams(*v)
        if x.physicality_gap() < -DRIFT_TOL:
            raise PhysicalityLost(f"state left the physical set at t = {k * h!r}: {x}")
        if k % stride == 0 or k == steps:
            traj.samples.append(observe(model, k * h, x))
    return traj


def integrate_full(
    model: BathModel,
    rho0,
    t_end: float,
    dt: float,
    stride: Optional[int] = None,
) -> Trajectory:
    """RK4 integration of the full 4x4 master equation.

    Observables are computed on the X parameters of the state (after
    removing local phases). States that leave the X shape record the
    general concurrence only, with ``mee`` set to NaN.
    """
    rho0 = np.asarray(rho0, dtype=complex)
    steps, h, stride = _step_plan(model, t_end, dt, stride)
    L = np.asarray(liouvillian(model))
    f = lambda v: L @ v  # noqa: E731
    v = rho0.reshape(16).copy()
    traj = Trajectory(model)
    states = []
    for k in range(steps + 1):
        if k:
            v = rk4_step(f, v, h)
        if k % stride and k != steps:
            continue
        rho = v.reshape(4, 4)
        t = k * h
        drift = abs(np.trace(rho) - 1)
        if drift > DRIFT_TOL:
            raise PhysicalityLost(f"trace drift {drift!r} at t = {t!r}")
        states.append(rho.copy())
        try:
            x = _x_params(rho)
        except NotXForm:
            lam = eig_hermitian4((rho + rho.conj().T) / 2)
            if lam[0] < -DRIFT_TOL:
                raise PhysicalityLost(f"negative eigenvalue {lam[0]!r} at t = {t!r}")
            traj.samples.append(_general_sample(t, rho, lam))
            continue
        if x.physicality_gap() < -DRIFT_TOL:
            raise PhysicalityLost(f"state left the physical set at t = {t!r}: {x}")
        sample = observe(model, t, x)
        if model.kind is BathKind.COMMON_SQUEEZED:
            phi1 = dfs_states(model.n, model.psi).phi1
            sample = replace(sample, fidelity_phi1=fidelity_pure(rho, phi1))
        traj.samples.append(sample)
    traj.states = np.array(states)
    return traj


def _x_params(rho) -> XStateParams:
    # real X states keep the sign of rho14; complex ones are phase-normalized
    try:
        return extract_x_params(rho)
    except NotXForm:
        return x_params_up_to_local_phases(rho)


def _general_sample(t, rho, lam) -> Sample:
    rho = (rho + rho.conj().T) / 2
    lam = np.clip(lam, 0.0, 1.0)
    nz = lam[lam > 0]
    return Sample(
        t=float(t),
        x=XStateParams(math.nan, math.nan, math.nan, math.nan),
        concurrence=concurrence(rho / np.trace(rho).real),
        mee=math.nan,
        mee_singular=False,
        mee_converged=False,
        entropy=float(-np.sum(nz * np.log(nz))),
        purity=float(np.real(np.vdot(rho, rho))),
        bell=None,
        alpha=None,
    )


def _sudden_death(t, c, eps):
    alive = np.nonzero(c > eps)[0]
    if alive.size == 0:
        return float(t[0])
    j = alive[-1]
    if j == len(c) - 1:
        return None
    i = j + 1
    frac = (c[j] - eps) / (c[j] - c[i])
    return float(t[j] + frac * (t[i] - t[j]))


def rise_windows(t, y, eps: float = REVIVAL_EPS, flat: float = FLAT_EPS):
    """Intervals where ``y`` rises by more than ``eps`` after a local minimum.

    Returns a list of ``(t_start, t_end, rise)``. A minimum needs a strict
    decrease somewhere before it; flat stretches (changes below ``flat``)
    neither start nor end a window.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    dy = np.diff(y)
    sign = np.where(dy > flat, 1, np.where(dy < -flat, -1, 0))
    windows = []
    last = 0
    k = 0
    n = len(sign)
    while k < n:
        if sign[k] == 1 and last == -1:
            start = k
            end = k + 1
            j = k
            while j < n and sign[j] >= 0:
                if y[j + 1] > y[end]:
                    end = j + 1
                j += 1
            rise = y[end] - y[start]
            if rise > eps:
                windows.append((float(t[start]), float(t[end]), float(rise)))
            last = 1
            k = j
            continue
        if sign[k]:
            last = sign[k]
        k += 1
    return windows


def detect_events(
    traj: Trajectory, death_eps: float = DEATH_EPS, revival_eps: float = REVIVAL_EPS
) -> EventReport:
    """Sudden-death time and MEE / concurrence revival windows."""
    if len(traj.samples) < 2:
        raise ValueError("need at least two samples")
    t = traj.times
    c = traj.concurrence
    mee = traj.mee
    return EventReport(
        sudden_death_time=_sudden_death(t, c, death_eps),
        revival_windows=rise_windows(t, mee, revival_eps),
        concurrence_revival_windows=rise_windows(t, c, revival_eps),
    )
