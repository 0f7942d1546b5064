"""Two-qubit state representations and the small numeric kernel.

Basis order is ``|++>, |+->, |-+>, |-->`` with ``|+>`` the excited level and
qubit A as the left tensor factor. Density matrices are plain ``(4, 4)``
complex numpy arrays; correlation tensors are ``(4, 4)`` real arrays with
``rho = 1/4 sum_{mu,nu} c[mu, nu] sigma_mu (x) sigma_nu``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidState, NotHermitian, NotNormalized, NotXForm, Unphysical

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
POSITIVITY_TOL = 1e-10
X_FORM_TOL = 1e-9

SIGMA = np.array(
    [
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)
# PAULI2[mu, nu] = sigma_mu (x) sigma_nu
PAULI2 = np.einsum("aij,bkl->abikjl", SIGMA, SIGMA).reshape(4, 4, 4, 4)
SIGMA_YY = np.kron(SIGMA[2], SIGMA[2])
# lowering operator |-><+| in the (|+>, |->) basis
LOWER = np.array([[0, 0], [1, 0]], dtype=complex)


def ket(label: str) -> np.ndarray:
    """Computational basis ket for a label such as ``"+-"``."""
    index = {"++": 0, "+-": 1, "-+": 2, "--": 3}[label]
    v = np.zeros(4, dtype=complex)
    v[index] = 1.0
    return v


_S2 = 1 / math.sqrt(2)
PSI_PLUS = _S2 * (ket("+-") + ket("-+"))
PSI_MINUS = _S2 * (ket("+-") - ket("-+"))
PHI_PLUS = _S2 * (ket("++") + ket("--"))
PHI_MINUS = _S2 * (ket("++") - ket("--"))
SINGLET = _S2 * (ket("-+") - ket("+-"))


def projector(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def validate_density(rho, tol: float = POSITIVITY_TOL) -> np.ndarray:
    """Return ``rho`` as a complex array after checking it is a density matrix.

    Raises
    ------
    InvalidState
        If ``rho`` is not 4x4, not Hermitian, not unit trace, or has an
        eigenvalue below ``-tol``.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise InvalidState(f"expected a 4x4 matrix, got shape {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > HERMITIAN_TOL:
        raise InvalidState("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > TRACE_TOL:
        raise InvalidState(f"trace is {np.trace(rho).real!r}, not 1")
    lam = eig_hermitian4(rho)
    if lam[0] < -tol:
        raise InvalidState(f"negative eigenvalue {lam[0]!r}")
    return rho


def density_from_correlation(c) -> np.ndarray:
    """Build ``rho = 1/4 sum c[mu, nu] sigma_mu (x) sigma_nu``.

    Positivity is not checked.
    """
    c = np.asarray(c, dtype=float)
    return np.einsum("ab,abij->ij", c, PAULI2) / 4


def correlation_from_density(rho) -> np.ndarray:
    """Pauli expectation tensor ``c[mu, nu] = Tr[rho sigma_mu (x) sigma_nu]``."""
    rho = np.asarray(rho, dtype=complex)
    # Tr[rho P] = sum_ij rho_ij P_ji
    return np.einsum("ij,abji->ab", rho, PAULI2).real


@dataclass(frozen=True)
class XStateParams:
    """Symmetric X-form state with correlation tensor

    ::

        [[1, 0, 0, d],
         [0, a, 0, 0],
         [0, 0, b, 0],
         [d, 0, 0, c]]
    """

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        for name in ("a", "b", "c", "d"):
            object.__setattr__(self, name, float(getattr(self, name)))

    @classmethod
    def from_bell(cls, c1, c2, c3) -> "XStateParams":
        return cls(float(c1), float(c2), float(c3), 0.0)

    def as_tuple(self):
        return (self.a, self.b, self.c, self.d)

    def correlation(self) -> np.ndarray:
        a, b, c, d = self.as_tuple()
        return np.array(
            [[1.0, 0, 0, d], [0, a, 0, 0], [0, 0, b, 0], [d, 0, 0, c]], dtype=float
        )

    def elements(self):
        """Nonzero density-matrix entries ``(rho11, rho44, rho22, rho14, rho23)``.

        ``rho22 == rho33`` for this family.
        """
        a, b, c, d = self.as_tuple()
        return (
            (1 + c + 2 * d) / 4,
            (1 + c - 2 * d) / 4,
            (1 - c) / 4,
            (a - b) / 4,
            (a + b) / 4,
        )

    def density(self) -> np.ndarray:
        r11, r44, r22, r14, r23 = self.elements()
        rho = np.zeros((4, 4), dtype=complex)
        rho[0, 0], rho[3, 3] = r11, r44
        rho[1, 1] = rho[2, 2] = r22
        rho[0, 3] = rho[3, 0] = r14
        rho[1, 2] = rho[2, 1] = r23
        return rho

    def eigenvalues(self) -> np.ndarray:
        """Spectrum from the two 2x2 blocks, ascending."""
        r11, r44, r22, r14, r23 = self.elements()
        mean = (r11 + r44) / 2
        half = math.hypot((r11 - r44) / 2, r14)
        return np.sort(np.array([mean - half, mean + half, r22 - abs(r23), r22 + abs(r23)]))

    def physicality_gap(self) -> float:
        """Smallest slack of the positivity conditions; negative means unphysical."""
        a, b, c, d = self.as_tuple()
        one_p, one_m = 1 + c, 1 - c
        return min(
            one_p,
            one_m,
            one_p - math.hypot(2 * d, a - b),
            one_m - abs(a + b),
        )

    def is_physical(self, tol: float = POSITIVITY_TOL) -> bool:
        values = self.as_tuple()
        if not all(math.isfinite(v) for v in values):
            return False
        return self.physicality_gap() >= -tol

    def check_physical(self, tol: float = POSITIVITY_TOL) -> "XStateParams":
        if not self.is_physical(tol):
            raise Unphysical(f"{self} is not a positive semidefinite state")
        return self


def extract_x_params(rho, tol: float = X_FORM_TOL) -> XStateParams:
    """Read ``(a, b, c, d)`` off a density matrix of symmetric X form.

    Raises
    ------
    NotXForm
        If any entry outside the pattern exceeds ``tol`` or ``c03 != c30``.
    """
    return x_params_from_correlation(correlation_from_density(rho), tol)


_X_MASK = np.zeros((4, 4), dtype=bool)
_X_MASK[0, 0] = _X_MASK[1, 1] = _X_MASK[2, 2] = _X_MASK[3, 3] = True
_X_MASK[0, 3] = _X_MASK[3, 0] = True


def x_params_from_correlation(t, tol: float = X_FORM_TOL) -> XStateParams:
    t = np.asarray(t, dtype=float)
    off = np.abs(np.where(_X_MASK, 0.0, t))
    if off.max() > tol:
        mu, nu = np.unravel_index(int(off.argmax()), off.shape)
        raise NotXForm(f"entry c[{mu},{nu}] = {t[mu, nu]!r} outside the X pattern")
    if abs(t[0, 3] - t[3, 0]) > tol:
        raise NotXForm(f"c03 = {t[0, 3]!r} differs from c30 = {t[3, 0]!r}")
    if abs(t[0, 0] - 1) > tol:
        raise NotXForm(f"c00 = {t[0, 0]!r} is not normalized")
    return XStateParams(t[1, 1], t[2, 2], t[3, 3], (t[0, 3] + t[3, 0]) / 2)


def x_params_up_to_local_phases(rho, tol: float = X_FORM_TOL) -> XStateParams:
    """X parameters of a state that is X-shaped up to local z rotations.

    Complex coherences ``rho14``, ``rho23`` are made real and nonnegative by a
    local unitary ``diag(1, e^{i phi_A}) (x) diag(1, e^{i phi_B})``, which leaves
    concurrence and maximum extractable entanglement unchanged.
    """
    rho = np.asarray(rho, dtype=complex)
    mask = np.zeros((4, 4), dtype=bool)
    mask[np.diag_indices(4)] = True
    mask[0, 3] = mask[3, 0] = mask[1, 2] = mask[2, 1] = True
    if np.abs(np.where(mask, 0, rho)).max() > tol:
        raise NotXForm("state has entries outside the diagonal and anti-diagonal")
    r11, r22, r33, r44 = rho.diagonal().real
    if abs(r22 - r33) > tol:
        raise NotXForm("populations of |+-> and |-+> differ")
    r14, r23 = abs(rho[0, 3]), abs(rho[1, 2])
    return XStateParams(
        2 * (r23 + r14), 2 * (r23 - r14), 2 * (r11 + r44) - 1, r11 - r44
    )


def eigh_hermitian4(m, tol: float = 1e-10, max_sweeps: int = 50):
    """Cyclic complex Jacobi eigen-decomposition of a small Hermitian matrix.

    Parameters
    ----------
    m : array_like
        Hermitian matrix (in practice 4x4).
    tol : float
        Allowed deviation from Hermiticity.

    Returns
    -------
    w : ndarray
        Eigenvalues in ascending order.
    v : ndarray
        Unitary matrix whose columns are the matching eigenvectors.
    """
    a = np.array(m, dtype=complex)
    n = a.shape[0]
    if a.shape != (n, n):
        raise NotHermitian(f"expected a square matrix, got shape {a.shape}")
    if np.max(np.abs(a - a.conj().T)) > tol:
        raise NotHermitian("matrix is not Hermitian")
    # plain Python complex arithmetic: faster than numpy for 4x4 rotations
    a = ((a + a.conj().T) / 2).tolist()
    v = np.eye(n, dtype=complex).tolist()
    scale = max(max(abs(z) for row in a for z in row), np.finfo(float).tiny)
    small = 1e-18 * scale
    pairs = [(p, q) for p in range(n - 1) for q in range(p + 1, n)]
    for _ in range(max_sweeps):
        if max(abs(a[p][q]) for p, q in pairs) <= small:
            break
        for p, q in pairs:
            apq = a[p][q]
            r = abs(apq)
            if r <= small:
                a[p][q] = a[q][p] = 0j
                continue
            phase = apq / r
            theta = (a[q][q].real - a[p][p].real) / (2 * r)
            if abs(theta) > 1e150:
                t = 0.5 / theta
            else:
                t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1))
                if theta < 0:
                    t = -t
            cs = 1 / math.sqrt(t * t + 1)
            sn = t * cs
            # J = diag(1, conj(phase)) @ real rotation on the (p, q) plane
            pc = phase.conjugate()
            jqp, jqq = -sn * pc, cs * pc
            for row in a:
                xp, xq = row[p], row[q]
                row[p] = xp * cs + xq * jqp
                row[q] = xp * sn + xq * jqq
            rp, rq = a[p], a[q]
            cqp, cqq = jqp.conjugate(), jqq.conjugate()
            for k in range(n):
                xp, xq = rp[k], rq[k]
                rp[k] = cs * xp + cqp * xq
                rq[k] = sn * xp + cqq * xq
            a[p][q] = a[q][p] = 0j
            for row in v:
                xp, xq = row[p], row[q]
                row[p] = xp * cs + xq * jqp
                row[q] = xp * sn + xq * jqq
    a = np.array(a)
    v = np.array(v)
    w = a.diagonal().real
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def eig_hermitian4(m, tol: float = 1e-10) -> np.ndarray:
    """Ascending eigenvalues of a Hermitian matrix via :func:`eigh_hermitian4`."""
    return eigh_hermitian4(m, tol)[0]


def sqrtm_psd(m) -> np.ndarray:
    """Square root of a positive semidefinite Hermitian matrix.

    Eigenvalues in ``(-1e-10, 0)`` are clipped to zero.
    """
    w, v = eigh_hermitian4(m)
    if w[0] < -POSITIVITY_TOL:
        raise InvalidState(f"matrix has negative eigenvalue {w[0]!r}")
    w = np.sqrt(np.clip(w, 0, None))
    return (v * w) @ v.conj().T


def _entropy_of_spectrum(lam) -> float:
    lam = np.clip(np.asarray(lam, dtype=float), 0.0, 1.0)
    nz = lam[lam > 0]
    return float(max(0.0, -np.sum(nz * np.log(nz))))


def von_neumann_entropy(rho) -> float:
    """Entropy ``-sum lambda ln lambda`` in nats."""
    lam = eig_hermitian4(rho)
    if lam[0] < -POSITIVITY_TOL:
        raise InvalidState(f"negative eigenvalue {lam[0]!r}")
    return _entropy_of_spectrum(lam)


def x_entropy(x: XStateParams) -> float:
    return _entropy_of_spectrum(x.eigenvalues())


def purity(rho) -> float:
    rho = np.asarray(rho, dtype=complex)
    return float(np.real(np.vdot(rho, rho)))


def x_purity(x: XStateParams) -> float:
    a, b, c, d = x.as_tuple()
    # Tr rho^2 = 1/4 sum c_{mu nu}^2
    return (1 + a * a + b * b + c * c + 2 * d * d) / 4


def fidelity_pure(rho, phi) -> float:
    """Overlap ``<phi|rho|phi>`` with a normalized pure state."""
    phi = np.asarray(phi, dtype=complex)
    if abs(np.linalg.norm(phi) - 1) > 1e-10:
        raise NotNormalized(f"|phi| = {np.linalg.norm(phi)!r}")
    return float(np.real(phi.conj() @ np.asarray(rho, dtype=complex) @ phi))


def random_x_params(rng: np.random.Generator, shrink: float = 0.99) -> XStateParams:
    """Random physical X state, full rank when ``shrink < 1``.

    Populations are Dirichlet distributed; coherences are uniform inside
    ``shrink`` times their positivity bounds.
    """
    r11, r44, rest = rng.dirichlet([1.0, 1.0, 1.0])
    p = rest / 2
    r14 = rng.uniform(-1, 1) * math.sqrt(r11 * r44) * shrink
    r23 = rng.uniform(-1, 1) * p * shrink
    return XStateParams(2 * (r23 + r14), 2 * (r23 - r14), 2 * (r11 + r44) - 1, r11 - r44)


def random_density(rng: np.random.Generator, rank: int = 4) -> np.ndarray:
    """Random density matrix ``G G^dag / Tr`` from a complex Gaussian ``G``."""
    g = rng.normal(size=(4, rank)) + 1j * rng.normal(size=(4, rank))
    rho = g @ g.conj().T
    rho = (rho + rho.conj().T) / 2
    return rho / np.trace(rho).real


def random_unitary(rng: np.random.Generator, dim: int = 2) -> np.ndarray:
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    return q * (r.diagonal() / np.abs(r.diagonal()))
