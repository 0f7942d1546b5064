import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import brute_concurrence
from mee_dynamics.entanglement import (
    BellDiagonalState,
    concurrence,
    concurrence_bell_diagonal,
    concurrence_x_state,
    partial_transpose_b,
    ppt_min_eigenvalue,
)
from mee_dynamics.errors import Unphysical
from mee_dynamics.qstate import (
    PHI_MINUS,
    PHI_PLUS,
    PSI_MINUS,
    PSI_PLUS,
    XStateParams,
    extract_x_params,
    ket,
    projector,
    random_density,
    random_unitary,
    random_x_params,
)

I4 = np.eye(4) / 4


@pytest.mark.parametrize("psi", [PSI_PLUS, PSI_MINUS, PHI_PLUS, PHI_MINUS])
def test_bell_states_maximally_entangled(psi):
    assert concurrence(projector(psi)) == pytest.approx(1, abs=1e-10)


def test_mixed_and_werner():
    assert concurrence(I4) == pytest.approx(0, abs=1e-12)
    werner = 0.5 * projector(PSI_PLUS) + 0.5 * I4
    assert concurrence(werner) == pytest.approx(0.25, abs=1e-9)
    assert brute_concurrence(werner) == pytest.approx(0.25, abs=1e-9)


def test_against_brute_force(rng):
    for rank in (1, 2, 4):
        for _ in range(30):
            rho = random_density(rng, rank=rank)
            assert concurrence(rho) == pytest.approx(brute_concurrence(rho), abs=1e-7)


def test_local_unitary_invariance(rng):
    for _ in range(20):
        rho = random_density(rng, rank=2)
        u = np.kron(random_unitary(rng), random_unitary(rng))
        # rank-deficient: square roots of ~1e-17 eigenvalues limit accuracy
        assert concurrence(u @ rho @ u.conj().T) == pytest.approx(concurrence(rho), abs=1e-8)
        full = random_density(rng)
        rotated = u @ full @ u.conj().T
        assert concurrence(rotated) == pytest.approx(concurrence(full), abs=1e-12)


def test_product_states_separable(rng):
    for _ in range(10):
        a, b = random_unitary(rng)[:, 0], random_unitary(rng)[:, 0]
        rho = projector(np.kron(a, b))
        assert concurrence(rho) == pytest.approx(0, abs=1e-7)
        assert ppt_min_eigenvalue(rho) >= -1e-12


def test_bell_diagonal_examples():
    assert concurrence_bell_diagonal(BellDiagonalState(1, 1, -1)) == pytest.approx(1)
    assert concurrence_bell_diagonal(BellDiagonalState(0, 0, 0)) == 0
    s = BellDiagonalState(-0.5, -0.5, -0.5)
    assert np.allclose(sorted(s.eigenvalues()), [0.125, 0.125, 0.125, 0.625])
    assert concurrence_bell_diagonal(s) == pytest.approx(0.25)
    with pytest.raises(Unphysical):
        concurrence_bell_diagonal(BellDiagonalState(1, 1, 1))


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1), st.floats(0, 1))
def test_bell_diagonal_matches_general(p0, p1, p2, p3):
    w = np.array([p0, p1, p2, p3]) + 1e-3
    w /= w.sum()
    rho = sum(p * projector(v) for p, v in zip(w, (PSI_PLUS, PSI_MINUS, PHI_PLUS, PHI_MINUS)))
    x = extract_x_params(rho)
    s = BellDiagonalState(x.a, x.b, x.c)
    assert concurrence_bell_diagonal(s) == pytest.approx(brute_concurrence(rho), abs=1e-9)
    assert concurrence_bell_diagonal(s) == pytest.approx(max(0.0, 2 * w.max() - 1), abs=1e-12)


def test_x_state_examples():
    assert concurrence_x_state(XStateParams(1, 1, -1, 0)) == pytest.approx(1)
    x = XStateParams(0.5, 0.5, -0.5, -0.2)
    expected = 2 * (0.25 - math.sqrt(0.025 * 0.225))
    assert expected == pytest.approx(0.35)
    assert concurrence_x_state(x) == pytest.approx(0.35, abs=1e-12)
    assert concurrence(x.density()) == pytest.approx(0.35, abs=1e-10)
    assert concurrence_x_state(XStateParams(0, 0, 1, -1)) == 0
    with pytest.raises(Unphysical):
        concurrence_x_state(XStateParams(1, 1, 1, 0))


def test_x_state_closed_form_matches_general(rng):
    for _ in range(200):
        x = random_x_params(rng)
        assert concurrence_x_state(x) == pytest.approx(brute_concurrence(x.density()), abs=1e-8)


def test_ppt_examples(rng):
    assert ppt_min_eigenvalue(projector(PSI_PLUS)) == pytest.approx(-0.5)
    assert ppt_min_eigenvalue(I4) == pytest.approx(0.25)
    assert ppt_min_eigenvalue(projector(ket("+-"))) >= -1e-15
    rho = random_density(rng)
    assert np.allclose(partial_transpose_b(partial_transpose_b(rho)), rho)


def test_ppt_agrees_with_concurrence(rng):
    for _ in range(100):
        rho = random_density(rng, rank=int(rng.integers(1, 5)))
        c = concurrence(rho)
        if c > 1e-6:
            assert ppt_min_eigenvalue(rho) < 0
        elif c == 0 and ppt_min_eigenvalue(rho) < -1e-9:
            pytest.fail("entangled by PPT but concurrence zero")
