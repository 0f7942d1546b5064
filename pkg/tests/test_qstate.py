import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import charpoly_eigenvalues, random_hermitian
from mee_dynamics.errors import InvalidState, NotHermitian, NotNormalized, NotXForm, Unphysical
from mee_dynamics.qstate import (
    PHI_PLUS,
    PSI_PLUS,
    SIGMA,
    XStateParams,
    correlation_from_density,
    density_from_correlation,
    eig_hermitian4,
    eigh_hermitian4,
    extract_x_params,
    fidelity_pure,
    ket,
    projector,
    purity,
    random_density,
    random_x_params,
    sqrtm_psd,
    validate_density,
    von_neumann_entropy,
    x_entropy,
    x_params_up_to_local_phases,
)

I4 = np.eye(4) / 4


def test_maximally_mixed_from_correlation():
    c = np.zeros((4, 4))
    c[0, 0] = 1
    assert np.allclose(density_from_correlation(c), I4, atol=1e-15)


def test_triplet_from_bell_coordinates():
    c = np.diag([1.0, 1.0, 1.0, -1.0])
    assert np.allclose(density_from_correlation(c), projector(PSI_PLUS), atol=1e-15)


def test_ground_state_from_correlation():
    c = np.zeros((4, 4))
    c[0, 0] = c[3, 3] = 1
    c[0, 3] = c[3, 0] = -1
    assert np.allclose(density_from_correlation(c), projector(ket("--")), atol=1e-15)


def test_correlation_of_examples():
    assert np.allclose(correlation_from_density(I4), np.diag([1.0, 0, 0, 0]), atol=1e-15)
    c = correlation_from_density(projector(PSI_PLUS))
    assert np.allclose(np.diag(c)[1:], [1, 1, -1])
    assert c[0, 3] == pytest.approx(0) and c[3, 0] == pytest.approx(0)
    g = correlation_from_density(projector(ket("--")))
    assert g[0, 3] == pytest.approx(-1) and g[3, 0] == pytest.approx(-1)
    assert g[3, 3] == pytest.approx(1)


def test_correlation_round_trip(rng):
    for _ in range(20):
        rho = random_density(rng)
        back = density_from_correlation(correlation_from_density(rho))
        assert np.abs(back - rho).max() < 1e-14


def test_extract_x_params_examples():
    assert extract_x_params(projector(PSI_PLUS)).as_tuple() == pytest.approx((1, 1, -1, 0))
    assert extract_x_params(I4).as_tuple() == pytest.approx((0, 0, 0, 0))
    c = np.diag([1.0, 0, 0, 0])
    c[1, 2] = 0.1
    with pytest.raises(NotXForm):
        extract_x_params(density_from_correlation(c))


def test_asymmetric_local_polarization_is_not_x_form():
    c = np.diag([1.0, 0, 0, 0])
    c[0, 3], c[3, 0] = 0.2, 0.1
    with pytest.raises(NotXForm):
        extract_x_params(density_from_correlation(c))


def test_x_params_density_matches_elements():
    x = XStateParams(0.5, 0.5, -0.5, -0.2)
    rho = x.density()
    assert rho[0, 0].real == pytest.approx((1 + x.c + 2 * x.d) / 4)
    assert rho[3, 3].real == pytest.approx((1 + x.c - 2 * x.d) / 4)
    assert rho[1, 1].real == pytest.approx((1 - x.c) / 4)
    assert rho[0, 3].real == pytest.approx((x.a - x.b) / 4)
    assert rho[1, 2].real == pytest.approx((x.a + x.b) / 4)
    assert extract_x_params(rho).as_tuple() == pytest.approx(x.as_tuple(), abs=1e-15)


def test_unphysical_x_params():
    assert not XStateParams(1, 1, 1, 0).is_physical()
    with pytest.raises(Unphysical):
        XStateParams(1, 1, 1, 0).check_physical()


def test_block_eigenvalues_match_jacobi(rng):
    for _ in range(50):
        x = random_x_params(rng)
        assert np.allclose(x.eigenvalues(), eig_hermitian4(x.density()), atol=1e-13)


def test_validate_density_rejects():
    with pytest.raises(InvalidState):
        validate_density(np.triu(np.ones((4, 4))) / 4)
    with pytest.raises(InvalidState):
        validate_density(np.eye(4) / 2)
    with pytest.raises(InvalidState):
        validate_density(np.diag([0.5, 0.5, 0.5, -0.5]))


def test_entropy_examples():
    assert von_neumann_entropy(projector(PHI_PLUS)) == pytest.approx(0, abs=1e-12)
    assert von_neumann_entropy(I4) == pytest.approx(math.log(4), abs=1e-12)
    x = XStateParams.from_bell(0.5, 0.5, -0.5)
    assert np.allclose(np.sort(x.eigenvalues()), [0.125, 0.125, 0.125, 0.625])
    expected = -(3 * 0.125 * math.log(0.125) + 0.625 * math.log(0.625))
    assert von_neumann_entropy(x.density()) == pytest.approx(expected, abs=1e-12)
    assert x_entropy(x) == pytest.approx(expected, abs=1e-12)
    assert expected == pytest.approx(1.0735, abs=1e-4)


def test_eig_examples():
    assert np.allclose(eig_hermitian4(np.eye(4)), 1)
    assert np.allclose(eig_hermitian4(np.diag([0.3, 0.1, 0.4, 0.2])), [0.1, 0.2, 0.3, 0.4])
    with pytest.raises(NotHermitian):
        eig_hermitian4(np.triu(np.ones((4, 4))))


def test_eig_against_characteristic_polynomial(rng):
    for _ in range(100):
        h = random_hermitian(rng)
        assert np.abs(eig_hermitian4(h) - charpoly_eigenvalues(h)).max() < 1e-9


def test_eigenvectors_diagonalize(rng):
    for _ in range(20):
        h = random_hermitian(rng)
        w, v = eigh_hermitian4(h)
        assert np.abs(v.conj().T @ v - np.eye(4)).max() < 1e-12
        assert np.abs(h @ v - v * w).max() < 1e-11


def test_eig_degenerate_and_tiny_scales():
    h = projector(PSI_PLUS) + projector(PHI_PLUS)
    assert np.allclose(eig_hermitian4(h), [0, 0, 1, 1], atol=1e-14)
    assert np.allclose(eig_hermitian4(1e-200 * h), [0, 0, 1e-200, 1e-200], atol=1e-213)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-1e3, 1e3), min_size=16, max_size=16))
def test_eig_preserves_trace_and_norm(vals):
    g = np.array(vals).reshape(4, 4)
    h = (g + g.T) / 2 + 1j * (g - g.T) / 2
    w = eig_hermitian4(h)
    scale = max(1.0, np.abs(h).max())
    assert np.all(np.diff(w) >= 0)
    assert abs(w.sum() - np.trace(h).real) <= 1e-11 * scale
    assert abs(np.sum(w**2) - np.sum(np.abs(h) ** 2)) <= 1e-10 * scale**2


def test_sqrtm_psd(rng):
    rho = random_density(rng)
    s = sqrtm_psd(rho)
    assert np.abs(s @ s - rho).max() < 1e-13


def test_fidelity_examples(rng):
    phi = random_density(rng, rank=1)
    w, v = eigh_hermitian4(phi)
    vec = v[:, -1]
    assert fidelity_pure(projector(vec), vec) == pytest.approx(1, abs=1e-12)
    assert fidelity_pure(I4, vec) == pytest.approx(0.25, abs=1e-12)
    assert fidelity_pure(projector(PSI_PLUS), PHI_PLUS) == pytest.approx(0, abs=1e-15)
    with pytest.raises(NotNormalized):
        fidelity_pure(I4, 2 * PHI_PLUS)


def test_purity():
    assert purity(I4) == pytest.approx(0.25)
    assert purity(projector(PHI_PLUS)) == pytest.approx(1)


def test_local_phases_removed(rng):
    x = XStateParams(0.6, 0.2, -0.3, 0.1)  # rho14, rho23 already nonnegative
    u = np.kron(np.diag([1, np.exp(0.7j)]), np.diag([1, np.exp(0.7j)]))
    rho = u @ x.density() @ u.conj().T
    with pytest.raises(NotXForm):
        extract_x_params(rho)
    assert x_params_up_to_local_phases(rho).as_tuple() == pytest.approx(x.as_tuple(), abs=1e-13)


def test_pauli_basis():
    for mu in range(4):
        for nu in range(4):
            assert np.trace(SIGMA[mu] @ SIGMA[nu]).real == pytest.approx(2 * (mu == nu))
