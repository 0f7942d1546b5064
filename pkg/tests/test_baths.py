import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mee_dynamics.baths import (
    BathKind,
    BathModel,
    analytic_independent,
    dfs_states,
    lindblad_rhs,
    liouvillian,
    x_fixed_point_independent,
    x_rhs,
    x_rhs_array,
)
from mee_dynamics.errors import NegativeTime, NonPositiveN, NotXForm, Unphysical
from mee_dynamics.qstate import (
    PSI_PLUS,
    SINGLET,
    XStateParams,
    extract_x_params,
    ket,
    projector,
    random_density,
    random_x_params,
)

KINDS = list(BathKind)


def projected_rhs(model, x):
    """Oracle: full generator applied to the X density, read back as (a, b, c, d)."""
    drho = lindblad_rhs(model, x.density())
    # extract_x_params wants a state; shift by I/4 to keep the map linear
    shifted = extract_x_params(np.eye(4) / 4 + drho, tol=1e-9)
    return np.array(shifted.as_tuple())


def test_bath_model_validation():
    with pytest.raises(ValueError):
        BathModel(BathKind.COMMON_THERMAL, 0.0)
    with pytest.raises(ValueError):
        BathModel(BathKind.COMMON_THERMAL, 1.0, -0.1)
    assert BathModel("squeezed", 1.0, 0.5).m == pytest.approx(math.sqrt(0.75))
    assert BathModel("common", 1.0, 0.5).m == 0.0


def test_vacuum_fixed_point():
    model = BathModel(BathKind.INDEPENDENT_THERMAL, 1.0, 0.0)
    assert np.abs(lindblad_rhs(model, projector(ket("--")))).max() == 0


@pytest.mark.parametrize("kind", [BathKind.COMMON_THERMAL, BathKind.COMMON_SQUEEZED])
@pytest.mark.parametrize("n", [0.0, 0.001, 0.3])
def test_singlet_stationary(kind, n):
    model = BathModel(kind, 1.3, n, 0.4)
    assert np.abs(lindblad_rhs(model, projector(SINGLET))).max() <= 1e-12


@pytest.mark.parametrize("n", [0.001, 0.3, 2.0])
@pytest.mark.parametrize("psi", [0.0, 0.7, 2.0, math.pi])
def test_dfs_states_stationary(n, psi):
    model = BathModel(BathKind.COMMON_SQUEEZED, 1.0, n, psi)
    basis = dfs_states(n, psi)
    assert np.abs(lindblad_rhs(model, projector(basis.phi1))).max() <= 1e-12
    assert np.abs(lindblad_rhs(model, projector(basis.phi2))).max() <= 1e-12


def test_excited_decay_rate():
    model = BathModel(BathKind.INDEPENDENT_THERMAL, 0.7, 0.0)
    drho = lindblad_rhs(model, projector(ket("++")))
    assert drho[0, 0].real == pytest.approx(-2 * 0.7)


@pytest.mark.parametrize("kind", KINDS)
def test_generator_trace_and_hermiticity(kind, rng):
    model = BathModel(kind, 1.0, 0.2, 0.0)
    for _ in range(5):
        rho = random_density(rng)
        d = lindblad_rhs(model, rho)
        assert abs(np.trace(d)) < 1e-14
        assert np.abs(d - d.conj().T).max() < 1e-14


def test_liouvillian_matches_rhs(rng):
    model = BathModel(BathKind.COMMON_SQUEEZED, 1.0, 0.2, 0.3)
    rho = random_density(rng)
    assert np.allclose(liouvillian(model) @ rho.reshape(16), lindblad_rhs(model, rho).reshape(16))


def test_x_rhs_independent_example():
    model = BathModel(BathKind.INDEPENDENT_THERMAL, 2.0, 0.0)
    assert x_rhs(model, XStateParams(1, 1, -1, 0)) == pytest.approx((-2, -2, 4, -2))
    with pytest.raises(Unphysical):
        x_rhs(model, XStateParams(1, 1, 1, 0))


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("n", [0.0, 0.001, 0.5])
def test_x_rhs_matches_full_generator(kind, n, rng):
    model = BathModel(kind, 1.0, n)
    states = [XStateParams(1, 1, -1, 0), XStateParams.from_bell(1, -1, 1)]
    states += [random_x_params(rng) for _ in range(5)]
    for x in states:
        assert np.abs(x_rhs_array(model, x.as_tuple()) - projected_rhs(model, x)).max() <= 1e-10


def test_squeezed_phase_pi_is_real():
    model = BathModel(BathKind.COMMON_SQUEEZED, 1.0, 0.2, math.pi)
    x = XStateParams(0.3, 0.1, -0.2, -0.1)
    assert np.abs(x_rhs_array(model, x.as_tuple()) - projected_rhs(model, x)).max() <= 1e-12


def test_squeezed_complex_phase_rejected():
    model = BathModel(BathKind.COMMON_SQUEEZED, 1.0, 0.2, 0.5)
    with pytest.raises(NotXForm):
        x_rhs_array(model, (0.0, 0.0, 0.0, 0.0))


@settings(max_examples=50, deadline=None)
@given(st.floats(0, 5))
def test_independent_fixed_point(n):
    x = x_fixed_point_independent(n)
    assert x.d == pytest.approx(-1 / (1 + 2 * n), abs=1e-12)
    model = BathModel(BathKind.INDEPENDENT_THERMAL, 1.0, n)
    assert np.abs(x_rhs_array(model, x.as_tuple())).max() <= 1e-12
    assert np.abs(lindblad_rhs(model, x.density())).max() <= 1e-12


def test_analytic_examples():
    assert analytic_independent(0.0, 1.0).as_tuple() == (1, 1, -1, 0)
    x = analytic_independent(math.log(2), 1.0)
    assert x.as_tuple() == pytest.approx((0.5, 0.5, 0.0, -0.5), abs=1e-15)
    assert analytic_independent(60.0, 1.0).as_tuple() == pytest.approx((0, 0, 1, -1), abs=1e-15)
    with pytest.raises(NegativeTime):
        analytic_independent(-1.0, 1.0)


def test_analytic_solves_reduced_system():
    model = BathModel(BathKind.INDEPENDENT_THERMAL, 1.0, 0.0)
    h = 1e-6
    for t in (0.1, 1.0, 2.5):
        lo = np.array(analytic_independent(t - h, 1.0).as_tuple())
        hi = np.array(analytic_independent(t + h, 1.0).as_tuple())
        deriv = (hi - lo) / (2 * h)
        rhs = x_rhs_array(model, analytic_independent(t, 1.0).as_tuple())
        assert np.abs(deriv - rhs).max() < 1e-8


def test_analytic_on_singular_locus():
    for t in (0.3, 1.0, 4.0):
        x = analytic_independent(t, 1.0)
        assert 1 + x.c == pytest.approx(-2 * x.d, abs=1e-15)


def test_dfs_examples():
    phi1 = dfs_states(0.001, 0.0).phi1
    assert abs(phi1[0]) == pytest.approx(0.03159, abs=1e-4)
    assert abs(phi1[3]) == pytest.approx(0.99950, abs=1e-4)
    limit = dfs_states(0.0, 0.3).phi1
    assert np.allclose(limit, np.exp(-0.3j) * ket("--"))
    assert np.allclose(dfs_states(0.3).phi2, SINGLET)
    with pytest.raises(NonPositiveN):
        dfs_states(-0.1)
