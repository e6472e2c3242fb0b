"""Two-body solver against an independent finite-difference reference.

The reference discretizes the 2D s-wave problem in psi form,
-(1/r)(r psi')' + V psi = E psi, with flux-conservative cells and a
Neumann condition at the origin, then Richardson-extrapolates the h^2
error.  It shares no code with the shooting solver under test.
"""

import math
import warnings

import numpy as np
import pytest

from halo2d import (
    ConfigError,
    NumericalError,
    bound_states,
    gaussian_pair,
    scattering_length,
    solve_two_body,
    weak_binding_energy,
    zero_energy_solution,
    zero_range,
)
from oracles import REFERENCE_SPECS, fd_reference

EULER_GAMMA = 0.5772156649015329


@pytest.mark.parametrize("spec", REFERENCE_SPECS,
                         ids=["attractive", "core", "barrier"])
def test_bound_states_match_dense_reference(spec):
    es = bound_states(spec)
    assert es, "reference potential should bind"
    kap = math.sqrt(-es[0])
    r_max = max(25.0, 18.0 / math.sqrt(-es[-1]))
    ref = fd_reference(spec, r_max, k=len(es) + 1)
    ref = ref[ref < -1e-9]
    assert len(ref) == len(es)
    for have, want in zip(es, ref):
        assert have == pytest.approx(want, rel=1e-5), (spec.s1, spec.s2, kap)


def test_bound_states_are_sorted_deepest_first():
    es = bound_states(gaussian_pair(b=1.0, s1=-40.0))
    assert len(es) >= 2
    assert all(a < b for a, b in zip(es, es[1:]))
    assert all(e < 0 for e in es)


def test_unbound_potential_gives_no_states():
    assert bound_states(gaussian_pair(b=1.0, s1=3.0, s2=1.0)) == []


def test_scattering_length_window_independent():
    spec = gaussian_pair(b=1.0, s1=-2.2)
    a1 = scattering_length(spec)
    a2 = scattering_length(spec, fit_window=(40.0, 80.0))
    assert a2 == pytest.approx(a1, rel=1e-3)


def test_scattering_length_zero_range_passthrough():
    assert scattering_length(zero_range(3.0)) == 3.0


def test_scattering_length_free_potential_fails():
    with pytest.raises(NumericalError):
        scattering_length(gaussian_pair(b=1.0, s1=0.0))


def test_scattering_length_weak_coupling_is_quiet():
    # shallow wells place the node at r = a, well outside the core;
    # that crossing must not be flagged as an interior node
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        for s1 in (-0.3, -0.45, -0.6):
            a = scattering_length(gaussian_pair(b=1.0, s1=s1))
            assert a > 1.0


def test_zero_energy_solution_log_asymptote():
    spec = gaussian_pair(b=1.0, s1=-2.2)
    a = scattering_length(spec)
    r, u = zero_energy_solution(spec, r_max=30.0)
    sel = r > 8.0
    f = u[sel] / np.sqrt(r[sel])
    want = f[-1] * np.log(r[sel] / a) / np.log(r[sel][-1] / a)
    np.testing.assert_allclose(f, want, rtol=2e-4)


def test_zero_energy_rejected_for_zero_range():
    with pytest.raises(ConfigError):
        zero_energy_solution(zero_range(1.0))


def test_weak_binding_energy_values():
    # B = 4 e^{-2 gamma}/a^2 and k = 2 e^{-gamma}/a
    b1, k1 = weak_binding_energy(1.0)
    assert b1 == pytest.approx(1.260947006749, rel=1e-9)
    assert k1 == pytest.approx(1.122918967134, rel=1e-9)
    assert k1**2 == pytest.approx(b1, rel=1e-12)
    b2, _ = weak_binding_energy(2.0)
    assert b2 == pytest.approx(0.315236751687, rel=1e-9)


def test_node_count_matches_state_count():
    # Sturm: the zero-energy solution crosses zero once per bound state
    # (the outermost crossing is the one at r = a)
    for s1 in (-4.0, -18.0, -40.0):
        sol = solve_two_body(gaussian_pair(b=1.0, s1=s1))
        assert sol.zero_energy_nodes == len(sol.bound_energies)


def test_solve_two_body_bundle_consistency():
    spec = gaussian_pair(b=1.0, s1=-4.0)
    sol = solve_two_body(spec)
    assert sol.a == pytest.approx(scattering_length(spec), rel=1e-12)
    assert sol.bound_energies == pytest.approx(bound_states(spec))
    assert sol.k == pytest.approx(math.sqrt(-sol.bound_energies[-1]), rel=1e-12)


def test_shallow_dimer_approaches_universal_binding():
    # the universal law B = 4 e^{-2gamma}/a^2 is exact only as B -> 0;
    # at S1 = -0.5 the well is already shallow enough for ~15%
    spec = gaussian_pair(b=1.0, s1=-0.5)
    es = bound_states(spec)
    assert len(es) == 1
    a = scattering_length(spec)
    b_univ, _ = weak_binding_energy(a)
    assert -es[0] == pytest.approx(b_univ, rel=0.15)


def test_deeper_well_binds_more():
    e_a = bound_states(gaussian_pair(b=1.0, s1=-3.0))[0]
    e_b = bound_states(gaussian_pair(b=1.0, s1=-5.0))[0]
    assert e_b < e_a
