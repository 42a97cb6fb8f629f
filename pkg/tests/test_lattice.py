"""Hamiltonian layout, spectral propagator, integrator oracle, truncation rule."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fanolattice import (
    LatticeSpec,
    RegimeWarning,
    build_hamiltonian,
    chain_length_for,
    propagator,
    propagator_ode,
)

from conftest import REF


def test_build_reference_geometry():
    h = build_hamiltonian(LatticeSpec(**REF, n_chain=25))
    m = h.matrix
    assert m.shape == (27, 27)
    assert np.array_equal(np.diag(m), [0.5, 0.5] + [0.0] * 25)
    assert m[0, 2] == m[2, 0] == 0.2
    assert m[1, 2] == m[2, 1] == 0.2
    for j in range(2, 26):
        assert m[j, j + 1] == m[j + 1, j] == 0.5
    assert np.array_equal(m, m.T)
    # nothing is coupled beyond the stated pattern
    allowed = np.zeros_like(m, dtype=bool)
    allowed[np.diag_indices(27)] = True
    allowed[0, 2] = allowed[2, 0] = allowed[1, 2] = allowed[2, 1] = True
    for j in range(2, 26):
        allowed[j, j + 1] = allowed[j + 1, j] = True
    assert np.all(m[~allowed] == 0)


def test_build_decoupled_sites_block_diagonal():
    spec = LatticeSpec(eps1=0.7, eps2=-0.3, kappa1=0.0, kappa2=0.0, kappa=0.5, n_chain=4)
    m = build_hamiltonian(spec).matrix
    assert np.all(m[:2, 2:] == 0)
    assert np.all(m[2:, :2] == 0)
    assert m[0, 0] == 0.7 and m[1, 1] == -0.3


def test_three_mode_splitter_spectrum():
    with pytest.warns(RegimeWarning):
        spec = LatticeSpec(eps1=0.0, eps2=0.0, kappa1=0.5, kappa2=0.5, kappa=0.5, n_chain=1)
    evals = np.linalg.eigvalsh(build_hamiltonian(spec).matrix)
    expected = [-0.5 * math.sqrt(2), 0.0, 0.5 * math.sqrt(2)]
    assert evals == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize(
    "overrides, match",
    [
        (dict(kappa=0.0), "kappa"),
        (dict(kappa=-1.0), "kappa"),
        (dict(n_chain=0), "n_chain"),
        (dict(n_chain=2.5), "n_chain"),
        (dict(kappa1=-0.1), "kappa1"),
        (dict(kappa2=-0.1), "kappa2"),
    ],
)
def test_spec_validation(overrides, match):
    params = dict(REF, n_chain=10)
    params.update(overrides)
    with pytest.raises(ValueError, match=match):
        LatticeSpec(**params)


def test_regime_warnings_are_advisory():
    with pytest.warns(RegimeWarning):
        LatticeSpec(eps1=0.0, eps2=0.0, kappa1=0.6, kappa2=0.1, kappa=0.5, n_chain=3)
    with pytest.warns(RegimeWarning):
        LatticeSpec(eps1=1.2, eps2=0.0, kappa1=0.1, kappa2=0.1, kappa=0.5, n_chain=3)


def test_propagator_at_zero_is_identity_exactly():
    h = build_hamiltonian(LatticeSpec(**REF, n_chain=10))
    s = propagator(h, 0.0)
    assert s.z == 0.0
    assert np.array_equal(s.matrix, np.eye(12, dtype=complex))


def test_propagator_rejects_negative_z():
    h = build_hamiltonian(LatticeSpec(**REF, n_chain=5))
    with pytest.raises(ValueError, match="z"):
        propagator(h, -1.0)


def test_decoupled_site_evolves_as_pure_phase():
    spec = LatticeSpec(eps1=0.8, eps2=0.1, kappa1=0.0, kappa2=0.0, kappa=0.5, n_chain=8)
    h = build_hamiltonian(spec)
    for z in (0.3, 2.0, 17.5):
        s = propagator(h, z).matrix
        assert s[0, 0] == pytest.approx(np.exp(-1j * 0.8 * z), abs=1e-12)
        assert abs(s[0, 0]) == pytest.approx(1.0, abs=1e-12)
        assert abs(s[1, 1]) == pytest.approx(1.0, abs=1e-12)


def test_site_swap_symmetry():
    h = build_hamiltonian(LatticeSpec(**REF, n_chain=30))
    s = propagator(h, 12.0).matrix
    assert abs(s[0, 0] - s[1, 1]) <= 1e-10
    assert abs(s[0, 2] - s[1, 2]) <= 1e-10


def test_energy_conservation_per_column():
    h = build_hamiltonian(LatticeSpec(**REF, n_chain=20))
    s = propagator(h, 9.0).matrix
    sums = np.sum(np.abs(s) ** 2, axis=0)
    assert sums == pytest.approx(np.ones(s.shape[0]), abs=1e-10)


def test_spectral_matches_integrator_on_long_chain():
    # Two independent methods for the same equation must coincide.
    h = build_hamiltonian(LatticeSpec(**REF, n_chain=100))
    s_spectral = propagator(h, 20.0).matrix
    s_ode = propagator_ode(h, 20.0, step=0.01).matrix
    assert np.max(np.abs(s_spectral - s_ode)) <= 1e-6


def test_integrator_scalar_phase():
    spec = LatticeSpec(eps1=1.0, eps2=0.0, kappa1=0.0, kappa2=0.0, kappa=0.5, n_chain=1)
    s = propagator_ode(build_hamiltonian(spec), math.pi, step=1e-3).matrix
    assert s[0, 0] == pytest.approx(-1.0, abs=1e-8)


def test_integrator_at_zero_is_identity_exactly():
    h = build_hamiltonian(LatticeSpec(**REF, n_chain=3))
    assert np.array_equal(propagator_ode(h, 0.0).matrix, np.eye(5, dtype=complex))


@pytest.mark.parametrize("bad_step", [0.0, -1e-3])
def test_integrator_rejects_bad_step(bad_step):
    h = build_hamiltonian(LatticeSpec(**REF, n_chain=3))
    with pytest.raises(ValueError, match="step"):
        propagator_ode(h, 1.0, step=bad_step)


def test_integrator_aborts_on_divergence():
    # Step sizes far beyond the stability limit overflow within a few steps.
    spec = LatticeSpec(eps1=0.0, eps2=0.0, kappa1=0.5, kappa2=0.5, kappa=1e3, n_chain=5)
    h = build_hamiltonian(spec)
    with pytest.raises(FloatingPointError, match="non-finite"):
        propagator_ode(h, 2e4, step=1e3)


def test_chain_length_examples():
    assert chain_length_for(30.0, 0.5, 1.5) == 47
    assert chain_length_for(1e-9, 0.5, 1.0) == 3
    assert chain_length_for(20.0, 0.5, 1.5) == 32


@pytest.mark.parametrize(
    "kwargs, match",
    [
        (dict(z_max=0.0, kappa=0.5, safety=1.5), "z_max"),
        (dict(z_max=1.0, kappa=0.0, safety=1.5), "kappa"),
        (dict(z_max=1.0, kappa=0.5, safety=0.5), "safety"),
    ],
)
def test_chain_length_validation(kwargs, match):
    with pytest.raises(ValueError, match=match):
        chain_length_for(**kwargs)


@settings(max_examples=40, deadline=None)
@given(
    z1=st.floats(0.1, 20), z2=st.floats(0.1, 20),
    k1=st.floats(0.05, 2), k2=st.floats(0.05, 2),
    s1=st.floats(1, 3), s2=st.floats(1, 3),
)
def test_chain_length_monotone(z1, z2, k1, k2, s1, s2):
    lo = chain_length_for(min(z1, z2), min(k1, k2), min(s1, s2))
    hi = chain_length_for(max(z1, z2), max(k1, k2), max(s1, s2))
    assert lo <= hi


lattice_specs = st.builds(
    lambda eps1, eps2, f1, f2, kappa, n: LatticeSpec(
        eps1=eps1, eps2=eps2, kappa1=f1 * kappa, kappa2=f2 * kappa, kappa=kappa, n_chain=n
    ),
    eps1=st.floats(-2, 2),
    eps2=st.floats(-2, 2),
    f1=st.floats(0, 1.5),
    f2=st.floats(0, 1.5),
    kappa=st.floats(0.05, 2),
    n=st.integers(1, 40),
)


@settings(max_examples=60, deadline=None)
@given(spec=lattice_specs, z=st.floats(0, 10))
def test_propagator_is_unitary(spec, z):
    s = propagator(build_hamiltonian(spec), z).matrix
    dim = s.shape[0]
    assert np.max(np.abs(s.conj().T @ s - np.eye(dim))) <= 1e-10


@settings(max_examples=30, deadline=None)
@given(spec=lattice_specs, z=st.floats(0, 10))
def test_decoupled_sites_never_decay(spec, z):
    from dataclasses import replace

    decoupled = replace(spec, kappa1=0.0, kappa2=0.0)
    s = propagator(build_hamiltonian(decoupled), z).matrix
    assert abs(s[0, 0]) == pytest.approx(1.0, abs=1e-12)
    assert abs(s[1, 1]) == pytest.approx(1.0, abs=1e-12)
