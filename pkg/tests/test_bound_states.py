"""Bound-state detection and the z -> infinity survival plateaus."""

import math

import numpy as np
import pytest

from fanolattice import (
    LatticeSpec,
    SweepConfig,
    asymptotic_survival,
    build_hamiltonian,
    chain_length_for,
    detect_bics,
    sweep_z,
)

from conftest import REF


def analytic_bound_vector(spec):
    v = np.zeros(spec.dim)
    v[0] = 1.0 / spec.kappa1
    v[1] = -1.0 / spec.kappa2
    return v / np.linalg.norm(v)


def test_matched_energies_give_exactly_one_bound_state(device_spec):
    found = detect_bics(build_hamiltonian(device_spec))
    assert len(found) == 1
    state = found[0]
    assert state.energy == pytest.approx(0.5, abs=1e-10)
    assert state.chain_weight <= 1e-14
    overlap = abs(np.vdot(state.vector, analytic_bound_vector(device_spec)))
    assert overlap == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("eps2", [0.55, 0.9, 0.3])
def test_detuned_energies_give_no_bound_state(eps2):
    spec = LatticeSpec(eps1=0.5, eps2=eps2, kappa1=0.2, kappa2=0.2, kappa=0.5, n_chain=25)
    assert detect_bics(build_hamiltonian(spec)) == []


def test_asymmetric_couplings_bound_vector():
    spec = LatticeSpec(eps1=0.0, eps2=0.0, kappa1=0.3, kappa2=0.1, kappa=0.5, n_chain=25)
    found = detect_bics(build_hamiltonian(spec))
    assert len(found) == 1
    overlap = abs(np.vdot(found[0].vector, analytic_bound_vector(spec)))
    assert overlap == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize(
    "kappa1, kappa2, eps",
    [(0.2, 0.2, 0.5), (0.3, 0.1, 0.0), (0.45, 0.05, -0.4), (0.25, 0.4, 0.7)],
)
def test_analytic_vector_is_exact_even_when_truncated(kappa1, kappa2, eps):
    spec = LatticeSpec(eps1=eps, eps2=eps, kappa1=kappa1, kappa2=kappa2, kappa=0.5, n_chain=25)
    h = build_hamiltonian(spec)
    v = analytic_bound_vector(spec)
    assert np.linalg.norm(h.matrix @ v - eps * v) <= 1e-12


def test_detected_states_are_eigenvectors(device_spec):
    h = build_hamiltonian(device_spec)
    for state in detect_bics(h):
        residual = np.linalg.norm(h.matrix @ state.vector - state.energy * state.vector)
        assert residual <= 1e-10


@pytest.mark.parametrize("threshold", [0.0, 1.0, -0.5, 2.0])
def test_threshold_validation(threshold):
    h = build_hamiltonian(LatticeSpec(**REF, n_chain=5))
    with pytest.raises(ValueError, match="threshold"):
        detect_bics(h, threshold=threshold)


def test_asymptotic_matched_symmetric_couplings(device_spec):
    record = asymptotic_survival(device_spec)
    assert record.z == math.inf
    assert record.p_boson == pytest.approx(0.25, abs=1e-12)
    assert record.p_classical == pytest.approx(0.125, abs=1e-12)
    assert record.p_fermion <= 1e-20
    assert record.p_entangled <= 1e-20


def test_asymptotic_general_couplings_closed_form():
    k1, k2 = 0.3, 0.15
    spec = LatticeSpec(eps1=0.4, eps2=0.4, kappa1=k1, kappa2=k2, kappa=0.5, n_chain=40)
    record = asymptotic_survival(spec)
    # projection of the launch sites onto (1/k1, -1/k2, 0, ...):
    # permanent of the block is 2 k1^2 k2^2 / (k1^2 + k2^2)^2.
    perm = 2.0 * k1**2 * k2**2 / (k1**2 + k2**2) ** 2
    assert record.p_boson == pytest.approx(perm**2, abs=1e-12)
    assert record.p_classical == pytest.approx(0.5 * perm**2, abs=1e-12)
    assert record.p_fermion <= 1e-20


def test_asymptotic_detuned_is_zero():
    spec = LatticeSpec(eps1=0.5, eps2=0.8, kappa1=0.2, kappa2=0.2, kappa=0.5, n_chain=25)
    record = asymptotic_survival(spec)
    assert record.p_boson == 0.0
    assert record.p_fermion == 0.0
    assert record.p_classical == 0.0
    assert record.p_entangled == 0.0


def test_asymptotic_single_decoupled_site_cannot_hold_the_pair():
    # Site 1 decoupled: it is trivially bound, but the joint survival still
    # dies because the other particle has nowhere non-decaying to go.
    spec = LatticeSpec(eps1=0.5, eps2=0.5, kappa1=0.0, kappa2=0.2, kappa=0.5, n_chain=25)
    record = asymptotic_survival(spec)
    assert record.p_boson <= 1e-12
    assert record.p_fermion <= 1e-12
    assert record.p_classical <= 1e-12


def test_both_sites_decoupled_nothing_decays():
    spec = LatticeSpec(eps1=0.5, eps2=0.1, kappa1=0.0, kappa2=0.0, kappa=0.5, n_chain=25)
    record = asymptotic_survival(spec)
    assert record.p_boson == pytest.approx(1.0, abs=1e-12)
    assert record.p_fermion == pytest.approx(1.0, abs=1e-12)
    assert record.p_classical == pytest.approx(1.0, abs=1e-12)


def _window_means(spec, z_max=30.0):
    cfg = SweepConfig(base=spec, z_values=tuple(np.linspace(0.0, z_max, 301)))
    records = [r for r in sweep_z(cfg) if r.z >= 0.8 * z_max]
    return (
        float(np.mean([r.p_boson for r in records])),
        float(np.mean([r.p_fermion for r in records])),
        float(np.mean([r.p_classical for r in records])),
    )


def test_long_run_simulation_agrees_with_projection():
    # The averaged tail of a reflection-safe run must land on the projection
    # values; the window average washes out the bound/decaying interference.
    for k1, k2, eps in ((0.2, 0.2, 0.5), (0.3, 0.15, 0.4)):
        n_chain = chain_length_for(30.0, 0.5, 1.5)
        spec = LatticeSpec(eps1=eps, eps2=eps, kappa1=k1, kappa2=k2, kappa=0.5, n_chain=n_chain)
        asym = asymptotic_survival(spec)
        boson, fermion, classical = _window_means(spec)
        assert boson == pytest.approx(asym.p_boson, abs=0.02)
        assert fermion == pytest.approx(asym.p_fermion, abs=0.02)
        assert classical == pytest.approx(asym.p_classical, abs=0.02)
