import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import multiset_distance
from gateforge import gate_families as gf
from gateforge import synthesis as syn
from gateforge.evolution import evolve_const, verify_gate
from gateforge.linalg import eig_unitary, expm_hermitian
from gateforge.pauli import PauliPolynomial, commutation_check, locality_profile

R2 = np.sqrt(2)
PI = np.pi
angle = st.floats(-PI, PI, allow_nan=False)
small_int = st.integers(-3, 3)
units = st.tuples(st.floats(0.25, 4), st.floats(0.25, 4))
THREE_TERMS = PauliPolynomial(3, {"ZYI": R2 * PI / 4, "IZY": R2 * PI / 4, "IYX": -PI / 4})


# --- single-qubit NOT -------------------------------------------------------

def test_not1_examples():
    assert syn.hamiltonian_not1(0, 0).terms == {"X": -PI / 2}
    assert np.abs(evolve_const(syn.hamiltonian_not1(0, 0)) - 1j * np.array([[0, 1], [1, 0]])).max() < 1e-15
    h = syn.hamiltonian_not1(1, PI / 2)
    assert h.coefficient("Y") == pytest.approx(PI / 2)
    assert abs(h.coefficient("X")) < 1e-15


@pytest.mark.parametrize("n", range(-3, 4))
def test_not1_energy_gap(n):
    e = np.linalg.eigvalsh(syn.hamiltonian_not1(n, 0.3).to_matrix())
    assert e[1] - e[0] == pytest.approx(2 * PI * abs(n - 0.5))
    assert e[1] - e[0] >= PI - 1e-12


def test_not1_general_zero_angles():
    h = syn.hamiltonian_not1_general(gf.Not1Params(), (0, 0))
    assert h.max_abs_difference(PauliPolynomial(1, {"I": PI / 2, "X": -PI / 2})) < 1e-15


@given(angle, angle, small_int, small_int, units)
def test_not1_general_properties(a, b, n1, n2, unit):
    dt, hbar = unit
    p = gf.Not1Params(a, b)
    h = syn.hamiltonian_not1_general(p, (n1, n2), dt, hbar)
    assert np.abs(evolve_const(h, dt, hbar) - gf.not1_unitary(p)).max() < 1e-10
    want_const = -hbar * (a + b) / (2 * dt) + PI * hbar / dt * (n1 + n2 + 0.5)
    assert h.constant == pytest.approx(want_const, abs=1e-12)
    # dropping the constant leaves the transverse field with gamma = (alpha - beta) / 2
    closed = syn.hamiltonian_not1(n1 - n2, (a - b) / 2, dt, hbar)
    assert h.without_constant().max_abs_difference(closed) < 1e-10


@given(angle, angle, small_int, small_int)
def test_not1_closed_form_matches_pipeline(a, b, n1, n2):
    p = gf.Not1Params(a, b)
    u = gf.not1_unitary(p)
    closed = syn.hamiltonian_not1_general(p, (n1, n2))
    branch = syn.branch_from_energies(u, np.linalg.eigvalsh(closed.to_matrix()))
    assert syn.synthesize(u, branch).max_abs_difference(closed) < 1e-9


# --- two-spin NOT -----------------------------------------------------------

def test_not2_zero_example():
    h = syn.hamiltonian_not2(0.0, 0, 0.0)
    assert h.max_abs_difference(PauliPolynomial(2, {"XX": -PI / 4, "YY": PI / 4})) < 1e-15


@given(st.floats(-5, 5), small_int, angle, units)
def test_not2_spectrum_and_gate(e_ising, n, g, unit):
    dt, hbar = unit
    h = syn.hamiltonian_not2(e_ising, n, g, dt, hbar)
    split = PI * hbar / dt * (n - 0.5)
    want = [-e_ising + split, -e_ising - split, e_ising, e_ising]
    assert multiset_distance(np.linalg.eigvalsh(h.to_matrix()), want) < 1e-10
    assert verify_gate(evolve_const(h, dt, hbar), gf.not2_spec()).worst_leakage < 1e-9


def test_not2_maps_input_up_to_output_down():
    u = evolve_const(syn.hamiltonian_not2(1.0, 1, PI / 3))
    rng = np.random.default_rng(5)
    a = rng.normal(size=2) + 1j * rng.normal(size=2)
    out = u @ np.array([a[0], a[1], 0, 0]) / np.linalg.norm(a)
    # components 1 and 3 in one-based numbering
    assert abs(out[0]) < 1e-9 and abs(out[2]) < 1e-9


def test_not2_commutation_structure():
    h = syn.hamiltonian_not2(0.9, 2, 0.4)
    ising = PauliPolynomial(2, {"ZZ": h.coefficient("ZZ")})
    assert commutation_check(ising, h - ising).commutator < 1e-10
    cos_part = PauliPolynomial(2, {"XX": h.coefficient("XX"), "YY": h.coefficient("YY")})
    sin_part = PauliPolynomial(2, {"XY": h.coefficient("XY"), "YX": h.coefficient("YX")})
    assert commutation_check(cos_part, sin_part).anticommutator < 1e-10


def _energies(p, branch, dt=1.0, hbar=1.0):
    return syn.not2_energies(p, branch, dt, hbar)


@given(angle, angle, angle, small_int, small_int, small_int)
def test_not2_general_reduces_when_e3_equals_e4(a, b, r, n1, n2, n3):
    p = gf.Not2RestrictedParams(a, b, r, r)
    branch = (n1, n2, n3, n3)
    h = syn.hamiltonian_not2_general(p, branch)
    assert 1 not in locality_profile(h)
    e1, e2, e3, e4 = _energies(p, branch)
    ising = -(e1 + e2 - e3 - e4) / 4
    closed = syn.hamiltonian_not2(ising, n1 - n2, (a - b) / 2)
    assert h.without_constant().max_abs_difference(closed) < 1e-10


@given(angle, angle, angle, angle, small_int, small_int, small_int, small_int)
def test_not2_general_fields_and_pipeline(a, b, r, d, n1, n2, n3, n4):
    p = gf.Not2RestrictedParams(a, b, r, d)
    branch = (n1, n2, n3, n4)
    h = syn.hamiltonian_not2_general(p, branch)
    e1, e2, e3, e4 = _energies(p, branch)
    assert h.coefficient("ZI") == pytest.approx((e3 - e4) / 4, abs=1e-12)
    assert h.coefficient("IZ") == pytest.approx(-(e3 - e4) / 4, abs=1e-12)
    assert h.constant == pytest.approx((e1 + e2 + e3 + e4) / 4, abs=1e-12)
    u = gf.not2_restricted_unitary(p)
    assert np.abs(expm_hermitian(h.to_matrix()) - u).max() < 1e-10
    try:
        branch_u = syn.branch_from_energies(u, [e1, e2, e3, e4])
    except ValueError:
        # only possible when a degenerate eigenvalue carries two different energies
        spectrum = eig_unitary(u)
        assert any(len(c) > 1 for c in spectrum.clusters)
        assert len({round(e, 9) for e in (e1, e2, e3, e4)}) > len(spectrum.clusters)
        return
    assert syn.synthesize(u, branch_u).max_abs_difference(h) < 1e-9


# --- XOR --------------------------------------------------------------------

def test_solve_xor_zero():
    s = syn.solve_xor_constraints(0.0, 0.0, 0.0)
    assert (s.delta, s.rho, s.omega_angle, s.xi, s.eta) == (-3 * PI, -PI, -2 * PI, -PI, PI)


@given(angle, angle, angle)
def test_solve_xor_mu_nu(a, b, g):
    s = syn.solve_xor_constraints(a, b, g)
    p = s.to_params()
    assert p.mu == pytest.approx(-3 * PI / 4, abs=1e-14)
    assert p.nu == pytest.approx(-3 * PI / 4, abs=1e-14)
    syn.check_xor_solution(s)


def test_check_xor_solution_rejects_tampered_angles():
    s = syn.solve_xor_constraints(0.1, 0.2, 0.3)
    bad = syn.XorAngleSolution(**{**s.__dict__, "rho": s.rho + 0.5})
    with pytest.raises(syn.ConstraintError):
        syn.check_xor_solution(bad)
    with pytest.raises(syn.ConstraintError):
        syn.build_pq(bad)


@given(angle, angle, angle)
def test_build_pq_properties(a, b, g):
    s = syn.solve_xor_constraints(a, b, g)
    pq = syn.build_pq(s)
    p = s.to_params()
    assert np.abs(expm_hermitian(-pq.p) - gf.v_block(p)).max() < 1e-10
    assert np.abs(expm_hermitian(-pq.q) - gf.w_block(p)).max() < 1e-10
    mu = -3 * PI / 4
    want = mu + np.arange(4) * PI / 2
    assert np.abs(np.sort(np.linalg.eigvalsh(pq.p)) - want).max() < 1e-10
    assert np.abs(np.diag(pq.P_minus_Q)).max() < 1e-12
    assert np.abs(pq.first_order.matrix() - pq.P_minus_Q).max() < 1e-12


def test_build_pq_zero_angle_entries():
    pq = syn.build_pq(syn.solve_xor_constraints(0, 0, 0))
    assert abs(pq.P_minus_Q[0, 1]) < 1e-15
    assert pq.P_minus_Q[0, 2] == pytest.approx(-R2 * PI * 1j / 4 * 2, abs=1e-14)


def test_hamiltonian_xor_zero_angles_three_terms():
    h = syn.hamiltonian_xor(0, 0, 0)
    assert set(h.terms) == set(THREE_TERMS.terms)
    assert h.max_abs_difference(THREE_TERMS) < 1e-12


@given(angle, angle, angle, units)
def test_hamiltonian_xor_matches_closed_form(a, b, g, unit):
    dt, hbar = unit
    h = syn.hamiltonian_xor(a, b, g, dt, hbar)
    assert set(h.terms) <= set(syn.XOR_STRINGS)
    assert set(locality_profile(h)) <= {2}
    assert h.max_abs_difference(syn.xor_closed_form(a, b, g, dt, hbar)) < 1e-12
    assert h.coefficient("ZIX") == pytest.approx(
        -PI * hbar / (8 * dt) * R2 * (np.sin(a) + np.sin(b)), abs=1e-12)
    assert verify_gate(evolve_const(h, dt, hbar), gf.xor_spec()).worst_leakage < 1e-9


@given(angle, angle, angle)
def test_hamiltonian_xor_matches_pipeline(a, b, g):
    u = gf.xor_unitary(syn.solve_xor_constraints(a, b, g).to_params())
    assert len(eig_unitary(u).clusters) == 4
    h = syn.synthesize(u, (0, 0, 0, 0))
    assert abs(h.constant) < 1e-9
    assert h.max_abs_difference(syn.hamiltonian_xor(a, b, g)) < 1e-9


def test_xor_closed_form_has_twelve_strings():
    assert set(syn.xor_closed_form(0.3, 0.5, 0.7).terms) == set(syn.XOR_STRINGS)
    assert len(syn.XOR_STRINGS) == 12


# --- generic pipeline -------------------------------------------------------

def test_synthesize_identity_is_zero():
    assert len(syn.synthesize(np.eye(4), (0,))) == 0


def test_synthesize_rejects_bad_branch():
    from gateforge.linalg import DimensionError
    with pytest.raises(DimensionError):
        syn.synthesize(np.eye(2), (0, 0))


def test_energy_levels_residues(rng):
    u = gf.not2_restricted_unitary(gf.Not2RestrictedParams(*rng.uniform(-PI, PI, 4)))
    levels = syn.energy_levels(u, (1, -2, 0, 3), delta_t=0.5, hbar=2.0)
    assert np.abs(levels.residues()).max() < 1e-10
    assert sum(levels.multiplicities) == 4


def test_branch_from_energies_rejects_incompatible():
    with pytest.raises(ValueError):
        syn.branch_from_energies(np.eye(2), [0.5, 0.5])
