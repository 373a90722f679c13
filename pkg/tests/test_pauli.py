import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_hermitian
from gateforge import pauli
from gateforge.linalg import DimensionError, DomainError
from gateforge.pauli import PauliPolynomial
from gateforge.synthesis import XOR_STRINGS, hamiltonian_not2, hamiltonian_xor

R2 = np.sqrt(2)
strings = st.integers(1, 3).flatmap(lambda n: st.text("IXYZ", min_size=n, max_size=n))
coeffs = st.floats(-10, 10, allow_nan=False).filter(lambda c: abs(c) > 1e-6)


@st.composite
def polynomials(draw, n=None):
    n = n or draw(st.integers(1, 3))
    keys = draw(st.lists(st.text("IXYZ", min_size=n, max_size=n), max_size=8, unique=True))
    return PauliPolynomial(n, {k: draw(coeffs) for k in keys})


def test_string_matrix_x():
    assert np.array_equal(pauli.string_matrix("X"), [[0, 1], [1, 0]])


def test_string_matrix_zy_entries():
    m = pauli.string_matrix("ZY")
    expected = np.zeros((4, 4), dtype=complex)
    expected[0, 1], expected[1, 0], expected[2, 3], expected[3, 2] = -1j, 1j, 1j, -1j
    assert np.array_equal(m, expected)


def test_string_matrix_zyi_is_first_factor_outermost():
    m = pauli.string_matrix("ZYI")
    assert np.array_equal(m, np.kron(np.kron(pauli.PAULI["Z"], pauli.PAULI["Y"]), np.eye(2)))


@pytest.mark.parametrize("s", ["".join(p) for n in (1, 2) for p in itertools.product("IXYZ", repeat=n)])
def test_string_matrix_hermitian_and_unitary(s):
    m = pauli.string_matrix(s)
    assert np.array_equal(m, m.conj().T)
    assert np.allclose(m @ m, np.eye(len(m)))


@pytest.mark.parametrize("bad", ["", "XA", "xy", 3])
def test_validate_string_rejects(bad):
    with pytest.raises(ValueError):
        pauli.validate_string(bad)


def test_weight_and_codes():
    assert pauli.weight("IXIZ") == 2
    for n in (1, 2, 3):
        for k in range(4**n):
            assert pauli.string_code(pauli.code_string(k, n)) == k


def test_polynomial_canonical_form():
    p = PauliPolynomial(2, {"ZZ": 1.0, "XI": 1e-16, "IX": -2})
    assert list(p.terms) == ["IX", "ZZ"]
    assert PauliPolynomial.from_pairs(1, [("X", 1), ("X", 2)]).terms == {"X": 3.0}


def test_polynomial_rejects_wrong_length_and_nonfinite():
    with pytest.raises(DimensionError):
        PauliPolynomial(2, {"X": 1})
    with pytest.raises(DomainError):
        PauliPolynomial(1, {"X": np.inf})


def test_polynomial_arithmetic():
    a = PauliPolynomial(1, {"X": 1, "Z": 2})
    b = PauliPolynomial(1, {"X": -1, "Y": 1})
    assert (a + b).terms == {"Y": 1.0, "Z": 2.0}
    assert (a - a).terms == {}
    assert (2 * a).terms == {"X": 2.0, "Z": 4.0}
    with pytest.raises(DimensionError):
        a + PauliPolynomial(2, {})


def test_decompose_xx():
    assert pauli.decompose(np.kron(pauli.PAULI["X"], pauli.PAULI["X"])).terms == {"XX": 1.0}


def test_decompose_three_term_xor_matrix():
    h = sum(c * pauli.string_matrix(s) for s, c in
            [("ZYI", R2 * np.pi / 4), ("IZY", R2 * np.pi / 4), ("IYX", -np.pi / 4)])
    got = pauli.decompose(h)
    want = PauliPolynomial(3, {"ZYI": R2 * np.pi / 4, "IZY": R2 * np.pi / 4, "IYX": -np.pi / 4})
    assert got.max_abs_difference(want) < 1e-15
    assert set(pauli.locality_profile(got)) == {2}


def test_decompose_random_roundtrip(rng):
    for n in (1, 2, 3, 4):
        h = random_hermitian(rng, 2**n)
        p = pauli.decompose(h)
        assert np.abs(p.to_matrix() - h).max() < 1e-10
        # Parseval
        assert sum(c * c for c in p.terms.values()) * 2**n == pytest.approx(np.linalg.norm(h) ** 2, rel=1e-12)


def test_decompose_errors():
    with pytest.raises(DomainError):
        pauli.decompose([[0, 1], [0, 0]])
    with pytest.raises(DimensionError):
        pauli.decompose(np.eye(3))


@given(polynomials())
def test_decompose_inverts_to_matrix(p):
    assert pauli.decompose(p.to_matrix()).max_abs_difference(p) < 1e-12


@given(st.floats(-np.pi, np.pi), st.floats(-np.pi, np.pi), st.floats(-np.pi, np.pi))
def test_xor_family_is_two_local(a, b, g):
    p = hamiltonian_xor(a, b, g)
    assert set(pauli.locality_profile(p)) <= {2}
    assert set(p.terms) <= set(XOR_STRINGS)


def test_locality_profile_groups_by_weight():
    p = PauliPolynomial(2, {"ZI": 1, "IZ": -1, "XX": 2})
    assert pauli.locality_profile(p) == {1: [("IZ", -1.0), ("ZI", 1.0)], 2: [("XX", 2.0)]}
    assert pauli.locality_profile(PauliPolynomial.zero(2)) == {}


def test_commutation_ising_term_commutes_with_transverse_part():
    h = hamiltonian_not2(0.8, 1, 0.3)
    ising = PauliPolynomial(2, {"ZZ": h.coefficient("ZZ")})
    assert pauli.commutation_check(ising, h - ising).commutator < 1e-10


def test_commutation_cos_and_sin_parts_anticommute():
    cos_part = PauliPolynomial(2, {"XX": 1, "YY": -1})
    sin_part = PauliPolynomial(2, {"XY": 1, "YX": 1})
    assert pauli.commutation_check(cos_part, sin_part).anticommutator < 1e-10


def test_commutation_same_string():
    x = PauliPolynomial(1, {"X": 2.0})
    assert pauli.commutation_check(x, x).commutator == 0.0
    with pytest.raises(DimensionError):
        pauli.commutation_check(x, PauliPolynomial(2, {}))
