import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gateforge import gate_families as gf
from gateforge import search as sr
from gateforge.linalg import DimensionError
from gateforge.synthesis import NOT2_STRINGS, XOR_STRINGS, hamiltonian_not2, hamiltonian_xor

PI = np.pi


def coefficients_of(h, ansatz):
    return [h.coefficient(s) for s in ansatz.basis_terms]


@given(st.floats(-PI, PI), st.floats(-PI, PI), st.floats(-PI, PI))
@settings(max_examples=25)
def test_objective_vanishes_on_xor_family(a, b, g):
    ansatz = sr.tensor_xor_ansatz()
    coeffs = coefficients_of(hamiltonian_xor(a, b, g), ansatz)
    assert sr.objective(coeffs, ansatz, gf.xor_spec()) < 1e-9


def test_objective_vanishes_on_two_spin_not():
    ansatz = sr.tensor_not2_ansatz()
    coeffs = coefficients_of(hamiltonian_not2(0.6, 1, 0.9), ansatz)
    assert sr.objective(coeffs, ansatz, gf.not2_spec()) < 1e-9


def test_objective_zero_couplings_against_xor():
    # identity evolution leaks every row completely
    assert sr.objective(np.zeros(12), sr.tensor_xor_ansatz(), gf.xor_spec()) == pytest.approx(1.0)


def test_objective_length_mismatch():
    with pytest.raises(DimensionError):
        sr.objective([1.0, 2.0], sr.tensor_xor_ansatz(), gf.xor_spec())
    with pytest.raises(DimensionError):
        sr.objective([1.0], sr.zz_ansatz(), gf.xor_spec())


def test_ansatz_validation():
    with pytest.raises(ValueError):
        sr.CouplingAnsatz(3, ("XYZ",), two_spin_only=True)
    with pytest.raises(DimensionError):
        sr.CouplingAnsatz(2, ("XYZ",))
    with pytest.raises(DimensionError):
        sr.CouplingAnsatz(2, ("XX", "ZZ"), bounds=[(0, 1)])
    with pytest.raises(ValueError):
        sr.CouplingAnsatz(2, ("XX",), bounds=[(1, 0)])


def test_presets():
    assert sr.tensor_xor_ansatz().basis_terms == XOR_STRINGS
    assert sr.tensor_not2_ansatz().basis_terms == NOT2_STRINGS
    assert sr.ising_ansatz(3).basis_terms == ("ZZI", "ZIZ", "IZZ")
    assert sr.ising_ansatz(3, chain=True).basis_terms == ("ZZI", "IZZ")
    assert sr.xy_ansatz(2).basis_terms == ("XX+YY",)
    assert sr.heisenberg_ansatz(2).basis_terms == ("XX+YY+ZZ",)
    assert len(sr.ising_ansatz(3, fields=True)) == 3 + 9
    h = sr.heisenberg_ansatz(2).polynomial([0.5])
    assert h.terms == {"XX": 0.5, "YY": 0.5, "ZZ": 0.5}


def test_default_bounds_scale_with_units():
    b = sr.zz_ansatz().resolved_bounds(delta_t=2.0, hbar=3.0)
    assert np.allclose(b, [[-3 * PI, 3 * PI]])


def test_config_validation():
    for bad in ({"restarts": 0}, {"max_evaluations": 0}, {"optimizer": "bfgs"},
                {"workers": 0}, {"target_leakage": -1.0}):
        with pytest.raises(ValueError):
            sr.SearchConfig(**bad)
    with pytest.raises(ValueError):
        sr.SearchConfig.from_dict({"restarts": 2, "colour": 1})
    assert sr.SearchConfig.from_dict(sr.SearchConfig(seed=4).to_dict()) == sr.SearchConfig(seed=4)


def test_empty_ansatz_rejected():
    with pytest.raises(ValueError):
        sr.run_search(sr.CouplingAnsatz(2, ()), gf.not2_spec())


def test_xor_recovery():
    result = sr.run_search(sr.tensor_xor_ansatz(), gf.xor_spec(),
                           sr.SearchConfig(restarts=20, max_evaluations=2000, seed=1))
    assert result.target_met
    assert result.best_leakage < 1e-6
    assert result.evaluations_used <= 20 * 2000


def test_two_spin_not_recovery():
    result = sr.run_search(sr.tensor_not2_ansatz(), gf.not2_spec(), sr.SearchConfig(seed=3))
    assert result.best_leakage < 1e-6


def test_zz_only_has_a_floor():
    ansatz, spec = sr.zz_ansatz(), gf.not2_spec()
    sweep = [sr.objective([c], ansatz, spec) for c in np.linspace(-2 * PI, 2 * PI, 2001)]
    assert min(sweep) > 0.99
    result = sr.run_search(ansatz, spec, sr.SearchConfig(restarts=2, max_evaluations=300, seed=0))
    assert not result.target_met
    assert result.best_leakage > 0.99
    assert result.evaluations_used == 600


def _check_result(result, ansatz, spec, config):
    recomputed = sr.objective(result.best_coefficients, ansatz, spec)
    assert abs(recomputed - result.best_leakage) <= 1e-12
    assert result.best_leakage == min(result.restart_best)
    for r in range(len(result.restart_best)):
        trace = [v for k, _, v in result.history if k == r]
        assert trace == sorted(trace, reverse=True)
        assert trace[-1] == result.restart_best[r]
    bounds = ansatz.resolved_bounds()
    assert np.all(np.asarray(result.best_coefficients) >= bounds[:, 0])
    assert np.all(np.asarray(result.best_coefficients) <= bounds[:, 1])


@pytest.mark.parametrize("optimizer", sr.OPTIMIZERS)
def test_result_invariants(optimizer):
    ansatz, spec = sr.tensor_not2_ansatz(), gf.not2_spec()
    config = sr.SearchConfig(restarts=3, max_evaluations=150, seed=11, optimizer=optimizer,
                             target_leakage=0.0)
    result = sr.run_search(ansatz, spec, config)
    _check_result(result, ansatz, spec, config)
    assert result.evaluations_used == 450


def test_seeded_determinism_across_workers():
    ansatz, spec = sr.xy_ansatz(3, fields=True), gf.xor_spec()
    base = dict(restarts=4, max_evaluations=200, seed=5)
    one = sr.run_search(ansatz, spec, sr.SearchConfig(**base))
    again = sr.run_search(ansatz, spec, sr.SearchConfig(**base))
    threaded = sr.run_search(ansatz, spec, sr.SearchConfig(workers=3, **base))
    assert one == again == threaded
    other = sr.run_search(ansatz, spec, sr.SearchConfig(**{**base, "seed": 6}))
    assert other.best_coefficients != one.best_coefficients


def test_threaded_stop_matches_sequential():
    ansatz, spec = sr.tensor_not2_ansatz(), gf.not2_spec()
    seq = sr.run_search(ansatz, spec, sr.SearchConfig(restarts=5, seed=2))
    par = sr.run_search(ansatz, spec, sr.SearchConfig(restarts=5, seed=2, workers=4))
    assert seq == par


@pytest.mark.parametrize("preset", [sr.ising_ansatz, sr.xy_ansatz, sr.heisenberg_ansatz])
def test_conventional_ansatz_searches_complete(preset):
    result = sr.run_search(preset(3), gf.xor_spec(),
                           sr.SearchConfig(restarts=2, max_evaluations=200, seed=0))
    # exploratory: only well-formedness is asserted
    assert 0.0 <= result.best_leakage <= 1.0 + 1e-12
    assert result.evaluations_used > 0


def test_history_csv():
    result = sr.run_search(sr.zz_ansatz(), gf.not2_spec(),
                           sr.SearchConfig(restarts=1, max_evaluations=20, seed=0))
    lines = result.history_csv().splitlines()
    assert lines[0] == "restart,evaluation,best_leakage"
    assert len(lines) == len(result.history) + 1
    r, e, v = lines[1].split(",")
    assert (int(r), int(e)) == result.history[0][:2] and float(v) == result.history[0][2]


def test_ansatz_dict_roundtrip():
    a = sr.CouplingAnsatz(2, ("XX+YY", "ZZ"), bounds=[(-1, 1), (0, 2)], name="mine")
    assert sr.CouplingAnsatz.from_dict(a.to_dict()) == a
    with pytest.raises(ValueError):
        sr.CouplingAnsatz.from_dict({**a.to_dict(), "extra": 1})
