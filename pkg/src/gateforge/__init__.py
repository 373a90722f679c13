"""Synthesis, decomposition and verification of one-shot spin-gate Hamiltonians."""
__version__ = "0.1.0"

from ._accel import BACKEND, USING_NUMBA
from .evolution import (
    Protocol, VerificationReport, check_protocol, evolve_const, evolve_protocol, evolve_schedule,
    protocol_integral, split_commutes, verify_gate,
)
from .gate_families import (
    GateSpec, Not1Params, Not2GeneralParams, Not2RestrictedParams, XorParams, not1_spec,
    not1_unitary, not2_general_unitary, not2_restricted_unitary, not2_spec, pattern_leakage,
    xor_spec, xor_unitary,
)
from .linalg import (
    DimensionError, DomainError, check_unitary, eig_unitary, expm_hermitian, logm_unitary,
)
from .pauli import PauliPolynomial, commutation_check, decompose, locality_profile, string_matrix
from .search import CouplingAnsatz, SearchConfig, SearchResult, objective, run_search
from .synthesis import (
    ConstraintError, build_pq, hamiltonian_not1, hamiltonian_not1_general, hamiltonian_not2,
    hamiltonian_not2_general, hamiltonian_xor, solve_xor_constraints, synthesize,
)
