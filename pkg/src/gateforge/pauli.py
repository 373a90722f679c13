"""Pauli-string algebra on n qubits.

A Pauli string is a plain ``str`` over ``"IXYZ"``; the leftmost letter acts on
qubit A, the most significant factor of the tensor product.  Basis index 0 is
the all-up state, so ``"Z"`` is ``diag(1, -1)`` in the usual convention.
"""
import functools
from dataclasses import dataclass, field
from typing import Mapping, NamedTuple

import numpy as np

from . import kernels
from .linalg import HERMITIAN_TOL, DimensionError, DomainError, as_matrix, hermiticity_residual

LETTERS = "IXYZ"
PRUNE = 1e-14

PAULI = {
    "I": np.eye(2, dtype=np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}


def validate_string(s):
    if not isinstance(s, str) or not s or any(ch not in LETTERS for ch in s):
        raise ValueError(f"invalid Pauli string {s!r}")
    return s


def weight(s):
    """Number of non-identity letters."""
    return sum(ch != "I" for ch in validate_string(s))


def string_matrix(s):
    """Dense ``2**n x 2**n`` matrix of a Pauli string (Kronecker product)."""
    return functools.reduce(np.kron, (PAULI[ch] for ch in validate_string(s)))


def string_code(s):
    """Base-4 index of a string, the ordering used by the kernels."""
    code = 0
    for ch in validate_string(s):
        code = 4 * code + LETTERS.index(ch)
    return code


def code_string(code, n):
    letters = []
    for _ in range(n):
        letters.append(LETTERS[code & 3])
        code >>= 2
    return "".join(reversed(letters))


def site_string(n, sites):
    """String with ``sites[i]`` on qubit ``i`` and identity elsewhere.

    >>> site_string(3, {0: "Z", 1: "Y"})
    'ZYI'
    """
    letters = ["I"] * n
    for i, ch in sites.items():
        letters[i] = ch
    return validate_string("".join(letters))


@dataclass(frozen=True)
class PauliPolynomial:
    """Real linear combination of n-qubit Pauli strings.

    Terms with ``|coefficient| <= 1e-14`` are dropped and the remainder kept
    in lexicographic (``I < X < Y < Z``) order, so two polynomials compare
    equal exactly when their canonical term tables do.
    """

    n_qubits: int
    terms: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if int(self.n_qubits) < 1:
            raise ValueError("n_qubits must be positive")
        clean = {}
        for s, c in dict(self.terms).items():
            validate_string(s)
            if len(s) != self.n_qubits:
                raise DimensionError(f"string {s!r} does not have {self.n_qubits} letters")
            c = float(c)
            if not np.isfinite(c):
                raise DomainError(f"non-finite coefficient on {s!r}")
            if abs(c) > PRUNE:
                clean[s] = c
        object.__setattr__(self, "n_qubits", int(self.n_qubits))
        object.__setattr__(self, "terms", dict(sorted(clean.items())))

    @classmethod
    def zero(cls, n_qubits):
        return cls(n_qubits, {})

    @classmethod
    def from_pairs(cls, n_qubits, pairs):
        """Build from ``(string, coefficient)`` pairs, summing repeats."""
        acc = {}
        for s, c in pairs:
            acc[s] = acc.get(s, 0.0) + c
        return cls(n_qubits, acc)

    @property
    def identity_string(self):
        return "I" * self.n_qubits

    @property
    def constant(self):
        return self.terms.get(self.identity_string, 0.0)

    def coefficient(self, s):
        return self.terms.get(s, 0.0)

    def without_constant(self):
        return PauliPolynomial(self.n_qubits,
                               {s: c for s, c in self.terms.items() if s != self.identity_string})

    def items(self):
        return list(self.terms.items())

    def __len__(self):
        return len(self.terms)

    def __add__(self, other):
        if not isinstance(other, PauliPolynomial):
            return NotImplemented
        if other.n_qubits != self.n_qubits:
            raise DimensionError("qubit counts differ")
        return PauliPolynomial.from_pairs(self.n_qubits, self.items() + other.items())

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, scalar):
        return PauliPolynomial(self.n_qubits, {s: c * float(scalar) for s, c in self.terms.items()})

    __rmul__ = __mul__

    def to_vector(self):
        """Coefficients over all ``4**n`` strings in base-4 order."""
        vec = np.zeros(4**self.n_qubits)
        for s, c in self.terms.items():
            vec[string_code(s)] = c
        return vec

    def to_matrix(self):
        return kernels.pauli_matrix(self.to_vector().astype(np.complex128), self.n_qubits)

    def max_abs_difference(self, other):
        if other.n_qubits != self.n_qubits:
            raise DimensionError("qubit counts differ")
        keys = set(self.terms) | set(other.terms)
        return max((abs(self.coefficient(s) - other.coefficient(s)) for s in keys), default=0.0)


def _qubit_count(dim):
    n = int(dim).bit_length() - 1
    if dim < 2 or 1 << n != dim:
        raise DimensionError(f"dimension {dim} is not a power of two")
    return n


def decompose(h, tol=HERMITIAN_TOL):
    """Expand a Hermitian matrix as ``sum_s c_s P_s`` with ``c_s = Tr(P_s H) / 2**n``."""
    a = as_matrix(h)
    n = _qubit_count(a.shape[0])
    scale = max(1.0, float(kernels.frobenius(a)))
    residual = hermiticity_residual(a)
    if residual > tol * scale:
        raise DomainError(f"matrix is not Hermitian (||H - H^H||_F = {residual:.3e})", residual)
    coeffs = kernels.pauli_coefficients(a, n)
    worst_imag = float(np.abs(coeffs.imag).max())
    if worst_imag > tol * scale:
        raise DomainError(f"imaginary Pauli coefficient {worst_imag:.3e}", worst_imag)
    return PauliPolynomial(n, {code_string(k, n): c for k, c in enumerate(coeffs.real)})


def locality_profile(p):
    """Terms grouped by weight; empty weight classes are omitted."""
    profile = {}
    for s, c in p.terms.items():
        profile.setdefault(weight(s), []).append((s, c))
    return dict(sorted(profile.items()))


class CommutationNorms(NamedTuple):
    commutator: float
    anticommutator: float


def commutation_check(a, b):
    """Frobenius norms of ``[A, B]`` and ``{A, B}``."""
    if a.n_qubits != b.n_qubits:
        raise DimensionError(f"{a.n_qubits}-qubit and {b.n_qubits}-qubit polynomials")
    ma, mb = a.to_matrix(), b.to_matrix()
    ab, ba = ma @ mb, mb @ ma
    return CommutationNorms(float(kernels.frobenius(ab - ba)), float(kernels.frobenius(ab + ba)))
