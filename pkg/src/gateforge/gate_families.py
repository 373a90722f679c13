"""Parametrized gate unitaries and the block patterns they must respect.

Basis convention, used everywhere: index 0 is the all-up state ``|11...1>``
and indices descend in binary with 1 = up, qubit A most significant.  A
state's index bit is therefore ``1 - (logical bit)``.
"""
from dataclasses import asdict, dataclass, fields

import numpy as np

from .linalg import DimensionError, as_matrix


@dataclass(frozen=True)
class GateSpec:
    """Truth-table semantics of a gate plus the entry mask they imply.

    ``rows`` pairs a set of input basis indices with the basis indices that
    span the required output subspace.  ``allowed_mask[i, j]`` is true when
    ``U[i, j]`` may be nonzero: some row sends input ``j`` into a subspace
    containing ``i``, or no row constrains input ``j`` at all.
    """

    name: str
    n_qubits: int
    rows: tuple
    allowed_mask: np.ndarray

    @classmethod
    def from_rows(cls, name, n_qubits, rows):
        dim = 2**n_qubits
        rows = tuple((tuple(int(i) for i in ins), tuple(int(o) for o in outs)) for ins, outs in rows)
        mask = np.ones((dim, dim), dtype=bool)
        for ins, outs in rows:
            for j in ins:
                if not 0 <= j < dim or any(not 0 <= o < dim for o in outs):
                    raise ValueError("semantic row references a basis index out of range")
                mask[:, j] = False
        for ins, outs in rows:
            for j in ins:
                mask[list(outs), j] = True
        mask.setflags(write=False)
        return cls(name, n_qubits, rows, mask)

    @property
    def dim(self):
        return 2**self.n_qubits


def not1_spec():
    """Single-qubit NOT: up goes to down and down to up."""
    return GateSpec.from_rows("not1", 1, [((0,), (1,)), ((1,), (0,))])


def not2_spec():
    """Two-spin NOT, input I = qubit 0, output O = qubit 1.

    I up (``a3 = a4 = 0``) must leave components 1 and 3 zero, i.e. O down;
    I down must leave components 2 and 4 zero.
    """
    return GateSpec.from_rows("not2", 2, [((0, 1), (1, 3)), ((2, 3), (0, 2))])


def xor_spec():
    """Three-spin XOR of A and B deposited in C; A, B outputs and C phase free."""
    rows = []
    for a in (0, 1):
        for b in (0, 1):
            ins = (4 * a + 2 * b, 4 * a + 2 * b + 1)
            # logical bits are 1 - index bits, and XOR is invariant under flipping both
            c_index = 1 - (a ^ b)
            rows.append((ins, tuple(i for i in range(8) if i & 1 == c_index)))
    return GateSpec.from_rows("xor", 3, rows)


SPECS = {"not1": not1_spec, "not2": not2_spec, "xor": xor_spec}


def spec_by_name(name):
    try:
        return SPECS[name]()
    except KeyError:
        raise ValueError(f"unknown gate spec {name!r}; expected one of {sorted(SPECS)}") from None


def pattern_leakage(u, spec):
    """Total squared magnitude of ``U`` where ``spec.allowed_mask`` is false."""
    a = as_matrix(u)
    if a.shape != spec.allowed_mask.shape:
        raise DimensionError(f"{a.shape[0]}-dimensional U against a {spec.dim}-dimensional spec")
    return float(np.sum(np.abs(a[~spec.allowed_mask]) ** 2))


class _Params:
    @classmethod
    def field_names(cls):
        return tuple(f.name for f in fields(cls))

    def as_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class Not1Params(_Params):
    alpha: float = 0.0
    beta: float = 0.0


@dataclass(frozen=True)
class Not2GeneralParams(_Params):
    chi: float = 0.0
    beta: float = 0.0
    alpha: float = 0.0
    rho: float = 0.0
    eta: float = 0.0
    delta: float = 0.0
    Omega: float = 0.0
    Upsilon: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "Omega", float(np.clip(self.Omega, 0.0, np.pi / 2)))
        object.__setattr__(self, "Upsilon", float(np.clip(self.Upsilon, 0.0, np.pi / 2)))


@dataclass(frozen=True)
class Not2RestrictedParams(_Params):
    alpha: float = 0.0
    beta: float = 0.0
    rho: float = 0.0
    delta: float = 0.0


@dataclass(frozen=True)
class XorParams(_Params):
    alpha: float = 0.0
    beta: float = 0.0
    gamma: float = 0.0
    delta: float = 0.0
    rho: float = 0.0
    omega_angle: float = 0.0
    xi: float = 0.0
    eta: float = 0.0

    @property
    def mu(self):
        return (self.alpha + self.beta + self.gamma + self.delta) / 4

    @property
    def nu(self):
        return (self.rho + self.omega_angle + self.xi + self.eta) / 4


def _e(x):
    return np.exp(1j * x)


def not1_unitary(p):
    """``[[0, e^{i beta}], [e^{i alpha}, 0]]``: up picks up alpha, down picks up beta."""
    return np.array([[0, _e(p.beta)], [_e(p.alpha), 0]], dtype=np.complex128)


def not2_general_unitary(p):
    """The full 8-angle family of unitaries with the two-spin NOT zero pattern."""
    so, co = np.sin(p.Omega), np.cos(p.Omega)
    su, cu = np.sin(p.Upsilon), np.cos(p.Upsilon)
    u = np.zeros((4, 4), dtype=np.complex128)
    u[0, 2] = _e(p.chi) * so
    u[0, 3] = _e(p.beta) * co
    u[1, 0] = -_e(p.alpha + p.rho - p.eta) * su
    u[1, 1] = _e(p.rho) * cu
    u[2, 2] = _e(p.delta) * co
    u[2, 3] = -_e(p.beta + p.delta - p.chi) * so
    u[3, 0] = _e(p.alpha) * cu
    u[3, 1] = _e(p.eta) * su
    return u


def not2_restricted_unitary(p):
    u = np.zeros((4, 4), dtype=np.complex128)
    u[0, 3] = _e(p.beta)
    u[1, 1] = _e(p.rho)
    u[2, 2] = _e(p.delta)
    u[3, 0] = _e(p.alpha)
    return u


def v_block(p):
    """Block acting on B,C when A is up: a 4-cycle 1 -> 2 -> 4 -> 3 -> 1."""
    v = np.zeros((4, 4), dtype=np.complex128)
    v[0, 2] = _e(p.delta)
    v[1, 0] = _e(p.alpha)
    v[2, 3] = _e(p.beta)
    v[3, 1] = _e(p.gamma)
    return v


def w_block(p):
    """Block acting on B,C when A is down: a 4-cycle 1 -> 3 -> 4 -> 2 -> 1."""
    w = np.zeros((4, 4), dtype=np.complex128)
    w[0, 1] = _e(p.rho)
    w[1, 3] = _e(p.omega_angle)
    w[2, 0] = _e(p.xi)
    w[3, 2] = _e(p.eta)
    return w


def xor_unitary(p):
    """Block-diagonal XOR evolution, diagonal in the states of spin A."""
    u = np.zeros((8, 8), dtype=np.complex128)
    u[:4, :4] = v_block(p)
    u[4:, 4:] = w_block(p)
    return u
