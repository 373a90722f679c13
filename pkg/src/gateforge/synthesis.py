"""From gate unitaries to Hamiltonians.

Two routes are provided and cross-checked in the tests: closed-form
constructors for the NOT, two-spin NOT and XOR families, and the generic
pipeline :func:`synthesize` (eigen-decompose, assign energies on a chosen
branch, rebuild, expand in Pauli strings).
"""
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import linalg
from .gate_families import XorParams
from .linalg import DomainError
from .pauli import PAULI, PauliPolynomial, decompose

TWO_PI = 2 * np.pi
XOR_MU = -3 * np.pi / 4

# The twelve two-spin strings of the XOR family, qubits ordered A, B, C.
XOR_STRINGS = (
    "ZIX", "ZIY", "ZXI", "ZYI",
    "IZX", "IZY", "IXZ", "IYZ",
    "IXX", "IXY", "IYX", "IYY",
)

NOT2_STRINGS = ("ZZ", "XX", "YY", "XY", "YX")


class ConstraintError(DomainError):
    """Angles do not satisfy the relations a construction depends on."""


@dataclass(frozen=True)
class EnergyLevels:
    """Energies per eigenvalue cluster, in cluster (phase) order."""

    energies: np.ndarray
    branch: tuple
    phases: np.ndarray
    multiplicities: tuple
    delta_t: float = 1.0
    hbar: float = 1.0

    def residues(self):
        """``E dt / hbar + phase`` reduced to ``(-pi, pi]``; zero when consistent."""
        r = self.energies * self.delta_t / self.hbar + self.phases
        return np.angle(np.exp(1j * r))


def energy_levels(u, branch, delta_t=1.0, hbar=1.0):
    spectrum = linalg.eig_unitary(u)
    energies = linalg.cluster_energies(spectrum, branch, delta_t, hbar)
    return EnergyLevels(energies, tuple(int(n) for n in branch), spectrum.cluster_phases,
                        tuple(len(c) for c in spectrum.clusters), delta_t, hbar)


def branch_from_energies(u, energies, delta_t=1.0, hbar=1.0, tol=1e-6):
    """Branch integers that make the pipeline reproduce a known spectrum.

    ``energies`` is the full spectrum (one entry per dimension, any order).
    Each cluster consumes as many equal entries as its multiplicity; a
    degenerate eigenvalue whose energies differ by multiples of ``2 pi hbar / dt``
    cannot be expressed with one integer per cluster and raises ``ValueError``.
    """
    spectrum = linalg.eig_unitary(u)
    remaining = [float(e) for e in energies]
    branch = []
    for members, phase in zip(spectrum.clusters, spectrum.cluster_phases):
        turns = [(e * delta_t / hbar + phase) / TWO_PI for e in remaining]
        by_integer = {}
        for i, t in enumerate(turns):
            if abs(t - round(t)) < tol:
                by_integer.setdefault(int(round(t)), []).append(i)
        # a cluster shares one integer, so all its energies must coincide
        fits = sorted(n for n, idx in by_integer.items() if len(idx) >= len(members))
        if not fits:
            raise ValueError("energies are not compatible with the eigenvalue clusters of U")
        branch.append(fits[0])
        for i in sorted(by_integer[fits[0]][:len(members)], reverse=True):
            remaining.pop(i)
    return tuple(branch)


def synthesize(u, branch, delta_t=1.0, hbar=1.0, check=1e-9):
    """Hamiltonian of ``U`` on the given branch, constant term included."""
    spectrum = linalg.eig_unitary(u)
    energies = linalg.cluster_energies(spectrum, branch, delta_t, hbar)
    h = linalg.hamiltonian_from_spectrum(spectrum, energies)
    if check is not None:
        err = np.abs(linalg.expm_hermitian(h, delta_t / hbar) - u).max()
        if err > check:
            raise np.linalg.LinAlgError(f"re-exponentiation misses U by {err:.3e}")
    return decompose(h)


# --- single-qubit NOT -------------------------------------------------------

def not1_energies(p, branch=(0, 0), delta_t=1.0, hbar=1.0):
    n1, n2 = branch
    base = -hbar * (p.alpha + p.beta) / (2 * delta_t)
    return np.array([base + TWO_PI * hbar * n1 / delta_t,
                     base + TWO_PI * hbar * (n2 + 0.5) / delta_t])


def hamiltonian_not1(N, gamma, delta_t=1.0, hbar=1.0):
    """Transverse field ``(pi hbar / dt)(N - 1/2)(cos g X + sin g Y)``."""
    k = np.pi * hbar / delta_t * (int(N) - 0.5)
    return PauliPolynomial(1, {"X": k * np.cos(gamma), "Y": k * np.sin(gamma)})


def hamiltonian_not1_general(p, branch=(0, 0), delta_t=1.0, hbar=1.0):
    """NOT Hamiltonian for phases ``(alpha, beta)`` including the constant term."""
    n1, n2 = (int(n) for n in branch)
    constant = (-hbar * (p.alpha + p.beta) / (2 * delta_t)
                + np.pi * hbar / delta_t * (n1 + n2 + 0.5))
    k = np.pi * hbar / delta_t * (n1 - n2 - 0.5)
    g = (p.alpha - p.beta) / 2
    return PauliPolynomial(1, {"I": constant, "X": k * np.cos(g), "Y": k * np.sin(g)})


# --- two-spin NOT -----------------------------------------------------------

def not2_energies(p, branch=(0, 0, 0, 0), delta_t=1.0, hbar=1.0):
    n1, n2, n3, n4 = branch
    e12 = not1_energies(p, (n1, n2), delta_t, hbar)
    e3 = (-hbar * p.rho + TWO_PI * hbar * n3) / delta_t
    e4 = (-hbar * p.delta + TWO_PI * hbar * n4) / delta_t
    return np.array([e12[0], e12[1], e3, e4])


def hamiltonian_not2(E_ising, N, gamma, delta_t=1.0, hbar=1.0):
    """``-E ZZ + (pi hbar / 2dt)(N - 1/2)[cos g (XX - YY) + sin g (XY + YX)]``."""
    k = np.pi * hbar / (2 * delta_t) * (int(N) - 0.5)
    c, s = k * np.cos(gamma), k * np.sin(gamma)
    return PauliPolynomial(2, {"ZZ": -E_ising, "XX": c, "YY": -c, "XY": s, "YX": s})


def hamiltonian_not2_general(p, branch=(0, 0, 0, 0), delta_t=1.0, hbar=1.0):
    """Two-spin NOT Hamiltonian for the restricted four-phase family.

    Written in the level energies ``E1..E4``; the constant and the ``ZZ``
    coefficient use ``E1 + E2`` (the trace fixes the constant at the mean
    energy).  ``E3 != E4`` produces opposite fields on I and O.
    """
    e1, e2, e3, e4 = not2_energies(p, branch, delta_t, hbar)
    n = int(branch[0]) - int(branch[1])
    if abs((e1 - e2) - TWO_PI * hbar / delta_t * (n - 0.5)) > 1e-9 * max(1.0, abs(e1 - e2)):
        raise AssertionError("E1 - E2 inconsistent with the branch integers")
    g = (p.alpha - p.beta) / 2
    k = (e1 - e2) / 4
    return PauliPolynomial(2, {
        "II": (e1 + e2 + e3 + e4) / 4,
        "ZI": (e3 - e4) / 4,
        "IZ": -(e3 - e4) / 4,
        "ZZ": (e1 + e2 - e3 - e4) / 4,
        "XX": k * np.cos(g),
        "YY": -k * np.cos(g),
        "XY": k * np.sin(g),
        "YX": k * np.sin(g),
    })


# --- three-spin XOR ---------------------------------------------------------

@dataclass(frozen=True)
class XorAngleSolution:
    """Free angles ``alpha, beta, gamma`` and the five angles they fix."""

    alpha: float
    beta: float
    gamma: float
    delta: float
    rho: float
    omega_angle: float
    xi: float
    eta: float
    mu: float = XOR_MU
    nu: float = XOR_MU

    def to_params(self):
        return XorParams(self.alpha, self.beta, self.gamma, self.delta,
                         self.rho, self.omega_angle, self.xi, self.eta)


def solve_xor_constraints(alpha, beta, gamma):
    """Remaining XOR angles; angles are not reduced mod 2 pi."""
    s = alpha + beta + gamma
    return XorAngleSolution(
        alpha=alpha, beta=beta, gamma=gamma,
        delta=-3 * np.pi - s,
        rho=-np.pi + beta,
        omega_angle=-2 * np.pi - s,
        xi=-np.pi + gamma,
        eta=np.pi + alpha,
    )


def check_xor_solution(sol, tol=1e-12):
    expected = solve_xor_constraints(sol.alpha, sol.beta, sol.gamma)
    for name in ("delta", "rho", "omega_angle", "xi", "eta"):
        got, want = getattr(sol, name), getattr(expected, name)
        if abs(got - want) > tol * max(1.0, abs(want)):
            raise ConstraintError(f"{name} = {got!r} violates the XOR constraints (expected {want!r})")
    if abs(sol.mu - XOR_MU) > tol or abs(sol.nu - XOR_MU) > tol:
        raise ConstraintError("mu and nu must both equal -3 pi / 4")


@dataclass(frozen=True)
class FirstOrderForm:
    """``I_B (x) [[0, X], [X*, 0]]_C + [[0, Y], [Y*, 0]]_B (x) I_C``."""

    X: complex
    Y: complex

    def matrix(self):
        x, y = self.X, self.Y
        xc, yc = np.conj(x), np.conj(y)
        return np.array([[0, x, y, 0],
                         [xc, 0, 0, y],
                         [yc, 0, 0, x],
                         [0, yc, xc, 0]], dtype=np.complex128)

    @classmethod
    def from_matrix(cls, m, tol=1e-12):
        form = cls(complex(m[0, 1]), complex(m[0, 2]))
        err = np.abs(form.matrix() - m).max()
        if err > tol * max(1.0, np.abs(m).max()):
            raise ConstraintError(f"P - Q is not first order in the Pauli matrices (off by {err:.3e})")
        return form


def p_matrix(alpha, beta, gamma, delta):
    """Hermitian ``p`` with ``exp(i p) = V``, eigenvalues ``mu + k pi / 2``."""
    mu = (alpha + beta + gamma + delta) / 4
    e = lambda x: np.exp(1j * x)  # noqa: E731
    c = 4 / np.pi * mu + 3
    m = np.array([
        [c, -(1 + 1j) * e(mu - alpha), -(1 - 1j) * e(delta - mu), -e(2 * mu - alpha - gamma)],
        [-(1 - 1j) * e(alpha - mu), c, -e(2 * mu - beta - gamma), -(1 + 1j) * e(mu - gamma)],
        [-(1 + 1j) * e(mu - delta), -e(beta + gamma - 2 * mu), c, -(1 - 1j) * e(beta - mu)],
        [-e(alpha + gamma - 2 * mu), -(1 - 1j) * e(gamma - mu), -(1 + 1j) * e(mu - beta), c],
    ])
    return np.pi / 4 * m


def q_matrix(rho, omega_angle, xi, eta):
    """Hermitian ``q`` with ``exp(i q) = W``, eigenvalues ``nu + k pi / 2``."""
    r, w, x, h = rho, omega_angle, xi, eta
    nu = (r + w + x + h) / 4
    e = lambda a: np.exp(1j * a)  # noqa: E731
    c = 4 / np.pi * nu + 3
    m = np.array([
        [c, -(1 - 1j) * e(r - nu), -(1 + 1j) * e(nu - x), -e(r + w - 2 * nu)],
        [-(1 + 1j) * e(nu - r), c, -e(w + h - 2 * nu), -(1 - 1j) * e(w - nu)],
        [-(1 - 1j) * e(x - nu), -e(2 * nu - w - h), c, -(1 + 1j) * e(nu - h)],
        [-e(2 * nu - r - w), -(1 + 1j) * e(nu - w), -(1 - 1j) * e(h - nu), c],
    ])
    return np.pi / 4 * m


class PQ(NamedTuple):
    p: np.ndarray
    q: np.ndarray
    P_plus_Q: np.ndarray
    P_minus_Q: np.ndarray
    first_order: FirstOrderForm


def build_pq(sol, delta_t=1.0, hbar=1.0):
    """Reduced operators ``p, q`` and the B,C-space Hamiltonians ``P +/- Q``."""
    check_xor_solution(sol)
    p = p_matrix(sol.alpha, sol.beta, sol.gamma, sol.delta)
    q = q_matrix(sol.rho, sol.omega_angle, sol.xi, sol.eta)
    big_p = -hbar / delta_t * p
    big_q = -hbar / delta_t * q
    minus = big_p - big_q
    return PQ(p, q, big_p + big_q, minus, FirstOrderForm.from_matrix(minus))


def hamiltonian_xor(alpha, beta, gamma, delta_t=1.0, hbar=1.0):
    """Two-spin XOR Hamiltonian assembled as ``2H = P + Q + Z_A (P - Q)``."""
    pq = build_pq(solve_xor_constraints(alpha, beta, gamma), delta_t, hbar)
    h = 0.5 * (np.kron(PAULI["I"], pq.P_plus_Q) + np.kron(PAULI["Z"], pq.P_minus_Q))
    return decompose(h).without_constant()


def xor_closed_form(alpha, beta, gamma, delta_t=1.0, hbar=1.0):
    """The XOR Hamiltonian's twelve coefficients written out term by term."""
    r2 = np.sqrt(2)
    a, b, g = alpha, beta, gamma
    s = a + b + g
    sin, cos = np.sin, np.cos
    braces = {
        "ZIX": r2 * (sin(a) + sin(b)),
        "ZIY": -r2 * (cos(a) - cos(b)),
        "ZXI": r2 * (sin(g) + sin(s)),
        "ZYI": -r2 * (cos(g) + cos(s)),
        "IZX": r2 * (sin(a) - sin(b)),
        "IZY": -r2 * (cos(a) + cos(b)),
        "IXZ": -r2 * (sin(g) - sin(s)),
        "IYZ": r2 * (cos(g) - cos(s)),
        "IXX": -(sin(a + g) + sin(b + g)),
        "IXY": cos(a + g) - cos(b + g),
        "IYX": cos(a + g) + cos(b + g),
        "IYY": sin(a + g) - sin(b + g),
    }
    k = -np.pi * hbar / (8 * delta_t)
    return PauliPolynomial(3, {st: k * c for st, c in braces.items()})
