"""Dense complex matrix routines for small gate dimensions (2 to 16).

Matrices are plain ``numpy`` arrays of ``complex128``.  Spectral work goes
through the Schur kernel in :mod:`gateforge.kernels`; for the normal matrices
handled here (unitary or Hermitian) the Schur vectors are eigenvectors.
"""
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from . import kernels

UNITARY_TOL = 1e-10
HERMITIAN_TOL = 1e-10
CLUSTER_TOL = 1e-8
VERIFY_TOL = 1e-9
MAX_DIM = 16


class DimensionError(ValueError):
    """Input has the wrong shape for the operation."""


class DomainError(ValueError):
    """Input lies outside the operation's domain (not unitary, not Hermitian, ...)."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class UnitarityCheck(NamedTuple):
    ok: bool
    residual: float


@dataclass(frozen=True)
class Spectrum:
    """Eigen-decomposition of a unitary matrix, grouped into phase clusters.

    ``eigenvalues[k]`` belongs to column ``k`` of ``diagonalizer``.  Columns
    are sorted by phase in ``[-pi, pi)`` so each cluster occupies a contiguous
    run; ``clusters[c]`` lists the column indices of cluster ``c``.
    """

    eigenvalues: np.ndarray
    diagonalizer: np.ndarray
    phases: np.ndarray
    clusters: tuple

    @property
    def cluster_phases(self):
        return np.array([self.phases[list(c)].mean() for c in self.clusters])


def as_matrix(m):
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    if not 1 <= a.shape[0] <= MAX_DIM:
        raise DimensionError(f"dimension {a.shape[0]} outside 1..{MAX_DIM}")
    if not np.all(np.isfinite(a)):
        raise DomainError("matrix has non-finite entries")
    return a


def check_unitary(m, tol=UNITARY_TOL):
    """Return ``(ok, residual)`` with ``residual = ||M^H M - I||_F``."""
    a = as_matrix(m)
    residual = float(kernels.frobenius(a.conj().T @ a - np.eye(a.shape[0])))
    return UnitarityCheck(residual <= tol, residual)


def hermiticity_residual(m):
    a = as_matrix(m)
    return float(kernels.frobenius(a - a.conj().T))


def _require_hermitian(a, tol):
    residual = hermiticity_residual(a)
    if residual > tol * max(1.0, float(kernels.frobenius(a))):
        raise DomainError(f"matrix is not Hermitian (||H - H^H||_F = {residual:.3e})", residual)


def principal_phase(z, tol=CLUSTER_TOL):
    """Argument of ``z`` in ``[-pi, pi)``; values within ``tol`` of ``+pi`` map to ``-pi``."""
    a = np.angle(z)
    return np.where(a > np.pi - tol, a - 2 * np.pi, a)


def eig_unitary(m, tol=UNITARY_TOL, cluster_tol=CLUSTER_TOL):
    """Eigenvalues and unitary diagonalizer of a unitary matrix.

    Eigenvalues whose phases agree within ``cluster_tol`` form one cluster;
    the diagonalizer columns inside a cluster are re-orthonormalized in index
    order.
    """
    a = as_matrix(m)
    ok, residual = check_unitary(a, tol)
    if not ok:
        raise DomainError(f"matrix is not unitary (||U^H U - I||_F = {residual:.3e})", residual)
    t, q, converged = kernels.schur(a)
    if not converged:
        raise np.linalg.LinAlgError("Schur iteration did not converge")
    eigenvalues = np.diag(t).copy()
    phases = principal_phase(eigenvalues, cluster_tol)
    order = np.argsort(phases, kind="stable")
    eigenvalues, phases, q = eigenvalues[order], phases[order], q[:, order]

    clusters = []
    start = 0
    for k in range(1, len(phases) + 1):
        if k == len(phases) or phases[k] - phases[k - 1] > cluster_tol:
            clusters.append(tuple(range(start, k)))
            start = k
    for members in clusters:
        if len(members) > 1:
            _gram_schmidt(q, members)
    return Spectrum(eigenvalues, q, phases, tuple(clusters))


def _gram_schmidt(q, columns):
    # modified Gram-Schmidt, in place, in index order
    for i, k in enumerate(columns):
        v = q[:, k]
        for j in columns[:i]:
            v = v - (q[:, j].conj() @ v) * q[:, j]
        q[:, k] = v / np.linalg.norm(v)


def expm_hermitian(h, scale=1.0, tol=HERMITIAN_TOL):
    """``exp(-1j * scale * H)`` via the spectral decomposition of ``H``."""
    a = as_matrix(h)
    _require_hermitian(a, tol)
    return kernels.expm_herm(a, float(scale))


def expm_taylor(a, tol=1e-17):
    """``exp(a)`` by scaling and squaring of a truncated Taylor series.

    Uses only matrix products, so it serves as an oracle independent of any
    eigen-solver.
    """
    a = as_matrix(a)
    norm = np.linalg.norm(a, 1)
    squarings = max(0, int(np.ceil(np.log2(norm / 0.25)))) if norm > 0.25 else 0
    x = a / 2.0**squarings
    result = np.eye(a.shape[0], dtype=np.complex128)
    term = result.copy()
    for k in range(1, 40):
        term = term @ x / k
        result = result + term
        if np.linalg.norm(term, 1) <= tol * np.linalg.norm(result, 1):
            break
    for _ in range(squarings):
        result = result @ result
    return result


def logm_unitary(u, branch: Sequence[int], delta_t=1.0, hbar=1.0, tol=UNITARY_TOL,
                 cluster_tol=CLUSTER_TOL):
    """Hermitian ``H`` with ``exp(-i H delta_t / hbar) = U``.

    Cluster ``c`` (phase ``a_c`` in ``[-pi, pi)``) gets the energy
    ``(-hbar * a_c + 2 pi hbar * branch[c]) / delta_t``.
    """
    spectrum = eig_unitary(u, tol, cluster_tol)
    energies = cluster_energies(spectrum, branch, delta_t, hbar)
    return hamiltonian_from_spectrum(spectrum, energies)


def cluster_energies(spectrum, branch, delta_t=1.0, hbar=1.0):
    if delta_t <= 0 or hbar <= 0:
        raise ValueError("delta_t and hbar must be positive")
    branch = [int(n) for n in branch]
    if len(branch) != len(spectrum.clusters):
        raise DimensionError(
            f"branch has {len(branch)} integers but the spectrum has "
            f"{len(spectrum.clusters)} eigenvalue clusters")
    return (-hbar * spectrum.cluster_phases + 2 * np.pi * hbar * np.array(branch)) / delta_t


def hamiltonian_from_spectrum(spectrum, energies):
    q = spectrum.diagonalizer
    per_column = np.empty(q.shape[1])
    for members, e in zip(spectrum.clusters, energies):
        per_column[list(members)] = e
    h = (q * per_column) @ q.conj().T
    return 0.5 * (h + h.conj().T)


def spread(values):
    """Max minus min of a set of eigenvalues (reported, never optimized)."""
    values = np.asarray(values, dtype=float)
    return float(values.max() - values.min()) if values.size else 0.0
