"""Time evolution, protocol functions and gate verification."""
from dataclasses import dataclass, field
from itertools import combinations
from typing import Mapping, NamedTuple

import numpy as np
from scipy import integrate

from . import kernels
from .linalg import VERIFY_TOL, DimensionError, as_matrix, expm_hermitian
from .pauli import PauliPolynomial, commutation_check

PROTOCOL_KINDS = ("constant", "raised_cosine", "table", "expression")
_PROTOCOL_PARAMS = {
    "constant": set(),
    "raised_cosine": {"cycles"},
    "table": {"values"},
    "expression": {"constant", "cosines"},
}
_COSINE_FIELDS = {"amplitude", "cycles", "phase"}


def _as_matrix(h):
    return h.to_matrix() if isinstance(h, PauliPolynomial) else as_matrix(h)


@dataclass(frozen=True)
class Protocol:
    """Scalar modulation ``f(t)`` of a fixed Hamiltonian on ``[t0, t0 + delta_t]``.

    ``f`` is zero outside its support.  Inside, with ``tau = t - t0``:

    * ``constant``: ``amplitude``
    * ``raised_cosine``: ``amplitude * (1 - cos(2 pi cycles tau / delta_t))``
    * ``table``: ``amplitude`` times linear interpolation of ``values`` on an
      even grid spanning the support, endpoints included
    * ``expression`` (alias ``custom-expression``):
      ``amplitude * (constant + sum a cos(2 pi k tau / delta_t + phase))``
      over ``cosines`` entries ``{"amplitude": a, "cycles": k, "phase": phase}``
    """

    kind: str
    amplitude: float = 1.0
    t0: float = 0.0
    delta_t: float = 1.0
    params: Mapping = field(default_factory=dict)

    def __post_init__(self):
        if self.kind == "custom-expression":
            object.__setattr__(self, "kind", "expression")
        if self.kind not in PROTOCOL_KINDS:
            raise ValueError(f"unknown protocol kind {self.kind!r}")
        if not self.delta_t > 0:
            raise ValueError("delta_t must be positive")
        extra = set(self.params) - _PROTOCOL_PARAMS[self.kind]
        if extra:
            raise ValueError(f"unexpected {self.kind} parameters: {sorted(extra)}")
        if self.kind == "table" and len(self.params.get("values", ())) < 2:
            raise ValueError("a table protocol needs at least two values")
        if self.kind == "expression":
            for term in self.params.get("cosines", ()):
                if set(term) - _COSINE_FIELDS:
                    raise ValueError(f"unexpected cosine fields: {sorted(set(term) - _COSINE_FIELDS)}")

    @classmethod
    def constant(cls, delta_t=1.0, t0=0.0, amplitude=1.0):
        return cls("constant", amplitude, t0, delta_t)

    @classmethod
    def raised_cosine(cls, delta_t=1.0, t0=0.0, cycles=1.0, normalize=True):
        """Raised cosine; with ``normalize`` the amplitude makes the integral ``delta_t``."""
        x = 2 * np.pi * cycles
        amplitude = 1.0 / (1.0 - np.sin(x) / x) if normalize else 1.0
        return cls("raised_cosine", amplitude, t0, delta_t, {"cycles": float(cycles)})

    @classmethod
    def table(cls, values, delta_t=1.0, t0=0.0, amplitude=1.0):
        return cls("table", amplitude, t0, delta_t, {"values": [float(v) for v in values]})

    @classmethod
    def expression(cls, constant=0.0, cosines=(), delta_t=1.0, t0=0.0, amplitude=1.0):
        terms = [{"amplitude": float(c.get("amplitude", 1.0)), "cycles": float(c.get("cycles", 1.0)),
                  "phase": float(c.get("phase", 0.0))} for c in cosines]
        return cls("expression", amplitude, t0, delta_t, {"constant": float(constant), "cosines": terms})

    def normalized(self):
        """Copy rescaled so the integral over the support equals ``delta_t``."""
        total = protocol_integral(self)
        if total == 0:
            raise ValueError("a protocol integrating to zero cannot be normalized")
        return Protocol(self.kind, self.amplitude * self.delta_t / total, self.t0, self.delta_t,
                        self.params)

    def breakpoints(self):
        if self.kind == "table":
            return self.t0 + np.linspace(0, self.delta_t, len(self.params["values"]))[1:-1]
        return np.empty(0)

    def _shape(self, tau):
        omega = 2 * np.pi / self.delta_t
        if self.kind == "constant":
            return np.ones_like(tau)
        if self.kind == "raised_cosine":
            return 1.0 - np.cos(omega * self.params.get("cycles", 1.0) * tau)
        if self.kind == "table":
            values = np.asarray(self.params["values"], dtype=float)
            return np.interp(tau, np.linspace(0, self.delta_t, len(values)), values)
        out = np.full_like(tau, self.params.get("constant", 0.0))
        for c in self.params.get("cosines", ()):
            out += c.get("amplitude", 1.0) * np.cos(omega * c.get("cycles", 1.0) * tau
                                                   + c.get("phase", 0.0))
        return out

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        tau = t - self.t0
        inside = (tau >= 0) & (tau <= self.delta_t)
        return np.where(inside, self.amplitude * self._shape(np.clip(tau, 0, self.delta_t)), 0.0)

    def to_dict(self):
        return {"kind": self.kind, "amplitude": self.amplitude, "t0": self.t0,
                "delta_t": self.delta_t, "params": dict(self.params)}

    @classmethod
    def from_dict(cls, d):
        extra = set(d) - {"kind", "amplitude", "t0", "delta_t", "params"}
        if extra:
            raise ValueError(f"unexpected protocol fields: {sorted(extra)}")
        if "kind" not in d:
            raise ValueError("protocol needs a 'kind'")
        return cls(d["kind"], float(d.get("amplitude", 1.0)), float(d.get("t0", 0.0)),
                   float(d.get("delta_t", 1.0)), dict(d.get("params", {})))


def protocol_integral(f):
    """Adaptive quadrature of ``f`` over its support."""
    a, b = f.t0, f.t0 + f.delta_t
    points = f.breakpoints()
    value, _ = integrate.quad(lambda t: float(f(t)), a, b, epsabs=1e-12 * f.delta_t, epsrel=0.0,
                              limit=500, points=points if points.size else None)
    return value


class ProtocolCheck(NamedTuple):
    valid: bool
    integral: float
    changes_sign: bool


def check_protocol(f, tol=1e-9):
    """Whether ``f`` integrates to ``delta_t`` over its support; also flags sign changes."""
    total = protocol_integral(f)
    samples = f(f.t0 + np.linspace(0, f.delta_t, 4097))
    changes_sign = bool(samples.min() < -1e-12 and samples.max() > 1e-12)
    return ProtocolCheck(abs(total - f.delta_t) <= tol * f.delta_t, total, changes_sign)


def evolve_const(h, delta_t=1.0, hbar=1.0):
    """``exp(-i H delta_t / hbar)`` for a time-independent Hamiltonian."""
    return expm_hermitian(_as_matrix(h), delta_t / hbar)


def evolve_schedule(pairs, steps=256, hbar=1.0):
    """Time-ordered evolution under ``H(t) = sum_j f_j(t) H_j``.

    All protocols must share one support.  Midpoint slicing: ``steps`` factors
    ``exp(-i H(t_k) dt / hbar)`` at ``t_k = t0 + (k + 1/2) dt``.
    """
    if steps < 1:
        raise ValueError("steps must be at least 1")
    if not pairs:
        raise ValueError("nothing to evolve")
    protocols = [f for _, f in pairs]
    t0, width = protocols[0].t0, protocols[0].delta_t
    if any(f.t0 != t0 or f.delta_t != width for f in protocols):
        raise ValueError("protocols must share the same support")
    mats = [_as_matrix(h) for h, _ in pairs]
    if len({m.shape for m in mats}) != 1:
        raise DimensionError("terms act on different dimensions")
    terms = np.array(mats)
    dt = width / steps
    midpoints = t0 + (np.arange(steps) + 0.5) * dt
    weights = np.column_stack([f(midpoints) for f in protocols])
    return kernels.time_ordered_product(terms, np.ascontiguousarray(weights), dt / hbar)


def evolve_protocol(h, f, steps=256, hbar=1.0):
    """Evolution under ``f(t) H`` over the protocol's support."""
    return evolve_schedule([(h, f)], steps, hbar)


class SplitCheck(NamedTuple):
    commute: bool
    norms: dict


def split_commutes(terms, tol=1e-10):
    """Pairwise commutator norms of a Hamiltonian split; true if all are below ``tol``."""
    norms = {(i, j): commutation_check(terms[i], terms[j]).commutator
             for i, j in combinations(range(len(terms)), 2)}
    return SplitCheck(all(v < tol for v in norms.values()), norms)


def resonance_terms(t, larmor=1.0, rabi=0.5, drive=None, hbar=1.0):
    """Paramagnetic-resonance NOT at time ``t``: static ``Z`` field and rotating transverse field.

    ``H(t) = (hbar larmor / 2) Z + (hbar rabi / 2)(cos(w t) X + sin(w t) Y)``
    with ``w = drive`` (defaults to resonance, ``w = larmor``).
    """
    w = larmor if drive is None else drive
    static = PauliPolynomial(1, {"Z": hbar * larmor / 2})
    transverse = PauliPolynomial(1, {"X": hbar * rabi / 2 * np.cos(w * t),
                                     "Y": hbar * rabi / 2 * np.sin(w * t)})
    return static, transverse


@dataclass(frozen=True)
class VerificationReport:
    passed: bool
    row_leakage: tuple
    worst_leakage: float
    tolerance: float

    def to_dict(self):
        return {"passed": self.passed, "row_leakage": list(self.row_leakage),
                "worst_leakage": self.worst_leakage, "tolerance": self.tolerance}


def _max_eig_psd(g):
    if g.shape[0] == 1:
        return float(g[0, 0].real)
    if g.shape[0] == 2:
        a, d = g[0, 0].real, g[1, 1].real
        return float(0.5 * (a + d) + np.sqrt(0.25 * (a - d) ** 2 + abs(g[0, 1]) ** 2))
    return float(np.linalg.eigvalsh(g)[-1])


class RowGeometry:
    """Index sets of a spec's rows, precomputed for repeated leakage evaluation."""

    def __init__(self, spec):
        self.spec = spec
        dim = spec.dim
        self.rows = [(np.array(ins), np.array([i for i in range(dim) if i not in set(outs)], dtype=int))
                     for ins, outs in spec.rows]
        self.n_inputs = sum(len(ins) for ins, _ in spec.rows)

    def leakages(self, u):
        """Worst-case squared amplitude outside the allowed outputs, per row."""
        out = []
        for ins, bad in self.rows:
            m = u[np.ix_(bad, ins)]
            out.append(_max_eig_psd(m.conj().T @ m))
        return out

    def mean_leakage(self, u):
        """Squared amplitude outside the allowed outputs, averaged over basis inputs."""
        total = 0.0
        for ins, bad in self.rows:
            total += float(np.sum(np.abs(u[np.ix_(bad, ins)]) ** 2))
        return total / self.n_inputs


def verify_gate(u, spec, tol=VERIFY_TOL):
    """Check a unitary against gate semantics.

    A row's leakage is the largest squared amplitude that any normalized state
    in its input subspace leaves outside the required output subspace, so
    output phases are never penalized.
    """
    a = as_matrix(u)
    if a.shape[0] != spec.dim:
        raise DimensionError(f"{a.shape[0]}-dimensional U against {spec.name} ({spec.dim})")
    rows = RowGeometry(spec).leakages(a)
    worst = max(rows) if rows else 0.0
    return VerificationReport(worst <= tol, tuple(rows), worst, tol)
