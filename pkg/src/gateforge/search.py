"""Derivative-free search for coupling constants that realize a gate.

An ansatz fixes which Pauli strings may appear in the Hamiltonian; the search
tunes their real coefficients so that ``exp(-i H dt / hbar)`` satisfies a
:class:`~gateforge.gate_families.GateSpec`.  A basis term may tie several
strings to one coefficient by joining them with ``+`` (``"XXI+YYI"``), which
is how isotropic XY and Heisenberg couplings are expressed.
"""
import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy.optimize import minimize

from . import kernels
from .evolution import RowGeometry
from .linalg import DimensionError
from .pauli import PauliPolynomial, site_string, string_matrix, validate_string, weight
from .synthesis import NOT2_STRINGS, XOR_STRINGS

OPTIMIZERS = ("nelder-mead", "random")


def _split(term):
    return tuple(validate_string(s.strip()) for s in term.split("+"))


@dataclass(frozen=True)
class CouplingAnsatz:
    """Allowed interaction terms and per-term coefficient bounds.

    ``bounds`` defaults to ``[-2 pi hbar / dt, 2 pi hbar / dt]`` for every term
    when left as ``None``; it is resolved by :meth:`resolved_bounds`.
    """

    n_qubits: int
    basis_terms: tuple
    bounds: tuple = None
    two_spin_only: bool = False
    name: str = "custom"

    def __post_init__(self):
        terms = tuple(str(t) for t in self.basis_terms)
        object.__setattr__(self, "basis_terms", terms)
        for t in terms:
            for s in _split(t):
                if len(s) != self.n_qubits:
                    raise DimensionError(f"string {s!r} does not have {self.n_qubits} letters")
                if self.two_spin_only and weight(s) > 2:
                    raise ValueError(f"string {s!r} has weight {weight(s)} > 2")
        if self.bounds is not None:
            bounds = tuple((float(lo), float(hi)) for lo, hi in self.bounds)
            if len(bounds) != len(terms):
                raise DimensionError("one (low, high) bound per basis term is required")
            if any(not lo < hi for lo, hi in bounds):
                raise ValueError("every bound needs low < high")
            object.__setattr__(self, "bounds", bounds)

    def __len__(self):
        return len(self.basis_terms)

    def resolved_bounds(self, delta_t=1.0, hbar=1.0):
        if self.bounds is not None:
            return np.array(self.bounds)
        limit = 2 * np.pi * hbar / delta_t
        return np.tile([-limit, limit], (len(self), 1))

    def matrices(self):
        """Stack of the ``len(self)`` basis-term matrices."""
        d = 2**self.n_qubits
        out = np.zeros((len(self), d, d), dtype=np.complex128)
        for k, t in enumerate(self.basis_terms):
            for s in _split(t):
                out[k] += string_matrix(s)
        return out

    def polynomial(self, coeffs):
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape != (len(self),):
            raise DimensionError(f"{coeffs.size} coefficients for {len(self)} basis terms")
        pairs = [(s, c) for t, c in zip(self.basis_terms, coeffs) for s in _split(t)]
        return PauliPolynomial.from_pairs(self.n_qubits, pairs)

    def to_dict(self):
        return {"name": self.name, "n_qubits": self.n_qubits, "basis_terms": list(self.basis_terms),
                "bounds": None if self.bounds is None else [list(b) for b in self.bounds],
                "two_spin_only": self.two_spin_only}

    @classmethod
    def from_dict(cls, d):
        extra = set(d) - {"name", "n_qubits", "basis_terms", "bounds", "two_spin_only"}
        if extra:
            raise ValueError(f"unexpected ansatz fields: {sorted(extra)}")
        return cls(int(d["n_qubits"]), tuple(d["basis_terms"]), d.get("bounds"),
                   bool(d.get("two_spin_only", False)), d.get("name", "custom"))


def _pairs(n, chain):
    return [(i, i + 1) for i in range(n - 1)] if chain else list(combinations(range(n), 2))


def _with_fields(terms, n, fields):
    if fields:
        terms += [site_string(n, {i: ch}) for i in range(n) for ch in "XYZ"]
    return tuple(terms)


def ising_ansatz(n, fields=False, chain=False):
    """``sum J_ij Z_i Z_j`` over all pairs (or nearest neighbours with ``chain``)."""
    terms = [site_string(n, {i: "Z", j: "Z"}) for i, j in _pairs(n, chain)]
    return CouplingAnsatz(n, _with_fields(terms, n, fields), two_spin_only=True, name="ising")


def xy_ansatz(n, fields=False, chain=False):
    """Planar coupling ``J_ij (X_i X_j + Y_i Y_j)``."""
    terms = [site_string(n, {i: "X", j: "X"}) + "+" + site_string(n, {i: "Y", j: "Y"})
             for i, j in _pairs(n, chain)]
    return CouplingAnsatz(n, _with_fields(terms, n, fields), two_spin_only=True, name="xy")


def heisenberg_ansatz(n, fields=False, chain=False):
    """Isotropic coupling ``J_ij (X_i X_j + Y_i Y_j + Z_i Z_j)``."""
    terms = ["+".join(site_string(n, {i: p, j: p}) for p in "XYZ") for i, j in _pairs(n, chain)]
    return CouplingAnsatz(n, _with_fields(terms, n, fields), two_spin_only=True, name="heisenberg")


def zz_ansatz():
    """Two-spin ``ZZ`` alone; diagonal, so it can never flip a spin."""
    return CouplingAnsatz(2, ("ZZ",), two_spin_only=True, name="zz")


def tensor_xor_ansatz():
    """The twelve anisotropic two-spin strings spanned by the XOR solutions."""
    return CouplingAnsatz(3, XOR_STRINGS, two_spin_only=True, name="tensor-xor")


def tensor_not2_ansatz():
    """Ising term plus the four transverse strings of the two-spin NOT family."""
    return CouplingAnsatz(2, NOT2_STRINGS, two_spin_only=True, name="tensor-not2")


ANSATZ_PRESETS = {
    "ising": ising_ansatz,
    "xy": xy_ansatz,
    "heisenberg": heisenberg_ansatz,
    "zz": lambda n=2, fields=False, chain=False: zz_ansatz(),
    "tensor-xor": lambda n=3, fields=False, chain=False: tensor_xor_ansatz(),
    "tensor-not2": lambda n=2, fields=False, chain=False: tensor_not2_ansatz(),
}


@dataclass(frozen=True)
class SearchConfig:
    """Restart count, per-restart evaluation budget, seed and stopping target."""

    restarts: int = 20
    max_evaluations: int = 2000
    seed: int = 0
    target_leakage: float = 1e-7
    optimizer: str = "nelder-mead"
    workers: int = 1

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be at least 1")
        if self.max_evaluations < 1:
            raise ValueError("max_evaluations must be at least 1")
        if self.optimizer not in OPTIMIZERS:
            raise ValueError(f"optimizer must be one of {OPTIMIZERS}")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        if not self.target_leakage >= 0:
            raise ValueError("target_leakage must be non-negative")

    def to_dict(self):
        return {"restarts": self.restarts, "max_evaluations": self.max_evaluations,
                "seed": self.seed, "target_leakage": self.target_leakage,
                "optimizer": self.optimizer, "workers": self.workers}

    @classmethod
    def from_dict(cls, d):
        extra = set(d) - set(cls().to_dict())
        if extra:
            raise ValueError(f"unexpected config fields: {sorted(extra)}")
        return cls(**d)


@dataclass(frozen=True)
class SearchResult:
    """Best coefficients found and the per-restart trace.

    ``history`` holds ``(restart, evaluation, best_leakage)`` records, one per
    improvement of that restart's best, so each restart's column is
    non-increasing.
    """

    best_coefficients: tuple
    best_leakage: float
    evaluations_used: int
    history: tuple = field(default=())
    target_met: bool = False
    restart_best: tuple = field(default=())

    def to_dict(self):
        return {"best_coefficients": list(self.best_coefficients),
                "best_leakage": self.best_leakage,
                "evaluations_used": self.evaluations_used,
                "target_met": self.target_met,
                "restart_best": list(self.restart_best),
                "history": [list(h) for h in self.history]}

    def history_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["restart", "evaluation", "best_leakage"])
        for r, e, v in self.history:
            writer.writerow([r, e, repr(float(v))])
        return buf.getvalue()


class Evaluator:
    """Leakage of ``exp(-i H(c) dt / hbar)`` for an ansatz and spec."""

    def __init__(self, ansatz, spec, delta_t=1.0, hbar=1.0):
        if ansatz.n_qubits != spec.n_qubits:
            raise DimensionError(f"{ansatz.n_qubits}-qubit ansatz against {spec.n_qubits}-qubit spec")
        self.ansatz = ansatz
        self.mats = ansatz.matrices()
        self.geometry = RowGeometry(spec)
        self.scale = delta_t / hbar

    def unitary(self, coeffs):
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape != (len(self.ansatz),):
            raise DimensionError(f"{coeffs.size} coefficients for {len(self.ansatz)} basis terms")
        h = np.tensordot(coeffs, self.mats, 1)
        return kernels.expm_herm(h, self.scale)

    def worst(self, coeffs):
        return max(self.geometry.leakages(self.unitary(coeffs)))

    def both(self, coeffs):
        u = self.unitary(coeffs)
        return max(self.geometry.leakages(u)), self.geometry.mean_leakage(u)


def objective(coeffs, ansatz, spec, delta_t=1.0, hbar=1.0):
    """Worst-row leakage of the gate generated by ``sum c_i term_i``."""
    return Evaluator(ansatz, spec, delta_t, hbar).worst(coeffs)


class _TargetReached(Exception):
    pass


class _Restart:
    """State of one restart: evaluation count, incumbent and trace."""

    def __init__(self, evaluator, bounds, budget, target, index):
        self.evaluator = evaluator
        self.bounds = bounds
        self.budget = budget
        self.target = target
        self.index = index
        self.used = 0
        self.best = np.inf
        self.best_x = None
        self.trace = []

    def __call__(self, x):
        if self.used >= self.budget:
            raise _TargetReached
        x = np.clip(x, self.bounds[:, 0], self.bounds[:, 1])
        worst, mean = self.evaluator.both(x)
        self.used += 1
        if worst < self.best:
            self.best, self.best_x = worst, x.copy()
            self.trace.append((self.index, self.used, worst))
        if worst <= self.target:
            raise _TargetReached
        return mean


def _nelder_mead(state, rng):
    lo, hi = state.bounds[:, 0], state.bounds[:, 1]
    n = len(lo)
    x = rng.uniform(lo, hi)
    scale = 1.0
    try:
        while state.used < state.budget:
            simplex = np.vstack([x, x + scale * np.eye(n)])
            res = minimize(state, x, method="Nelder-Mead", bounds=list(zip(lo, hi)),
                           options={"maxfev": min(600, state.budget - state.used),
                                    "initial_simplex": simplex, "xatol": 1e-12,
                                    "fatol": 1e-16, "adaptive": True})
            x = np.clip(res.x, lo, hi)
            # restart the simplex around the incumbent, shrinking as it improves
            scale = max(0.05, min(1.0, 10 * np.sqrt(max(res.fun, 0.0))))
    except _TargetReached:
        pass


def _random(state, rng):
    lo, hi = state.bounds[:, 0], state.bounds[:, 1]
    try:
        while state.used < state.budget:
            state(rng.uniform(lo, hi))
    except _TargetReached:
        pass


def _run_restart(evaluator, bounds, config, index, seed_seq):
    state = _Restart(evaluator, bounds, config.max_evaluations, config.target_leakage, index)
    rng = np.random.default_rng(seed_seq)
    (_nelder_mead if config.optimizer == "nelder-mead" else _random)(state, rng)
    return state


def run_search(ansatz, spec, config=None, delta_t=1.0, hbar=1.0):
    """Multi-start search; stops after the first restart that reaches the target.

    Restarts draw from independent children of ``SeedSequence(config.seed)``,
    and results are merged in restart order, so the outcome does not depend on
    ``config.workers``.
    """
    config = config or SearchConfig()
    if len(ansatz) == 0:
        raise ValueError("the ansatz has no basis terms")
    evaluator = Evaluator(ansatz, spec, delta_t, hbar)
    bounds = ansatz.resolved_bounds(delta_t, hbar)
    seeds = np.random.SeedSequence(config.seed).spawn(config.restarts)

    states = []
    if config.workers == 1:
        for i, s in enumerate(seeds):
            states.append(_run_restart(evaluator, bounds, config, i, s))
            if states[-1].best <= config.target_leakage:
                break
    else:
        with ThreadPoolExecutor(config.workers) as pool:
            states = list(pool.map(lambda a: _run_restart(evaluator, bounds, config, *a),
                                   enumerate(seeds)))
        hit = next((k for k, s in enumerate(states) if s.best <= config.target_leakage), None)
        if hit is not None:
            states = states[:hit + 1]

    winner = min(states, key=lambda s: s.best)
    return SearchResult(
        best_coefficients=tuple(float(c) for c in winner.best_x),
        best_leakage=float(winner.best),
        evaluations_used=sum(s.used for s in states),
        history=tuple(rec for s in states for rec in s.trace),
        target_met=bool(winner.best <= config.target_leakage),
        restart_best=tuple(float(s.best) for s in states),
    )
