"""Versioned JSON reports with round-trip exact floats.

Every document carries ``"schema": "gateforge/1"`` and a ``kind``.  Floats are
written with 17 significant digits, which reproduces every IEEE double
exactly on re-parsing, and keys keep a fixed order so identical inputs give
byte-identical files.
"""
import json

import numpy as np

from .pauli import PauliPolynomial, locality_profile

SCHEMA = "gateforge/1"

_FIELDS = {
    "hamiltonian": {"schema", "kind", "family", "params", "n_qubits", "hbar", "delta_t", "terms",
                    "constant_term", "energies", "branch", "locality_profile"},
    "matrix": {"schema", "kind", "real", "imag"},
    "verification": {"schema", "kind", "spec", "passed", "row_leakage", "worst_leakage",
                     "tolerance"},
    "search_result": {"schema", "kind", "spec", "ansatz", "config", "delta_t", "hbar",
                      "best_coefficients", "best_leakage", "evaluations_used", "target_met",
                      "restart_best", "history", "hamiltonian"},
    "ansatz": {"schema", "kind", "name", "n_qubits", "basis_terms", "bounds", "two_spin_only"},
    "search_config": {"schema", "kind", "restarts", "max_evaluations", "seed", "target_leakage",
                      "optimizer", "workers"},
    "manifest": {"schema", "kind", "command", "argv", "config", "seed", "version", "backend",
                 "started", "wall_clock_seconds"},
}
_REQUIRED = {
    "hamiltonian": {"n_qubits", "terms"},
    "matrix": {"real", "imag"},
    "ansatz": {"n_qubits", "basis_terms"},
}


class ReportError(ValueError):
    """A document does not follow the report schema."""


def _format(x, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(x, (bool, np.bool_)) or x is None:
        return json.dumps(None if x is None else bool(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not np.isfinite(x):
            raise ReportError("non-finite number in report")
        text = format(x, ".17g")
        # keep floats recognizable as floats
        return text if any(ch in text for ch in ".en") else text + ".0"
    if isinstance(x, str):
        return json.dumps(x)
    if isinstance(x, dict):
        if not x:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_format(v, indent, level + 1)}" for k, v in x.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(x, (list, tuple, np.ndarray)):
        if len(x) == 0:
            return "[]"
        parts = [_format(v, indent, level + 1) for v in x]
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in x):
            return "[" + ", ".join(parts) + "]"
        return "[\n" + ",\n".join(pad + p for p in parts) + "\n" + end + "]"
    raise ReportError(f"cannot serialize {type(x).__name__}")


def dumps(doc, indent=2):
    """Serialize with 17-significant-digit floats and a trailing newline."""
    return _format(doc, indent, 0) + "\n"


def document(kind, **fields):
    doc = {"schema": SCHEMA, "kind": kind}
    doc.update(fields)
    return doc


def validate(doc, kind=None):
    """Check schema tag, kind, unknown and missing fields; return the kind."""
    if not isinstance(doc, dict):
        raise ReportError("report must be a JSON object")
    if doc.get("schema") != SCHEMA:
        raise ReportError(f"expected schema {SCHEMA!r}, got {doc.get('schema')!r}")
    got = doc.get("kind")
    if got not in _FIELDS:
        raise ReportError(f"unknown report kind {got!r}")
    if kind is not None and got not in ((kind,) if isinstance(kind, str) else kind):
        raise ReportError(f"expected a {kind} report, got {got!r}")
    unknown = set(doc) - _FIELDS[got]
    if unknown:
        raise ReportError(f"unknown fields in {got} report: {sorted(unknown)}")
    missing = _REQUIRED.get(got, set()) - set(doc)
    if missing:
        raise ReportError(f"missing fields in {got} report: {sorted(missing)}")
    return got


def loads(text, kind=None):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ReportError(f"invalid JSON: {exc}") from None
    validate(doc, kind)
    return doc


def _term_list(pairs):
    return [{"string": s, "coefficient": c} for s, c in pairs]


def hamiltonian_report(h, *, family=None, params=None, delta_t=1.0, hbar=1.0, branch=None):
    """Report for a polynomial: sorted non-identity terms, constant, full spectrum."""
    energies = np.linalg.eigvalsh(h.to_matrix())
    body = h.without_constant()
    return document(
        "hamiltonian",
        family=family,
        params=params,
        n_qubits=h.n_qubits,
        hbar=float(hbar),
        delta_t=float(delta_t),
        terms=_term_list(body.items()),
        constant_term=float(h.constant),
        energies=[float(e) for e in np.sort(energies)],
        branch=None if branch is None else [int(n) for n in branch],
        locality_profile={str(w): _term_list(ts) for w, ts in locality_profile(body).items()},
    )


def polynomial_from_report(doc):
    """Rebuild the polynomial, constant term included, from a hamiltonian report."""
    validate(doc, "hamiltonian")
    pairs = []
    for t in doc["terms"]:
        if not isinstance(t, dict) or set(t) != {"string", "coefficient"}:
            raise ReportError("each term needs exactly 'string' and 'coefficient'")
        pairs.append((t["string"], float(t["coefficient"])))
    n = int(doc["n_qubits"])
    if doc.get("constant_term"):
        pairs.append(("I" * n, float(doc["constant_term"])))
    try:
        return PauliPolynomial.from_pairs(n, pairs)
    except ValueError as exc:
        raise ReportError(str(exc)) from None


def matrix_report(m):
    m = np.asarray(m, dtype=np.complex128)
    return document("matrix", real=m.real.tolist(), imag=m.imag.tolist())


def matrix_from_report(doc):
    validate(doc, "matrix")
    try:
        re = np.array(doc["real"], dtype=float)
        im = np.array(doc["imag"], dtype=float)
    except (TypeError, ValueError):
        raise ReportError("matrix entries must be numbers") from None
    if re.shape != im.shape or re.ndim != 2:
        raise ReportError("real and imag must be matching 2-D arrays")
    return re + 1j * im


def matrix_csv(m):
    lines = ["row,col,real,imag"]
    for (i, j), z in np.ndenumerate(np.asarray(m)):
        lines.append(f"{i},{j},{format(z.real, '.17g')},{format(z.imag, '.17g')}")
    return "\n".join(lines) + "\n"
