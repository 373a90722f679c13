"""Command-line front end.

Exit codes: 0 pass, 1 quantitative failure, 2 input error, 3 constraint
violation.  Angles are radians unless ``--degrees`` is given, which converts
inputs only; reports are always in radians.
"""
import argparse
import json
import sys
import time
from datetime import datetime, timezone

import numpy as np

from . import __version__, report
from ._accel import BACKEND
from .evolution import Protocol, check_protocol, evolve_const, evolve_protocol, verify_gate
from .gate_families import Not1Params, Not2RestrictedParams, spec_by_name
from .linalg import DimensionError, DomainError
from .pauli import decompose
from .search import ANSATZ_PRESETS, CouplingAnsatz, SearchConfig, run_search
from .synthesis import (
    ConstraintError, hamiltonian_not1, hamiltonian_not1_general, hamiltonian_not2,
    hamiltonian_not2_general, hamiltonian_xor, solve_xor_constraints, synthesize,
)

EXIT_PASS, EXIT_FAIL, EXIT_INPUT, EXIT_CONSTRAINT = 0, 1, 2, 3

ANGLE_KEYS = {"alpha", "beta", "gamma", "delta", "rho", "omega_angle", "xi", "eta",
              "chi", "Omega", "Upsilon"}
XOR_DERIVED = ("delta", "rho", "omega_angle", "xi", "eta")


class InputError(Exception):
    """Malformed or incomplete user input (exit code 2)."""


# --- input helpers ----------------------------------------------------------

def _read_text(source):
    if source == "-":
        return sys.stdin.read()
    if source.lstrip().startswith(("{", "[")):
        return source
    try:
        with open(source) as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {source!r}: {exc.strerror}") from None


def _read_json(source):
    try:
        return json.loads(_read_text(source))
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON in {source!r}: {exc}") from None


def _read_doc(source, kind):
    try:
        doc = _read_json(source)
        report.validate(doc, kind)
        return doc
    except report.ReportError as exc:
        raise InputError(str(exc)) from None


def _params(source, required, optional=(), degrees=False):
    raw = _read_json(source)
    if not isinstance(raw, dict):
        raise InputError("parameters must be a JSON object")
    missing = [k for k in required if k not in raw]
    if missing:
        raise InputError(f"missing parameters: {missing}")
    unknown = set(raw) - set(required) - set(optional)
    if unknown:
        raise InputError(f"unknown parameters: {sorted(unknown)}")
    out = {}
    for k, v in raw.items():
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise InputError(f"parameter {k!r} must be a number")
        out[k] = np.radians(float(v)) if degrees and k in ANGLE_KEYS else v
    return out


def _integer(params, key, default=0):
    v = params.get(key, default)
    if float(v) != int(v):
        raise InputError(f"{key} must be an integer")
    return int(v)


def _branch(text):
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise InputError(f"branch must be comma-separated integers, got {text!r}") from None


def _protocol(source, delta_t):
    if source is None:
        return None
    d = _read_json(source)
    if not isinstance(d, dict):
        raise InputError("a protocol must be a JSON object")
    if d.get("schema", report.SCHEMA) != report.SCHEMA:
        raise InputError(f"expected schema {report.SCHEMA!r}")
    d = {k: v for k, v in d.items() if k != "schema"}
    d.setdefault("delta_t", delta_t)
    try:
        return Protocol.from_dict(d)
    except (ValueError, TypeError) as exc:
        raise InputError(str(exc)) from None


def _emit(args, doc, text=None):
    text = report.dumps(doc) if text is None else text
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        manifest = report.document(
            "manifest", command=args.command, argv=list(args.argv), config=_config_of(args),
            seed=getattr(args, "seed", None), version=__version__, backend=BACKEND,
            started=args.started, wall_clock_seconds=time.perf_counter() - args.t0)
        with open(args.out + ".manifest.json", "w") as fh:
            fh.write(report.dumps(manifest))
    else:
        sys.stdout.write(text)


def _config_of(args):
    skip = {"func", "argv", "started", "t0"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


# --- commands ---------------------------------------------------------------

def _synth_family(family, params, dt, hbar):
    """Return (polynomial, branch) for a family and validated parameters."""
    if family == "not1":
        if "N" in params and "gamma" in params and not {"alpha", "beta"} & set(params):
            n = _integer(params, "N")
            return hamiltonian_not1(n, params["gamma"], dt, hbar), (n,)
        if not {"alpha", "beta"} <= set(params):
            raise InputError("not1 needs {N, gamma} or {alpha, beta}")
        branch = (_integer(params, "N1"), _integer(params, "N2"))
        p = Not1Params(params["alpha"], params["beta"])
        return hamiltonian_not1_general(p, branch, dt, hbar), branch
    if family == "not2":
        if {"E_ising", "N", "gamma"} <= set(params):
            n = _integer(params, "N")
            return hamiltonian_not2(params["E_ising"], n, params["gamma"], dt, hbar), (n,)
        if not {"alpha", "beta", "rho", "delta"} <= set(params):
            raise InputError("not2 needs {E_ising, N, gamma} or {alpha, beta, rho, delta}")
        branch = tuple(_integer(params, f"N{k}") for k in range(1, 5))
        p = Not2RestrictedParams(params["alpha"], params["beta"], params["rho"], params["delta"])
        return hamiltonian_not2_general(p, branch, dt, hbar), branch
    sol = solve_xor_constraints(params["alpha"], params["beta"], params["gamma"])
    for name in XOR_DERIVED:
        if name in params:
            diff = np.angle(np.exp(1j * (params[name] - getattr(sol, name))))
            if abs(diff) > 1e-9:
                raise ConstraintError(f"{name} = {params[name]!r} violates the XOR constraints "
                                      f"(expected {getattr(sol, name)!r} mod 2 pi)")
    return hamiltonian_xor(sol.alpha, sol.beta, sol.gamma, dt, hbar), (0, 0, 0, 0)


_FAMILY_KEYS = {
    "not1": ((), ("N", "gamma", "alpha", "beta", "N1", "N2")),
    "not2": ((), ("E_ising", "N", "gamma", "alpha", "beta", "rho", "delta",
                  "N1", "N2", "N3", "N4")),
    "xor": (("alpha", "beta", "gamma"), XOR_DERIVED),
}


def cmd_synth(args):
    required, optional = _FAMILY_KEYS[args.family]
    params = _params(args.params, required, optional, args.degrees)
    h, branch = _synth_family(args.family, params, args.delta_t, args.hbar)
    doc = report.hamiltonian_report(h, family=args.family, params=params,
                                    delta_t=args.delta_t, hbar=args.hbar, branch=branch)
    _emit(args, doc)
    return EXIT_PASS


def cmd_synth_unitary(args):
    u = report.matrix_from_report(_read_doc(args.matrix, "matrix"))
    h = synthesize(u, _branch(args.branch), args.delta_t, args.hbar)
    doc = report.hamiltonian_report(h, delta_t=args.delta_t, hbar=args.hbar,
                                    branch=_branch(args.branch))
    _emit(args, doc)
    return EXIT_PASS


def cmd_decompose(args):
    m = report.matrix_from_report(_read_doc(args.matrix, "matrix"))
    doc = report.hamiltonian_report(decompose(m, args.tol), delta_t=args.delta_t, hbar=args.hbar)
    _emit(args, doc)
    return EXIT_PASS


def _load_hamiltonian(source):
    try:
        return report.polynomial_from_report(_read_doc(source, "hamiltonian"))
    except report.ReportError as exc:
        raise InputError(str(exc)) from None


def _evolved(h, args):
    f = _protocol(args.protocol, args.delta_t)
    if f is None:
        return evolve_const(h, args.delta_t, args.hbar)
    check = check_protocol(f)
    if not check.valid:
        print(f"gateforge: note: protocol integrates to {check.integral:.12g}, not "
              f"delta_t = {f.delta_t:.12g}", file=sys.stderr)
    if check.changes_sign:
        print("gateforge: note: protocol changes sign over its support", file=sys.stderr)
    return evolve_protocol(h, f, args.steps, args.hbar)


def cmd_evolve(args):
    u = _evolved(_load_hamiltonian(args.hamiltonian), args)
    if args.format == "csv":
        _emit(args, None, report.matrix_csv(u))
    else:
        _emit(args, report.matrix_report(u))
    return EXIT_PASS


def cmd_verify(args):
    spec = spec_by_name(args.spec)
    h = _load_hamiltonian(args.hamiltonian)
    if h.n_qubits != spec.n_qubits:
        raise InputError(f"{h.n_qubits}-qubit Hamiltonian cannot realize the "
                         f"{spec.n_qubits}-qubit {spec.name} gate")
    u = _evolved(h, args)
    result = verify_gate(u, spec, args.tol)
    _emit(args, report.document("verification", spec=spec.name, **result.to_dict()))
    return EXIT_PASS if result.passed else EXIT_FAIL


def _ansatz(source, spec):
    if source in ANSATZ_PRESETS:
        return ANSATZ_PRESETS[source](spec.n_qubits)
    doc = _read_doc(source, "ansatz")
    try:
        return CouplingAnsatz.from_dict({k: v for k, v in doc.items() if k not in ("schema", "kind")})
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed ansatz: {exc}") from None


def cmd_search(args):
    spec = spec_by_name(args.spec)
    ansatz = _ansatz(args.ansatz, spec)
    if len(ansatz) == 0:
        raise InputError("the ansatz has no basis terms")
    if ansatz.n_qubits != spec.n_qubits:
        raise InputError(f"{ansatz.n_qubits}-qubit ansatz against the {spec.n_qubits}-qubit spec")
    settings = {}
    if args.config:
        settings = {k: v for k, v in _read_doc(args.config, "search_config").items()
                    if k not in ("schema", "kind")}
    for key in ("restarts", "max_evaluations", "seed", "workers"):
        if getattr(args, key) is not None:
            settings[key] = getattr(args, key)
    if args.tol is not None:
        settings["target_leakage"] = args.tol
    try:
        config = SearchConfig(**settings)
    except TypeError as exc:
        raise InputError(str(exc)) from None
    args.seed = config.seed
    result = run_search(ansatz, spec, config, args.delta_t, args.hbar)
    if args.format == "csv":
        _emit(args, None, result.history_csv())
    else:
        h = ansatz.polynomial(result.best_coefficients)
        doc = report.document(
            "search_result", spec=spec.name, ansatz=ansatz.to_dict(), config=config.to_dict(),
            delta_t=args.delta_t, hbar=args.hbar, **result.to_dict(),
            hamiltonian=[{"string": s, "coefficient": c} for s, c in h.items()])
        _emit(args, doc)
    return EXIT_PASS if result.target_met else EXIT_FAIL


# --- parser -----------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(prog="gateforge", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"gateforge {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--delta-t", type=float, default=1.0, help="gate duration (default 1)")
    common.add_argument("--hbar", type=float, default=1.0, help="reduced Planck constant (default 1)")
    common.add_argument("--out", help="write here instead of stdout; a manifest goes next to it")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", parents=[common], help="closed-form gate Hamiltonian")
    p.add_argument("family", choices=("not1", "not2", "xor"))
    p.add_argument("params", help="JSON object, file path, or - for stdin")
    p.add_argument("--degrees", action="store_true", help="read angles in degrees")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("synth-unitary", parents=[common], help="Hamiltonian of a unitary matrix")
    p.add_argument("matrix", help="matrix report (file, JSON or -)")
    p.add_argument("--branch", required=True, help="one integer per eigenvalue cluster, e.g. 0,0")
    p.set_defaults(func=cmd_synth_unitary)

    p = sub.add_parser("decompose", parents=[common], help="Pauli expansion of a Hermitian matrix")
    p.add_argument("matrix", help="matrix report (file, JSON or -)")
    p.add_argument("--tol", type=float, default=1e-10, help="Hermiticity tolerance")
    p.set_defaults(func=cmd_decompose)

    for name, func, helptext in (("evolve", cmd_evolve, "gate unitary of a Hamiltonian"),
                                 ("verify", cmd_verify, "check a Hamiltonian against a gate")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("hamiltonian", help="hamiltonian report (file, JSON or -)")
        if name == "verify":
            p.add_argument("spec", choices=("not1", "not2", "xor"))
            p.add_argument("--tol", type=float, default=1e-9, help="leakage tolerance")
        else:
            p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--protocol", help="protocol JSON {kind, amplitude, t0, delta_t, params}; omit for constant switching")
        p.add_argument("--steps", type=int, default=256, help="time slices for a protocol")
        p.set_defaults(func=func)

    p = sub.add_parser("search", parents=[common], help="numerical coupling search")
    p.add_argument("spec", choices=("not1", "not2", "xor"))
    p.add_argument("ansatz", help=f"preset ({', '.join(ANSATZ_PRESETS)}) or ansatz document")
    p.add_argument("--config", help="search_config document")
    p.add_argument("--seed", type=int)
    p.add_argument("--restarts", type=int)
    p.add_argument("--max-evaluations", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--tol", type=float, help="target leakage")
    p.add_argument("--format", choices=("json", "csv"), default="json",
                   help="csv writes the history (restart, evaluation, best_leakage)")
    p.set_defaults(func=cmd_search)
    return parser


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_PASS
    args.argv = argv
    args.started = datetime.now(timezone.utc).isoformat(timespec="seconds")
    args.t0 = time.perf_counter()
    try:
        return args.func(args)
    except (InputError, report.ReportError, DimensionError) as exc:
        print(f"gateforge: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ConstraintError, DomainError) as exc:
        print(f"gateforge: constraint violated: {exc}", file=sys.stderr)
        return EXIT_CONSTRAINT
    except ValueError as exc:
        print(f"gateforge: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
