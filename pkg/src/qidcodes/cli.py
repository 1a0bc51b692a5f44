"""Command-line front end.

Every command prints (or writes with ``--output``) one JSON report::

    {"tool": "qidcodes", "version": ..., "command": ..., "seed": ...,
     "params": {...}, "status": "ok" | "partial" | "failed-check",
     "result": {...}, "timing": {"timestamp": ..., "duration_s": ...}}

Everything except ``timing`` is a deterministic function of the command,
its parameters and the seed.  ``sweep`` runs one command over a parameter
grid and writes CSV.

Exit codes: 0 success, 1 invalid input, 2 constraint violation (partial
construction, degenerate parameters, failed statistical check).
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import os
import sys
import tempfile
import time
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .capacity import (
    converse_bound,
    ds_single_letter,
    holevo_chi,
    hybrid_capacity,
    pairwise_distance_check,
    rate_report,
    RATE_KINDS,
)
from .channels import (
    HybridAlgebra,
    classical_channel,
    dephasing_channel,
    depolarizing_channel,
    identity_channel,
)
from .classical_id import (
    ClassicalIdCode,
    ad_construct,
    blowup,
    concatenated_states,
    is_coarse_graining,
    sanov_monte_carlo,
    sanov_tail,
    simultaneous_from_transmission,
    verify_blowup,
    verify_classical_id,
)
from .errors import DegenerateParametersError, PartialResultError, QidError
from .fingerprint import (
    _fingerprints_of,
    build_fingerprint_code,
    build_mixed_code,
    verify_fingerprint,
    verify_mixed_code,
)
from .nets import build_net, net_from_points
from .qcore import basis_state
from .quantum_id import (
    QuantumIdCode,
    build_scheduled,
    build_quantum_id,
    concentration_check,
    _decoder_basis,
    verify_quantum_id,
)
from .serialization import (
    blowup_to_dict,
    channel_to_dict,
    classical_code_to_dict,
    fingerprint_to_dict,
    matrix_from_dict,
    mixed_code_to_dict,
    net_to_dict,
    quantum_id_to_dict,
    to_jsonable,
)
from .verify import acceptance_matrix, report_from_acceptance

SEED_ENV = "QIDCODES_SEED"
TOOL = "qidcodes"


class UsageError(Exception):
    """Bad command line or config file (exit 1)."""


class CheckFailed(Exception):
    """A run finished but its statistical assertion failed (exit 2)."""

    def __init__(self, message, result):
        super().__init__(message)
        self.result = result


def int_list(text) -> list[int]:
    if isinstance(text, (list, tuple)):
        return [int(x) for x in text]
    try:
        return [int(x) for x in str(text).split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def matrix_arg(text) -> list[list[float]]:
    """``"0.9,0.1;0.2,0.8"`` -> rows of floats."""
    if isinstance(text, (list, tuple)):
        return [[float(x) for x in row] for row in text]
    try:
        return [[float(x) for x in row.split(",")] for row in str(text).split(";") if row.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected rows like '0.9,0.1;0.2,0.8', got {text!r}") from None


def flag(value) -> bool:
    if isinstance(value, bool):
        return value
    if str(value).lower() in ("1", "true", "yes"):
        return True
    if str(value).lower() in ("0", "false", "no"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {value!r}")


@dataclass(frozen=True)
class Opt:
    name: str
    type: object
    default: object = None
    help: str = ""
    choices: tuple | None = None
    is_flag: bool = False


# --- handlers ---------------------------------------------------------------
# Each handler takes the parameter dict and a numpy Generator and returns a
# JSON-ready result dict.


def _verification(rep) -> dict:
    return to_jsonable(rep.to_dict())


def run_construct_ad(p, rng):
    try:
        code = ad_construct(p["M"], p["epsilon"], p["lam"], p["target_n"], rng, p["budget"])
    except PartialResultError as exc:
        raise PartialResultError(str(exc), _ad_result(exc.result)) from None
    return _ad_result(code)


def _ad_result(code):
    return {"N": len(code), "code": classical_code_to_dict(code),
            "verification": _verification(verify_classical_id(code))}


def run_construct_fingerprint(p, rng):
    def pack(code):
        rep = verify_fingerprint(code)
        dist = pairwise_distance_check(code.states, rep.lambda1, rep.lambda2)
        return {"N": len(code), "code": fingerprint_to_dict(code, p["full"]),
                "verification": _verification(rep),
                "distance_check": to_jsonable(dist._asdict())}
    try:
        code = build_fingerprint_code(p["d"], p["epsilon"], p["lam"], p["target_n"], rng,
                                      enforce_hypothesis=not p["no_hypothesis"],
                                      attempt_budget=p["budget"])
    except PartialResultError as exc:
        raise PartialResultError(str(exc), pack(exc.result)) from None
    return pack(code)


def run_construct_mixed(p, rng):
    code = build_mixed_code(p["d"], p["lam"], p["S_override"], p["target_n"], rng,
                            fingerprint_epsilon=p["fingerprint_epsilon"],
                            ancilla_dim=p["ancilla_dim"], net_budget=p["net_budget"],
                            allow_partial=p["allow_partial"])
    rep = verify_mixed_code(code)
    out = {"N": len(code), "code": mixed_code_to_dict(code, p["full"]),
           "verification": _verification(rep)}
    if rep.lambda1 + rep.lambda2 < 1:
        out["distance_check"] = to_jsonable(
            pairwise_distance_check(code.states, rep.lambda1, rep.lambda2)._asdict())
    if len(code) < p["target_n"]:
        raise PartialResultError(f"inner code has {len(code)} of {p['target_n']} codewords", out)
    return out


def run_construct_quantum_id(p, rng):
    if p["preset_lambda"] is not None:
        code = build_scheduled(p["preset_lambda"], p["d"], p["net_budget"], rng)
    else:
        if p["S"] is None or p["a"] is None:
            raise UsageError("--S and --a are required unless --preset-lambda is given")
        code = build_quantum_id(p["S"], p["d"], p["a"], p["net_budget"], rng,
                                coverage_samples=p["coverage_samples"])
    ranks = [q.shape[1] for q in code.decoder_bases]
    return {"code": quantum_id_to_dict(code, p["full"]),
            "max_decoder_rank": max(ranks), "min_decoder_rank": min(ranks)}


def run_construct_blowup(p, rng):
    # Base code: orthonormal basis of C^N with projective decoders (lambda2 = 0).
    states = [basis_state(p["N"], i) for i in range(p["N"])]
    effects = [np.outer(s, s.conj()) for s in states]

    def pack(code):
        return {"N": len(code), "code": blowup_to_dict(code),
                "verification": _verification(verify_blowup(code))}
    try:
        code = blowup(states, effects, None, p["M"], p["epsilon"], p["target_n"], rng, p["budget"])
    except PartialResultError as exc:
        raise PartialResultError(str(exc), pack(exc.result)) from None
    return pack(code)


def run_construct_simultaneous(p, rng):
    # Transmission code: computational basis of C^M, decoded by the basis POVM.
    M = p["M"]
    povm = [np.outer(basis_state(M, k), basis_state(M, k)) for k in range(M)]

    def pack(code):
        effects, partition = simultaneous_from_transmission(povm, code)
        states = concatenated_states([basis_state(M, k) for k in range(M)], code)
        rep = report_from_acceptance(acceptance_matrix(states, effects))
        return {"N": len(code), "code": classical_code_to_dict(code), "partition": partition,
                "coarse_graining": is_coarse_graining(effects, povm, partition),
                "verification": _verification(rep)}
    try:
        code = ad_construct(M, p["epsilon"], p["lam"], p["target_n"], rng, p["budget"])
    except PartialResultError as exc:
        raise PartialResultError(str(exc), pack(exc.result)) from None
    return pack(code)


def _load_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None


def _code_section(obj):
    """Accept either a bare code object or a full construct report."""
    if "result" in obj and isinstance(obj["result"], dict):
        obj = obj["result"]
    return obj.get("code", obj)


def _classical_from(obj) -> ClassicalIdCode:
    obj = _code_section(obj)
    if "sets" in obj and isinstance(obj["sets"], dict):
        obj = obj["sets"]
    try:
        return ClassicalIdCode(int(obj["M"]), tuple(obj["sets"]), int(obj["set_size"]),
                               float(obj.get("lambda2_target", 1.0)))
    except KeyError as exc:
        raise UsageError(f"code file lacks field {exc}") from None


def run_verify_classical(p, rng):
    if p["input"]:
        code = _classical_from(_load_json(p["input"]))
    else:
        code = ad_construct(p["M"], p["epsilon"], p["lam"], p["target_n"], rng)
    return _ad_result(code)


def run_verify_fingerprint(p, rng):
    if p["input"]:
        code = _fingerprints_of(_classical_from(_load_json(p["input"])), p["lam"])
    else:
        code = build_fingerprint_code(p["d"], p["epsilon"], p["lam"], p["target_n"], rng,
                                      enforce_hypothesis=False)
    rep = verify_fingerprint(code)
    out = {"N": len(code), "verification": _verification(rep)}
    if rep.lambda1 + rep.lambda2 < 1:
        out["distance_check"] = to_jsonable(
            pairwise_distance_check(code.states, rep.lambda1, rep.lambda2)._asdict())
    return out


def _quantum_id_from(obj) -> QuantumIdCode:
    obj = _code_section(obj)
    try:
        S, d, a = int(obj["S"]), int(obj["d"]), int(obj["a"])
        V = matrix_from_dict(obj["V"])
        pts = np.array([matrix_from_dict(x).ravel() for x in obj["net"]["points"]])
    except KeyError as exc:
        raise UsageError(f"quantum-id file lacks field {exc} (construct with --full)") from None
    net = net_from_points(pts, epsilon=obj["net"].get("epsilon"), coverage_samples=0)
    bases = tuple(_decoder_basis(V, theta, d, a, 1e-10) for theta in net.points)
    return QuantumIdCode(S, d, a, V, net, bases)


def run_verify_quantum_id(p, rng):
    if p["input"]:
        code = _quantum_id_from(_load_json(p["input"]))
    else:
        if p["S"] is None or p["a"] is None:
            raise UsageError("--S and --a are required without --input")
        code = build_quantum_id(p["S"], p["d"], p["a"], p["net_budget"], rng,
                                coverage_samples=p["coverage_samples"])
    rep = verify_quantum_id(code, p["samples"], not p["no_net_pairs"], rng, p["lam"])
    out = {"S": code.S, "d": code.d, "a": code.a, "net_size": len(code.net)}
    out.update(to_jsonable(rep.to_dict()))
    return out


def _channel(p):
    kind, dim = p["channel"], p["dim"]
    if kind == "identity":
        return identity_channel(dim)
    if kind == "dephasing":
        return dephasing_channel(dim)
    if kind == "depolarizing":
        return depolarizing_channel(dim, p["noise"])
    if kind == "classical":
        if not p["stochastic"]:
            raise UsageError("--stochastic is required for the classical channel")
        return classical_channel(np.array(p["stochastic"]))
    raise UsageError(f"unknown channel {kind!r}")


def run_capacity_chi(p, rng):
    ch = _channel(p)
    res = holevo_chi(ch, p["ensemble_size"], p["restarts"], p["tol"], rng)
    out = to_jsonable(res.to_dict())
    out["channel"] = channel_to_dict(ch) if p["full"] else {"in_dim": ch.in_dim, "out_dim": ch.out_dim}
    return out


def run_capacity_hybrid(p, rng):
    res = hybrid_capacity(HybridAlgebra(tuple(p["dims"])))
    return {"closed_form": res.closed_form, "via_optimization": res.via_optimization,
            "gap": abs(res.closed_form - res.via_optimization),
            "argmax_p": res.argmax_p.tolist()}


def run_capacity_ds(p, rng):
    ch = _channel(p)
    dim = ch.in_dim
    if p["ensemble"] == "max-entangled":
        phi = np.eye(dim).reshape(-1).astype(complex) / math.sqrt(dim)
        inputs = [(1.0, phi)]
    else:
        # Classical feed: product inputs |0>|x> with uniform x.
        inputs = [(1.0 / dim, np.kron(basis_state(1, 0), basis_state(dim, x))) for x in range(dim)]
    res = ds_single_letter(ch, inputs)
    out = to_jsonable(res._asdict())
    out["block_length"] = 1
    return out


def run_capacity_converse(p, rng):
    return {"log2_bound": converse_bound(p["d"], p["l1"], p["l2"], p["pure"]),
            "pure_only": p["pure"]}


def run_montecarlo_concentration(p, rng):
    res = concentration_check(p["d"], p["r"], p["eps"], p["trials"], rng)
    out = to_jsonable(res._asdict())
    if not res.consistent:
        raise CheckFailed("empirical tail exceeds bound + 3 sigma", out)
    return out


def run_montecarlo_sanov(p, rng):
    res = sanov_monte_carlo(p["M"], p["N"], p["eps"], p["trials"], rng)
    out = to_jsonable(res._asdict())
    out["log2_bound"] = sanov_tail(p["M"], p["N"], p["eps"]) if res.hypothesis_ok else None
    if not res.consistent:
        raise CheckFailed("empirical tail exceeds bound + 3 sigma", out)
    return out


def run_net_build(p, rng):
    net = build_net(p["dim"], p["eps"], p["strategy"], p["budget"], rng, p["coverage_samples"])
    return net_to_dict(net, include_points=p["full"])


def run_rate(p, rng):
    return rate_report(p["kind"], p["n"], p["size"]).to_dict()


_FULL = Opt("full", flag, False, "include matrices and states in the report", is_flag=True)
_CHANNEL = [
    Opt("channel", str, "identity", "channel family",
        ("identity", "dephasing", "depolarizing", "classical")),
    Opt("dim", int, 2, "input dimension"),
    Opt("noise", float, 1.0, "depolarizing parameter p"),
    Opt("stochastic", matrix_arg, None, "row-stochastic matrix for the classical channel"),
]

COMMANDS = {
    "construct ad": (run_construct_ad, "randomized-greedy subset ID code", [
        Opt("M", int, 16, "ground set size"),
        Opt("epsilon", float, 0.25, "set size fraction"),
        Opt("lam", float, 0.5, "second-kind error target"),
        Opt("target_n", int, 20, "number of sets wanted"),
        Opt("budget", int, None, "attempt budget (default 50*target_n)")]),
    "construct fingerprint": (run_construct_fingerprint, "pure-state fingerprint ID code", [
        Opt("d", int, 128, "dimension"),
        Opt("epsilon", float, 1 / 32, "set size fraction"),
        Opt("lam", float, 0.9, "second-kind error target"),
        Opt("target_n", int, 20, "number of codewords wanted"),
        Opt("budget", int, None, "attempt budget"),
        Opt("no_hypothesis", flag, False, "skip the parameter hypothesis check", is_flag=True),
        _FULL]),
    "construct mixed": (run_construct_mixed, "mixed-state ID code by concatenation", [
        Opt("d", int, 16, "output dimension"),
        Opt("lam", float, 0.5, "error target"),
        Opt("S_override", int, None, "message dimension (default from the K(lambda) formula)"),
        Opt("target_n", int, 8, "inner codewords wanted"),
        Opt("fingerprint_epsilon", float, 0.5, "set size fraction of the inner code"),
        Opt("ancilla_dim", int, None, "ancilla dimension (default ceil(S/d))"),
        Opt("net_budget", int, 200, "random net points"),
        Opt("allow_partial", flag, False, "keep a short inner code (still exit 2)", is_flag=True),
        _FULL]),
    "construct quantum-id": (run_construct_quantum_id, "random-isometry quantum-ID code", [
        Opt("S", int, None, "message dimension"),
        Opt("d", int, 4, "output dimension"),
        Opt("a", int, None, "ancilla dimension"),
        Opt("net_budget", int, 200, "random net points"),
        Opt("coverage_samples", int, 1000, "probe states for the net certificate"),
        Opt("preset_lambda", float, None, "take S and a from the error schedule for this lambda"),
        _FULL]),
    "construct blowup": (run_construct_blowup, "blow-up code over a classical register", [
        Opt("N", int, 4, "size of the orthogonal base code"),
        Opt("M", int, 16, "classical register size"),
        Opt("epsilon", float, 0.5, "allowed excess agreement"),
        Opt("target_n", int, 20, "functions wanted"),
        Opt("budget", int, None, "attempt budget")]),
    "construct simultaneous": (run_construct_simultaneous, "simultaneous ID code from a basis POVM", [
        Opt("M", int, 16, "transmission code size"),
        Opt("epsilon", float, 0.25, "set size fraction"),
        Opt("lam", float, 0.5, "second-kind error target"),
        Opt("target_n", int, 10, "tests wanted"),
        Opt("budget", int, None, "attempt budget")]),
    "verify classical": (run_verify_classical, "exhaustive check of a subset ID code", [
        Opt("input", str, None, "code JSON (construct ad report or bare code)"),
        Opt("M", int, 16, "ground set size"),
        Opt("epsilon", float, 0.25, "set size fraction"),
        Opt("lam", float, 0.5, "second-kind error target"),
        Opt("target_n", int, 20, "number of sets")]),
    "verify fingerprint": (run_verify_fingerprint, "exhaustive check of a fingerprint code", [
        Opt("input", str, None, "code JSON holding the subset family"),
        Opt("d", int, 64, "dimension"),
        Opt("epsilon", float, 1 / 64, "set size fraction"),
        Opt("lam", float, 0.5, "error target"),
        Opt("target_n", int, 20, "number of codewords")]),
    "verify quantum-id": (run_verify_quantum_id, "deviation check of a quantum-ID code", [
        Opt("input", str, None, "code JSON from construct quantum-id --full"),
        Opt("S", int, None, "message dimension"),
        Opt("d", int, 4, "output dimension"),
        Opt("a", int, None, "ancilla dimension"),
        Opt("net_budget", int, 200, "random net points"),
        Opt("coverage_samples", int, 1000, "probe states for the net certificate"),
        Opt("samples", int, 1000, "Haar pairs"),
        Opt("lam", float, None, "error target for the pass flag"),
        Opt("no_net_pairs", flag, False, "skip the exhaustive net-pair check", is_flag=True)]),
    "capacity chi": (run_capacity_chi, "Holevo quantity maximization", _CHANNEL + [
        Opt("ensemble_size", int, None, "input states (default dim^2)"),
        Opt("restarts", int, 16, "random restarts"),
        Opt("tol", float, 1e-10, "sweep improvement tolerance"),
        _FULL]),
    "capacity hybrid": (run_capacity_hybrid, "ID capacity of a hybrid memory", [
        Opt("dims", int_list, [2], "block dimensions, comma separated")]),
    "capacity ds": (run_capacity_ds, "2 I_c + I(X;B) for a fixed ensemble (n = 1)", _CHANNEL + [
        Opt("ensemble", str, "max-entangled", "input ensemble", ("max-entangled", "classical"))]),
    "capacity converse": (run_capacity_converse, "log2 of the code size upper bound", [
        Opt("d", int, 2, "dimension"),
        Opt("l1", float, 0.25, "first-kind error"),
        Opt("l2", float, 0.25, "second-kind error"),
        Opt("pure", flag, False, "pure codewords only", is_flag=True)]),
    "montecarlo concentration": (run_montecarlo_concentration, "Haar projector tail vs bound", [
        Opt("d", int, 64, "dimension"),
        Opt("r", int, 8, "projector rank"),
        Opt("eps", float, 1.0, "relative excess"),
        Opt("trials", int, 10000, "Haar samples")]),
    "montecarlo sanov": (run_montecarlo_sanov, "agreement tail of random functions vs bound", [
        Opt("M", int, 50, "register size"),
        Opt("N", int, 8, "alphabet size"),
        Opt("eps", float, 0.5, "agreement threshold"),
        Opt("trials", int, 100000, "samples")]),
    "net build": (run_net_build, "epsilon-net of pure states", [
        Opt("dim", int, 2, "dimension"),
        Opt("eps", float, 0.5, "covering radius in trace distance"),
        Opt("strategy", str, "random", "construction", ("random", "exact-qubit")),
        Opt("budget", int, 1000, "random points"),
        Opt("coverage_samples", int, 10000, "probe states for the certificate"),
        _FULL]),
    "rate": (run_rate, "rate of a code of given size", [
        Opt("kind", str, "id-double-log", "rate formula", RATE_KINDS),
        Opt("n", int, 1, "block length"),
        Opt("size", int, 2, "N, S or M")]),
}


def _flag_name(name):
    return "--" + name.replace("_", "-")


def defaults_for(command) -> dict:
    return {o.name: o.default for o in COMMANDS[command][2]}


def coerce_params(command, raw: dict) -> dict:
    """Fill defaults and convert config-file values with the option types."""
    opts = {o.name: o for o in COMMANDS[command][2]}
    params = defaults_for(command)
    for key, value in raw.items():
        key = key.replace("-", "_")
        if key not in opts:
            raise UsageError(f"unknown parameter {key!r} for {command!r}")
        opt = opts[key]
        try:
            params[key] = None if value is None else opt.type(value)
        except (ValueError, TypeError, argparse.ArgumentTypeError) as exc:
            raise UsageError(f"bad value for {key}: {exc}") from None
        if opt.choices and params[key] not in opt.choices:
            raise UsageError(f"{key} must be one of {opt.choices}")
    return params


# --- reports and I/O ---------------------------------------------------------


def resolve_seed(seed):
    if seed is not None:
        return int(seed)
    env = os.environ.get(SEED_ENV)
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"{SEED_ENV} must be an integer, got {env!r}") from None
    return int(np.random.SeedSequence().entropy % (2 ** 63))


def execute(command, params, seed):
    """Run one command; returns ``(payload, exit_code)``."""
    handler = COMMANDS[command][0]
    rng = np.random.default_rng(seed)
    payload = {"tool": TOOL, "version": __version__, "command": command, "seed": seed,
               "params": to_jsonable(params)}
    try:
        result, status, code = handler(params, rng), "ok", 0
    except PartialResultError as exc:
        result, status, code = exc.result, "partial", 2
        payload["message"] = str(exc)
    except CheckFailed as exc:
        result, status, code = exc.result, "failed-check", 2
        payload["message"] = str(exc)
    if not isinstance(result, dict):
        result = {"value": result}
    payload["status"] = status
    payload["result"] = to_jsonable(result)
    return payload, code


def dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_atomic(path, text):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".qidcodes-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit(text, output):
    if output:
        write_atomic(output, text)
    else:
        sys.stdout.write(text)


def _flatten(obj, prefix=""):
    out = {}
    for key, value in obj.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            out.update(_flatten(value, name + "."))
        elif value is None or isinstance(value, (bool, int, float, str)):
            out[name] = value
    return out


def run_sweep(config: dict) -> tuple[str, int]:
    """CSV text with one row per grid point, plus the worst exit code."""
    if not isinstance(config, dict) or "subcommand" not in config:
        raise UsageError("sweep config must be an object with a 'subcommand' key")
    command = config["subcommand"]
    if command not in COMMANDS or command == "sweep":
        raise UsageError(f"unknown subcommand {command!r} in sweep config")
    base = config.get("base", {})
    grid = config.get("grid", {})
    if not isinstance(base, dict) or not isinstance(grid, dict):
        raise UsageError("'base' and 'grid' must be objects")
    for key, values in grid.items():
        if not isinstance(values, list):
            raise UsageError(f"grid entry {key!r} must be a list")
    seed = resolve_seed(config.get("seed"))
    keys = list(grid)
    points = list(itertools.product(*(grid[k] for k in keys))) if keys else []
    rows, columns, worst = [], [], 0
    for values in points:
        raw = dict(base)
        raw.update(zip(keys, values))
        params = coerce_params(command, raw)
        try:
            payload, code = execute(command, params, seed)
            result = _flatten(payload["result"])
        except (QidError, ValueError) as exc:
            code, result = (2 if isinstance(exc, DegenerateParametersError) else 1), {"error": str(exc)}
        worst = max(worst, code)
        row = {k: v for k, v in zip(keys, values)}
        row.update({"seed": seed, "exit_code": code})
        row.update({k: v for k, v in result.items() if k not in row})
        for col in row:
            if col not in columns:
                columns.append(col)
        rows.append(row)
    if not columns:
        columns = keys + ["seed", "exit_code"]
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({c: ("" if row.get(c) is None else row.get(c)) for c in columns})
    return buf.getvalue(), worst


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_common(sub):
    sub.add_argument("--seed", type=int, default=None,
                     help=f"RNG seed (default ${SEED_ENV}, else fresh entropy)")
    sub.add_argument("--output", "-o", default=None, help="write the report here instead of stdout")
    sub.add_argument("--no-timing", action="store_true",
                     help="omit the timing block so output is byte-reproducible")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qidcodes", description="Identification-code constructions and checks.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    groups = parser.add_subparsers(dest="group", required=True, parser_class=_Parser)
    nested = {}
    for command, (_, help_text, opts) in COMMANDS.items():
        parts = command.split()
        if len(parts) == 1:
            sub = groups.add_parser(parts[0], help=help_text)
        else:
            if parts[0] not in nested:
                grp = groups.add_parser(parts[0], help=f"{parts[0]} commands")
                nested[parts[0]] = grp.add_subparsers(dest="action", required=True,
                                                      parser_class=_Parser)
            sub = nested[parts[0]].add_parser(parts[1], help=help_text)
        sub.set_defaults(command=command)
        for o in opts:
            if o.is_flag:
                sub.add_argument(_flag_name(o.name), dest=o.name, action="store_true", help=o.help)
            else:
                sub.add_argument(_flag_name(o.name), dest=o.name, type=o.type, default=o.default,
                                 choices=o.choices, help=o.help)
        _add_common(sub)
    sweep = groups.add_parser("sweep", help="run one command over a parameter grid, emit CSV")
    sweep.add_argument("--config", required=True, help="JSON grid config")
    sweep.add_argument("--output", "-o", default=None, help="CSV path (default stdout)")
    sweep.set_defaults(command="sweep")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "sweep":
            text, code = run_sweep(_load_json(args.config))
            emit(text, args.output)
            return code
        params = {o.name: getattr(args, o.name) for o in COMMANDS[args.command][2]}
        seed = resolve_seed(args.seed)
        print(f"seed: {seed}", file=sys.stderr)
        start, stamp = time.perf_counter(), datetime.now(timezone.utc).isoformat()
        payload, code = execute(args.command, params, seed)
        if not args.no_timing:
            payload["timing"] = {"timestamp": stamp, "duration_s": time.perf_counter() - start}
        emit(dump_json(payload), args.output)
        if "message" in payload:
            print(f"qidcodes: {payload['message']}", file=sys.stderr)
        return code
    except DegenerateParametersError as exc:
        print(f"qidcodes: degenerate parameters: {exc}", file=sys.stderr)
        return 2
    except PartialResultError as exc:
        print(f"qidcodes: partial result: {exc}", file=sys.stderr)
        return 2
    except (UsageError, QidError, ValueError, ArithmeticError) as exc:
        print(f"qidcodes: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
