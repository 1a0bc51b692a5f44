"""JSON-ready dictionaries for matrices, channels, nets and codes.

Only plain ``dict``/``list``/``float`` values are produced; writing files is
left to the CLI.  Non-finite floats become ``None``.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from .channels import Channel
from .classical_id import BlowupCode, ClassicalIdCode
from .fingerprint import FingerprintCode, MixedIdCode
from .nets import Certificate, EpsilonNet
from .quantum_id import QuantumIdCode


def matrix_to_dict(a) -> dict:
    a = np.atleast_2d(np.asarray(a, dtype=complex))
    return {"rows": a.shape[0], "cols": a.shape[1],
            "re": a.real.tolist(), "im": a.imag.tolist()}


def matrix_from_dict(obj: dict) -> np.ndarray:
    a = np.asarray(obj["re"], dtype=float) + 1j * np.asarray(obj["im"], dtype=float)
    a = a.reshape(int(obj["rows"]), int(obj["cols"]))
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    return a


def state_to_dict(psi) -> dict:
    """A pure state as a one-column matrix."""
    return matrix_to_dict(np.asarray(psi, dtype=complex).reshape(-1, 1))


def channel_to_dict(ch: Channel) -> dict:
    return {"in_dim": ch.in_dim, "out_dim": ch.out_dim,
            "kraus": [matrix_to_dict(k) for k in ch.kraus_ops]}


def channel_from_dict(obj: dict) -> Channel:
    return Channel(tuple(matrix_from_dict(k) for k in obj["kraus"]),
                   int(obj["in_dim"]), int(obj["out_dim"]))


def net_to_dict(net: EpsilonNet, include_points: bool = True) -> dict:
    out = {"dim": net.dim, "epsilon": net.epsilon, "size": len(net),
           "certificate": net.certificate.to_dict()}
    if include_points:
        out["points"] = [state_to_dict(p) for p in net.points]
    return out


def classical_code_to_dict(code: ClassicalIdCode) -> dict:
    return {"M": code.ground_size, "set_size": code.set_size,
            "lambda2_target": code.lambda2_target, "sets": [list(s) for s in code.sets]}


def blowup_to_dict(code: BlowupCode) -> dict:
    return {"M": code.classical_dim, "N_base": len(code.base_states),
            "lambda2_base": code.lambda2_base, "epsilon": code.epsilon,
            "functions": code.functions.tolist()}


def fingerprint_to_dict(code: FingerprintCode, include_states: bool = False) -> dict:
    out = {"dim": code.dim, "N": len(code), "lambda_target": code.lambda_target,
           "max_overlap": code.max_overlap, "sets": classical_code_to_dict(code.sets)}
    if include_states:
        out["states"] = [state_to_dict(s) for s in code.states]
    return out


def quantum_id_to_dict(code: QuantumIdCode, include_matrices: bool = True) -> dict:
    out = {"S": code.S, "d": code.d, "a": code.a,
           "decoder_ranks": [int(q.shape[1]) for q in code.decoder_bases],
           "net": net_to_dict(code.net, include_points=include_matrices)}
    if include_matrices:
        out["V"] = matrix_to_dict(code.V)
    return out


def mixed_code_to_dict(code: MixedIdCode, include_matrices: bool = False) -> dict:
    return {"N": len(code), "inner": fingerprint_to_dict(code.inner),
            "embedding": quantum_id_to_dict(code.embedding, include_matrices)}


def to_jsonable(obj):
    """Recursively convert numpy scalars/arrays, dataclasses and tuples."""
    if isinstance(obj, Certificate):
        return obj.to_dict()
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        if hasattr(obj, "to_dict"):
            return to_jsonable(obj.to_dict())
        return to_jsonable(dataclasses.asdict(obj))
    if hasattr(obj, "_asdict"):
        return to_jsonable(obj._asdict())
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return matrix_to_dict(obj) if obj.ndim <= 2 else [to_jsonable(x) for x in obj]
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj
