# JSON schemas shared by the library and CLI: matrices, generators,
# resource sets, transport plans, path samples and reports.

from __future__ import annotations

import json

import numpy as np

from .hormander import ResourceSet
from .lindblad import BilinearTerm, JumpTerm, Lindbladian
from .reach import ResourceSetK
from .tangent import PathSample
from .transport import (
    AmplitudeDamp,
    ApplyUnitary,
    DephaseDiagonal,
    TransportPlan,
    Transposition,
)


class SchemaError(ValueError):
    """Raised when a JSON document does not match the expected schema."""


def matrix_to_json(M: np.ndarray) -> dict:
    M = np.asarray(M, dtype=complex)
    return {"dim": M.shape[0],
            "entries": [[float(z.real), float(z.imag)] for z in M.reshape(-1)]}


def matrix_from_json(obj) -> np.ndarray:
    try:
        d = int(obj["dim"])
        entries = obj["entries"]
    except (TypeError, KeyError) as exc:
        raise SchemaError(f"matrix object missing field: {exc}") from exc
    if len(entries) != d * d:
        raise SchemaError(f"expected {d * d} entries, got {len(entries)}")
    flat = np.array([complex(re, im) for re, im in entries])
    return flat.reshape(d, d)


def lindbladian_to_json(L: Lindbladian) -> dict:
    out = {"dim": L.dim,
           "hamiltonian": matrix_to_json(L.hamiltonian),
           "jumps": [{"a": matrix_to_json(j.a), "rate": float(j.rate)}
                     for j in L.jumps]}
    if L.bilinear is not None:
        out["bilinear"] = {"ops": [matrix_to_json(a) for a in L.bilinear.ops],
                           "kossakowski": matrix_to_json(L.bilinear.kossakowski)}
    return out


def lindbladian_from_json(obj) -> Lindbladian:
    try:
        dim = int(obj["dim"])
        H = matrix_from_json(obj["hamiltonian"]) if "hamiltonian" in obj else None
        jumps = [JumpTerm(matrix_from_json(j["a"]), float(j["rate"]))
                 for j in obj.get("jumps", [])]
        bil = None
        if obj.get("bilinear") is not None:
            b = obj["bilinear"]
            bil = BilinearTerm([matrix_from_json(m) for m in b["ops"]],
                               matrix_from_json(b["kossakowski"]))
    except (TypeError, KeyError) as exc:
        raise SchemaError(f"Lindbladian object missing field: {exc}") from exc
    return Lindbladian(dim, hamiltonian=H, jumps=jumps, bilinear=bil)


def resource_set_to_json(S: ResourceSet) -> dict:
    return {"dim": S.dim,
            "elements": [matrix_to_json(e) for e in S.elements],
            "adjoint_closed": S.adjoint_closed}


def resource_set_from_json(obj) -> ResourceSet:
    try:
        return ResourceSet(dim=int(obj["dim"]),
                           elements=[matrix_from_json(e) for e in obj["elements"]],
                           adjoint_closed=bool(obj.get("adjoint_closed", False)))
    except (TypeError, KeyError) as exc:
        raise SchemaError(f"ResourceSet object missing field: {exc}") from exc


def resource_set_k_to_json(K: ResourceSetK) -> dict:
    return {"generators": [lindbladian_to_json(L) for L in K.generators],
            "cone_combinations": K.cone_combinations,
            "max_total_rate": K.max_total_rate}


def resource_set_k_from_json(obj) -> ResourceSetK:
    try:
        return ResourceSetK(
            generators=[lindbladian_from_json(L) for L in obj["generators"]],
            cone_combinations=bool(obj.get("cone_combinations", False)),
            max_total_rate=float(obj.get("max_total_rate", 1.0)))
    except (TypeError, KeyError) as exc:
        raise SchemaError(f"ResourceSetK object missing field: {exc}") from exc


def step_to_json(step) -> dict:
    if isinstance(step, ApplyUnitary):
        return {"kind": "unitary", "U": matrix_to_json(step.U)}
    if isinstance(step, AmplitudeDamp):
        return {"kind": "amplitude_damp", "register": int(step.register),
                "retention": float(step.retention)}
    if isinstance(step, Transposition):
        return {"kind": "transposition", "i": int(step.i), "j": int(step.j),
                "sparse_adjacent": bool(step.sparse_adjacent)}
    if isinstance(step, DephaseDiagonal):
        return {"kind": "dephase", "registers": [int(r) for r in step.registers]}
    raise SchemaError(f"unknown plan step {step!r}")


def step_from_json(obj):
    kind = obj.get("kind")
    try:
        if kind == "unitary":
            return ApplyUnitary(matrix_from_json(obj["U"]))
        if kind == "amplitude_damp":
            return AmplitudeDamp(int(obj["register"]), float(obj["retention"]))
        if kind == "transposition":
            return Transposition(int(obj["i"]), int(obj["j"]),
                                 bool(obj.get("sparse_adjacent", False)))
        if kind == "dephase":
            return DephaseDiagonal([int(r) for r in obj["registers"]])
    except (TypeError, KeyError) as exc:
        raise SchemaError(f"plan step missing field: {exc}") from exc
    raise SchemaError(f"unknown plan step kind {kind!r}")


def plan_to_json(plan: TransportPlan) -> dict:
    return {"k": plan.k,
            "steps": [step_to_json(s) for s in plan.steps],
            "counts": plan.counts}


def plan_from_json(obj) -> TransportPlan:
    try:
        plan = TransportPlan(int(obj["k"]))
        plan.steps.extend(step_from_json(s) for s in obj["steps"])
    except (TypeError, KeyError) as exc:
        raise SchemaError(f"plan object missing field: {exc}") from exc
    return plan


def path_sample_to_json(path: PathSample) -> dict:
    out = {"times": [float(t) for t in path.times],
           "states": [matrix_to_json(s) for s in path.states]}
    if path.derivs is not None:
        out["derivs"] = [matrix_to_json(x) for x in path.derivs]
    return out


def path_sample_from_json(obj) -> PathSample:
    try:
        return PathSample(
            times=np.array([float(t) for t in obj["times"]]),
            states=[matrix_from_json(s) for s in obj["states"]],
            derivs=[matrix_from_json(x) for x in obj["derivs"]]
            if obj.get("derivs") is not None else None)
    except (TypeError, KeyError) as exc:
        raise SchemaError(f"path sample missing field: {exc}") from exc


def load_json(path: str):
    """Parse a JSON file, reporting the byte offset on malformed input."""
    with open(path, "rb") as fh:
        raw = fh.read()
    try:
        return json.loads(raw)
    except json.JSONDecodeError as exc:
        raise SchemaError(
            f"malformed JSON in {path} at byte offset {exc.pos}: {exc.msg}"
        ) from exc


def dump_json(obj, path: str | None = None) -> str:
    text = json.dumps(obj, indent=2, sort_keys=True)
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    return text
