"""JSON file formats. Complex numbers are stored as explicit [re, im] pairs."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .circuits import CircuitProgram, GateOp, MeasureOp
from .errors import ValidationError
from .frames import MicPovmFrame, build_mic_from_effects


def complex_to_pairs(array):
    a = np.asarray(array, dtype=complex)
    return np.stack([a.real, a.imag], axis=-1).tolist()


def pairs_to_complex(data):
    a = np.asarray(data, dtype=float)
    if a.shape[-1] != 2:
        raise ValidationError("complex entries must be [re, im] pairs")
    return a[..., 0] + 1j * a[..., 1]


def load_json(path):
    return json.loads(Path(path).read_text())


def dump_json(obj, path):
    Path(path).write_text(json.dumps(obj, indent=1, sort_keys=True) + "\n")


def frame_to_obj(frame):
    return {"dim": frame.dim, "effects": complex_to_pairs(frame.effects)}


def frame_from_obj(obj, tol=1e-9):
    if not isinstance(obj, dict) or "effects" not in obj:
        raise ValidationError("frame object needs an 'effects' field")
    effects = pairs_to_complex(obj["effects"])
    frame = build_mic_from_effects(effects, tol=tol)
    if "dim" in obj and int(obj["dim"]) != frame.dim:
        raise ValidationError(
            f"declared dim {obj['dim']} does not match effects of dim {frame.dim}")
    return frame


def resolve_frame(spec, tol=1e-9):
    """Frame from an inline object or a path to a frame file."""
    if isinstance(spec, (str, Path)):
        return frame_from_obj(load_json(spec), tol=tol)
    return frame_from_obj(spec, tol=tol)


def state_to_obj(pv):
    return {"frame": frame_to_obj(pv.frame), "p": pv.p.tolist()}


def operator_to_obj(op, frame=None):
    obj = {"rho": complex_to_pairs(op)}
    if frame is not None:
        obj["frame"] = frame_to_obj(frame)
    return obj


def matrix_to_obj(matrix):
    return np.asarray(matrix, dtype=float).tolist()


def program_to_obj(program):
    ops = []
    for op in program.ops:
        if isinstance(op, GateOp):
            entry = {"targets": list(op.targets)}
            if op.name:
                entry["gate"] = op.name
            else:
                entry["gate"] = "u"
                entry["unitary"] = complex_to_pairs(op.unitary)
            ops.append(entry)
        else:
            ops.append({"measure": list(op.targets)})
    return {"n": program.n, "ops": ops}


def program_from_obj(obj):
    if "n" not in obj or "ops" not in obj:
        raise ValidationError("circuit object needs 'n' and 'ops' fields")
    ops = []
    for entry in obj["ops"]:
        if "measure" in entry:
            ops.append(MeasureOp(tuple(int(t) for t in entry["measure"])))
            continue
        if "gate" not in entry:
            raise ValidationError(f"instruction {entry!r} has neither gate nor measure")
        targets = tuple(int(t) for t in entry.get("targets", ()))
        name = str(entry["gate"]).lower()
        if "unitary" in entry:
            ops.append(GateOp(targets, unitary=pairs_to_complex(entry["unitary"])))
        else:
            ops.append(GateOp(targets, name=name))
    return CircuitProgram(int(obj["n"]), tuple(ops))


def format_float(x):
    """Fixed 17-significant-digit formatting for reproducible CSV output."""
    return f"{float(x):.17g}"


def write_csv(path, header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(
            format_float(v) if isinstance(v, float) else str(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")
