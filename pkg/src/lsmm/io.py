"""JSON/CSV formats. All floats are written with 17 significant digits."""

import csv
import json
import math

import numpy as np

from .errors import ModelFormatError, ValidationError
from .generator import InterpolationSpec
from .statespace import ReducedModel, StateSpace


def fmt(x):
    text = format(float(x), ".17g")
    # keep integral values (and -0) as floats on the way back in
    if text.lstrip("-").isdigit():
        text += ".0"
    return text


def _encode(obj, indent, level):
    pad = " " * (indent * (level + 1)) if indent else ""
    end = " " * (indent * level) if indent else ""
    sep = ",\n" if indent else ", "
    nl = "\n" if indent else ""
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{" + nl + sep.join(items) + nl + end + "}"
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (list, tuple, dict, np.ndarray)) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        return "[" + nl + sep.join(pad + _encode(v, indent, level + 1) for v in obj) + nl + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt(obj) if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps(obj, indent=2):
    """JSON text with canonical 17-significant-digit floats."""
    return _encode(obj, indent, 0) + "\n"


def model_to_dict(sys):
    if isinstance(sys, ReducedModel):
        return {"F": sys.F, "G": sys.G.ravel(), "H": sys.H.ravel()}
    return {"A": sys.A, "B": sys.B.ravel(), "C": sys.C.ravel()}


def model_from_dict(d, reduced=False):
    """Accepts ``{"A","B","C"}`` or ``{"F","G","H"}`` (extra keys are ignored)."""
    try:
        if "F" in d:
            F, G, H = d["F"], d["G"], d["H"]
            return ReducedModel(F, G, H) if reduced else StateSpace(F, G, H)
        A, B, C = d["A"], d["B"], d["C"]
    except (KeyError, TypeError) as exc:
        raise ModelFormatError(f"model JSON needs keys A, B, C (or F, G, H): {exc}") from exc
    try:
        return ReducedModel(A, B, C) if reduced else StateSpace(A, B, C)
    except (ValueError, TypeError) as exc:
        raise ModelFormatError(str(exc)) from exc


def spec_from_dict(d):
    try:
        pts = [(complex(float(p.get("re", 0.0)), float(p.get("im", 0.0))), int(p.get("order", 0)))
               for p in d["points"]]
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise ValidationError(f"spec JSON needs a 'points' list of {{re, im, order}}: {exc}") from exc
    return InterpolationSpec.from_points(pts, complete_conjugates=True)


def spec_to_dict(spec):
    return {"points": [{"re": s.real, "im": s.imag, "order": k} for s, k in spec.points]}


def load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc})") from exc


def write_json(path, obj):
    with open(path, "w") as fh:
        fh.write(dumps(obj))


def write_response_csv(path, resp):
    """``omega,re,im,abs`` per grid point."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["omega", "re", "im", "abs"])
        for om, v in zip(resp.grid, resp.values):
            v = complex(v)
            w.writerow([fmt(om), fmt(v.real), fmt(v.imag), fmt(abs(v))])


def read_response_csv(path):
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    grid = np.array([float(r["omega"]) for r in rows])
    vals = np.array([complex(float(r["re"]), float(r["im"])) for r in rows])
    return grid, vals


def write_timeseries_csv(path, t, e, e_pred):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "e", "e_ss_pred"])
        for row in zip(t, e, e_pred):
            w.writerow([fmt(x) for x in row])
