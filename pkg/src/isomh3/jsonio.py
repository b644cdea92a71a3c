"""JSON encoding of the package's objects.

Floats are written with 17 significant digits, which round-trips every
double exactly, so ``emit(parse(emit(x))) == emit(x)``.  Matrices are
row-major with complex entries as ``[re, im]`` pairs.
"""

from __future__ import annotations

import enum
import json
import math

import numpy as np

from .lie_core import ExtIsom
from .path_connect import PathResult, Status
from .rep_variety import Representation, SWInvariants


class MalformedInput(ValueError):
    """Input that does not parse or does not match the expected schema."""


# -- emitter ------------------------------------------------------------------

def _float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    # -0.0 would parse back as the integer 0, so it is written as 0
    return format(x + 0.0, ".17g")


def _depth(v) -> int:
    """Nesting depth of a dict-free list; large for anything containing a dict."""
    if isinstance(v, dict):
        return 99
    if isinstance(v, (list, tuple)):
        return 1 + max((_depth(x) for x in v), default=0)
    return 0


def _emit(v, indent: int, level: int) -> str:
    if isinstance(v, enum.Enum):
        v = v.value
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if v is None:
        return "null"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return _float(float(v))
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, np.ndarray):
        v = v.tolist()
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(v, dict):
        if not v:
            return "{}"
        items = [f"{json.dumps(str(k))}: {_emit(x, indent, level + 1)}" for k, x in v.items()]
        return "{\n" + ",\n".join(pad + s for s in items) + "\n" + end + "}"
    if isinstance(v, (list, tuple)):
        parts = [_emit(x, indent, level + 1) for x in v]
        if _depth(v) <= 3:
            # numeric rows and whole matrices stay on one line
            return "[" + ", ".join(parts) + "]"
        return "[\n" + ",\n".join(pad + s for s in parts) + "\n" + end + "]"
    raise TypeError(f"cannot encode {type(v).__name__}")


def emit(obj, indent: int = 2) -> str:
    """Serialize plain data (dicts, lists, numbers, strings) to JSON text."""
    return _emit(obj, indent, 0) + "\n"


def parse(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise MalformedInput(f"invalid JSON: {err}") from None


# -- object encoders ----------------------------------------------------------

def complex_to_json(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def complex_from_json(v) -> complex:
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(v)
    if (isinstance(v, list) and len(v) == 2
            and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in v)):
        return complex(v[0], v[1])
    raise MalformedInput(f"expected a number or [re, im], got {v!r}")


def mat_to_json(m) -> list:
    m = np.asarray(m, dtype=complex)
    return [[complex_to_json(z) for z in row] for row in m]


def mat_from_json(v) -> np.ndarray:
    if not (isinstance(v, list) and len(v) == 2
            and all(isinstance(r, list) and len(r) == 2 for r in v)):
        raise MalformedInput("a matrix is [[z, z], [z, z]] with z = [re, im]")
    return np.array([[complex_from_json(z) for z in row] for row in v], dtype=complex)


def _field(obj, key):
    if not isinstance(obj, dict) or key not in obj:
        raise MalformedInput(f"missing field {key!r}")
    return obj[key]


def ext_to_json(a: ExtIsom) -> dict:
    return {"m": mat_to_json(a.m), "eps": a.eps}


def ext_from_json(v) -> ExtIsom:
    eps = _field(v, "eps")
    if eps not in (1, -1) or isinstance(eps, bool):
        raise MalformedInput(f"eps must be 1 or -1, got {eps!r}")
    try:
        return ExtIsom(mat_from_json(_field(v, "m")), eps)
    except MalformedInput:
        raise
    except Exception as err:   # e.g. a singular matrix
        raise MalformedInput(str(err)) from None


def rep_to_json(rep: Representation) -> dict:
    return {"genus": rep.genus, "gens": [ext_to_json(g) for g in rep.gens]}


def rep_from_json(v) -> Representation:
    gens = _field(v, "gens")
    if not isinstance(gens, list) or not gens:
        raise MalformedInput("gens must be a non-empty list")
    genus = v.get("genus", len(gens))
    if genus != len(gens):
        raise MalformedInput(f"genus {genus} does not match {len(gens)} generators")
    return Representation(tuple(ext_from_json(g) for g in gens))


def sw_to_json(inv: SWInvariants | None):
    if inv is None:
        return None
    return {"w1": list(inv.w1), "w2": inv.w2}


def sw_from_json(v) -> SWInvariants | None:
    if v is None:
        return None
    return SWInvariants(tuple(_field(v, "w1")), _field(v, "w2"))


def path_to_json(res: PathResult, thin: int = 1) -> dict:
    """PathResult document; ``thin = m`` keeps every m-th node plus the last."""
    if thin < 1:
        raise ValueError("thin must be positive")
    keep = list(range(0, len(res.nodes), thin))
    if res.nodes and keep[-1] != len(res.nodes) - 1:
        keep.append(len(res.nodes) - 1)
    return {
        "status": res.status.value,
        "message": res.message,
        "max_relator_residual": res.max_relator_residual,
        "max_step": res.max_step,
        "node_count": len(res.nodes),
        "thin": thin,
        "invariant_log": [sw_to_json(res.invariant_log[i]) for i in keep],
        "nodes": [rep_to_json(res.nodes[i]) for i in keep],
    }


def path_from_json(v) -> tuple[PathResult, int]:
    """Parse a PathResult document; returns the result and its thinning factor."""
    raw = _field(v, "status")
    try:
        status = Status(raw)
    except ValueError:
        raise MalformedInput(f"unknown status {raw!r}") from None
    nodes = _field(v, "nodes")
    if not isinstance(nodes, list):
        raise MalformedInput("nodes must be a list")
    log = v.get("invariant_log") or [None] * len(nodes)
    res = PathResult(
        nodes=[rep_from_json(n) for n in nodes],
        max_relator_residual=float(_field(v, "max_relator_residual")),
        max_step=float(_field(v, "max_step")),
        invariant_log=[sw_from_json(x) for x in log],
        status=status,
        message=str(v.get("message", "")),
    )
    thin = v.get("thin", 1)
    if not isinstance(thin, int) or thin < 1:
        raise MalformedInput("thin must be a positive integer")
    return res, thin
