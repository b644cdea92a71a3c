"""Trace coordinates on pairs in SL(2,C) and the commutator polynomial."""

from __future__ import annotations

import enum
from typing import NamedTuple

import numpy as np

from .lie_core import ID, exp_sl, fnorm, from_real6, inv2

FD_STEP = 1e-6


class TraceCoords(NamedTuple):
    x: complex
    y: complex
    z: complex

    def real6(self) -> np.ndarray:
        v = np.array(self, dtype=complex)
        return np.concatenate([v.real, v.imag])


class Component(str, enum.Enum):
    PLUS_ID = "PlusId"
    MINUS_ID = "MinusId"


def chi(a, b) -> TraceCoords:
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    return TraceCoords(complex(np.trace(a)), complex(np.trace(b)), complex(np.trace(a @ b)))


def kappa(t) -> complex:
    x, y, z = t
    return x * x + y * y + z * z - x * y * z - 2


def commutator(a, b) -> np.ndarray:
    return a @ b @ inv2(a) @ inv2(b)


def dchi_real(a, b, h: float = FD_STEP) -> np.ndarray:
    """6 x 12 real Jacobian of chi under ``(A, B) -> (exp(xi) A, exp(eta) B)``.

    Central finite differences, one column per real Lie-algebra direction.
    """
    cols = []
    for which in (0, 1):
        for k in range(6):
            e = np.zeros(6)
            e[k] = h
            xi = from_real6(e)
            ep, em = exp_sl(xi), exp_sl(-xi)
            if which == 0:
                up, dn = chi(ep @ a, b), chi(em @ a, b)
            else:
                up, dn = chi(a, ep @ b), chi(a, em @ b)
            cols.append((up.real6() - dn.real6()) / (2 * h))
    return np.column_stack(cols)


def dchi_surjective(a, b, tol: float = 1e-6) -> bool:
    j = dchi_real(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))
    s = np.linalg.svd(j, compute_uv=False)
    return bool(s[5] > tol * max(1.0, s[0]))


def commute(a, b, tol: float = 1e-6) -> bool:
    return fnorm(commutator(a, b) - ID) <= tol


def plan_target(component: Component | str, rng: np.random.Generator,
                guard: float = 0.1) -> TraceCoords:
    """Random real trace target for the +Id or -Id relator component."""
    component = Component(component)
    while True:
        x, y = rng.uniform(-1.9, 10.0, size=2)
        if component is Component.PLUS_ID:
            z = rng.uniform(-1.9, 10.0)
        else:
            z = rng.uniform(-10.0, -2.1)
        t = TraceCoords(complex(x), complex(y), complex(z))
        if abs(kappa(t) - 2) >= guard:
            return t
