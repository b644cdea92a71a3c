"""Conjugacy normal forms in SL(2,C) and the types of orientation-reversing isometries."""

from __future__ import annotations

import cmath
import enum
from dataclasses import dataclass

import numpy as np

from .errors import ClassificationAmbiguous, DegenerateInput, NotInMinusComponent
from .lie_core import ID, ExtIsom, as_mat, det2, fnorm, inv2

NF_TOL = 1e-8


class Kind(str, enum.Enum):
    DIAGONAL = "Diagonal"
    PARABOLIC_PLUS = "ParabolicPlus"
    PARABOLIC_MINUS = "ParabolicMinus"
    IDENTITY = "Identity"
    MINUS_IDENTITY = "MinusIdentity"


class MinusType(str, enum.Enum):
    HYPERBOLIC_GLIDE = "HyperbolicGlide"
    ROTATORY_REFLECTION = "RotatoryReflection"
    PARABOLIC_REFLECTION = "ParabolicReflection"
    REFLECTION = "Reflection"
    POINT_INVERSION = "PointInversion"


@dataclass(frozen=True, eq=False)
class NormalForm:
    """``conjugator @ b @ inv(conjugator) == matrix`` for the input ``b``."""

    kind: Kind
    conjugator: np.ndarray
    lam: complex | None = None

    @property
    def matrix(self) -> np.ndarray:
        if self.kind is Kind.DIAGONAL:
            return np.diag([self.lam, 1 / self.lam]).astype(complex)
        if self.kind is Kind.PARABOLIC_PLUS:
            return np.array([[1, 1], [0, 1]], dtype=complex)
        if self.kind is Kind.PARABOLIC_MINUS:
            return np.array([[-1, 1], [0, -1]], dtype=complex)
        if self.kind is Kind.IDENTITY:
            return ID.copy()
        return -ID


def canonical_eigenvalue(t: complex, tol: float = 1e-9) -> complex:
    """Root of ``x^2 - t x + 1`` with ``|x| >= 1``; on the unit circle, ``Im x >= 0``."""
    r = cmath.sqrt(t * t - 4)
    lam, mu = (t + r) / 2, (t - r) / 2
    if abs(abs(lam) - abs(mu)) <= tol * max(1.0, abs(lam)):
        # unit-modulus pair; compare imaginary parts instead of noisy moduli
        return lam if lam.imag >= mu.imag else mu
    return lam if abs(lam) > abs(mu) else mu


def normalize_vector(v: np.ndarray) -> np.ndarray:
    """Unit Euclidean norm with the first non-negligible coordinate real positive."""
    v = v / np.linalg.norm(v)
    k = 0 if abs(v[0]) > 1e-12 else 1
    return v * (abs(v[k]) / v[k])


def eigenvector(b: np.ndarray, lam: complex) -> np.ndarray:
    n = b - lam * ID
    # null vector of the rank-one matrix n, taken from its better-conditioned row
    r0 = np.array([n[0, 1], -n[0, 0]])
    r1 = np.array([n[1, 1], -n[1, 0]])
    v = r0 if np.linalg.norm(r0) >= np.linalg.norm(r1) else r1
    return normalize_vector(v)


def _unimodular(p: np.ndarray) -> np.ndarray:
    d = det2(p)
    if abs(d) < 1e-14:
        raise DegenerateInput("eigenbasis is singular")
    return p / cmath.sqrt(d)


def normal_form(b, tol: float = NF_TOL) -> NormalForm:
    b = as_mat(b)
    if fnorm(b - ID) <= tol:
        return NormalForm(Kind.IDENTITY, ID.copy())
    if fnorm(b + ID) <= tol:
        return NormalForm(Kind.MINUS_IDENTITY, ID.copy())
    t = b[0, 0] + b[1, 1]
    for sign, kind in ((1, Kind.PARABOLIC_PLUS), (-1, Kind.PARABOLIC_MINUS)):
        if abs(t - 2 * sign) <= tol:
            v = eigenvector(b, sign)
            # generalized eigenvector: (b - sign Id) w = v
            w = np.linalg.lstsq(b - sign * ID, v, rcond=None)[0]
            p = _unimodular(np.column_stack([v, w]))
            return NormalForm(kind, inv2(p))
    lam = canonical_eigenvalue(t)
    v1 = eigenvector(b, lam)
    v2 = eigenvector(b, 1 / lam)
    p = _unimodular(np.column_stack([v1, v2]))
    return NormalForm(Kind.DIAGONAL, inv2(p), lam)


def classify_minus(a: ExtIsom, tol: float = NF_TOL) -> MinusType:
    """Type of an orientation-reversing isometry, read off from its square."""
    from .square_map import q

    if a.eps != -1:
        raise NotInMinusComponent("classify_minus needs an orientation-reversing element")
    b = q(a)
    scale = max(1.0, fnorm(b))
    if fnorm(b - ID) <= tol * scale:
        return MinusType.REFLECTION
    if fnorm(b + ID) <= tol * scale:
        return MinusType.POINT_INVERSION
    t = b[0, 0] + b[1, 1]
    if abs(t.imag) > 1e-6 * scale:
        raise ClassificationAmbiguous(f"square has non-real trace {t!r}")
    t = t.real
    if abs(t - 2) <= tol * scale:
        return MinusType.PARABOLIC_REFLECTION
    if t > 2:
        return MinusType.HYPERBOLIC_GLIDE
    if t > -2:
        return MinusType.ROTATORY_REFLECTION
    raise ClassificationAmbiguous(f"square has trace {t!r} <= -2")
