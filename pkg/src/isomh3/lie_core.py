"""Arithmetic in SL(2,C), PSL(2,C) and the extended group G = PSL(2,C) x| Z/2.

Matrices are plain ``numpy`` arrays of shape ``(2, 2)`` and dtype
``complex128``.  An element of the full isometry group is an
:class:`ExtIsom`: a unit-determinant matrix together with an orientation
bit ``eps``.  ``eps = -1`` means "complex conjugation first, then the
Moebius map of ``m``", so that

    (M, e) o (N, d) = (M . s(N), e d),   s(N) = N if e = +1 else conj(N).

Lie algebra elements of sl(2,C) are stored as length-3 complex vectors
``(x1, x2, x3)`` standing for ``[[x3, x1], [x2, -x3]]``.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInput

DEFAULT_TOL = 1e-9
MIN_DET = 1e-12

ID = np.eye(2, dtype=complex)
ROT = np.array([[0, -1], [1, 0]], dtype=complex)     # squares to -Id
REFL = np.array([[0, 1j], [1j, 0]], dtype=complex)   # REFL . conj(REFL) = Id

# real-6 form of xi -> conj(xi)
CONJ6 = np.diag([1.0, 1.0, 1.0, -1.0, -1.0, -1.0])


def as_mat(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.shape != (2, 2):
        raise DegenerateInput(f"expected a 2x2 matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DegenerateInput("matrix has non-finite entries")
    return a


def det2(m: np.ndarray) -> complex:
    return m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]


def inv2(m: np.ndarray) -> np.ndarray:
    """Inverse of a determinant-one matrix (adjugate)."""
    return np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]])


def unit_mat(m, min_det: float = MIN_DET) -> np.ndarray:
    """Rescale ``m`` by ``1/sqrt(det m)`` (principal branch) into SL(2,C)."""
    a = as_mat(m)
    d = det2(a)
    if abs(d) < min_det:
        raise DegenerateInput(f"determinant {d!r} too small to normalize")
    if d == 1:
        return a.copy()
    return a / cmath.sqrt(d)


def fnorm(m: np.ndarray) -> float:
    return float(np.sqrt(np.sum(np.abs(m) ** 2)))


def sl_dist(m: np.ndarray, n: np.ndarray) -> float:
    """Sign-insensitive Frobenius distance between two SL lifts."""
    return min(fnorm(m - n), fnorm(m + n))


@dataclass(frozen=True, eq=False)
class ExtIsom:
    """Isometry of hyperbolic 3-space: matrix representative and orientation bit."""

    m: np.ndarray
    eps: int = 1

    def __post_init__(self):
        if self.eps not in (1, -1):
            raise ValueError(f"eps must be +1 or -1, got {self.eps!r}")
        object.__setattr__(self, "m", unit_mat(self.m))

    @property
    def orientable(self) -> bool:
        return self.eps == 1

    def __matmul__(self, other: "ExtIsom") -> "ExtIsom":
        return compose(self, other)

    def inverse(self) -> "ExtIsom":
        inv = inv2(self.m)
        return ExtIsom(inv if self.eps == 1 else inv.conj(), self.eps)

    def __neg__(self) -> "ExtIsom":
        return ExtIsom(-self.m, self.eps)

    def __repr__(self):
        rows = "; ".join(", ".join(f"{z:.6g}" for z in row) for row in self.m)
        return f"ExtIsom([{rows}], eps={self.eps:+d})"


def _twist(m: np.ndarray, eps: int) -> np.ndarray:
    return m if eps == 1 else m.conj()


def compose(g: ExtIsom, h: ExtIsom) -> ExtIsom:
    """``g o h`` (h acts first)."""
    return ExtIsom(g.m @ _twist(h.m, g.eps), g.eps * h.eps)


def conj_by(g, a: ExtIsom) -> ExtIsom:
    """``g a g^-1`` for ``g`` in SL(2,C).

    Orientation-reversing elements transform by the twisted rule
    ``M -> g M conj(g)^-1``.
    """
    g = np.asarray(g, dtype=complex)
    return ExtIsom(g @ a.m @ _twist(inv2(g), a.eps), a.eps)


def psl_dist(a: ExtIsom, b: ExtIsom) -> float:
    if a.eps != b.eps:
        return float("inf")
    return sl_dist(a.m, b.m)


def psl_eq(a: ExtIsom, b: ExtIsom, tol: float = DEFAULT_TOL) -> bool:
    return a.eps == b.eps and sl_dist(a.m, b.m) <= tol * max(1.0, fnorm(a.m))


# -- Lie algebra -----------------------------------------------------------

def sl_to_mat(xi) -> np.ndarray:
    x1, x2, x3 = xi
    return np.array([[x3, x1], [x2, -x3]], dtype=complex)


def mat_to_sl(m: np.ndarray) -> np.ndarray:
    """Trace-free part of ``m`` as an sl(2,C) vector."""
    h = (m[0, 0] - m[1, 1]) / 2
    return np.array([m[0, 1], m[1, 0], h], dtype=complex)


def to_real6(xi) -> np.ndarray:
    xi = np.asarray(xi, dtype=complex)
    return np.concatenate([xi.real, xi.imag])


def from_real6(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return v[:3] + 1j * v[3:]


def ad_complex(x: np.ndarray) -> np.ndarray:
    """Complex 3x3 matrix of ``xi -> X xi X^-1`` in (x1, x2, x3) coordinates."""
    a, b, c, d = x[0, 0], x[0, 1], x[1, 0], x[1, 1]
    return np.array([
        [a * a, -b * b, -2 * a * b],
        [-c * c, d * d, 2 * c * d],
        [-a * c, b * d, a * d + b * c],
    ])


def realify(k: np.ndarray) -> np.ndarray:
    """Real 6x6 matrix of a complex-linear map in the to_real6 ordering."""
    return np.block([[k.real, -k.imag], [k.imag, k.real]])


def ad_real6(x: np.ndarray) -> np.ndarray:
    return realify(ad_complex(x))


def adjoint(x, xi) -> np.ndarray:
    """``X xi X^-1`` via the closed-form entry formulas."""
    x = np.asarray(x, dtype=complex)
    return ad_complex(x) @ np.asarray(xi, dtype=complex)


def exp_sl(xi) -> np.ndarray:
    """Exponential of a trace-free matrix, exact in closed form."""
    x1, x2, x3 = xi
    delta = x3 * x3 + x1 * x2          # xi^2 = delta * Id
    r = cmath.sqrt(delta)
    if abs(r) < 1e-6:
        ch = 1 + delta / 2 + delta * delta / 24
        sh = 1 + delta / 6 + delta * delta / 120
    else:
        ch = cmath.cosh(r)
        sh = cmath.sinh(r) / r
    return np.array([[ch + sh * x3, sh * x1], [sh * x2, ch - sh * x3]])


def log_sl(m: np.ndarray) -> np.ndarray:
    """Principal logarithm of an SL(2,C) matrix with ``Re tr >= 0``.

    Callers working in PSL flip the sign first (see :func:`psl_log`).
    """
    half = (m[0, 0] + m[1, 1]) / 2
    r = cmath.acosh(half)
    sh = cmath.sinh(r)
    f = 1 - r * r / 6 if abs(r) < 1e-6 else r / sh
    return f * mat_to_sl(m)


def psl_log(m: np.ndarray) -> np.ndarray:
    """Logarithm of the PSL class of ``m`` (sign chosen with Re tr >= 0)."""
    if (m[0, 0] + m[1, 1]).real < 0:
        m = -m
    return log_sl(m)


def sl_geodesic(m0: np.ndarray, m1: np.ndarray):
    """Return ``t -> exp(t X) m0`` with ``exp(X) m0 = +-m1``."""
    x = psl_log(m1 @ inv2(m0))

    def path(t: float) -> np.ndarray:
        return exp_sl(t * x) @ m0

    return path
