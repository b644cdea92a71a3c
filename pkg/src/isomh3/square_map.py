"""The square map Q: G -> SL(2,C), its image, fibers, square roots and differential.

For an orientation-reversing element ``A_c`` the square is ``A . conj(A)``;
for an orientation-preserving ``[A]`` it is ``A . A``.  Either way the result
does not depend on the sign of the representative, so ``Q`` lands honestly
in SL(2,C).
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .classify import Kind, NormalForm, normal_form
from .errors import EmptyFiber, TraceMinusTwo
from .lie_core import (
    CONJ6, ID, REFL, ROT, ExtIsom, ad_real6, conj_by, fnorm, inv2,
    sl_geodesic, unit_mat,
)

RANK_TOL = 1e-7


def q_mat(m: np.ndarray, eps: int) -> np.ndarray:
    return m @ (m.conj() if eps == -1 else m)


def q(a: ExtIsom) -> np.ndarray:
    return q_mat(a.m, a.eps)


def trace(m: np.ndarray) -> complex:
    return m[0, 0] + m[1, 1]


def in_image(b, tol: float = 1e-9) -> bool:
    """Whether ``b`` is a square of some orientation-reversing isometry."""
    b = np.asarray(b, dtype=complex)
    scale = max(1.0, fnorm(b))
    if fnorm(b + ID) <= tol * scale:
        return True
    t = trace(b)
    return abs(t.imag) <= tol * scale and t.real > -2 + tol


def in_j0(b, tol: float = 1e-9) -> bool:
    """Image of the square map with both +-Id removed."""
    b = np.asarray(b, dtype=complex)
    scale = max(1.0, fnorm(b))
    if fnorm(b - ID) <= tol * scale or fnorm(b + ID) <= tol * scale:
        return False
    return in_image(b, tol)


class FiberCase(str, enum.Enum):
    HYP_CIRCLE = "HypCircle"
    ELL_LINE = "EllLine"
    PAR_LINE = "ParLine"
    REFL_ORBIT = "ReflOrbit"
    INV_ORBIT = "InvOrbit"
    EMPTY = "Empty"


_DIMS = {
    FiberCase.HYP_CIRCLE: 1, FiberCase.ELL_LINE: 1, FiberCase.PAR_LINE: 1,
    FiberCase.REFL_ORBIT: 3, FiberCase.INV_ORBIT: 3, FiberCase.EMPTY: 0,
}


@dataclass(frozen=True, eq=False)
class FiberDescription:
    """Parametrized preimage of ``target`` under Q restricted to G_-.

    ``conjugator @ target @ inv(conjugator)`` is the normal form in which the
    fiber is written down; ``params`` holds ``lam`` or ``theta`` when relevant.
    """

    case: FiberCase
    conjugator: np.ndarray
    target: np.ndarray
    params: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return _DIMS[self.case]


def fiber(b, tol: float = 1e-8) -> FiberDescription:
    b = unit_mat(b)
    if not in_image(b, tol):
        return FiberDescription(FiberCase.EMPTY, ID.copy(), b)
    nf = normal_form(b, tol)
    if nf.kind is Kind.IDENTITY:
        return FiberDescription(FiberCase.REFL_ORBIT, nf.conjugator, b)
    if nf.kind is Kind.MINUS_IDENTITY:
        return FiberDescription(FiberCase.INV_ORBIT, nf.conjugator, b)
    if nf.kind is Kind.PARABOLIC_PLUS:
        return FiberDescription(FiberCase.PAR_LINE, nf.conjugator, b)
    if nf.kind is Kind.PARABOLIC_MINUS:
        return FiberDescription(FiberCase.EMPTY, ID.copy(), b)
    t = trace(b).real
    if t > 2:
        return FiberDescription(FiberCase.HYP_CIRCLE, nf.conjugator, b,
                                {"lam": abs(nf.lam)})
    return FiberDescription(FiberCase.ELL_LINE, nf.conjugator, b,
                            {"theta": cmath.phase(nf.lam)})


def _normal_point(f: FiberDescription, param) -> np.ndarray:
    """Fiber point in normal-form coordinates (matrix part, eps = -1)."""
    if f.case is FiberCase.HYP_CIRCLE:
        a = math.sqrt(f.params["lam"]) * cmath.exp(1j * param)
        return np.diag([a, 1 / a])
    if f.case is FiberCase.ELL_LINE:
        u = param * cmath.exp(0.5j * (f.params["theta"] + math.pi))
        return np.array([[0, u], [-1 / u, 0]])
    if f.case is FiberCase.PAR_LINE:
        return np.array([[1, 0.5 + 1j * param], [0, 1]])
    h = np.asarray(param, dtype=complex)
    base = REFL if f.case is FiberCase.REFL_ORBIT else ROT
    return conj_by(h, ExtIsom(base, -1)).m


def fiber_point(f: FiberDescription, param) -> ExtIsom:
    """Point of the fiber at parameter ``param``.

    ``param`` is the angle ``t`` (HypCircle), the modulus ``rho > 0``
    (EllLine), the imaginary part ``s`` (ParLine) or a conjugating matrix
    ``h`` in SL(2,C) (the two orbit cases).
    """
    if f.case is FiberCase.EMPTY:
        raise EmptyFiber("fiber is empty")
    a = ExtIsom(_normal_point(f, param), -1)
    return conj_by(inv2(f.conjugator), a)


def default_param(f: FiberDescription):
    """The minimal-parameter point (t = 0, rho = 1, s = 0, h = Id)."""
    if f.case is FiberCase.ELL_LINE:
        return 1.0
    if f.case in (FiberCase.REFL_ORBIT, FiberCase.INV_ORBIT):
        return ID.copy()
    return 0.0


def orbit_conjugator(a: np.ndarray, inversion: bool) -> np.ndarray:
    """``h`` with ``conj_by(h, base) = +-a`` for ``a`` squaring to +-Id.

    The base point is ``REFL`` (reflections) or ``ROT`` (point inversions).
    """
    base = ExtIsom(ROT if inversion else REFL, -1)
    probes = [ID, np.array([[1, 0], [1, 1]], dtype=complex),
              np.array([[1, 1], [0, 1]], dtype=complex),
              np.array([[1, 1j], [0, 1]], dtype=complex)]
    for k in probes:
        # work with a' = k a conj(k)^-1, then undo k
        ap = k @ a @ inv2(k).conj()
        # reflections need Im a'_01 > 0, inversions need a'_01 < 0
        key = -ap[0, 1].real if inversion else ap[0, 1].imag
        if abs(key) < 1e-3:
            continue
        if key < 0:
            ap = -ap
            key = -key
        alpha = math.sqrt(key)
        if inversion:
            gamma = np.conj(ap[0, 0]) / alpha
        else:
            gamma = -1j * np.conj(ap[0, 0]) / alpha
        h = np.array([[alpha, 0], [gamma, 1 / alpha]], dtype=complex)
        h = inv2(k) @ h
        if fnorm(conj_by(h, base).m - a) > 1e-6 * max(1.0, fnorm(a)) and \
                fnorm(conj_by(h, base).m + a) > 1e-6 * max(1.0, fnorm(a)):
            continue
        return h
    raise EmptyFiber("point is not on the requested orbit")


def fiber_param(f: FiberDescription, a: ExtIsom):
    """Inverse of :func:`fiber_point` for a point known to lie on the fiber."""
    an = conj_by(f.conjugator, a).m
    if f.case is FiberCase.HYP_CIRCLE:
        return cmath.phase(an[0, 0])
    if f.case is FiberCase.ELL_LINE:
        return abs(an[0, 1])
    if f.case is FiberCase.PAR_LINE:
        if an[0, 0].real < 0:
            an = -an
        return an[0, 1].imag
    if f.case is FiberCase.EMPTY:
        raise EmptyFiber("fiber is empty")
    return orbit_conjugator(an, f.case is FiberCase.INV_ORBIT)


def fiber_path(f: FiberDescription, a0: ExtIsom, a1: ExtIsom):
    """Path ``t -> point`` inside the fiber from ``a0`` (t=0) to ``a1`` (t=1)."""
    p0, p1 = fiber_param(f, a0), fiber_param(f, a1)
    if f.case is FiberCase.HYP_CIRCLE:
        # the angle is only defined mod pi on PSL
        d = (p1 - p0 + math.pi / 2) % math.pi - math.pi / 2
        return lambda t: fiber_point(f, p0 + t * d)
    if f.case is FiberCase.ELL_LINE:
        l0, l1 = math.log(p0), math.log(p1)
        return lambda t: fiber_point(f, math.exp(l0 + t * (l1 - l0)))
    if f.case is FiberCase.PAR_LINE:
        return lambda t: fiber_point(f, p0 + t * (p1 - p0))
    geo = sl_geodesic(p0, p1)
    return lambda t: fiber_point(f, geo(t))


def fiber_sample(f: FiberDescription, n: int, rng: np.random.Generator) -> list[ExtIsom]:
    if f.case is FiberCase.EMPTY:
        raise EmptyFiber("cannot sample an empty fiber")
    out = []
    for _ in range(n):
        if f.case is FiberCase.HYP_CIRCLE:
            p = rng.uniform(0, 2 * math.pi)
        elif f.case is FiberCase.ELL_LINE:
            p = math.exp(rng.uniform(-2, 2))
        elif f.case is FiberCase.PAR_LINE:
            p = rng.uniform(-5, 5)
        else:
            p = random_sl2(rng)
        out.append(fiber_point(f, p))
    return out


def fiber_contains(f: FiberDescription, a: ExtIsom, tol: float = 1e-8) -> bool:
    if f.case is FiberCase.EMPTY or a.eps != -1:
        return False
    return fnorm(q(a) - f.target) <= tol * max(1.0, fnorm(f.target))


def random_sl2(rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    """Standard complex Gaussian entries, normalized to determinant one."""
    while True:
        m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        if abs(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]) > 1e-3:
            return unit_mat(m)


def proj_fiber_components(nf: NormalForm) -> int:
    """Components of the preimage of the PSL class of ``nf`` in G_-."""
    if nf.kind in (Kind.IDENTITY, Kind.MINUS_IDENTITY):
        return 2
    if nf.kind is Kind.DIAGONAL:
        lam = nf.lam
        if abs(abs(lam) - 1) < 1e-9 and abs(lam.imag) > 1e-9:
            return 2
    return 1


# -- orientation-preserving square roots ----------------------------------

def sqrt_plus(b, tol: float = 1e-9) -> ExtIsom:
    """The unique orientation-preserving square root off the trace -2 locus."""
    b = unit_mat(b)
    s = trace(b) + 2
    if abs(s) <= tol:
        raise TraceMinusTwo("trace is -2; no continuous square root in G_+")
    return ExtIsom((b + ID) / cmath.sqrt(s), 1)


def fiber_minus_id_plus(n: int, rng: np.random.Generator) -> list[ExtIsom]:
    """Samples of the orientation-preserving square roots of ``-Id``."""
    rot = ExtIsom(ROT, 1)
    return [conj_by(random_sl2(rng), rot) for _ in range(n)]


# -- differential ----------------------------------------------------------

def dq_matrix(a: ExtIsom) -> np.ndarray:
    """Real 6x6 matrix of ``xi -> Ad(A) xi + conj(xi)``.

    This is the differential of Q at ``A_c`` read through the chart
    ``conj(xi) -> exp(conj(xi)) A`` with the output right-translated back
    to the Lie algebra; it has the same rank as dQ.
    """
    return ad_real6(a.m) + CONJ6


def numerical_rank(j: np.ndarray, tol: float = RANK_TOL) -> int:
    s = np.linalg.svd(j, compute_uv=False)
    if s[0] == 0:
        return 0
    return int(np.sum(s >= tol * s[0]))


def dq_rank(a: ExtIsom, tol: float = RANK_TOL) -> int:
    return numerical_rank(dq_matrix(a), tol)


def prod_regular(elems, tol: float = 1e-9) -> bool:
    """Regular-point test for ``(A_1..A_n) -> Q(A_1) ... Q(A_n)``."""
    qs = [q(a) for a in elems]
    trs = [trace(x).real for x in qs]
    for i in range(len(qs)):
        for j in range(i + 1, len(qs)):
            x, y = qs[i], qs[j]
            if fnorm(x @ y - y @ x) > tol * max(1.0, fnorm(x) * fnorm(y)):
                return True
            if (trs[i] - 2) * (trs[j] - 2) < -tol:
                return True
    return False
