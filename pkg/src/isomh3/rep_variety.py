"""Representations of pi_1(N_k) = <a_1..a_k | a_1^2 ... a_k^2> into G.

A representation is a tuple of :class:`ExtIsom` generators whose squares
multiply to +-Id.  The product of the squares, computed honestly in
SL(2,C), is the *lifted relator*; its sign is the second Stiefel-Whitney
class and the orientation bits of the generators give the first.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import PerturbationFailed, RelatorViolated, SamplingExhausted
from .lie_core import (
    CONJ6, ID, ROT, ExtIsom, ad_real6, conj_by, exp_sl, fnorm, from_real6,
    inv2, log_sl, psl_dist, to_real6,
)
from .classify import Kind, normal_form
from .square_map import q, q_mat, sqrt_plus, fiber, fiber_sample
from .errors import DegenerateInput, EmptyFiber, TraceMinusTwo

CONSTRUCTION_TOL = 1e-10
ACCEPT_TOL = 1e-8
NODE_TOL = 1e-6
# rounding in the relator grows like prod |g_i|^2; bounding it keeps the
# construction tolerance attainable and the walk off the non-compact ends
SAMPLE_SIZE_CAP = 1e5

I6 = np.eye(6)


@dataclass(frozen=True, eq=False)
class Representation:
    gens: tuple

    def __post_init__(self):
        object.__setattr__(self, "gens", tuple(self.gens))
        if not self.gens:
            raise ValueError("a representation needs at least one generator")

    @property
    def genus(self) -> int:
        return len(self.gens)

    @property
    def eps(self) -> tuple:
        return tuple(g.eps for g in self.gens)

    def conjugate(self, g) -> "Representation":
        return Representation(tuple(conj_by(g, a) for a in self.gens))


class SWInvariants(NamedTuple):
    w1: tuple
    w2: int


def rep_distance(r0: Representation, r1: Representation) -> float:
    """Largest PSL distance between corresponding generators."""
    if r0.genus != r1.genus:
        return float("inf")
    return max(psl_dist(a, b) for a, b in zip(r0.gens, r1.gens))


def lifted_product(ms, epss) -> np.ndarray:
    p = ID
    for m, e in zip(ms, epss):
        p = p @ q_mat(m, e)
    return p


def relator(rep: Representation) -> tuple[float, np.ndarray]:
    lift = lifted_product([g.m for g in rep.gens], rep.eps)
    return min(fnorm(lift - ID), fnorm(lift + ID)), lift


def sw(rep: Representation, tol: float = ACCEPT_TOL) -> SWInvariants:
    res, lift = relator(rep)
    if res > tol:
        raise RelatorViolated(f"relator residual {res:.3g} exceeds {tol:g}")
    w1 = tuple(1 if e == -1 else 0 for e in rep.eps)
    w2 = 0 if fnorm(lift - ID) <= fnorm(lift + ID) else 1
    return SWInvariants(w1, w2)


def canonical_rep(k: int, w1: Sequence[int], w2: int) -> Representation:
    """Representative built from reflections, point inversions, Id and ROT."""
    if k < 1 or len(w1) != k:
        raise ValueError("need k >= 1 and a w1 vector of length k")
    gens = [ExtIsom(ID, -1 if bit else 1) for bit in w1]
    if w2:
        gens[0] = ExtIsom(ROT, gens[0].eps)
    return Representation(tuple(gens))


def census(k: int) -> list[tuple[tuple, int, Representation]]:
    out = []
    for w1 in itertools.product((0, 1), repeat=k):
        for w2 in (0, 1):
            out.append((w1, w2, canonical_rep(k, w1, w2)))
    return out


# -- product map: Jacobian and Gauss-Newton projection ----------------------

def product_jacobian(ms, epss) -> tuple[np.ndarray, np.ndarray]:
    """Product of squares and its 6 x 6n right-trivialized real Jacobian.

    Generator ``i`` moves in the chart ``M_i -> exp(xi_i) M_i``; the output
    derivative is ``dP . P^-1`` written in sl(2,C) real coordinates.
    """
    blocks = []
    left = ID
    for m, e in zip(ms, epss):
        ad_m = ad_real6(m)
        d = I6 + (ad_m @ CONJ6 if e == -1 else ad_m)
        blocks.append(ad_real6(left) @ d)
        left = left @ q_mat(m, e)
    return left, np.hstack(blocks)


def product_residual(p: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Real-6 logarithm of ``p c^-1``; vanishes only when ``p == c``."""
    return to_real6(log_sl(p @ inv2(c)))


def apply_step(ms, xi: np.ndarray) -> list:
    return [exp_sl(from_real6(xi[6 * i:6 * i + 6])) @ m for i, m in enumerate(ms)]


def project_product(ms, epss, c, tol: float = 1e-13, max_iter: int = 30,
                    frozen: Sequence[int] = ()) -> tuple[list, float]:
    """Minimum-norm Gauss-Newton onto ``prod Q(A_i) = c``.

    Returns the corrected matrices and the final residual norm.  Generators
    listed in ``frozen`` are not moved.
    """
    ms = [np.array(m) for m in ms]
    res = np.inf
    for _ in range(max_iter):
        p, j = product_jacobian(ms, epss)
        r = product_residual(p, c)
        res = float(np.linalg.norm(r))
        if res <= tol:
            break
        for i in frozen:
            j[:, 6 * i:6 * i + 6] = 0
        xi = -np.linalg.lstsq(j, r, rcond=1e-10)[0]
        ms = apply_step(ms, xi)
    return ms, res


def solve_fiber_near(a: ExtIsom, b, tol: float = 1e-12) -> ExtIsom:
    """Point of Q^-1(b) reached from ``a`` by Gauss-Newton (nearby if b ~ q(a))."""
    ms, res = project_product([a.m], [a.eps], np.asarray(b, dtype=complex), tol=tol)
    if res > 1e-9:
        raise EmptyFiber(f"could not reach the fiber (residual {res:.2g})")
    return ExtIsom(ms[0], a.eps)


# -- sampling ---------------------------------------------------------------

def random_sl_vector(rng: np.random.Generator, scale: float) -> np.ndarray:
    return scale * (rng.normal(size=3) + 1j * rng.normal(size=3)) / np.sqrt(2)


def _move(rep: Representation, s: int, rng: np.random.Generator,
          scale: float) -> Representation:
    k = rep.genus
    kind = rng.integers(3)
    gens = list(rep.gens)
    if kind == 0:
        return rep.conjugate(exp_sl(random_sl_vector(rng, scale)))
    if kind == 1 and k > 1:
        for i in range(k - 1):
            g = gens[i]
            gens[i] = ExtIsom(exp_sl(random_sl_vector(rng, scale)) @ g.m, g.eps)
        last = gens[-1]
        if last.eps == 1:
            prefix = lifted_product([g.m for g in gens[:-1]], [g.eps for g in gens[:-1]])
            gens[-1] = sqrt_plus(s * inv2(prefix))
            return Representation(tuple(gens))
        ms, res = project_product([g.m for g in gens], rep.eps, s * ID)
        if res > 1e-11:
            raise EmptyFiber("projection did not converge")
        return Representation(tuple(ExtIsom(m, e) for m, e in zip(ms, rep.eps)))
    minus = [i for i, g in enumerate(gens) if g.eps == -1]
    if not minus:
        return rep.conjugate(exp_sl(random_sl_vector(rng, scale)))
    i = int(rng.choice(minus))
    f = fiber(q(gens[i]))
    gens[i] = fiber_sample(f, 1, rng)[0]
    return Representation(tuple(gens))


def sample_component(k: int, w1: Sequence[int], w2: int, rng: np.random.Generator,
                     steps: int = 10, scale: float = 0.3, max_retries: int = 100,
                     stats: dict | None = None,
                     size_cap: float = SAMPLE_SIZE_CAP) -> Representation:
    """Random representation with invariants ``(w1, w2)``.

    Starts at :func:`canonical_rep` and applies ``steps`` random moves:
    global conjugation, perturbation of the first k-1 generators with the
    last one re-solved, or resampling one generator inside its Q-fiber.
    Candidates with ``prod |g_i|^2 > size_cap`` (Frobenius norms) are
    rejected, otherwise long walks drift to numerically useless scales.
    If ``stats`` is given it accumulates accepted moves and invariant
    flips (relator-valid candidates whose invariants changed; these are
    rejected and should never occur).
    """
    if stats is not None:
        stats.setdefault("moves", 0)
        stats.setdefault("flips", 0)
    want = SWInvariants(tuple(int(b) for b in w1), int(w2))
    rep = canonical_rep(k, want.w1, want.w2)
    s = -1 if w2 else 1
    for _ in range(steps):
        for _attempt in range(max_retries):
            try:
                cand = _move(rep, s, rng, scale)
            except (EmptyFiber, TraceMinusTwo, DegenerateInput):
                continue
            if np.prod([fnorm(g.m) ** 2 for g in cand.gens]) > size_cap:
                continue
            res, _ = relator(cand)
            if res > CONSTRUCTION_TOL:
                continue
            if sw(cand) != want:
                if stats is not None:
                    stats["flips"] += 1
                continue
            rep = cand
            if stats is not None:
                stats["moves"] += 1
            break
        else:
            raise SamplingExhausted(f"no admissible move after {max_retries} tries")
    return rep


# -- X_n(C) and the dense subset X'' ------------------------------------------

@dataclass(frozen=True, eq=False)
class XnPoint:
    """Tuple of orientation-reversing elements whose squares multiply to ``target``."""

    target: np.ndarray
    elems: tuple

    def __post_init__(self):
        object.__setattr__(self, "elems", tuple(self.elems))
        if any(a.eps != -1 for a in self.elems):
            raise ValueError("X_n(C) points are tuples in G_-")

    @property
    def n(self) -> int:
        return len(self.elems)

    def residual(self) -> float:
        p = lifted_product([a.m for a in self.elems], [-1] * self.n)
        return fnorm(p - self.target)


def _noncommuting(x, y, tol: float) -> bool:
    return fnorm(x @ y - y @ x) > tol * max(1.0, fnorm(x) * fnorm(y))


def _scalar(x, tol: float) -> bool:
    return fnorm(x - ID) <= tol or fnorm(x + ID) <= tol


def in_x2pp(point: XnPoint, tol: float = 1e-6) -> bool:
    qs = [q(a) for a in point.elems]
    n = len(qs)
    if n == 3:
        return not _scalar(qs[0], tol) and _noncommuting(qs[1], qs[2], tol)
    window = qs[:n - 2]
    return any(_noncommuting(window[i], window[j], tol)
               for i in range(len(window)) for j in range(i + 1, len(window)))


def _bump(point: XnPoint, i: int, eps: float) -> XnPoint | None:
    """Replace the commuting pair ``(Q_i, Q_{i+1})`` by a close non-commuting one."""
    elems = list(point.elems)
    x, y = q(elems[i]), q(elems[i + 1])
    if _scalar(x, 1e-9) or _scalar(y, 1e-9) or _noncommuting(x, y, 1e-9):
        return None
    nf = normal_form(x)
    g = nf.conjugator
    gi = inv2(g)
    xn, yn = g @ x @ gi, g @ y @ gi
    if nf.kind is Kind.DIAGONAL:
        lam, mu = xn[0, 0], yn[0, 0]
        if abs(lam * mu - 1) < 1e-9 or abs(lam * mu + 1) < 1e-9:
            return None
        # B1 = u1 X u1^-1, B2 = u2 Y u2^-1 with upper unipotent u's
        d = -eps / (lam * mu)
        u1 = np.array([[1, eps / (1 / lam - lam)], [0, 1]])
        u2 = np.array([[1, d / (1 / mu - mu)], [0, 1]])
        elems[i] = conj_by(gi @ u1 @ g, elems[i])
        elems[i + 1] = conj_by(gi @ u2 @ g, elems[i + 1])
    elif nf.kind is Kind.PARABOLIC_PLUS:
        x1, x2 = xn[0, 1], yn[0, 1]
        if abs(x1 + x2) < 1e-9:
            return None
        lam = 1 + eps
        y1 = (x1 + x2) / lam / 2
        b1 = np.array([[lam, y1], [0, 1 / lam]])
        b2 = np.array([[1 / lam, (x1 + x2) / lam - y1], [0, lam]])
        try:
            elems[i] = solve_fiber_near(elems[i], gi @ b1 @ g)
            elems[i + 1] = solve_fiber_near(elems[i + 1], gi @ b2 @ g)
        except EmptyFiber:
            return None
    else:
        return None
    return XnPoint(point.target, tuple(elems))


def _random_project(point: XnPoint, delta: float, rng) -> XnPoint | None:
    ms = [exp_sl(random_sl_vector(rng, delta)) @ a.m for a in point.elems]
    ms, res = project_product(ms, [-1] * point.n, point.target)
    if res > 1e-11:
        return None
    return XnPoint(point.target, tuple(ExtIsom(m, -1) for m in ms))


def perturb_to_x2prime(point: XnPoint, delta: float, rng: np.random.Generator,
                       max_tries: int = 50) -> XnPoint:
    """Nearby point of X''_n(C) with the SL-level product preserved."""
    if point.n < 3:
        raise ValueError("X''_n is defined for n >= 3")
    if in_x2pp(point):
        return point

    def close(cand):
        return max(psl_dist(a, b) for a, b in zip(cand.elems, point.elems)) <= 10 * delta

    window = point.n - 1 if point.n == 3 else point.n - 2
    for i in range(window - 1):
        cand = _bump(point, i, delta / 4)
        if cand is not None and in_x2pp(cand) and close(cand) \
                and cand.residual() <= ACCEPT_TOL:
            return cand
    # commutators grow like the square of the bump, so escalate the scale
    for t in range(max_tries):
        cand = _random_project(point, delta * (0.25, 1.0, 3.0)[t % 3], rng)
        if cand is not None and in_x2pp(cand) and close(cand) \
                and cand.residual() <= ACCEPT_TOL:
            return cand
    raise PerturbationFailed(f"no admissible perturbation within {delta:g}")
