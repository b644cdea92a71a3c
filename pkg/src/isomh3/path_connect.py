"""Numerical continuation on representation varieties.

Paths are discrete: lists of valid representations whose consecutive
members are close.  Every construction ends with :func:`verify_path`, an
independent check that looks only at the nodes and the requested endpoints.

Internally a state is a list of SL(2,C) matrices with a fixed tuple of
orientation bits; representations are only built when emitting nodes.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize

from .characters import TraceCoords, kappa
from .classify import Kind, normal_form
from .errors import (
    BudgetExceeded, DomainError, InvariantMismatch, JordanTypeChange,
    RankDrop, RelatorViolated, StabilizerJoinFailed, StepUnderflow, TraceMinusTwo,
)
from .lie_core import (
    ID, REFL, ExtIsom, det2, exp_sl, fnorm, from_real6, inv2, log_sl,
    psl_eq, psl_log, sl_dist, to_real6,
)
from .rep_variety import (
    NODE_TOL, Representation, apply_step, lifted_product,
    product_jacobian, product_residual, project_product, random_sl_vector,
    relator, rep_distance, sw,
)
from .square_map import (
    RANK_TOL, fiber, fiber_path, fiber_point, orbit_conjugator,
    q_mat, sqrt_plus, trace,
)

DEFAULT_BUDGET = 10_000
MAX_STEP = 0.5          # verifier bound on consecutive node distance
NODE_STEP = 0.4         # construction target, leaves headroom below MAX_STEP
ENDPOINT_TOL = 1e-6
LIFT_TOL = 1e-8


class Status(str, enum.Enum):
    CONNECTED = "Connected"
    FAILED = "FailedNearSingular"
    BUDGET = "BudgetExceeded"


@dataclass
class PathResult:
    nodes: list
    max_relator_residual: float
    max_step: float
    invariant_log: list
    status: Status
    message: str = ""


@dataclass
class VerifyReport:
    ok: bool
    reasons: list = field(default_factory=list)


def verify_path(nodes: Sequence[Representation], rep0: Representation | None = None,
                rep1: Representation | None = None, tol: float = NODE_TOL,
                max_step: float = MAX_STEP) -> VerifyReport:
    """Soundness certificate for a discrete path of representations.

    Checks endpoint agreement, per-node relator residual, consecutive node
    distance and constancy of the Stiefel-Whitney invariants.
    """
    reasons = []
    if not nodes:
        return VerifyReport(False, ["empty path"])
    for name, want, got in (("start", rep0, nodes[0]), ("end", rep1, nodes[-1])):
        if want is None:
            continue
        if want.genus != got.genus or not all(
                psl_eq(a, b, ENDPOINT_TOL) for a, b in zip(want.gens, got.gens)):
            reasons.append(f"{name} does not match the requested endpoint")
    inv0 = None
    for i, node in enumerate(nodes):
        res, _ = relator(node)
        if res > tol:
            reasons.append(f"node {i} relator residual {res:.3g}")
            continue
        inv = sw(node, tol)
        if inv0 is None:
            inv0 = inv
        elif inv != inv0:
            reasons.append(f"node {i} changes the invariants to {inv}")
        if i and rep_distance(nodes[i - 1], node) > max_step:
            reasons.append(f"jump of {rep_distance(nodes[i - 1], node):.3g} at node {i}")
    return VerifyReport(not reasons, reasons)


# -- budget and state helpers -------------------------------------------------

class Budget:
    def __init__(self, limit: int = DEFAULT_BUDGET):
        self.limit = limit
        self.used = 0

    def spend(self, n: int = 1):
        self.used += n
        if self.used > self.limit:
            raise BudgetExceeded(f"step budget {self.limit} exhausted")


def _twist(m, e):
    return m if e == 1 else m.conj()


def _conj_ms(g, ms, eps):
    gi = inv2(g)
    return [g @ m @ _twist(gi, e) for m, e in zip(ms, eps)]


def _dist(ms0, ms1) -> float:
    return max(sl_dist(a, b) for a, b in zip(ms0, ms1))


def _align_sign(t, m):
    return t if fnorm(t - m) <= fnorm(t + m) else -t


def _to_rep(ms, eps) -> Representation:
    return Representation(tuple(ExtIsom(m, e) for m, e in zip(ms, eps)))


def sample_curve(curve: Callable[[float], list], budget: Budget,
                 max_dist: float = NODE_STEP, min_dt: float = 1e-7) -> list:
    """Adaptive sampling of a state-valued curve on [0, 1]."""
    out = [curve(0.0)]
    t, dt = 0.0, 0.05
    while t < 1.0:
        dt = min(dt, 1.0 - t)
        cand = curve(t + dt)
        budget.spend()
        if _dist(cand, out[-1]) > max_dist:
            dt /= 2
            if dt < min_dt:
                raise StepUnderflow("curve moves too fast to sample")
            continue
        t += dt
        out.append(cand)
        dt *= 1.5
    return out


def conjugation_curve(ms, eps, g):
    """``t -> g_t . state`` with ``g_t = exp(t log g)``, from the state to ``g . state``."""
    x = psl_log(np.asarray(g, dtype=complex))
    return lambda t: _conj_ms(exp_sl(t * x), ms, eps)


def balancing_conjugator(ms, eps) -> np.ndarray:
    """Conjugator that (locally) minimizes the total Frobenius norm of the state."""
    def cost(v):
        return sum(fnorm(m) ** 2 for m in _conj_ms(exp_sl(from_real6(v)), ms, eps))

    res = minimize(cost, np.zeros(6), method="BFGS", options={"gtol": 1e-6})
    return exp_sl(from_real6(res.x))


# -- generic path lifting -------------------------------------------------------

class MapId(str, enum.Enum):
    CHI_Q2 = "ChiQ2"
    PROD_Q = "ProdQ"
    FNM2 = "Fnm2"


def _trace_functional(qm):
    """Complex coefficients of ``x -> tr(sl_to_mat(x) qm)``."""
    return np.array([qm[1, 0], qm[0, 1], qm[0, 0] - qm[1, 1]])


def _real_rows(c):
    """Rows (Re, Im) of ``x -> c . x`` acting on real-6 vectors."""
    return np.array([np.concatenate([c.real, -c.imag]),
                     np.concatenate([c.imag, c.real])])


def _d_square(m, e):
    """Real 6x6 derivative of Q in the left chart, right-trivialized."""
    from .lie_core import CONJ6, ad_real6

    ad_m = ad_real6(m)
    return np.eye(6) + (ad_m @ CONJ6 if e == -1 else ad_m)


class _ChiQ2:
    """(A, B) -> (tr Q(A), tr Q(B), tr Q(A)Q(B)) with real first two coordinates."""

    rank = 4

    def value(self, ms, eps):
        qa, qb = q_mat(ms[0], eps[0]), q_mat(ms[1], eps[1])
        z = trace(qa @ qb)
        return np.array([trace(qa).real, trace(qb).real, z.real, z.imag])

    def target(self, t):
        t = TraceCoords(*t)
        return np.array([t.x.real, t.y.real, t.z.real, t.z.imag])

    def residual(self, ms, eps, target):
        return self.value(ms, eps) - target

    def velocity(self, t0, t1, dt):
        return (t1 - t0) / dt

    def jacobian(self, ms, eps):
        qa, qb = q_mat(ms[0], eps[0]), q_mat(ms[1], eps[1])
        da, db = _d_square(ms[0], eps[0]), _d_square(ms[1], eps[1])
        za = _real_rows(_trace_functional(qa @ qb)) @ da
        zb = _real_rows(_trace_functional(qb @ qa)) @ db
        xa = _real_rows(_trace_functional(qa))[0] @ da
        yb = _real_rows(_trace_functional(qb))[0] @ db
        j = np.zeros((4, 12))
        j[0, :6] = xa
        j[1, 6:] = yb
        j[2:, :6] = za
        j[2:, 6:] = zb
        return j


class _Product:
    """(A_1..A_n) -> Q(A_1) ... Q(A_n) in SL(2,C)."""

    def __init__(self, n, eps):
        self.rank = 5 if n == 1 and eps[0] == -1 else 6

    def target(self, c):
        return np.asarray(c, dtype=complex)

    def residual(self, ms, eps, target):
        return product_residual(lifted_product(ms, eps), target)

    def velocity(self, c0, c1, dt):
        return to_real6(log_sl(c1 @ inv2(c0))) / dt

    def jacobian(self, ms, eps):
        return product_jacobian(ms, eps)[1]


@dataclass
class LiftProblem:
    """Lift ``curve`` (t in [0, 1]) through the named map, starting at ``point``."""

    map_id: MapId
    point: tuple
    curve: Callable[[float], object]
    h0: float = 0.05
    h_min: float = 1e-12
    max_steps: int = DEFAULT_BUDGET
    max_jump: float = 0.25
    tol: float = LIFT_TOL
    rank_tol: float = RANK_TOL


def _make_map(p: LiftProblem, eps):
    if MapId(p.map_id) is MapId.CHI_Q2:
        if len(eps) != 2:
            raise ValueError("ChiQ2 acts on pairs")
        return _ChiQ2()
    return _Product(len(eps), eps)


def _check_rank(fmap, ms, eps, rank_tol):
    s = np.linalg.svd(fmap.jacobian(ms, eps), compute_uv=False)
    if s[fmap.rank - 1] < rank_tol * s[0]:
        raise RankDrop(f"Jacobian rank fell below {fmap.rank} "
                       f"(sigma ratio {s[fmap.rank - 1] / s[0]:.2g})")


def _newton(fmap, ms, eps, target, tol, iters=5):
    for k in range(iters + 1):
        r = fmap.residual(ms, eps, target)
        if np.linalg.norm(r) <= tol:
            return ms, True
        if k == iters:
            break
        j = fmap.jacobian(ms, eps)
        ms = apply_step(ms, -np.linalg.lstsq(j, r, rcond=None)[0])
    return ms, False


def lift_path(p: LiftProblem) -> list:
    """Predictor-corrector lift of a target curve; returns the list of lifted points.

    Every returned point satisfies the level-set equation to ``p.tol``.
    Raises :class:`RankDrop` when the Jacobian degenerates and
    :class:`StepUnderflow` when the step needed to follow the curve drops
    below ``max(h_min, 1 / max_steps)``.
    """
    eps = tuple(a.eps for a in p.point)
    fmap = _make_map(p, eps)
    return _continue(fmap, p.point, p.curve, p)


def _continue(fmap, point, curve, p: LiftProblem) -> list:
    eps = tuple(a.eps for a in point)
    ms = [a.m for a in point]
    target = fmap.target(curve(0.0))
    if np.linalg.norm(fmap.residual(ms, eps, target)) > p.tol:
        raise ValueError("start point does not map to the start of the curve")
    _check_rank(fmap, ms, eps, p.rank_tol)
    floor = max(p.h_min, 1.0 / p.max_steps)
    out = [tuple(point)]
    t, h, steps = 0.0, p.h0, 0
    while t < 1.0:
        h = min(h, 1.0 - t)
        if h < floor and t + h < 1.0:
            raise StepUnderflow(f"step {h:.3g} below floor at t = {t:.6g}")
        steps += 1
        if steps > p.max_steps:
            raise BudgetExceeded("lift exceeded its step budget")
        t1 = t + h
        target1 = fmap.target(curve(t1))
        v = fmap.velocity(target, target1, 1.0)
        j = fmap.jacobian(ms, eps)
        pred = apply_step(ms, np.linalg.lstsq(j, v, rcond=None)[0])
        cand, ok = _newton(fmap, pred, eps, target1, p.tol / 10)
        if not ok or _dist(cand, ms) > p.max_jump:
            h /= 2
            continue
        ms, t, target = cand, t1, target1
        _check_rank(fmap, ms, eps, p.rank_tol)
        out.append(tuple(ExtIsom(m, e) for m, e in zip(ms, eps)))
        h *= 1.5
    return out


class _PinnedTrace:
    """(A, B) -> (tr Q(A), tr Q(B), Q(A) Q(B)) with the product held at a fixed C."""

    rank = 8

    def __init__(self, c):
        self.c = c

    def target(self, xy):
        return np.array(xy, dtype=float)

    def residual(self, ms, eps, target):
        qa, qb = q_mat(ms[0], eps[0]), q_mat(ms[1], eps[1])
        return np.concatenate([[trace(qa).real - target[0], trace(qb).real - target[1]],
                               product_residual(qa @ qb, self.c)])

    def velocity(self, t0, t1, dt):
        return np.concatenate([(t1 - t0) / dt, np.zeros(6)])

    def jacobian(self, ms, eps):
        rows = np.zeros((2, 12))
        for i in (0, 1):
            qi = q_mat(ms[i], eps[i])
            rows[i, 6 * i:6 * i + 6] = _real_rows(_trace_functional(qi))[0] @ _d_square(ms[i], eps[i])
        return np.vstack([rows, product_jacobian(ms, eps)[1]])


# -- conjugator alignment -------------------------------------------------------

def _phase_match(v, ref):
    s = np.vdot(ref, v)
    return v if abs(s) < 1e-14 else v * (abs(s) / s)


def align_conjugator(c_path: Sequence[np.ndarray], tol: float = 1e-8) -> list:
    """Continuous ``g_t`` with ``g_t C_0 g_t^-1 = C_t`` along a path of conjugates.

    Eigenvector bases are normalized and phase-matched to the previous node.
    """
    from .classify import eigenvector

    cs = [np.asarray(c, dtype=complex) for c in c_path]
    kinds = [normal_form(c).kind for c in cs]
    if any(k is not kinds[0] for k in kinds):
        raise JordanTypeChange("path of targets changes Jordan type")
    kind = kinds[0]
    if kind in (Kind.IDENTITY, Kind.MINUS_IDENTITY):
        return [ID.copy() for _ in cs]
    if abs(trace(cs[0]) - trace(cs[-1])) > 1e-8 * max(1.0, abs(trace(cs[0]))):
        raise JordanTypeChange("path leaves the conjugacy class of its start")
    bases, prev = [], None
    lam = None
    if kind is Kind.DIAGONAL:
        from .classify import canonical_eigenvalue
        lam = canonical_eigenvalue(trace(cs[0]))
    for c in cs:
        if kind is Kind.DIAGONAL:
            v1, v2 = eigenvector(c, lam), eigenvector(c, 1 / lam)
        else:
            sign = 1 if kind is Kind.PARABOLIC_PLUS else -1
            v1 = eigenvector(c, sign)
            v2 = None
        if prev is not None:
            v1 = _phase_match(v1, prev[:, 0])
            if v2 is not None:
                v2 = _phase_match(v2, prev[:, 1])
        if v2 is None:
            v2 = np.linalg.lstsq(c - (1 if kind is Kind.PARABOLIC_PLUS else -1) * ID,
                                 v1, rcond=None)[0]
            p = np.column_stack([v1, v2])
        else:
            p = np.column_stack([v1, v2])
            p = p / cmath.sqrt(det2(p))
        if prev is not None and fnorm(p + prev) < fnorm(p - prev):
            p = -p
        bases.append(p)
        prev = p
    # parabolic bases carry det(P) != 1 in general; rescale uniformly
    if kind is not Kind.DIAGONAL:
        fixed = []
        for p in bases:
            p = p / cmath.sqrt(det2(p))
            if fixed and fnorm(p + fixed[-1]) < fnorm(p - fixed[-1]):
                p = -p
            fixed.append(p)
        bases = fixed
    p0i = inv2(bases[0])
    gs = [p @ p0i for p in bases]
    for g, c in zip(gs, cs):
        if fnorm(g @ cs[0] @ inv2(g) - c) > tol * max(1.0, fnorm(c)):
            raise JordanTypeChange("eigenbasis reconstruction failed")
    return gs


# -- X_2(C): character-path lift, stabilizer join, fiber joins --------------------

def _x2_badness(x, y, z):
    return abs(kappa((x, y, z)) - 2)


def plan_xy_path(p0, p1, z, rng: np.random.Generator, tube: float = 0.05,
                 tries: int = 50) -> Callable[[float], tuple]:
    """Planar path in trace space with fixed ``z`` avoiding the reducible locus.

    Straight segment first, then quadratic Bezier detours with random
    control points; all points keep ``x, y > -2``.
    """
    p0, p1 = np.asarray(p0, dtype=float), np.asarray(p1, dtype=float)
    ts = np.linspace(0, 1, 201)
    floor = min(tube, _x2_badness(*p0, z), _x2_badness(*p1, z))
    span = max(1.0, float(np.linalg.norm(p1 - p0)))

    def bezier(ctrl):
        return lambda t: tuple((1 - t) ** 2 * p0 + 2 * t * (1 - t) * ctrl + t * t * p1)

    cands = [lambda t: tuple(p0 + t * (p1 - p0))]
    for k in range(tries):
        ctrl = (p0 + p1) / 2 + rng.normal(size=2) * span * (0.3 + 0.1 * k)
        cands.append(bezier(ctrl))
    for path in cands:
        pts = [path(t) for t in ts[1:-1]]
        if all(x > -2 + tube and y > -2 + tube and _x2_badness(x, y, z) >= floor
               for x, y in pts):
            return path
    # for real z the locus can separate the plane (z = +-2 makes it a line);
    # cross it on the straight segment and let the lift's rank test decide
    return cands[0]


def stabilizer_conjugator(c, x, y, tol: float = 1e-7) -> np.ndarray:
    """``k`` in Stab(c) with ``k x k^-1 = y``, found as a null vector of a linear system."""
    rows = []
    for a, b in ((x, y), (c, c)):
        # k a - b k = 0, row-major unknowns k00, k01, k10, k11
        m = np.kron(np.eye(2), a.T) - np.kron(b, np.eye(2))
        rows.append(m)
    mat = np.vstack(rows)
    _, s, vh = np.linalg.svd(mat)
    scale = max(1.0, fnorm(x), fnorm(c))
    if s[-1] > tol * scale:
        raise StabilizerJoinFailed("pairs are not conjugate inside the stabilizer")
    k = vh[-1].conj().reshape(2, 2)
    d = det2(k)
    if abs(d) < 1e-10:
        raise StabilizerJoinFailed("stabilizer solution is singular")
    return k / cmath.sqrt(d)


def _fiber_curve(state, idx, target, eps):
    """Move generator ``idx`` inside its Q-fiber to ``target`` (others fixed)."""
    a0 = ExtIsom(state[idx], eps[idx])
    f = fiber(q_mat(state[idx], eps[idx]))
    path = fiber_path(f, a0, ExtIsom(target, eps[idx]))

    def curve(t):
        out = list(state)
        out[idx] = path(t).m
        return out
    return curve


def _join(pieces: list) -> list:
    """Concatenate state lists that share their junction points."""
    out = list(pieces[0])
    for p in pieces[1:]:
        out.extend(p[1:])
    return out


def _aligned_lift(a0, b0, plan, c, budget):
    jump = 0.1
    for _ in range(4):
        states = _pinned_lift(a0, b0, plan, c, jump, budget)
        if max(_dist(u, v) for u, v in zip(states, states[1:])) <= NODE_STEP:
            return states
        # conjugating back to C can stretch the spacing; lift more finely
        jump /= 3
    raise StepUnderflow("aligned lift stays too coarse")


def _pinned_lift(a0, b0, plan, c, jump, budget):
    """ChiQ2 lift of the planned trace path, conjugated back so the product is C."""
    eps = (-1, -1)
    z = trace(c)
    lifted = lift_path(LiftProblem(MapId.CHI_Q2, (a0, b0),
                                   lambda t: TraceCoords(*plan(t), z), max_jump=jump))
    budget.spend(len(lifted))
    c_path = [q_mat(a.m, -1) @ q_mat(b.m, -1) for a, b in lifted]
    c_path[0] = c
    gs = align_conjugator(c_path)
    states = []
    for g, (a, b) in zip(gs, lifted):
        ms = _conj_ms(inv2(g), [a.m, b.m], eps)
        # re-solve b so the SL product is exactly C again
        ms, _ = project_product(ms, eps, c, tol=1e-14, max_iter=3, frozen=(0,))
        states.append(ms)
    states[0] = [a0.m, b0.m]
    return states


def connect_x2(a0: ExtIsom, b0: ExtIsom, a1: ExtIsom, b1: ExtIsom, c,
               rng: np.random.Generator | None = None,
               budget: Budget | None = None) -> list:
    """Path in X_2(C) = {(A, B) in G_-^2 : Q(A) Q(B) = C} for C != +-Id.

    Lifts a planned trace path through (A, B) -> chi(Q(A), Q(B)), pins the
    product back to C with a continuous conjugator, joins inside the
    stabilizer of C and finally moves each element along its own fiber.
    Returns the node pairs.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    budget = budget if budget is not None else Budget()
    c = np.asarray(c, dtype=complex)
    eps = (-1, -1)
    for a, b in ((a0, b0), (a1, b1)):
        if a.eps != -1 or b.eps != -1:
            raise ValueError("X_2(C) pairs are orientation-reversing")
        if fnorm(q_mat(a.m, -1) @ q_mat(b.m, -1) - c) > LIFT_TOL * max(1.0, fnorm(c)):
            raise RelatorViolated("pair does not multiply to C")
    if min(fnorm(c - ID), fnorm(c + ID)) <= 1e-8:
        raise ValueError("C = +-Id is handled by connect_klein")
    if psl_eq(a0, a1) and psl_eq(b0, b1):
        return [(a0, b0)]
    z = trace(c)
    qa0, qb0 = q_mat(a0.m, -1), q_mat(b0.m, -1)
    qa1, qb1 = q_mat(a1.m, -1), q_mat(b1.m, -1)
    plan = plan_xy_path((trace(qa0).real, trace(qb0).real),
                        (trace(qa1).real, trace(qb1).real), z, rng)
    try:
        states = _aligned_lift(a0, b0, plan, c, budget)
    except (StepUnderflow, RankDrop, JordanTypeChange):
        # near +-Id (always a risk when C is parabolic) the eigenbasis
        # degenerates; fall back to lifting with the product held fixed
        lifted = _continue(_PinnedTrace(c), (a0, b0), plan,
                           LiftProblem(MapId.CHI_Q2, (a0, b0), plan, max_jump=NODE_STEP / 2))
        budget.spend(len(lifted))
        states = [[a.m, b.m] for a, b in lifted]
    end = states[-1]
    k = stabilizer_conjugator(c, q_mat(end[0], -1), qa1)
    pieces = [states, sample_curve(conjugation_curve(end, eps, k), budget)]
    cur = pieces[-1][-1]
    pieces.append(sample_curve(_fiber_curve(cur, 0, a1.m, eps), budget))
    cur = pieces[-1][-1]
    pieces.append(sample_curve(_fiber_curve(cur, 1, b1.m, eps), budget))
    nodes = _join(pieces)
    nodes[-1] = [a1.m, b1.m]
    return [(ExtIsom(m0, -1), ExtIsom(m1, -1)) for m0, m1 in nodes]


# -- explicit constructions for two generators ----------------------------------

def ell_point(theta: float, rho: float = 1.0) -> np.ndarray:
    """Matrix part of the rotatory reflection squaring to diag(e^{i theta}, e^{-i theta})."""
    u = rho * cmath.exp(0.5j * (theta + math.pi))
    return np.array([[0, u], [-1 / u, 0]])


def _inv_minus(m):
    """Matrix part of the inverse of an orientation-reversing element."""
    return inv2(m).conj()


KLEIN_BASE_THETA = math.pi / 2


def _klein_to_base(ms, s: int, budget: Budget) -> list:
    """Explicit path from a type-preserving genus-2 state to a fixed base state."""
    eps = (-1, -1)
    a1, a2 = ms
    bp = _inv_minus(a2)                              # q(bp) = q(a2)^-1 = s q(a1)
    pair = lambda x, y: [x, _inv_minus(y)]           # (A1, B') -> (A1, A2)
    pieces = []
    if s == 1:
        f = fiber(q_mat(a1, -1))
        path = fiber_path(f, ExtIsom(a1, -1), ExtIsom(bp, -1))
        pieces.append(sample_curve(lambda t: pair(path(t).m, bp), budget))
        x = pieces[-1][-1][0]
        xg = psl_log(ell_point(KLEIN_BASE_THETA) @ inv2(x))
        pieces.append(sample_curve(
            lambda t: pair(exp_sl(t * xg) @ x, exp_sl(t * xg) @ x), budget))
        return _join(pieces)
    qa = q_mat(a1, -1)
    nf = normal_form(qa)
    if nf.kind is Kind.IDENTITY:
        theta, h = 0.0, orbit_conjugator(a1, inversion=False)
        cur = [a1, bp]
    elif nf.kind is Kind.MINUS_IDENTITY:
        theta, h = math.pi, orbit_conjugator(a1, inversion=True)
        cur = [a1, bp]
    elif nf.kind is Kind.DIAGONAL and abs(abs(nf.lam) - 1) < 1e-8:
        theta, h = cmath.phase(nf.lam), inv2(nf.conjugator)
        f = fiber(qa)
        path = fiber_path(f, ExtIsom(a1, -1), fiber_point(f, 1.0))
        pieces.append(sample_curve(lambda t: pair(path(t).m, bp), budget))
        cur = [pieces[-1][-1][0], bp]
    else:
        raise DomainError("opposite-sign pair must have elliptic or +-Id squares")
    a_fixed = cur[0]
    target_b = ExtIsom(h @ ell_point(theta + math.pi) @ inv2(h).conj(), -1)
    g = fiber(q_mat(cur[1], -1))
    bpath = fiber_path(g, ExtIsom(cur[1], -1), target_b)
    pieces.append(sample_curve(lambda t: pair(a_fixed, bpath(t).m), budget))
    state = pieces[-1][-1]
    pieces.append(sample_curve(conjugation_curve(state, eps, inv2(h)), budget))
    pieces.append(sample_curve(
        lambda t: pair(ell_point(theta + t * (KLEIN_BASE_THETA - theta)),
                       ell_point(theta + math.pi + t * (KLEIN_BASE_THETA - theta))),
        budget))
    return _join(pieces)


def _mixed_pair_to_base(ms, eps, budget: Budget) -> list:
    """Genus 2, one generator in each component, lifted relator -Id.

    The square of the orientation-reversing generator is forced to be
    ``-A_+^-2``; the path diagonalizes ``A_+``, moves ``A_-`` in its fiber to
    a canonical point, then slides ``A_+`` to ``diag(i, -i)``.
    """
    p = eps.index(1)
    m = 1 - p

    def state(ap, am):
        out = [None, None]
        out[p], out[m] = ap, am
        return out

    ap, am = ms[p], ms[m]
    pieces = []
    nf = normal_form(ap)
    if nf.kind in (Kind.IDENTITY, Kind.MINUS_IDENTITY):
        h = orbit_conjugator(am, inversion=True)
        pieces.append(sample_curve(conjugation_curve(ms, eps, inv2(h)), budget))
        branch, phi = "unit", 0.0
    elif nf.kind is Kind.DIAGONAL:
        pieces.append(sample_curve(conjugation_curve(ms, eps, nf.conjugator), budget))
        lam = nf.lam
        if abs(abs(lam) - 1) < 1e-8:
            branch, phi = "unit", cmath.phase(lam)
            target = ell_point(math.pi - 2 * phi)
        else:
            branch, r = "imag", abs(lam)
            target = np.diag([1 / r, r]).astype(complex)
        cur = pieces[-1][-1]
        pieces.append(sample_curve(_fiber_curve(cur, m, target, eps), budget))
    else:
        raise DomainError("orientation-preserving generator has a parabolic square")
    if branch == "unit":
        pieces.append(sample_curve(lambda t: state(
            np.diag([cmath.exp(1j * (phi + t * (math.pi / 2 - phi))),
                     cmath.exp(-1j * (phi + t * (math.pi / 2 - phi)))]),
            ell_point(math.pi - 2 * (phi + t * (math.pi / 2 - phi)))), budget))
    else:
        lr = math.log(r)
        pieces.append(sample_curve(lambda t: state(
            np.diag([1j * math.exp((1 - t) * lr), -1j * math.exp(-(1 - t) * lr)]),
            np.diag([math.exp(-(1 - t) * lr), math.exp((1 - t) * lr)]).astype(complex)),
            budget))
        cur = pieces[-1][-1]
        pieces.append(sample_curve(_fiber_curve(cur, m, REFL, eps), budget))
    return _join(pieces)


def _two_sided(to_base, ms0, ms1, budget) -> list:
    p0 = to_base(ms0)
    p1 = to_base(ms1)
    if _dist(p0[-1], p1[-1]) > 1e-8:
        raise DomainError("base points disagree")
    return p0 + p1[::-1][1:]


# -- square-root transport and the relator walk ------------------------------------

def _solve_plus(ms, eps, j, s):
    """Replace generator ``j`` (orientation-preserving) by the root forced by the relator."""
    pre = lifted_product(ms[:j], eps[:j])
    post = lifted_product(ms[j + 1:], eps[j + 1:])
    out = list(ms)
    out[j] = sqrt_plus(s * inv2(pre) @ inv2(post)).m
    return out


def _transport_segment(ms0, ms1, eps, s, j, budget):
    logs = [None if i == j else psl_log(_align_sign(b, a) @ inv2(a))
            for i, (a, b) in enumerate(zip(ms0, ms1))]

    def curve(t):
        ms = [a if i == j else exp_sl(t * logs[i]) @ a for i, a in enumerate(ms0)]
        return _solve_plus(ms, eps, j, s)

    nodes = sample_curve(curve, budget, min_dt=1e-5)
    if _dist(nodes[-1], ms1) > 1e-6:
        raise DomainError("transport ended on a different root")
    nodes[0], nodes[-1] = list(ms0), list(ms1)
    return nodes


def _transport(ms0, ms1, eps, s, rng, budget, tries: int = 6) -> list:
    """Move the other generators along geodesics; the orientation-preserving
    generator ``j`` is carried along as the unique square root the relator forces."""
    j = max(i for i, e in enumerate(eps) if e == 1)
    try:
        return _transport_segment(ms0, ms1, eps, s, j, budget)
    except (StepUnderflow, TraceMinusTwo, DomainError) as err:
        last = err
    for _ in range(tries):
        mid = [exp_sl(random_sl_vector(rng, 0.5)) @ (a if fnorm(a - b) < fnorm(a + b) else -a)
               for a, b in zip(ms0, ms1)]
        try:
            w = _solve_plus(mid, eps, j, s)
            return _join([_transport_segment(ms0, w, eps, s, j, budget),
                          _transport_segment(w, ms1, eps, s, j, budget)])
        except (StepUnderflow, TraceMinusTwo, DomainError) as err:
            last = err
    raise last


class _Stall(Exception):
    pass


def _walk_segment(ms, eps, s, targets, budget, h=0.15, patience=30) -> list:
    """Steer towards ``targets`` along the relator variety (projected log direction)."""
    c = s * ID
    nodes = [list(ms)]
    best, since = np.inf, 0
    while True:
        ts = [_align_sign(t, m) for t, m in zip(targets, ms)]
        d = _dist(ts, ms)
        if d < 1e-3:
            nodes.append(list(targets))
            return nodes
        if d < 0.99 * best:
            best, since = d, 0
        else:
            since += 1
            if since > patience:
                raise _Stall(nodes)
        w = np.concatenate([to_real6(log_sl(t @ inv2(m))) for t, m in zip(ts, ms)])
        _, j = product_jacobian(ms, eps)
        v = w - np.linalg.pinv(j, rcond=1e-10) @ (j @ w)
        if np.linalg.norm(v) < 1e-3 * np.linalg.norm(w):
            raise _Stall(nodes)
        scale = max(np.linalg.norm(v[6 * i:6 * i + 6]) * fnorm(m) for i, m in enumerate(ms))
        step = min(1.0, h / scale)
        while True:
            budget.spend()
            cand, res = project_product(apply_step(ms, step * v), eps, c, tol=1e-12,
                                        max_iter=5)
            if res <= 1e-10 and _dist(cand, ms) <= NODE_STEP:
                break
            step /= 2
            if step < 1e-8:
                raise _Stall(nodes)
        ms = cand
        nodes.append(ms)


def _walk(ms0, ms1, eps, s, rng, budget, tries: int = 10) -> list:
    pieces = []
    cur = list(ms0)
    for _ in range(tries):
        try:
            pieces.append(_walk_segment(cur, eps, s, ms1, budget))
            return _join(pieces)
        except _Stall as st:
            pieces.append(st.args[0])
            cur = pieces[-1][-1]
        # detour through a random nearby point of the variety
        for _ in range(20):
            w = [exp_sl(random_sl_vector(rng, 0.7)) @ m for m in cur]
            w, res = project_product(w, eps, s * ID)
            if res < 1e-11:
                break
        else:
            break
        try:
            pieces.append(_walk_segment(cur, eps, s, w, budget))
        except _Stall as st:
            pieces.append(st.args[0])
        cur = pieces[-1][-1]
    raise DomainError("relator walk stalled near a singular stratum")


# -- top level ----------------------------------------------------------------

def _balanced(route, ms0, ms1, eps, budget):
    g0 = balancing_conjugator(ms0, eps)
    g1 = balancing_conjugator(ms1, eps)
    head = sample_curve(conjugation_curve(ms0, eps, g0), budget)
    tail = sample_curve(conjugation_curve(ms1, eps, g1), budget)
    mid = route(head[-1], tail[-1])
    return _join([head, mid, tail[::-1]])


def _finish(states, eps, rep0, rep1, budget) -> PathResult:
    nodes = [_to_rep(ms, eps) for ms in states]
    nodes[0] = rep0
    if rep_distance(nodes[-1], rep1) <= ENDPOINT_TOL:
        nodes[-1] = rep1
    else:
        nodes.append(rep1)
    return make_result(nodes, rep0, rep1)


def make_result(nodes, rep0, rep1, status: Status | None = None,
                message: str = "") -> PathResult:
    """Wrap nodes into a :class:`PathResult`, certifying with :func:`verify_path`."""
    res = [relator(n)[0] for n in nodes]
    steps = [rep_distance(a, b) for a, b in zip(nodes, nodes[1:])]
    log = []
    for n, r in zip(nodes, res):
        log.append(sw(n, NODE_TOL) if r <= NODE_TOL else None)
    if status is None:
        report = verify_path(nodes, rep0, rep1)
        status = Status.CONNECTED if report.ok else Status.FAILED
        message = "; ".join(report.reasons[:3])
    return PathResult(nodes, max(res), max(steps, default=0.0), log, status, message)


def connect_klein(rep0: Representation, rep1: Representation,
                  budget: int = DEFAULT_BUDGET) -> PathResult:
    """Connect two type-preserving genus-2 representations through a fixed base."""
    inv0, inv1 = sw(rep0), sw(rep1)
    if rep0.genus != 2 or inv0.w1 != (1, 1):
        raise ValueError("connect_klein needs type-preserving genus-2 representations")
    if inv0 != inv1:
        raise InvariantMismatch(f"invariants differ: {inv0} vs {inv1}")
    b = Budget(budget)
    s = -1 if inv0.w2 else 1
    ms0 = [g.m for g in rep0.gens]
    ms1 = [g.m for g in rep1.gens]
    if rep_distance(rep0, rep1) <= 1e-12:
        return make_result([rep0], rep0, rep1)
    try:
        states = _two_sided(lambda ms: _klein_to_base(ms, s, b), ms0, ms1, b)
    except BudgetExceeded as err:
        return make_result([rep0], rep0, rep1, Status.BUDGET, str(err))
    return _finish(states, rep0.eps, rep0, rep1, b)


def _route(rep0, rep1, inv, rng, budget) -> list:
    eps = rep0.eps
    s = -1 if inv.w2 else 1
    ms0 = [g.m for g in rep0.gens]
    ms1 = [g.m for g in rep1.gens]
    k = rep0.genus
    attempts = []
    if k == 2 and inv.w1 == (1, 1):
        attempts.append(lambda: _two_sided(lambda ms: _klein_to_base(ms, s, budget),
                                           ms0, ms1, budget))
    elif k == 2 and inv.w2 == 1 and 1 in eps and -1 in eps:
        attempts.append(lambda: _two_sided(lambda ms: _mixed_pair_to_base(ms, eps, budget),
                                           ms0, ms1, budget))
    elif 1 in eps:
        attempts.append(lambda: _balanced(
            lambda a, b: _transport(a, b, eps, s, rng, budget), ms0, ms1, eps, budget))
    attempts.append(lambda: _balanced(
        lambda a, b: _walk(a, b, eps, s, rng, budget), ms0, ms1, eps, budget))
    err = None
    for attempt in attempts:
        try:
            return attempt()
        except BudgetExceeded:
            raise
        except (DomainError, ValueError) as e:
            err = e
    raise err


def connect(rep0: Representation, rep1: Representation, budget: int = DEFAULT_BUDGET,
            rng: np.random.Generator | None = None) -> PathResult:
    """Discrete path between two representations with equal invariants.

    Raises :class:`InvariantMismatch` when the Stiefel-Whitney invariants
    differ; otherwise returns a :class:`PathResult` whose status is
    ``Connected`` only when :func:`verify_path` accepts the nodes.
    """
    inv0, inv1 = sw(rep0), sw(rep1)
    if inv0 != inv1:
        raise InvariantMismatch(f"invariants differ: {inv0} vs {inv1}")
    if rep_distance(rep0, rep1) <= 1e-12:
        return make_result([rep0], rep0, rep1)
    rng = rng if rng is not None else np.random.default_rng(0)
    b = Budget(budget)
    try:
        states = _route(rep0, rep1, inv0, rng, b)
    except BudgetExceeded as err:
        return make_result([rep0], rep0, rep1, Status.BUDGET, str(err))
    except DomainError as err:
        return make_result([rep0], rep0, rep1, Status.FAILED, str(err))
    return _finish(states, rep0.eps, rep0, rep1, b)
