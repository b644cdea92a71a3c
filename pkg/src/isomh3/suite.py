"""Acceptance suites: seeded, deterministic experiment runners.

Each ``criterion_N`` takes a :class:`numpy.random.SeedSequence` and a trial
scale factor and returns a :class:`CriterionResult`.  Reports contain no
timings, so identical seeds give identical reports.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .characters import chi, commutator, commute, dchi_surjective, kappa
from .errors import (
    InvariantMismatch, RankDrop, StepUnderflow, TraceMinusTwo,
)
from .lie_core import (
    CONJ6, ID, ExtIsom, exp_sl, fnorm, from_real6, inv2, log_sl, mat_to_sl,
    to_real6,
)
from .path_connect import (
    LiftProblem, MapId, Status, connect, lift_path, verify_path,
)
from .rep_variety import census, relator, sample_component, sw
from .square_map import (
    FiberCase, dq_matrix, dq_rank, fiber, fiber_contains, fiber_point,
    fiber_sample, q, random_sl2, sqrt_plus, trace,
)


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: dict = field(default_factory=dict)

    def line(self) -> str:
        return f"criterion {self.number} ({self.title}): {'PASS' if self.passed else 'FAIL'}"


def _n(base: int, scale: float) -> int:
    return max(1, int(round(base * scale)))


def _rngs(ss: np.random.SeedSequence, n: int) -> list:
    return [np.random.default_rng(s) for s in ss.spawn(n)]


def _tame_sl2(rng, scale=0.6) -> np.ndarray:
    return exp_sl(from_real6(rng.normal(size=6) * scale))


def _minus(rng) -> ExtIsom:
    return ExtIsom(random_sl2(rng), -1)


# -- 1: fibers ----------------------------------------------------------------

def _fiber_target(case: FiberCase, rng) -> np.ndarray:
    h = _tame_sl2(rng)
    if case is FiberCase.HYP_CIRCLE:
        lam = rng.uniform(1.1, 5.0)
        core = np.diag([lam, 1 / lam])
    elif case is FiberCase.ELL_LINE:
        th = rng.uniform(0.1, math.pi - 0.1)
        core = np.diag([cmath.exp(1j * th), cmath.exp(-1j * th)])
    elif case is FiberCase.PAR_LINE:
        x = complex(*rng.normal(size=2))
        core = np.array([[1, x], [0, 1]])
    elif case is FiberCase.REFL_ORBIT:
        core = ID
    elif case is FiberCase.INV_ORBIT:
        core = -ID
    else:
        # real trace below -2 or a non-real trace: outside the image
        if rng.random() < 0.5:
            lam = rng.uniform(1.1, 5.0)
            core = np.diag([-lam, -1 / lam])
        else:
            t = complex(rng.normal(), rng.uniform(0.1, 2))
            core = np.array([[t, -1], [1, 0]])
    return h @ core @ inv2(h)


def criterion_1(ss, scale=1.0) -> CriterionResult:
    worst = {}
    ok = True
    cases = list(FiberCase)
    for case, sub in zip(cases, ss.spawn(len(cases) + 1)):
        res = 0.0
        for rng in _rngs(sub, _n(100, scale)):
            b = _fiber_target(case, rng)
            f = fiber(b)
            if f.case is not case:
                ok = False
                res = math.inf
                continue
            if case is FiberCase.EMPTY:
                continue
            a = fiber_sample(f, 1, rng)[0]
            res = max(res, fnorm(q(a) - b))
        worst[case.value] = res
        ok &= res <= 1e-8
    converse = [fiber_contains(fiber(q(a)), a, 1e-8)
                for a in (_minus(r) for r in _rngs(ss.spawn(len(cases) + 1)[-1], _n(200, scale)))]
    ok &= all(converse)
    return CriterionResult(1, "fibers of the square map", ok,
                           {"max_residual": worst, "converse_hits": sum(converse),
                            "converse_trials": len(converse)})


# -- 2: image -----------------------------------------------------------------

def criterion_2(ss, scale=1.0) -> CriterionResult:
    im_max, re_min = 0.0, math.inf
    for rng in _rngs(ss, _n(1000, scale)):
        t = trace(q(_minus(rng)))
        im_max = max(im_max, abs(t.imag))
        re_min = min(re_min, t.real)
    neg = fiber(np.diag([-3.0, -1 / 3.0])).case is FiberCase.EMPTY
    par = fiber(np.array([[-1, 1], [0, -1]])).case is FiberCase.EMPTY
    ok = im_max <= 1e-9 and re_min >= -2 and neg and par
    return CriterionResult(2, "image of the square map", ok,
                           {"max_imag_trace": im_max, "min_real_trace": re_min,
                            "trace_minus_10_3_empty": neg, "negative_parabolic_empty": par})


# -- 3: differential ----------------------------------------------------------

def explicit_differentials() -> dict:
    """The three explicit 6x6 matrices of xi -> Ad(A) xi + conj(xi)."""
    lam, th = 2.0, math.pi / 2
    c, s = math.cos(th), math.sin(th)
    hyp = np.diag([lam ** 2 + 1, lam ** -2 + 1, 2, lam ** 2 - 1, lam ** -2 - 1, 0])
    ell = np.array([
        [1, c, 0, 0, -s, 0],
        [c, 1, 0, s, 0, 0],
        [0, 0, 0, 0, 0, 0],
        [0, s, 0, -1, c, 0],
        [-s, 0, 0, c, -1, 0],
        [0, 0, 0, 0, 0, -2],
    ])
    par = np.array([
        [2, -1, -2, 0, 0, 0],
        [0, 2, 0, 0, 0, 0],
        [0, 1, 2, 0, 0, 0],
        [0, 0, 0, 0, -1, -2],
        [0, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 1, 0],
    ])
    u = cmath.exp(0.5j * (th + math.pi))
    points = {
        "hyperbolic": np.diag([lam, 1 / lam]),
        "elliptic": np.array([[0, u], [-1 / u, 0]]),
        "parabolic": np.array([[1, 1], [0, 1]]),
    }
    return {k: (points[k], m) for k, m in
            (("hyperbolic", hyp), ("elliptic", ell), ("parabolic", par))}


def dq_finite_difference(a: ExtIsom, eta: np.ndarray, h: float = 1e-6) -> np.ndarray:
    """Right-trivialized derivative of Q along the chart ``exp(h conj(eta)) A``."""
    x = from_real6(CONJ6 @ eta)
    up = q(ExtIsom(exp_sl(h * x) @ a.m, a.eps))
    dn = q(ExtIsom(exp_sl(-h * x) @ a.m, a.eps))
    return to_real6(mat_to_sl((up - dn) / (2 * h) @ inv2(q(a))))


def criterion_3(ss, scale=1.0) -> CriterionResult:
    explicit = {}
    for name, (m, want) in explicit_differentials().items():
        explicit[name] = float(np.abs(dq_matrix(ExtIsom(m, -1)) - want).max())
    r_gen, r_sing = _rngs(ss.spawn(3)[0], _n(50, scale)), ss.spawn(3)[1]
    generic = [dq_rank(_minus(rng)) for rng in r_gen]
    sing = []
    for i, rng in enumerate(_rngs(r_sing, _n(20, scale))):
        f = fiber(ID if i % 2 == 0 else -ID)
        sing.append(dq_rank(fiber_sample(f, 1, rng)[0]))
    fd = 0.0
    for rng in _rngs(ss.spawn(3)[2], _n(50, scale)):
        a = ExtIsom(_tame_sl2(rng), -1)
        eta = rng.normal(size=6)
        j = dq_matrix(a) @ eta
        fd = max(fd, float(np.linalg.norm(j - dq_finite_difference(a, eta))
                           / max(1.0, np.linalg.norm(j))))
    ok = max(explicit.values()) <= 1e-12 and all(r == 5 for r in generic) \
        and all(r <= 4 for r in sing) and fd <= 1e-5
    return CriterionResult(3, "differential of the square map", ok,
                           {"explicit_max_error": explicit, "generic_ranks": sorted(set(generic)),
                            "singular_ranks": sorted(set(sing)), "fd_max_rel_error": fd})


# -- 4: characters ------------------------------------------------------------

def criterion_4(ss, scale=1.0) -> CriterionResult:
    ident = 0.0
    agree = disagree = shell = 0
    for i, rng in enumerate(_rngs(ss, _n(1000, scale))):
        a = random_sl2(rng)
        if i % 10 == 0:
            # commuting partner: a one-parameter subgroup through a
            s = complex(*rng.normal(size=2))
            b = exp_sl(s * log_sl(a if trace(a).real >= 0 else -a))
        else:
            b = random_sl2(rng)
        tc = trace(commutator(a, b))
        ident = max(ident, abs(kappa(chi(a, b)) - tc) / max(1.0, abs(tc)))
        dist = fnorm(commutator(a, b) - ID)
        if 1e-7 <= dist <= 1e-5:
            shell += 1
            continue
        if dchi_surjective(a, b) == (not commute(a, b)):
            agree += 1
        else:
            disagree += 1
    rate = agree / max(1, agree + disagree)
    ok = ident <= 1e-9 and rate >= 0.999
    return CriterionResult(4, "trace coordinates and commutator", ok,
                           {"kappa_identity_max_rel_error": ident, "agreement": rate,
                            "disagreements": disagree, "in_shell": shell})


# -- 5: square roots ----------------------------------------------------------

def criterion_5(ss, scale=1.0) -> CriterionResult:
    subs = ss.spawn(4)
    fwd = bwd = 0.0
    for rng in _rngs(subs[0], _n(500, scale)):
        while True:
            b = random_sl2(rng)
            if abs(trace(b) + 2) > 1e-3:
                break
        fwd = max(fwd, fnorm(q(sqrt_plus(b)) - b) / max(1.0, fnorm(b)))
    for rng in _rngs(subs[1], _n(500, scale)):
        while True:
            a = ExtIsom(random_sl2(rng), 1)
            if abs(trace(q(a)) + 2) > 1e-3:
                break
        r = sqrt_plus(q(a))
        bwd = max(bwd, min(fnorm(r.m - a.m), fnorm(r.m + a.m)) / max(1.0, fnorm(a.m)))
    raised = 0
    n_par = _n(50, scale)
    for rng in _rngs(subs[2], n_par):
        h = random_sl2(rng)
        x = complex(*rng.normal(size=2))
        try:
            sqrt_plus(h @ np.array([[-1, x], [0, -1]]) @ inv2(h))
        except TraceMinusTwo:
            raised += 1
    tr_id = 0.0
    for rng in _rngs(subs[3], _n(1000, scale)):
        a = random_sl2(rng)
        t = trace(a)
        tr_id = max(tr_id, abs(trace(a @ a) - (t * t - 2)) / max(1.0, abs(t) ** 2))
    ok = fwd <= 1e-9 and bwd <= 1e-9 and raised == n_par and tr_id <= 1e-10
    return CriterionResult(5, "orientation-preserving square roots", ok,
                           {"q_of_root_max_error": fwd, "root_of_q_max_error": bwd,
                            "trace_minus_two_raised": f"{raised}/{n_par}",
                            "trace_identity_max_rel_error": tr_id})


# -- 6: census ----------------------------------------------------------------

def criterion_6(ss, scale=1.0, genera=(1, 2, 3, 4, 5)) -> CriterionResult:
    ok = True
    detail = {}
    for k, sub in zip(genera, ss.spawn(len(genera))):
        rows = census(k)
        labels = {(w1, w2) for w1, w2, _ in rows}
        exact = max(relator(rep)[0] for _, _, rep in rows)
        conj_flips = 0
        stats = {"moves": 0, "flips": 0}
        for (w1, w2, rep), csub in zip(rows, sub.spawn(len(rows))):
            r_conj, r_move = _rngs(csub, 2)
            for _ in range(_n(100, scale)):
                g = random_sl2(r_conj)
                if sw(rep.conjugate(g)) != (w1, w2):
                    conj_flips += 1
            out = sample_component(k, w1, w2, r_move, steps=_n(100, scale), stats=stats)
            if sw(out) != (w1, w2):
                conj_flips += 1
        good = len(rows) == 2 ** (k + 1) and len(labels) == len(rows) and exact <= 1e-12 \
            and conj_flips == 0 and stats["flips"] == 0
        ok &= good
        detail[f"genus_{k}"] = {"classes": len(rows), "distinct": len(labels),
                                "max_relator_residual": exact, "conjugation_flips": conj_flips,
                                "moves": stats["moves"], "move_flips": stats["flips"]}
    return CriterionResult(6, "component census", ok, detail)


# -- 7: connectivity ----------------------------------------------------------

def _connect_trial(k, w1, w2, rng):
    r0 = sample_component(k, w1, w2, rng, steps=20)
    r1 = sample_component(k, w1, w2, rng, steps=20)
    res = connect(r0, r1, rng=rng)
    certified = verify_path(res.nodes, r0, r1).ok
    return res.status is Status.CONNECTED, certified


def criterion_7(ss, scale=1.0, genera=(2, 3)) -> CriterionResult:
    ok = True
    detail = {}
    for k, sub in zip(genera, ss.spawn(len(genera))):
        rows = census(k)
        per_class = {}
        unsound = 0
        class_subs = sub.spawn(len(rows) + 1)
        for (w1, w2, _), csub in zip(rows, class_subs):
            n = _n(50, scale)
            hits = 0
            for rng in _rngs(csub, n):
                connected, certified = _connect_trial(k, w1, w2, rng)
                if connected and certified:
                    hits += 1
                elif connected:
                    unsound += 1
            per_class["".join(map(str, w1)) + f"/{w2}"] = hits / n
        rejected = trials = 0
        labels = [(w1, w2) for w1, w2, _ in rows]
        for rng in _rngs(class_subs[-1], _n(50, scale)):
            i, j = rng.choice(len(labels), size=2, replace=False)
            r0 = sample_component(k, *labels[i], rng, steps=5)
            r1 = sample_component(k, *labels[j], rng, steps=5)
            trials += 1
            try:
                connect(r0, r1, rng=rng)
            except InvariantMismatch:
                rejected += 1
        good = min(per_class.values()) >= 0.9 and unsound == 0 and rejected == trials
        ok &= good
        detail[f"genus_{k}"] = {"success_rate_by_class": per_class,
                                "connected_but_uncertified": unsound,
                                "mismatch_rejected": f"{rejected}/{trials}"}
    return CriterionResult(7, "connectivity within components", ok, detail)


# -- 8: non-liftable curve -----------------------------------------------------

def oscillating_conjugator(t: float) -> np.ndarray:
    s, c = math.sin(1 / t), math.cos(1 / t)
    return np.array([[math.sqrt(2) + s, c], [c, math.sqrt(2) - s]], dtype=complex)


def rotation(theta: float) -> np.ndarray:
    return np.diag([cmath.exp(1j * theta), cmath.exp(-1j * theta)])


def oscillating_curve(theta_of_t, t_end: float = 1e-6, t_start: float = 1.0):
    """Reparametrized ``s -> g_t R_{theta_t} g_t^-1`` with t from t_start down to t_end."""
    def curve(s):
        t = t_start + s * (t_end - t_start)
        g = oscillating_conjugator(t)
        return g @ rotation(theta_of_t(t)) @ inv2(g)
    return curve


def lift_oscillating(theta_of_t) -> str:
    """Outcome name of lifting the oscillating curve along Q."""
    curve = oscillating_curve(theta_of_t)
    f = fiber(curve(0.0))
    start = fiber_point(f, 1.0 if f.case is FiberCase.ELL_LINE else 0.0)
    try:
        lift_path(LiftProblem(MapId.FNM2, (start,), curve))
    except (RankDrop, StepUnderflow) as err:
        return type(err).__name__
    except Exception as err:   # any other failure is reported, never a lift
        return type(err).__name__
    return "Lifted"


def criterion_8(ss=None, scale=1.0) -> CriterionResult:
    outcomes = {
        "theta=pi-t": lift_oscillating(lambda t: math.pi - t),
        "theta=t": lift_oscillating(lambda t: t),
    }
    ok = all(v in ("RankDrop", "StepUnderflow") for v in outcomes.values())
    return CriterionResult(8, "non-liftable oscillating curve", ok, outcomes)


CRITERIA = {
    1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4,
    5: criterion_5, 6: criterion_6, 7: criterion_7, 8: criterion_8,
}


def run_suite(seed: int, criteria=None, scale: float = 1.0) -> list:
    root = np.random.SeedSequence(seed)
    subs = dict(zip(sorted(CRITERIA), root.spawn(len(CRITERIA))))
    chosen = sorted(criteria) if criteria else sorted(CRITERIA)
    return [CRITERIA[i](subs[i], scale) for i in chosen]
