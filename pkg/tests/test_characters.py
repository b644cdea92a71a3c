import numpy as np
import pytest
from hypothesis import given

from conftest import rand_sl2, seeds
from isomh3.characters import (
    Component, TraceCoords, chi, commutator, commute, dchi_real, dchi_surjective,
    kappa, plan_target,
)
from isomh3.lie_core import ID, from_real6, inv2, sl_to_mat

D = np.diag([2.0, 0.5])
U = np.array([[1.0, 1.0], [0.0, 1.0]])


def test_chi_examples():
    assert chi(ID, ID) == (2, 2, 2)
    assert np.allclose(chi(D, U), (2.5, 2, 2.5))


def test_kappa_examples():
    assert kappa((2, 2, 2)) == 2
    assert kappa((2.5, 2, 2.5)) == 2
    assert abs(np.trace(commutator(D, U)) - 2) < 1e-12
    assert kappa((3, 3, 3)) == -2
    assert kappa((3, 3, -3)) == 52


@given(seeds)
def test_kappa_is_commutator_trace(seed):
    rng = np.random.default_rng(seed)
    a, b = rand_sl2(rng), rand_sl2(rng)
    tc = np.trace(a @ b @ inv2(a) @ inv2(b))
    assert abs(kappa(chi(a, b)) - tc) <= 1e-9 * max(1, abs(tc))


@given(seeds)
def test_chi_is_conjugation_invariant(seed):
    rng = np.random.default_rng(seed)
    a, b, g = rand_sl2(rng), rand_sl2(rng), rand_sl2(rng)
    t0 = np.array(chi(a, b))
    t1 = np.array(chi(g @ a @ inv2(g), g @ b @ inv2(g)))
    assert np.abs(t0 - t1).max() <= 1e-10 * max(1, np.abs(t0).max())


def _analytic_dchi(a, b):
    """d/ds tr(exp(s X) A) = tr(X A); columns in the same order as dchi_real."""
    cols = []
    for which in (0, 1):
        for k in range(6):
            e = np.zeros(6)
            e[k] = 1
            x = sl_to_mat(from_real6(e))
            if which == 0:
                d = (np.trace(x @ a), 0, np.trace(x @ a @ b))
            else:
                d = (0, np.trace(x @ b), np.trace(a @ x @ b))
            d = np.array(d, dtype=complex)
            cols.append(np.concatenate([d.real, d.imag]))
    return np.column_stack(cols)


@given(seeds)
def test_dchi_matches_analytic_jacobian(seed):
    rng = np.random.default_rng(seed)
    a, b = rand_sl2(rng), rand_sl2(rng)
    assert np.abs(dchi_real(a, b) - _analytic_dchi(a, b)).max() <= 1e-6


@pytest.mark.parametrize("a, b, want", [
    (ID, rand_sl2(np.random.default_rng(0)), False),
    (D, U, True),
    (D, np.diag([3.0, 1 / 3]), False),
])
def test_dchi_surjective_examples(a, b, want):
    assert dchi_surjective(a, b) is want
    assert commute(a, b) is not want


def test_dchi_surjective_agrees_with_commutator_test():
    rng = np.random.default_rng(7)
    agree = 0
    for i in range(300):
        a = rand_sl2(rng)
        # every third pair commutes: b lies in a one-parameter subgroup through a
        b = a @ a if i % 3 == 0 else rand_sl2(rng)
        agree += dchi_surjective(a, b) == (not commute(a, b))
    assert agree == 300


@pytest.mark.parametrize("component", list(Component))
def test_plan_target_boxes(component):
    rng = np.random.default_rng(5)
    for _ in range(200):
        t = plan_target(component, rng)
        assert isinstance(t, TraceCoords)
        assert all(v.imag == 0 for v in t)
        assert t.x.real > -2 and t.y.real > -2
        if component is Component.PLUS_ID:
            assert t.z.real > -2
        else:
            assert t.z.real < -2
        assert abs(kappa(t) - 2) >= 0.1
