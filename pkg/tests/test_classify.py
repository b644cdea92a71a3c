import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import rand_sl2, seeds
from isomh3.classify import (
    Kind, MinusType, canonical_eigenvalue, classify_minus, normal_form,
)
from isomh3.errors import DegenerateInput, NotInMinusComponent
from isomh3.lie_core import ID, ROT, ExtIsom, conj_by, fnorm, inv2


def _check(b, nf):
    g = nf.conjugator
    assert fnorm(g @ b @ inv2(g) - nf.matrix) <= 1e-8


def test_identity_and_minus_identity():
    assert normal_form(ID).kind is Kind.IDENTITY
    assert normal_form(-ID).kind is Kind.MINUS_IDENTITY
    assert np.allclose(normal_form(-ID).conjugator, ID)


def test_diagonal_example_matches_characteristic_polynomial():
    b = np.array([[2, 1], [1, 1]])
    nf = normal_form(b)
    # roots of x^2 - 3x + 1
    roots = np.roots([1, -3, 1])
    assert nf.kind is Kind.DIAGONAL
    assert abs(nf.lam - roots.max()) < 1e-12
    _check(b, nf)


def test_parabolic_scaling_example():
    b = np.array([[1, 5], [0, 1]])
    nf = normal_form(b)
    assert nf.kind is Kind.PARABOLIC_PLUS
    _check(b, nf)


@given(seeds, st.sampled_from([1, -1]))
def test_parabolic_normal_forms(seed, sign):
    rng = np.random.default_rng(seed)
    h = rand_sl2(rng)
    x = complex(*rng.normal(size=2)) + 0.5
    b = h @ np.array([[sign, x], [0, sign]]) @ inv2(h)
    nf = normal_form(b)
    assert nf.kind is (Kind.PARABOLIC_PLUS if sign == 1 else Kind.PARABOLIC_MINUS)
    _check(b, nf)


@given(seeds)
def test_diagonal_normal_form_and_eigenvalue(seed):
    rng = np.random.default_rng(seed)
    b = rand_sl2(rng)
    nf = normal_form(b)
    assert nf.kind is Kind.DIAGONAL
    assert abs(nf.lam) >= 1 - 1e-12
    assert abs(nf.lam + 1 / nf.lam - np.trace(b)) <= 1e-9 * max(1, abs(nf.lam))
    _check(b, nf)


def test_canonical_eigenvalue_tie_break():
    lam = canonical_eigenvalue(2 * math.cos(0.7))
    assert abs(abs(lam) - 1) < 1e-12 and lam.imag > 0


def test_non_finite_input():
    with pytest.raises(DegenerateInput):
        normal_form(np.array([[np.nan, 0], [0, 1]]))


def test_conjugator_continuous_along_constant_type():
    h = rand_sl2(np.random.default_rng(3))
    prev = None
    for t in np.linspace(0, 1, 50):
        b = h @ np.diag([2 + t, 1 / (2 + t)]) @ inv2(h)
        g = normal_form(b).conjugator
        if prev is not None:
            assert fnorm(g - prev) < 0.1
        prev = g


@pytest.mark.parametrize("m, want", [
    (ID, MinusType.REFLECTION),
    (ROT, MinusType.POINT_INVERSION),
    (np.diag([1 + 1j, 1 / (1 + 1j)]), MinusType.HYPERBOLIC_GLIDE),
    (np.array([[0, 1j * np.exp(0.3j)], [1j * np.exp(-0.3j), 0]]), MinusType.ROTATORY_REFLECTION),
    (np.array([[1, 0.5], [0, 1]]), MinusType.PARABOLIC_REFLECTION),
])
def test_classify_minus_examples(m, want):
    assert classify_minus(ExtIsom(m, -1)) is want


@given(seeds)
def test_classify_minus_is_conjugation_invariant(seed):
    rng = np.random.default_rng(seed)
    a = ExtIsom(rand_sl2(rng), -1)
    g = rand_sl2(rng)
    assert classify_minus(conj_by(g, a)) is classify_minus(a)


def test_classify_minus_requires_reversing():
    with pytest.raises(NotInMinusComponent):
        classify_minus(ExtIsom(ID, 1))
