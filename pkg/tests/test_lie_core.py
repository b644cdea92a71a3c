import numpy as np
import pytest
import scipy.linalg
from hypothesis import given

from conftest import rand_ext, rand_sl2, seeds
from isomh3.errors import DegenerateInput
from isomh3.lie_core import (
    CONJ6, ID, REFL, ROT, ExtIsom, ad_complex, ad_real6, adjoint, compose, conj_by, det2,
    exp_sl, fnorm, from_real6, inv2, log_sl, mat_to_sl, psl_dist, psl_eq, psl_log,
    sl_geodesic, sl_to_mat, to_real6, unit_mat,
)


def test_special_elements():
    assert np.allclose(ROT @ ROT, -ID)
    assert np.allclose(REFL @ REFL.conj(), ID)
    assert det2(ROT) == 1 and det2(REFL) == 1


def test_unit_mat_normalizes_and_rejects_singular():
    m = unit_mat(np.array([[2, 0], [0, 8]]))
    assert abs(det2(m) - 1) < 1e-15
    with pytest.raises(DegenerateInput):
        unit_mat(np.array([[1, 2], [2, 4]]))


def test_ext_rejects_bad_eps():
    with pytest.raises(ValueError):
        ExtIsom(ID, 0)


@given(seeds)
def test_composition_is_associative(seed):
    rng = np.random.default_rng(seed)
    a, b, c = (rand_ext(rng) for _ in range(3))
    assert psl_eq(compose(compose(a, b), c), compose(a, compose(b, c)), 1e-10)


@given(seeds)
def test_inverse(seed):
    a = rand_ext(np.random.default_rng(seed))
    assert psl_eq(compose(a, a.inverse()), ExtIsom(ID, 1), 1e-10)
    assert psl_eq(compose(a.inverse(), a), ExtIsom(ID, 1), 1e-10)


@given(seeds)
def test_conjugation_is_an_action_and_a_homomorphism(seed):
    rng = np.random.default_rng(seed)
    g, h = rand_sl2(rng), rand_sl2(rng)
    a, b = rand_ext(rng), rand_ext(rng)
    assert psl_eq(conj_by(g @ h, a), conj_by(g, conj_by(h, a)), 1e-9)
    assert psl_eq(conj_by(g, compose(a, b)), compose(conj_by(g, a), conj_by(g, b)), 1e-9)
    # conjugation by g is composition with (g, +1) on both sides
    gg = ExtIsom(g, 1)
    assert psl_eq(conj_by(g, a), compose(compose(gg, a), gg.inverse()), 1e-9)


def test_psl_distance_ignores_sign():
    a = ExtIsom(ROT, -1)
    assert psl_dist(a, -a) == 0
    assert psl_dist(a, ExtIsom(ROT, 1)) == np.inf


@given(seeds)
def test_exp_matches_scipy(seed):
    rng = np.random.default_rng(seed)
    xi = from_real6(rng.normal(size=6))
    assert fnorm(exp_sl(xi) - scipy.linalg.expm(sl_to_mat(xi))) <= 1e-10 * fnorm(exp_sl(xi))


def test_exp_small_argument_branch():
    xi = np.array([1e-8, 2e-8j, -3e-9])
    assert fnorm(exp_sl(xi) - scipy.linalg.expm(sl_to_mat(xi))) < 1e-15


@given(seeds)
def test_log_inverts_exp(seed):
    rng = np.random.default_rng(seed)
    xi = from_real6(rng.normal(size=6) * 0.5)
    assert np.allclose(log_sl(exp_sl(xi)), xi, atol=1e-10)
    m = rand_sl2(rng)
    assert fnorm(exp_sl(psl_log(-m)) - m) <= 1e-9 * max(1, fnorm(m)) or \
        fnorm(exp_sl(psl_log(-m)) + m) <= 1e-9 * max(1, fnorm(m))


@given(seeds)
def test_adjoint_matches_matrix_conjugation(seed):
    rng = np.random.default_rng(seed)
    x = rand_sl2(rng)
    xi = from_real6(rng.normal(size=6))
    direct = mat_to_sl(x @ sl_to_mat(xi) @ inv2(x))
    assert np.allclose(ad_complex(x) @ xi, direct, atol=1e-10)
    v = to_real6(xi)
    assert np.allclose(ad_real6(x) @ v, to_real6(direct), atol=1e-10)


def test_real6_roundtrip_and_conjugation_matrix():
    xi = np.array([1 + 2j, -3j, 0.5])
    assert np.allclose(from_real6(to_real6(xi)), xi)
    assert np.allclose(from_real6(CONJ6 @ to_real6(xi)), xi.conj())


def test_geodesic_endpoints(rng):
    m0, m1 = rand_sl2(rng), rand_sl2(rng)
    path = sl_geodesic(m0, m1)
    assert fnorm(path(0) - m0) < 1e-12
    end = path(1)
    assert min(fnorm(end - m1), fnorm(end + m1)) < 1e-9


def test_twisted_conjugation_example():
    out = conj_by(np.diag([2.0, 0.5]), ExtIsom(REFL, -1))
    assert psl_eq(out, ExtIsom(np.array([[0, 4j], [0.25j, 0]]), -1), 1e-12)
    assert psl_eq(conj_by(ID, out), out, 0)


def test_psl_eq_examples():
    m = rand_sl2(np.random.default_rng(0))
    assert psl_eq(ExtIsom(m, 1), ExtIsom(-m, 1))
    assert not psl_eq(ExtIsom(ID, 1), ExtIsom(ID, -1))
    e = np.array([[1e-8, 0], [0, 0]])
    assert not psl_eq(ExtIsom(m, 1), ExtIsom(m + 10 * 1e-9 * max(1, fnorm(m)) * e / 1e-8 * 1.01, 1))


def test_adjoint_examples_and_composition(rng):
    xi = np.array([1 + 1j, -2, 0.5j])
    assert np.allclose(adjoint(ID, xi), xi)
    lam = 1.7
    assert np.allclose(adjoint(np.diag([lam, 1 / lam]), xi),
                       [lam ** 2 * xi[0], xi[1] / lam ** 2, xi[2]])
    x, y = rand_sl2(rng), rand_sl2(rng)
    lhs = adjoint(x @ y, xi)
    assert np.abs(lhs - adjoint(x, adjoint(y, xi))).max() <= 1e-10 * max(1, np.abs(lhs).max())


def test_real6_basis_case():
    assert np.array_equal(to_real6([1j, 0, 0]), [0, 0, 0, 1, 0, 0])
    assert np.array_equal(to_real6([0, 0, 0]), np.zeros(6))
