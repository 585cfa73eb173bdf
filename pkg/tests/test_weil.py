import math
import random

import numpy as np
import pytest

from weyljet.series import OscillatoryScalar
from weyljet.weil import (Central, Fourier, GaussianJet, Linear, Shear,
                          UndefinedWeilActionError, act_fourier, act_gl,
                          act_shear, act_word, factor_sp, jet_context,
                          jets_equal_mod_center, word_matrix)


def basic_jet(n=1, cap=6, T=None, mode="weil0", amp=None):
    ctx = jet_context(n, cap)
    if T is None:
        T = np.zeros((n, n))
    a = ctx.one() if amp is None else amp
    return GaussianJet(mode, T, a)


def rand_weil_jet(n, cap, rng):
    ctx = jet_context(n, cap)
    R = np.array([[rng.uniform(-1, 1) for _ in range(n)] for _ in range(n)])
    R = (R + R.T) / 2
    L = np.array([[rng.uniform(0.2, 1) if i == j else rng.uniform(-0.4, 0.4) * (i > j)
                   for j in range(n)] for i in range(n)])
    T = R + 1j * (L @ L.T + 0.4 * np.eye(n))
    amp = ctx.one()
    for _ in range(3):
        exp = {f"u{rng.randint(1, n)}": rng.randint(0, 2)}
        amp = amp + ctx.monomial(exp, complex(rng.uniform(-1, 1), rng.uniform(-1, 1)))
    return GaussianJet("weil", T, amp)


def test_shear_additivity_and_identity():
    jet = basic_jet()
    j1 = act_shear([[1.0]], act_shear([[0.5]], jet))
    j2 = act_shear([[1.5]], jet)
    assert j1.is_close(j2)
    assert act_shear([[0.0]], jet).is_close(jet)
    assert abs(act_shear([[1.0]], jet).T[0, 0] - 1.0) < 1e-14


def test_gl_formula_and_multiplicativity():
    ctx = jet_context(1, 6)
    f = ctx.one() + ctx.variable("u1")
    jet = GaussianJet("weil0", [[2.0]], f)
    out = act_gl([[2.0]], jet)
    # T -> T/4, amplitude -> 2^{-1/2} f(u/2)
    assert abs(out.T[0, 0] - 0.5) < 1e-14
    got = out.flattened()[2]
    expected = (ctx.one() + 0.5 * ctx.variable("u1")) * 2 ** -0.5
    assert got.distance(expected) < 1e-12
    rng = random.Random(0)
    for _ in range(5):
        jet2 = rand_weil_jet(2, 6, rng)
        B1 = np.array([[1.0, 0.3], [0.0, 2.0]])
        B2 = np.array([[0.5, 0.0], [-0.2, 1.0]])
        a = act_gl(B1, act_gl(B2, jet2))
        b = act_gl(B1 @ B2, jet2)
        assert a.is_close(b, 1e-10)


def test_gl_identity():
    jet = basic_jet(2)
    assert act_gl(np.eye(2), jet).is_close(jet)


def test_fourier_standard_gaussian_self_dual():
    # T = i, f = 1: the standard Gaussian maps to itself with unit prefactor
    jet = basic_jet(T=[[1j]], mode="weil")
    out = act_fourier(None, jet)
    assert abs(out.T[0, 0] - 1j) < 1e-12
    assert out.is_close(jet, 1e-9)


def test_fourier_real_branch():
    for k in (1.0, -1.0, 2.0, -2.0, 3.0):
        jet = basic_jet(T=[[k]])
        out = act_fourier(None, jet)
        assert abs(out.T[0, 0] + 1.0 / k) < 1e-12
        lead = out.scalar.leading()[1]
        expected = math.e ** 0 * np.exp(1j * math.pi * math.copysign(1, k) / 4) / math.sqrt(abs(k))
        assert abs(lead - expected) < 1e-12


def test_fourier_degenerate_undefined_in_weil0():
    jet = basic_jet(T=[[0.0]])
    with pytest.raises(UndefinedWeilActionError):
        act_fourier(None, jet)


def test_fourier_conjugation_rule():
    # under the pinned kernel exp(+i x.xi/h): Fourier o (x.) = (-ih d) o Fourier,
    # so Fourier(e^{iTu^2/2h} f(u)) = f(-ih d) Fourier(e^{iTu^2/2h})
    ctx = jet_context(1, 8)
    T = 0.7
    f = ctx.one() + 2 * ctx.variable("u1") + ctx.monomial({"u1": 2}, 0.5)
    jet = GaussianJet("weil0", [[T]], f)
    out = act_fourier(None, jet)
    # oracle: apply f(-ih d_u) to the closed-form transform of the bare Gaussian
    bare = act_fourier(None, basic_jet(T=[[T]], cap=8))
    Tb = bare.T[0, 0]
    # (-ih d) acting on e^{iTb u^2/2h} g: effective op -ih d + (Tb u)
    def xi_op(g):
        return (g.diff("u1") * -1j).shift_exponent("h", 1) + ctx.variable("u1") * Tb * g
    g0 = bare.amplitude
    oracle_amp = f.coefficient({}) * g0 \
        + 2 * xi_op(g0) + 0.5 * xi_op(xi_op(g0))
    oracle = GaussianJet("weil0", bare.T.real, oracle_amp, bare.scalar)
    assert out.is_close(oracle, 1e-10)


def test_partial_fourier_block():
    # n=2, transform only u2; T block-diagonal keeps u1 untouched
    T = np.array([[2.0, 0.0], [0.0, 3.0]])
    jet = basic_jet(2, T=T)
    out = act_fourier(["u2"], jet)
    assert abs(out.T[0, 0] - 2.0) < 1e-12
    assert abs(out.T[1, 1] + 1.0 / 3.0) < 1e-12
    lead = out.scalar.leading()[1]
    assert abs(lead - np.exp(1j * math.pi / 4) / math.sqrt(3.0)) < 1e-12


def test_word_empty_identity_and_central():
    jet = basic_jet()
    assert act_word([], jet).is_close(jet)
    out = act_word([Central(2)], jet)
    assert out.scalar.leading()[1] == -1.0


def test_word_dense_subset_defined_on_T0():
    jet = basic_jet()
    word = [Shear(((1.0,),)), Fourier(None), Shear(((1.0,),))]
    out = act_word(word, jet)
    assert abs(out.T[0, 0] - 0.0) < 1e-12  # 1 + (-1/1) = 0
    with pytest.raises(UndefinedWeilActionError) as err:
        act_word([Fourier(None)], jet)
    assert err.value.step == 0


def test_mixed_relation_gl_shear():
    rng = random.Random(1)
    jet = rand_weil_jet(2, 6, rng)
    A = np.array([[1.0, 0.2], [0.2, -0.5]])
    B = np.array([[2.0, 0.0], [1.0, 1.0]])
    lhs = act_gl(B, act_shear(A, jet))
    Binv = np.linalg.inv(B)
    rhs = act_shear(Binv.T @ A @ Binv, act_gl(B, jet))
    assert lhs.is_close(rhs, 1e-10)


def test_word_matrix_and_factorization():
    rng = random.Random(2)
    n = 1
    for _ in range(20):
        w1 = [Shear(((rng.uniform(-1, 1),),)), Fourier(None)]
        w2 = [Linear(((rng.choice([1.0, 2.0, -1.5]),),)), Shear(((rng.uniform(-1, 1),),))]
        word = w1 + w2
        M = word_matrix(word, n)
        assert np.allclose(M.T @ np.array([[0, 1], [-1, 0]]) @ M,
                           np.array([[0, 1], [-1, 0]]))
        try:
            canon = factor_sp(M)
        except Exception:
            continue
        assert np.allclose(word_matrix(canon, n), M, atol=1e-10)


def test_composition_up_to_center():
    rng = random.Random(3)
    count = 0
    for n in (1, 2):
        while count < (25 if n == 1 else 50):
            jet = rand_weil_jet(n, 6, rng)
            def rand_gen():
                r = rng.random()
                if r < 0.4:
                    A = np.array([[rng.uniform(-1, 1) for _ in range(n)] for _ in range(n)])
                    return Shear(tuple(map(tuple, (A + A.T) / 2)))
                if r < 0.7:
                    B = np.array([[rng.uniform(-1, 1) for _ in range(n)] for _ in range(n)])
                    B += np.eye(n) * (1.5 if abs(np.linalg.det(B)) < 0.3 else 0)
                    if abs(np.linalg.det(B)) < 0.2:
                        return Shear(tuple(map(tuple, np.eye(n))))
                    return Linear(tuple(map(tuple, B)))
                return Fourier(None)
            word = [rand_gen(), rand_gen()]
            M = word_matrix(word, n)
            try:
                canon = factor_sp(M)
            except Exception:
                continue
            stepwise = act_word(word, jet)
            composed = act_word(canon, jet)
            ok, lam, resid = jets_equal_mod_center(composed, stepwise, 1e-8)
            assert ok, (word, lam, resid)
            count += 1
        count = 0


def test_degenerate_mode_limit_consistency():
    # real-T actions are limits of Im T -> 0+ actions
    ctx = jet_context(1, 6)
    amp = ctx.one() + ctx.variable("u1")
    k = 1.5
    real_out = act_fourier(None, GaussianJet("weil0", [[k]], amp))
    prev = None
    for delta in (1e-2, 1e-3, 1e-4):
        lim_out = act_fourier(None, GaussianJet("weil", [[k + 1j * delta]], amp))
        _, _, a_lim = lim_out.flattened()
        _, _, a_real = real_out.flattened()
        resid = a_lim.distance(a_real) + np.max(np.abs(lim_out.T - real_out.T))
        assert resid < 20 * delta
        if prev is not None:
            assert resid < prev
        prev = resid


def test_json_round_trip():
    rng = random.Random(4)
    jet = rand_weil_jet(2, 6, rng)
    jet2 = GaussianJet.from_json(jet.to_json())
    assert jet2.is_close(jet, 1e-12)
