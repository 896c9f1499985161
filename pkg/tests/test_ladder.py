import numpy as np
import numpy.testing as npt
import pytest

import ou_spectral as ou
from ou_spectral import errors
from ou_spectral.mpoly import MPoly, hermite

from conftest import A_SPIRAL


def test_build_model_solves_lyapunov(model_3d):
    resid = model_3d.A @ model_3d.Sigma + model_3d.Sigma @ model_3d.A.T + model_3d.B
    assert np.max(np.abs(resid)) < 1e-12
    npt.assert_allclose(model_3d.Sigma @ model_3d.Sigma_inv, np.eye(3), atol=1e-12)


def test_build_model_rejects_bad_inputs():
    with pytest.raises(errors.UnstableDriftError):
        ou.build_model([[0.5]], [[1.0]])
    with pytest.raises(errors.UnstableDriftError):
        ou.build_model([[0.0]], [[1.0]])
    with pytest.raises(errors.DefectiveMatrixError):
        ou.build_model([[-1.0, 1.0], [0.0, -1.0]], np.eye(2))
    with pytest.raises(errors.DimensionMismatchError):
        ou.build_model([[-1.0]], np.eye(2))


def test_one_dimensional_eigenfunctions_are_hermite(model_1d):
    # Canonical 1D model: both families reduce to physicists' Hermites
    for n in range(7):
        f = ou.forward_eigenfunction(model_1d, (n,))
        g = ou.adjoint_eigenfunction(model_1d, (n,))
        assert ou.coeff_distance(f.poly, hermite(n)) <= 1e-12
        assert ou.coeff_distance(g, hermite(n)) <= 1e-12
    assert ou.forward_eigenfunction(model_1d, (2,)).poly.terms == {
        (0,): complex(-2),
        (2,): complex(4),
    }


def test_eigenvalue_combination(model_spiral):
    lam = ou.eigenvalue(model_spiral, (2, 1))
    npt.assert_allclose(lam, 2 * (-1 + 2j) + (-1 - 2j), atol=1e-12)
    assert ou.eigenvalue(model_spiral, (0, 0)) == 0.0


def test_stationary_state_is_annihilated(four_models):
    for model in four_models.values():
        f0 = ou.forward_eigenfunction(model, (0,) * model.dim)
        assert ou.apply_forward(model, f0).poly.max_coeff() <= 1e-12
        g0 = ou.adjoint_eigenfunction(model, (0,) * model.dim)
        assert ou.apply_adjoint(model, g0).max_coeff() <= 1e-12
        for I in range(model.dim):
            assert ou.lower_forward(model, I, f0).poly.max_coeff() <= 1e-12
            assert ou.lower_adjoint(model, I, g0).max_coeff() <= 1e-12


def _numeric_forward(model, f, x, h=1e-3):
    # Direct stencil evaluation of -div(A y q) + (1/2) B : Hess q
    n = model.dim
    A, B = model.A, model.B

    def q(y):
        return complex(f.poly(y)) * f.base.pdf(np.asarray(y))

    def flux(y, i):
        return float(A[i, :] @ np.asarray(y)) * q(y)

    out = 0.0
    for i in range(n):
        ep = np.array(x, dtype=float)
        em = np.array(x, dtype=float)
        ep[i] += h
        em[i] -= h
        out -= (flux(ep, i) - flux(em, i)) / (2 * h)
    for i in range(n):
        for j in range(n):
            if B[i, j] == 0.0:
                continue
            if i == j:
                ep = np.array(x, dtype=float)
                em = np.array(x, dtype=float)
                ep[i] += h
                em[i] -= h
                second = (q(ep) - 2 * q(np.array(x, dtype=float)) + q(em)) / h**2
            else:
                pp = np.array(x, dtype=float)
                pm = np.array(x, dtype=float)
                mp = np.array(x, dtype=float)
                mm = np.array(x, dtype=float)
                pp[i] += h
                pp[j] += h
                pm[i] += h
                pm[j] -= h
                mp[i] -= h
                mp[j] += h
                mm[i] -= h
                mm[j] -= h
                second = (q(pp) - q(pm) - q(mp) + q(mm)) / (4 * h**2)
            out += 0.5 * B[i, j] * second
    return out


def test_apply_forward_matches_numeric_differentiation(model_spiral, model_3d):
    rng = np.random.default_rng(29)
    for model in (model_spiral, model_3d):
        p = MPoly(
            model.dim,
            {
                tuple(int(e) for e in exps): complex(c)
                for exps, c in zip(
                    rng.integers(0, 3, size=(5, model.dim)), rng.normal(size=5)
                )
            },
        )
        f = ou.ForwardFunction(p, model.f0)
        Lf = ou.apply_forward(model, f)
        for _ in range(4):
            x = rng.normal(size=model.dim) * 0.7
            want = _numeric_forward(model, f, x)
            got = Lf.value(x)
            assert abs(got - want) <= 2e-4 * max(1.0, abs(want))


def test_apply_adjoint_matches_numeric_differentiation(model_spiral):
    rng = np.random.default_rng(31)
    model = model_spiral
    g = MPoly(2, {(2, 1): 0.7, (1, 0): -1.2, (0, 3): 0.4})
    Lg = ou.apply_adjoint(model, g)
    h = 1e-4

    def val(y):
        return complex(g(y))

    for _ in range(4):
        x = rng.normal(size=2) * 0.8
        acc = 0.0
        for i in range(2):
            ep, em = x.copy(), x.copy()
            ep[i] += h
            em[i] -= h
            acc += float(model.A[i, :] @ x) * (val(ep) - val(em)) / (2 * h)
            acc += 0.5 * model.B[i, i] * (val(ep) - 2 * val(x) + val(em)) / h**2
        assert abs(complex(Lg(x)) - acc) <= 1e-5 * max(1.0, abs(acc))


def test_raising_operators_commute(model_spiral, model_3d):
    for model in (model_spiral, model_3d):
        f0 = ou.forward_eigenfunction(model, (0,) * model.dim)
        a = ou.raise_forward(model, 0, ou.raise_forward(model, 1, f0))
        b = ou.raise_forward(model, 1, ou.raise_forward(model, 0, f0))
        assert ou.coeff_distance(a.poly, b.poly) <= 1e-12
        g0 = ou.adjoint_eigenfunction(model, (0,) * model.dim)
        a = ou.raise_adjoint(model, 0, ou.raise_adjoint(model, 1, g0))
        b = ou.raise_adjoint(model, 1, ou.raise_adjoint(model, 0, g0))
        assert ou.coeff_distance(a, b) <= 1e-12


def test_cross_commutator_is_twice_identity(model_spiral):
    # lower then raise minus raise then lower equals 2 delta_IJ
    model = model_spiral
    p = MPoly(2, {(2, 0): 1.0, (1, 1): -0.5, (0, 0): 2.0})
    for I in range(2):
        for J in range(2):
            a = ou.lower_adjoint(model, J, ou.raise_adjoint(model, I, p))
            b = ou.raise_adjoint(model, I, ou.lower_adjoint(model, J, p))
            want = (2.0 if I == J else 0.0) * p
            assert ou.coeff_distance(a - b, want) <= 1e-12


def test_eigenfunction_conjugate_pair_symmetry(model_spiral):
    f = ou.forward_eigenfunction(model_spiral, (2, 1))
    fc = ou.forward_eigenfunction(model_spiral, (1, 2))
    assert ou.coeff_distance(fc.poly, f.poly.conj()) <= 1e-12
    g = ou.adjoint_eigenfunction(model_spiral, (2, 1))
    gc = ou.adjoint_eigenfunction(model_spiral, (1, 2))
    assert ou.coeff_distance(gc, g.conj()) <= 1e-12


def test_eigenfunction_memoized(model_spiral):
    a = ou.forward_eigenfunction(model_spiral, (2, 2))
    b = ou.forward_eigenfunction(model_spiral, (2, 2))
    assert a is b


def test_eigenfunction_polynomial_degree(model_diag):
    for K in [(1, 0), (2, 1), (3, 3)]:
        f = ou.forward_eigenfunction(model_diag, K)
        assert f.poly.degree() == sum(K)


def test_mode_normalization_values():
    assert ou.mode_normalization((0,)) == 1.0
    assert ou.mode_normalization((1,)) == 2.0
    assert ou.mode_normalization((3,)) == 48.0
    assert ou.mode_normalization((6,)) == 46080.0
    assert ou.mode_normalization((1, 2, 1)) == 32.0


def test_enumerate_modes_graded_lex():
    assert ou.enumerate_modes(2, 2) == [
        (0, 0),
        (1, 0),
        (0, 1),
        (2, 0),
        (1, 1),
        (0, 2),
    ]
    assert len(ou.enumerate_modes(3, 4)) == 35
    assert ou.enumerate_modes(1, 3) == [(0,), (1,), (2,), (3,)]


def test_mode_index_validation(model_spiral):
    with pytest.raises(errors.ModeOutOfRangeError):
        ou.raise_forward(
            model_spiral, 2, ou.forward_eigenfunction(model_spiral, (0, 0))
        )
    with pytest.raises(errors.ModeIndexMismatchError):
        ou.forward_eigenfunction(model_spiral, (1,))
    with pytest.raises(errors.ModeIndexMismatchError):
        ou.forward_eigenfunction(model_spiral, (1, -1))
    with pytest.raises(errors.ModeIndexMismatchError):
        ou.eigenvalue(model_spiral, (1, 2, 3))


def test_forward_function_base_is_checked(model_spiral):
    other = ou.GaussianDensity(mean=[0.1, 0.0], cov=0.5 * np.eye(2))
    f = ou.ForwardFunction(MPoly(2, {(0, 0): 1.0}), other)
    with pytest.raises(errors.DimensionMismatchError):
        ou.apply_forward(model_spiral, f)


def test_prune_eps_propagates_through_model():
    model = ou.build_model(A_SPIRAL, np.eye(2), prune_eps=1e-10)
    f = ou.forward_eigenfunction(model, (2, 1))
    assert f.poly.prune_eps == 1e-10
