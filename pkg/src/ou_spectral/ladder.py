"""Ladder operators and eigenfunctions of the OU Fokker-Planck operator.

The forward operator L q = -div(A x q) + (1/2) B : Hess q has stationary
density f0, a zero-mean Gaussian whose covariance solves the Lyapunov
equation.  Its spectrum is generated from f0 by per-mode raising
operators, one for each eigenvalue of the drift matrix A; the adjoint
operator gets its own raising family built from the left eigenvectors.
Everything is reduced to exact polynomial arithmetic: a forward function
is stored as polynomial times f0, an adjoint function as a bare
polynomial, and each operator application is a closed-form map between
those polynomials.

Eigenfunctions are memoized on the model, keyed by their multi-index.
Concurrent builds may race to insert a cache entry; both compute the
same value, so last write wins harmlessly.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import (
    DimensionMismatchError,
    ModeIndexMismatchError,
    ModeOutOfRangeError,
    UnstableDriftError,
)
from .gaussian import ForwardFunction, GaussianDensity, stationary_density
from .mpoly import DEFAULT_PRUNE_EPS, MPoly


@dataclass
class OUModel:
    """Drift, diffusion, stationary covariance, and drift eigensystem.

    ``eig.right[:, I]`` is the right eigenvector for mode ``I`` and
    ``eig.left[I, :]`` the matching left eigenvector; the two bases are
    mutually bi-orthogonal.  Caches on the instance hold eigenfunctions
    and operator ingredients; treat everything returned from them as
    immutable.
    """

    A: np.ndarray
    B: np.ndarray
    Sigma: np.ndarray
    Sigma_inv: np.ndarray
    eig: linalg.EigenSystem
    f0: GaussianDensity
    conj_partner: np.ndarray
    tol: float
    prune_eps: float
    _forward_cache: dict = field(default_factory=dict, repr=False, compare=False)
    _adjoint_cache: dict = field(default_factory=dict, repr=False, compare=False)
    _op_cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def dim(self):
        return self.A.shape[0]

    def eigenvalue_of_mode(self, I):
        _check_mode(self, I)
        return complex(self.eig.values[I])


def build_model(A, B, tol=1e-9, prune_eps=DEFAULT_PRUNE_EPS):
    """Assemble an OU model from drift and diffusion matrices.

    Parameters
    ----------
    A : (N, N) array_like
        Stable drift matrix: every eigenvalue must satisfy
        Re(lambda) < -tol * ||A||_F.
    B : (N, N) array_like
        SPD diffusion matrix.
    tol : float
        Stability margin and defectiveness threshold for the drift
        eigenbasis.
    prune_eps : float
        Coefficient prune threshold used by all polynomials this model
        produces.

    Returns
    -------
    OUModel
    """
    A = linalg._as_square(A, "A")
    B = linalg._as_square(B, "B")
    if B.shape[0] != A.shape[0]:
        raise DimensionMismatchError(
            f"A is {A.shape[0]}x{A.shape[0]} but B is {B.shape[0]}x{B.shape[0]}"
        )
    eig = linalg.biorthogonal_eig(A, tol=tol)
    margin = -tol * max(1.0, float(np.linalg.norm(A)))
    worst = float(np.max(eig.values.real))
    if worst >= margin:
        raise UnstableDriftError(
            f"drift eigenvalue with real part {worst:.6e} is not below {margin:.3e}"
        )
    Sigma = linalg.solve_lyapunov(A, B)
    Sigma_inv = linalg.inverse(Sigma)
    partner = linalg.conjugate_partner(eig)
    return OUModel(
        A=A,
        B=B,
        Sigma=Sigma,
        Sigma_inv=Sigma_inv,
        eig=eig,
        f0=stationary_density(Sigma),
        conj_partner=partner,
        tol=float(tol),
        prune_eps=float(prune_eps),
    )


def _check_mode(model, I):
    if not 0 <= int(I) < model.dim:
        raise ModeOutOfRangeError(f"mode {I} outside 0..{model.dim - 1}")


def _check_multi_index(model, K):
    K = tuple(int(k) for k in K)
    if len(K) != model.dim:
        raise ModeIndexMismatchError(
            f"multi-index {K} has length {len(K)}, expected {model.dim}"
        )
    if any(k < 0 for k in K):
        raise ModeIndexMismatchError(f"multi-index {K} has a negative entry")
    return K


def _check_forward(model, f):
    if not isinstance(f, ForwardFunction):
        raise TypeError("expected a ForwardFunction")
    if f.base is not model.f0 and not (
        np.array_equal(f.base.mean, model.f0.mean)
        and np.array_equal(f.base.cov, model.f0.cov)
    ):
        raise DimensionMismatchError(
            "forward function is not based on this model's stationary density"
        )


def _check_adjoint(model, g):
    if not isinstance(g, MPoly):
        raise TypeError("expected an MPoly")
    if g.nvars != model.dim:
        raise DimensionMismatchError(
            f"polynomial in {g.nvars} variables for a {model.dim}-dimensional model"
        )


def _op_ingredients(model):
    """Cached polynomials entering the forward-operator reduction."""
    got = model._op_cache.get("forward")
    if got is not None:
        return got
    n = model.dim
    eps = model.prune_eps
    Sinv = model.Sigma_inv
    drift = model.A + model.B @ Sinv
    # Quadratic form x^T Q x with Q = A^T Sinv + (1/2) Sinv B Sinv.  Its
    # antisymmetric part cancels against the trace terms; building it
    # literally keeps the reduction honest and lets pruning eat the dust.
    Q = model.A.T @ Sinv + 0.5 * Sinv @ model.B @ Sinv
    quad_terms = {}
    for i in range(n):
        for j in range(n):
            if Q[i, j] == 0.0:
                continue
            exps = tuple(
                (1 if k == i else 0) + (1 if k == j else 0) for k in range(n)
            )
            quad_terms[exps] = quad_terms.get(exps, 0.0) + Q[i, j]
    quad = MPoly(n, quad_terms, eps)
    const = -float(np.trace(model.A)) - 0.5 * float(np.trace(model.B @ Sinv))
    drift_rows = [
        MPoly.linear(n, drift[i, :], prune_eps=eps) for i in range(n)
    ]
    out = (quad, const, drift_rows)
    model._op_cache["forward"] = out
    return out


def apply_forward(model, f):
    """Apply the Fokker-Planck operator L to a forward function.

    For f = p * f0 the result is again polynomial times f0; only the
    polynomial factor changes.
    """
    _check_forward(model, f)
    p = f.poly
    n = model.dim
    quad, const, drift_rows = _op_ingredients(model)
    out = quad * p + const * p
    for i in range(n):
        di = p.diff(i)
        out = out - drift_rows[i] * di
        for j in range(n):
            bij = model.B[i, j]
            if bij != 0.0:
                out = out + (0.5 * bij) * di.diff(j)
    return ForwardFunction(out, f.base)


def apply_adjoint(model, g):
    """Apply the adjoint (backward) operator to a plain polynomial."""
    _check_adjoint(model, g)
    n = model.dim
    out = MPoly.zero(n, g.prune_eps)
    for i in range(n):
        gi = g.diff(i)
        row = MPoly.linear(n, model.A[i, :], prune_eps=g.prune_eps)
        out = out + row * gi
        for j in range(n):
            bij = model.B[i, j]
            if bij != 0.0:
                out = out + (0.5 * bij) * gi.diff(j)
    return out


def raise_forward(model, I, f):
    """Mode-I raising operator on the forward side: -e_I . grad.

    Acting on p * f0 this sends p to -e_I . grad p + (e_I^T Sigma^-1 x) p,
    stepping the eigenvalue by lambda_I.
    """
    _check_mode(model, I)
    _check_forward(model, f)
    p = f.poly
    e = model.eig.right[:, I]
    u = model.Sigma_inv @ e
    out = MPoly.linear(model.dim, u, prune_eps=p.prune_eps) * p
    for i in range(model.dim):
        if e[i] != 0.0:
            out = out - e[i] * p.diff(i)
    return ForwardFunction(out, f.base)


def lower_forward(model, I, f):
    """Mode-I lowering operator on the forward side.

    Sends p to 2 (w_I . x) p + 2 (Sigma w_I) . grad p applied through
    the Gaussian factor; annihilates the stationary density.
    """
    _check_mode(model, I)
    _check_forward(model, f)
    p = f.poly
    w = model.eig.left[I, :]
    sw = model.Sigma @ w
    u = model.Sigma_inv @ sw
    out = 2.0 * (MPoly.linear(model.dim, w, prune_eps=p.prune_eps) * p)
    out = out - 2.0 * (MPoly.linear(model.dim, u, prune_eps=p.prune_eps) * p)
    for i in range(model.dim):
        if sw[i] != 0.0:
            out = out + (2.0 * sw[i]) * p.diff(i)
    return ForwardFunction(out, f.base)


def raise_adjoint(model, I, g):
    """Mode-I raising operator on the adjoint side.

    g -> 2 conj(w_I) . x g - 2 (Sigma conj(w_I)) . grad g, stepping the
    adjoint eigenvalue by conj(lambda_I).
    """
    _check_mode(model, I)
    _check_adjoint(model, g)
    w = np.conj(model.eig.left[I, :])
    sw = model.Sigma @ w
    out = 2.0 * (MPoly.linear(model.dim, w, prune_eps=g.prune_eps) * g)
    for i in range(model.dim):
        if sw[i] != 0.0:
            out = out - (2.0 * sw[i]) * g.diff(i)
    return out


def lower_adjoint(model, I, g):
    """Mode-I lowering operator on the adjoint side: conj(e_I) . grad."""
    _check_mode(model, I)
    _check_adjoint(model, g)
    e = np.conj(model.eig.right[:, I])
    out = MPoly.zero(model.dim, g.prune_eps)
    for i in range(model.dim):
        if e[i] != 0.0:
            out = out + e[i] * g.diff(i)
    return out


def forward_eigenfunction(model, K):
    """Eigenfunction of L with multi-index K, built by repeated raising.

    The mode-0 raising operator is applied last, so the operator product
    runs in increasing mode order from the outside in.  Memoized.
    """
    K = _check_multi_index(model, K)
    got = model._forward_cache.get(K)
    if got is not None:
        return got
    if sum(K) == 0:
        out = ForwardFunction(
            MPoly.constant(model.dim, 1.0, model.prune_eps), model.f0
        )
    else:
        I = next(i for i, k in enumerate(K) if k > 0)
        prev = K[:I] + (K[I] - 1,) + K[I + 1 :]
        out = raise_forward(model, I, forward_eigenfunction(model, prev))
    model._forward_cache[K] = out
    return out


def adjoint_eigenfunction(model, K):
    """Eigenfunction of the adjoint operator with multi-index K.  Memoized."""
    K = _check_multi_index(model, K)
    got = model._adjoint_cache.get(K)
    if got is not None:
        return got
    if sum(K) == 0:
        out = MPoly.constant(model.dim, 1.0, model.prune_eps)
    else:
        I = next(i for i, k in enumerate(K) if k > 0)
        prev = K[:I] + (K[I] - 1,) + K[I + 1 :]
        out = raise_adjoint(model, I, adjoint_eigenfunction(model, prev))
    model._adjoint_cache[K] = out
    return out


def eigenvalue(model, K):
    """Forward eigenvalue sum_I K_I lambda_I.  Conjugate for the adjoint."""
    K = _check_multi_index(model, K)
    return complex(sum(k * lam for k, lam in zip(K, model.eig.values)))


def mode_normalization(K):
    """Duality normalization prod_I 2^{K_I} K_I! of an eigenpair."""
    out = 1.0
    for k in K:
        k = int(k)
        if k < 0:
            raise ModeIndexMismatchError(f"multi-index {tuple(K)} has a negative entry")
        out *= float(2**k) * float(math.factorial(k))
    return out


def enumerate_modes(dim, max_order):
    """All multi-indices with total order up to max_order, graded-lex."""
    dim = int(dim)
    max_order = int(max_order)
    if dim < 1:
        raise ValueError("dim must be at least 1")
    if max_order < 0:
        raise ValueError("max_order must be nonnegative")

    def comps(total, parts):
        if parts == 1:
            yield (total,)
            return
        for first in range(total, -1, -1):
            for rest in comps(total - first, parts - 1):
                yield (first,) + rest

    out = []
    for deg in range(max_order + 1):
        out.extend(comps(deg, dim))
    return out
