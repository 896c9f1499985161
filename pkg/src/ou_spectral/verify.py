"""Verification suites over a built model.

Each suite exercises one family of exact identities and reports its
worst residual against a tolerance.  The CLI renders these; they are
plain library code so they can also be driven programmatically.
"""

from dataclasses import dataclass, field

import numpy as np

from .gaussian import ForwardFunction, inner_product
from .hermite_form import adjoint_hermite, forward_hermite, is_canonical, to_canonical
from .ladder import (
    adjoint_eigenfunction,
    apply_adjoint,
    apply_forward,
    eigenvalue,
    enumerate_modes,
    forward_eigenfunction,
    lower_adjoint,
    lower_forward,
    mode_normalization,
    raise_adjoint,
    raise_forward,
)
from .mpoly import coeff_distance
from .spectral import battery_polynomials, reconstruct_operators_check


@dataclass
class SuiteResult:
    name: str
    worst: float
    tol: float
    lines: list = field(default_factory=list)

    @property
    def passed(self):
        return self.worst <= self.tol


@dataclass
class VerifyReport:
    suites: list

    @property
    def passed(self):
        return all(s.passed for s in self.suites)


def biorthogonality_suite(model, max_order, tol=1e-8):
    """Pairings against delta times the duality normalization.

    All pairs up to order min(max_order, 4); the diagonal continues to
    max_order.  Residuals are relative to the normalization of the
    forward index.
    """
    pair_order = min(max_order, 4)
    modes_all = enumerate_modes(model.dim, max_order)
    modes_pair = enumerate_modes(model.dim, pair_order)
    worst = 0.0
    lines = []
    for K in modes_all:
        f = forward_eigenfunction(model, K)
        norm = mode_normalization(K)
        diag = inner_product(adjoint_eigenfunction(model, K), f)
        lines.append(
            f"K={K} pairing/normalization = {diag.real / norm:.6f}"
            + (f" {diag.imag / norm:+.2e}i" if abs(diag.imag) > 0 else "")
        )
        worst = max(worst, abs(diag - norm) / norm)
        if sum(K) <= pair_order:
            for M in modes_pair:
                if M == K:
                    continue
                val = inner_product(adjoint_eigenfunction(model, M), f)
                worst = max(worst, abs(val) / norm)
    return SuiteResult("biorthogonality", worst, tol, lines)


def eigen_residual_suite(model, max_order, tol=1e-8):
    """Forward and adjoint eigen-equations, relative coefficient residuals."""
    worst = 0.0
    for K in enumerate_modes(model.dim, max_order):
        lam = eigenvalue(model, K)
        f = forward_eigenfunction(model, K)
        resid = coeff_distance(apply_forward(model, f).poly, lam * f.poly)
        worst = max(worst, resid / max(1.0, f.poly.max_coeff()))
        g = adjoint_eigenfunction(model, K)
        resid = coeff_distance(apply_adjoint(model, g), np.conj(lam) * g)
        worst = max(worst, resid / max(1.0, g.max_coeff()))
    return SuiteResult("eigen-residuals", worst, tol)


def ladder_suite(model, n_max=6, tol=1e-10):
    """Repeated lowering against the exact factorial ladder factors.

    k-fold lowering of the order-n single-mode eigenfunction must equal
    2^k n!/(n-k)! times the order-(n-k) one, and one step past the
    bottom must annihilate.
    """
    import math

    worst = 0.0
    for I in range(model.dim):
        for n in range(1, n_max + 1):
            K = tuple(n if i == I else 0 for i in range(model.dim))
            f = forward_eigenfunction(model, K)
            g = adjoint_eigenfunction(model, K)
            for k in range(1, n + 1):
                factor = float(2**k) * math.factorial(n) / math.factorial(n - k)
                Kref = tuple(n - k if i == I else 0 for i in range(model.dim))
                fref = forward_eigenfunction(model, Kref)
                gref = adjoint_eigenfunction(model, Kref)
                f = lower_forward(model, I, f)
                g = lower_adjoint(model, I, g)
                d = coeff_distance(f.poly, factor * fref.poly)
                worst = max(worst, d / (factor * max(1.0, fref.poly.max_coeff())))
                d = coeff_distance(g, factor * gref)
                worst = max(worst, d / (factor * max(1.0, gref.max_coeff())))
            f = lower_forward(model, I, f)
            g = lower_adjoint(model, I, g)
            scale = float(2**n) * math.factorial(n)
            worst = max(worst, f.poly.max_coeff() / scale)
            worst = max(worst, g.max_coeff() / scale)
    return SuiteResult("ladder-factorials", worst, tol)


def commutator_suite(model, tol=1e-9):
    """Ladder commutation relations on the polynomial battery.

    [L, V_I] = lambda_I V_I on the forward side, the conjugate relation
    on the adjoint side, and the cross relations between opposite
    lowering and raising families equal to twice the identity.
    """
    n = model.dim
    worst = 0.0
    for p in battery_polynomials(n):
        fwd = ForwardFunction(p, model.f0)
        for I in range(n):
            lam = model.eig.values[I]

            a = apply_forward(model, raise_forward(model, I, fwd)).poly
            b = raise_forward(model, I, apply_forward(model, fwd)).poly
            c = raise_forward(model, I, fwd).poly
            d = coeff_distance(a - b, lam * c)
            worst = max(worst, d / max(1.0, c.max_coeff()))

            a = apply_adjoint(model, raise_adjoint(model, I, p))
            b = raise_adjoint(model, I, apply_adjoint(model, p))
            c = raise_adjoint(model, I, p)
            d = coeff_distance(a - b, np.conj(lam) * c)
            worst = max(worst, d / max(1.0, c.max_coeff()))

            for J in range(n):
                a = lower_adjoint(model, J, raise_adjoint(model, I, p))
                b = raise_adjoint(model, I, lower_adjoint(model, J, p))
                target = (2.0 if I == J else 0.0) * p
                d = coeff_distance(a - b, target)
                worst = max(worst, d / max(1.0, p.max_coeff()))

                a = lower_forward(model, J, raise_forward(model, I, fwd)).poly
                b = raise_forward(model, I, lower_forward(model, J, fwd)).poly
                d = coeff_distance(a - b, target)
                worst = max(worst, d / max(1.0, p.max_coeff()))
    return SuiteResult("commutators", worst, tol)


def hermite_suite(model, max_order=5, tol=1e-9):
    """Ladder route against the Hermite closed form, coefficient-wise.

    Transforms to canonical coordinates first when needed.
    """
    if is_canonical(model):
        model_c = model
    else:
        model_c, _ = to_canonical(model)
    worst = 0.0
    for K in enumerate_modes(model_c.dim, max_order):
        d = coeff_distance(
            forward_eigenfunction(model_c, K).poly, forward_hermite(model_c, K)
        )
        worst = max(worst, d)
        d = coeff_distance(
            adjoint_eigenfunction(model_c, K), adjoint_hermite(model_c, K)
        )
        worst = max(worst, d)
    return SuiteResult("hermite-form", worst, tol)


def reconstruction_suite(model, tol=1e-9):
    report = reconstruct_operators_check(model, tol=tol)
    lines = [f"{name}: {val:.3e}" for name, val in sorted(report.residuals.items())]
    return SuiteResult("operator-reconstruction", report.worst, tol, lines)


def run_all(model, max_order, residual_tol=1e-8):
    """Every suite at its standard tolerance; shared residual_tol where
    a suite has no tighter inherent requirement."""
    suites = [
        biorthogonality_suite(model, max_order, tol=residual_tol),
        eigen_residual_suite(model, min(max_order, 6), tol=residual_tol),
        ladder_suite(model, n_max=min(max_order, 6)),
        commutator_suite(model),
        hermite_suite(model, max_order=min(max_order, 5)),
        reconstruction_suite(model),
    ]
    return VerifyReport(suites=suites)
