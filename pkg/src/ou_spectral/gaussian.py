"""Gaussian densities and exact moment arithmetic.

Moments of centered Gaussians are computed by recursive pair counting
(Isserlis), so every expectation of a polynomial reduces to sums of
products of covariance entries.  Means are handled by shifting the
polynomial, not the density.  Results are memoized per covariance
matrix because the same small set of moments recurs constantly in
inner products.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError, NotSPDError
from .linalg import _as_square, _check_symmetric
from .mpoly import MPoly


@dataclass(frozen=True)
class GaussianDensity:
    """Normalized Gaussian density with mean vector and SPD covariance."""

    mean: np.ndarray
    cov: np.ndarray
    log_norm: float = field(init=False)

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float).reshape(-1)
        cov = _as_square(self.cov, "cov")
        if mean.shape[0] != cov.shape[0]:
            raise DimensionMismatchError(
                f"mean has dimension {mean.shape[0]}, cov {cov.shape[0]}"
            )
        _check_symmetric(cov, "cov")
        try:
            np.linalg.cholesky(cov)
        except np.linalg.LinAlgError:
            raise NotSPDError("covariance is not positive definite") from None
        sign, logdet = np.linalg.slogdet(cov)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)
        object.__setattr__(
            self, "log_norm", -0.5 * (mean.shape[0] * np.log(2.0 * np.pi) + logdet)
        )

    @property
    def dim(self):
        return self.mean.shape[0]

    def pdf(self, x):
        x = np.asarray(x, dtype=float).reshape(-1)
        if x.shape[0] != self.dim:
            raise DimensionMismatchError(
                f"point has {x.shape[0]} coordinates, expected {self.dim}"
            )
        d = x - self.mean
        q = d @ np.linalg.solve(self.cov, d)
        return float(np.exp(self.log_norm - 0.5 * q))

    def pdf_grid(self, points):
        """Density at many points, shape (P, dim) -> (P,)."""
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != self.dim:
            raise DimensionMismatchError(
                f"points must have shape (P, {self.dim}), got {pts.shape}"
            )
        d = pts - self.mean[None, :]
        q = np.einsum("pi,ij,pj->p", d, np.linalg.inv(self.cov), d)
        return np.exp(self.log_norm - 0.5 * q)


@dataclass(frozen=True)
class ForwardFunction:
    """Polynomial multiple of a Gaussian: value(x) = poly(x) * base.pdf(x)."""

    poly: MPoly
    base: GaussianDensity

    def __post_init__(self):
        if self.poly.nvars != self.base.dim:
            raise DimensionMismatchError(
                f"polynomial in {self.poly.nvars} variables over a "
                f"{self.base.dim}-dimensional Gaussian"
            )

    @property
    def dim(self):
        return self.base.dim

    def value(self, x):
        return complex(self.poly(x)) * self.base.pdf(x)


def stationary_density(Sigma):
    """Zero-mean Gaussian with the given SPD covariance."""
    Sigma = _as_square(Sigma, "Sigma")
    return GaussianDensity(mean=np.zeros(Sigma.shape[0]), cov=Sigma)


_MOMENT_CACHE = {}


def _moment_rec(counts, Sigma, memo):
    total = sum(counts)
    if total == 0:
        return 1.0
    if total % 2 == 1:
        return 0.0
    got = memo.get(counts)
    if got is not None:
        return got
    a = next(i for i, c in enumerate(counts) if c > 0)
    val = 0.0
    # Pair one slot of variable a with every remaining slot; multiplicity
    # counts how many identical slots that partner stands for.
    if counts[a] >= 2:
        rest = counts[:a] + (counts[a] - 2,) + counts[a + 1 :]
        val += (counts[a] - 1) * Sigma[a, a] * _moment_rec(rest, Sigma, memo)
    for b in range(a + 1, len(counts)):
        if counts[b] == 0:
            continue
        rest = list(counts)
        rest[a] -= 1
        rest[b] -= 1
        val += counts[b] * Sigma[a, b] * _moment_rec(tuple(rest), Sigma, memo)
    memo[counts] = val
    return val


def wick_moment(exponents, Sigma):
    """E[prod_i x_i^k_i] under the centered Gaussian with covariance Sigma.

    Exact pair-counting recursion; odd total degree gives 0.  Memoized
    per covariance matrix (keyed by its bytes).
    """
    Sigma = _as_square(Sigma, "Sigma")
    counts = tuple(int(k) for k in exponents)
    if len(counts) != Sigma.shape[0]:
        raise DimensionMismatchError(
            f"{len(counts)} exponents for a {Sigma.shape[0]}-dimensional Gaussian"
        )
    if any(k < 0 for k in counts):
        raise ValueError(f"negative exponent in {counts}")
    key = Sigma.tobytes()
    memo = _MOMENT_CACHE.get(key)
    if memo is None:
        _check_symmetric(Sigma, "Sigma")
        try:
            np.linalg.cholesky(Sigma)
        except np.linalg.LinAlgError:
            raise NotSPDError("Sigma is not positive definite") from None
        memo = {}
        _MOMENT_CACHE[key] = memo
    return _moment_rec(counts, Sigma, memo)


def expectation(p, g):
    """E[p(x)] for x distributed as the Gaussian g.  Exact in moments."""
    if not isinstance(p, MPoly):
        raise TypeError("expectation takes an MPoly")
    if p.nvars != g.dim:
        raise DimensionMismatchError(
            f"polynomial in {p.nvars} variables, Gaussian of dimension {g.dim}"
        )
    if np.any(g.mean != 0.0):
        p = p.affine(np.eye(g.dim), g.mean)
    total = 0.0 + 0.0j
    for exps, c in p.items():
        total += c * wick_moment(exps, g.cov)
    return complex(total)


def inner_product(gp, f):
    """Duality pairing of an adjoint-side polynomial with a forward function.

    Computes the integral of conj(gp) * f.poly against f.base, which is
    exactly E[conj(gp) * poly] under that Gaussian.
    """
    if not isinstance(f, ForwardFunction):
        raise TypeError("inner_product takes (MPoly, ForwardFunction)")
    return expectation(gp.conj() * f.poly, f.base)
