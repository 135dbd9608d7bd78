"""Cramer-Rao bounds on FCM estimation error and their relaxations.

The exact bound for N_t snapshots is CRLB = (1/N_t) A kron A^T with
A = R_p + (sigma_n^2 / omega) I, where omega = x^H Omega x couples the
pilot to the channel time correlation.  A is n x n; the full n^2 x n^2
Kronecker product is never materialized (4 GB dense at n = 128), entries
come from the identity [A kron A^T]_{(i n + j),(k n + l)} = A[i, k] A[l, j].

Dropping the pilot dependence via omega <= n lam_max(Omega) gives the
pilot-free bound, and replacing lam_max by its empirical fit
n J0(2 pi c fdts), c = 0.35, gives the closed-form variant.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .numerics import bessel_j0

__all__ = [
    "FIT_COEFF",
    "pilot_omega",
    "ls_covariance",
    "LsCovariance",
    "CrlbFactor",
    "crlb_factor",
    "crlb_entry",
    "tmse_lb",
    "avgmse_lb",
    "lambda_max_numeric",
    "lambda_max_fit",
    "avgmse_lb_pilot_free",
    "avgmse_lb_insightful",
    "BoundReport",
    "bound_report",
]

# Empirical coefficient of the top-eigenvalue fit lam_max ~ n J0(2 pi c fdts).
FIT_COEFF = 0.35


def _warn_fit_range(fdts):
    # The fit was calibrated for fdts <= 0.35; outside that the J0 argument
    # leaves the fitted regime (and eventually the bound loses meaning).
    if fdts > 0.35:
        warnings.warn("eigenvalue fit used outside its calibrated range "
                      "(fdts = %g > 0.35)" % fdts, stacklevel=3)


def pilot_omega(x_p, tcm):
    """omega = x^H Omega x; real and positive for PSD Omega."""
    x = x_p.symbols
    if x.size != tcm.n:
        raise ValueError("pilot length %d vs TCM size %d" % (x.size, tcm.n))
    val = float(np.real(x.conj() @ tcm.matrix @ x))
    if val <= 0:
        raise ValueError("omega must be positive, got %g" % val)
    return val


@dataclass(frozen=True)
class LsCovariance:
    """Covariance Sigma of the raw LS estimates for one pilot sequence.

    Sigma = omega X^{-1} (R_p + sigma_n^2/omega I) X^{-H}; the bracket is
    kept as a_matrix since the bounds only ever need it.  sigma_prime is
    the Wishart scale Sigma / n_t of the sample FCM.
    """

    sigma: np.ndarray
    sigma_prime: np.ndarray
    a_matrix: np.ndarray
    omega: float
    sigma_n2: float
    n_t: int


def ls_covariance(x_p, tcm, r_p, sigma_n2, n_t):
    """Assemble Sigma, Sigma' and A for a pilot, channel TCM and noise level."""
    if sigma_n2 < 0:
        raise ValueError("sigma_n2 must be >= 0")
    if n_t < 1:
        raise ValueError("n_t must be >= 1")
    omega = pilot_omega(x_p, tcm)
    n = r_p.shape[0]
    a = r_p + (sigma_n2 / omega) * np.eye(n)
    xinv = 1.0 / x_p.symbols
    sigma = omega * (a * np.outer(xinv, xinv.conj()))
    return LsCovariance(sigma=sigma, sigma_prime=sigma / n_t, a_matrix=a,
                        omega=omega, sigma_n2=sigma_n2, n_t=int(n_t))


@dataclass(frozen=True)
class CrlbFactor:
    """Lazy handle on CRLB = (1/n_t) A kron A^T; entries on demand."""

    a: np.ndarray
    n_t: int

    def __post_init__(self):
        if self.n_t < 1:
            raise ValueError("n_t must be >= 1")

    @property
    def n(self):
        return self.a.shape[0]


def crlb_factor(cov, n_t=None):
    """Bind an LS covariance to a snapshot count (default: the covariance's)."""
    return CrlbFactor(a=cov.a_matrix, n_t=int(cov.n_t if n_t is None else n_t))


def crlb_entry(factor, i, j, k, l):
    """CRLB entry for the covariance of (est[i,j], est[k,l]).

    The ((i*n + j), (k*n + l)) entry of (1/n_t) A kron A^T, i.e.
    A[i, k] A[l, j] / n_t, without materializing the n^2 x n^2 matrix.
    """
    n = factor.n
    for idx in (i, j, k, l):
        if not 0 <= idx < n:
            raise IndexError("index %d out of range for n = %d" % (idx, n))
    a = factor.a
    return a[i, k] * a[l, j] / factor.n_t


def tmse_lb(factor):
    """Total-MSE bound: trace of the CRLB, equal to trace(A)^2 / n_t."""
    tr = float(np.real(np.trace(factor.a)))
    return tr * tr / factor.n_t


def avgmse_lb(factor):
    """Per-entry average MSE bound, tmse_lb / n^2.

    With unit-diagonal R_p this equals (1/n_t) (1 + 1/(omega gamma))^2.
    """
    return tmse_lb(factor) / factor.n**2


def lambda_max_numeric(tcm):
    """Largest TCM eigenvalue by Hermitian eigensolver; in (0, n]."""
    return tcm.lam_max()


def lambda_max_fit(n, fdts, c=FIT_COEFF):
    """Closed-form fit n J0(2 pi c fdts) to the TCM top eigenvalue."""
    _warn_fit_range(fdts)
    return n * bessel_j0(2.0 * np.pi * c * fdts)


def avgmse_lb_pilot_free(n, n_t, gamma, lam_max):
    """Average-MSE bound after relaxing omega to its maximum n lam_max."""
    return (1.0 + 1.0 / (n * lam_max * gamma)) ** 2 / n_t


def avgmse_lb_insightful(n, n_t, gamma, fdts, c=FIT_COEFF):
    """Pilot-free bound with lam_max replaced by the J0 fit; fully closed form."""
    _warn_fit_range(fdts)
    return (1.0 + 1.0 / (n**2 * bessel_j0(2.0 * np.pi * c * fdts) * gamma)) ** 2 / n_t


@dataclass(frozen=True)
class BoundReport:
    """All bounds for one configuration, ordered avgmse_lb >= pilot-free."""

    tmse_lb: float
    avgmse_lb: float
    avgmse_lb_pilot_free: float
    avgmse_lb_insightful: float
    lambda_max: float
    c_fit: float = FIT_COEFF


def bound_report(cov, tcm, fdts):
    """Evaluate the whole bound chain for one LS covariance."""
    factor = crlb_factor(cov)
    n = factor.n
    gamma = np.inf if cov.sigma_n2 == 0 else 1.0 / cov.sigma_n2
    lam = lambda_max_numeric(tcm)
    return BoundReport(
        tmse_lb=tmse_lb(factor),
        avgmse_lb=avgmse_lb(factor),
        avgmse_lb_pilot_free=avgmse_lb_pilot_free(n, factor.n_t, gamma, lam),
        avgmse_lb_insightful=avgmse_lb_insightful(n, factor.n_t, gamma, fdts),
        lambda_max=lam,
    )
