"""Sample FCM accumulation, the ML correlation estimator, and error metrics.

The sample FCM of N_t raw LS estimates is complex Wishart with scale
Sigma' = Sigma / N_t; the ML estimator of the true FCM undoes the pilot
rotation and subtracts the noise floor:

    R_ml = (X R_hat X^H - sigma_n^2 I) / omega.

The estimate is deliberately not projected back to the PSD cone when noise
subtraction pushes small eigenvalues negative; projection would bias the
MSE comparison against the CRLB.
"""

from dataclasses import dataclass

import numpy as np

from .bounds import pilot_omega
from .numerics import RngStream, psd_factor, sample_cn

__all__ = [
    "Sfcm",
    "FcmEstimate",
    "SfcmAccumulator",
    "accumulate",
    "finalize",
    "sfcm",
    "mle_fcm",
    "total_mse",
    "avg_mse",
    "diag_bias",
    "wishart_central_moments",
    "wishart_second_moment_check",
]


@dataclass(frozen=True)
class Sfcm:
    """Sample FCM with its degrees of freedom."""

    r_hat: np.ndarray
    n_t: int


@dataclass(frozen=True)
class FcmEstimate:
    """ML estimate of the true FCM; Hermitian, not necessarily PSD."""

    r_est: np.ndarray


class SfcmAccumulator:
    """Streaming sample-FCM builder: accumulate outer products, then finalize.

    Parallel trials each own an accumulator; merging is summation, so the
    finalized matrix does not depend on accumulation order beyond float
    rounding.
    """

    def __init__(self, n):
        self.n = int(n)
        self.running_sum = np.zeros((self.n, self.n), dtype=complex)
        self.count = 0

    def accumulate(self, h_ls):
        h = np.asarray(h_ls)
        if h.ndim == 1:
            h = h[:, None]
        if h.shape[0] != self.n:
            raise ValueError("draws have %d tones, accumulator has %d"
                             % (h.shape[0], self.n))
        self.running_sum += h @ h.conj().T
        self.count += h.shape[1]
        return self

    def finalize(self):
        if self.count == 0:
            raise ValueError("no draws accumulated yet")
        return Sfcm(r_hat=self.running_sum / self.count, n_t=self.count)


def accumulate(acc, h_ls):
    return acc.accumulate(h_ls)


def finalize(acc):
    return acc.finalize()


def sfcm(h_draws):
    """Sample FCM (1/N_t) sum_t h_t h_t^H of column-stacked raw estimates."""
    h = np.asarray(h_draws)
    if h.ndim != 2 or h.shape[1] == 0:
        raise ValueError("expected an (n, n_t) matrix of draws")
    return Sfcm(r_hat=h @ h.conj().T / h.shape[1], n_t=h.shape[1])


def _mat(x, attr):
    return getattr(x, attr, x)


def mle_fcm(r_hat, x_p, tcm, sigma_n2):
    """ML estimate of the true FCM: (X R_hat X^H - sigma_n^2 I) / omega.

    Needs the TCM (known f_d) for omega and the known noise power.  Accepts
    an Sfcm or a bare matrix.
    """
    r = _mat(r_hat, "r_hat")
    omega = pilot_omega(x_p, tcm)
    x = x_p.symbols
    est = r * np.outer(x, x.conj())  # X R X^H for diagonal X
    idx = np.arange(x.size)
    est[idx, idx] -= sigma_n2
    return FcmEstimate(r_est=est / omega)


def total_mse(est, truth):
    """Squared Frobenius distance ||r_est - R_p||_F^2."""
    d = _mat(est, "r_est") - _mat(truth, "r_p")
    return float(np.sum(np.abs(d) ** 2))


def avg_mse(est, truth):
    """total_mse / N^2."""
    n = _mat(est, "r_est").shape[0]
    return total_mse(est, truth) / n**2


def diag_bias(est, truth):
    """Mean signed diagonal error, real part; zero in expectation when unbiased."""
    d = _mat(est, "r_est") - _mat(truth, "r_p")
    return float(np.real(np.trace(d)) / d.shape[0])


def wishart_central_moments(sigma_prime, n_t, n_runs, stream, chunk=2000):
    """Empirical and analytic second central moments of the sample-FCM entries.

    For S ~ CW_n(n_t, Sigma') the analytic moment is
    E[(S_ij - E S_ij)(S_kl - E S_kl)] = n_t Sigma'[k, j] Sigma'[i, l].
    Returns (empirical, analytic) as (n^2, n^2) arrays indexed by row-major
    pairs (i*n + j, k*n + l).  Note the product carries no conjugate.

    Draws are definitional sums of outer products, not a Bartlett shortcut,
    so the check exercises exactly the construction the estimator uses.
    """
    sp = np.asarray(sigma_prime)
    n = sp.shape[0]
    b = psd_factor(sp)
    gen = stream.generator() if isinstance(stream, RngStream) else stream
    mean = n_t * sp
    acc = np.zeros((n * n, n * n), dtype=complex)
    done = 0
    while done < n_runs:
        m = min(chunk, n_runs - done)
        g = sample_cn(gen, (m * n_t, b.shape[1])) @ b.T  # rows z = B w ~ CN(0, Sigma')
        g = g.reshape(m, n_t, n)
        s = np.einsum("rti,rtj->rij", g, g.conj())  # Wishart draws
        sc = (s - mean).reshape(m, n * n)
        acc += sc.T @ sc  # plain product, no conjugate
        done += m
    emp = acc / n_runs
    theory = n_t * np.einsum("kj,il->ijkl", sp, sp).reshape(n * n, n * n)
    return emp, theory


def wishart_second_moment_check(sigma_prime, n_t, n_runs, stream, chunk=2000):
    """Max relative deviation of empirical Wishart second moments from theory.

    The denominator is floored at a small multiple of the moment ceiling
    n_t sqrt(d_i d_j d_k d_l) so exact zeros in theory cannot blow up the
    ratio; for well-correlated Sigma' the floor is inactive.
    """
    emp, theory = wishart_central_moments(sigma_prime, n_t, n_runs, stream, chunk)
    d = np.real(np.diag(np.asarray(sigma_prime)))
    root = np.sqrt(np.outer(d, d)).reshape(-1)
    ceiling = n_t * np.outer(root, root)
    denom = np.maximum(np.abs(theory), 1e-6 * ceiling)
    return float(np.max(np.abs(emp - theory) / denom))
