"""Low-level numeric helpers: seeded RNG streams, Bessel J0, PSD factoring.

Everything downstream draws randomness through RngStream, so results are
reproducible for a given master seed and do not depend on how trials get
scheduled across worker processes.
"""

import hashlib

import numpy as np

__all__ = [
    "NumericalError",
    "RngStream",
    "bessel_j0",
    "psd_factor",
    "sample_cn",
]


class NumericalError(Exception):
    """A matrix failed a numeric sanity check (not PSD, not Hermitian, ...)."""


def _tag_to_int(tag):
    # Stable across runs and platforms; never use built-in hash() here, it is
    # salted per process.
    if isinstance(tag, (bool, float)):
        raise TypeError("stream tags must be ints or strings, got %r" % (tag,))
    if isinstance(tag, (int, np.integer)):
        if tag < 0:
            raise ValueError("integer stream tags must be non-negative")
        return int(tag)
    if isinstance(tag, str):
        digest = hashlib.sha256(tag.encode("utf-8")).digest()
        return int.from_bytes(digest[:8], "big")
    raise TypeError("stream tags must be ints or strings, got %r" % (tag,))


class RngStream:
    """Named, forkable random stream on top of numpy's SeedSequence.

    A stream is identified by the master seed plus a path of tags (ints or
    strings).  Substreams with distinct paths are statistically independent,
    and the (seed, path) -> bit-stream mapping is fixed, so per-trial streams
    can be handed to workers in any order without changing the results.
    """

    __slots__ = ("master_seed", "path")

    def __init__(self, master_seed, *path):
        self.master_seed = int(master_seed)
        self.path = tuple(path)

    def substream(self, *tags):
        """Derive an independent child stream."""
        return RngStream(self.master_seed, *(self.path + tags))

    def generator(self):
        """Fresh PCG64 generator for this stream; each call restarts it."""
        entropy = (self.master_seed,) + tuple(_tag_to_int(t) for t in self.path)
        return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))

    def __repr__(self):
        inner = ", ".join([str(self.master_seed)] + [repr(t) for t in self.path])
        return "RngStream(%s)" % inner


# J0 branch split.  The Maclaurin series is exact to ~1e-13 up to |x| = 12
# (peak term ~4e3 costs ~3 digits to cancellation); beyond that the Hankel
# expansion is already past its own accuracy floor from below.
_J0_SPLIT = 12.0
_J0_SERIES_TERMS = 40
_J0_ASYMPTOTIC_TERMS = 20


def _j0_series(x):
    # sum_k (-1)^k (x^2/4)^k / (k!)^2 via the term recurrence
    q = x * x / 4.0
    term = np.ones_like(q)
    acc = np.ones_like(q)
    for k in range(1, _J0_SERIES_TERMS + 1):
        term *= -q / (k * k)
        acc += term
    return acc


def _j0_asymptotic(x):
    # Hankel expansion J0(x) = sqrt(2/(pi x)) [P cos(x - pi/4) - Q sin(x - pi/4)]
    # with t_m = t_{m-1} * (2m-1)^2 / (8 m x) feeding P (even m) and Q (odd m),
    # signs cycling -Q, -P, +Q, +P: P = 1 - t2 + t4 - ..., Q = -t1 + t3 - ...
    p = np.ones_like(x)
    q = np.zeros_like(x)
    t = np.ones_like(x)
    for m in range(1, _J0_ASYMPTOTIC_TERMS + 1):
        t = t * ((2 * m - 1) ** 2 / (8.0 * m)) / x
        r = m % 4
        if r == 0:
            p += t
        elif r == 1:
            q -= t
        elif r == 2:
            p -= t
        else:
            q += t
    chi = x - np.pi / 4.0
    return np.sqrt(2.0 / (np.pi * x)) * (p * np.cos(chi) - q * np.sin(chi))


def bessel_j0(x):
    """Bessel function of the first kind, order zero, vectorized.

    Maclaurin series for |x| <= 12, Hankel large-argument expansion beyond.
    Absolute error stays below 1e-9 over [0, 1e3] (measured ~1e-12; the
    tests cross-check against an independent reference).
    """
    arr = np.abs(np.asarray(x, dtype=float))  # J0 is even
    if not np.all(np.isfinite(arr)):
        raise ValueError("bessel_j0 requires finite input")
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    out = np.empty_like(arr)
    small = arr <= _J0_SPLIT
    if small.any():
        out[small] = _j0_series(arr[small])
    large = ~small
    if large.any():
        out[large] = _j0_asymptotic(arr[large])
    return float(out[0]) if scalar else out


def psd_factor(m, rel_tol=1e-12):
    """Factor a Hermitian PSD matrix as B @ B.conj().T, shape (n, r).

    Eigendecomposition instead of Cholesky: correlation matrices built from
    J0 samples are routinely rank-deficient to machine precision.  Directions
    with eigenvalues below rel_tol * lam_max are truncated (so r <= n), which
    perturbs B B^H by at most ~n * rel_tol * lam_max; eigenvalues below
    -rel_tol * lam_max raise NumericalError.
    """
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("expected a square matrix, got shape %s" % (m.shape,))
    scale = float(np.abs(m).max()) if m.size else 0.0
    if scale and float(np.abs(m - m.conj().T).max()) > 1e-12 * scale:
        raise NumericalError("matrix is not Hermitian")
    w, u = np.linalg.eigh(m)
    lam_max = float(w[-1]) if w.size else 0.0
    if w.size and float(w[0]) < -rel_tol * max(lam_max, 0.0):
        raise NumericalError(
            "matrix is not PSD: min eigenvalue %.3e vs max %.3e" % (w[0], lam_max)
        )
    keep = w > rel_tol * max(lam_max, 0.0)
    return u[:, keep] * np.sqrt(w[keep])


def sample_cn(stream, shape):
    """iid circular complex Gaussians, CN(0, 1): unit variance split re/im.

    Accepts an RngStream (restarted on each call) or a numpy Generator
    (consumed in place); shape may be an int or a tuple.
    """
    gen = stream.generator() if isinstance(stream, RngStream) else stream
    re = gen.standard_normal(shape)
    im = gen.standard_normal(shape)
    return (re + 1j * im) / np.sqrt(2.0)
