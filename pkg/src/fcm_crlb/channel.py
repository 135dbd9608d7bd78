"""Doubly selective OFDM channel model.

Tapped delay line with per-path Rayleigh fading under the Jakes time
correlation J0(2 pi f_d dt).  Provides the within-symbol time correlation
matrix, the delay transform F_tau, the true frequency correlation matrix
R_p = F_tau D F_tau^H, per-symbol CIR realizations, the (banded) channel
transfer matrix including ICI, and an SIR probe for it.
"""

import json
import warnings
from dataclasses import dataclass, field

import numpy as np

from .numerics import RngStream, bessel_j0, psd_factor, sample_cn

__all__ = [
    "OfdmConfig",
    "PathProfile",
    "DopplerSpec",
    "TimeCorrMatrix",
    "CirMatrix",
    "TransferMatrix",
    "builtin_profile",
    "load_profile",
    "check_cp",
    "build_tcm",
    "delay_transform",
    "build_true_fcm",
    "sample_cir",
    "build_transfer_matrix",
    "measure_sir",
]

# 3GPP tapped delay line profiles, excess delays in ns / mean path powers in dB.
_BUILTIN_PROFILES = {
    "eva": (
        [0.0, 30.0, 150.0, 310.0, 370.0, 710.0, 1090.0, 1730.0, 2510.0],
        [0.0, -1.5, -1.4, -3.6, -0.6, -9.1, -7.0, -12.0, -16.9],
    ),
    "etu": (
        [0.0, 50.0, 120.0, 200.0, 230.0, 500.0, 1600.0, 2300.0, 5000.0],
        [-1.0, -1.0, -1.0, 0.0, 0.0, 0.0, -3.0, -5.0, -7.0],
    ),
}


@dataclass(frozen=True)
class OfdmConfig:
    """Static link dimensions: FFT size, cyclic prefix length, sample period."""

    n_tones: int
    cp_len: int
    sample_period_s: float

    def __post_init__(self):
        if self.n_tones < 2:
            raise ValueError("n_tones must be >= 2")
        if self.cp_len < 0:
            raise ValueError("cp_len must be >= 0")
        if not self.sample_period_s > 0:
            raise ValueError("sample_period_s must be positive")

    @property
    def symbol_period_s(self):
        return (self.n_tones + self.cp_len) * self.sample_period_s


@dataclass(frozen=True)
class PathProfile:
    """Power delay profile, powers normalized so the total path power is 1."""

    delays_s: np.ndarray
    powers_lin: np.ndarray
    name: str = "custom"

    def __post_init__(self):
        d = np.asarray(self.delays_s, dtype=float)
        p = np.asarray(self.powers_lin, dtype=float)
        if d.ndim != 1 or d.shape != p.shape or d.size == 0:
            raise ValueError("delays and powers must be equal-length 1-d arrays")
        if d[0] < 0 or np.any(np.diff(d) <= 0):
            raise ValueError("delays must be non-negative and strictly increasing")
        if np.any(p <= 0):
            raise ValueError("path powers must be positive")
        p = p / p.sum()
        object.__setattr__(self, "delays_s", d)
        object.__setattr__(self, "powers_lin", p)

    @property
    def n_paths(self):
        return self.delays_s.size

    def delays_samples(self, ofdm):
        """Path delays in (possibly fractional) sample periods."""
        return self.delays_s / ofdm.sample_period_s


@dataclass(frozen=True)
class DopplerSpec:
    """Maximum Doppler shift; Jakes spectrum is assumed throughout."""

    f_d_hz: float

    def __post_init__(self):
        if self.f_d_hz < 0:
            raise ValueError("f_d_hz must be >= 0")

    def fdts(self, ofdm):
        """Doppler normalized to the OFDM symbol period.

        Warns above 0.35, where the closed-form eigenvalue fit downstream
        leaves its calibrated range.
        """
        val = self.f_d_hz * ofdm.symbol_period_s
        if val > 0.35:
            warnings.warn("f_d T_s = %g exceeds 0.35, outside the fitted "
                          "Doppler regime" % val, stacklevel=2)
        return val


def builtin_profile(name, ofdm=None):
    """EVA or ETU tapped delay line; checks CP sufficiency when ofdm is given."""
    key = name.lower()
    if key not in _BUILTIN_PROFILES:
        raise KeyError("unknown profile %r (have: %s)" % (name, sorted(_BUILTIN_PROFILES)))
    delays_ns, powers_db = _BUILTIN_PROFILES[key]
    profile = PathProfile(
        delays_s=np.asarray(delays_ns) * 1e-9,
        powers_lin=10.0 ** (np.asarray(powers_db) / 10.0),
        name=key,
    )
    if ofdm is not None:
        check_cp(profile, ofdm)
    return profile


def load_profile(path, ofdm=None):
    """Read a custom profile from JSON with keys delays_ns and powers_db."""
    with open(path) as fh:
        raw = json.load(fh)
    missing = {"delays_ns", "powers_db"} - set(raw)
    if missing:
        raise ValueError("profile file missing keys: %s" % sorted(missing))
    profile = PathProfile(
        delays_s=np.asarray(raw["delays_ns"], dtype=float) * 1e-9,
        powers_lin=10.0 ** (np.asarray(raw["powers_db"], dtype=float) / 10.0),
        name=str(raw.get("name", path)),
    )
    if ofdm is not None:
        check_cp(profile, ofdm)
    return profile


def check_cp(profile, ofdm):
    """Raise if the maximum excess delay does not fit inside the CP."""
    max_tau = float(profile.delays_samples(ofdm).max())
    if max_tau > ofdm.cp_len:
        raise ValueError(
            "max path delay %.2f samples exceeds cp_len %d" % (max_tau, ofdm.cp_len)
        )


@dataclass
class TimeCorrMatrix:
    """Jakes time correlation over the n_tones payload samples of one symbol.

    matrix[m1, m2] = J0(2 pi f_d (m1 - m2) T).  The PSD factor and the top
    eigenvalue are computed on demand and cached; the matrix is numerically
    rank-deficient for small f_d T, which the factorization tolerates.
    """

    matrix: np.ndarray
    f_d_hz: float
    sample_period_s: float
    _factor: np.ndarray = field(default=None, repr=False)
    _lam_max: float = field(default=None, repr=False)

    def factor(self):
        if self._factor is None:
            self._factor = psd_factor(self.matrix)
        return self._factor

    def lam_max(self):
        if self._lam_max is None:
            self._lam_max = float(np.linalg.eigvalsh(self.matrix)[-1])
        return self._lam_max

    @property
    def n(self):
        return self.matrix.shape[0]


def build_tcm(ofdm, doppler):
    """Time correlation matrix of the payload samples of one OFDM symbol."""
    lags = np.arange(ofdm.n_tones, dtype=float)
    row = bessel_j0(2.0 * np.pi * doppler.f_d_hz * lags * ofdm.sample_period_s)
    idx = np.abs(np.subtract.outer(np.arange(ofdm.n_tones), np.arange(ofdm.n_tones)))
    return TimeCorrMatrix(
        matrix=row[idx], f_d_hz=doppler.f_d_hz, sample_period_s=ofdm.sample_period_s
    )


def delay_transform(profile, ofdm):
    """F_tau with [k, l] = exp(-j 2 pi k tau_l / N), shape (N, n_paths)."""
    tau = profile.delays_samples(ofdm)
    k = np.arange(ofdm.n_tones)
    return np.exp(-2j * np.pi * np.outer(k, tau) / ofdm.n_tones)


def build_true_fcm(profile, ofdm):
    """True frequency correlation matrix R_p = F_tau diag(powers) F_tau^H.

    Unit diagonal by construction since path powers sum to one.
    """
    ft = delay_transform(profile, ofdm)
    return (ft * profile.powers_lin) @ ft.conj().T


@dataclass(frozen=True)
class CirMatrix:
    """Per-path complex gains across one symbol; gains[l, m] = h_l(m)."""

    gains: np.ndarray
    profile: PathProfile

    @property
    def n_paths(self):
        return self.gains.shape[0]

    @property
    def n_samples(self):
        return self.gains.shape[1]


def sample_cir(profile, tcm, stream):
    """Draw one CIR realization with Jakes-correlated Rayleigh path gains.

    Each path l evolves as sigma_l * (B g_l) with B the PSD factor of the
    TCM and g_l iid CN(0, 1), independent across paths.
    """
    gen = stream.generator() if isinstance(stream, RngStream) else stream
    b = tcm.factor()
    g = sample_cn(gen, (b.shape[1], profile.n_paths))
    gains = (b @ g).T * np.sqrt(profile.powers_lin)[:, None]
    return CirMatrix(gains=gains, profile=profile)


@dataclass(frozen=True)
class TransferMatrix:
    """Frequency-domain channel matrix for one symbol, ICI included.

    Stored dense; for a time-invariant CIR it is exactly diagonal, and for
    slow fading the energy concentrates in a narrow cyclic band around the
    diagonal.
    """

    matrix: np.ndarray

    @property
    def n(self):
        return self.matrix.shape[0]

    def diag_power(self):
        return float(np.sum(np.abs(np.diag(self.matrix)) ** 2))

    def offdiag_power(self):
        total = float(np.sum(np.abs(self.matrix) ** 2))
        return total - self.diag_power()


def build_transfer_matrix(cir, ofdm):
    """Assemble H_f from a CIR realization.

    H_f[(k + v) mod N, k] = (1/N) sum_m sum_l h_l(m) e^{-j 2 pi (v m + k tau_l)/N},
    computed as the per-row DFT of the time-frequency response F_tau applied
    to the path gains.  Rows obey sum_v |H_f[(k+v)%N, k]|^2
    = mean_m |sum_l h_l(m) e^{-j 2 pi k tau_l/N}|^2 (Parseval), and a
    time-invariant CIR collapses to the diagonal F_tau h.
    """
    n = ofdm.n_tones
    if cir.n_samples != n:
        raise ValueError("CIR spans %d samples, expected %d" % (cir.n_samples, n))
    ft = delay_transform(cir.profile, ofdm)
    g = ft @ cir.gains  # [k, m]: response of tone k at sample m
    ghat = np.fft.fft(g, axis=1) / n  # [k, v]
    kk = np.arange(n)
    vv = np.arange(n)[:, None]
    hf = np.zeros((n, n), dtype=complex)
    hf[(kk[None, :] + vv) % n, kk[None, :]] = ghat.T
    return TransferMatrix(matrix=hf)


def measure_sir(ofdm, profile, doppler, n_symbols, stream):
    """Monte Carlo signal-to-interference ratio of the transfer matrix, in dB.

    Signal power is the diagonal (ICI-free) part, interference the rest,
    both averaged over n_symbols independent CIR draws.  Returns +inf when
    the interference power underflows (f_d = 0).
    """
    if n_symbols < 1:
        raise ValueError("n_symbols must be >= 1")
    tcm = build_tcm(ofdm, doppler)
    p_diag = 0.0
    p_offd = 0.0
    for s in range(n_symbols):
        cir = sample_cir(profile, tcm, stream.substream("sir", s))
        hf = build_transfer_matrix(cir, ofdm)
        p_diag += hf.diag_power()
        p_offd += hf.offdiag_power()
    if p_offd <= 1e-20 * p_diag:
        return float("inf")
    return 10.0 * np.log10(p_diag / p_offd)
