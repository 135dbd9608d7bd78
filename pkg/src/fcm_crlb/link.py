"""Pilot-symbol link simulation and least-squares channel estimation.

Two generation routes feed the estimator stage:

* the physical route: a CIR realization is expanded into the full transfer
  matrix (ICI and all), the pilot symbol passes through it plus AWGN, and
  the per-tone LS division y_k / x_k yields the raw estimate;
* the statistical route: raw estimates are drawn directly from their
  analytic distribution CN(0, Sigma), which is what the estimator theory
  assumes and what large trial counts need.
"""

from dataclasses import dataclass

import numpy as np

from .channel import build_transfer_matrix, delay_transform, sample_cir
from .numerics import RngStream, sample_cn

__all__ = [
    "PilotSequence",
    "NoiseSpec",
    "generate_qpsk_pilots",
    "simulate_pilot_rx",
    "ls_estimate",
    "draw_ls_model",
    "draw_ls_chain",
    "draw_ls_waveform",
]


@dataclass(frozen=True)
class PilotSequence:
    """Unit-modulus pilot symbols for one OFDM symbol, with seed provenance."""

    symbols: np.ndarray
    provenance: str = ""

    def __post_init__(self):
        x = np.asarray(self.symbols, dtype=complex)
        if x.ndim != 1 or x.size == 0:
            raise ValueError("pilot symbols must be a non-empty vector")
        if np.any(np.abs(np.abs(x) - 1.0) > 1e-12):
            raise ValueError("pilot symbols must be unit modulus")
        object.__setattr__(self, "symbols", x)

    @property
    def n(self):
        return self.symbols.size


@dataclass(frozen=True)
class NoiseSpec:
    """Per-tone AWGN level for unit-power pilots over a unit-power channel."""

    snr_db: float

    @property
    def gamma(self):
        return 10.0 ** (self.snr_db / 10.0)

    @property
    def sigma_n2(self):
        return 1.0 / self.gamma


def generate_qpsk_pilots(stream, n):
    """Random QPSK pilots exp(j pi/4 + j pi/2 k), k uniform on {0..3}."""
    gen = stream.generator() if isinstance(stream, RngStream) else stream
    k = gen.integers(0, 4, size=n)
    x = np.exp(1j * (np.pi / 4.0 + np.pi / 2.0 * k))
    prov = repr(stream) if isinstance(stream, RngStream) else "generator"
    return PilotSequence(symbols=x, provenance=prov)


def simulate_pilot_rx(hf, pilots, noise, stream):
    """One received pilot symbol y = H_f x + n with n ~ CN(0, sigma_n^2 I)."""
    if hf.n != pilots.n:
        raise ValueError("transfer matrix is %d x %d but pilot has %d tones"
                         % (hf.n, hf.n, pilots.n))
    gen = stream.generator() if isinstance(stream, RngStream) else stream
    y = hf.matrix @ pilots.symbols
    y += np.sqrt(noise.sigma_n2) * sample_cn(gen, pilots.n)
    return y


def ls_estimate(y, pilots):
    """Per-tone least squares: h_hat = y / x."""
    if y.shape != pilots.symbols.shape:
        raise ValueError("received vector and pilot length mismatch")
    return y / pilots.symbols


def draw_ls_model(sigma_factor, n_draws, stream):
    """Draw raw LS estimates directly from CN(0, Sigma).

    sigma_factor is a PSD factor B with B B^H = Sigma; returns an
    (n, n_draws) matrix with one estimate per column.
    """
    gen = stream.generator() if isinstance(stream, RngStream) else stream
    n = sigma_factor.shape[0]
    return sigma_factor @ sample_cn(gen, (sigma_factor.shape[1], n_draws))


def draw_ls_chain(profile, ofdm, tcm, pilots, noise, n_draws, stream):
    """Raw LS estimates from explicit channel realizations.

    Per symbol: draw Jakes-correlated path gains, form the time-frequency
    response F_tau H_t, receive the pilot through it with AWGN, divide by
    the pilot.  The result is distributed exactly CN(0, Sigma); unlike
    draw_ls_model this exercises the whole synthesis stack.  Returns the
    estimates as an (n, n_draws) matrix.
    """
    gen = stream.generator() if isinstance(stream, RngStream) else stream
    n = ofdm.n_tones
    ft = delay_transform(profile, ofdm)  # (n, n_paths)
    b = tcm.factor()
    sig = np.sqrt(profile.powers_lin)
    g = sample_cn(gen, (b.shape[1], profile.n_paths * n_draws))
    gains = (b @ g).reshape(n, profile.n_paths, n_draws) * sig[None, :, None]
    # (F_tau H_t x)_k = sum_l ft[k, l] * sum_m h_l(m) x_m
    inner = np.einsum("mls,m->ls", gains, pilots.symbols)
    resp = ft @ inner
    resp += np.sqrt(noise.sigma_n2) * sample_cn(gen, (n, n_draws))
    return resp / pilots.symbols[:, None]


def draw_ls_waveform(profile, ofdm, tcm, pilots, noise, n_draws, stream):
    """Raw LS estimates through the full ICI transfer matrix.

    Per symbol: CIR draw -> banded H_f -> y = H_f x + n -> y / x.  Unlike
    the other two routes the resulting statistics are NOT CN(0, Sigma);
    the per-tone division mixes all tones through the band, so the sample
    FCM of these draws carries the model mismatch that the waveform mode
    of the harness is there to measure.  Returns (n, n_draws).
    """
    gen = stream.generator() if isinstance(stream, RngStream) else stream
    out = np.empty((ofdm.n_tones, n_draws), dtype=complex)
    for s in range(n_draws):
        cir = sample_cir(profile, tcm, gen)
        hf = build_transfer_matrix(cir, ofdm)
        y = simulate_pilot_rx(hf, pilots, noise, gen)
        out[:, s] = ls_estimate(y, pilots)
    return out
