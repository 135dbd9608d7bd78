"""Experiment harness: deterministic Monte Carlo runs emitting CSV tables.

Every random draw comes from an RngStream keyed by (master seed, experiment
tag, grid indices, trial index), so a run is a pure function of its config:
the same config and seed produce byte-identical CSV no matter how many
worker processes execute it.  Reductions happen in trial-index order.
"""

import csv
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .bounds import (
    avgmse_lb,
    avgmse_lb_insightful,
    avgmse_lb_pilot_free,
    crlb_factor,
    lambda_max_fit,
    ls_covariance,
)
from .channel import (
    DopplerSpec,
    OfdmConfig,
    build_tcm,
    build_true_fcm,
    builtin_profile,
    check_cp,
    load_profile,
    measure_sir,
)
from .estimation import avg_mse, diag_bias, mle_fcm, sfcm
from .link import (
    NoiseSpec,
    draw_ls_model,
    draw_ls_waveform,
    generate_qpsk_pilots,
)
from .numerics import RngStream, psd_factor

__all__ = ["RunResult", "run_experiment", "CSV_HEADERS"]

CSV_HEADERS = {
    "eig-fit": ("N", "fdts", "lambda_numeric", "lambda_fit", "rel_dev"),
    "mse-vs-nt": ("N_t", "avgmse_empirical", "avgmse_lb", "mode"),
    "bound-tightness": ("N_t", "avgmse_mean_over_pilots", "lb_pilot_free", "lb_insightful"),
    "histograms": ("gamma_db", "f_d_hz", "trial", "avgmse", "signed_diag_err"),
    "sir-scan": ("fdts", "sir_db", "n_trials"),
}

_TRIAL_CHUNK = 50
_SIR_CAP_DB = 300.0


@dataclass
class RunResult:
    experiment: str
    header: tuple
    rows: list
    config_hash: str
    csv_path: str = ""
    extras: dict = field(default_factory=dict)


def resolve_profile(name):
    """Builtin profile name, else a path to a JSON profile."""
    try:
        return builtin_profile(name)
    except KeyError:
        return load_profile(name)


def _context(cfg):
    ofdm = OfdmConfig(cfg.n_tones, cfg.cp_len, cfg.sample_period_s)
    profile = resolve_profile(cfg.profile)
    check_cp(profile, ofdm)
    doppler = DopplerSpec(cfg.f_d_hz)
    return ofdm, profile, doppler


def _map_tasks(fn, tasks, workers):
    if workers <= 1:
        return [fn(t) for t in tasks]
    # map() yields results in submission order, which keeps reductions
    # independent of completion order.
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, tasks))


def _chunks(n_trials):
    return [(lo, min(lo + _TRIAL_CHUNK, n_trials)) for lo in range(0, n_trials, _TRIAL_CHUNK)]


def _fmt_cell(v):
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def write_csv(path, result, cfg):
    with open(path, "w", newline="") as fh:
        fh.write("# experiment=%s config=%s seed=%d\n"
                 % (result.experiment, result.config_hash, cfg.master_seed))
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(result.header)
        for row in result.rows:
            w.writerow([_fmt_cell(v) for v in row])
    result.csv_path = str(path)


# ---------------------------------------------------------------- mse-vs-nt

def _mse_chunk(args):
    cfg, n_t, lo, hi = args
    ofdm, profile, doppler = _context(cfg)
    tcm = build_tcm(ofdm, doppler)
    r_p = build_true_fcm(profile, ofdm)
    noise = NoiseSpec(cfg.snr_db)
    pilots = generate_qpsk_pilots(
        RngStream(cfg.master_seed, "pilot-fixed"), ofdm.n_tones)
    cov = ls_covariance(pilots, tcm, r_p, noise.sigma_n2, n_t)
    factor = psd_factor(cov.sigma) if cfg.mode == "model" else None
    out = np.empty(hi - lo)
    for t in range(lo, hi):
        stream = RngStream(cfg.master_seed, "mse", n_t, t)
        if cfg.mode == "model":
            draws = draw_ls_model(factor, n_t, stream)
        else:
            draws = draw_ls_waveform(profile, ofdm, tcm, pilots, noise, n_t, stream)
        est = mle_fcm(sfcm(draws), pilots, tcm, noise.sigma_n2)
        out[t - lo] = avg_mse(est, r_p)
    return out


def _run_mse_vs_nt(cfg, workers):
    ofdm, profile, doppler = _context(cfg)
    tcm = build_tcm(ofdm, doppler)
    r_p = build_true_fcm(profile, ofdm)
    noise = NoiseSpec(cfg.snr_db)
    pilots = generate_qpsk_pilots(
        RngStream(cfg.master_seed, "pilot-fixed"), ofdm.n_tones)
    cov = ls_covariance(pilots, tcm, r_p, noise.sigma_n2, cfg.n_t_list[0])

    tasks = [(cfg, n_t, lo, hi) for n_t in cfg.n_t_list for lo, hi in _chunks(cfg.n_trials)]
    parts = _map_tasks(_mse_chunk, tasks, workers)

    rows = []
    per_nt = {}
    i = 0
    for n_t in cfg.n_t_list:
        vals = np.concatenate(parts[i:i + len(_chunks(cfg.n_trials))])
        i += len(_chunks(cfg.n_trials))
        per_nt[n_t] = vals
        lb = avgmse_lb(crlb_factor(cov, n_t))
        rows.append((n_t, float(vals.mean()), lb, cfg.mode))
    return rows, {"per_trial": per_nt, "omega": cov.omega}


# ---------------------------------------------------------- bound-tightness

def _tightness_chunk(args):
    cfg, n_t, p, lo, hi = args
    ofdm, profile, doppler = _context(cfg)
    tcm = build_tcm(ofdm, doppler)
    r_p = build_true_fcm(profile, ofdm)
    noise = NoiseSpec(cfg.snr_db)
    pilots = generate_qpsk_pilots(RngStream(cfg.master_seed, "pilot", p), ofdm.n_tones)
    cov = ls_covariance(pilots, tcm, r_p, noise.sigma_n2, n_t)
    factor = psd_factor(cov.sigma)
    out = np.empty(hi - lo)
    for t in range(lo, hi):
        stream = RngStream(cfg.master_seed, "tight", n_t, p, t)
        draws = draw_ls_model(factor, n_t, stream)
        est = mle_fcm(sfcm(draws), pilots, tcm, noise.sigma_n2)
        out[t - lo] = avg_mse(est, r_p)
    return out


def _run_bound_tightness(cfg, workers):
    ofdm, profile, doppler = _context(cfg)
    tcm = build_tcm(ofdm, doppler)
    r_p = build_true_fcm(profile, ofdm)
    noise = NoiseSpec(cfg.snr_db)
    fdts = doppler.fdts(ofdm)
    lam = tcm.lam_max()

    pilot_ids = range(cfg.n_pilot_seqs)
    covs = {}
    for p in pilot_ids:
        pilots = generate_qpsk_pilots(RngStream(cfg.master_seed, "pilot", p), ofdm.n_tones)
        covs[p] = ls_covariance(pilots, tcm, r_p, noise.sigma_n2, cfg.n_t_list[0])

    chunks = _chunks(cfg.n_trials)
    tasks = [(cfg, n_t, p, lo, hi)
             for n_t in cfg.n_t_list for p in pilot_ids for lo, hi in chunks]
    parts = _map_tasks(_tightness_chunk, tasks, workers)

    rows = []
    per_pilot_means = {}
    per_pilot_lb = {}
    i = 0
    for n_t in cfg.n_t_list:
        means = np.empty(cfg.n_pilot_seqs)
        lbs = np.empty(cfg.n_pilot_seqs)
        for p in pilot_ids:
            vals = np.concatenate(parts[i:i + len(chunks)])
            i += len(chunks)
            means[p] = vals.mean()
            lbs[p] = avgmse_lb(crlb_factor(covs[p], n_t))
        per_pilot_means[n_t] = means
        per_pilot_lb[n_t] = lbs
        rows.append((
            n_t,
            float(means.mean()),
            avgmse_lb_pilot_free(ofdm.n_tones, n_t, noise.gamma, lam),
            avgmse_lb_insightful(ofdm.n_tones, n_t, noise.gamma, fdts),
        ))
    extras = {
        "per_pilot_means": per_pilot_means,
        "per_pilot_lb": per_pilot_lb,
        "omegas": {p: covs[p].omega for p in pilot_ids},
        "lam_max": lam,
    }
    return rows, extras


# -------------------------------------------------------------- histograms

def _hist_chunk(args):
    cfg, gi, fi, lo, hi = args
    ofdm, profile, _ = _context(cfg)
    doppler = DopplerSpec(cfg.f_d_hz_list[fi])
    tcm = build_tcm(ofdm, doppler)
    r_p = build_true_fcm(profile, ofdm)
    noise = NoiseSpec(cfg.snr_db_list[gi])
    n_t = cfg.n_t_list[0]
    pilots = generate_qpsk_pilots(
        RngStream(cfg.master_seed, "pilot-fixed"), ofdm.n_tones)
    cov = ls_covariance(pilots, tcm, r_p, noise.sigma_n2, n_t)
    factor = psd_factor(cov.sigma)
    mse = np.empty(hi - lo)
    sde = np.empty(hi - lo)
    for t in range(lo, hi):
        stream = RngStream(cfg.master_seed, "hist", gi, fi, t)
        draws = draw_ls_model(factor, n_t, stream)
        est = mle_fcm(sfcm(draws), pilots, tcm, noise.sigma_n2)
        mse[t - lo] = avg_mse(est, r_p)
        sde[t - lo] = diag_bias(est, r_p)
    return mse, sde


def _run_histograms(cfg, workers):
    cells = list(product(range(len(cfg.snr_db_list)), range(len(cfg.f_d_hz_list))))
    chunks = _chunks(cfg.n_trials)
    tasks = [(cfg, gi, fi, lo, hi) for gi, fi in cells for lo, hi in chunks]
    parts = _map_tasks(_hist_chunk, tasks, workers)

    rows = []
    cell_stats = {}
    i = 0
    for gi, fi in cells:
        mse = np.concatenate([parts[i + k][0] for k in range(len(chunks))])
        sde = np.concatenate([parts[i + k][1] for k in range(len(chunks))])
        i += len(chunks)
        gamma_db = cfg.snr_db_list[gi]
        f_d = cfg.f_d_hz_list[fi]
        for t in range(cfg.n_trials):
            rows.append((gamma_db, f_d, t, float(mse[t]), float(sde[t])))
        cell_stats[(gamma_db, f_d)] = {
            "avgmse_mean": float(mse.mean()),
            "sde_mean": float(sde.mean()),
            "sde_std": float(sde.std(ddof=1)),
        }
    return rows, {"cells": cell_stats}


# ----------------------------------------------------------------- eig-fit

def _eig_point(args):
    cfg, n, fdts = args
    # CP scales with the FFT size; the fit constant was calibrated under
    # the cp_len/n_tones ratio of the reference system.
    cp = int(round(n * cfg.cp_len / cfg.n_tones))
    ofdm = OfdmConfig(n, cp, cfg.sample_period_s)
    f_d = fdts / ofdm.symbol_period_s if fdts > 0 else 0.0
    tcm = build_tcm(ofdm, DopplerSpec(f_d))
    lam = tcm.lam_max()
    fit = float(lambda_max_fit(n, fdts))
    return lam, fit


def _run_eig_fit(cfg, workers):
    tasks = [(cfg, n, fdts) for n in cfg.n_list for fdts in cfg.fdts_list]
    parts = _map_tasks(_eig_point, tasks, workers)
    rows = []
    for (_, n, fdts), (lam, fit) in zip(tasks, parts):
        rel_dev = abs(lam - fit) / lam
        rows.append((n, fdts, lam, fit, rel_dev))
    return rows, {}


# ---------------------------------------------------------------- sir-scan

def _sir_point(args):
    cfg, i, fdts = args
    ofdm, profile, _ = _context(cfg)
    f_d = fdts / ofdm.symbol_period_s
    sir = measure_sir(ofdm, profile, DopplerSpec(f_d), cfg.n_trials,
                      RngStream(cfg.master_seed, "sirscan", i))
    return min(sir, _SIR_CAP_DB)


def _run_sir_scan(cfg, workers):
    tasks = [(cfg, i, fdts) for i, fdts in enumerate(cfg.fdts_list)]
    parts = _map_tasks(_sir_point, tasks, workers)
    rows = [(fdts, float(sir), cfg.n_trials)
            for (_, _, fdts), sir in zip(tasks, parts)]
    return rows, {}


_RUNNERS = {
    "mse-vs-nt": _run_mse_vs_nt,
    "bound-tightness": _run_bound_tightness,
    "histograms": _run_histograms,
    "eig-fit": _run_eig_fit,
    "sir-scan": _run_sir_scan,
}


def run_experiment(cfg, out_path=None, workers=1):
    """Run one experiment and optionally write its CSV table.

    out_path falls back to cfg.out_path; pass neither to skip the file and
    work with the returned rows directly.
    """
    rows, extras = _RUNNERS[cfg.experiment](cfg, workers)
    result = RunResult(
        experiment=cfg.experiment,
        header=CSV_HEADERS[cfg.experiment],
        rows=rows,
        config_hash=cfg.config_hash(),
        extras=extras,
    )
    path = out_path or cfg.out_path
    if path:
        write_csv(path, result, cfg)
    return result
