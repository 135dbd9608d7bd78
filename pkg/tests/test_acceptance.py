"""Acceptance suite: one test per release criterion, one PASS/FAIL line each.

Statistical criteria run at frozen seeds chosen once in advance; the gates
below are the release gates, not re-tuned per run.  The paper-scale variant
of the attainment check is opt-in via FCM_PAPER_SCALE=1 since it needs
minutes, not seconds.
"""

import os
import time

import numpy as np
import pytest

from fcm_crlb.bounds import CrlbFactor, crlb_entry, crlb_factor, ls_covariance, tmse_lb
from fcm_crlb.channel import (
    DopplerSpec,
    OfdmConfig,
    build_tcm,
    build_transfer_matrix,
    build_true_fcm,
    builtin_profile,
    measure_sir,
    sample_cir,
)
from fcm_crlb.config import ExperimentConfig, paper_preset
from fcm_crlb.estimation import wishart_second_moment_check
from fcm_crlb.experiments import run_experiment
from fcm_crlb.link import NoiseSpec, generate_qpsk_pilots
from fcm_crlb.numerics import RngStream
from test_bounds import fisher_crlb_matrix, random_crlb_config
from test_channel import transfer_matrix_double_sum


_console = None


@pytest.fixture(autouse=True)
def _report_console(capsys):
    # hold the capture fixture so report() can write through it
    global _console
    _console = capsys
    yield
    _console = None


def report(num, ok, detail):
    # suspend capture so the line always lands in the console transcript
    line = "criterion %d %s: %s" % (num, "PASS" if ok else "FAIL", detail)
    if _console is not None:
        with _console.disabled():
            print(line, flush=True)
    else:
        print(line, flush=True)
    assert ok, "criterion %d failed: %s" % (num, detail)


def test_criterion_1_sir_floor():
    """SIR of the ICI transfer matrix at fdts = 0.1 stays above 17.8 dB."""
    t0 = time.monotonic()
    ofdm = OfdmConfig(n_tones=128, cp_len=16, sample_period_s=8e-7)
    profile = builtin_profile("eva", ofdm)
    f_d = 0.1 / ofdm.symbol_period_s
    sir = measure_sir(ofdm, profile, DopplerSpec(f_d), 1000, RngStream(1, "sir"))
    elapsed = time.monotonic() - t0
    ok = sir >= 17.8 and elapsed <= 120.0
    report(1, ok, "sir=%.3f dB (>= 17.8), 1000 matrices, N=128, %.1fs (<= 120s)"
           % (sir, elapsed))


def test_criterion_2_crlb_attainment():
    """Mean AvgMSE of the ML estimator within 10% of the CRLB at each N_t."""
    t0 = time.monotonic()
    cfg = ExperimentConfig("mse-vs-nt", n_tones=32, cp_len=4,
                           n_t_list=(50, 100, 200, 400), n_trials=500,
                           master_seed=1)
    res = run_experiment(cfg)
    devs = {n_t: abs(emp / lb - 1) for n_t, emp, lb, _ in res.rows}
    worst = max(devs.values())
    elapsed = time.monotonic() - t0
    ok = worst <= 0.10 and elapsed <= 300.0
    report(2, ok, "worst |mean/bound - 1|=%.4f (<= 0.10) over N_t=%s, "
           "500 trials each, %.1fs (<= 300s)"
           % (worst, sorted(devs), elapsed))


@pytest.mark.skipif(not os.environ.get("FCM_PAPER_SCALE"),
                    reason="paper-scale attainment run is opt-in: FCM_PAPER_SCALE=1")
@pytest.mark.parametrize("profile", ["eva", "etu"])
def test_criterion_2_crlb_attainment_paper_scale(profile):
    """Same 10% gate at the published figure scale (N=128, both profiles)."""
    cfg = ExperimentConfig("mse-vs-nt", profile=profile, master_seed=1,
                           **paper_preset("mse-vs-nt"))
    res = run_experiment(cfg)
    worst = max(abs(emp / lb - 1) for _, emp, lb, _ in res.rows)
    report(2, worst <= 0.10,
           "paper scale %s: worst |mean/bound - 1|=%.4f (<= 0.10)" % (profile, worst))


def test_criterion_3_bound_ordering_and_tightness():
    """Pilot-averaged MSE dominates the pilot-free bound; closed form tracks it."""
    cfg = ExperimentConfig("bound-tightness", n_tones=32, cp_len=4,
                           f_d_hz=798.611111, n_t_list=(50, 100, 200),
                           n_trials=50, n_pilot_seqs=100, master_seed=26)
    res = run_experiment(cfg)
    order_ok = all(mean >= lb_pf * (1 - 0.02) for _, mean, lb_pf, _ in res.rows)
    tight = max(abs(lb_ins / mean - 1) for _, mean, _, lb_ins in res.rows)
    ok = order_ok and tight <= 0.15
    ratios = ["%.3f" % (mean / lb_pf) for _, mean, lb_pf, _ in res.rows]
    report(3, ok, "100 pilots, N=32: mean/pilot-free=%s (>= 0.98 each), "
           "worst |closed-form/mean - 1|=%.4f (<= 0.15)" % (ratios, tight))


def test_criterion_4_eigenvalue_fit():
    """Top TCM eigenvalue stays within 5% of N J0(2 pi 0.35 fdts) on the grid."""
    cfg = ExperimentConfig("eig-fit")  # N in {128..1024} x 20 fdts points
    res = run_experiment(cfg)
    assert len(res.rows) == 80
    worst = max(row[4] for row in res.rows)
    report(4, worst <= 0.05,
           "max rel dev=%.4f (<= 0.05) over %d (N, fdts) points" % (worst, len(res.rows)))


def test_criterion_5_unbiased_and_insensitive():
    """Signed diagonal error consistent with zero; AvgMSE flat across cells."""
    cfg = ExperimentConfig("histograms", n_tones=16, cp_len=4, n_t_list=(200,),
                           n_trials=2000, snr_db_list=(10.0, 15.0, 20.0),
                           f_d_hz_list=(100.0, 200.0, 300.0), master_seed=138)
    res = run_experiment(cfg)
    cells = res.extras["cells"]
    assert len(cells) == 9
    zmax = max(abs(s["sde_mean"]) / (s["sde_std"] / np.sqrt(cfg.n_trials))
               for s in cells.values())
    means = [s["avgmse_mean"] for s in cells.values()]
    spread = (max(means) - min(means)) / float(np.mean(means))
    ok = zmax <= 3.0 and spread < 0.05
    report(5, ok, "9 cells x 2000 runs: max |z(diag bias)|=%.3f (<= 3), "
           "AvgMSE spread=%.4f (< 0.05)" % (zmax, spread))


def test_criterion_6_wishart_moments():
    """Sample-FCM second central moments match the Wishart law within 5%."""
    t0 = time.monotonic()
    ofdm = OfdmConfig(n_tones=4, cp_len=4, sample_period_s=8e-7)
    profile = builtin_profile("eva", ofdm)
    tcm = build_tcm(ofdm, DopplerSpec(200.0))
    r_p = build_true_fcm(profile, ofdm)
    pilots = generate_qpsk_pilots(RngStream(3, "pilot-fixed"), 4)
    cov = ls_covariance(pilots, tcm, r_p, NoiseSpec(20.0).sigma_n2, 20)
    dev = wishart_second_moment_check(cov.sigma_prime, 20, 100000,
                                      RngStream(3, "wishart"))
    report(6, dev <= 0.05, "N=4, N_t=20, 1e5 runs: max rel dev=%.4f (<= 0.05), %.1fs"
           % (dev, time.monotonic() - t0))


def test_criterion_7_fisher_inversion():
    """Explicit Fisher-matrix inversion reproduces crlb_entry on random configs."""
    rng = np.random.default_rng(0)
    worst = 0.0
    for trial in range(20):
        cov, pilots = random_crlb_config(rng, trial)
        n = cov.sigma.shape[0]
        got = fisher_crlb_matrix(cov, pilots)
        factor = crlb_factor(cov)
        ref = np.array([[crlb_entry(factor, i, j, k, l)
                         for k in range(n) for l in range(n)]
                        for i in range(n) for j in range(n)])
        dev = float(np.max(np.abs(got - ref) / np.maximum(np.abs(ref), 1e-12)))
        worst = max(worst, dev)
    report(7, worst <= 1e-8, "20 random configs (N <= 4): worst rel dev=%.2e (<= 1e-8)"
           % worst)


def test_criterion_8_oracle_equivalences():
    """Fast paths agree with their literal definitions."""
    # ICI transfer matrix vs the quadruple-sum definition at N in {4, 6, 8}
    worst_hf = 0.0
    for n in (4, 6, 8):
        ofdm = OfdmConfig(n_tones=n, cp_len=4, sample_period_s=8e-7)
        profile = builtin_profile("eva", ofdm)
        tcm = build_tcm(ofdm, DopplerSpec(300.0))
        cir = sample_cir(profile, tcm, RngStream(8, "oracle", n))
        hf = build_transfer_matrix(cir, ofdm)
        ref = transfer_matrix_double_sum(cir, ofdm)
        worst_hf = max(worst_hf, float(np.max(np.abs(hf.matrix - ref))))
    hf_ok = worst_hf <= 1e-10

    # entry access vs the materialized Kronecker product at N = 2; dyadic
    # entries keep every product exactly representable, so "equal" means
    # bitwise equal, not within rounding
    a = np.array([[1.5, 0.5 - 0.25j], [0.5 + 0.25j, 2.0]])
    factor = CrlbFactor(a=a, n_t=11)
    full = np.kron(a, a.T) / 11
    kron_ok = all(
        crlb_entry(factor, i, j, k, l) == full[2 * i + j, 2 * k + l]
        for i in range(2) for j in range(2) for k in range(2) for l in range(2)
    )

    # total-MSE bound vs the trace of the materialized CRLB at N = 4
    ofdm = OfdmConfig(n_tones=4, cp_len=4, sample_period_s=8e-7)
    tcm = build_tcm(ofdm, DopplerSpec(200.0))
    r_p = build_true_fcm(builtin_profile("eva", ofdm), ofdm)
    pilots = generate_qpsk_pilots(RngStream(8, "tr"), 4)
    cov = ls_covariance(pilots, tcm, r_p, NoiseSpec(20.0).sigma_n2, 37)
    f4 = crlb_factor(cov)
    trace_ref = float(np.real(np.trace(np.kron(f4.a, f4.a.T)))) / 37
    trace_dev = abs(tmse_lb(f4) - trace_ref) / trace_ref
    trace_ok = trace_dev <= 1e-10

    ok = hf_ok and kron_ok and trace_ok
    report(8, ok, "transfer dev=%.2e (<= 1e-10), kron entries exact=%s, "
           "trace dev=%.2e (<= 1e-10)" % (worst_hf, kron_ok, trace_dev))


def test_criterion_9_csv_determinism(tmp_path):
    """Worker count never changes a run's CSV bytes."""
    configs = {
        "mse-vs-nt": dict(n_tones=8, cp_len=4, n_t_list=(4, 6), n_trials=6),
        "bound-tightness": dict(n_tones=8, cp_len=4, n_t_list=(4,), n_trials=4,
                                n_pilot_seqs=3),
        "histograms": dict(n_tones=8, cp_len=4, n_t_list=(8,), n_trials=5,
                           snr_db_list=(10.0, 20.0), f_d_hz_list=(100.0,)),
        "eig-fit": dict(n_list=(8, 16), fdts_list=(0.01, 0.1)),
        "sir-scan": dict(n_tones=8, cp_len=4, fdts_list=(0.02, 0.05), n_trials=5),
    }
    stable = []
    for experiment, kw in sorted(configs.items()):
        cfg = ExperimentConfig(experiment, master_seed=9, **kw)
        a = tmp_path / (experiment + "-w1.csv")
        b = tmp_path / (experiment + "-w4.csv")
        run_experiment(cfg, out_path=str(a), workers=1)
        run_experiment(cfg, out_path=str(b), workers=4)
        stable.append(a.read_bytes() == b.read_bytes())
    report(9, all(stable), "5 experiments byte-identical for workers 1 vs 4: %s"
           % dict(zip(sorted(configs), stable)))
