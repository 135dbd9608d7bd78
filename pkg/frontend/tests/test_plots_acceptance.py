"""End-to-end check: every figure renders from CSVs written by the
fcm-crlb CLI, in both output formats, with byte-stable repeat renders.

The CSVs are generated through the command line only; this package never
imports the simulation code.
"""

import shutil
import subprocess
import sys

import pytest

from fcm_plots import FigureSpec, render

_console = None


@pytest.fixture(autouse=True)
def _report_console(capsys):
    # hold the capture fixture so report() can write through it
    global _console
    _console = capsys
    yield
    _console = None

# experiment invocations matching the simulation package's acceptance runs
CSV_JOBS = {
    "fig1": ["eig-fit"],
    "fig2": ["mse-vs-nt", "--n-tones", "32", "--cp-len", "4",
             "--n-t-list", "50,100,200,400", "--n-trials", "500",
             "--seed", "1"],
    "fig3": ["bound-tightness", "--n-tones", "32", "--cp-len", "4",
             "--f-d-hz", "798.611111", "--n-t-list", "50,100,200",
             "--n-trials", "50", "--n-pilot-seqs", "100", "--seed", "26"],
    "fig4": ["histograms", "--n-tones", "16", "--cp-len", "4",
             "--n-t-list", "200", "--n-trials", "2000",
             "--snr-db-list", "10,15,20", "--f-d-hz-list", "100,200,300",
             "--seed", "138"],
}


def report(num, ok, detail):
    # suspend capture so the line always lands in the console transcript
    line = "criterion %d %s: %s" % (num, "PASS" if ok else "FAIL", detail)
    if _console is not None:
        with _console.disabled():
            print(line, flush=True)
    else:
        print(line, flush=True)
    assert ok, "criterion %d failed: %s" % (num, detail)


def crlb_command():
    exe = shutil.which("fcm-crlb")
    if exe:
        return [exe]
    return [sys.executable, "-m", "fcm_crlb.cli"]


@pytest.fixture(scope="session")
def criteria_csvs(tmp_path_factory):
    root = tmp_path_factory.mktemp("criteria_csvs")
    base = crlb_command()
    paths = {}
    for figure, args in CSV_JOBS.items():
        out = root / ("%s.csv" % figure)
        proc = subprocess.run(base + args + ["--out", str(out),
                                             "--workers", "4"],
                              capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        paths[figure] = str(out)
    return paths


def test_criterion_10_figures_from_experiment_csvs(criteria_csvs, tmp_path):
    bad = []
    n_images = 0
    for figure in sorted(CSV_JOBS):
        for ext in ("png", "svg"):
            blobs = []
            for tag in ("a", "b"):
                out = tmp_path / ("%s_%s.%s" % (figure, tag, ext))
                fig = render(FigureSpec(figure=figure,
                                        csv_path=criteria_csvs[figure],
                                        out_path=str(out)))
                data = out.read_bytes()
                if not data or not fig.axes:
                    bad.append("%s.%s empty" % (figure, ext))
                blobs.append(data)
            n_images += 1
            if blobs[0] != blobs[1]:
                bad.append("%s.%s differs across renders" % (figure, ext))
    detail = ("%d figure images (fig1..fig4, png+svg) rendered from "
              "experiment CSVs, repeat renders byte-identical" % n_images
              if not bad else "; ".join(bad))
    report(10, not bad, detail)
