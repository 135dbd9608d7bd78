"""CSV loading with schema enforcement for the harness tables.

The producer prefixes each file with a `# experiment=... config=... seed=...`
comment line; readers here skip any number of leading comment or blank rows,
then require the header to match the experiment schema exactly.
"""

import csv

import numpy as np

__all__ = ["SCHEMAS", "CsvFormatError", "load_table"]

SCHEMAS = {
    "eig-fit": ("N", "fdts", "lambda_numeric", "lambda_fit", "rel_dev"),
    "mse-vs-nt": ("N_t", "avgmse_empirical", "avgmse_lb", "mode"),
    "bound-tightness": ("N_t", "avgmse_mean_over_pilots", "lb_pilot_free", "lb_insightful"),
    "histograms": ("gamma_db", "f_d_hz", "trial", "avgmse", "signed_diag_err"),
    "sir-scan": ("fdts", "sir_db", "n_trials"),
}

_STRING_COLUMNS = frozenset(["mode"])


class CsvFormatError(ValueError):
    """Header does not match the declared schema, or the table has no rows."""


def load_table(path, experiment):
    """Parse one harness CSV into a dict of column name -> numpy array."""
    if experiment not in SCHEMAS:
        raise ValueError("unknown experiment %r (have: %s)"
                         % (experiment, ", ".join(sorted(SCHEMAS))))
    header = SCHEMAS[experiment]
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh)
                if r and r[0].strip() and not r[0].lstrip().startswith("#")]
    if not rows:
        raise CsvFormatError("%s: no header row" % path)
    got = tuple(c.strip() for c in rows[0])
    if got != header:
        raise CsvFormatError("%s: header %s does not match the %r schema %s"
                             % (path, list(got), experiment, list(header)))
    body = rows[1:]
    if not body:
        raise CsvFormatError("%s: no data rows" % path)
    for k, row in enumerate(body):
        if len(row) != len(header):
            raise CsvFormatError("%s: data row %d has %d cells, expected %d"
                                 % (path, k + 1, len(row), len(header)))
    columns = {}
    for k, name in enumerate(header):
        cells = [row[k] for row in body]
        if name in _STRING_COLUMNS:
            columns[name] = np.array(cells)
            continue
        try:
            columns[name] = np.array([float(c) for c in cells])
        except ValueError:
            raise CsvFormatError("%s: column %r has a non-numeric cell" % (path, name))
    return columns
