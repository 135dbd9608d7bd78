"""Figure rendering for fcm-crlb experiment CSVs.

The package consumes only the CSV tables written by the fcm-crlb CLI; it
never imports the simulation code. Rendering is deterministic: a given
(figure, CSV) pair produces byte-identical PNG and SVG output on repeat
runs.
"""

__version__ = "0.1.0"

from .csvio import SCHEMAS, CsvFormatError, load_table
from .figures import FIGURE_EXPERIMENTS, FIGURES, FigureSpec, render

__all__ = [
    "__version__",
    "SCHEMAS",
    "CsvFormatError",
    "load_table",
    "FIGURES",
    "FIGURE_EXPERIMENTS",
    "FigureSpec",
    "render",
]
