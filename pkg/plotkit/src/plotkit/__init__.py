"""Figure generation for sweep result CSVs.

The CSV file is the only contract with the simulator: these scripts know the
documented column names and nothing else.
"""

from .figure import FigureSpec, NoDataError, SchemaError, load_rows, render

__all__ = ["FigureSpec", "NoDataError", "SchemaError", "load_rows", "render"]
__version__ = "0.1.0"
