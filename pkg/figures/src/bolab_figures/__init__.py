"""Figure pipeline over the bolab CSV/JSON artifacts."""

from .schema import SchemaError, read_table
from .render import FigureSpec, render, render_all

__version__ = "0.1.0"

__all__ = ["SchemaError", "read_table", "FigureSpec", "render",
           "render_all", "__version__"]
