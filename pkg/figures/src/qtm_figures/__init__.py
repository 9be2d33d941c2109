"""Offline rendering of qtm dataset files into static figures."""

from .io import DatasetFile, SchemaError, read_dataset
from .render import FIGURE_KINDS, FigureSpec, RenderReport, render

__version__ = "0.1.0"

__all__ = [
    "DatasetFile",
    "FIGURE_KINDS",
    "FigureSpec",
    "RenderReport",
    "SchemaError",
    "read_dataset",
    "render",
    "__version__",
]
