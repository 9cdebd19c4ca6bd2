"""Figure regeneration for neelwall result files."""

from .plotting import FIGURE_KINDS, FigureSpec, SchemaError, plot

__version__ = "0.1.0"
