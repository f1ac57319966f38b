"""Figure rendering for scatquad CSV output: error-vs-degree convergence
panels and pointwise error/estimate scatter plots."""

from .plots import FigureSpec, SchemaError, plot_convergence, plot_pointwise

__version__ = "0.1.0"
