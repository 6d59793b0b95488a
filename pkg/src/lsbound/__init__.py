"""Uniform L_s-norm bounds for empirical and regression-type processes."""

__version__ = "0.1.0"
