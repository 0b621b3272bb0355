"""Maximal operators of convolution type: kernels, evolutions and variation checks."""

__version__ = "0.1.0"
