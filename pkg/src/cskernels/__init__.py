"""Heat kernels, Green functions and weighted-norm tools for degenerate Bessel-type operators."""

__version__ = "0.1.0"
