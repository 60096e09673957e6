"""Channel-model toolkit for outdoor 0.5-100 GHz propagation studies."""

__version__ = "0.1.0"
