"""qcgraft: numerical machinery for measured quasiconformal maps, grafted
rectangles, train-track integer approximation, conformal interpolation, and
a grid extremal-length engine, with a batch CLI on top."""

__version__ = "0.1.0"
