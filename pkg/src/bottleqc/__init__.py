"""Print quality control for glass bottles: alignment, filter/IQM features and classifiers."""

__version__ = "0.1.0"
