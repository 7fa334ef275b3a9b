"""Naive Bayes and C4.5 classifiers for engineering-materials data."""

__version__ = "0.1.0"
