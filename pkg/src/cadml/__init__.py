"""Coronary-artery-disease classification pipeline on the Cleveland dataset."""

__version__ = "0.1.0"
