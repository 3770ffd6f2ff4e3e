"""
VPR Consensus

Unsupervised localization-quality prediction and prediction-weighted
sequence matching for visual place recognition.
"""

__version__ = "1.0.0"
__author__ = "VPR Consensus Team"
__description__ = "Distance/gradient consensus prediction, weighted sequence matching and PR evaluation"

from .app import main

__all__ = ["main"]
