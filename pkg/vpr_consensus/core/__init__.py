"""
VPR Consensus - Core Modules

Descriptors, matching, consensus prediction, weighted sequence matching,
evaluation, synthetic traverses and the latency benchmark.
"""

from .descriptors import SadExtractor
from .predictor import ConsensusPredictor, StreamingPredictor
from .seqmatch import WeightedSequenceMatcher, StreamingSequenceMatcher
from .bench import Benchmarker

__all__ = [
    "SadExtractor",
    "ConsensusPredictor",
    "StreamingPredictor",
    "WeightedSequenceMatcher",
    "StreamingSequenceMatcher",
    "Benchmarker"
]
