"""Models package for VPR Consensus."""

from .frames import ImageFrame, Descriptor, DescriptorSet
from .matrices import DistanceMatrix, GradientMatrix, WeightedDistanceMatrix, SequenceScoreMatrix
from .results import (
    MatchCandidate, SequenceMatch, PredictionVector, MaskedMatches, GroundTruth,
    Confusion, PRPoint, PRCurve, EvalReport, StageTiming, BenchEntry, BenchReport
)
from .config import SadConfig, SynthConfig, PredictorQualityConfig, PipelineConfig, BenchConfig

__all__ = [
    "ImageFrame",
    "Descriptor",
    "DescriptorSet",
    "DistanceMatrix",
    "GradientMatrix",
    "WeightedDistanceMatrix",
    "SequenceScoreMatrix",
    "MatchCandidate",
    "SequenceMatch",
    "PredictionVector",
    "MaskedMatches",
    "GroundTruth",
    "Confusion",
    "PRPoint",
    "PRCurve",
    "EvalReport",
    "StageTiming",
    "BenchEntry",
    "BenchReport",
    "SadConfig",
    "SynthConfig",
    "PredictorQualityConfig",
    "PipelineConfig",
    "BenchConfig"
]
