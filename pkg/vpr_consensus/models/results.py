#!/usr/bin/env python3
"""
Result Models

Match candidates, predictions, ground truth, PR curves and reports.
"""

from typing import List, Dict, Any, Optional
from dataclasses import dataclass, field

import numpy as np

from ..errors import ValidationError


@dataclass(frozen=True)
class MatchCandidate:
    """Best single-frame (or gradient-only) reference for a query."""
    query: int
    ref: int
    score: float

    def to_dict(self) -> Dict[str, Any]:
        return {'query': self.query, 'ref': self.ref, 'score': self.score}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'MatchCandidate':
        return cls(query=int(data['query']), ref=int(data['ref']), score=float(data['score']))


@dataclass(frozen=True)
class SequenceMatch(MatchCandidate):
    """Best sequence-ending reference for a query (argmin of a D_wseq column)."""


@dataclass(frozen=True)
class PredictionVector:
    """
    Per-query in-tolerance predictions.

    i_g0 is only present for consensus predictions; synthetic (perfect or
    degraded) vectors carry the candidate indices but no gradient argmax.
    """
    values: np.ndarray
    i_d0: np.ndarray
    i_g0: Optional[np.ndarray] = None
    window: int = 1
    source: str = 'consensus'

    def __post_init__(self):
        values = np.array(self.values, dtype=np.int8)
        i_d0 = np.array(self.i_d0, dtype=np.int64)
        if values.ndim != 1 or i_d0.shape != values.shape:
            raise ValidationError("Prediction values and i_d0 must be equal-length vectors", module='predictor')
        if not np.all((values == 0) | (values == 1)):
            raise ValidationError("Prediction values must be 0 or 1", module='predictor')
        values.setflags(write=False)
        i_d0.setflags(write=False)
        object.__setattr__(self, 'values', values)
        object.__setattr__(self, 'i_d0', i_d0)
        if self.i_g0 is not None:
            i_g0 = np.array(self.i_g0, dtype=np.int64)
            if i_g0.shape != values.shape:
                raise ValidationError("i_g0 must have one entry per query", module='predictor')
            expected = (np.abs(i_g0 - i_d0) <= self.window).astype(np.int8)
            mismatch = np.flatnonzero(expected != values)
            if mismatch.size:
                raise ValidationError(
                    "Prediction disagrees with its argmin/argmax indices",
                    module='predictor', index=int(mismatch[0])
                )
            i_g0.setflags(write=False)
            object.__setattr__(self, 'i_g0', i_g0)

    @property
    def m(self) -> int:
        return int(self.values.shape[0])

    @property
    def accepted_count(self) -> int:
        return int(self.values.sum())

    def to_dict(self) -> Dict[str, Any]:
        result = {
            'source': self.source,
            'window': self.window,
            'values': self.values.tolist(),
            'i_d0': self.i_d0.tolist()
        }
        if self.i_g0 is not None:
            result['i_g0'] = self.i_g0.tolist()
        return result


@dataclass
class MaskedMatches:
    """Candidates kept by a prediction mask, and the ones it abstained on."""
    accepted: List[MatchCandidate] = field(default_factory=list)
    abstained: List[MatchCandidate] = field(default_factory=list)

    @property
    def abstention_count(self) -> int:
        return len(self.abstained)


@dataclass(frozen=True)
class GroundTruth:
    """True reference index per query and the in-tolerance window in frames."""
    gt_ref: np.ndarray
    tolerance: int = 1

    def __post_init__(self):
        gt_ref = np.array(self.gt_ref, dtype=np.int64)
        if gt_ref.ndim != 1 or gt_ref.size == 0:
            raise ValidationError("Ground truth must be a non-empty vector", module='eval')
        if self.tolerance < 0:
            raise ValidationError(f"Tolerance must be >= 0, got {self.tolerance}", module='eval')
        negative = np.flatnonzero(gt_ref < 0)
        if negative.size:
            raise ValidationError("Ground-truth reference index is negative", module='eval', row=int(negative[0]))
        gt_ref.setflags(write=False)
        object.__setattr__(self, 'gt_ref', gt_ref)

    @property
    def m(self) -> int:
        return int(self.gt_ref.shape[0])

    def check_refs(self, n_refs: int) -> None:
        """Raise if any ground-truth index falls outside 0..n_refs-1."""
        outside = np.flatnonzero(self.gt_ref >= n_refs)
        if outside.size:
            raise ValidationError(
                f"Ground-truth reference {int(self.gt_ref[outside[0]])} outside database of {n_refs}",
                module='eval', row=int(outside[0])
            )

    def in_tolerance(self, query: int, ref: int) -> bool:
        return abs(int(ref) - int(self.gt_ref[query])) <= self.tolerance

    def correctness(self, refs: np.ndarray) -> np.ndarray:
        """Boolean in-tolerance flag for a full vector of per-query references."""
        refs = np.asarray(refs, dtype=np.int64)
        return np.abs(refs - self.gt_ref[:refs.shape[0]]) <= self.tolerance


@dataclass(frozen=True)
class Confusion:
    """True positives, false positives and false negatives."""
    tp: int
    fp: int
    fn: int

    @property
    def precision(self) -> float:
        accepted = self.tp + self.fp
        return float(self.tp) / float(accepted) if accepted else 1.0

    @property
    def recall(self) -> float:
        positives = self.tp + self.fn
        return float(self.tp) / float(positives) if positives else 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            'tp': self.tp, 'fp': self.fp, 'fn': self.fn,
            'precision': self.precision, 'recall': self.recall
        }


@dataclass(frozen=True)
class PRPoint:
    """One threshold of a PR sweep."""
    recall: float
    precision: float
    threshold: float
    tp: int
    fp: int
    fn: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            'recall': self.recall,
            'precision': self.precision,
            'threshold': self.threshold,
            'tp': self.tp,
            'fp': self.fp,
            'fn': self.fn
        }


@dataclass
class PRCurve:
    """PR points in sweep order (loosening threshold) and the bounded AUC."""
    points: List[PRPoint]
    auc_20r: float = 0.0
    r_max: float = 0.2
    direction: str = 'min_is_best'

    @property
    def recalls(self) -> np.ndarray:
        return np.array([p.recall for p in self.points], dtype=np.float64)

    @property
    def precisions(self) -> np.ndarray:
        return np.array([p.precision for p in self.points], dtype=np.float64)

    @property
    def max_recall(self) -> float:
        return float(self.recalls.max()) if self.points else 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            'direction': self.direction,
            'r_max': self.r_max,
            'auc_20r': self.auc_20r,
            'max_recall': self.max_recall,
            'points': [p.to_dict() for p in self.points]
        }


@dataclass
class EvalReport:
    """Curve, bounded AUC, operating-point counts and the config that produced them."""
    name: str
    curve: PRCurve
    operating_points: Dict[str, PRPoint] = field(default_factory=dict)
    config: Dict[str, Any] = field(default_factory=dict)
    abstentions: int = 0
    prediction: Optional[PredictionVector] = None

    @property
    def auc_20r(self) -> float:
        return self.curve.auc_20r

    def to_dict(self) -> Dict[str, Any]:
        result = {
            'name': self.name,
            'auc_20r': self.curve.auc_20r,
            'abstentions': self.abstentions,
            'operating_points': {key: p.to_dict() for key, p in self.operating_points.items()},
            'config': self.config,
            'curve': self.curve.to_dict()
        }
        if self.prediction is not None:
            result['prediction'] = self.prediction.to_dict()
        return result


@dataclass(frozen=True)
class StageTiming:
    """Per-query latency statistics for one stage, in milliseconds."""
    mean_ms: float
    median_ms: float
    p99_ms: float

    @classmethod
    def from_samples(cls, samples_ms: np.ndarray) -> 'StageTiming':
        samples = np.asarray(samples_ms, dtype=np.float64)
        return cls(
            mean_ms=float(samples.mean()),
            median_ms=float(np.median(samples)),
            p99_ms=float(np.percentile(samples, 99))
        )

    def to_dict(self) -> Dict[str, Any]:
        return {'mean_ms': self.mean_ms, 'median_ms': self.median_ms, 'p99_ms': self.p99_ms}


@dataclass
class BenchEntry:
    """Latencies measured at one reference-database size."""
    n_refs: int
    prediction: StageTiming
    sequence: StageTiming
    queries: int

    @property
    def combined_mean_ms(self) -> float:
        return self.prediction.mean_ms + self.sequence.mean_ms

    def to_dict(self) -> Dict[str, Any]:
        return {
            'n_refs': self.n_refs,
            'queries': self.queries,
            'prediction': self.prediction.to_dict(),
            'sequence': self.sequence.to_dict(),
            'combined_mean_ms': self.combined_mean_ms
        }


@dataclass
class BenchReport:
    """Latency benchmark over reference-set sizes with a linear scaling fit."""
    entries: List[BenchEntry]
    reps: int
    seq_len: int
    slope_ms_per_ref: float = 0.0
    intercept_ms: float = 0.0
    r_squared: float = 0.0
    platform: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'reps': self.reps,
            'seq_len': self.seq_len,
            'linear_fit': {
                'slope_ms_per_ref': self.slope_ms_per_ref,
                'intercept_ms': self.intercept_ms,
                'r_squared': self.r_squared
            },
            'entries': [entry.to_dict() for entry in self.entries],
            'platform': self.platform
        }
