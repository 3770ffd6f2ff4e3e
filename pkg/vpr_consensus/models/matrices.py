#!/usr/bin/env python3
"""
Matrix Models

Reference-by-query matrices produced along the pipeline. Rows are
references (n), columns are queries (m). All matrices are read-only once
constructed.
"""

from typing import Dict, Any, Optional
from dataclasses import dataclass

import numpy as np

from ..errors import ValidationError

METRICS = ('euclidean', 'cosine', 'precomputed')
DMIN_MODES = ('global', 'running')
BOUNDARIES = ('replicate', 'zero')


def _readonly(values: Any, name: str, module: str) -> np.ndarray:
    array = np.array(values, dtype=np.float64)
    if array.ndim != 2 or array.shape[0] == 0 or array.shape[1] == 0:
        raise ValidationError(f"{name} must be a non-empty 2-D matrix, got shape {array.shape}", module=module)
    bad = np.argwhere(~np.isfinite(array))
    if bad.size:
        row, col = (int(v) for v in bad[0])
        raise ValidationError(f"{name} contains a non-finite value", module=module, row=row, column=col)
    array.setflags(write=False)
    return array


def _summary(values: np.ndarray) -> Dict[str, Any]:
    return {
        'shape': list(values.shape),
        'min': float(values.min()),
        'max': float(values.max()),
        'mean': float(values.mean())
    }


@dataclass(frozen=True)
class DistanceMatrix:
    """Feature distances between n references (rows) and m queries (columns)."""
    values: np.ndarray
    metric: str = 'euclidean'
    zero_norm_pairs: int = 0

    def __post_init__(self):
        values = _readonly(self.values, "Distance matrix", 'matching')
        if values.shape[0] < 2:
            raise ValidationError(f"Distance matrix needs at least 2 references, got {values.shape[0]}", module='matching')
        negative = np.argwhere(values < 0)
        if negative.size:
            row, col = (int(v) for v in negative[0])
            raise ValidationError("Distance matrix contains a negative distance", module='matching', row=row, column=col)
        if self.metric not in METRICS:
            raise ValidationError(f"Unknown metric: {self.metric}", module='matching')
        object.__setattr__(self, 'values', values)

    @property
    def n(self) -> int:
        return int(self.values.shape[0])

    @property
    def m(self) -> int:
        return int(self.values.shape[1])

    def column(self, j: int) -> np.ndarray:
        if not 0 <= j < self.m:
            raise ValidationError(f"Query index out of range: {j} (m={self.m})", module='matching', index=j)
        return self.values[:, j]

    def to_dict(self) -> Dict[str, Any]:
        result = {'metric': self.metric, **_summary(self.values)}
        if self.zero_norm_pairs:
            result['zero_norm_pairs'] = self.zero_norm_pairs
        return result


@dataclass(frozen=True)
class GradientMatrix:
    """Smoothed (values) and raw modified-average gradients aligned with D."""
    values: np.ndarray
    raw: np.ndarray
    kernel: np.ndarray

    def __post_init__(self):
        values = _readonly(self.values, "Gradient matrix", 'predictor')
        raw = _readonly(self.raw, "Raw gradient matrix", 'predictor')
        kernel = _readonly(self.kernel, "Smoothing kernel", 'predictor')
        if values.shape != raw.shape:
            raise ValidationError(f"Gradient shapes differ: {values.shape} vs {raw.shape}", module='predictor')
        if kernel.shape != (3, 3):
            raise ValidationError(f"Smoothing kernel must be 3x3, got {kernel.shape}", module='predictor')
        object.__setattr__(self, 'values', values)
        object.__setattr__(self, 'raw', raw)
        object.__setattr__(self, 'kernel', kernel)

    @property
    def n(self) -> int:
        return int(self.values.shape[0])

    @property
    def m(self) -> int:
        return int(self.values.shape[1])


@dataclass(frozen=True)
class WeightedDistanceMatrix:
    """
    D_w: D with predicted-good minima pulled toward D_min.

    d_min holds the D_min used for each query column (constant in global
    mode, the running minimum in running mode). weighted_rows[j] is the row
    that was weighted in column j, or -1 when the column is untouched.
    """
    values: np.ndarray
    w: float
    d_min: np.ndarray
    weighted_rows: np.ndarray
    dmin_mode: str = 'global'

    def __post_init__(self):
        values = _readonly(self.values, "Weighted distance matrix", 'seqmatch')
        d_min = np.array(self.d_min, dtype=np.float64)
        rows = np.array(self.weighted_rows, dtype=np.int64)
        if d_min.shape != (values.shape[1],) or rows.shape != (values.shape[1],):
            raise ValidationError("d_min and weighted_rows must have one entry per query", module='seqmatch')
        if self.dmin_mode not in DMIN_MODES:
            raise ValidationError(f"Unknown dmin mode: {self.dmin_mode}", module='seqmatch')
        d_min.setflags(write=False)
        rows.setflags(write=False)
        object.__setattr__(self, 'values', values)
        object.__setattr__(self, 'd_min', d_min)
        object.__setattr__(self, 'weighted_rows', rows)

    @property
    def n(self) -> int:
        return int(self.values.shape[0])

    @property
    def m(self) -> int:
        return int(self.values.shape[1])

    @property
    def weighted_count(self) -> int:
        return int(np.count_nonzero(self.weighted_rows >= 0))


@dataclass(frozen=True)
class SequenceScoreMatrix:
    """D_wseq: trailing-diagonal sums of L consecutive weighted distances."""
    values: np.ndarray
    seq_len: int
    boundary: str = 'replicate'
    source: Optional[str] = None

    def __post_init__(self):
        values = _readonly(self.values, "Sequence score matrix", 'seqmatch')
        if self.seq_len < 1:
            raise ValidationError(f"Sequence length must be >= 1, got {self.seq_len}", module='seqmatch')
        if self.boundary not in BOUNDARIES:
            raise ValidationError(f"Unknown boundary mode: {self.boundary}", module='seqmatch')
        object.__setattr__(self, 'values', values)

    @property
    def n(self) -> int:
        return int(self.values.shape[0])

    @property
    def m(self) -> int:
        return int(self.values.shape[1])

    def to_dict(self) -> Dict[str, Any]:
        return {'seq_len': self.seq_len, 'boundary': self.boundary, **_summary(self.values)}
