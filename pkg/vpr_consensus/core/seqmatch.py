#!/usr/bin/env python3
"""
Sequence Matching Module

Prediction-weighted sequence matching. Predicted-good minima are pulled
toward D_min, then every score sums L consecutive weighted distances along
the trailing diagonal ending at (i, j). With no predictions (or w = 0) this
is plain SeqSLAM-style identity-kernel sequence matching.
"""

import logging
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..errors import ValidationError
from ..models.matrices import DistanceMatrix, WeightedDistanceMatrix, SequenceScoreMatrix
from ..models.results import PredictionVector, SequenceMatch


def _check_weight(w: float) -> float:
    w = float(w)
    if not 0.0 <= w <= 1.0:
        raise ValidationError(f"Weighting factor must be in [0, 1], got {w}", module='seqmatch')
    return w


def _weighted_value(d0: np.ndarray, d_min: np.ndarray, w: float) -> np.ndarray:
    if w == 1.0:
        return np.array(d_min, dtype=np.float64, copy=True)
    return np.maximum(d0 - w * (d0 - d_min), d_min)


def weight_matrix(
    D: DistanceMatrix,
    pred: Union[PredictionVector, Sequence[int], np.ndarray],
    w: float = 0.99,
    dmin_mode: str = 'global'
) -> WeightedDistanceMatrix:
    """
    Replace d0 at (argmin, j) by d0 - w (d0 - D_min) for every predicted-good query.

    D_min is the global minimum of D, or in running mode the minimum over the
    columns seen so far. All other entries are copied unchanged.
    """
    w = _check_weight(w)
    bits = pred.values if isinstance(pred, PredictionVector) else np.asarray(pred, dtype=np.int8)
    if bits.shape != (D.m,):
        raise ValidationError(f"Prediction length {bits.shape} does not match {D.m} queries", module='seqmatch')

    column_min = D.values.min(axis=0)
    if dmin_mode == 'global':
        d_min = np.full(D.m, column_min.min())
    elif dmin_mode == 'running':
        d_min = np.minimum.accumulate(column_min)
    else:
        raise ValidationError(f"Unknown dmin mode: {dmin_mode}", module='seqmatch')

    values = np.array(D.values, copy=True)
    weighted_rows = np.full(D.m, -1, dtype=np.int64)
    queries = np.flatnonzero(bits)
    if queries.size and w > 0.0:
        rows = np.argmin(D.values[:, queries], axis=0)
        d0 = D.values[rows, queries]
        values[rows, queries] = _weighted_value(d0, d_min[queries], w)
        weighted_rows[queries] = rows

    logging.debug(f"Weighted {queries.size}/{D.m} columns with w={w} ({dmin_mode} D_min)")
    return WeightedDistanceMatrix(values=values, w=w, d_min=d_min, weighted_rows=weighted_rows, dmin_mode=dmin_mode)


def _diagonal_sum(Dw: np.ndarray, rows: np.ndarray, cols: np.ndarray, seq_len: int, boundary: str) -> np.ndarray:
    """Sum Dw[i-k, j-k] for k < seq_len over the given row/column index grids."""
    total = np.zeros((rows.shape[0], cols.shape[0]), dtype=np.float64)
    for k in range(seq_len):
        r = rows - k
        c = cols - k
        term = Dw[np.ix_(np.maximum(r, 0), np.maximum(c, 0))]
        if boundary == 'zero':
            term = np.where((r[:, None] >= 0) & (c[None, :] >= 0), term, 0.0)
        total += term
    return total


def sequence_scores(Dw: Union[WeightedDistanceMatrix, DistanceMatrix], L: int = 2, boundary: str = 'replicate') -> SequenceScoreMatrix:
    """
    Convolve D_w with an L x L identity kernel, anchored at the trailing frame.

    Out-of-range terms are edge-replicated (boundary='replicate') so every
    score sums exactly L terms, or dropped (boundary='zero').
    """
    n, m = Dw.values.shape
    if not 1 <= L <= min(n, m):
        raise ValidationError(f"Sequence length must be in [1, {min(n, m)}], got {L}", module='seqmatch')
    if boundary not in ('replicate', 'zero'):
        raise ValidationError(f"Unknown boundary mode: {boundary}", module='seqmatch')
    values = _diagonal_sum(Dw.values, np.arange(n), np.arange(m), L, boundary)
    return SequenceScoreMatrix(values=values, seq_len=L, boundary=boundary, source=type(Dw).__name__)


def best_sequence_match(S: SequenceScoreMatrix, j: int) -> SequenceMatch:
    """Smallest-index argmin of column j of the sequence scores."""
    if not 0 <= j < S.m:
        raise ValidationError(f"Query index out of range: {j} (m={S.m})", module='seqmatch', index=j)
    column = S.values[:, j]
    ref = int(np.argmin(column))
    return SequenceMatch(query=j, ref=ref, score=float(column[ref]))


def best_sequence_matches(S: SequenceScoreMatrix) -> List[SequenceMatch]:
    refs = np.argmin(S.values, axis=0)
    scores = S.values[refs, np.arange(S.m)]
    return [SequenceMatch(query=j, ref=int(r), score=float(s)) for j, (r, s) in enumerate(zip(refs, scores))]


class WeightedSequenceMatcher:
    """Batch weighting + sequence scoring with fixed parameters."""

    def __init__(self, w: float = 0.99, seq_len: int = 2, dmin_mode: str = 'global', boundary: str = 'replicate'):
        self.w = _check_weight(w)
        self.seq_len = seq_len
        self.dmin_mode = dmin_mode
        self.boundary = boundary

    def match(self, D: DistanceMatrix, pred: Optional[PredictionVector] = None) -> Tuple[SequenceScoreMatrix, List[SequenceMatch]]:
        bits = pred.values if pred is not None else np.zeros(D.m, dtype=np.int8)
        Dw = weight_matrix(D, bits, self.w, self.dmin_mode)
        S = sequence_scores(Dw, self.seq_len, self.boundary)
        logging.info(
            f"Sequence matching: L={self.seq_len}, w={self.w}, {Dw.weighted_count} weighted queries"
        )
        return S, best_sequence_matches(S)

    def get_matcher_info(self) -> Dict[str, Any]:
        return {'w': self.w, 'seq_len': self.seq_len, 'dmin_mode': self.dmin_mode, 'boundary': self.boundary}


class StreamingSequenceMatcher:
    """
    One-query-at-a-time weighted sequence matching with a running D_min.

    Keeps the last L weighted columns; each push returns the best sequence
    match ending at the new query.
    """

    def __init__(self, w: float = 0.99, seq_len: int = 2, boundary: str = 'replicate'):
        if seq_len < 1:
            raise ValidationError(f"Sequence length must be >= 1, got {seq_len}", module='seqmatch')
        if boundary not in ('replicate', 'zero'):
            raise ValidationError(f"Unknown boundary mode: {boundary}", module='seqmatch')
        self.w = _check_weight(w)
        self.seq_len = seq_len
        self.boundary = boundary
        self._columns: List[np.ndarray] = []
        self._d_min: Optional[float] = None
        self._query = 0

    def reset(self) -> None:
        self._columns.clear()
        self._d_min = None
        self._query = 0

    def push(self, d: Sequence[float], bit: int) -> SequenceMatch:
        d = np.asarray(d, dtype=np.float64)
        if self._columns and d.shape != self._columns[-1].shape:
            raise ValidationError(
                f"Distance column has shape {d.shape}, expected {self._columns[-1].shape}",
                module='seqmatch', index=self._query
            )
        column_min = d.min()
        self._d_min = column_min if self._d_min is None else min(self._d_min, column_min)

        weighted = np.array(d, copy=True)
        if bit and self.w > 0.0:
            row = int(np.argmin(d))
            weighted[row] = _weighted_value(d[row:row + 1], np.array([self._d_min]), self.w)[0]

        # Oldest retained column first; the last one is the current query.
        self._columns = (self._columns + [weighted])[-self.seq_len:]
        window = np.column_stack(self._columns)
        j = self._query
        scores = self._score_with_offset(window, j - (window.shape[1] - 1), j)
        ref = int(np.argmin(scores))
        self._query += 1
        return SequenceMatch(query=j, ref=ref, score=float(scores[ref]))

    def _score_with_offset(self, window: np.ndarray, first: int, j: int) -> np.ndarray:
        n = window.shape[0]
        rows = np.arange(n)
        total = np.zeros((n, 1), dtype=np.float64)
        for k in range(self.seq_len):
            r = rows - k
            c = max(j - k, 0) - first
            term = window[np.maximum(r, 0), c][:, None]
            if self.boundary == 'zero':
                term = np.where(((r >= 0) & (j - k >= 0))[:, None], term, 0.0)
            total += term
        return total[:, 0]
