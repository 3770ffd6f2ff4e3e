#!/usr/bin/env python3
"""
Predictor Module

Unsupervised localization-quality prediction. For each query the distance
argmin and the argmax of a smoothed modified-average gradient are compared;
agreement within one frame predicts an in-tolerance match.

The smoothing kernel is causal in the query direction: output column j
reads raw columns j-2, j-1 and j only, so processing queries one at a time
gives bitwise the same result as processing the whole matrix.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Any, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..errors import ValidationError
from ..models.matrices import DistanceMatrix, GradientMatrix
from ..models.results import MatchCandidate, MaskedMatches, PredictionVector

BOX_KERNEL = np.full((3, 3), 1.0 / 9.0)


def gradient_vector(d: Sequence[float]) -> np.ndarray:
    """
    Modified average gradient of one distance column.

    g[i] = (d[i+1] + d[i-1]) / 2 - d[i] inside, d[1] - d[0] at the first
    reference and d[n-2] - d[n-1] at the last. Peaks where d has a notch.
    """
    d = np.asarray(d, dtype=np.float64)
    if d.ndim != 1 or d.shape[0] < 2:
        raise ValidationError(f"Gradient needs a distance vector of length >= 2, got shape {d.shape}", module='predictor')
    g = np.empty_like(d)
    g[0] = d[1] - d[0]
    g[-1] = d[-2] - d[-1]
    g[1:-1] = 0.5 * (d[2:] + d[:-2]) - d[1:-1]
    return g


def raw_gradients(values: np.ndarray) -> np.ndarray:
    """gradient_vector applied to every column of an n x m matrix."""
    d = np.asarray(values, dtype=np.float64)
    if d.ndim != 2 or d.shape[0] < 2:
        raise ValidationError(f"Gradient needs an n x m matrix with n >= 2, got shape {d.shape}", module='predictor')
    g = np.empty_like(d)
    g[0] = d[1] - d[0]
    g[-1] = d[-2] - d[-1]
    g[1:-1] = 0.5 * (d[2:] + d[:-2]) - d[1:-1]
    return g


def _check_kernel(kernel: Optional[np.ndarray]) -> np.ndarray:
    kernel = BOX_KERNEL if kernel is None else np.asarray(kernel, dtype=np.float64)
    if kernel.shape != (3, 3) or not np.all(np.isfinite(kernel)):
        raise ValidationError(f"Smoothing kernel must be a finite 3x3 array, got shape {kernel.shape}", module='predictor')
    return kernel


def _column_mean(column: np.ndarray) -> float:
    return float(np.mean(np.ascontiguousarray(column, dtype=np.float64)))


def _leading_window(first: np.ndarray, second: Optional[np.ndarray]) -> np.ndarray:
    """Window for query 0 (second is None) or query 1, past columns mean-padded."""
    if second is None:
        fill = np.full_like(first, _column_mean(first))
        return np.column_stack([fill, fill, first])
    fill = np.full_like(second, _column_mean(second))
    return np.column_stack([fill, first, second])


def _smooth_window(window: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """
    Apply the kernel to an n x (k+2) window, giving n x k outputs.

    kernel[a, b] weighs row offset a-1 and query column offset b-2; rows are
    edge-replicated at both route ends.
    """
    n, width = window.shape
    k = width - 2
    padded = np.pad(window, ((1, 1), (0, 0)), mode='edge')
    out = np.zeros((n, k), dtype=np.float64)
    for b in range(3):
        for a in range(3):
            out += kernel[a, b] * padded[a:a + n, b:b + k]
    return out


def smooth_gradient(raw: np.ndarray, kernel: Optional[np.ndarray] = None) -> np.ndarray:
    """Causal 3x3 smoothing of a raw gradient matrix (see module docstring)."""
    raw = np.asarray(raw, dtype=np.float64)
    if raw.ndim != 2 or raw.size == 0:
        raise ValidationError(f"Raw gradient must be a non-empty 2-D matrix, got shape {raw.shape}", module='predictor')
    if not np.all(np.isfinite(raw)):
        raise ValidationError("Raw gradient contains non-finite values", module='predictor')
    kernel = _check_kernel(kernel)

    m = raw.shape[1]
    smoothed = np.empty_like(raw)
    smoothed[:, 0] = _smooth_window(_leading_window(raw[:, 0], None), kernel)[:, 0]
    if m > 1:
        smoothed[:, 1] = _smooth_window(_leading_window(raw[:, 0], raw[:, 1]), kernel)[:, 0]
    if m > 2:
        smoothed[:, 2:] = _smooth_window(raw, kernel)
    return smoothed


def gradient_matrix(D: DistanceMatrix, kernel: Optional[np.ndarray] = None) -> GradientMatrix:
    """Raw and smoothed gradient matrices for a distance matrix."""
    kernel = _check_kernel(kernel)
    raw = raw_gradients(D.values)
    return GradientMatrix(values=smooth_gradient(raw, kernel), raw=raw, kernel=kernel)


def consensus_predict(D: DistanceMatrix, G: GradientMatrix, window: int = 1) -> PredictionVector:
    """y_pred[j] = 1 when |argmax(G[:, j]) - argmin(D[:, j])| <= window."""
    if D.values.shape != G.values.shape:
        raise ValidationError(f"Shape mismatch: D {D.values.shape} vs G {G.values.shape}", module='predictor')
    i_d0 = np.argmin(D.values, axis=0)
    i_g0 = np.argmax(G.values, axis=0)
    values = (np.abs(i_g0 - i_d0) <= window).astype(np.int8)
    return PredictionVector(values=values, i_d0=i_d0, i_g0=i_g0, window=window, source='consensus')


def gradient_only_match(G: GradientMatrix, j: int) -> MatchCandidate:
    """Match from the maximum smoothed gradient alone."""
    if not 0 <= j < G.m:
        raise ValidationError(f"Query index out of range: {j} (m={G.m})", module='predictor', index=j)
    column = G.values[:, j]
    ref = int(np.argmax(column))
    return MatchCandidate(query=j, ref=ref, score=float(column[ref]))


def gradient_only_matches(G: GradientMatrix) -> List[MatchCandidate]:
    refs = np.argmax(G.values, axis=0)
    scores = G.values[refs, np.arange(G.m)]
    return [MatchCandidate(query=j, ref=int(r), score=float(s)) for j, (r, s) in enumerate(zip(refs, scores))]


def mask_matches(
    candidates: Sequence[MatchCandidate],
    y_pred: Union[PredictionVector, Sequence[int], np.ndarray]
) -> MaskedMatches:
    """Keep candidates predicted good; the rest become abstentions."""
    bits = y_pred.values if isinstance(y_pred, PredictionVector) else np.asarray(y_pred)
    if len(candidates) != len(bits):
        raise ValidationError(
            f"Length mismatch: {len(candidates)} candidates vs {len(bits)} predictions",
            module='predictor'
        )
    masked = MaskedMatches()
    for candidate, bit in zip(candidates, bits):
        (masked.accepted if bit else masked.abstained).append(candidate)
    if not masked.accepted:
        logging.warning(f"Prediction mask rejected all {len(candidates)} candidates")
    return masked


class ConsensusPredictor:
    """Batch consensus prediction over a full distance matrix."""

    def __init__(self, kernel: Optional[np.ndarray] = None, window: int = 1):
        if window < 0:
            raise ValidationError(f"Agreement window must be >= 0, got {window}", module='predictor')
        self.kernel = _check_kernel(kernel)
        self.window = window

    def predict(self, D: DistanceMatrix) -> Tuple[GradientMatrix, PredictionVector]:
        G = gradient_matrix(D, self.kernel)
        prediction = consensus_predict(D, G, self.window)
        logging.info(f"Consensus predicted {prediction.accepted_count}/{prediction.m} queries in tolerance")
        return G, prediction

    def get_predictor_info(self) -> Dict[str, Any]:
        return {'kernel': self.kernel.tolist(), 'window': self.window}


@dataclass(frozen=True)
class StreamingPrediction:
    """Prediction for a single query as it arrives."""
    query: int
    bit: int
    i_d0: int
    i_g0: int
    gradient: np.ndarray


class StreamingPredictor:
    """
    One-query-at-a-time consensus prediction.

    Only the two previous raw gradient columns are kept, so per-query cost
    is linear in the number of references.
    """

    def __init__(self, kernel: Optional[np.ndarray] = None, window: int = 1):
        if window < 0:
            raise ValidationError(f"Agreement window must be >= 0, got {window}", module='predictor')
        self.kernel = _check_kernel(kernel)
        self.window = window
        self._history: List[np.ndarray] = []
        self._bits: List[int] = []
        self._i_d0: List[int] = []
        self._i_g0: List[int] = []
        self._n: Optional[int] = None

    def reset(self) -> None:
        self._history.clear()
        self._bits.clear()
        self._i_d0.clear()
        self._i_g0.clear()
        self._n = None

    def push(self, d: Sequence[float]) -> StreamingPrediction:
        d = np.asarray(d, dtype=np.float64)
        if self._n is None:
            self._n = d.shape[0]
        elif d.shape != (self._n,):
            raise ValidationError(
                f"Distance column has shape {d.shape}, expected ({self._n},)",
                module='predictor', index=len(self._bits)
            )
        raw = gradient_vector(d)

        if len(self._history) == 0:
            window = _leading_window(raw, None)
        elif len(self._history) == 1:
            window = _leading_window(self._history[0], raw)
        else:
            window = np.column_stack([self._history[0], self._history[1], raw])
        smoothed = _smooth_window(window, self.kernel)[:, 0]

        self._history = (self._history + [raw])[-2:]
        i_d0 = int(np.argmin(d))
        i_g0 = int(np.argmax(smoothed))
        bit = int(abs(i_g0 - i_d0) <= self.window)
        query = len(self._bits)
        self._bits.append(bit)
        self._i_d0.append(i_d0)
        self._i_g0.append(i_g0)
        return StreamingPrediction(query=query, bit=bit, i_d0=i_d0, i_g0=i_g0, gradient=smoothed)

    def predictions(self) -> PredictionVector:
        """All predictions pushed so far."""
        return PredictionVector(
            values=np.array(self._bits, dtype=np.int8),
            i_d0=np.array(self._i_d0, dtype=np.int64),
            i_g0=np.array(self._i_g0, dtype=np.int64),
            window=self.window,
            source='consensus'
        )
