#!/usr/bin/env python3
"""
Matching Module

Distance matrix construction and baseline single-frame match candidates.
"""

import logging
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np
from scipy.spatial.distance import cdist

from ..errors import ValidationError
from ..export.matrix_io import read_matrix, write_matrix
from ..models.frames import DescriptorSet
from ..models.matrices import DistanceMatrix
from ..models.results import MatchCandidate


def _cosine_distances(refs: np.ndarray, queries: np.ndarray) -> Tuple[np.ndarray, int]:
    ref_norms = np.linalg.norm(refs, axis=1)
    query_norms = np.linalg.norm(queries, axis=1)
    zero_refs = ref_norms == 0.0
    zero_queries = query_norms == 0.0

    denom = np.outer(np.where(zero_refs, 1.0, ref_norms), np.where(zero_queries, 1.0, query_norms))
    similarity = (refs @ queries.T) / denom
    distances = np.clip(1.0 - similarity, 0.0, 2.0)

    # Zero vectors are treated as orthogonal to everything.
    undefined = zero_refs[:, None] | zero_queries[None, :]
    zero_pairs = int(np.count_nonzero(undefined))
    if zero_pairs:
        distances[undefined] = 1.0
        logging.warning(
            f"Cosine distance undefined for {zero_pairs} pairs with zero-norm descriptors "
            f"({int(zero_refs.sum())} refs, {int(zero_queries.sum())} queries); using distance 1"
        )
    return distances, zero_pairs


def distance_matrix(refs: DescriptorSet, queries: DescriptorSet, metric: str = 'euclidean') -> DistanceMatrix:
    """D[i][j] = distance between reference i and query j."""
    if refs.count < 2:
        raise ValidationError(f"Need at least 2 references, got {refs.count}", module='matching')
    if queries.count < 1:
        raise ValidationError("Query set is empty", module='matching')
    if refs.dim != queries.dim:
        raise ValidationError(
            f"Descriptor dimension mismatch: refs {refs.dim}, queries {queries.dim}",
            module='matching'
        )

    zero_pairs = 0
    if metric == 'euclidean':
        values = cdist(refs.matrix, queries.matrix, 'euclidean')
    elif metric == 'cosine':
        values, zero_pairs = _cosine_distances(refs.matrix, queries.matrix)
    else:
        raise ValidationError(f"Unsupported metric for descriptors: {metric}", module='matching')

    logging.debug(f"Built {metric} distance matrix {values.shape[0]}x{values.shape[1]}")
    return DistanceMatrix(values=values, metric=metric, zero_norm_pairs=zero_pairs)


def best_match(D: DistanceMatrix, j: int) -> MatchCandidate:
    """Smallest-index reference attaining the minimum of column j."""
    column = D.column(j)
    ref = int(np.argmin(column))
    return MatchCandidate(query=j, ref=ref, score=float(column[ref]))


def best_matches(D: DistanceMatrix) -> List[MatchCandidate]:
    """best_match for every query."""
    refs = np.argmin(D.values, axis=0)
    scores = D.values[refs, np.arange(D.m)]
    return [MatchCandidate(query=j, ref=int(r), score=float(s)) for j, (r, s) in enumerate(zip(refs, scores))]


def load_distance_matrix(path: Union[str, Path], fmt: Optional[str] = None) -> DistanceMatrix:
    """Inject a matrix computed by an external VPR technique (rows = references)."""
    values = read_matrix(path, fmt)
    if values.shape[0] < 2:
        raise ValidationError(f"Distance matrix needs at least 2 references, got {values.shape[0]}", module='matching', path=path)
    logging.info(f"Loaded {values.shape[0]}x{values.shape[1]} distance matrix from {path}")
    return DistanceMatrix(values=values, metric='precomputed')


def save_distance_matrix(D: DistanceMatrix, path: Union[str, Path], fmt: Optional[str] = None) -> Path:
    return write_matrix(D.values, path, fmt)
