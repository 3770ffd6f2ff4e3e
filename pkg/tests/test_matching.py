"""Tests for distance matrices and single-frame matching."""

import math

import numpy as np
import pytest

from vpr_consensus.core.matching import (
    best_match, best_matches, distance_matrix, load_distance_matrix, save_distance_matrix
)
from vpr_consensus.errors import ValidationError
from vpr_consensus.models.frames import DescriptorSet
from vpr_consensus.models.matrices import DistanceMatrix


def test_hand_computed_column():
    refs = DescriptorSet(np.array([[1.0, 0.0], [0.0, 1.0]]))
    queries = DescriptorSet(np.array([[1.0, 0.0]]))
    D = distance_matrix(refs, queries, 'euclidean')
    assert D.values.shape == (2, 1)
    assert D.values[0, 0] == 0.0
    assert abs(D.values[1, 0] - math.sqrt(2.0)) < 1e-12


def test_self_similarity_diagonal_is_zero(self_similarity):
    assert np.all(np.diag(self_similarity.values) == 0.0)


def test_cosine_self_distance(rng):
    refs = DescriptorSet(rng.standard_normal((8, 16)))
    D = distance_matrix(refs, refs, 'cosine')
    assert np.all(np.abs(np.diag(D.values)) < 1e-12)
    assert np.all((D.values >= 0.0) & (D.values <= 2.0))


def test_distances_are_symmetric_under_swap(rng):
    a = DescriptorSet(rng.standard_normal((6, 5)))
    b = DescriptorSet(rng.standard_normal((4, 5)))
    for metric in ('euclidean', 'cosine'):
        forward = distance_matrix(a, b, metric).values
        backward = distance_matrix(b, a, metric).values
        assert np.allclose(forward, backward.T, rtol=0.0, atol=1e-12)


def test_cosine_ignores_scale(rng):
    refs = rng.standard_normal((5, 7))
    queries = rng.standard_normal((3, 7))
    base = distance_matrix(DescriptorSet(refs), DescriptorSet(queries), 'cosine').values
    scaled = distance_matrix(DescriptorSet(refs * 3.5), DescriptorSet(queries * 0.2), 'cosine').values
    assert np.allclose(base, scaled, rtol=0.0, atol=1e-12)


def test_cosine_zero_vectors_count_as_orthogonal():
    refs = DescriptorSet(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]))
    queries = DescriptorSet(np.array([[1.0, 0.0], [0.0, 0.0]]))
    D = distance_matrix(refs, queries, 'cosine')
    assert D.zero_norm_pairs == 4
    assert D.values[0, 0] == 1.0
    assert np.all(D.values[:, 1] == 1.0)
    assert abs(D.values[1, 0]) < 1e-12


def test_dimension_mismatch_is_rejected():
    with pytest.raises(ValidationError):
        distance_matrix(DescriptorSet(np.ones((3, 2))), DescriptorSet(np.ones((2, 3))))


def test_single_reference_is_rejected():
    with pytest.raises(ValidationError):
        distance_matrix(DescriptorSet(np.ones((1, 2))), DescriptorSet(np.ones((2, 2))))


def test_unknown_metric_is_rejected():
    refs = DescriptorSet(np.eye(3))
    with pytest.raises(ValidationError):
        distance_matrix(refs, refs, 'manhattan')


def test_best_match_takes_column_minimum():
    D = DistanceMatrix(np.array([[0.3], [0.1], [0.5]]))
    match = best_match(D, 0)
    assert (match.query, match.ref, match.score) == (0, 1, 0.1)


def test_best_match_ties_go_to_smallest_index():
    D = DistanceMatrix(np.full((4, 2), 0.7))
    assert best_match(D, 1).ref == 0


def test_best_match_rejects_out_of_range_query():
    D = DistanceMatrix(np.ones((3, 2)))
    with pytest.raises(ValidationError):
        best_match(D, 2)


def test_self_similarity_matches_itself(self_similarity):
    for candidate in best_matches(self_similarity):
        assert candidate.ref == candidate.query
        assert candidate.score == 0.0


def test_best_matches_agree_with_linear_scan(rng):
    D = DistanceMatrix(rng.random((9, 12)))
    for candidate in best_matches(D):
        column = list(D.values[:, candidate.query])
        best = 0
        for i, value in enumerate(column):
            if value < column[best]:
                best = i
        assert candidate.ref == best
        assert candidate.score == column[best]


def test_negative_distances_are_rejected():
    with pytest.raises(ValidationError) as info:
        DistanceMatrix(np.array([[0.1, 0.2], [-0.3, 0.4]]))
    assert (info.value.row, info.value.column) == (1, 0)


def test_precomputed_matrix_round_trip(tmp_path, rng):
    D = DistanceMatrix(rng.random((5, 4)), metric='precomputed')
    for name in ("d.csv", "d.vprd"):
        path = save_distance_matrix(D, tmp_path / name)
        loaded = load_distance_matrix(path)
        assert loaded.metric == 'precomputed'
        assert np.array_equal(loaded.values, D.values)
