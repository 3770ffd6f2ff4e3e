"""Shared fixtures for the VPR Consensus test suite."""

import numpy as np
import pytest

from vpr_consensus.core.matching import distance_matrix
from vpr_consensus.core.synth import generate_traverse
from vpr_consensus.models.config import SynthConfig
from vpr_consensus.models.frames import DescriptorSet


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: timing-sensitive runs over large reference databases")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def distinct_refs():
    """60 pairwise-distinct high-dimensional descriptors."""
    return DescriptorSet(np.random.default_rng(5).standard_normal((60, 1024)))


@pytest.fixture
def self_similarity(distinct_refs):
    return distance_matrix(distinct_refs, distinct_refs, 'euclidean')


@pytest.fixture
def traverse():
    """Moderately aliased synthetic traverse and its euclidean distance matrix."""
    cfg = SynthConfig(n_refs=150, noise_sigma=0.2, alias_rate=0.2, seed=3)
    refs, queries, gt = generate_traverse(cfg)
    return distance_matrix(refs, queries, 'euclidean'), gt
