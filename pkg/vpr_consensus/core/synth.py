#!/usr/bin/env python3
"""
Synthetic Traverse Module

Generates reference/query descriptor traverses with known ground truth and
synthesizes predictors of controllable quality. All randomness comes from
numpy's PCG64 generator seeded from the config, drawn in a fixed order:
reference walk, drift offsets, query noise, aliasing.
"""

import logging
from pathlib import Path
from typing import Sequence, Tuple, Union

import numpy as np

from ..errors import ValidationError
from ..export.matrix_io import write_index_vector
from ..models.config import PredictorQualityConfig, SynthConfig
from ..models.frames import DescriptorSet
from ..models.matrices import DistanceMatrix
from ..models.results import GroundTruth, PredictionVector
from .descriptors import save_descriptors


def _true_references(cfg: SynthConfig, rng: np.random.Generator) -> np.ndarray:
    m = cfg.query_count
    n = cfg.n_refs
    if m == n:
        base = np.arange(m, dtype=np.int64)
    elif m == 1:
        base = np.zeros(1, dtype=np.int64)
    else:
        base = np.round(np.arange(m) * (n - 1) / (m - 1)).astype(np.int64)

    if cfg.drift == 0:
        return base
    # Bounded random walk of the offset between query and reference frames.
    steps = rng.choice(np.array([-1, 0, 1]), size=m)
    offsets = np.zeros(m, dtype=np.int64)
    for j in range(1, m):
        offsets[j] = np.clip(offsets[j - 1] + steps[j], -cfg.drift, cfg.drift)
    return np.clip(base + offsets, 0, n - 1)


def _alias(queries: np.ndarray, refs: np.ndarray, gt_ref: np.ndarray, cfg: SynthConfig, rng: np.random.Generator) -> np.ndarray:
    """
    Pull a fixed share of queries toward a distant reference.

    The distant reference gets its own noise draw, so an aliased query sits
    about as far from its wrong match as a clean query does from its true one.
    """
    m = queries.shape[0]
    count = int(round(cfg.alias_rate * m))
    if count == 0:
        return np.zeros(0, dtype=np.int64)
    chosen = np.sort(rng.choice(m, size=count, replace=False))
    frames = np.arange(refs.shape[0])
    beta = cfg.alias_strength
    for j in chosen:
        far = frames[np.abs(frames - gt_ref[j]) >= cfg.min_alias_offset]
        target = far[rng.integers(far.size)]
        lookalike = refs[target] + rng.normal(0.0, cfg.noise_sigma, size=refs.shape[1])
        queries[j] = (1.0 - beta) * queries[j] + beta * lookalike
    return chosen


def generate_traverse(cfg: SynthConfig, tolerance: int = 1) -> Tuple[DescriptorSet, DescriptorSet, GroundTruth]:
    """
    Random-walk reference descriptors and noisy queries with known ground truth.

    Query j is reference gt_ref[j] plus N(0, noise_sigma^2) per dimension;
    round(alias_rate * m) of them are blended toward a reference at least
    min_alias_offset frames away so their nearest descriptor is wrong.
    """
    errors = cfg.validate()
    if errors:
        raise ValidationError("; ".join(errors), module='synth')

    rng = np.random.default_rng(cfg.seed)
    start = rng.standard_normal(cfg.descriptor_dim)
    steps = rng.normal(0.0, cfg.step_size, size=(cfg.n_refs - 1, cfg.descriptor_dim))
    refs = np.vstack([start, start + np.cumsum(steps, axis=0)])

    gt_ref = _true_references(cfg, rng)
    noise = rng.normal(0.0, cfg.noise_sigma, size=(gt_ref.size, cfg.descriptor_dim))
    queries = refs[gt_ref] + noise
    aliased = _alias(queries, refs, gt_ref, cfg, rng)

    logging.info(
        f"Generated traverse: {cfg.n_refs} refs, {gt_ref.size} queries, dim {cfg.descriptor_dim}, "
        f"sigma {cfg.noise_sigma}, {aliased.size} aliased, seed {cfg.seed}"
    )
    return (
        DescriptorSet(matrix=refs, kind='external'),
        DescriptorSet(matrix=queries, kind='external'),
        GroundTruth(gt_ref=gt_ref, tolerance=tolerance)
    )


def perfect_predictions(D: DistanceMatrix, gt: GroundTruth) -> PredictionVector:
    """y = 1 exactly where the single-frame candidate is in tolerance."""
    if gt.m != D.m:
        raise ValidationError(f"Ground truth covers {gt.m} queries, distance matrix has {D.m}", module='synth')
    i_d0 = np.argmin(D.values, axis=0)
    values = gt.correctness(i_d0).astype(np.int8)
    return PredictionVector(values=values, i_d0=i_d0, source='perfect')


def degrade_predictions(
    pred: PredictionVector,
    correct: Union[Sequence[bool], np.ndarray],
    cfg: PredictorQualityConfig
) -> PredictionVector:
    """
    Flip prediction bits to synthesize a predictor of given quality.

    Queries whose candidate is truly in tolerance flip with probability
    flip_good_to_bad, the others with flip_bad_to_good.
    """
    correct = np.asarray(correct, dtype=bool)
    if correct.shape != (pred.m,):
        raise ValidationError(
            f"Length mismatch: {pred.m} predictions vs {correct.size} correctness flags",
            module='synth'
        )
    errors = cfg.validate()
    if errors:
        raise ValidationError("; ".join(errors), module='synth')

    rng = np.random.default_rng(cfg.seed)
    probability = np.where(correct, cfg.flip_good_to_bad, cfg.flip_bad_to_good)
    flips = rng.random(pred.m) < probability
    values = np.where(flips, 1 - pred.values, pred.values).astype(np.int8)
    logging.debug(f"Flipped {int(flips.sum())}/{pred.m} prediction bits")
    return PredictionVector(values=values, i_d0=pred.i_d0, source='degraded')


def write_traverse(
    refs: DescriptorSet,
    queries: DescriptorSet,
    gt: GroundTruth,
    output_dir: Union[str, Path],
    fmt: str = 'csv'
) -> Tuple[Path, Path, Path]:
    """Write refs/queries descriptors and the ground-truth CSV into a directory."""
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    suffix = '.csv' if fmt == 'csv' else '.vprd'
    refs_path = save_descriptors(refs, output_dir / f"refs{suffix}", fmt)
    queries_path = save_descriptors(queries, output_dir / f"queries{suffix}", fmt)
    gt_path = write_index_vector(gt.gt_ref, output_dir / "gt.csv")
    logging.info(f"Wrote synthetic traverse to {output_dir}")
    return refs_path, queries_path, gt_path
