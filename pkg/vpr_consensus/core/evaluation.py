#!/usr/bin/env python3
"""
Evaluation Module

Ground-truth comparison, precision/recall sweeps, AUC up to a recall bound
and the side-by-side comparison of baseline, gradient, consensus-masked and
weighted-sequence systems.

Counting rules:
    accepted, in tolerance          -> true positive
    accepted, out of tolerance      -> false positive
    abstained, in tolerance         -> false negative
    abstained, out of tolerance     -> not counted
A match rejected by the sweep threshold counts as an abstention.
"""

import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np
from sklearn.metrics import auc

from ..errors import ValidationError
from ..export.matrix_io import read_index_vector
from ..models.config import PipelineConfig
from ..models.matrices import DistanceMatrix
from ..models.results import (
    Confusion, EvalReport, GroundTruth, MatchCandidate, PRCurve, PRPoint, PredictionVector
)
from .matching import best_matches
from .predictor import ConsensusPredictor, gradient_only_matches, mask_matches
from .seqmatch import WeightedSequenceMatcher
from .synth import perfect_predictions

DIRECTIONS = ('min_is_best', 'max_is_best')

# Recall targets reported as operating points besides the loosest threshold.
OPERATING_RECALLS = (0.1, 0.2)


def load_ground_truth(path: Union[str, Path], tolerance: int = 1, n_refs: Optional[int] = None) -> GroundTruth:
    """Read one true reference index per line."""
    values = read_index_vector(path)
    try:
        gt = GroundTruth(gt_ref=values, tolerance=tolerance)
        if n_refs is not None:
            gt.check_refs(n_refs)
    except ValidationError as e:
        e.path = str(path)
        raise
    logging.info(f"Loaded ground truth for {gt.m} queries from {path} (tolerance ±{tolerance})")
    return gt


def _check_queries(matches: Sequence[MatchCandidate], gt: GroundTruth) -> np.ndarray:
    queries = np.array([c.query for c in matches], dtype=np.int64)
    if queries.size:
        outside = np.flatnonzero((queries < 0) | (queries >= gt.m))
        if outside.size:
            raise ValidationError(
                f"Query {int(queries[outside[0]])} has no ground truth (m={gt.m})",
                module='eval', index=int(queries[outside[0]])
            )
    return queries


def _in_tolerance(matches: Sequence[MatchCandidate], gt: GroundTruth) -> np.ndarray:
    queries = _check_queries(matches, gt)
    refs = np.array([c.ref for c in matches], dtype=np.int64)
    if not queries.size:
        return np.zeros(0, dtype=bool)
    return np.abs(refs - gt.gt_ref[queries]) <= gt.tolerance


def _check_unique(matches: Sequence[MatchCandidate], abstentions: Sequence[MatchCandidate]) -> None:
    seen = set()
    for candidate in list(matches) + list(abstentions):
        if candidate.query in seen:
            raise ValidationError("Query counted twice", module='eval', index=candidate.query)
        seen.add(candidate.query)


def confusion(
    matches: Sequence[MatchCandidate],
    abstentions: Sequence[MatchCandidate],
    gt: GroundTruth
) -> Confusion:
    """Count TP/FP/FN for accepted matches and abstained candidates."""
    _check_unique(matches, abstentions)
    accepted_ok = _in_tolerance(matches, gt)
    abstained_ok = _in_tolerance(abstentions, gt)
    tp = int(accepted_ok.sum())
    return Confusion(tp=tp, fp=int(accepted_ok.size - tp), fn=int(abstained_ok.sum()))


def pr_curve(
    scores: Sequence[float],
    matches: Sequence[MatchCandidate],
    gt: GroundTruth,
    direction: str = 'min_is_best',
    abstentions: Sequence[MatchCandidate] = (),
    r_max: float = 0.2
) -> PRCurve:
    """
    Sweep the acceptance threshold over every distinct score.

    Points come out in loosening order, so recall never decreases. Queries
    already abstained by a mask stay rejected at every threshold, which is
    why masked curves can stop short of recall 1.
    """
    scores = np.asarray(scores, dtype=np.float64)
    if scores.size == 0:
        raise ValidationError("Cannot build a PR curve from an empty score list", module='eval')
    if scores.shape != (len(matches),):
        raise ValidationError(
            f"Expected one score per match, got {scores.size} scores for {len(matches)} matches",
            module='eval'
        )
    if not np.all(np.isfinite(scores)):
        raise ValidationError("Scores must be finite", module='eval', index=int(np.flatnonzero(~np.isfinite(scores))[0]))
    if direction not in DIRECTIONS:
        raise ValidationError(f"Unknown sweep direction: {direction}", module='eval')
    _check_unique(matches, abstentions)

    correct = _in_tolerance(matches, gt)
    positives = int(correct.sum()) + int(_in_tolerance(abstentions, gt).sum())

    # Sort keys so that "accept key <= t" covers both directions.
    keys = scores if direction == 'min_is_best' else -scores
    thresholds = np.unique(keys)
    accepted = np.searchsorted(np.sort(keys), thresholds, side='right')
    tp = np.searchsorted(np.sort(keys[correct]), thresholds, side='right')
    fp = accepted - tp

    points = []
    for t, tp_count, fp_count in zip(thresholds, tp, fp):
        counts = Confusion(tp=int(tp_count), fp=int(fp_count), fn=positives - int(tp_count))
        threshold = float(t) if direction == 'min_is_best' else float(-t)
        points.append(PRPoint(
            recall=counts.recall, precision=counts.precision, threshold=threshold,
            tp=counts.tp, fp=counts.fp, fn=counts.fn
        ))

    curve = PRCurve(points=points, r_max=r_max, direction=direction)
    curve.auc_20r = auc_at_recall(curve, r_max)
    logging.debug(f"PR sweep over {len(points)} thresholds, max recall {curve.max_recall:.3f}")
    return curve


def auc_at_recall(curve: PRCurve, r_max: float = 0.2) -> float:
    """
    Trapezoidal precision-over-recall area on [0, min(r_max, max recall)], divided by r_max.

    The curve is extended to recall 0 with its first precision. Curves that
    stop short of r_max keep only the area they reach.
    """
    if r_max <= 0:
        raise ValidationError(f"Recall bound must be > 0, got {r_max}", module='eval')
    if not curve.points:
        raise ValidationError("Cannot integrate an empty PR curve", module='eval')

    recalls = np.concatenate(([0.0], curve.recalls))
    precisions = np.concatenate(([curve.points[0].precision], curve.precisions))
    span = min(r_max, float(recalls.max()))
    if span < r_max:
        logging.warning(f"PR curve reaches recall {span:.3f} only; AUC bound is {r_max}")
    if span <= 0.0:
        return 0.0

    inside = recalls <= span
    x = recalls[inside]
    y = precisions[inside]
    if x[-1] < span:
        k = int(np.flatnonzero(~inside)[0])
        x0, x1 = recalls[k - 1], recalls[k]
        y0, y1 = precisions[k - 1], precisions[k]
        x = np.append(x, span)
        y = np.append(y, y0 + (y1 - y0) * (span - x0) / (x1 - x0))

    area = auc(x, y) / r_max
    return float(np.clip(area, 0.0, 1.0))


def operating_point(curve: PRCurve, recall: float) -> Optional[PRPoint]:
    """First sweep point whose recall reaches the target, if any."""
    for point in curve.points:
        if point.recall >= recall:
            return point
    return None


def average_curves(curves: Sequence[PRCurve], grid: Optional[Sequence[float]] = None) -> PRCurve:
    """
    Average precision across curves on a common recall grid.

    Each curve contributes the best precision it reaches at recall >= the grid
    point, or 0 when it never gets there.
    """
    if not curves:
        raise ValidationError("No curves to average", module='eval')
    grid = np.linspace(0.0, 1.0, 101) if grid is None else np.asarray(grid, dtype=np.float64)

    stacked = np.zeros((len(curves), grid.size), dtype=np.float64)
    for c, curve in enumerate(curves):
        recalls = curve.recalls
        precisions = curve.precisions
        for g, level in enumerate(grid):
            reached = precisions[recalls >= level]
            stacked[c, g] = reached.max() if reached.size else 0.0

    mean = stacked.mean(axis=0)
    points = [PRPoint(recall=float(r), precision=float(p), threshold=0.0, tp=0, fp=0, fn=0) for r, p in zip(grid, mean)]
    r_max = curves[0].r_max
    averaged = PRCurve(points=points, r_max=r_max, direction=curves[0].direction)
    averaged.auc_20r = auc_at_recall(averaged, r_max)
    return averaged


def evaluate_matches(
    scores: Sequence[float],
    matches: Sequence[MatchCandidate],
    gt: GroundTruth,
    direction: str = 'min_is_best',
    abstentions: Sequence[MatchCandidate] = (),
    r_max: float = 0.2,
    name: str = 'matches',
    config: Optional[Dict[str, Any]] = None,
    prediction: Optional[PredictionVector] = None
) -> EvalReport:
    """PR curve, bounded AUC and operating points for one system, with the predictions it used."""
    curve = pr_curve(scores, matches, gt, direction, abstentions, r_max)
    operating = {}
    for target in OPERATING_RECALLS:
        point = operating_point(curve, target)
        if point is not None:
            operating[f"recall@{target:g}"] = point
    operating['loosest'] = curve.points[-1]
    return EvalReport(
        name=name,
        curve=curve,
        operating_points=operating,
        config=dict(config or {}),
        abstentions=len(abstentions),
        prediction=prediction
    )


def _scores(matches: Sequence[MatchCandidate]) -> List[float]:
    return [c.score for c in matches]


def compare_systems(
    D: DistanceMatrix,
    gt: GroundTruth,
    cfg: Optional[PipelineConfig] = None,
    prediction: Optional[PredictionVector] = None
) -> Dict[str, EvalReport]:
    """
    Evaluate every system side by side on one distance matrix.

    prediction overrides the consensus predictor (e.g. degraded predictions);
    the perfect-prediction system always uses ground truth.
    """
    cfg = cfg or PipelineConfig()
    if cfg.w >= 1.0:
        raise ValidationError("Weighting factor 1 leaves no score spread to sweep; use w < 1", module='eval')
    if gt.m != D.m:
        raise ValidationError(f"Ground truth covers {gt.m} queries, distance matrix has {D.m}", module='eval')
    gt.check_refs(D.n)

    echo = {
        'w': cfg.w, 'seq_len': cfg.seq_len, 'metric': D.metric, 'dmin_mode': cfg.dmin_mode,
        'boundary': cfg.boundary, 'tolerance': gt.tolerance, 'auc_recall': cfg.auc_recall
    }
    r_max = cfg.auc_recall

    candidates = best_matches(D)
    G, consensus = ConsensusPredictor(window=cfg.agreement_window).predict(D)
    if prediction is None:
        prediction = consensus
    elif prediction.m != D.m:
        raise ValidationError(f"Prediction covers {prediction.m} queries, distance matrix has {D.m}", module='eval')

    reports = {}
    reports['single_frame'] = evaluate_matches(
        _scores(candidates), candidates, gt, 'min_is_best', r_max=r_max,
        name='single_frame', config=echo
    )
    gradient = gradient_only_matches(G)
    reports['gradient_only'] = evaluate_matches(
        _scores(gradient), gradient, gt, 'max_is_best', r_max=r_max,
        name='gradient_only', config=echo
    )
    masked = mask_matches(candidates, prediction)
    if masked.accepted:
        reports['consensus_masked'] = evaluate_matches(
            _scores(masked.accepted), masked.accepted, gt, 'min_is_best', masked.abstained,
            r_max=r_max, name='consensus_masked', config=echo, prediction=prediction
        )

    systems = [
        ('baseline_sequence', 0.0, None),
        ('weighted_sequence', cfg.w, prediction),
        ('perfect_sequence', cfg.w, perfect_predictions(D, gt))
    ]
    for name, w, pred in systems:
        matcher = WeightedSequenceMatcher(w=w, seq_len=cfg.seq_len, dmin_mode=cfg.dmin_mode, boundary=cfg.boundary)
        _, matches = matcher.match(D, pred)
        reports[name] = evaluate_matches(
            _scores(matches), matches, gt, 'min_is_best', r_max=r_max,
            name=name, config=dict(echo, w=w), prediction=pred
        )

    summary = ", ".join(f"{name}={report.auc_20r:.3f}" for name, report in reports.items())
    logging.info(f"AUC@{r_max:g}R: {summary}")
    return reports
