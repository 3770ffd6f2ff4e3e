#!/usr/bin/env python3
"""
VPR Consensus - Main Application Entry Point

Unsupervised localization-quality prediction for visual place recognition
and prediction-weighted sequence matching, from images, descriptors or a
precomputed distance matrix through to PR curves and AUC.
"""

import sys
import argparse
import dataclasses
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import coloredlogs
import numpy as np

from . import __version__
from .errors import DecodeError, ValidationError, VPRError
from .core.descriptors import extract_directory, load_descriptors, save_descriptors
from .core.matching import best_matches, distance_matrix, load_distance_matrix, save_distance_matrix
from .core.predictor import ConsensusPredictor
from .core.seqmatch import WeightedSequenceMatcher
from .core.evaluation import compare_systems, evaluate_matches, load_ground_truth
from .core.synth import degrade_predictions, generate_traverse, perfect_predictions, write_traverse
from .core.bench import Benchmarker
from .export.matrix_io import read_matches, write_matches, write_matrix
from .export.report_exporter import ReportExporter, read_predictions
from .models.config import BenchConfig, PipelineConfig, SadConfig, SynthConfig
from .models.matrices import DistanceMatrix
from .models.results import EvalReport, GroundTruth, MatchCandidate, PredictionVector

LOG_FORMAT = '%(asctime)s [%(levelname)s] %(message)s'
DATE_FORMAT = '%Y-%m-%d %H:%M:%S'


def setup_logging(level: str = "INFO") -> None:
    """Setup logging configuration"""
    numeric_level = getattr(logging, level.upper(), None)
    if not isinstance(numeric_level, int):
        raise ValueError(f'Invalid log level: {level}')

    coloredlogs.install(level=numeric_level, fmt=LOG_FORMAT, datefmt=DATE_FORMAT)


def load_inputs(cfg: PipelineConfig) -> Tuple[DistanceMatrix, GroundTruth]:
    """Build the distance matrix and ground truth for any input mode."""
    metric = cfg.resolved_metric()
    if cfg.input_mode == 'synth':
        synth = dataclasses.replace(cfg.synth, seed=cfg.seed)
        refs, queries, gt = generate_traverse(synth, tolerance=cfg.tolerance)
        return distance_matrix(refs, queries, metric), gt

    if cfg.input_mode == 'distance-matrix':
        D = load_distance_matrix(cfg.distance_matrix)
    else:
        if cfg.input_mode == 'images':
            refs = extract_directory(cfg.refs, cfg.sad, cfg.max_workers)
            queries = extract_directory(cfg.queries, cfg.sad, cfg.max_workers)
        else:
            refs = load_descriptors(cfg.refs)
            queries = load_descriptors(cfg.queries)
        D = distance_matrix(refs, queries, metric)

    gt = load_ground_truth(cfg.gt, cfg.tolerance, n_refs=D.n)
    if gt.m != D.m:
        raise ValidationError(
            f"Ground truth has {gt.m} entries for {D.m} queries", module='eval', path=cfg.gt
        )
    return D, gt


def select_predictions(cfg: PipelineConfig, D: DistanceMatrix, gt: GroundTruth) -> Optional[PredictionVector]:
    """Consensus, perfect or no predictions, optionally degraded."""
    if cfg.predictions == 'none':
        return None
    if cfg.predictions == 'perfect':
        prediction = perfect_predictions(D, gt)
    else:
        _, prediction = ConsensusPredictor(window=cfg.agreement_window).predict(D)
    if cfg.quality is not None:
        correct = gt.correctness(np.argmin(D.values, axis=0))
        prediction = degrade_predictions(prediction, correct, cfg.quality)
    return prediction


def run_pipeline(cfg: PipelineConfig) -> EvalReport:
    """Distance matrix -> prediction -> weighted sequence -> PR curve and AUC."""
    cfg.ensure_valid()
    logging.info(f"🚀 Running pipeline ({cfg.input_mode}, w={cfg.w}, L={cfg.seq_len}, {cfg.dmin_mode} D_min)")

    D, gt = load_inputs(cfg)
    logging.info(f"🧮 Distance matrix {D.n}x{D.m} ({D.metric})")

    prediction = select_predictions(cfg, D, gt)
    w = cfg.w if prediction is not None else 0.0
    matcher = WeightedSequenceMatcher(w=w, seq_len=cfg.seq_len, dmin_mode=cfg.dmin_mode, boundary=cfg.boundary)
    S, matches = matcher.match(D, prediction)

    echo = {
        'input_mode': cfg.input_mode, 'w': w, 'seq_len': cfg.seq_len, 'metric': D.metric,
        'dmin_mode': cfg.dmin_mode, 'boundary': cfg.boundary, 'tolerance': cfg.tolerance,
        'predictions': cfg.predictions,
        'distance_matrix': D.to_dict(),
        'sequence_scores': S.to_dict(),
        'matcher': matcher.get_matcher_info()
    }
    if cfg.predictions == 'consensus':
        echo['predictor'] = ConsensusPredictor(window=cfg.agreement_window).get_predictor_info()
    report = evaluate_matches(
        [m.score for m in matches], matches, gt, 'min_is_best',
        r_max=cfg.auc_recall, name='weighted_sequence', config=echo, prediction=prediction
    )
    logging.info(f"📈 AUC@{cfg.auc_recall:g}R = {report.auc_20r:.4f}")

    if cfg.output_dir:
        output_dir = Path(cfg.output_dir)
        exporter = ReportExporter()
        exporter.export_report(report, output_dir / "report.json")
        exporter.export_curve_csv(report.curve, output_dir / "curve.csv")
        write_matches(matches, output_dir / "matches.csv")
        if prediction is not None:
            exporter.export_predictions(prediction, output_dir / "predictions.csv")
            write_matches(best_matches(D), output_dir / "masked_matches.csv", accepted=prediction.values)
        cfg.to_json(str(output_dir / "config.json"))
        logging.info(f"✅ Results saved to: {output_dir}")
    return report


def run_comparison(cfg: PipelineConfig) -> Dict[str, EvalReport]:
    """Every system side by side; exported to <output_dir>/comparison when set."""
    cfg.ensure_valid()
    D, gt = load_inputs(cfg)
    prediction = select_predictions(cfg, D, gt)
    reports = compare_systems(D, gt, cfg, prediction)
    if cfg.output_dir:
        ReportExporter().export_comparison(reports, Path(cfg.output_dir) / "comparison")
    return reports


def _cmd_distmat(args) -> int:
    metric = args.metric
    if Path(args.refs).is_dir():
        sad = SadConfig(width=args.sad_width, height=args.sad_height, patch_width=args.patch, patch_height=args.patch)
        refs = extract_directory(args.refs, sad, args.workers)
        queries = extract_directory(args.queries, sad, args.workers)
        metric = metric or 'euclidean'
        if args.save_descriptors:
            out = Path(args.save_descriptors)
            save_descriptors(refs, out / "refs.csv")
            save_descriptors(queries, out / "queries.csv")
    else:
        refs = load_descriptors(args.refs)
        queries = load_descriptors(args.queries)
        metric = metric or 'cosine'
    D = distance_matrix(refs, queries, metric)
    save_distance_matrix(D, args.out, args.fmt)
    logging.info(f"✅ Distance matrix {D.n}x{D.m} ({metric}) saved to: {args.out}")
    return 0


def _cmd_predict(args) -> int:
    D = load_distance_matrix(args.dm, args.fmt)
    _, prediction = ConsensusPredictor(window=args.window).predict(D)
    ReportExporter().export_predictions(prediction, args.out)
    if args.matches_out:
        write_matches(best_matches(D), args.matches_out, accepted=prediction.values)
        logging.info(f"✅ Masked single-frame matches saved to: {args.matches_out}")
    return 0


def _cmd_seqmatch(args) -> int:
    D = load_distance_matrix(args.dm, args.fmt)
    prediction = read_predictions(args.pred, D) if args.pred else None
    w = args.w if prediction is not None else 0.0
    matcher = WeightedSequenceMatcher(w=w, seq_len=args.L, dmin_mode=args.dmin_mode, boundary=args.boundary)
    S, matches = matcher.match(D, prediction)
    write_matches(matches, args.out)
    if args.scores_out:
        write_matrix(S.values, args.scores_out, args.scores_fmt)
        logging.info(f"✅ Sequence scores {S.n}x{S.m} saved to: {args.scores_out}")
    logging.info(f"✅ {len(matches)} sequence matches saved to: {args.out}")
    return 0


def _cmd_eval(args) -> int:
    gt = load_ground_truth(args.gt, args.tolerance)
    rows = read_matches(args.matches)
    accepted = [MatchCandidate.from_dict(r) for r in rows if r['accepted']]
    abstained = [MatchCandidate.from_dict(r) for r in rows if not r['accepted']]
    report = evaluate_matches(
        [m.score for m in accepted], accepted, gt, args.direction, abstained,
        r_max=args.auc_recall, name=Path(args.matches).stem,
        config={'tolerance': args.tolerance, 'direction': args.direction}
    )
    exporter = ReportExporter()
    exporter.export_report(report, args.out)
    if args.curve:
        exporter.export_curve_csv(report.curve, args.curve)
    print(f"AUC@{args.auc_recall:g}R: {report.auc_20r:.6f}")
    return 0


def _cmd_synth(args) -> int:
    cfg = SynthConfig(
        n_refs=args.n, descriptor_dim=args.dim, noise_sigma=args.sigma, alias_rate=args.alias,
        drift=args.drift, seed=args.seed, n_queries=args.n_queries
    )
    refs, queries, gt = generate_traverse(cfg)
    write_traverse(refs, queries, gt, args.out, args.fmt)
    return 0


def _cmd_bench(args) -> int:
    cfg = BenchConfig(
        n_refs=args.n_refs, reps=args.reps, queries=args.queries, seq_len=args.L,
        w=args.w, seed=args.seed, max_workers=args.workers
    )
    report = Benchmarker(cfg).run()
    ReportExporter().export_bench(report, args.out, args.csv)
    for entry in report.entries:
        print(
            f"n={entry.n_refs:6d}  prediction {entry.prediction.mean_ms:8.4f} ms  "
            f"sequence {entry.sequence.mean_ms:8.4f} ms  combined {entry.combined_mean_ms:8.4f} ms"
        )
    print(f"linear fit: {report.slope_ms_per_ref:.3e} ms/ref, R²={report.r_squared:.3f}")
    return 0


def _run_overrides(args) -> Dict[str, Any]:
    return {
        'input_mode': args.input_mode,
        'refs': args.refs,
        'queries': args.queries,
        'distance_matrix': args.distance_matrix,
        'gt': args.gt,
        'metric': args.metric,
        'w': args.w,
        'seq_len': args.L,
        'dmin_mode': args.dmin_mode,
        'boundary': args.boundary,
        'tolerance': args.tolerance,
        'auc_recall': args.auc_recall,
        'agreement_window': args.window,
        'predictions': args.predictions,
        'output_dir': args.out,
        'seed': args.seed,
        'max_workers': args.workers
    }


def _cmd_run(args) -> int:
    base = PipelineConfig.from_json(args.config) if args.config else PipelineConfig()
    cfg = base.merged(_run_overrides(args))
    if args.compare:
        reports = run_comparison(cfg)
        for name, report in reports.items():
            print(f"{name:20s} AUC@{cfg.auc_recall:g}R {report.auc_20r:.4f}")
    else:
        report = run_pipeline(cfg)
        print(f"AUC@{cfg.auc_recall:g}R: {report.auc_20r:.6f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='vpr-consensus',
        description="VPR Consensus - localization-quality prediction and weighted sequence matching",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  vpr-consensus synth --n 500 --dim 64 --sigma 0.2 --alias 0.1 --seed 42 --out ./traverse
  vpr-consensus distmat --refs ./traverse/refs.csv --queries ./traverse/queries.csv --out D.csv
  vpr-consensus predict --dm D.csv --out pred.csv
  vpr-consensus seqmatch --dm D.csv --pred pred.csv --w 0.99 --L 2 --out matches.csv
  vpr-consensus eval --matches matches.csv --gt ./traverse/gt.csv --out report.json
  vpr-consensus run --config run.json --out ./results --compare
  vpr-consensus bench --n-refs 200 600 1000 1400 1800 --L 3
        """
    )
    parser.add_argument(
        '--log-level',
        default='INFO',
        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'],
        help='Logging level (default: INFO)'
    )
    parser.add_argument(
        '--platform-info',
        action='store_true',
        help='Display platform information and exit'
    )
    parser.add_argument(
        '--version',
        action='version',
        version=f'VPR Consensus {__version__}'
    )
    sub = parser.add_subparsers(dest='command')

    distmat = sub.add_parser('distmat', help='Build a distance matrix from images or descriptors')
    distmat.add_argument('--refs', required=True, help='Reference image directory or descriptor file')
    distmat.add_argument('--queries', required=True, help='Query image directory or descriptor file')
    distmat.add_argument('--metric', choices=['euclidean', 'cosine'], help='Default: euclidean for images, cosine for descriptors')
    distmat.add_argument('--out', required=True, help='Output matrix (.csv or .vprd)')
    distmat.add_argument('--fmt', choices=['csv', 'bin'], help='Output format (default: from extension)')
    distmat.add_argument('--sad-width', type=int, default=64, help='SAD width in pixels (default: 64)')
    distmat.add_argument('--sad-height', type=int, default=32, help='SAD height in pixels (default: 32)')
    distmat.add_argument('--patch', type=int, default=8, help='Patch-normalization side (default: 8)')
    distmat.add_argument('--workers', type=int, default=1, help='Image decoding threads (default: 1)')
    distmat.add_argument('--save-descriptors', help='Directory to also save extracted SAD descriptors')
    distmat.set_defaults(handler=_cmd_distmat)

    predict = sub.add_parser('predict', help='Consensus in-tolerance prediction per query')
    predict.add_argument('--dm', required=True, help='Distance matrix file')
    predict.add_argument('--fmt', choices=['csv', 'bin'], help='Matrix format (default: from extension)')
    predict.add_argument('--window', type=int, default=1, help='Agreement window in frames (default: 1)')
    predict.add_argument('--out', required=True, help='Output predictions CSV, one 0/1 per line')
    predict.add_argument('--matches-out', help='Also write single-frame matches with an accepted column')
    predict.set_defaults(handler=_cmd_predict)

    seqmatch = sub.add_parser('seqmatch', help='Prediction-weighted sequence matching')
    seqmatch.add_argument('--dm', required=True, help='Distance matrix file')
    seqmatch.add_argument('--fmt', choices=['csv', 'bin'], help='Matrix format (default: from extension)')
    seqmatch.add_argument('--pred', help='Predictions CSV, one 0/1 per line (omit for unweighted sequence matching)')
    seqmatch.add_argument('--w', type=float, default=0.99, help='Weighting factor in [0, 1] (default: 0.99)')
    seqmatch.add_argument('--L', type=int, default=2, help='Sequence length (default: 2)')
    seqmatch.add_argument('--dmin-mode', choices=['global', 'running'], default='global', help='D_min scope (default: global)')
    seqmatch.add_argument('--boundary', choices=['replicate', 'zero'], default='replicate', help='Edge handling (default: replicate)')
    seqmatch.add_argument('--out', required=True, help='Output matches CSV')
    seqmatch.add_argument('--scores-out', help='Also save the sequence score matrix (.csv or .vprd)')
    seqmatch.add_argument('--scores-fmt', choices=['csv', 'bin'], help='Score matrix format (default: from extension)')
    seqmatch.set_defaults(handler=_cmd_seqmatch)

    evaluate = sub.add_parser('eval', help='PR curve and AUC for a matches file')
    evaluate.add_argument('--matches', required=True, help='Matches CSV (query,ref,score[,accepted])')
    evaluate.add_argument('--gt', required=True, help='Ground-truth CSV, one reference index per line')
    evaluate.add_argument('--tolerance', type=int, default=1, help='In-tolerance window in frames (default: 1)')
    evaluate.add_argument('--auc-recall', type=float, default=0.2, help='AUC recall bound (default: 0.2)')
    evaluate.add_argument('--direction', choices=['min_is_best', 'max_is_best'], default='min_is_best', help='Score direction')
    evaluate.add_argument('--out', required=True, help='Output report JSON')
    evaluate.add_argument('--curve', help='Also write a plot-ready curve CSV')
    evaluate.set_defaults(handler=_cmd_eval)

    synth = sub.add_parser('synth', help='Generate a synthetic traverse')
    synth.add_argument('--n', type=int, default=500, help='Reference frames (default: 500)')
    synth.add_argument('--n-queries', type=int, help='Query frames (default: same as --n)')
    synth.add_argument('--dim', type=int, default=64, help='Descriptor dimension (default: 64)')
    synth.add_argument('--sigma', type=float, default=0.2, help='Query noise sigma (default: 0.2)')
    synth.add_argument('--alias', type=float, default=0.1, help='Aliased query fraction (default: 0.1)')
    synth.add_argument('--drift', type=int, default=0, help='Max query/reference frame offset (default: 0)')
    synth.add_argument('--seed', type=int, default=42, help='RNG seed (default: 42)')
    synth.add_argument('--fmt', choices=['csv', 'bin'], default='csv', help='Descriptor format (default: csv)')
    synth.add_argument('--out', required=True, help='Output directory')
    synth.set_defaults(handler=_cmd_synth)

    bench = sub.add_parser('bench', help='Per-query latency benchmark')
    bench.add_argument('--n-refs', type=int, nargs='+', default=[200, 600, 1000, 1400, 1800], help='Reference-set sizes')
    bench.add_argument('--reps', type=int, default=3, help='Repetitions per size, >= 3 (default: 3)')
    bench.add_argument('--queries', type=int, default=200, help='Queries per repetition (default: 200)')
    bench.add_argument('--L', type=int, default=3, help='Sequence length (default: 3)')
    bench.add_argument('--w', type=float, default=0.99, help='Weighting factor (default: 0.99)')
    bench.add_argument('--seed', type=int, default=42, help='RNG seed (default: 42)')
    bench.add_argument('--workers', type=int, default=1, help='Parallel sizes; 1 gives stable timings (default: 1)')
    bench.add_argument('--out', default='bench.json', help='Output JSON (default: bench.json)')
    bench.add_argument('--csv', help='Also write one CSV row per size')
    bench.set_defaults(handler=_cmd_bench)

    run = sub.add_parser('run', help='End-to-end pipeline; flags override --config')
    run.add_argument('--config', help='JSON config mirroring these flags')
    run.add_argument('--input-mode', choices=['images', 'descriptors', 'distance-matrix', 'synth'])
    run.add_argument('--refs', help='Reference images directory or descriptor file')
    run.add_argument('--queries', help='Query images directory or descriptor file')
    run.add_argument('--distance-matrix', help='Precomputed distance matrix file')
    run.add_argument('--gt', help='Ground-truth CSV')
    run.add_argument('--metric', choices=['euclidean', 'cosine'])
    run.add_argument('--w', type=float, help='Weighting factor in [0, 1) (default: 0.99)')
    run.add_argument('--L', type=int, help='Sequence length (default: 2)')
    run.add_argument('--dmin-mode', choices=['global', 'running'])
    run.add_argument('--boundary', choices=['replicate', 'zero'])
    run.add_argument('--tolerance', type=int, help='In-tolerance window in frames (default: 1)')
    run.add_argument('--auc-recall', type=float, help='AUC recall bound (default: 0.2)')
    run.add_argument('--window', type=int, help='Consensus agreement window (default: 1)')
    run.add_argument('--predictions', choices=['consensus', 'perfect', 'none'])
    run.add_argument('--seed', type=int, help='Synthetic traverse seed (default: 42)')
    run.add_argument('--workers', type=int, help='Image decoding threads')
    run.add_argument('--out', help='Output directory')
    run.add_argument('--compare', action='store_true', help='Evaluate every baseline and weighted system')
    run.set_defaults(handler=_cmd_run)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main application entry point"""
    parser = build_parser()
    args = parser.parse_args(argv)

    # Setup logging
    setup_logging(args.log_level)

    # Display platform information if requested
    if args.platform_info:
        from .platform_utils import PlatformUtils
        platform_info = PlatformUtils.get_platform_info()
        print("Platform Information:")
        for key, value in platform_info.items():
            if isinstance(value, dict):
                print(f"  {key}:")
                for sub_key, sub_value in value.items():
                    print(f"    {sub_key}: {sub_value}")
            else:
                print(f"  {key}: {value}")
        return 0

    if not getattr(args, 'handler', None):
        parser.print_help()
        return 1

    try:
        return args.handler(args)
    except ValidationError as e:
        logging.error(f"❌ {e}")
        logging.debug("Traceback:", exc_info=True)
        return 1
    except (OSError, DecodeError) as e:
        logging.error(f"❌ {e}")
        logging.debug("Traceback:", exc_info=True)
        return 2
    except VPRError as e:
        logging.error(f"❌ {e}")
        logging.debug("Traceback:", exc_info=True)
        return 1


if __name__ == "__main__":
    sys.exit(main())
