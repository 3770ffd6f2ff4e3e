#!/usr/bin/env python3
"""
VPR Consensus - Parameter Sweep Module

Runs the pipeline over a grid of weighting factors, sequence lengths and
seeds, in parallel, and collects the AUC of each grid point.
"""

import sys
import logging
import argparse
import dataclasses
import itertools
import json
import time
from pathlib import Path
from typing import List, Optional, Dict, Any, Sequence, Tuple
from concurrent.futures import ThreadPoolExecutor, as_completed

from tqdm import tqdm

from .app import run_pipeline, setup_logging
from .core.evaluation import average_curves
from .errors import VPRError
from .export.report_exporter import ReportExporter
from .models.config import PipelineConfig, PredictorQualityConfig
from .models.results import PRCurve


class SweepProcessor:
    """Evaluates one pipeline config at every (w, L, seed) grid point."""

    def __init__(
        self,
        base_config: Optional[PipelineConfig] = None,
        w_values: Optional[Sequence[float]] = None,
        seq_lens: Optional[Sequence[int]] = None,
        seeds: Optional[Sequence[int]] = None,
        output_dir: Optional[str] = None,
        max_workers: int = 1
    ):
        self.base_config = base_config or PipelineConfig()
        self.w_values = list(w_values) if w_values else [self.base_config.w]
        self.seq_lens = list(seq_lens) if seq_lens else [self.base_config.seq_len]
        self.seeds = list(seeds) if seeds else [self.base_config.seed]
        self.output_dir = output_dir
        self.max_workers = max_workers

        self.results: List[Dict[str, Any]] = []
        self.failed_points: List[Dict[str, Any]] = []
        self.curves: Dict[Tuple[float, int, int], PRCurve] = {}

    def get_grid(self) -> List[Dict[str, Any]]:
        """Every grid point in w-major order."""
        return [
            {'w': w, 'seq_len': seq_len, 'seed': seed}
            for w, seq_len, seed in itertools.product(self.w_values, self.seq_lens, self.seeds)
        ]

    def _point_config(self, point: Dict[str, Any]) -> PipelineConfig:
        output_dir = None
        if self.output_dir:
            output_dir = str(Path(self.output_dir) / f"w{point['w']:g}_L{point['seq_len']}_s{point['seed']}")
        return dataclasses.replace(self.base_config, output_dir=output_dir, **point)

    def process_point(self, point: Dict[str, Any]) -> Dict[str, Any]:
        """Run the pipeline at one grid point."""
        start_time = time.time()
        result = dict(point, success=False, error=None, auc_20r=None, max_recall=None, processing_time=0.0)
        try:
            report = run_pipeline(self._point_config(point))
            result['success'] = True
            result['auc_20r'] = report.auc_20r
            result['max_recall'] = report.curve.max_recall
            self.curves[(point['w'], point['seq_len'], point['seed'])] = report.curve
        except (VPRError, OSError) as e:
            result['error'] = str(e)
            logging.error(f"❌ Error at w={point['w']}, L={point['seq_len']}, seed={point['seed']}: {e}")
        result['processing_time'] = time.time() - start_time
        return result

    def process_sweep(self) -> Dict[str, Any]:
        """Process all grid points."""
        grid = self.get_grid()
        logging.info(f"🎯 Sweeping {len(grid)} grid points with {self.max_workers} worker(s)")

        start_time = time.time()
        results = []
        if self.max_workers == 1:
            for point in tqdm(grid, desc="Sweep", unit="point"):
                results.append(self.process_point(point))
        else:
            with ThreadPoolExecutor(max_workers=self.max_workers) as executor:
                futures = [executor.submit(self.process_point, point) for point in grid]
                for future in tqdm(as_completed(futures), total=len(futures), desc="Sweep", unit="point"):
                    results.append(future.result())

        # as_completed order depends on scheduling
        order = {(p['w'], p['seq_len'], p['seed']): i for i, p in enumerate(grid)}
        results.sort(key=lambda r: order[(r['w'], r['seq_len'], r['seed'])])
        self.results = results
        self.failed_points = [r for r in results if not r['success']]

        total_time = time.time() - start_time
        return {
            'success': not self.failed_points,
            'total_points': len(grid),
            'successful': len(results) - len(self.failed_points),
            'failed': len(self.failed_points),
            'total_processing_time': total_time,
            'results': results
        }

    def auc_table(self) -> Dict[str, Dict[str, float]]:
        """Mean AUC over seeds, keyed by L then w."""
        table: Dict[str, Dict[str, List[float]]] = {}
        for r in self.results:
            if r['success']:
                table.setdefault(f"L={r['seq_len']}", {}).setdefault(f"w={r['w']:g}", []).append(r['auc_20r'])
        return {
            row: {col: sum(values) / len(values) for col, values in cols.items()}
            for row, cols in table.items()
        }

    def averaged_curves(self) -> Dict[Tuple[float, int], PRCurve]:
        """PR curves averaged over seeds for every (w, L) with at least one successful run."""
        grouped: Dict[Tuple[float, int], List[PRCurve]] = {}
        for r in self.results:
            key = (r['w'], r['seq_len'], r['seed'])
            if r['success'] and key in self.curves:
                grouped.setdefault(key[:2], []).append(self.curves[key])
        return {key: average_curves(curves) for key, curves in grouped.items()}

    def save_results(self, output_path: str, curves_path: Optional[str] = None) -> None:
        """Save sweep results to JSON file, and the seed-averaged curves to CSV when curves_path is set"""
        averaged = self.averaged_curves()
        curves_json: Dict[str, Dict[str, Any]] = {}
        for (w, seq_len), curve in averaged.items():
            curves_json.setdefault(f"L={seq_len}", {})[f"w={w:g}"] = {
                'auc_20r': curve.auc_20r,
                'recall': curve.recalls.tolist(),
                'precision': curve.precisions.tolist()
            }
        config = self.base_config.to_dict()
        for key in ('w', 'seq_len', 'seed', 'output_dir'):
            config.pop(key, None)
        summary = {
            'sweep_info': {
                'w_values': self.w_values,
                'seq_lens': self.seq_lens,
                'seeds': self.seeds,
                'max_workers': self.max_workers,
                'config': config
            },
            'auc': self.auc_table(),
            'averaged_curves': curves_json,
            'results': [
                {key: value for key, value in r.items() if key != 'processing_time'}
                for r in self.results
            ]
        }
        output_path = Path(output_path)
        output_path.parent.mkdir(parents=True, exist_ok=True)
        with open(output_path, 'w', encoding='utf-8') as f:
            json.dump(summary, f, indent=2, ensure_ascii=False)
        logging.info(f"💾 Sweep results saved to: {output_path}")
        if curves_path:
            ReportExporter().export_averaged_curves(averaged, curves_path)


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point for parameter sweeps"""
    parser = argparse.ArgumentParser(
        prog='vpr-consensus-sweep',
        description="VPR Consensus - Parameter Sweep",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  vpr-consensus-sweep --w 0 0.25 0.5 0.75 0.99 --results-file sweep.json
  vpr-consensus-sweep --config run.json --L 1 2 3 5 --seeds 1 2 3 --max-workers 4
  vpr-consensus-sweep --w 0 0.5 0.99 --flip-good-to-bad 0.8 --flip-bad-to-good 0.8
        """
    )
    parser.add_argument('--config', help='Base pipeline JSON config')
    parser.add_argument('--w', type=float, nargs='+', help='Weighting factors to sweep')
    parser.add_argument('--L', type=int, nargs='+', help='Sequence lengths to sweep')
    parser.add_argument('--seeds', type=int, nargs='+', help='Synthetic traverse seeds')
    parser.add_argument('--predictions', choices=['consensus', 'perfect', 'none'], help='Prediction source')
    parser.add_argument('--flip-good-to-bad', type=float, help='Degrade predictions: flip probability for good queries')
    parser.add_argument('--flip-bad-to-good', type=float, help='Degrade predictions: flip probability for bad queries')
    parser.add_argument('--quality-seed', type=int, default=0, help='Seed for prediction degradation (default: 0)')
    parser.add_argument('--output-dir', help='Write each grid point report under this directory')
    parser.add_argument(
        '--max-workers',
        type=int,
        default=1,
        help='Maximum number of parallel workers (default: 1)'
    )
    parser.add_argument('--results-file', default='sweep.json', help='Sweep summary JSON (default: sweep.json)')
    parser.add_argument('--curves-file', help='Seed-averaged PR curves CSV (default: <results-file>_curves.csv)')
    parser.add_argument(
        '--log-level',
        default='INFO',
        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'],
        help='Logging level'
    )
    args = parser.parse_args(argv)

    # Setup logging
    setup_logging(args.log_level)

    try:
        base = PipelineConfig.from_json(args.config) if args.config else PipelineConfig()
        if args.predictions:
            base = dataclasses.replace(base, predictions=args.predictions)
        if args.flip_good_to_bad is not None or args.flip_bad_to_good is not None:
            base = dataclasses.replace(base, quality=PredictorQualityConfig(
                flip_good_to_bad=args.flip_good_to_bad or 0.0,
                flip_bad_to_good=args.flip_bad_to_good or 0.0,
                seed=args.quality_seed
            ))
    except VPRError as e:
        logging.error(f"❌ {e}")
        return 1
    except OSError as e:
        logging.error(f"❌ {e}")
        return 2

    processor = SweepProcessor(
        base_config=base,
        w_values=args.w,
        seq_lens=args.L,
        seeds=args.seeds,
        output_dir=args.output_dir,
        max_workers=args.max_workers
    )

    logging.info("🚀 Starting parameter sweep...")
    summary = processor.process_sweep()

    # Print summary
    print("\n" + "=" * 60)
    print("SWEEP SUMMARY")
    print("=" * 60)
    print(f"Grid points: {summary['total_points']}")
    print(f"Successful: {summary['successful']}")
    print(f"Failed: {summary['failed']}")
    print(f"Total time: {summary['total_processing_time']:.1f} seconds")
    for row, cols in processor.auc_table().items():
        cells = "  ".join(f"{col} {value:.4f}" for col, value in cols.items())
        print(f"  {row}: {cells}")

    curves_file = args.curves_file or str(Path(args.results_file).with_name(Path(args.results_file).stem + "_curves.csv"))
    processor.save_results(args.results_file, curves_file)
    return 0 if summary['success'] else 1


if __name__ == "__main__":
    sys.exit(main())
