#!/usr/bin/env python3
"""
Report Exporter Module

Writes evaluation reports, plot-ready PR curves, prediction vectors and
benchmark results. Report content carries no timestamps, so identical runs
produce identical files.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np
import pandas as pd

from ..errors import FormatError, ValidationError
from ..models.matrices import DistanceMatrix
from ..models.results import BenchReport, EvalReport, PRCurve, PredictionVector
from .matrix_io import read_index_vector, write_index_vector

PathLike = Union[str, Path]

EXPORT_VERSION = '1.0'


class ReportExporter:
    """Exports evaluation and benchmark results to JSON and CSV."""

    def __init__(self, pretty_print: bool = True, include_curve_points: bool = True):
        self.pretty_print = pretty_print
        self.include_curve_points = include_curve_points

    def _write_json(self, data: Dict[str, Any], output_path: PathLike) -> Path:
        output_path = Path(output_path)
        output_path.parent.mkdir(parents=True, exist_ok=True)
        with open(output_path, 'w', encoding='utf-8') as f:
            if self.pretty_print:
                json.dump(data, f, indent=2, ensure_ascii=False, default=str)
            else:
                json.dump(data, f, ensure_ascii=False, default=str)
        return output_path

    def _prepare_report(self, report: EvalReport) -> Dict[str, Any]:
        data = report.to_dict()
        if not self.include_curve_points:
            data['curve'].pop('points', None)
        data['export_version'] = EXPORT_VERSION
        return data

    def export_report(self, report: EvalReport, output_path: PathLike) -> Path:
        """Write one EvalReport as JSON."""
        path = self._write_json(self._prepare_report(report), output_path)
        logging.info(f"Report '{report.name}' exported to {path} (AUC {report.auc_20r:.4f})")
        return path

    def export_curve_csv(self, curve: PRCurve, output_path: PathLike) -> Path:
        """Write recall/precision columns (plus threshold and counts) for plotting."""
        output_path = Path(output_path)
        output_path.parent.mkdir(parents=True, exist_ok=True)
        frame = pd.DataFrame(
            [p.to_dict() for p in curve.points],
            columns=['recall', 'precision', 'threshold', 'tp', 'fp', 'fn']
        )
        frame.to_csv(output_path, index=False, float_format='%.17g')
        logging.debug(f"Curve with {len(frame)} points exported to {output_path}")
        return output_path

    def export_comparison(self, reports: Dict[str, EvalReport], output_dir: PathLike) -> Path:
        """
        Write <system>.json and <system>_curve.csv per system, plus summary.json
        mapping each system to its AUC and loosest-threshold counts.
        """
        output_dir = Path(output_dir)
        output_dir.mkdir(parents=True, exist_ok=True)
        summary = {}
        for name, report in reports.items():
            self.export_report(report, output_dir / f"{name}.json")
            self.export_curve_csv(report.curve, output_dir / f"{name}_curve.csv")
            loosest = report.operating_points.get('loosest')
            summary[name] = {
                'auc_20r': report.auc_20r,
                'max_recall': report.curve.max_recall,
                'abstentions': report.abstentions,
                'loosest': loosest.to_dict() if loosest else None
            }
        path = self._write_json({'export_version': EXPORT_VERSION, 'systems': summary}, output_dir / "summary.json")
        logging.info(f"Comparison of {len(reports)} systems exported to {output_dir}")
        return path

    def export_averaged_curves(self, curves: Dict[Tuple[float, int], PRCurve], output_path: PathLike) -> Path:
        """Long-form w, seq_len, recall, precision rows, one block per (w, L) curve."""
        output_path = Path(output_path)
        output_path.parent.mkdir(parents=True, exist_ok=True)
        rows = [
            {'w': w, 'seq_len': seq_len, 'recall': point.recall, 'precision': point.precision}
            for (w, seq_len), curve in curves.items()
            for point in curve.points
        ]
        frame = pd.DataFrame(rows, columns=['w', 'seq_len', 'recall', 'precision'])
        frame.to_csv(output_path, index=False, float_format='%.17g')
        logging.info(f"{len(curves)} averaged curves exported to {output_path}")
        return output_path

    def export_predictions(self, prediction: PredictionVector, output_path: PathLike) -> Path:
        """Write one 0/1 prediction per line."""
        path = write_index_vector(prediction.values, output_path)
        logging.info(f"Predictions exported to {path} ({prediction.accepted_count}/{prediction.m} in tolerance)")
        return path

    def export_bench(self, report: BenchReport, json_path: PathLike, csv_path: Optional[PathLike] = None) -> Path:
        """Write the benchmark report as JSON, and optionally one CSV row per size."""
        path = self._write_json(report.to_dict(), json_path)
        if csv_path is not None:
            csv_path = Path(csv_path)
            csv_path.parent.mkdir(parents=True, exist_ok=True)
            rows = [
                {
                    'n_refs': e.n_refs,
                    'queries': e.queries,
                    'prediction_mean_ms': e.prediction.mean_ms,
                    'prediction_median_ms': e.prediction.median_ms,
                    'prediction_p99_ms': e.prediction.p99_ms,
                    'sequence_mean_ms': e.sequence.mean_ms,
                    'sequence_median_ms': e.sequence.median_ms,
                    'sequence_p99_ms': e.sequence.p99_ms,
                    'combined_mean_ms': e.combined_mean_ms
                }
                for e in report.entries
            ]
            pd.DataFrame(rows).to_csv(csv_path, index=False)
        logging.info(f"Benchmark exported to {path}")
        return path


def read_predictions(path: PathLike, D: DistanceMatrix) -> PredictionVector:
    """
    Read one 0/1 prediction per line for the queries of D.

    The file carries bits only; each query's candidate reference is the
    argmin of its column in D.
    """
    bits = read_index_vector(path)
    invalid = np.flatnonzero((bits != 0) & (bits != 1))
    if invalid.size:
        raise FormatError("Predictions must be 0 or 1", path=path, row=int(invalid[0]), column=0)
    if bits.shape[0] != D.m:
        raise ValidationError(f"Predictions cover {bits.shape[0]} queries, matrix has {D.m}", module='predictor', path=path)
    return PredictionVector(values=bits, i_d0=np.argmin(D.values, axis=0), source='file')
