#!/usr/bin/env python3
"""
Latency Benchmark Module

Per-query inference time of the two online stages, measured separately:
gradient + consensus prediction, and weighting + sequence scoring. Distance
columns are precomputed, so descriptor extraction and file I/O are excluded.
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.stats import linregress
from tqdm import tqdm

from ..errors import ValidationError
from ..models.config import BenchConfig, SynthConfig
from ..models.matrices import DistanceMatrix
from ..models.results import BenchEntry, BenchReport, StageTiming
from ..platform_utils import PlatformUtils
from .matching import distance_matrix
from .predictor import StreamingPredictor
from .seqmatch import StreamingSequenceMatcher
from .synth import generate_traverse


class Benchmarker:
    """Times the streaming predictor and sequence matcher over reference-set sizes."""

    def __init__(self, config: Optional[BenchConfig] = None):
        self.config = config or BenchConfig()
        errors = self.config.validate()
        if errors:
            raise ValidationError("; ".join(errors), module='bench')
        # Matched reference per query for every (size, rep); identical across reps.
        self.outputs: Dict[int, List[np.ndarray]] = {}

    def _distances(self, n_refs: int) -> DistanceMatrix:
        synth = SynthConfig(
            n_refs=n_refs,
            n_queries=self.config.queries,
            alias_rate=0.0,
            seed=self.config.seed
        )
        refs, queries, _ = generate_traverse(synth)
        return distance_matrix(refs, queries, 'euclidean')

    def _run_once(self, D: DistanceMatrix) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        predictor = StreamingPredictor()
        matcher = StreamingSequenceMatcher(w=self.config.w, seq_len=self.config.seq_len)
        columns = [np.ascontiguousarray(D.values[:, j]) for j in range(D.m)]
        prediction_ms = np.empty(D.m)
        sequence_ms = np.empty(D.m)
        refs = np.empty(D.m, dtype=np.int64)

        for j, column in enumerate(columns):
            start = time.perf_counter()
            step = predictor.push(column)
            middle = time.perf_counter()
            match = matcher.push(column, step.bit)
            end = time.perf_counter()
            prediction_ms[j] = (middle - start) * 1000.0
            sequence_ms[j] = (end - middle) * 1000.0
            refs[j] = match.ref
        return prediction_ms, sequence_ms, refs

    def measure(self, n_refs: int) -> BenchEntry:
        """Time reps passes over one synthetic matrix with n_refs references."""
        D = self._distances(n_refs)
        prediction, sequence, outputs = [], [], []
        for _ in range(self.config.reps):
            prediction_ms, sequence_ms, refs = self._run_once(D)
            prediction.append(prediction_ms)
            sequence.append(sequence_ms)
            outputs.append(refs)

        if any(not np.array_equal(outputs[0], refs) for refs in outputs[1:]):
            logging.error(f"Benchmark outputs differ between repetitions at n={n_refs}")
        self.outputs[n_refs] = outputs

        entry = BenchEntry(
            n_refs=n_refs,
            prediction=StageTiming.from_samples(np.concatenate(prediction)),
            sequence=StageTiming.from_samples(np.concatenate(sequence)),
            queries=D.m
        )
        logging.debug(
            f"n={n_refs}: prediction {entry.prediction.mean_ms:.4f} ms, "
            f"sequence {entry.sequence.mean_ms:.4f} ms per query"
        )
        return entry

    def run(self) -> BenchReport:
        sizes = list(self.config.n_refs)
        logging.info(
            f"⏱️ Benchmarking {len(sizes)} reference-set sizes, {self.config.reps} reps, "
            f"L={self.config.seq_len}, {self.config.queries} queries"
        )

        if self.config.max_workers == 1:
            entries = [self.measure(n) for n in tqdm(sizes, desc="Benchmarking", unit="size")]
        else:
            with ThreadPoolExecutor(max_workers=self.config.max_workers) as executor:
                entries = list(tqdm(executor.map(self.measure, sizes), total=len(sizes), desc="Benchmarking", unit="size"))

        report = BenchReport(entries=entries, reps=self.config.reps, seq_len=self.config.seq_len)
        if len({entry.n_refs for entry in entries}) >= 2:
            fit = linregress([e.n_refs for e in entries], [e.combined_mean_ms for e in entries])
            report.slope_ms_per_ref = float(fit.slope)
            report.intercept_ms = float(fit.intercept)
            report.r_squared = float(fit.rvalue ** 2)
        report.platform = PlatformUtils.get_platform_info()

        largest = max(entries, key=lambda e: e.n_refs)
        logging.info(
            f"Combined per-query time at n={largest.n_refs}: {largest.combined_mean_ms:.3f} ms "
            f"(fit slope {report.slope_ms_per_ref * 1000:.3f} µs/ref, R²={report.r_squared:.3f})"
        )
        return report


def bench(n_refs: Optional[List[int]] = None, reps: int = 3, **kwargs) -> BenchReport:
    """Run the latency benchmark with BenchConfig fields given as keywords."""
    config = BenchConfig(reps=reps, **kwargs)
    if n_refs is not None:
        config.n_refs = list(n_refs)
    return Benchmarker(config).run()
