#!/usr/bin/env python3
"""
Configuration Models

Parameter carriers for every stage. Each exposes to_dict/from_dict and a
validate() that returns a list of problems (empty when valid).
"""

import json
import logging
from typing import Dict, Any, Optional, List
from dataclasses import dataclass, field, asdict, fields

import jsonschema

from ..errors import ValidationError

INPUT_MODES = ('images', 'descriptors', 'distance-matrix', 'synth')
PREDICTION_SOURCES = ('consensus', 'perfect', 'none')


def _known_fields(cls, data: Dict[str, Any]) -> Dict[str, Any]:
    names = {f.name for f in fields(cls)}
    return {key: value for key, value in data.items() if key in names}


@dataclass
class SadConfig:
    """Patch-normalized downsampled image settings."""
    width: int = 64
    height: int = 32
    patch_width: int = 8
    patch_height: int = 8

    def validate(self) -> List[str]:
        errors = []
        if self.width <= 0 or self.height <= 0:
            errors.append(f"Invalid SAD resolution {self.width}x{self.height}")
        if self.patch_width <= 0 or self.patch_height <= 0:
            errors.append(f"Invalid SAD patch {self.patch_width}x{self.patch_height}")
        elif self.width % self.patch_width or self.height % self.patch_height:
            errors.append(
                f"SAD resolution {self.width}x{self.height} is not divisible "
                f"by patch {self.patch_width}x{self.patch_height}"
            )
        return errors

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'SadConfig':
        return cls(**_known_fields(cls, data))


@dataclass
class SynthConfig:
    """Synthetic traverse settings; all randomness flows from seed."""
    n_refs: int = 500
    descriptor_dim: int = 64
    noise_sigma: float = 0.2
    alias_rate: float = 0.1
    drift: int = 0
    seed: int = 42
    n_queries: Optional[int] = None
    # Absolute walk step; refs start from a unit normal and do not depend on noise_sigma.
    step_size: float = 0.1
    alias_strength: float = 0.7
    min_alias_offset: int = 10

    @property
    def query_count(self) -> int:
        return self.n_queries if self.n_queries is not None else self.n_refs

    def validate(self) -> List[str]:
        errors = []
        if self.n_refs < 2:
            errors.append(f"n_refs must be >= 2, got {self.n_refs}")
        if self.descriptor_dim < 1:
            errors.append(f"descriptor_dim must be >= 1, got {self.descriptor_dim}")
        if self.noise_sigma < 0:
            errors.append(f"noise_sigma must be >= 0, got {self.noise_sigma}")
        if not 0.0 <= self.alias_rate <= 1.0:
            errors.append(f"alias_rate must be in [0, 1], got {self.alias_rate}")
        if self.drift < 0:
            errors.append(f"drift must be >= 0, got {self.drift}")
        if self.n_queries is not None and self.n_queries < 1:
            errors.append(f"n_queries must be >= 1, got {self.n_queries}")
        if self.step_size <= 0:
            errors.append(f"step_size must be > 0, got {self.step_size}")
        if not 0.5 < self.alias_strength <= 1.0:
            errors.append(f"alias_strength must be in (0.5, 1], got {self.alias_strength}")
        if self.min_alias_offset < 2:
            errors.append(f"min_alias_offset must be >= 2, got {self.min_alias_offset}")
        elif self.alias_rate > 0 and self.n_refs <= 2 * self.min_alias_offset:
            errors.append("n_refs too small to place aliased references")
        return errors

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'SynthConfig':
        return cls(**_known_fields(cls, data))


@dataclass
class PredictorQualityConfig:
    """Bit-flip probabilities used to synthesize good or poor predictors."""
    flip_good_to_bad: float = 0.0
    flip_bad_to_good: float = 0.0
    seed: int = 0

    def validate(self) -> List[str]:
        errors = []
        for name in ('flip_good_to_bad', 'flip_bad_to_good'):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                errors.append(f"{name} must be in [0, 1], got {value}")
        return errors

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'PredictorQualityConfig':
        return cls(**_known_fields(cls, data))


PIPELINE_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "properties": {
        "input_mode": {"enum": list(INPUT_MODES)},
        "refs": {"type": ["string", "null"]},
        "queries": {"type": ["string", "null"]},
        "distance_matrix": {"type": ["string", "null"]},
        "gt": {"type": ["string", "null"]},
        "metric": {"enum": ["euclidean", "cosine", "precomputed", None]},
        "w": {"type": "number", "minimum": 0, "maximum": 1},
        "seq_len": {"type": "integer", "minimum": 1},
        "dmin_mode": {"enum": ["global", "running"]},
        "boundary": {"enum": ["replicate", "zero"]},
        "tolerance": {"type": "integer", "minimum": 0},
        "auc_recall": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
        "agreement_window": {"type": "integer", "minimum": 0},
        "predictions": {"enum": list(PREDICTION_SOURCES)},
        "output_dir": {"type": ["string", "null"]},
        "seed": {"type": "integer"},
        "max_workers": {"type": "integer", "minimum": 1},
        "sad": {"type": "object"},
        "synth": {"type": "object"},
        "quality": {"type": ["object", "null"]}
    },
    "additionalProperties": False
}


@dataclass
class PipelineConfig:
    """Everything run_pipeline needs; defaults follow the published setup."""
    input_mode: str = 'synth'
    refs: Optional[str] = None
    queries: Optional[str] = None
    distance_matrix: Optional[str] = None
    gt: Optional[str] = None
    metric: Optional[str] = None
    w: float = 0.99
    seq_len: int = 2
    dmin_mode: str = 'global'
    boundary: str = 'replicate'
    tolerance: int = 1
    auc_recall: float = 0.2
    agreement_window: int = 1
    predictions: str = 'consensus'
    output_dir: Optional[str] = None
    seed: int = 42
    max_workers: int = 1
    sad: SadConfig = field(default_factory=SadConfig)
    synth: SynthConfig = field(default_factory=SynthConfig)
    quality: Optional[PredictorQualityConfig] = None

    def resolved_metric(self) -> str:
        """Metric actually used: explicit, else euclidean for SAD and cosine otherwise."""
        if self.metric:
            return self.metric
        if self.input_mode == 'distance-matrix':
            return 'precomputed'
        return 'euclidean' if self.input_mode == 'images' else 'cosine'

    def validate(self) -> List[str]:
        errors = []
        if self.input_mode not in INPUT_MODES:
            errors.append(f"Unknown input mode: {self.input_mode}")
        if self.input_mode in ('images', 'descriptors'):
            if not self.refs or not self.queries:
                errors.append(f"Input mode '{self.input_mode}' needs both refs and queries")
            if self.distance_matrix:
                errors.append("Give either refs/queries or a distance matrix, not both")
        if self.input_mode == 'distance-matrix':
            if not self.distance_matrix:
                errors.append("Input mode 'distance-matrix' needs a distance matrix path")
            if self.refs or self.queries:
                errors.append("Give either refs/queries or a distance matrix, not both")
        if self.input_mode != 'synth' and not self.gt:
            errors.append("A ground-truth file is required outside synth mode")
        if not 0.0 <= self.w <= 1.0:
            errors.append(f"Weighting factor must be in [0, 1], got {self.w}")
        elif self.w == 1.0 and self.predictions != 'none':
            errors.append("Weighting factor 1 collapses weighted scores to D_min; use w < 1 (e.g. 0.99) to build PR curves")
        if self.seq_len < 1:
            errors.append(f"Sequence length must be >= 1, got {self.seq_len}")
        if self.dmin_mode not in ('global', 'running'):
            errors.append(f"Unknown dmin mode: {self.dmin_mode}")
        if self.boundary not in ('replicate', 'zero'):
            errors.append(f"Unknown boundary mode: {self.boundary}")
        if self.tolerance < 0:
            errors.append(f"Tolerance must be >= 0, got {self.tolerance}")
        if not 0.0 < self.auc_recall <= 1.0:
            errors.append(f"AUC recall bound must be in (0, 1], got {self.auc_recall}")
        if self.agreement_window < 0:
            errors.append(f"Agreement window must be >= 0, got {self.agreement_window}")
        if self.predictions not in PREDICTION_SOURCES:
            errors.append(f"Unknown prediction source: {self.predictions}")
        if self.max_workers < 1:
            errors.append(f"max_workers must be >= 1, got {self.max_workers}")
        errors.extend(self.sad.validate())
        if self.input_mode == 'synth':
            errors.extend(self.synth.validate())
        if self.quality is not None:
            errors.extend(self.quality.validate())
        return errors

    def ensure_valid(self) -> None:
        """Raise ValidationError listing every problem."""
        errors = self.validate()
        if errors:
            raise ValidationError("; ".join(errors), module='config')

    def to_dict(self) -> Dict[str, Any]:
        result = asdict(self)
        result['metric'] = self.metric
        return result

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'PipelineConfig':
        values = _known_fields(cls, data)
        if isinstance(values.get('sad'), dict):
            values['sad'] = SadConfig.from_dict(values['sad'])
        if isinstance(values.get('synth'), dict):
            values['synth'] = SynthConfig.from_dict(values['synth'])
        if isinstance(values.get('quality'), dict):
            values['quality'] = PredictorQualityConfig.from_dict(values['quality'])
        return cls(**values)

    def merged(self, overrides: Dict[str, Any]) -> 'PipelineConfig':
        """Return a copy with every non-None override applied."""
        data = self.to_dict()
        data.update({key: value for key, value in overrides.items() if value is not None})
        return PipelineConfig.from_dict(data)

    def to_json(self, file_path: str, pretty: bool = True) -> None:
        """Save the config to a JSON file."""
        with open(file_path, 'w', encoding='utf-8') as f:
            json.dump(self.to_dict(), f, indent=2 if pretty else None, ensure_ascii=False)

    @classmethod
    def from_json(cls, file_path: str) -> 'PipelineConfig':
        """Load and schema-check a JSON config file."""
        with open(file_path, 'r', encoding='utf-8') as f:
            try:
                data = json.load(f)
            except json.JSONDecodeError as e:
                raise ValidationError(f"Config is not valid JSON: {e.msg}", module='config', path=file_path, row=e.lineno)
            except UnicodeDecodeError as e:
                raise ValidationError(f"Config is not valid UTF-8: {e.reason}", module='config', path=file_path)
        try:
            jsonschema.validate(instance=data, schema=PIPELINE_SCHEMA)
        except jsonschema.ValidationError as e:
            location = "/".join(str(part) for part in e.absolute_path) or "<root>"
            raise ValidationError(f"Config field {location}: {e.message}", module='config', path=file_path)
        logging.debug(f"Loaded pipeline config from {file_path}")
        return cls.from_dict(data)


@dataclass
class BenchConfig:
    """Latency benchmark settings."""
    n_refs: List[int] = field(default_factory=lambda: [200, 600, 1000, 1400, 1800])
    reps: int = 3
    queries: int = 200
    seq_len: int = 3
    w: float = 0.99
    seed: int = 42
    max_workers: int = 1

    def validate(self) -> List[str]:
        errors = []
        if not self.n_refs:
            errors.append("At least one reference-set size is required")
        elif min(self.n_refs) < 3:
            errors.append(f"Reference-set sizes must be >= 3, got {min(self.n_refs)}")
        if self.reps < 3:
            errors.append(f"reps must be >= 3, got {self.reps}")
        if self.queries < 1:
            errors.append(f"queries must be >= 1, got {self.queries}")
        if self.seq_len < 1:
            errors.append(f"seq_len must be >= 1, got {self.seq_len}")
        if not 0.0 <= self.w <= 1.0:
            errors.append(f"w must be in [0, 1], got {self.w}")
        if self.max_workers < 1:
            errors.append(f"max_workers must be >= 1, got {self.max_workers}")
        return errors

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)
