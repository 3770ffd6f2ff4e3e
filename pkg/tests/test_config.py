"""Tests for configuration validation and JSON loading."""

import json

import pytest

from vpr_consensus.errors import ValidationError
from vpr_consensus.models.config import (
    BenchConfig, PipelineConfig, PredictorQualityConfig, SadConfig, SynthConfig
)


def write_config(tmp_path, data, name="run.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def test_defaults_are_valid():
    assert PipelineConfig().validate() == []
    assert BenchConfig().validate() == []


def test_full_weight_needs_no_predictions():
    assert any("Weighting factor 1" in e for e in PipelineConfig(w=1.0).validate())
    assert PipelineConfig(w=1.0, predictions='none').validate() == []
    assert PipelineConfig(w=1.5).validate()


def test_input_modes_need_their_files():
    assert PipelineConfig(input_mode='descriptors', gt='gt.csv').validate()
    assert PipelineConfig(input_mode='distance-matrix', gt='gt.csv').validate()
    assert PipelineConfig(input_mode='distance-matrix', distance_matrix='D.csv').validate()
    assert PipelineConfig(input_mode='distance-matrix', distance_matrix='D.csv', gt='gt.csv').validate() == []
    both = PipelineConfig(input_mode='descriptors', refs='r.csv', queries='q.csv', distance_matrix='D.csv', gt='gt.csv')
    assert both.validate()


def test_resolved_metric_defaults():
    assert PipelineConfig(input_mode='images').resolved_metric() == 'euclidean'
    assert PipelineConfig(input_mode='descriptors').resolved_metric() == 'cosine'
    assert PipelineConfig(input_mode='distance-matrix').resolved_metric() == 'precomputed'
    assert PipelineConfig(metric='euclidean', input_mode='descriptors').resolved_metric() == 'euclidean'


def test_nested_configs_are_validated():
    assert SadConfig(width=60).validate()
    assert PipelineConfig(sad=SadConfig(patch_width=0)).validate()
    assert PipelineConfig(synth=SynthConfig(alias_rate=1.5)).validate()
    assert PipelineConfig(quality=PredictorQualityConfig(flip_good_to_bad=2.0)).validate()


def test_ensure_valid_lists_every_problem():
    with pytest.raises(ValidationError) as info:
        PipelineConfig(seq_len=0, tolerance=-1).ensure_valid()
    assert "Sequence length" in str(info.value)
    assert "Tolerance" in str(info.value)


def test_merged_ignores_unset_overrides():
    merged = PipelineConfig(w=0.5, seq_len=3).merged({'w': None, 'seq_len': 5, 'seed': 7})
    assert (merged.w, merged.seq_len, merged.seed) == (0.5, 5, 7)
    assert isinstance(merged.synth, SynthConfig)


def test_json_file_loads_nested_sections(tmp_path):
    path = write_config(tmp_path, {
        'w': 0.75, 'seq_len': 3, 'synth': {'n_refs': 120, 'alias_rate': 0.2},
        'quality': {'flip_good_to_bad': 0.1, 'flip_bad_to_good': 0.3, 'seed': 4}
    })
    cfg = PipelineConfig.from_json(path)
    assert cfg.w == 0.75
    assert cfg.synth.n_refs == 120
    assert cfg.quality.flip_bad_to_good == 0.3


def test_saved_config_loads_back(tmp_path):
    cfg = PipelineConfig(w=0.5, dmin_mode='running', quality=PredictorQualityConfig(0.2, 0.1))
    path = str(tmp_path / "saved.json")
    cfg.to_json(path)
    assert PipelineConfig.from_json(path).to_dict() == cfg.to_dict()


@pytest.mark.parametrize("data, field", [
    ({'w': 2}, 'w'),
    ({'seq_len': 0}, 'seq_len'),
    ({'boundary': 'wrap'}, 'boundary'),
    ({'predictions': 'oracle'}, 'predictions'),
])
def test_schema_rejects_bad_fields(tmp_path, data, field):
    with pytest.raises(ValidationError) as info:
        PipelineConfig.from_json(write_config(tmp_path, data))
    assert field in str(info.value)


def test_schema_rejects_unknown_keys(tmp_path):
    with pytest.raises(ValidationError):
        PipelineConfig.from_json(write_config(tmp_path, {'weight': 0.5}))


def test_malformed_json_names_the_line(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{\n  "w": 0.5,\n}')
    with pytest.raises(ValidationError) as info:
        PipelineConfig.from_json(str(path))
    assert info.value.row == 3


def test_undecodable_config_is_a_validation_error(tmp_path):
    path = tmp_path / "latin1.json"
    path.write_bytes(b'{"output_dir": "r\xe9sultats"}')
    with pytest.raises(ValidationError) as info:
        PipelineConfig.from_json(str(path))
    assert info.value.module == 'config'


def test_bench_config_limits():
    assert BenchConfig(reps=2).validate()
    assert BenchConfig(n_refs=[2]).validate()
    assert BenchConfig(w=-0.1).validate()
