"""End-to-end tests through the command-line entry points."""

import json

import numpy as np
import pandas as pd

from vpr_consensus.app import load_inputs, main, run_comparison, run_pipeline
from vpr_consensus.batch import SweepProcessor
from vpr_consensus.batch import main as sweep_main
from vpr_consensus.core.evaluation import evaluate_matches, load_ground_truth
from vpr_consensus.core.matching import best_matches, load_distance_matrix
from vpr_consensus.core.predictor import ConsensusPredictor, mask_matches
from vpr_consensus.core.seqmatch import WeightedSequenceMatcher
from vpr_consensus.export.matrix_io import read_index_vector, read_matches, read_matrix
from vpr_consensus.export.report_exporter import read_predictions
from vpr_consensus.models.config import PipelineConfig, PredictorQualityConfig, SynthConfig


def small_config(**kwargs):
    return PipelineConfig(synth=SynthConfig(n_refs=100, alias_rate=0.1), **kwargs)


def test_stage_by_stage_commands(tmp_path, capsys):
    traverse = tmp_path / "traverse"
    assert main(['synth', '--n', '60', '--dim', '16', '--sigma', '0.1', '--alias', '0.1',
                 '--seed', '3', '--out', str(traverse)]) == 0
    assert main(['distmat', '--refs', str(traverse / "refs.csv"), '--queries', str(traverse / "queries.csv"),
                 '--metric', 'euclidean', '--out', str(tmp_path / "D.vprd")]) == 0
    assert read_matrix(tmp_path / "D.vprd").shape == (60, 60)
    assert main(['predict', '--dm', str(tmp_path / "D.vprd"), '--out', str(tmp_path / "pred.csv")]) == 0
    assert main(['seqmatch', '--dm', str(tmp_path / "D.vprd"), '--pred', str(tmp_path / "pred.csv"),
                 '--w', '0.99', '--L', '2', '--out', str(tmp_path / "matches.csv")]) == 0
    assert len(read_matches(tmp_path / "matches.csv")) == 60
    assert main(['eval', '--matches', str(tmp_path / "matches.csv"), '--gt', str(traverse / "gt.csv"),
                 '--out', str(tmp_path / "report.json"), '--curve', str(tmp_path / "curve.csv")]) == 0

    report = json.loads((tmp_path / "report.json").read_text())
    assert 0.0 <= report['auc_20r'] <= 1.0
    assert (tmp_path / "curve.csv").is_file()
    assert "AUC@0.2R" in capsys.readouterr().out


def make_matrix(tmp_path):
    traverse = tmp_path / "traverse"
    main(['synth', '--n', '60', '--dim', '16', '--sigma', '0.1', '--alias', '0.1',
          '--seed', '3', '--out', str(traverse)])
    main(['distmat', '--refs', str(traverse / "refs.csv"), '--queries', str(traverse / "queries.csv"),
          '--metric', 'euclidean', '--out', str(tmp_path / "D.vprd")])
    return tmp_path / "D.vprd", traverse / "gt.csv"


def test_masked_single_frame_matches_evaluate_end_to_end(tmp_path):
    dm, gt_path = make_matrix(tmp_path)
    assert main(['predict', '--dm', str(dm), '--out', str(tmp_path / "pred.csv"),
                 '--matches-out', str(tmp_path / "masked.csv")]) == 0
    assert main(['eval', '--matches', str(tmp_path / "masked.csv"), '--gt', str(gt_path),
                 '--out', str(tmp_path / "report.json")]) == 0

    D = load_distance_matrix(dm)
    _, prediction = ConsensusPredictor().predict(D)
    masked = mask_matches(best_matches(D), prediction)
    expected = evaluate_matches(
        [c.score for c in masked.accepted], masked.accepted, load_ground_truth(gt_path),
        abstentions=masked.abstained
    )
    report = json.loads((tmp_path / "report.json").read_text())
    assert report['abstentions'] == len(masked.abstained)
    assert report['auc_20r'] == expected.auc_20r


def test_seqmatch_saves_sequence_scores(tmp_path):
    dm, _ = make_matrix(tmp_path)
    main(['predict', '--dm', str(dm), '--out', str(tmp_path / "pred.csv")])
    assert main(['seqmatch', '--dm', str(dm), '--pred', str(tmp_path / "pred.csv"), '--L', '3',
                 '--out', str(tmp_path / "matches.csv"), '--scores-out', str(tmp_path / "S.vprd")]) == 0

    D = load_distance_matrix(dm)
    S, _ = WeightedSequenceMatcher(w=0.99, seq_len=3).match(D, read_predictions(tmp_path / "pred.csv", D))
    assert np.array_equal(read_matrix(tmp_path / "S.vprd"), S.values)


def test_undecodable_matrix_exits_with_one(tmp_path):
    (tmp_path / "bad.csv").write_bytes(b"1,0\n\xff,1\n")
    assert main(['predict', '--dm', str(tmp_path / "bad.csv"), '--out', str(tmp_path / "p.csv")]) == 1


def test_report_embeds_the_predictions_it_used(tmp_path):
    run_pipeline(small_config(output_dir=str(tmp_path)))
    report = json.loads((tmp_path / "report.json").read_text())
    bits = read_index_vector(tmp_path / "predictions.csv").tolist()
    assert report['prediction']['values'] == bits
    assert len(report['prediction']['i_g0']) == len(bits)
    assert report['config']['distance_matrix']['shape'] == [100, 100]
    assert report['config']['matcher']['seq_len'] == 2
    assert 'kernel' in report['config']['predictor']


def test_unweighted_length_one_pipeline_is_single_frame():
    cfg = small_config(w=0.0, seq_len=1, predictions='none', seed=5)
    report = run_pipeline(cfg)
    D, gt = load_inputs(cfg)
    candidates = best_matches(D)
    baseline = evaluate_matches([c.score for c in candidates], candidates, gt)
    assert report.curve.to_dict() == baseline.curve.to_dict()


def test_pipeline_is_deterministic(tmp_path):
    first = run_pipeline(small_config(output_dir=str(tmp_path / "a")))
    second = run_pipeline(small_config(output_dir=str(tmp_path / "b")))
    assert first.auc_20r == second.auc_20r
    for name in ("report.json", "curve.csv", "matches.csv", "predictions.csv", "masked_matches.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_run_command_with_config_and_overrides(tmp_path, capsys):
    config = tmp_path / "run.json"
    config.write_text(json.dumps({'synth': {'n_refs': 80, 'alias_rate': 0.1}, 'w': 0.5}))
    out = tmp_path / "results"
    assert main(['run', '--config', str(config), '--L', '3', '--out', str(out)]) == 0
    saved = json.loads((out / "config.json").read_text())
    assert (saved['w'], saved['seq_len']) == (0.5, 3)
    assert "AUC@0.2R" in capsys.readouterr().out


def test_compare_command_writes_summary(tmp_path):
    assert main(['run', '--seed', '2', '--L', '2', '--predictions', 'perfect', '--compare',
                 '--out', str(tmp_path)]) == 0
    summary = json.loads((tmp_path / "comparison" / "summary.json").read_text())
    assert 'perfect_sequence' in summary['systems']


def test_comparison_uses_degraded_predictions():
    cfg = small_config(predictions='perfect', quality=PredictorQualityConfig(1.0, 1.0))
    reports = run_comparison(cfg)
    assert reports['perfect_sequence'].auc_20r >= reports['weighted_sequence'].auc_20r


def test_distance_matrix_input_mode(tmp_path):
    traverse = tmp_path / "traverse"
    main(['synth', '--n', '50', '--dim', '8', '--alias', '0', '--out', str(traverse)])
    main(['distmat', '--refs', str(traverse / "refs.csv"), '--queries', str(traverse / "queries.csv"),
          '--out', str(tmp_path / "D.csv")])
    cfg = PipelineConfig(input_mode='distance-matrix', distance_matrix=str(tmp_path / "D.csv"),
                         gt=str(traverse / "gt.csv"))
    report = run_pipeline(cfg)
    assert report.config['metric'] == 'precomputed'


def test_invalid_config_exits_with_one(tmp_path):
    config = tmp_path / "bad.json"
    config.write_text(json.dumps({'w': 3}))
    assert main(['run', '--config', str(config)]) == 1
    assert main(['run', '--L', '0']) == 1


def test_missing_file_exits_with_two(tmp_path):
    assert main(['eval', '--matches', str(tmp_path / "none.csv"), '--gt', str(tmp_path / "none_gt.csv"),
                 '--out', str(tmp_path / "r.json")]) == 2
    assert main(['predict', '--dm', str(tmp_path / "none.csv"), '--out', str(tmp_path / "p.csv")]) == 2


def test_ground_truth_length_mismatch_exits_with_one(tmp_path):
    traverse = tmp_path / "traverse"
    main(['synth', '--n', '40', '--dim', '8', '--alias', '0', '--out', str(traverse)])
    (tmp_path / "short_gt.csv").write_text("0\n1\n2\n")
    assert main(['run', '--input-mode', 'descriptors', '--refs', str(traverse / "refs.csv"),
                 '--queries', str(traverse / "queries.csv"), '--gt', str(tmp_path / "short_gt.csv")]) == 1


def test_platform_info_and_missing_command(capsys):
    assert main(['--platform-info']) == 0
    assert "Platform Information" in capsys.readouterr().out
    assert main([]) == 1


def test_bench_command(tmp_path, capsys):
    assert main(['bench', '--n-refs', '30', '60', '--queries', '10', '--out', str(tmp_path / "bench.json"),
                 '--csv', str(tmp_path / "bench.csv")]) == 0
    assert json.loads((tmp_path / "bench.json").read_text())['seq_len'] == 3
    assert "linear fit" in capsys.readouterr().out


def test_sweep_grid_and_table(tmp_path):
    processor = SweepProcessor(small_config(), w_values=[0.0, 0.99], seq_lens=[1, 2], seeds=[1], max_workers=2)
    summary = processor.process_sweep()
    assert summary['success']
    assert [(r['w'], r['seq_len']) for r in summary['results']] == [(0.0, 1), (0.0, 2), (0.99, 1), (0.99, 2)]
    table = processor.auc_table()
    assert set(table) == {'L=1', 'L=2'}
    assert set(table['L=1']) == {'w=0', 'w=0.99'}

    averaged = processor.averaged_curves()
    assert set(averaged) == {(0.0, 1), (0.0, 2), (0.99, 1), (0.99, 2)}
    for curve in averaged.values():
        assert len(curve.points) == 101
        assert 0.0 <= curve.auc_20r <= 1.0


def test_sweep_command(tmp_path):
    config = tmp_path / "base.json"
    config.write_text(json.dumps({'synth': {'n_refs': 60, 'alias_rate': 0.1}}))
    results = tmp_path / "sweep.json"
    assert sweep_main(['--config', str(config), '--w', '0', '0.5', '--L', '2', '--seeds', '1', '2',
                       '--results-file', str(results)]) == 0
    data = json.loads(results.read_text())
    assert len(data['results']) == 4
    assert all(0.0 <= r['auc_20r'] <= 1.0 for r in data['results'])
    assert 'w' not in data['sweep_info']['config']
    averaged = data['averaged_curves']['L=2']
    assert set(averaged) == {'w=0', 'w=0.5'}
    assert len(averaged['w=0.5']['recall']) == len(averaged['w=0.5']['precision']) == 101
    curves = pd.read_csv(tmp_path / "sweep_curves.csv")
    assert set(zip(curves['w'], curves['seq_len'])) == {(0.0, 2), (0.5, 2)}
