#!/usr/bin/env python3
"""
Tests for the benchmark harness: generation, workloads, CSV records,
verification, sweeps and the self-test
"""

import io
import json
import sys
import tempfile
from contextlib import redirect_stdout
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from dp_bench import (ALGORITHMS, CSV_COLUMNS, BenchRecord, CheckFailure, build_parser,
                      check_glws_smoke, check_kglws_smoke, check_lcs_smoke, depth_command, gen_command,
                      generate_instance, instance_paths, load_workload, parse_threads, records_frame,
                      resolve_run_target, run_benchmark, run_command, same_answer, selftest_command,
                      speedup_table, sweep_command, write_failure)
from dp_types import InvalidInputError, UsageError
from instance_io import InstanceFile, PayloadKind, bytes_instance, coordinates_instance


def test_csv_header_is_fixed():
    assert CSV_COLUMNS == ['algo', 'n', 'm', 'k_out', 'rounds', 'wasted_states', 'threads', 'seed',
                           'cost_spec', 'time_ms']


def test_generation_is_deterministic():
    for problem in ('glws', 'lis', 'lcs', 'matches', 'obst'):
        first = generate_instance(problem, 50, seed=1)
        second = generate_instance(problem, 50, seed=1)
        assert list(first) == list(second)
        for suffix in first:
            assert first[suffix].to_bytes() == second[suffix].to_bytes()
    assert (generate_instance('glws', 50, seed=1)[''].to_bytes()
            != generate_instance('glws', 50, seed=2)[''].to_bytes())


def test_generated_kinds():
    assert generate_instance('glws', 10, distribution='clustered')[''].kind is PayloadKind.COORDINATES
    assert generate_instance('lis', 10)[''].kind is PayloadKind.MATCHES
    assert sorted(generate_instance('lis', 10)[''].payload[:, 1].tolist()) == list(range(1, 11))
    assert generate_instance('obst', 10)[''].count == 10
    assert generate_instance('obst', 10, gap_weights=True)[''].count == 21
    pair = generate_instance('gap', 6, m=9)
    assert (pair['.a'].count, pair['.b'].count) == (6, 9)


def test_single_letter_alphabet_matches_every_pair():
    matches = generate_instance('matches', 7, m=5, alphabet=1)['']
    assert matches.count == 35


def test_generation_errors():
    with pytest.raises(UsageError):
        generate_instance('glws', 10, distribution='zipf')
    with pytest.raises(UsageError):
        generate_instance('knapsack', 10)
    with pytest.raises(InvalidInputError):
        generate_instance('glws', -1)


def test_instance_paths():
    assert instance_paths('out/strings.dpdp', ['.a', '.b']) == [Path('out/strings.a.dpdp'),
                                                                Path('out/strings.b.dpdp')]
    assert instance_paths('villages', ['']) == [Path('villages.dpdp')]


def test_workload_kind_mismatch():
    with pytest.raises(UsageError):
        load_workload('glws-par', [bytes_instance(b"abc")])
    with pytest.raises(UsageError):
        load_workload('gap', [bytes_instance(b"abc")])
    with pytest.raises(UsageError):
        load_workload('no-such-algo', [])


def test_every_algorithm_runs_on_a_small_instance():
    coords = list(generate_instance('glws', 30, seed=3).values())
    pair = list(generate_instance('lcs', 12, seed=3, m=10).values())
    sequence = list(generate_instance('lis', 40, seed=3).values())
    weights = list(generate_instance('obst', 12, seed=3).values())
    inputs = {'coordinates': coords, 'pair': pair, 'sequence': sequence, 'weights': weights}
    for algo, algorithm in ALGORITHMS.items():
        workload = load_workload(algo, inputs[algorithm.input], k=3)
        bench = run_benchmark(algo, workload, [1], repeats=1, verify=True)
        assert len(bench.records) == 1
        assert bench.verify in ('pass', 'skip'), algo


def test_verify_and_one_record_per_thread_count():
    files = list(generate_instance('glws', 300, seed=5).values())
    workload = load_workload('glws-par', files, cost='median:C=2000')
    bench = run_benchmark('glws-par', workload, [1, 2, 4], repeats=1, seed=5, verify=True)
    assert bench.verify == 'pass'
    assert [r.threads for r in bench.records] == [1, 2, 4]
    assert len({(r.k_out, r.rounds) for r in bench.records}) == 1
    frame = records_frame(bench.records)
    assert list(frame.columns) == CSV_COLUMNS
    assert (frame['seed'] == 5).all()


def test_lcs_on_identical_strings():
    text = generate_instance('lcs', 300, seed=9)['.a']
    workload = load_workload('lcs', [text, text])
    record = run_benchmark('lcs', workload, [1], repeats=1).records[0]
    assert (record.k_out, record.rounds) == (300, 300)


def test_lcs_from_match_file():
    matches = generate_instance('matches', 30, seed=4, m=25)['']
    pair = generate_instance('lcs', 30, seed=4, m=25)
    from_matches = run_benchmark('lcs', load_workload('lcs', [matches]), [1], repeats=1).records[0]
    from_pair = run_benchmark('lcs', load_workload('lcs', list(pair.values())), [1], repeats=1).records[0]
    assert from_matches.k_out == from_pair.k_out


def test_fixed_cost_controls_cluster_count():
    files = list(generate_instance('glws', 400, seed=12).values())
    counts = []
    for C in (1, 100, 10_000, 1_000_000):
        workload = load_workload('glws-par', files, cost=f'quad:C={C}')
        counts.append(run_benchmark('glws-par', workload, [1], repeats=1).records[0].k_out)
    assert counts == sorted(counts, reverse=True)
    assert counts[0] > counts[-1]


def test_same_answer():
    assert same_answer((3, np.array([1, 2])), (3, np.array([1, 2])))
    assert not same_answer((3, np.array([1, 2])), (3, np.array([1, 3])))
    assert not same_answer(3, (3,))


def test_parse_threads():
    assert parse_threads('1,2,4') == [1, 2, 4]
    assert len(parse_threads('max')) == 1
    for bad in ('0', 'two', ''):
        with pytest.raises(UsageError):
            parse_threads(bad)


def test_speedup_table():
    records = [
        BenchRecord('glws-par', 100, 0, 5, 7, 3, threads, 0, 'quad:C=1', time_ms)
        for threads, time_ms in ((1, 40.0), (2, 20.0), (4, 10.0))
    ]
    table = speedup_table(records_frame(records))
    assert table['speedup'].tolist() == [1.0, 2.0, 4.0]


def test_gen_and_run_commands_write_files():
    with tempfile.TemporaryDirectory() as tmp:
        stem = str(Path(tmp) / 'strings')
        assert gen_command('gap', 12, stem, seed=2, m=9, alphabet=3)
        inputs = [f"{stem}.a.dpdp", f"{stem}.b.dpdp"]
        assert InstanceFile.read(inputs[1]).count == 9
        csv_path = str(Path(tmp) / 'gap.csv')
        assert run_command('gap', inputs, cost='quad:C=2', cost2='sqrt:C=1,K=8', threads='1,2',
                           repeats=1, verify=True, seed=2, output=csv_path)
        frame = pd.read_csv(csv_path)
        assert list(frame.columns) == CSV_COLUMNS
        assert frame['threads'].tolist() == [1, 2]
        assert frame['cost_spec'].iloc[0] == 'quad:C=2|sqrt:C=1,K=8'


def test_run_accepts_algo_and_cost1_flags():
    args = build_parser().parse_args(['run', '--algo', 'gap', 'a.dpdp', 'b.dpdp', '--cost1', 'quad:C=4',
                                      '--cost2', 'quad:C=4'])
    assert resolve_run_target(args.algo, args.inputs) == ('gap', ['a.dpdp', 'b.dpdp'])
    assert (args.cost, args.cost2) == ('quad:C=4', 'quad:C=4')

    args = build_parser().parse_args(['run', 'glws-par', 'villages.dpdp', '--cost', 'median:C=5'])
    assert resolve_run_target(args.algo, args.inputs) == ('glws-par', ['villages.dpdp'])
    assert args.cost == 'median:C=5'

    for algo, inputs in ((None, ['knapsack', 'x.dpdp']), ('lis', []), (None, [])):
        with pytest.raises(UsageError):
            resolve_run_target(algo, inputs)


def test_depth_command_reports_frontier():
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / 'villages.dpdp'
        generate_instance('glws', 120, seed=3)[''].write(path)
        out = io.StringIO()
        with redirect_stdout(out):
            assert depth_command([str(path)], cost='quad:C=50')
    report = out.getvalue()
    assert 'max frontier' in report
    assert 'matches the depth bound' in report


def test_run_command_reports_bad_input():
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / 'text.dpdp'
        bytes_instance(b"abc").write(path)
        assert not run_command('glws-par', [str(path)], output=str(Path(tmp) / 'out.csv'))


def test_sweep_command():
    config = {
        'runs': [
            {'algo': 'glws-par', 'instance': {'problem': 'glws', 'n': 200, 'seed': 1},
             'cost': 'median:C=500', 'threads': [1, 2], 'repeats': 1, 'verify': True},
            {'algo': 'lis', 'instance': {'problem': 'lis', 'n': 300, 'seed': 2},
             'threads': [1], 'repeats': 1, 'verify': True},
        ]
    }
    with tempfile.TemporaryDirectory() as tmp:
        config_path = Path(tmp) / 'sweep.json'
        config_path.write_text(json.dumps(config))
        csv_path = Path(tmp) / 'sweep.csv'
        assert sweep_command(str(config_path), str(csv_path))
        frame = pd.read_csv(csv_path)
        assert frame['algo'].tolist() == ['glws-par', 'glws-par', 'lis']


def test_sample_sweep_config_is_well_formed():
    config = json.loads(Path(__file__).with_name('sample_sweep.json').read_text())
    for run in config['runs']:
        assert run['algo'] in ALGORITHMS
        assert 'problem' in run['instance']


def test_smoke_checks_pass():
    assert check_glws_smoke() is None
    assert check_lcs_smoke() is None
    assert check_kglws_smoke() is None


def test_failure_report_files():
    failure = CheckFailure('demo', coordinates_instance([1.0, 2.0]), {'D': [0, 1]}, {'D': [0, 2]},
                           {'cost': 'quad'})
    with tempfile.TemporaryDirectory() as tmp:
        instance_path, report_path = write_failure(failure, stem=str(Path(tmp) / 'failure'))
        assert InstanceFile.read(instance_path).payload.tolist() == [1.0, 2.0]
        report = json.loads(report_path.read_text())
        assert report['check'] == 'demo'
        assert report['expected'] == {'D': [0, 1]}
        assert report['actual'] == {'D': [0, 2]}


def test_selftest_passes():
    assert selftest_command(seed=1)


if __name__ == "__main__":
    results = []
    for name, test in [(k, v) for k, v in list(globals().items()) if k.startswith('test_') and callable(v)]:
        try:
            test()
            print(f"✓ {name}")
            results.append(True)
        except Exception as e:
            print(f"✗ {name}: {e!r}")
            results.append(False)
    print("-" * 60)
    print("✓ All tests passed!" if all(results) else "✗ Some tests failed.")
    sys.exit(0 if all(results) else 1)
