import json

import numpy as np
import pytest

from srmu.bench import (PRESETS, ExperimentSpec, default_roster, load_config, preset,
                        resolve_spec, run_experiment, run_single_trial, run_trials, trial_seed,
                        validate_outputs)
from srmu.memory import ModelSpec
from srmu.sim import EnvConfig


def small(name="exp3", trials=6, steps=40, **kw):
    return resolve_spec({"experiment": name}, trials=trials, steps=steps, dim=64, **kw)


def test_presets():
    e1, e2, e3 = (preset(n) for n in PRESETS)
    assert (e1.env.p_drift, e1.env.p_jump, e1.env.sampling) == (0.0, 0.0, "partitioned")
    assert (e2.env.p_drift, e2.env.p_jump, e2.env.sampling) == (0.01, 0.0, "uniform")
    assert (e3.env.p_drift, e3.env.p_jump, e3.env.sampling) == (0.01, 0.001, "partitioned")
    for s in (e1, e2, e3):
        assert (s.env.K, s.env.S, s.env.T, s.env.noise_prob) == (5, 5, 500, 0.05)
        assert (s.dim, s.trials) == (256, 1000)
        assert [m.label for m in s.models] == ["naive", "srmu(gamma=1)", "temporal(gamma=0.95)",
                                               "srmu(gamma=0.95)"]
    with pytest.raises(ValueError):
        preset("exp4")


def test_default_roster_from_gamma_list():
    assert default_roster([1.0, 0.9, 0.8]) == [
        ModelSpec("naive"), ModelSpec("srmu", 1.0), ModelSpec("temporal", 0.9), ModelSpec("srmu", 0.9),
        ModelSpec("temporal", 0.8), ModelSpec("srmu", 0.8)]


def test_spec_validation():
    with pytest.raises(ValueError):
        ExperimentSpec("x", EnvConfig(), models=[])
    with pytest.raises(ValueError):
        ExperimentSpec("x", EnvConfig(), trials=0)


def test_resolve_precedence(tmp_path):
    cfg = {"experiment": "exp2", "trials": 10, "env": {"noise_prob": 0.2, "T": 80},
           "models": [["naive", 1.0], ["srmu", 0.9]], "master_seed": 4}
    spec = resolve_spec(cfg)
    assert spec.name == "exp2" and spec.env.sampling == "uniform" and spec.env.p_drift == 0.01
    assert spec.env.noise_prob == 0.2 and spec.env.T == 80 and spec.trials == 10
    assert spec.master_seed == 4 and [m.label for m in spec.models] == ["naive", "srmu(gamma=0.9)"]
    over = resolve_spec(cfg, trials=3, steps=50, seed=9, gamma_list=[0.8], experiment="exp3")
    assert over.name == "exp3" and over.env.p_jump == 0.001 and over.env.noise_prob == 0.2
    assert (over.trials, over.env.T, over.master_seed) == (3, 50, 9)
    assert [m.label for m in over.models] == ["naive", "temporal(gamma=0.8)", "srmu(gamma=0.8)"]
    with pytest.raises(ValueError):
        resolve_spec({"bogus": 1})
    with pytest.raises(ValueError):
        resolve_spec({"env": {"p_drfit": 0.1}})
    custom = resolve_spec({"env": {"K": 3, "group_sizes": [1, 1, 1]}})
    assert custom.name == "custom" and custom.env.K == 3


def test_load_config_json_and_toml(tmp_path):
    (tmp_path / "c.json").write_text(json.dumps({"experiment": "exp1", "env": {"T": 60}}))
    (tmp_path / "c.toml").write_text('experiment = "exp1"\n[env]\nT = 60\n')
    assert load_config(tmp_path / "c.json") == load_config(tmp_path / "c.toml")


def test_trial_seeds_unique_and_stable():
    seeds = [trial_seed(0, i) for i in range(1000)]
    assert len(set(seeds)) == 1000
    assert seeds == [trial_seed(0, i) for i in range(1000)]
    assert trial_seed(1, 0) != seeds[0]


def test_single_trial_replay_bitwise():
    spec = small()
    traces = run_trials(spec)
    replay = run_single_trial(spec, 4)
    assert replay.seed == traces[4].seed
    assert np.array_equal(replay.cosine, traces[4].cosine)
    assert np.array_equal(replay.magnitude, traces[4].magnitude)


def test_worker_count_does_not_change_results(tmp_path):
    spec = small(trials=8)
    run_experiment(spec, workers=1, out_dir=tmp_path / "w1")
    run_experiment(spec, workers=2, out_dir=tmp_path / "w2")
    for f in ("summary_exp3.csv", "curves_exp3.csv"):
        assert (tmp_path / "w1" / f).read_bytes() == (tmp_path / "w2" / f).read_bytes()


def test_single_trial_aggregate_equals_trace():
    spec = small(trials=1)
    agg = run_experiment(spec)
    trace = run_single_trial(spec, 0)
    assert np.array_equal(agg.mean_cosine, trace.cosine)
    assert np.array_equal(agg.final_magnitude, trace.magnitude[:, -1])


def test_outputs_and_manifest(tmp_path):
    spec = small(trials=3)
    run_experiment(spec, out_dir=tmp_path, eventlog_trials=[1])
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == ["curves_exp3.csv", "eventlog_exp3_1.csv", "run_manifest.json", "summary_exp3.csv"]
    man = json.loads((tmp_path / "run_manifest.json").read_text())
    assert man["spec"]["trials"] == 3 and len(man["trial_seeds"]) == 3
    assert man["trial_seeds"][1] == trial_seed(spec.master_seed, 1)
    assert {"srmu", "numpy", "python"} <= set(man["versions"])
    assert len((tmp_path / "eventlog_exp3_1.csv").read_text().splitlines()) == spec.env.T + 1
    validate_outputs(tmp_path, spec)
    (tmp_path / "summary_exp3.csv").write_text("experiment\n")
    with pytest.raises(RuntimeError):
        validate_outputs(tmp_path, spec)


def test_eventlog_index_checked():
    with pytest.raises(ValueError):
        run_experiment(small(trials=2), eventlog_trials=[5])


def test_shared_codebook_flag():
    per_trial = run_trials(small(trials=2))
    shared = run_trials(small(trials=2, shared_codebook=True))
    assert not np.array_equal(per_trial[0].final_states, shared[0].final_states)
    # with a shared codebook the same env stream reproduces across reruns
    again = run_trials(small(trials=2, shared_codebook=True))
    assert np.array_equal(shared[1].final_states, again[1].final_states)
