"""Smoke tests for the Python bindings: the module imports, the main
operations run end to end on tiny inputs, and errors surface as Python
exceptions."""

import json
import math

import pytest

gestalt = pytest.importorskip("gestalt")


def tiny_pendulum(steps=120):
    p = gestalt.PendulumParams()
    p.steps = steps
    return gestalt.simulate_pendulum(p)


def tiny_model():
    cfg = gestalt.ModelConfig()
    cfg.posture_neurons = 16
    cfg.direction_neurons = 8
    cfg.magnitude_neurons = 4
    for c in (cfg.posture_cfg, cfg.direction_cfg, cfg.magnitude_cfg):
        c.hidden = 12
        c.latent = 4
        c.epochs = 3
        c.lr = 1e-2
    return gestalt.train(cfg, tiny_pendulum())


def test_data_generation_shapes():
    seq = tiny_pendulum()
    assert seq.num_features == 2
    assert seq.dim == 2
    assert seq.num_frames() == 120
    assert len(seq.frames[0]) == 4
    seq.validate()

    walker = gestalt.generate_walker(gestalt.WalkerParams())
    assert walker.num_features == 15
    assert walker.dim == 3


def test_disturbance_translates_points():
    seq = tiny_pendulum(10)
    spec = gestalt.DisturbanceSpec()
    spec.translation = (1.0, 0.0, 0.0)
    moved = gestalt.apply_disturbance(seq, spec)
    assert moved.frames[0][0] == pytest.approx(seq.frames[0][0] + 1.0)
    assert moved.frames[0][1] == pytest.approx(seq.frames[0][1])


def test_csv_round_trip(tmp_path):
    seq = tiny_pendulum(20)
    path = str(tmp_path / "seq.csv")
    gestalt.save_csv(seq, path)
    back = gestalt.load_csv(path)
    assert back.num_frames() == seq.num_frames()
    assert back.frames[3] == seq.frames[3]
    assert gestalt.sequence_hash(back) == gestalt.sequence_hash(seq)


def test_train_save_load_and_infer(tmp_path):
    model = tiny_model()
    assert len(model.curves.posture) == 3
    path = str(tmp_path / "model.gvae")
    gestalt.save_model(model, path)
    loaded = gestalt.load_model(path)
    assert loaded.data_hash == model.data_hash

    hyper = gestalt.Hyper()
    hyper.eta_f = 0.1
    hyper.beta_d = 8.0
    hyper.beta_m = 2.0
    run = gestalt.infer_binding(loaded, tiny_pendulum(), hyper, 20, -1.0)
    assert run.steps_done == 20
    assert len(run.log) == 20
    assert all(math.isfinite(row.loss) for row in run.log)
    weights = run.binding.weights()
    assert len(weights) == 4
    assert all(0.0 <= w <= 1.0 for w in weights)
    assert gestalt.fbe(run.binding) >= 0.0

    metrics = tmp_path / "metrics.csv"
    gestalt.save_metrics_csv(run, str(metrics))
    assert metrics.read_text().startswith("step,loss")


def test_hyper_loss_property():
    h = gestalt.Hyper()
    assert h.loss == "sse"
    h.loss = "mse"
    assert h.loss == "mse"
    with pytest.raises(ValueError):
        h.loss = "huber"


def test_presets_and_config_errors():
    names = gestalt.preset_names()
    assert "pendulum" in names and "walker-exp3" in names
    cfg = json.loads(gestalt.preset_json("pendulum-exp4"))
    assert cfg["kind"] == "bind"
    assert cfg["hyper"]["beta_d"] == 8.0
    with pytest.raises(ValueError):
        gestalt.preset_json("no-such-preset")
    with pytest.raises(ValueError):
        gestalt.run_experiment_json('{"bad_key": 1}')


def test_run_experiment_json_end_to_end(tmp_path):
    out = tmp_path / "train_run"
    config = {
        "preset": "pendulum",
        "data": {"pendulum": {"steps": 100}},
        "model": {"epochs": 2, "hidden": 10, "latent": 3},
        "seeds": [0],
        "out_dir": str(out),
    }
    assert gestalt.run_experiment_json(json.dumps(config)) == 0
    assert (out / "manifest.json").exists()
    assert (out / "model_seed0.gvae").exists()
