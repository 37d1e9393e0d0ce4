from __future__ import annotations

from pathlib import Path

import pytest

from src.config import DEFAULT_CONFIG_PATH, LabConfig, OptimizerConfig, load_config


def test_missing_file_gives_defaults(tmp_path, monkeypatch):
    for key in ("CASORATI_SEED", "CASORATI_RESTARTS", "CASORATI_SAMPLES", "CASORATI_WORKERS"):
        monkeypatch.delenv(key, raising=False)
    cfg = load_config(tmp_path / "nope.yaml")
    assert cfg == LabConfig()
    assert cfg.optimizer.restarts_for(3) == 20


def test_repository_config_matches_defaults(monkeypatch):
    for key in ("CASORATI_SEED", "CASORATI_RESTARTS", "CASORATI_SAMPLES", "CASORATI_WORKERS"):
        monkeypatch.delenv(key, raising=False)
    root = Path(__file__).resolve().parents[1]
    cfg = load_config(root / DEFAULT_CONFIG_PATH)
    assert cfg == LabConfig()


def test_yaml_values_are_read(tmp_path, monkeypatch):
    monkeypatch.delenv("CASORATI_SEED", raising=False)
    p = tmp_path / "lab.yaml"
    p.write_text("optimizer:\n  seed: 9\n  restarts: 3\ntolerances:\n  verdict: 1.0e-7\n", encoding="utf-8")
    cfg = load_config(p)
    assert cfg.optimizer.seed == 9
    assert cfg.optimizer.restarts_for(5) == 3
    assert cfg.tolerances.verdict == 1e-7


def test_env_overrides_yaml(tmp_path, monkeypatch):
    p = tmp_path / "lab.yaml"
    p.write_text("optimizer:\n  seed: 9\n", encoding="utf-8")
    monkeypatch.setenv("CASORATI_SEED", "123")
    monkeypatch.setenv("CASORATI_WORKERS", "4")
    cfg = load_config(p)
    assert cfg.optimizer.seed == 123
    assert cfg.optimizer.workers == 4


def test_bad_env_value_keeps_default(tmp_path, monkeypatch):
    monkeypatch.setenv("CASORATI_SEED", "abc")
    assert load_config(tmp_path / "missing.yaml").optimizer.seed == 0


@pytest.mark.parametrize("text", ["optimizer: [1, 2", "optimizer:\n  colour: red\n", "optimizer:\n  gtol: -1\n"])
def test_unreadable_config_falls_back(tmp_path, monkeypatch, text):
    monkeypatch.delenv("CASORATI_SEED", raising=False)
    p = tmp_path / "lab.yaml"
    p.write_text(text, encoding="utf-8")
    assert load_config(p).optimizer == OptimizerConfig()


def test_samples_default_to_no_oracle_and_env_enables_it(tmp_path, monkeypatch):
    monkeypatch.delenv("CASORATI_SAMPLES", raising=False)
    assert load_config(tmp_path / "missing.yaml").optimizer.samples is None
    monkeypatch.setenv("CASORATI_SAMPLES", "50")
    assert load_config(tmp_path / "missing.yaml").optimizer.samples == 50


def test_out_of_range_env_value_keeps_config(tmp_path, monkeypatch):
    monkeypatch.setenv("CASORATI_SAMPLES", "0")
    monkeypatch.setenv("CASORATI_SEED", "5")
    opt = load_config(tmp_path / "missing.yaml").optimizer
    assert opt.samples is None and opt.seed == 0


@pytest.mark.parametrize("text", ["tolerances:\n  verdict: .nan\n", "optimizer:\n  gtol: .inf\n"])
def test_non_finite_config_values_fall_back(tmp_path, monkeypatch, text):
    for key in ("CASORATI_SEED", "CASORATI_RESTARTS", "CASORATI_SAMPLES", "CASORATI_WORKERS"):
        monkeypatch.delenv(key, raising=False)
    p = tmp_path / "lab.yaml"
    p.write_text(text, encoding="utf-8")
    assert load_config(p) == LabConfig()
