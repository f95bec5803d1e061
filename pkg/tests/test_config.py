import pytest
from pydantic import ValidationError

from wavelet_filter_kit.config import WaveletKitConfig


def test_defaults_match_the_documented_tolerances():
    cfg = WaveletKitConfig()
    assert cfg.seed == 42
    assert cfg.verification.points == 256
    assert cfg.verification.tolerance == 1e-9
    assert cfg.stein.tolerance == 1e-12
    assert cfg.sampling.max_alpha == 0.999
    assert cfg.logging.trace_path == "artifacts/traces.jsonl"


def test_defaults_are_not_shared_between_instances():
    first = WaveletKitConfig()
    first.verification.points = 8
    assert WaveletKitConfig().verification.points == 256


def test_partial_toml_overrides_only_given_keys(tmp_path):
    path = tmp_path / "wfk.toml"
    path.write_text('seed = 7\n[logging]\ntrace_path = "t.jsonl"\n', encoding="utf-8")
    cfg = WaveletKitConfig.load(path)
    assert cfg.seed == 7
    assert cfg.logging.trace_path == "t.jsonl"
    assert cfg.verification.points == 256


def test_out_of_range_values_are_rejected(tmp_path):
    path = tmp_path / "wfk.toml"
    path.write_text("[sampling]\nmax_alpha = 1.0\n", encoding="utf-8")
    with pytest.raises(ValidationError):
        WaveletKitConfig.load(path)


def test_missing_path_means_defaults():
    assert WaveletKitConfig.load(None) == WaveletKitConfig()
