import pytest

from zenoband import ConfigError
from zenoband.config import load_model_params, model_params_from_dict, parse_kv_text


GOOD = """
# fig 1 scenario
gamma = 1.0
omega = 0
eta = 1.5
delta = 15.915494309189535
n = 6
horizon = 5
quad_tol = 1e-9
"""


def test_parse_and_build():
    p = model_params_from_dict(parse_kv_text(GOOD))
    assert p.gamma == 1.0
    assert p.band.eta == 1.5
    assert p.band.n == 6
    assert p.numerics.horizon == 5.0


def test_unknown_key_is_error():
    kv = parse_kv_text("gamma = 1\nspacing = 0.1\n")
    with pytest.raises(ConfigError, match="spacing"):
        model_params_from_dict(kv)


def test_flat_and_n_exclusive():
    with pytest.raises(ConfigError):
        model_params_from_dict({"gamma": "1", "flat": "true", "n": "6"})


def test_flat_profile():
    p = model_params_from_dict({"gamma": "1", "eta": "2", "delta": "1", "flat": "yes"})
    assert p.band.is_flat


def test_duplicate_key_is_error():
    with pytest.raises(ConfigError, match="duplicate"):
        parse_kv_text("gamma = 1\ngamma = 2\n")


def test_bad_number_is_error():
    with pytest.raises(ConfigError, match="eta"):
        model_params_from_dict({"gamma": "1", "eta": "fast"})


def test_missing_gamma_is_error():
    with pytest.raises(ConfigError, match="gamma"):
        model_params_from_dict({"eta": "1"})


def test_malformed_line_is_error():
    with pytest.raises(ConfigError, match="line 1"):
        parse_kv_text("gamma 1\n")


def test_load_from_file(tmp_path):
    path = tmp_path / "scenario.cfg"
    path.write_text(GOOD)
    p = load_model_params(path)
    assert p.band.delta == pytest.approx(15.915494309189535)
