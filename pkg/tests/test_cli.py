import csv
import json
import os
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from acxkit.cli import parse_config, run, serialize
from acxkit.cli.config import load_config, parse_point
from acxkit.errors import ConfigError

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def cfg(name):
    return str(CONFIGS / name)


@pytest.mark.parametrize("name", sorted(p.name for p in CONFIGS.glob("*.cfg")))
def test_shipped_configs_parse(name):
    res = parse_config((CONFIGS / name).read_text())
    assert res.ok, res.errors


def test_parse_point_forms():
    assert np.allclose(parse_point([0.5, [1, -2]]), [0.5, 1 - 2j])
    assert np.allclose(parse_point([1, 2, 3, 4]), [1 + 2j, 3 + 4j])
    with pytest.raises(ValueError):
        parse_point([1, 2, 3])


def test_errors_carry_line_numbers():
    text = 'seed = 0\n[structures.J1]\nA1 = { "z1^3*z2^2" = 0.1 }\n'
    res = parse_config(text)
    assert not res.ok
    assert res.errors[0].startswith("line 3:")
    res = parse_config("[structures.J1]\nradius = 1.0\n[structures.J1]\nradius = 2.0\n")
    assert not res.ok and res.errors[0].startswith("line 3:")


def test_reserved_and_range_errors():
    assert not parse_config("nu_max = 99\n").ok
    assert not parse_config('[structures.J_st]\nradius = 1.0\n').ok
    assert not parse_config('[disc]\nstructure = "nope"\n').ok
    assert not parse_config('unknown_key = 1\n').ok


def test_json_duplicate_keys():
    assert not parse_config('{"seed": 1, "seed": 2}').ok


def test_load_config_missing(tmp_path):
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "nope.cfg"))


coeff = st.lists(st.floats(-0.05, 0.05, allow_nan=False), min_size=2, max_size=2)
monos = st.sampled_from(["z1", "z1b", "z2", "z2b", "z1^2", "z1*z2b"])


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), nu=st.integers(0, 30),
       tol=st.floats(1e-15, 0.5), A1=st.dictionaries(monos, coeff, max_size=3),
       terms=st.dictionaries(monos, coeff, min_size=1, max_size=3),
       p=st.lists(st.floats(-0.5, 0.5), min_size=4, max_size=4))
def test_config_round_trip(seed, nu, tol, A1, terms, p):
    doc = {"seed": seed, "nu_max": nu, "tol": tol,
           "structures": {"J1": {"A1": A1, "radius": 1.0}},
           "functions": {"f": {"terms": terms}},
           "disc": {"structure": "J1", "p": p, "v": [1, 0]}}
    first = parse_config(json.dumps(doc))
    assert first.ok, first.errors
    text = serialize(first.config)
    second = parse_config(text)
    assert second.ok
    assert second.config.to_dict() == first.config.to_dict()
    assert serialize(second.config) == text


def test_validate_and_levi(tmp_path, capsys):
    assert run(["validate", "--config", cfg("jst.cfg"), "--out", str(tmp_path)]) == 0
    rep = json.loads((tmp_path / "validation.json").read_text())
    assert rep["max_residual"] == 0
    assert run(["levi", "--config", cfg("jst.cfg"), "--out", str(tmp_path)]) == 0
    out = json.loads((tmp_path / "levi.json").read_text())
    assert json.dumps(out).count("4") > 0


def test_disc_outputs(tmp_path):
    assert run(["disc", "--config", cfg("deformed.cfg"), "--out", str(tmp_path), "--resolution", "32"]) == 0
    raw = (tmp_path / "disc.csv").read_bytes()
    assert b"\r" not in raw
    rows = list(csv.reader(raw.decode().splitlines()))
    assert rows[0] == ["r", "theta", "re_f1", "im_f1", "re_f2", "im_f2", "residual"]
    assert len(rows) == 1 + 1 + 32 * 32
    info = json.loads((tmp_path / "disc.json").read_text())
    assert info["residual"] <= 1e-8


def test_exit_codes(tmp_path, capsys):
    assert run(["validate", "--config", str(tmp_path / "missing.cfg")]) == 2
    assert run(["validate", "--config", cfg("jst.cfg"), "--bogus"]) == 2
    assert run(["frobnicate"]) == 2
    err = capsys.readouterr().err
    assert err.count("\n") >= 3 and "acx: error:" in err
    bad = tmp_path / "bad.cfg"
    bad.write_text('[structures.J1]\nA1 = { "z1" = 0.9 }\n[validate]\nstructure = "J1"\n')
    assert run(["validate", "--config", str(bad)]) == 2


def test_scale_run_directory(tmp_path):
    out = tmp_path / "run"
    assert run(["scale", "--config", cfg("static.cfg"), "--out", str(out), "--quiet"]) == 0
    for f in ("manifest.json", "attraction.csv", "convergence.csv", "verdict.txt"):
        assert (out / f).exists()
    head = (out / "convergence.csv").read_text().splitlines()[0]
    assert head == "nu,tau,K_id,domain_dev,structure_dev,structure_dev_d1"
    assert run(["report", "--out", str(out), "--quiet"]) == 0
    man = json.loads((out / "manifest.json").read_text())
    man["verdict"] = "FAIL"
    (out / "manifest.json").write_text(json.dumps(man))
    assert run(["report", "--out", str(out), "--quiet"]) == 1


def test_wong_rosay_and_compactness(tmp_path, capsys):
    assert run(["wong-rosay", "--config", cfg("mobius.cfg"), "--out", str(tmp_path / "a"), "--quiet"]) == 0
    assert (tmp_path / "a" / "verdict.txt").read_text().startswith("PASS")
    assert run(["wong-rosay", "--config", cfg("rotation.cfg"), "--out", str(tmp_path / "b")]) == 1
    assert "no accumulation" in capsys.readouterr().out
    assert run(["compactness", "--config", cfg("bidisc.cfg"), "--out", str(tmp_path / "c"), "--quiet"]) == 0
    assert (tmp_path / "c" / "verdict.txt").read_text().startswith("NO_ACCUMULATION")
