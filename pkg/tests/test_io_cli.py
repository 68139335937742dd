import json
import logging

import numpy as np
import pytest

from hitchin_glue.cli import main, parse_range
from hitchin_glue.errors import CacheCorrupt, InvalidConfig
from hitchin_glue.io import SolutionCache, solution_from_record, solution_to_record
from hitchin_glue.toda import SolverConfig


def test_cache_roundtrip(tmp_path, toda, config):
    cache = SolutionCache(tmp_path)
    assert cache.lookup(2, config) is None
    cache.store(toda[2])
    hit = cache.lookup(2, config)
    np.testing.assert_array_equal(hit.u, toda[2].u)
    np.testing.assert_array_equal(hit.r, toda[2].r)
    assert hit.residual_norm == toda[2].residual_norm
    assert cache.lookup(2, SolverConfig(tolerance=1e-9)) is None
    assert cache.lookup(3, config) is None


def test_cache_corrupt_entry(tmp_path, toda, config, caplog):
    cache = SolutionCache(tmp_path)
    cache.path(2, config).write_text("{not json")
    with caplog.at_level(logging.WARNING):
        assert cache.lookup(2, config) is None
    assert "unreadable" in caplog.text
    with pytest.raises(CacheCorrupt):
        cache.lookup(2, config, strict=True)


def test_record_schema_checked(toda):
    rec = solution_to_record(toda[2])
    rec["schema_version"] = 99
    with pytest.raises(CacheCorrupt):
        solution_from_record(rec)
    rec = solution_to_record(toda[2])
    rec["config"]["tolerance"] = 1e-3
    with pytest.raises(CacheCorrupt):
        solution_from_record(rec)


def test_config_digest_distinguishes():
    assert SolverConfig().digest() == SolverConfig().digest()
    assert SolverConfig().digest() != SolverConfig(grid_size=2001).digest()


@pytest.mark.parametrize("text,expected", [
    ("2:10:2", [2, 4, 6, 8, 10]),
    ("0.5:1:0.25", [0.5, 0.75, 1.0]),
    ("1,2,4", [1, 2, 4]),
])
def test_parse_range(text, expected):
    assert parse_range(text) == pytest.approx(expected)


@pytest.mark.parametrize("text", ["1:2", "3:1:1", "1:3:0", "2,1", "0,1", ""])
def test_parse_range_rejects(text):
    with pytest.raises(InvalidConfig):
        parse_range(text)


def run(capsys, *argv):
    code = main(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def test_cli_solve_toda(tmp_path, capsys):
    code, _, _ = run(capsys, "solve-toda", "--K", "3", "--out", str(tmp_path), "--cache", str(tmp_path / "c"))
    assert code == 0
    rec = json.loads((tmp_path / "toda_K3.json").read_text())
    assert rec["K"] == 3 and rec["residual_norm"] <= 1e-10
    header = (tmp_path / "toda_K3.csv").read_text().splitlines()[0]
    assert header == "r,u_1,u_2,u_3"


def test_cli_cache_hit_is_identical(tmp_path, capsys):
    cache = str(tmp_path / "cache")
    for name in ("cold", "warm"):
        assert run(capsys, "model", "--partition", "2,1", "--t", "3", "--out", str(tmp_path / name),
                   "--cache", cache)[0] == 0
    for f in ("metric_model.csv", "metric_approx.csv", "field_samples.csv"):
        assert (tmp_path / "cold" / f).read_bytes() == (tmp_path / "warm" / f).read_bytes()


def test_cli_error_sweep(tmp_path, capsys):
    code, out, _ = run(capsys, "error-sweep", "--partition", "2", "--t", "2:10:2",
                       "--out", str(tmp_path), "--no-cache")
    assert code == 0
    rep = json.loads((tmp_path / "decay_report.json").read_text())
    assert rep["delta"] > 0 and len(rep["t_values"]) == 5
    assert out.startswith("delta=")


def test_cli_indicial(tmp_path, capsys):
    code, _, _ = run(capsys, "indicial", "--partition", "2,1,1", "--J", "2", "--out", str(tmp_path))
    assert code == 0
    assert (tmp_path / "indicial_roots.csv").exists()


@pytest.mark.parametrize("counts,verdict", [(["--N2", "4"], "VALID"), (["--N2", "3"], "INVALID")])
def test_cli_strata(tmp_path, capsys, counts, verdict):
    code, out, _ = run(capsys, "strata", "--n", "2", "--g", "2", *counts, "--out", str(tmp_path))
    assert code == 0 and out.strip() == verdict
    assert json.loads((tmp_path / "strata.json").read_text())["valid"] == (verdict == "VALID")


@pytest.mark.parametrize("argv,code", [
    (["bogus"], 2),
    (["solve-toda"], 2),
    (["solve-toda", "--K", "1"], 2),
    (["model", "--partition", "0"], 2),
    (["solve-toda", "--K", "2", "--grid-size", "4000", "--no-cache"], 3),
])
def test_cli_exit_codes(tmp_path, capsys, argv, code):
    got, _, err = run(capsys, *argv, "--out", str(tmp_path))
    assert got == code
    assert "error" in json.loads(err.strip().splitlines()[-1])


def test_cli_deterministic(tmp_path, capsys):
    for name in ("a", "b"):
        run(capsys, "indicial", "--partition", "3,2,1", "--J", "2", "--out", str(tmp_path / name))
    assert (tmp_path / "a" / "indicial.json").read_bytes() == (tmp_path / "b" / "indicial.json").read_bytes()
