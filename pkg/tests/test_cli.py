import json
import subprocess
import sys

import pytest

from hausdorff_choquet import cli
from hausdorff_choquet.cli import ConfigError, main, parse_config
from hausdorff_choquet.presets import PRESETS, preset_catalog
from hausdorff_choquet.runner import CaseResult, RunResult, validate_case

REQUIRED = {"corollary-1.1", "hardy-theorem", "hardy-epsilon", "adams-7a", "hedberg",
            "sjohn-pointwise", "poincare", "poincare-sobolev", "weak-type",
            "corollary-spire-poincare", "remark-ub-forms"}


def test_catalog_complete():
    names = {p.name for p in preset_catalog()}
    assert REQUIRED <= names and len(names) >= 11


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_preset_parameters_validate(name):
    for case in PRESETS[name].cases:
        validate_case(case)


def test_parse_key_value():
    cfg = parse_config("""
        # comment
        theorem = poincare
        domain = spire-1.5
        function.family = fourier
        function.seed = 3
        sweep.seed = 0, 1, 2
        delta = 2
        refine = true
    """)
    assert cfg["theorem"] == "poincare"
    assert cfg["function"] == {"family": "fourier", "seed": 3}
    assert cfg["sweep"]["seed"] == [0, 1, 2]
    assert cfg["delta"] == 2 and cfg["refine"] is True


def test_parse_json():
    assert parse_config('{"theorem": "hardy", "delta": 1.5}') == {"theorem": "hardy", "delta": 1.5}
    with pytest.raises(ConfigError):
        parse_config('{"theorem": ')
    with pytest.raises(ConfigError):
        parse_config("no equals sign here")


def _run(tmp_path, *argv):
    return main([*argv, "--quiet", "--out", str(tmp_path / "run")])


def test_exit_ok_and_outputs(tmp_path):
    assert _run(tmp_path, "check", "--preset", "hardy-pointwise", "--level", "5") == 0
    csv = (tmp_path / "run.csv").read_text()
    assert csv.splitlines()[0].startswith("theorem,domain,family,delta,kappa,p,q,s,")
    doc = json.loads((tmp_path / "run.json").read_text())
    assert doc["preset"] == "hardy-pointwise" and doc["passed"]
    assert (tmp_path / "run.dat").exists()


def test_unknown_field_names_it(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("theorem = hardy\nwobble = 3\n")
    assert _run(tmp_path, "check", "--config", str(cfg)) == 1
    assert "wobble" in capsys.readouterr().err


def test_unreadable_config(tmp_path, capsys):
    assert _run(tmp_path, "check", "--config", str(tmp_path / "missing.cfg")) == 1
    assert "cannot read" in capsys.readouterr().err


def test_bad_family_names_field(tmp_path, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("theorem = poincare\ndomain = spire-1.5\nfunction.family = spline\n")
    assert _run(tmp_path, "check", "--config", str(cfg)) == 1
    assert "function.family" in capsys.readouterr().err


def test_parameter_error_exit(tmp_path, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("theorem = poincare\ndomain = spire-1.5\nfunction.family = power\n"
                   "delta = 2\np = 1\nlevel = 4\n")
    assert _run(tmp_path, "check", "--config", str(cfg)) == 3
    assert "p=1" in capsys.readouterr().err


def test_custom_check_runs(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"theorem": "poincare", "domain": "spire-1.5",
                               "function": {"family": "fourier"}, "sweep": {"seed": [0, 1]},
                               "delta": 2.0, "p": 1.5, "level": 4}))
    assert _run(tmp_path, "check", "--config", str(cfg), "--refine") == 0
    rows = (tmp_path / "run.csv").read_text().splitlines()[1:]
    assert len(rows) == 4 and all(r.endswith(",true") for r in rows)


def test_failed_invariant_exit(tmp_path, monkeypatch):
    bad = RunResult("x", "x", 4, 0, False,
                    [CaseResult("c", "poincare", [], [], [], {}, False, ["ratio not finite"])])
    monkeypatch.setattr(cli, "run_preset", lambda *a, **k: bad)
    assert _run(tmp_path, "check", "--preset", "poincare") == 2


def test_check_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert main(["check", "--preset", "hedberg", "--level", "4", "--seed", "5", "--quiet",
                     "--out", str(out)]) == 0
    for ext in ("csv", "json", "dat"):
        assert (tmp_path / f"a.{ext}").read_bytes() == (tmp_path / f"b.{ext}").read_bytes()


def test_axioms_command(tmp_path):
    assert _run(tmp_path, "axioms", "--delta", "1.5", "--sets", "random:40", "--seed", "7") == 0


def test_axioms_bad_sets_spec(tmp_path):
    assert _run(tmp_path, "axioms", "--sets", "lots") == 1


def test_integrate_content_maximal(tmp_path):
    cfg = tmp_path / "f.cfg"
    cfg.write_text("domain = ball\nfunction.family = fourier\nlevel = 5\ndelta = 1, 2\np = 1, 2\n")
    assert _run(tmp_path, "integrate", "--config", str(cfg)) == 0
    assert len((tmp_path / "run.csv").read_text().splitlines()) == 5
    cfg.write_text("domain = box\nlevel = 5\ndelta = 2\n")
    assert _run(tmp_path, "content", "--config", str(cfg)) == 0
    row = (tmp_path / "run.csv").read_text().splitlines()[1].split(",")
    assert float(row[3]) == pytest.approx(0.25, rel=1e-12)
    cfg.write_text("domain = ball\nfunction.family = bump\nlevel = 5\nkappa = 0.5\nfield = gradient\n")
    assert _run(tmp_path, "maximal", "--config", str(cfg)) == 0


def test_content_from_set_file(tmp_path):
    from hausdorff_choquet.grid import GridGeometry, GridSet
    e = GridSet.dyadic_cube(GridGeometry(2, 4), 1, (0, 0))
    (tmp_path / "e.txt").write_text(e.to_text())
    cfg = tmp_path / "c.cfg"
    cfg.write_text(f"set = {tmp_path / 'e.txt'}\ndelta = 1\n")
    assert _run(tmp_path, "content", "--config", str(cfg)) == 0
    assert float((tmp_path / "run.csv").read_text().splitlines()[1].split(",")[3]) == pytest.approx(0.5)


def test_presets_listing(capsys):
    assert main(["presets"]) == 0
    out = capsys.readouterr().out
    assert all(name in out for name in REQUIRED)


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "hausdorff_choquet", "presets"],
                       capture_output=True, text=True, check=False)
    assert r.returncode == 0 and "corollary-1.1" in r.stdout
