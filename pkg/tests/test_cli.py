import csv
import json

import pytest

from magnomech.cli import main
from magnomech.config import ConfigError, load_config


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def table(text):
    return dict(line.rsplit(None, 1) if line.count(" ") else (line, "") for line in text.splitlines())


def test_derive_defaults(capsys):
    code, out, _ = run(capsys, "derive")
    assert code == 0
    assert "coupling_mode" in out and "physical" in out
    t = table(out)
    assert float(t["g_mb_eff/2pi [Hz]"]) == pytest.approx(3.2e6, rel=0.05)
    assert float(t["n_therm_b"]) == pytest.approx(20.3406, rel=1e-5)
    assert t["low_excitation_ok"] == "yes" and t["kerr_ok"] == "yes"


def test_derive_direct_mode_has_no_drive_quantities(capsys):
    code, out, _ = run(capsys, "derive", "--coupling-mode", "direct")
    assert code == 0
    t = table(out)
    assert t["rabi_omega [rad/s]"] == "n/a" and t["kerr_ratio"] == "n/a"


def test_derive_writes_csv(capsys, tmp_path):
    code, _, _ = run(capsys, "derive", "--out", str(tmp_path))
    assert code == 0
    rows = list(csv.reader(open(tmp_path / "derive.csv")))
    assert rows[0] == ["quantity", "value"]


def test_stability_exit_codes(capsys):
    assert run(capsys, "stability")[0] == 0
    code, out, _ = run(capsys, "stability", "--coupling-mode", "direct",
                       "--delta-a-hz=9e6", "--delta-m-eff-hz=-9e6")
    assert code == 4
    assert table(out)["stable"] == "no"


def test_entangle_defaults(capsys):
    code, out, _ = run(capsys, "entangle")
    assert code == 0
    t = table(out)
    assert float(t["e_am"]) == pytest.approx(0.116579, rel=1e-4)
    assert float(t["r_min"]) > 0 and t["genuine_tripartite"] == "yes"
    assert float(t["lyapunov_residual"]) < 1e-10


def test_entangle_without_phonon_coupling(capsys):
    code, out, _ = run(capsys, "entangle", "--coupling-mode", "direct", "--g-mb-eff-hz", "0")
    assert code == 0
    t = table(out)
    for key in ("e_am", "e_mb", "e_ab"):
        assert abs(float(t[key])) < 1e-12


def test_entangle_hot_bath_is_separable(capsys):
    code, out, _ = run(capsys, "entangle", "--temperature", "1")
    assert code == 0
    t = table(out)
    assert float(t["e_am"]) == 0 and float(t["e_mb"]) == 0 and float(t["e_ab"]) == 0


def test_entangle_unstable(capsys):
    code, _, err = run(capsys, "entangle", "--coupling-mode", "direct",
                       "--delta-a-hz=9e6", "--delta-m-eff-hz=-9e6")
    assert code == 4 and "no steady state" in err


def test_validate(capsys):
    assert run(capsys, "validate")[0] == 0
    code, out, _ = run(capsys, "validate", "--b0", "3.9e-3")
    assert code == 7 and "FAIL" in out
    assert run(capsys, "validate", "--coupling-mode", "direct")[0] == 3


def test_config_errors(capsys, tmp_path):
    assert run(capsys, "derive", "--kappa-a-hz=-1")[0] == 2
    code, _, err = run(capsys, "derive", "--set", "bogus=1")
    assert code == 2 and "bogus" in err
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "derive", "--config", str(bad))[0] == 2
    assert run(capsys, "reproduce")[0] == 2
    assert run(capsys, "nonsense")[0] == 2
    assert run(capsys, "sweep")[0] == 2


def test_precedence(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"temperature": 0.05, "kappa_a_hz": 2e6, "workers": 2}))
    cfg = load_config("derive", str(path), ["temperature=0.07"], {"kappa_a_hz": 3e6}, environ={})
    assert cfg.values["temperature"] == 0.07
    assert cfg.values["kappa_a_hz"] == 3e6
    assert cfg.workers == 2
    cfg = load_config("derive", None, ["thresholds.kerr=0.5"], environ={"MAGNOMECH_WORKERS": "4"})
    assert cfg.thresholds["kerr"] == 0.5 and cfg.workers == 4
    with pytest.raises(ConfigError):
        load_config("derive", None, ["thresholds.nope=1"], environ={})


def test_sweep_command(capsys, tmp_path):
    cfg = {
        "coupling_mode": "direct",
        "sweep": {"axes": [{"name": "delta_a", "min": -2e7, "max": 0, "points": 5}], "outputs": ["e_am", "r_min"]},
    }
    path = tmp_path / "s.json"
    path.write_text(json.dumps(cfg))
    code, out, _ = run(capsys, "sweep", "--config", str(path), "--out", str(tmp_path))
    assert code == 0
    rows = list(csv.reader(open(tmp_path / "sweep.csv")))
    assert rows[0] == ["delta_a", "stable", "e_am", "r_min"]
    assert [float(r[0]) for r in rows[1:]] == [-2e7, -1.5e7, -1e7, -5e6, 0.0]


def test_reproduce_fig3b(capsys, tmp_path):
    code, _, _ = run(capsys, "reproduce", "--figure", "fig3b", "--out", str(tmp_path))
    assert code == 0
    first = (tmp_path / "fig3b.csv").read_bytes()
    rows = list(csv.reader(first.decode().splitlines()))
    assert rows[0] == ["delta_a", "stable", "r_min"]
    assert len(rows) == 102
    meta = json.loads((tmp_path / "fig3b.meta.json").read_text())
    assert meta["figure"] == "fig3b"
    assert meta["columns"] == rows[0]
    assert meta["axes"][0]["unit"] == "Hz" and meta["axes"][0]["points"] == 101
    assert meta["summary"]["measures"]["r_min"]["max"] > 0.04
    meta_bytes = (tmp_path / "fig3b.meta.json").read_bytes()
    assert run(capsys, "reproduce", "--figure", "fig3b", "--out", str(tmp_path))[0] == 0
    assert (tmp_path / "fig3b.csv").read_bytes() == first
    assert (tmp_path / "fig3b.meta.json").read_bytes() == meta_bytes


def test_reproduce_fig3a_columns(capsys, tmp_path):
    assert run(capsys, "reproduce", "--figure", "fig3a", "--out", str(tmp_path))[0] == 0
    header = (tmp_path / "fig3a.csv").read_text().splitlines()[0]
    assert header == "delta_a,stable,e_am,e_mb,e_ab"


def test_reproduce_io_error(capsys, tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    code, _, err = run(capsys, "reproduce", "--figure", "fig3b", "--out", str(blocker))
    assert code == 6 and "cannot write" in err
