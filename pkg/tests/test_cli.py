import math

import numpy as np
import pytest

from eikonal_shadow.cli import main
from eikonal_shadow.kernel import autocorrelation_value, kernel_value
from eikonal_shadow.tables import Table, read_table, write_table


def write_points(path, x, y):
    write_table(path, Table(["x", "y"], np.column_stack([x, y])))
    return str(path)


@pytest.fixture
def circle_file(tmp_path):
    t = np.linspace(0, math.pi, 31)
    return write_points(tmp_path / "circle.csv", np.cos(t), np.sin(t))


def test_denoise_defaults_and_header(tmp_path):
    out = tmp_path / "curve.csv"
    assert main(["denoise", "--out", str(out), "--M", "51"]) == 0
    tab = read_table(out)
    assert tab.columns == ["u", "x", "y", "dx", "dy", "d2x", "d2y"]
    assert len(tab) == 51
    for key in ("lam", "mu", "M", "total_travel_time", "seed", "noise"):
        assert key in tab.meta
    assert tab.meta["seed"] == "0"
    assert float(tab.meta["total_travel_time"]) == pytest.approx(tab.column("u")[-1])


def test_denoise_circle_has_unit_speed(tmp_path, circle_file):
    out = tmp_path / "c.csv"
    assert main(["denoise", "--input", circle_file, "--out", str(out), "--M", "41", "--lam", "1e-4"]) == 0
    tab = read_table(out)
    assert float(tab.meta["max_velocity_error"]) < 1e-3
    assert np.allclose(np.hypot(tab.column("dx"), tab.column("dy")), 1, atol=1e-3)


def test_denoise_is_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        assert main(["denoise", "--out", str(path), "--seed", "5"]) == 0
    assert a.read_bytes() == b.read_bytes()
    c = tmp_path / "c.csv"
    main(["denoise", "--out", str(c), "--seed", "6"])
    assert c.read_bytes() != a.read_bytes()


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("M = 21\nlam = 0.01\nt-max = 2.0\n")
    out = tmp_path / "o.csv"
    assert main(["denoise", "--config", str(cfg), "--out", str(out), "--lam", "0.02"]) == 0
    tab = read_table(out)
    assert len(tab) == 21
    assert float(tab.meta["lam"]) == 0.02
    assert float(tab.meta["t_max"]) == 2.0


def test_bad_config_value(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("M = many\n")
    assert main(["denoise", "--config", str(cfg), "--out", str(tmp_path / "o.csv")]) == 2
    assert "M" in capsys.readouterr().err


def test_malformed_row(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("# columns=x,y\n1,2\n3,4\n5\n")
    assert main(["denoise", "--input", str(bad), "--out", str(tmp_path / "o.csv")]) == 2
    assert "bad.csv:4" in capsys.readouterr().err


def test_too_few_points(tmp_path):
    path = write_points(tmp_path / "two.csv", [0.0, 1.0], [0.0, 1.0])
    assert main(["denoise", "--input", path, "--out", str(tmp_path / "o.csv")]) == 2


def test_missing_input_is_io_error(tmp_path):
    assert main(["denoise", "--input", str(tmp_path / "nope.csv"), "--out", str(tmp_path / "o.csv")]) == 4
    assert main(["march", "--input", str(tmp_path / "nope.csv"), "--out", str(tmp_path / "o.csv")]) == 4


def test_march_circle_without_regularisation(tmp_path, circle_file):
    curve = tmp_path / "c.csv"
    out = tmp_path / "f.csv"
    assert main(["denoise", "--input", circle_file, "--out", str(curve), "--M", "31", "--lam", "1e-4"]) == 0
    code = main(["march", "--input", str(curve), "--out", str(out), "--M", "31", "--N", "30",
                 "--xi", "0", "--nu", repr(math.pi / 2)])
    assert code == 0
    tab = read_table(out)
    assert tab.meta["rows_completed"] == "30" and tab.meta["divergence"] == "none"
    assert np.all(np.isfinite(tab.data))
    res = read_table(str(out) + ".residuals.csv")
    assert res.columns == ["v", "first_form", "orthogonality"] and len(res) == 28


def test_march_accepts_bare_points(tmp_path):
    t = np.linspace(0, math.pi, 25)
    path = write_points(tmp_path / "pts.csv", 2 * np.cos(t), 2 * np.sin(t))
    out = tmp_path / "f.csv"
    assert main(["march", "--input", path, "--out", str(out), "--M", "31", "--N", "5"]) == 0
    assert len(read_table(out)) == 31 * 5


def test_march_inflection_curve(tmp_path, capsys):
    x = np.linspace(-1, 1, 41)
    path = write_points(tmp_path / "s.csv", x, x**3)
    assert main(["march", "--input", path, "--out", str(tmp_path / "f.csv"), "--M", "31", "--N", "5"]) == 2
    assert "caustic assumption" in capsys.readouterr().err


def test_march_divergence_exit_code(tmp_path, circle_file, monkeypatch, capsys):
    from eikonal_shadow import marching

    monkeypatch.setattr(marching, "DIVERGENCE_GROWTH", 1.0001)
    curve = tmp_path / "c.csv"
    main(["denoise", "--input", circle_file, "--out", str(curve), "--M", "31"])
    out = tmp_path / "f.csv"
    assert main(["march", "--input", str(curve), "--out", str(out), "--M", "31", "--N", "60", "--xi", "0"]) == 3
    assert "diverged" in capsys.readouterr().err
    tab = read_table(out)
    assert tab.meta["divergence"] != "none"
    assert len(tab) == 31 * int(tab.meta["rows_completed"])


def test_oracle_tschirnhausen(tmp_path):
    out = tmp_path / "o.csv"
    assert main(["oracle", "tschirnhausen", "--out", str(out), "--s-count", "3", "--t-count", "9"]) == 0
    tab = read_table(out)
    assert tab.columns == ["x", "y", "u", "v", "t", "s"] and len(tab) == 27
    on_caustic = tab.data[tab.column("s") == 0]
    t = on_caustic[:, 4]
    assert np.allclose(on_caustic[:, 0], (1 - 3 * t**2) / 2, atol=1e-15)
    assert np.allclose(on_caustic[:, 1], t * (3 - t**2) / 2, atol=1e-15)
    assert tab.meta["seed"] == "0"


def test_oracle_catenary(tmp_path):
    out = tmp_path / "o.csv"
    assert main(["oracle", "catenary", "--out", str(out)]) == 0
    tab = read_table(out)
    v, mu = tab.column("v"), tab.column("mu")
    assert np.all(v[mu > 0] > 0) and np.all(v[mu == 0] == 0)
    flagged = tab.data[tab.column("singular") == 1]
    assert flagged.shape[0] == 1
    assert flagged[0, 4] == 0 and flagged[0, 5] == pytest.approx(math.pi / 2)
    assert main(["oracle", "catenary", "--out", str(out), "--mu-max", "2"]) == 2


def test_oracle_generic(tmp_path):
    out = tmp_path / "o.csv"
    assert main(["oracle", "generic", "--curve", "tschirnhausen", "--out", str(out), "--lam-count", "5", "--mu-count", "4"]) == 0
    tab = read_table(out)
    assert len(tab) == 15 and tab.meta["curve"] == "tschirnhausen"
    assert main(["oracle", "generic", "--curve", "ellipse", "--out", str(out)]) == 2


def test_compare_self_is_zero(tmp_path, capsys):
    out = tmp_path / "o.csv"
    main(["oracle", "tschirnhausen", "--out", str(out), "--s-count", "5", "--t-count", "11"])
    rep = tmp_path / "r.csv"
    assert main(["compare", str(out), str(out), "--out", str(rep)]) == 0
    tab = read_table(rep)
    assert float(tab.meta["max_distance"]) == 0 and float(tab.meta["max_dv"]) == 0
    assert int(tab.meta["matched"]) == 55
    assert "median_dv=0" in capsys.readouterr().out


def test_compare_disjoint(tmp_path, capsys):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    write_table(a, Table(["x", "y", "v"], [[0, 0, 0], [1, 0, 0.1]]))
    write_table(b, Table(["x", "y", "v"], [[10, 10, 0]]))
    assert main(["compare", str(a), str(b), "--out", str(tmp_path / "r.csv")]) == 2
    assert "within" in capsys.readouterr().err


def test_compare_rows_filter(tmp_path):
    a = tmp_path / "a.csv"
    write_table(a, Table(["x", "y", "v"], [[0, 0, 0], [0, 1, 0.1], [0, 2, 0.2]]))
    rep = tmp_path / "r.csv"
    assert main(["compare", str(a), str(a), "--rows", "2", "--out", str(rep)]) == 0
    tab = read_table(rep)
    assert int(tab.meta["matched"]) == 2 and list(tab.column("v")) == [0.0, 0.1]


def test_continue_constant(tmp_path):
    src = tmp_path / "h.csv"
    write_table(src, Table(["h"], np.full(11, 3.0)))
    out = tmp_path / "o.csv"
    assert main(["continue-analytic", "--input", str(src), "--out", str(out), "--lam", "0.5",
                 "--nx", "7", "--ny", "5"]) == 0
    tab = read_table(out)
    assert np.allclose(tab.column("re"), 2.0, atol=1e-12) and np.allclose(tab.column("im"), 0, atol=1e-12)
    assert tab.meta["discrepancy_ok"] == "1" and tab.meta["strip_energy_ok"] == "1"


def test_continue_minimal_and_with_abscissae(tmp_path):
    src = tmp_path / "h.csv"
    write_table(src, Table(["x", "h"], [[0.0, 1.0], [0.5, -1.0], [1.0, 0.5]]))
    out = tmp_path / "o.csv"
    assert main(["continue-analytic", "--input", str(src), "--out", str(out)]) == 0
    tab = read_table(out)
    assert tab.meta["N"] == "3" and len(tab) == 101 * 21


def test_continue_even_count(tmp_path, capsys):
    src = tmp_path / "h.csv"
    write_table(src, Table(["h"], np.ones(10)))
    assert main(["continue-analytic", "--input", str(src), "--out", str(tmp_path / "o.csv")]) == 2
    assert "drop one sample" in capsys.readouterr().err


def test_continue_uneven_abscissae(tmp_path):
    src = tmp_path / "h.csv"
    write_table(src, Table(["x", "h"], [[0.0, 1.0], [0.3, -1.0], [1.0, 0.5]]))
    assert main(["continue-analytic", "--input", str(src), "--out", str(tmp_path / "o.csv")]) == 2


def test_kernel_table(tmp_path):
    out = tmp_path / "k.csv"
    assert main(["kernel-table", "--out", str(out), "--x-min", "-2", "--x-max", "2", "--x-count", "5"]) == 0
    tab = read_table(out)
    assert tab.columns == ["x", "K", "K1", "K2", "L"]
    assert np.array_equal(tab.column("K"), kernel_value(tab.column("x")))
    assert np.array_equal(tab.column("L"), autocorrelation_value(tab.column("x")))
    assert main(["kernel-table", "--out", str(out), "--x-count", "0"]) == 2


def test_outputs_round_trip(tmp_path):
    out = tmp_path / "k.csv"
    main(["kernel-table", "--out", str(out)])
    tab = read_table(out)
    again = tmp_path / "k2.csv"
    write_table(again, tab)
    assert again.read_bytes() == out.read_bytes()


def test_module_entry_point():
    import subprocess
    import sys

    proc = subprocess.run([sys.executable, "-m", "eikonal_shadow", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "denoise" in proc.stdout
