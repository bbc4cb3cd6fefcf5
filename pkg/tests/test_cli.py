import json

import numpy as np
import pytest

from claytonrf.cli import main, read_csv, write_csv


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_csv_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    coords, vals, cov = rng.random((5, 2)), rng.random(5), rng.random((5, 2))
    write_csv(tmp_path / "d.csv", coords, vals, cov)
    c2, v2, k2 = read_csv(tmp_path / "d.csv")
    assert np.array_equal(c2, coords) and np.array_equal(v2, vals) and np.array_equal(k2, cov)


def test_read_csv_errors(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("x,y,z\n1,2,3\n")
    with pytest.raises(ValueError, match="value"):
        read_csv(bad)
    bad.write_text("x,y,value\n1,2,abc\n")
    with pytest.raises(ValueError, match="non-numeric"):
        read_csv(bad)


def test_simulate_then_fit(tmp_path, capsys):
    data = tmp_path / "field.csv"
    code, out, _ = run(capsys, "simulate", "--n", "80", "--marginal", "beta", "--nu", "2",
                       "--range", "0.4", "--seed", "3", "--out", str(data))
    assert code == 0 and json.loads(out)["n"] == 80
    coords, vals, cov = read_csv(data)
    assert coords.shape == (80, 2) and cov is None and np.all((vals > 0) & (vals < 1))

    res = tmp_path / "fit.json"
    code, out, _ = run(capsys, "fit", "--data", str(data), "--nu-grid", "1,2", "--out", str(res))
    assert code == 0
    fitted = json.loads(res.read_text())
    assert fitted["nu_selected"] in (1, 2)
    assert set(fitted["theta_hat"]) == {"xi", "delta", "b"}


def test_simulate_is_reproducible(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run(capsys, "simulate", "--n", "30", "--marginal", "beta-reg", "--seed", "5", "--out", str(a))
    run(capsys, "simulate", "--n", "30", "--marginal", "beta-reg", "--seed", "5", "--out", str(b))
    assert a.read_text() == b.read_text()
    assert read_csv(a)[2].shape == (30, 2)


def test_fit_rescales_bounded_support(tmp_path, capsys):
    data = tmp_path / "f.csv"
    run(capsys, "simulate", "--n", "60", "--marginal", "beta", "--seed", "1", "--out", str(data))
    coords, vals, _ = read_csv(data)
    write_csv(data, coords, 2 * vals - 1)
    conf = tmp_path / "conf.json"
    conf.write_text(json.dumps({"support": [-1, 1], "marginal": "beta"}))
    code, _, _ = run(capsys, "fit", "--data", str(data), "--config", str(conf),
                     "--out", str(tmp_path / "r.json"))
    assert code == 0


def test_fit_error_is_reported_as_json(tmp_path, capsys):
    data = tmp_path / "f.csv"
    write_csv(data, np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]), np.array([0.2, 1.5, 0.4]))
    code, _, err = run(capsys, "fit", "--data", str(data), "--out", str(tmp_path / "r.json"))
    assert code == 1
    assert json.loads(err)["error"] == "ValueError"


def test_density_grid_symmetric_at_nu_two(tmp_path, capsys):
    out = tmp_path / "dens.csv"
    code, _, _ = run(capsys, "density", "--nu", "2", "--rho", "0.6", "--grid", "12",
                     "--out", str(out))
    assert code == 0
    rows = np.loadtxt(out, delimiter=",", skiprows=1)
    grid = rows[:, 2].reshape(12, 12)
    np.testing.assert_allclose(grid, grid.T, rtol=1e-12)
    np.testing.assert_allclose(grid, grid[::-1, ::-1], rtol=1e-8)


def test_density_gaussian_margins(tmp_path, capsys):
    out = tmp_path / "dens.csv"
    code, _, _ = run(capsys, "density", "--nu", "1", "--grid", "9", "--transform",
                     "gaussian-margins", "--out", str(out))
    assert code == 0
    rows = np.loadtxt(out, delimiter=",", skiprows=1)
    assert rows.shape == (81, 4) and np.all(rows[:, 2:] > 0)


def test_variogram_and_corrcurve(tmp_path, capsys):
    data = tmp_path / "f.csv"
    run(capsys, "simulate", "--n", "50", "--seed", "2", "--out", str(data))
    sv = tmp_path / "sv.csv"
    code, out, _ = run(capsys, "variogram", "--data", str(data), "--bins", "5", "--out", str(sv))
    assert code == 0 and json.loads(out)["bins"] <= 5

    cc = tmp_path / "cc.csv"
    code, _, _ = run(capsys, "corrcurve", "--nu", "1,5", "--points", "11", "--out", str(cc))
    rows = np.loadtxt(cc, delimiter=",", skiprows=1)
    assert code == 0 and rows.shape == (11, 4)
    assert rows[0, 1] == 1.0 and rows[-1, 1] == 0.0
    assert np.all(rows[1:-1, 3] >= rows[1:-1, 2])
