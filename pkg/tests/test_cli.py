import json
import math

import pytest

from minnaert import cli
from minnaert.config import ConfigError, build_config, parse_config, serialize_config
from minnaert.output import ResultTable, emit_csv, emit_svg_scatter, read_csv


def _write(tmp_path, data, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data), encoding="utf-8")
    return path


# --- configuration -------------------------------------------------------------

def test_defaults_applied():
    cfg = parse_config('{"experiment": "table1"}')
    assert cfg.n == 512 and cfg.tol == 1e-10 and cfg.max_iter == 100
    assert cfg.deltas == [1e-1, 1e-2, 1e-3, 1e-4, 1e-5]
    assert cfg.distance_convention == "gap"
    t2 = parse_config('{"experiment": "table2"}')
    assert t2.materials == {"rho": 1000.0, "kappa": 1000.0, "rho_b": 1.1, "kappa_b": 0.1}
    assert t2.distances == [10.0, 100.0]


def test_negative_radius_names_field():
    with pytest.raises(ConfigError) as info:
        parse_config('{"experiment": "table1", "radius": -1}')
    assert info.value.key == "radius" and "radius" in str(info.value)
    with pytest.raises(ConfigError) as info:
        parse_config('{"experiment": "table1", "geometry": {"type": "circle", "center": [0, 0], "radius": -1}}')
    assert "radius" in str(info.value)


def test_unknown_key_rejected():
    with pytest.raises(ConfigError) as info:
        parse_config('{"experiment": "table1", "deltaz": [0.1]}')
    assert info.value.key == "deltaz"


def test_empty_omega_grid_rejected():
    with pytest.raises(ConfigError) as info:
        build_config({"experiment": "scatter_sweep", "delta": 1e-3, "omegas": []})
    assert info.value.key == "omegas"


def test_json_error_location():
    with pytest.raises(ConfigError, match="line 1"):
        parse_config('{"experiment": }')


@pytest.mark.parametrize("data", [
    {"experiment": "table1"},
    {"experiment": "table2", "distances": [0.1, 10], "distance_convention": "center", "cross_delta": True},
    {"experiment": "scatter_sweep", "delta": 1e-3, "omegas": [0.01, 0.02], "direction": [0, 1]},
    {"experiment": "spectrum_map", "geometry": {"type": "ellipse", "center": [0, 0], "semi_axes": [2, 1]},
     "delta": 1e-2, "omega_re": [0.05], "omega_im": [-0.01, 0]},
])
def test_config_round_trip(data):
    cfg = build_config(data)
    assert parse_config(serialize_config(cfg)) == cfg


def test_hash_ignores_output_dir_and_tracks_content():
    a = build_config({"experiment": "table1", "output_dir": "x"})
    b = build_config({"experiment": "table1", "output_dir": "y"})
    c = build_config({"experiment": "table1", "n": 256})
    assert a.config_hash() == b.config_hash() != c.config_hash()


# --- output ----------------------------------------------------------------------

def test_single_row_csv_has_two_lines(tmp_path):
    table = ResultTable(("a", "b"))
    table.add_row(1.5, 2)
    path = emit_csv(table, tmp_path / "t.csv")
    assert path.read_text(encoding="utf-8").splitlines() == ["a,b", "1.5,2"]


def test_csv_round_trip_bit_exact(tmp_path):
    values = [math.pi, 1 / 3, 1e-300, -2.5e17, 0.1 + 0.2]
    table = ResultTable(("x", "z"))
    for v in values:
        table.add_row(v, complex(v, -v / 7))
    path = emit_csv(table, tmp_path / "t.csv")
    header, rows = read_csv(path)
    assert header == ["x", "z_re", "z_im"]
    for v, row in zip(values, rows):
        assert float(row[0]) == v
        assert complex(float(row[1]), float(row[2])) == complex(v, -v / 7)


def test_svg_empty_table_writes_nothing(tmp_path):
    path = tmp_path / "empty.svg"
    with pytest.raises(ValueError):
        emit_svg_scatter(ResultTable(("a", "b")), "a", "b", path)
    assert not path.exists()


def test_svg_unknown_column(tmp_path):
    table = ResultTable(("a", "b"))
    table.add_row(1.0, 2.0)
    with pytest.raises(KeyError):
        emit_svg_scatter(table, "a", "c", tmp_path / "t.svg")
    assert not (tmp_path / "t.svg").exists()


def test_svg_is_standalone(tmp_path):
    table = ResultTable(("a", "b"), metadata={"config_hash": "abc"})
    for i in range(1, 5):
        table.add_row(float(i), float(i * i))
    text = emit_svg_scatter(table, "a", "b", tmp_path / "t.svg", log_y=True).read_text()
    assert text.startswith("<?xml") and "abc" in text and "href" not in text


# --- command line -------------------------------------------------------------------

def test_formula3d_command(tmp_path, capsys):
    code = cli.main(["formula3d", "--cap", str(4 * math.pi), "--vol", str(4 * math.pi / 3),
                     "--tau", "1", "--v", "1", "--delta", "1e-4", "--out", str(tmp_path)])
    assert code == cli.EXIT_OK
    summary = json.loads(capsys.readouterr().out)
    header, rows = read_csv(tmp_path / "formula3d.csv")
    w00 = complex(float(rows[0][header.index("omega00_re")]), float(rows[0][header.index("omega00_im")]))
    assert abs(w00 - (math.sqrt(3) * 1e-2 - 1.5e-4j)) < 1e-15
    meta = json.loads((tmp_path / "formula3d.csv.meta.json").read_text())
    assert meta["config_hash"] == summary["config_hash"]


def test_deterministic_output(tmp_path):
    cfg = {"experiment": "spectrum_map", "delta": 1e-2, "n": 32,
           "omega_re": [0.05, 0.07], "omega_im": [-0.02, 0.0]}
    path = _write(tmp_path, cfg)
    outputs = []
    for name in ("a", "b"):
        assert cli.main(["spectrum-map", "--config", str(path), "--out", str(tmp_path / name)]) == 0
        outputs.append((tmp_path / name / "spectrum_map.csv").read_bytes())
        svg = (tmp_path / name / "spectrum_map.svg").read_text()
        assert build_config(cfg).config_hash() in svg
    assert outputs[0] == outputs[1]


def test_changed_config_changes_hash(tmp_path):
    hashes = []
    for n in (32, 48):
        cfg = {"experiment": "spectrum_map", "delta": 1e-2, "n": n, "omega_re": [0.05], "omega_im": [0.0]}
        out = tmp_path / str(n)
        assert cli.main(["spectrum-map", "--config", str(_write(tmp_path, cfg)), "--out", str(out), "--no-svg"]) == 0
        hashes.append(json.loads((out / "spectrum_map.csv.meta.json").read_text())["config_hash"])
        assert not (out / "spectrum_map.svg").exists()
    assert hashes[0] != hashes[1]


def test_exit_code_config_error(tmp_path, capsys):
    path = _write(tmp_path, {"experiment": "table1", "radius": -1})
    assert cli.main(["table1", "--config", str(path)]) == cli.EXIT_CONFIG
    assert "radius" in capsys.readouterr().err
    assert cli.main(["table1", "--config", str(tmp_path / "missing.json")]) == cli.EXIT_CONFIG
    other = _write(tmp_path, {"experiment": "table2"}, "t2.json")
    assert cli.main(["table1", "--config", str(other)]) == cli.EXIT_CONFIG


def test_exit_code_solver_error(tmp_path):
    # one Muller iteration cannot reach the tolerance
    path = _write(tmp_path, {"experiment": "table1", "deltas": [1e-2], "n": 32, "max_iter": 1, "tol": 1e-15})
    assert cli.main(["table1", "--config", str(path), "--out", str(tmp_path)]) == cli.EXIT_SOLVER


def test_exit_code_io_error(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    path = _write(tmp_path, {"experiment": "spectrum_map", "delta": 1e-2, "n": 32,
                             "omega_re": [0.05], "omega_im": [0.0]})
    assert cli.main(["spectrum-map", "--config", str(path), "--out", str(blocker / "sub")]) == cli.EXIT_IO


def test_distance_convention_flag(tmp_path):
    path = _write(tmp_path, {"experiment": "table2"})
    args = cli.build_parser().parse_args(["table2", "--config", str(path), "--distance-convention", "center",
                                          "--n", "64"])
    cfg = cli.load_config(args)
    assert cfg.distance_convention == "center" and cfg.n == 64


def test_table1_small_run(tmp_path):
    path = _write(tmp_path, {"experiment": "table1", "deltas": [1e-2, 1e-3], "n": 64})
    assert cli.main(["table1", "--config", str(path), "--out", str(tmp_path)]) == 0
    header, rows = read_csv(tmp_path / "table1.csv")
    errs = [float(r[header.index("relative_error_percent")]) for r in rows]
    assert errs[0] > errs[1]
