"""Figure pipeline tests: schema validation, rendering, captions."""

import json
import os

import pytest

from bolab_figures.cli import main
from bolab_figures.render import FIGURE_KINDS, FigureSpec, render, \
    render_all
from bolab_figures.schema import SchemaError, file_hash, read_report, \
    read_table


def _write(path, text):
    path.write_text(text)
    return str(path)


A2_CSV = (
    "beta,weight_kind,level,constant,classification\n"
    "0.2,angle,0,1.1,finite\n"
    "0.2,angle,1,1.2,finite\n"
    "0.6,angle,0,9.0,divergent\n"
    "0.6,angle,1,90.0,divergent\n"
)

NORM_CSV = (
    "t,s,r,sobolev,weighted,combined,mean_mode,first_moment\n"
    "0.0,1.0,1.0,1.0,1.1,1.5,0.5,0.0\n"
    "0.5,1.0,1.0,1.0,1.2,1.6,0.5,0.1\n"
)

REPORT_JSON = json.dumps({
    "family": "gaussian",
    "ladder": [[256, 16.0], [512, 32.0]],
    "entries": [
        {"r": 2.0, "s": 0.0, "verdict": "PERSISTS",
         "norms_sq": [1.0, 1.01]},
        {"r": 2.6, "s": 0.0, "verdict": "DIVERGES",
         "norms_sq": [1.0, 2.4]},
    ],
})


# schema -------------------------------------------------------------------

def test_read_table_valid(tmp_path):
    rows = read_table(_write(tmp_path / "a2_scan.csv", A2_CSV))
    assert len(rows) == 4
    assert rows[0]["beta"] == 0.2
    assert rows[2]["classification"] == "divergent"


def test_read_table_missing_column_named(tmp_path):
    bad = A2_CSV.replace("constant", "konstant")
    with pytest.raises(SchemaError) as info:
        read_table(_write(tmp_path / "a2_scan.csv", bad))
    assert "'constant'" in str(info.value)


def test_read_table_non_numeric_cell_named(tmp_path):
    bad = A2_CSV.replace("1.1", "eleven")
    with pytest.raises(SchemaError) as info:
        read_table(_write(tmp_path / "a2_scan.csv", bad))
    assert "'constant'" in str(info.value)
    assert "eleven" in str(info.value)


def test_read_table_empty_file(tmp_path):
    with pytest.raises(SchemaError):
        read_table(_write(tmp_path / "a2_scan.csv", ""))


def test_read_table_unknown_artifact(tmp_path):
    with pytest.raises(SchemaError):
        read_table(_write(tmp_path / "mystery.csv", "a,b\n1,2\n"))


def test_read_report_missing_field(tmp_path):
    bad = json.dumps({"family": "gaussian", "ladder": []})
    with pytest.raises(SchemaError) as info:
        read_report(_write(tmp_path / "persistence_report.json", bad))
    assert "entries" in str(info.value)


# rendering ----------------------------------------------------------------

def test_render_a2_curve(tmp_path):
    src = _write(tmp_path / "a2_scan.csv", A2_CSV)
    out = tmp_path / "fig.png"
    caption = render(FigureSpec("a2-curve", src, str(out)))
    assert out.exists() and out.stat().st_size > 0
    assert file_hash(src)[:16] in caption


def test_render_missing_input_no_data_panel(tmp_path):
    out = tmp_path / "fig.png"
    caption = render(FigureSpec("shape-error",
                                str(tmp_path / "shape_error.csv"),
                                str(out)))
    assert out.exists()
    assert "no data" in caption


def test_render_empty_series_no_data_panel(tmp_path):
    src = _write(tmp_path / "norm_series.csv", NORM_CSV.splitlines()[0]
                 + "\n")
    out = tmp_path / "fig.png"
    caption = render(FigureSpec("norm-series", src, str(out)))
    assert out.exists()
    assert "no data" in caption


def test_render_unknown_kind(tmp_path):
    with pytest.raises(SchemaError):
        render(FigureSpec("heatmap", "x.csv", str(tmp_path / "f.png")))


def test_render_uses_manifest_hash_when_present(tmp_path):
    src = _write(tmp_path / "norm_series.csv", NORM_CSV)
    manifest = {"outputs": {"norm_series.csv": "f" * 64}}
    _write(tmp_path / "solve_manifest.json", json.dumps(manifest))
    caption = render(FigureSpec("norm-series", src,
                                str(tmp_path / "fig.png")))
    assert "f" * 16 in caption


# render-all / CLI ---------------------------------------------------------

def test_render_all_complete_set(tmp_path):
    in_dir = tmp_path / "in"
    in_dir.mkdir()
    _write(in_dir / "a2_scan.csv", A2_CSV)
    _write(in_dir / "norm_series.csv", NORM_CSV)
    _write(in_dir / "persistence_report.json", REPORT_JSON)
    out_dir = tmp_path / "out"
    captions = render_all(str(in_dir), str(out_dir))
    assert len(captions) == len(FIGURE_KINDS)
    for name in captions:
        assert (out_dir / name).exists()
    sidecar = json.loads((out_dir / "captions.json").read_text())
    assert sidecar == captions
    # absent artifacts became explicit no-data panels, never omissions
    assert "no data" in captions["smoothing_budget.png"]


def test_cli_exit_codes(tmp_path):
    in_dir = tmp_path / "in"
    in_dir.mkdir()
    _write(in_dir / "a2_scan.csv", A2_CSV)
    code = main(["render-all", "--in", str(in_dir),
                 "--out", str(tmp_path / "out"), "--quiet"])
    assert code == 0
    bad = A2_CSV.replace("beta", "zeta")
    _write(in_dir / "a2_scan.csv", bad)
    code = main(["render-all", "--in", str(in_dir),
                 "--out", str(tmp_path / "out2"), "--quiet"])
    assert code == 2


def test_render_deterministic_content(tmp_path):
    src = _write(tmp_path / "a2_scan.csv", A2_CSV)
    p1 = tmp_path / "a.png"
    p2 = tmp_path / "b.png"
    render(FigureSpec("a2-curve", src, str(p1)))
    render(FigureSpec("a2-curve", src, str(p2)))
    assert p1.read_bytes() == p2.read_bytes()
