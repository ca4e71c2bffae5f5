import csv
import json

import pytest

from itemkit import default_catalog, generate_base
from itemkit.catalog import serialize_catalog
from itemkit.cli import main
from itemkit.synthgen import DAY, GenSpec

from test_acceptance import BURST_AT, BURST_WINDOW, burst_fixture


def _write(path, text):
    path.write_text(text)
    return str(path)


@pytest.fixture
def tri(tmp_path):
    return _write(tmp_path / "tri.txt", "a b 1\nb c 2\nc a 3\n")


def _analyze(tmp_path, *extra, name="tri"):
    out = tmp_path / "out"
    code = main(["analyze", *extra, "--out", str(out), "--threads", "1"])
    return code, out / f"{name}.report.json"


def test_triangle_report(tmp_path, tri):
    code, path = _analyze(tmp_path, "--input", tri)
    rep = json.loads(path.read_text())
    assert code == 0
    assert rep["motifs"]["m5"]["item_count"] == 1
    assert rep["residual_count"] == 0
    assert rep["schema_version"] == 1
    assert rep["catalog"]["hash"] == default_catalog().digest()
    assert rep["config"]["seed"] == 0 and "threads" not in rep["config"]
    assert len(rep["feature_vector"]["values"]) == 120
    assert rep["motifs"]["m5"]["item_count_log10"] == pytest.approx(0.30103, abs=1e-5)
    assert (path.parent / "tri.timing.json").exists()


def test_empty_input(tmp_path):
    src = _write(tmp_path / "empty.txt", "")
    code, path = _analyze(tmp_path, "--input", src, name="empty")
    rep = json.loads(path.read_text())
    assert code == 0
    assert not any(rep["feature_vector"]["values"])
    assert all(m["item_count"] == 0 for m in rep["motifs"].values())


def test_reports_are_byte_identical(tmp_path, tri):
    _, a = _analyze(tmp_path, "--input", tri)
    first = a.read_bytes()
    _, b = _analyze(tmp_path, "--input", tri)
    assert b.read_bytes() == first


def test_csv_report(tmp_path, tri):
    code, _ = _analyze(tmp_path, "--input", tri, "--format", "csv")
    rows = list(csv.DictReader(open(tmp_path / "out" / "tri.report.csv")))
    assert code == 0 and len(rows) == 15
    assert {r["motif"]: r["item_count"] for r in rows}["m5"] == "1"


def test_exit_codes(tmp_path, tri):
    assert main(["analyze", "--input", str(tmp_path / "missing.txt"), "--out", str(tmp_path)]) == 2
    bad = _write(tmp_path / "bad.txt", "a b c\n")
    assert main(["analyze", "--input", bad, "--out", str(tmp_path)]) == 2
    assert main(["analyze", "--input", tri, "--delta", "0", "--out", str(tmp_path)]) == 1
    assert main(["analyze", "--input", tri, "--search-order", "m5,m15", "--out", str(tmp_path)]) == 1
    with pytest.raises(SystemExit) as err:
        main(["analyze", "--no-such-flag"])
    assert err.value.code == 1
    many = _write(tmp_path / "many.txt", "".join(f"a b {t}\n" for t in range(20)))
    assert main(["analyze", "--input", many, "--max-instances", "5", "--out", str(tmp_path)]) == 3
    assert main(["analyze", "--input", many, "--mode", "exact", "--out", str(tmp_path)]) == 3


def test_windows_single_window(tmp_path, tri):
    out = tmp_path / "w"
    assert main(["windows", "--input", tri, "--window-count", "1", "--out", str(out)]) == 0
    flags = json.loads((out / "tri.flags.json").read_text())
    rows = list(csv.DictReader(open(out / "tri.series.csv")))
    assert len(rows) == 1 and flags["flagged"] == []


def test_windows_sampling_records_provenance(tmp_path):
    g = generate_base(GenSpec(n=50, p=2000 / (50 * DAY), seed=2))
    src = tmp_path / "g.txt"
    with open(src, "w") as fh:
        g.write_edge_list(fh)
    out = tmp_path / "w"
    assert main(["windows", "--input", str(src), "--window-count", "10", "--sample-fraction", "0.5",
                 "--out", str(out), "--threads", "1"]) == 0
    flags = json.loads((out / "g.flags.json").read_text())
    assert flags["windows"]["t_x"] == 5
    assert flags["windows"]["estimator_form"] == "mean_over_selected_windows"


def test_windows_flags_burst(tmp_path):
    src = tmp_path / "burst.txt"
    with open(src, "w") as fh:
        burst_fixture(0).write_edge_list(fh)
    out = tmp_path / "w"
    assert main(["windows", "--input", str(src), "--window-duration", str(BURST_WINDOW),
                 "--out", str(out), "--threads", "1"]) == 0
    assert json.loads((out / "burst.flags.json").read_text())["flagged"] == [BURST_AT]


def test_compare_self_is_zero(tmp_path, tri):
    out = tmp_path / "c"
    assert main(["compare", "--input", tri, tri, "--out", str(out)]) == 0
    rows = list(csv.reader(open(out / "matrix.csv")))
    assert float(rows[1][2]) == 0.0


def test_compare_reports_and_mismatch(tmp_path, tri):
    _analyze(tmp_path, "--input", tri)
    report = tmp_path / "out" / "tri.report.json"
    other = tmp_path / "other.json"
    rep = json.loads(report.read_text())
    rep["catalog"]["hash"] = "0" * 64
    other.write_text(json.dumps(rep))
    assert main(["compare", "--input", str(report), str(report), "--out", str(tmp_path / "c")]) == 0
    assert main(["compare", "--input", str(report), str(other), "--out", str(tmp_path / "c")]) == 1


def test_compare_custom_catalog_against_default(tmp_path, tri):
    cat_file = tmp_path / "cat.txt"
    cat = default_catalog()
    cat_file.write_text(serialize_catalog(cat.reordered(["m1", "m2", "m3", "m4", "m5", "m6", "m7", "m8",
                                                         "m9", "m10", "m11", "m12", "m13", "m14", "m15"])))
    main(["analyze", "--input", tri, "--out", str(tmp_path / "a")])
    main(["analyze", "--input", tri, "--catalog", str(cat_file), "--out", str(tmp_path / "b")])
    code = main(["compare", "--input", str(tmp_path / "a" / "tri.report.json"),
                 str(tmp_path / "b" / "tri.report.json"), "--out", str(tmp_path / "c")])
    assert code == 1


def test_compare_gap_curve(tmp_path):
    out = tmp_path / "gen"
    assert main(["generate", "--p", str(1000 / (100 * DAY)), "--variants", "3", "--out", str(out)]) == 0
    files = [str(out / f"G_{i}.txt") for i in range(4)]
    assert main(["compare", "--input", *files, "--stretch", "0,1,2,3", "--out", str(tmp_path / "c"),
                 "--threads", "1"]) == 0
    curve = json.loads((tmp_path / "c" / "gap_curve.json").read_text())
    assert set(curve["gap_curve"]) == {"1", "2", "3"}
    assert curve["spearman_rho"] is not None


def test_generate_counts_and_manifest(tmp_path):
    p = str(500 / (100 * DAY))
    assert main(["generate", "--p", p, "--variants", "0", "--out", str(tmp_path / "g0")]) == 0
    assert sorted(x.name for x in (tmp_path / "g0").iterdir()) == ["G_0.txt", "manifest.json"]
    assert main(["generate", "--p", p, "--variants", "30", "--out", str(tmp_path / "g30")]) == 0
    made = sorted(x.name for x in (tmp_path / "g30").glob("G_*.txt"))
    assert len(made) == 31
    man = tmp_path / "g30" / "manifest.json"
    assert main(["generate", "--manifest", str(man), "--out", str(tmp_path / "again")]) == 0
    for name in made:
        assert (tmp_path / "again" / name).read_bytes() == (tmp_path / "g30" / name).read_bytes()
