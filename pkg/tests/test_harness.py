import csv
import io
import json
import math

import jsonschema
import numpy as np
import pytest

from killing_lab import catalog, harness
from killing_lab.cli import main


def _suite(*entries, name="t"):
    return {"name": name, "entries": list(entries)}


# --- catalog ------------------------------------------------------------------------


def test_catalog_builds_every_space():
    rows = catalog.list_catalog()
    assert [r["id"] for r in rows] == sorted(catalog.CATALOG)
    for r in rows:
        assert r["dim"] >= 2


def test_catalog_hash_is_stable_and_sensitive():
    h = catalog.catalog_hash()
    assert h == catalog.catalog_hash() and len(h) == 64
    changed = dict(catalog.CATALOG, extra={"family": "euclidean", "n": 2})
    assert catalog.catalog_hash(changed) != h


def test_build_space_from_spec_and_errors():
    sp = catalog.build_space({"family": "warped_flat", "fiber_dim": 2, "nu": 0.25})
    assert sp.id == "warped_flat(fiber_dim=2,nu=0.25)"
    assert sp.killing == 0.25j and sp.sectional == pytest.approx(-0.25)
    with pytest.raises(ValueError, match="unknown catalog"):
        catalog.build_space("nope")
    with pytest.raises(ValueError, match="family"):
        catalog.build_space({"family": "nope"})
    with pytest.raises(ValueError, match="needs parameter"):
        catalog.build_space({"family": "warped_flat", "nu": 0.5})


# --- rng, integrals -----------------------------------------------------------------


def test_make_rng_is_keyed_philox():
    a, b = harness.make_rng(11).random(5), harness.make_rng(11).random(5)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, harness.make_rng(12).random(5))
    assert isinstance(harness.make_rng(0).bit_generator, np.random.Philox)


def test_homogeneous_integral():
    s3 = catalog.build_space("S3-homogeneous")
    assert harness.homogeneous_integral(s3, 1.0) == pytest.approx(2 * np.pi**2)
    assert harness.homogeneous_integral(s3, -0.5) == pytest.approx(-np.pi**2)
    with pytest.raises(ValueError):
        harness.homogeneous_integral(catalog.build_space("S3"), 1.0)
    with pytest.raises(ValueError):
        harness.homogeneous_integral(s3, 1.0, constant=False)
    mc = harness.monte_carlo_s3_volume(harness.make_rng(3), 200000)
    assert abs(mc - 2 * np.pi**2) / (2 * np.pi**2) < 0.02


# --- configs ------------------------------------------------------------------------


def test_shipped_suites():
    assert {"default", "negative-control", "empty"} <= set(harness.shipped_suites())


@pytest.mark.parametrize(
    "cfg,match",
    [
        ({"entries": [{"id": "a", "operation": "nope", "tolerance": 1}]}, "unknown operation"),
        ({"entries": [{"id": "a", "operation": "bochner", "tolerance": -1}]}, "schema"),
        ({"entries": [{"id": "a", "operation": "bochner"}]}, "tolerance"),
        ({"entries": [{"id": "a", "operation": "bochner", "tolerance": 1, "bogus": 1}]}, "schema"),
        ({"entries": "x"}, "schema"),
        ({}, "schema"),
        (
            {"entries": [{"id": "a", "operation": "bochner", "tolerance": 1}, {"id": "a", "operation": "bochner", "tolerance": 1}]},
            "duplicate",
        ),
    ],
)
def test_config_errors(cfg, match):
    with pytest.raises(harness.ConfigError, match=match):
        harness.run_suite(cfg)


def test_config_file_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(harness.ConfigError, match="not valid JSON"):
        harness.load_config(bad)
    with pytest.raises(harness.ConfigError, match="cannot read"):
        harness.load_config(tmp_path / "missing.json")


def test_defaults_and_tolerance_overrides():
    cfg = {"defaults": {"samples": 3, "seed": 5, "tolerance": 1e-3}, "entries": [{"id": "a", "operation": "clifford_relations"}]}
    (e,) = harness.entries_from_config(cfg)
    assert (e.samples, e.seed, e.tolerance) == (3, 5, 1e-3)
    (e,) = harness.entries_from_config(cfg, tolerance=1e-6)
    assert e.tolerance == 1e-6
    (e,) = harness.entries_from_config(cfg, tolerance_scale=10)
    assert e.tolerance == pytest.approx(1e-2)


# --- running ------------------------------------------------------------------------


def test_empty_suite():
    rep = harness.run_suite("empty")
    assert rep.summary == {"pass": 0, "fail": 0, "inconclusive": 0, "total": 0}
    assert rep.exit_code == 0
    harness.validate_report(json.loads(harness.emit_report(rep)))


def test_negative_control_fails_exactly_one():
    rep = harness.run_suite("negative-control")
    assert rep.failed() == ["killing-S3-wrong-mu"]
    assert rep.summary["pass"] == 3 and rep.exit_code == 1


def test_internal_failure_marks_entry():
    rep = harness.run_suite(_suite({"id": "x", "space": "S3-homogeneous", "operation": "type1_length", "tolerance": 1}))
    (e,) = rep.entries
    assert e.status == "fail" and e.reason.startswith("ValueError") and math.isinf(e.residual)


def test_inconclusive_when_fd_error_exceeds_tolerance():
    rep = harness.run_suite(_suite({"id": "x", "space": "S3", "operation": "curvature_oracle", "tolerance": 1e-15, "samples": 1}))
    (e,) = rep.entries
    assert e.status == "inconclusive" and e.fd_error > e.tolerance
    assert rep.exit_code == 1


def test_workers_do_not_change_output():
    one = harness.emit_report(harness.run_suite("negative-control"))
    two = harness.emit_report(harness.run_suite("negative-control", workers=2))
    assert one == two


def test_entries_sorted(default_report):
    keys = [(e.space, e.operation, e.id) for e in default_report.entries]
    assert keys == sorted(keys)


def test_default_suite_all_pass(default_report):
    bad = [(e.id, e.status, e.residual, e.reason) for e in default_report.entries if e.status != "pass"]
    assert bad == []
    assert default_report.summary["total"] == len(harness.load_config("default")["entries"])


# --- emitting -----------------------------------------------------------------------


def test_dumps_format():
    text = harness.dumps({"b": 0.1, "a": [float("nan"), float("inf"), -float("inf")], "c": {}, "d": True, "e": 3})
    data = json.loads(text)
    assert list(data) == ["a", "b", "c", "d", "e"]
    assert data["a"] == ["nan", "inf", "-inf"]
    assert "0.10000000000000001" in text


def test_report_json_and_csv(default_report):
    data = json.loads(harness.emit_report(default_report))
    harness.validate_report(data)
    assert data["catalog_hash"] == catalog.catalog_hash()
    assert all("wall_time" not in e for e in data["entries"])
    timed = json.loads(harness.emit_report(default_report, timing=True))
    assert all("wall_time" in e for e in timed["entries"])
    rows = list(csv.reader(io.StringIO(harness.emit_report(default_report, "csv"))))
    assert tuple(rows[0]) == harness.CSV_COLUMNS
    assert len(rows) == len(default_report.entries) + 1
    assert harness.render_report(data, "csv") == harness.render_report(default_report, "csv")
    with pytest.raises(ValueError):
        harness.render_report(default_report, "xml")


def test_report_schema_rejects_bad_status(default_report):
    data = json.loads(harness.emit_report(default_report))
    data["entries"][0]["status"] = "maybe"
    with pytest.raises(jsonschema.ValidationError):
        harness.validate_report(data)


# --- command line -------------------------------------------------------------------


def test_cli_verify_exit_codes(tmp_path, capsys):
    assert main(["verify", "empty", "-q"]) == 0
    out = tmp_path / "neg.csv"
    assert main(["verify", "negative-control", "--format", "csv", "-o", str(out)]) == 1
    assert "FAIL killing-S3-wrong-mu" in capsys.readouterr().err
    assert len(out.read_text().splitlines()) == 5
    assert main(["verify", str(tmp_path / "missing.json")]) == 2
    assert main(["verify", "empty", "--tolerance", "0"]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["verify"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_cli_report_roundtrip(tmp_path, capsys):
    js = tmp_path / "r.json"
    assert main(["verify", "negative-control", "-q", "-o", str(js)]) == 1
    assert main(["report", str(js)]) == 1
    text = capsys.readouterr().out
    assert text == harness.render_report(json.loads(js.read_text()), "csv")
    bad = tmp_path / "bad.json"
    bad.write_text('{"suite": 1}')
    assert main(["report", str(bad)]) == 2
    assert main(["report", str(tmp_path / "none.json")]) == 2


def test_cli_list_and_certificate(capsys):
    assert main(["list", "operations"]) == 0
    assert json.loads(capsys.readouterr().out) == sorted(harness.OPERATIONS)
    assert main(["list", "suites"]) == 0
    assert "default" in json.loads(capsys.readouterr().out)
    assert main(["certificate", "--p1", "2", "--p2", "3", "--no-numeric"]) == 0
    cert = json.loads(capsys.readouterr().out)
    assert cert["verdict"] == "UNSTABLE" and cert["numeric"] is None
    assert main(["certificate", "--p1", "0"]) == 2
