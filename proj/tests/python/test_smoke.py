import math

import numpy as np
import pytest

import folcal


def test_version_and_cases():
    assert folcal.__version__ == "0.1.0"
    ids = folcal.case_ids()
    assert "so8-euler-orthogonality" in ids
    assert "so16-euler-orthogonality-slow" in ids


def test_verify_case():
    r = folcal.verify("so8-dte-euler")
    assert r["pass"] and r["exact"]
    assert r["term_count_after"] == 0
    with pytest.raises(KeyError):
        folcal.verify("no-such-case")


def test_orthogonality():
    r = folcal.orthogonality(4, 8)
    assert r["exact"] and r["term_count_after"] == 0
    assert folcal.orthogonality(4, 8, method="reduced")["exact"]


def test_forms_text():
    assert folcal.form_text("euler-u", 2, 4) == "1/2 * pi^-1 * mu[1,3]^mu[2,3]\n1/2 * pi^-1 * mu[1,4]^mu[2,4]\n"
    assert folcal.differential_text("euler-v", 4, 8) == "0\n"


def test_table_rows():
    rows = {(tuple(r), tuple(c)): (e, v) for r, c, e, v in folcal.evaluation_table("euler-v", 4, 8)}
    assert len(rows) == 1820
    assert rows[((1, 1, 1, 1), (5, 6, 7, 8))][0] == "3/2 * pi^-2"
    assert rows[((1, 1, 2, 2), (5, 6, 7, 8))][0] == "1/2 * pi^-2"
    assert rows[((1, 2, 3, 4), (5, 6, 7, 8))][0] == "0"


def test_evaluate_plane_axis_family():
    basis = np.zeros((16, 4))
    for c in range(4):
        basis[c, c] = 1.0  # E15..E18 are the first four basis vectors
    assert folcal.evaluate_plane("euler-v", 4, 8, basis) == pytest.approx(1.5 / math.pi**2)


def test_comass_small():
    r = folcal.comass("euler-v", 2, 4, restarts=4)
    assert r["best_value"] == pytest.approx(0.5 / math.pi, abs=1e-8)


def test_volumes():
    assert folcal.volume("hopf-s3")["value"] == pytest.approx(4 * math.pi**2, rel=1e-9)
    r = folcal.volume_ratio("hopf-s7", "ns-s7")
    assert r["ratio"] == pytest.approx(2.0, rel=1e-2)
    p = np.array([0.5, 0.5, 0.5, 0.5])
    assert folcal.gauss_jacobian("hopf-s3", p) == pytest.approx(2.0)
    f = folcal.leaf_tangent("hopf-s3", p)
    assert f.shape == (4, 1)
    assert abs(float(f[:, 0] @ p)) < 1e-14


def test_mixed_scan_reports_violations():
    s = folcal.mixed_scan(grid=3)
    assert s["points"] == 27
    assert s["max_ratio"] == pytest.approx(1.0)
