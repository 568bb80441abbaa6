import json
import math
import os

import pytest

import t2ctc


def test_km_reduce_matches_hand_value():
    # three singletons at 1,2,3 with weight intervals [0.8,1.2]
    yl, yr = t2ctc.km_reduce([1.0, 2.0, 3.0], [0.0, 0.0, 0.0],
                             [1.0, 1.0, 1.0], [0.2, 0.2, 0.2])
    assert yl == pytest.approx(13.0 / 7.0, abs=1e-12)
    assert yr == pytest.approx(15.0 / 7.0, abs=1e-12)


def test_approx_reduce_close_for_small_spreads():
    centers = [0.5, 1.0, 1.5, 2.0]
    spreads = [0.0] * 4
    weights = [1.0, 2.0, 2.0, 1.0]
    wspread = [0.01, 0.02, 0.01, 0.02]
    yl, yr = t2ctc.km_reduce(centers, spreads, weights, wspread)
    approx = t2ctc.approx_reduce(centers, spreads, weights, wspread)
    assert approx["lo"] == pytest.approx(yl, rel=0.05)
    assert approx["hi"] == pytest.approx(yr, rel=0.05)
    assert not approx["warning"]


def test_affine_interval_exact():
    lo, hi = t2ctc.affine_interval([1.0, 2.0], [0.1, 0.2], [1.0, -1.0], 0.5)
    assert lo == pytest.approx(-0.8)
    assert hi == pytest.approx(-0.2)


def test_affine_gaussian_closed_forms():
    m, s = t2ctc.affine_gaussian([1.0, 2.0], [0.3, 0.4], [2.0, 1.0], 1.0, "minimum")
    assert m == pytest.approx(2.0 * 1.0 + 1.0 * 2.0 + 1.0)
    assert s == pytest.approx(2.0 * 0.3 + 1.0 * 0.4)
    m, s = t2ctc.affine_gaussian([1.0, 2.0], [0.3, 0.4], [2.0, 1.0], 1.0, "product")
    assert m == pytest.approx(5.0)
    assert s == pytest.approx(math.sqrt((2.0 * 0.3) ** 2 + (1.0 * 0.4) ** 2))


def test_fou_width_tracks_noise():
    assert t2ctc.fou_width_for_snr(math.inf) == 0.0
    assert t2ctc.fou_width_for_snr(10.0) == pytest.approx(0.25)
    widths = [t2ctc.fou_width_for_snr(s) for s in (30.0, 20.0, 15.0, 10.0, 5.0)]
    assert all(a < b for a, b in zip(widths, widths[1:]))


def test_dynamic_terms_sane():
    d = t2ctc.dynamic_terms([0.1, 0.2, 0.05], [0.15, 0.12, 0.1])
    M = d["M"]
    for i in range(3):
        for j in range(3):
            assert M[i][j] == pytest.approx(M[j][i], abs=1e-9)
        assert M[i][i] > 0.0
    total_weight = 26.523 * 9.8
    assert sum(d["G"]) == pytest.approx(total_weight, rel=1e-3)


@pytest.fixture(scope="session")
def trained_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("bank")
    info = t2ctc.train(str(out), duration=1.5, labels=3, tilt=0.1)
    assert len(info["rule_counts"]) == 18
    return out


def test_train_and_infer(trained_dir):
    path = trained_dir / "M11.json"
    assert path.exists()
    rb = t2ctc.load_rulebase(str(path))
    assert rb.rule_count >= 1
    assert rb.input_count == 4
    lo_r, hi_r = rb.output_range
    x = [0.0, 0.0, 0.0, 0.0]
    y = t2ctc.infer_crisp(rb, x)
    assert lo_r - 1e-9 <= y <= hi_r + 1e-9
    lo0, hi0 = t2ctc.infer_interval(rb, x)
    assert lo0 <= hi0
    wide = t2ctc.widen(rb, 0.25)
    lo1, hi1 = t2ctc.infer_interval(wide, x)
    assert hi1 - lo1 >= hi0 - lo0 - 1e-12
    assert lo_r - 1.0 <= 0.5 * (lo1 + hi1) <= hi_r + 1.0


def test_rulebase_files_are_json(trained_dir):
    names = sorted(p.name for p in trained_dir.glob("*.json"))
    assert len(names) == 18
    with open(trained_dir / "G1.json") as fh:
        doc = json.load(fh)
    assert doc["schema"] == "t2ctc-rulebase-v1"


def test_simulate_sse_controllers():
    pd = t2ctc.simulate_sse("pd", duration=1.0)
    ctc = t2ctc.simulate_sse("ctc", duration=1.0)
    assert pd["sse"] > 0.0
    assert not pd["unstable"]
    assert ctc["sse"] < pd["sse"]


def test_simulate_fuzzy_with_bank(trained_dir):
    res = t2ctc.simulate_sse("fuzzy-t1", duration=1.0,
                             rulebase_dir=str(trained_dir))
    assert res["sse"] > 0.0
    assert not res["unstable"]
