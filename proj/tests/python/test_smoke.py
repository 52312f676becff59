import json
import math

import pytest

import ucover


def test_version_and_seed():
    assert ucover.__version__
    assert ucover.DEFAULT_SEED == 0x5EEDC0DE


def test_arc_sets():
    b = ucover.ball(0.95, 0.1)
    assert math.isclose(b.measure, 0.2)
    assert 0.02 in b and 0.5 not in b
    u = ucover.ArcSet.from_arcs([(0.1, 0.2), (0.2, 0.2)])
    [(start, length)] = u.arcs
    assert start == pytest.approx(0.1) and length == pytest.approx(0.3)
    assert (~u).measure == pytest.approx(0.7)
    assert ucover.ball(0.3, 0.6).is_full
    with pytest.raises(ucover.UcoverError):
        ucover.ball(0.3, 0.0)


def test_riesz_energy_of_circle():
    for s in (0.2, 0.5, 0.8):
        assert abs(ucover.riesz_energy(ucover.ArcSet.full(), s) - 2**s / (1 - s)) < 1e-10


def test_bounds():
    p = ucover.lower_bound(1.0, 8.6)
    assert p["valid"]
    assert abs(p["value"] - 0.2177444298485995) < 1e-12
    assert ucover.optimize_lower(1.0)["value"] >= 0.2177444298485995 - 1e-9
    assert not ucover.upper_bound_matrix(0.6, 2.0)["valid"]
    assert abs(ucover.s_exponent(ucover.c_star(5.0), 5.0) - 1) < 1e-10
    big, delta = ucover.theta_delta(0.2, 3.0)
    lam = ucover.lambda_(0.2, 3.0)
    assert abs(lam * lam - (1 + big + delta) * lam + delta) < 1e-12


def test_families():
    f = ucover.RadiusFamily.parse("logn:c=3")
    assert f(1000) == pytest.approx(3 * math.log(1000) / 1000)
    assert ucover.classify(f)["covers_T"] == "yes"
    with pytest.raises(ucover.UcoverError):
        ucover.RadiusFamily.parse("nope:c=1")


def test_sample_path_matches_numpy_philox():
    np = pytest.importorskip("numpy")
    raw = np.random.Philox(key=[ucover.DEFAULT_SEED, 3]).random_raw(16)
    expect = [(int(w) >> 11) * 2.0**-53 for w in raw]
    assert ucover.sample_path(ucover.DEFAULT_SEED, 3, 16) == expect


def test_experiments():
    f = ucover.RadiusFamily.parse("logn:c=3")
    rows = ucover.coverage_experiment(f, [1000], 50, seed=7)
    assert rows[0]["not_covered"] == 0
    g = ucover.cover_growth("refined", trials=30, levels=6)
    assert g["all_covered_ok"]
    r = ucover.riesz_experiment(trials=30)
    assert r["within_order"]


def test_cli_in_process():
    code, out, err = ucover.run_cli(["bounds", "--c", "1", "--kind", "lower", "--theta", "8.6"])
    assert code == 0 and err == ""
    assert abs(json.loads(out)["value"] - 0.2177444298485995) < 1e-12
    code, out, err = ucover.run_cli(["bounds", "--c", "-1"])
    assert code == 1 and json.loads(err)["error"] == "domain"


def test_bad_variant_raises():
    with pytest.raises(ucover.UcoverError):
        ucover.cover_growth("greedy", trials=2, levels=4)
