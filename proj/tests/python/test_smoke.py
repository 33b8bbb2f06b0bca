import json
import math

import pytest

import twoweight as tw


def test_lebesgue_total_mass_and_cube_mass():
    mu = tw.lebesgue(2, 5)
    assert mu.total_mass == pytest.approx(1.0)
    assert mu.mass(tw.Cube([0.0, 0.0], 0.5)) == pytest.approx(0.25)


def test_measure_json_round_trip():
    mu = tw.cantor(1, 8)
    doc = json.loads(mu.to_json())
    assert doc["dimension"] == 1 and doc["level"] == 8
    back = tw.measure_from_json(mu.to_json())
    assert back.cells() == mu.cells()
    assert mu.to_csv().splitlines()[0] == "i0,mass"


def test_invalid_input_is_value_error():
    with pytest.raises(ValueError):
        tw.cantor(1, 8, ratio=0.7)


def test_exponents_of_lebesgue():
    e = tw.exponents(tw.lebesgue(1, 12))
    assert e["doubling"]["exponent"] == pytest.approx(1.0, abs=1e-9)
    assert e["reverse_doubling"]["exponent"] == pytest.approx(1.0, abs=1e-9)


def test_line_a2_and_pairing():
    line = tw.line_measure(10)
    a2 = tw.a2(line, line, 1.0)
    assert math.sqrt(a2["constant"]) == pytest.approx(1.0, abs=0.1)
    leb = tw.lebesgue(1, 10)
    p = tw.pairing(leb, leb, tw.unit_cube(1), 0.5)
    assert p["value"] == pytest.approx(8.0 / 3.0, rel=0.02)


def test_haar_identity():
    u = [1.0, 2.0, 0.5, 3.0]
    v = [0.2, 1.0, 4.0, 1.5]
    assert tw.haar_pairing(u, v) == pytest.approx(tw.haar_pairing_direct(u, v), abs=1e-12)


def test_bellman_certificate_flags_violation():
    cert = tw.verify_pair([1, 1, 1, 1], [0.5, 0.5, 0.9, 1.1], 0.2, 5.0)
    assert not cert["pass"]
    assert cert["offending"] is not None


def test_energy_constant_kappa_one():
    mu = tw.lebesgue(1, 8)
    assert tw.energy_constant(mu, tw.unit_cube(1), 1)["value"] == 1.0


def test_acceptance_criterion():
    r = tw.run_criterion(5)
    assert r["pass"], r["line"]
    assert r["line"].startswith("[PASS] 5")
