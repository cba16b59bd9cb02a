import math

import numpy as np
import pytest

import cheshire

# Storage basis for polarization is (+, -); columns are |H>, |V>.
HV_TO_STORAGE = np.array([[1, -1j], [1, 1j]]) / math.sqrt(2)


def in_hv(amplitudes):
    a = np.asarray(amplitudes).reshape(-1, 2)
    return (a @ HV_TO_STORAGE.conj()).reshape(-1)


def test_catalogs():
    assert "amp_in" in cheshire.states()
    assert "A_prime_3" in cheshire.observables()
    assert "cheshire" in cheshire.bundles()


def test_quartet():
    q = cheshire.cheshire_quartet()
    assert q == pytest.approx({"Pi_L": 1, "Pi_R": 0, "sigma_z_L": 0, "sigma_z_R": 1}, abs=1e-12)


def test_preselected_state_in_hv():
    labels, amps = cheshire.prepare_state("amp_in", theta=math.pi / 2)
    assert labels == ["path", "polarization"]
    expected = np.array([1, 0, -1j, 0]) / math.sqrt(2)
    assert np.allclose(in_hv(amps), expected, atol=1e-12)


def test_amplification_rows():
    rows = cheshire.cheshire_table([math.pi / 2, 2 * math.pi / 3])
    assert rows[0]["sigma_z_R"] == pytest.approx(1.0, abs=1e-12)
    assert rows[1]["sigma_z_R"] == pytest.approx(math.sqrt(3), abs=1e-12)
    assert rows[1]["sigma_x_L"] == pytest.approx(1.0, abs=1e-12)


def test_weak_value_and_degenerate():
    w = cheshire.weak_value("disembody_in", "disembody_f", "sigma_z_R", theta=2 * math.pi / 3, alpha=math.pi / 3)
    assert w == pytest.approx(3.0, abs=1e-12)
    with pytest.raises(cheshire.DegeneratePostselection):
        cheshire.weak_value("noisy_in", "noisy_f", "sigma_z", alpha=math.pi / 2)
    with pytest.raises(ValueError):
        cheshire.weak_value("nope", "amp_f", "Pi_L")


def test_noisy_effective_values():
    w = cheshire.noisy_effective_weak_value("three_body", math.pi / 4)
    assert w["paper"] == pytest.approx(1 + 1j)
    assert w["direct"] == pytest.approx(-1 + 1j)
    s = cheshire.noisy_effective_weak_value("spin_orbit", math.pi / 4, 0.1)
    assert s["direct"] == pytest.approx(0.1 + 1j)


def test_run_bundle_records():
    records = cheshire.run_scenario("disembodiment_sweep")
    assert len(records) == 9
    assert all(r["error"] is None for r in records)
    first = records[0]
    assert set(first["weak_values"]) == {"sigma_z_L", "sigma_z_R", "LxSx_L", "LxSx_R"}
    assert first["fit"]["accepted"]


def test_run_text_with_overrides_and_errors():
    text = cheshire.bundle_text("cheshire")
    csv = cheshire.run_scenario(text, ["coupling.g=0.002"], format="csv")
    assert csv.splitlines()[0].startswith("scenario,observable,wv_re")
    assert len(csv.splitlines()) == 5
    with pytest.raises(cheshire.ScenarioError):
        cheshire.run_scenario(text, ["coupling.nope=1"])
    with pytest.raises(cheshire.ScenarioError):
        cheshire.run_scenario("name: x\npreselect: {state: cheshire_in\n")
    bad = cheshire.run_scenario("disembodiment", ["alpha=0.5"])
    assert bad[0]["error"].startswith("degenerate_postselection")


def test_verify_single_check():
    (r,) = cheshire.verify(only="cheshire")
    assert r["criterion"] == 1
    assert r["passed"]
    assert r["line"].startswith("[PASS] 1 cheshire")
