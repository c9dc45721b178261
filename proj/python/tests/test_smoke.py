import json
import math
import xml.etree.ElementTree as ET

import pytest

import qubit_retro as qr


def test_depolarizing_inverse_satisfies_bayes_rule():
    ch = qr.Channel.from_pauli(qr.PauliChannel.depolarizing(0.1))
    s = qr.BlochState([0.3, 0.4, 0.0])
    res = qr.bayesian_inverse(ch, s)
    assert res["found"]
    assert res["route"] == "analytic"
    assert res["unique"]
    assert res["residual"] <= 1e-10
    assert res["a"][0][0] == pytest.approx(1.0, abs=1e-12)

    inv = qr.Channel.from_json(res["inverse_json"])
    assert inv.is_cptp()
    assert qr.bayes_residual(ch, s, inv) <= 1e-10
    assert qr.time_reversal_discrepancy(ch, s, inv) <= 1e-9
    assert len(res["kraus"]) >= 1


def test_identity_inverse_is_adjoint():
    ch = qr.Channel.from_pauli(qr.PauliChannel([1.0, 0.0, 0.0, 0.0]))
    res = qr.bayesian_inverse(ch, qr.BlochState([0.0, 0.0, 0.9]))
    assert res["found"]
    assert res["route"] == "adjoint"


def test_off_axis_state_has_no_inverse():
    p = qr.PauliChannel([0.5, 0.5, 0.0, 0.0])
    ch = qr.Channel.from_pauli(p)
    off = qr.BlochState([0.3, 0.4, 0.0])
    res = qr.bayesian_inverse(ch, off)
    assert not res["found"]
    assert res["reason"] == "not-unscathed"
    assert qr.is_unscathed(p, off) is None
    assert qr.is_unscathed(p, qr.BlochState([0.7, 0.0, 0.0])) == 0


def test_channel_json_round_trip():
    ch = qr.Channel.from_json(json.dumps({"kind": "pauli", "p": [0.7, 0.1, 0.1, 0.1]}))
    again = qr.Channel.from_json(ch.to_json())
    for a, b in zip(ch.ptm(), again.ptm()):
        for x, y in zip(a, b):
            assert x == pytest.approx(y, abs=1e-12)
    assert ch.is_unital()


def test_invalid_input_raises_value_error():
    with pytest.raises(ValueError):
        qr.PauliChannel([0.5, 0.6, 0.0, 0.0])
    with pytest.raises(ValueError):
        qr.scan("amplitude-damping", 11)


def test_depolarizing_closed_forms_at_zero_lambda():
    q = qr.depolarizing_quantities(0.0, 0.4)
    assert q["norm_v2"] == pytest.approx(0.4)
    assert q["det_R"] == 0.0


def test_scan_outputs():
    cells = qr.scan("depolarizing", 11)
    assert len(cells) == 121
    assert all(c["feasible"] for c in cells if c["t"] == 0.0)
    assert any(not c["feasible"] for c in cells)

    csv = qr.scan_csv("bb84", 11).splitlines()
    assert csv[0] == "p,t,feasible,slack1,slack2,slack3"
    assert len(csv) == 122

    root = ET.fromstring(qr.scan_svg("depolarizing", 11))
    assert root.tag.endswith("svg")
    assert len(list(root.iter())) > 121


def test_boundary_chi_in_range():
    chi = qr.boundary_chi(0.3)
    assert 0.0 < chi < 1.0
    assert not math.isnan(chi)
