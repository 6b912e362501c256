import json
import math

import numpy as np
import pytest

import qiopa


def test_stimulated_pairs_follow_sinh_squared():
    p = qiopa.OpaParams(g=0.22)
    assert qiopa.stimulated_pairs(math.pi, p) == pytest.approx(4 * math.sinh(0.22) ** 2, abs=1e-6)


def test_evolution_is_unitary_and_keeps_parity():
    p = qiopa.OpaParams(g=0.22, cutoff=8)
    out = qiopa.evolve(qiopa.pair_state(math.pi, 8), p)
    assert out.norm() == pytest.approx(1.0, abs=1e-12)
    assert qiopa.swap_parity(out) == "odd"
    assert qiopa.fidelity(out, qiopa.cat_output_closed_form(math.pi, p)) > 0.999999
    assert len(out.amplitudes) == 9**4


def test_selectivity_at_zero_gain():
    cfg = qiopa.NeifConfig()
    p = qiopa.OpaParams(g=0.0, cutoff=2)
    trip = qiopa.evolve(qiopa.pair_state(0.0, 2), p)
    sing = qiopa.evolve(qiopa.pair_state(math.pi, 2), p)
    assert qiopa.double_coincidence(trip, cfg, "d1h", "d2v") == pytest.approx(0.5)
    assert qiopa.double_coincidence(sing, cfg, "d1h", "d2v") == pytest.approx(0.0, abs=1e-14)
    assert qiopa.rate_closed_form(0.0, cfg, 0.0) == pytest.approx(0.5)


def test_mode_unitary_is_unitary():
    m = qiopa.mode_unitary(qiopa.NeifConfig(delta1=0.3, theta1=0.1, theta2=1.2))
    assert np.allclose(m.conj().T @ m, np.eye(4), atol=1e-14)


def test_wigner_origin_and_corrected_form():
    p = qiopa.OpaParams(g=0.22, cutoff=8)
    out = qiopa.evolve(qiopa.pair_state(math.pi, 8), p)
    origin = (0j, 0j, 0j, 0j)
    assert qiopa.wigner_closed_form(origin, 0.22, math.pi) == pytest.approx(math.pi**-4, rel=1e-15)
    pt = (0.3 + 0.1j, -0.2j, 0.25, 0.1 - 0.3j)
    assert qiopa.wigner_numeric(out, pt) == pytest.approx(
        qiopa.wigner_closed_form(pt, 0.22, math.pi, corrected=True), abs=1e-9)


def test_json_round_trip():
    s = qiopa.pair_state(0.5, 3)
    back = qiopa.state_from_json(s.to_json(), 3)
    assert qiopa.fidelity(s, back) == pytest.approx(1.0)
    assert json.loads(s.to_json())[0]["occupancies"] == [0, 0, 1, 1]


def test_truncation_error_is_raised():
    with pytest.raises(qiopa.TruncationError):
        qiopa.evolve(qiopa.vacuum(2), qiopa.OpaParams(g=1.5, cutoff=2))


def test_temporal_defaults():
    t = qiopa.TemporalParams()
    assert qiopa.coherence_time_from_filter(t) == pytest.approx(225.0)
    assert qiopa.z_fringe(0.0, t) == pytest.approx(1.4)


def test_cli_in_process(tmp_path):
    out = tmp_path / "rates.csv"
    assert qiopa.run_cli(["rates", "--output", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "#@ command = rates"
    assert qiopa.run_cli(["rates", "--opa.g", "-1"]) == 1
