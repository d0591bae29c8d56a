import math

import numpy as np
import pytest

import topoplasma as tp


def test_version():
    assert tp.__version__ == "0.1.0"


def test_params_and_phase():
    wm, _ = tp.transition_frequencies(1.0, 2.0)
    assert wm == pytest.approx(0.8284271, abs=1e-6)
    assert tp.classify_phase(tp.PlasmaParams(1.0, 0.5 * wm, 2.0)) == "I+"
    assert tp.classify_phase(tp.PlasmaParams(-1.0, 1.0, 0.0)) == "IV-"
    with pytest.raises(tp.InvalidParameter):
        tp.PlasmaParams(1.0, -1.0, 0.0)


def test_hamiltonian_and_bands():
    p = tp.PlasmaParams(0.7, 1.2, 0.4, "omega-decay:0.1")
    h = tp.hamiltonian(p, 0.3, -0.8)
    assert h.shape == (9, 9)
    assert np.allclose(h, h.conj().T)
    w = tp.bands(p, 1.1, 0.4)
    assert np.allclose(np.sort(np.linalg.eigvalsh(tp.hamiltonian(p, 1.1 * math.cos(0.4), 1.1 * math.sin(0.4)))), w)
    assert np.allclose(w, -w[::-1], atol=1e-9)


def test_curvature_and_table2():
    p = tp.PlasmaParams(1.0, 1.0, 2.0)
    assert tp.classify_phase(p) == "II+"
    assert tp.curvature(p, 2, sigma_bar=1.0) == pytest.approx(1 / math.sqrt(2), abs=1e-12)
    value, residual = tp.curvature_quadrature(tp.PlasmaParams(1.0, 1.0, 2.0, "omega-decay:0.5"), [2], n=32)
    assert value == pytest.approx(0.0, abs=5e-2)
    rows = tp.table2("omega-decay:0.01")
    assert [(r[1], r[2]) for r in rows] == [(1, 0), (-1, 0), (0, -1), (0, 1), (-2, 0), (0, 0), (0, -2)]
    assert all(r[3] for r in rows)


def test_bdi_plasma_decay_not_glued():
    n = tp.PlasmaParams(0.75, 1.0, 2.0, "plasma-decay:0.01")
    s = tp.PlasmaParams(-0.75, 1.0, 2.0, "plasma-decay:0.01")
    r = tp.bdi(n, s, 1)
    assert r["raw"] == pytest.approx(2.0, abs=1e-6)
    assert not r["is_bdi"]


def test_reduction_and_weyl():
    wm, _ = tp.transition_frequencies(1.0, 2.0)
    d = tp.reduce(tp.PlasmaParams(1.0, wm, 2.0))
    assert d["gap_overlap"]
    assert d["omega_star"] == pytest.approx(wm)
    with pytest.raises(tp.NotApplicable):
        tp.reduce(tp.PlasmaParams(1.0, 1.0, 0.0))
    assert tp.weyl_residual(8) < tp.weyl_residual(4)


def test_run_in_process(tmp_path):
    s = tp.run("table2", {"table2.reg": "omega-decay:0.02"}, out_dir=tmp_path, write=True)
    assert s["command"] == "table2"
    assert (tmp_path / s["run_id"] / "summary.json").exists()
    with pytest.raises(tp.InvalidParameter):
        tp.run("bdi", {"bdi.ell": "5"})
