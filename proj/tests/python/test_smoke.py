import math

import numpy as np
import pytest

import topamp


def test_matrix_blocks():
    h = topamp.dynamical_matrix(topamp.ModelParams(n_sites=2))
    assert h.shape == (4, 4)
    np.testing.assert_allclose(h[:2, :2], [[-2j, 1j], [-1j, -2j]], atol=1e-15)
    np.testing.assert_allclose(h[:2, 2:], np.ones((2, 2)), atol=1e-15)


def test_singular_values_match_numpy():
    p = topamp.canonical_params()
    h = topamp.dynamical_matrix(p)
    ours = topamp.singular_values(p, 0.3)
    ref = np.sort(np.linalg.svd(0.3 * np.eye(h.shape[0]) - h, compute_uv=False))
    np.testing.assert_allclose(ours, ref, atol=1e-12)


def test_winding_and_gain():
    p = topamp.canonical_params()
    assert topamp.winding(p) == 1
    assert topamp.winding(topamp.double_hatano_nelson_params()) == 2
    assert topamp.gain(p, 8) == pytest.approx(262144.0, rel=1e-6)
    assert topamp.gain_closed_form(p, 8, 0.0) == pytest.approx(262144.0, rel=1e-12)


def test_amplifier_table():
    t = topamp.amplifier(topamp.canonical_params(), [8], [-1.0, 0.0, 1.0], threads=2)
    assert list(t) == ["omega", "site", "gain", "n_amp", "n_add", "n_add_capped_flag"]
    assert t["gain"][1] == pytest.approx(262144.0, rel=1e-6)


def test_coherence():
    zp, zm = topamp.coherence_lengths(topamp.canonical_params(), 0.0)
    assert zp.real == pytest.approx(math.log(2.0), abs=1e-12)
    assert zm.real == -math.inf


def test_errors_are_python_exceptions():
    with pytest.raises(ValueError):
        topamp.ModelParams(gamma=-1.0)
    p = topamp.canonical_params()
    p.gamma = 2.0
    with pytest.raises(ArithmeticError):
        topamp.winding(p)


def test_floquet_maps():
    m = topamp.coupling_drive_map(a1=2, a2=2, a3=2, phi_d=math.pi / 2)
    assert (m["hop"], m["g_s"], m["g_c"]) == (1.0, 1.0, 1.0)
    assert topamp.bessel_j(0, 0.0) == 1.0


def test_ensemble_deterministic():
    p = topamp.ModelParams(n_sites=20)
    a, _ = topamp.ensemble(p, 0.2, realizations=8, seed=3, threads=1)
    b, _ = topamp.ensemble(p, 0.2, realizations=8, seed=3, threads=4)
    np.testing.assert_array_equal(a, b)


def test_verify_closed_form_criterion():
    ok, line = topamp.verify(1)
    assert ok, line
