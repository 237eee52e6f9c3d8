import math

import pytest

import fermi_causality as fc


def test_version():
    assert fc.__version__ == "0.1.0"


def test_special_functions():
    assert fc.sin_integral(1.0) == pytest.approx(0.946083070367183, rel=1e-14)
    assert fc.cos_integral(1.0) == pytest.approx(0.337403922900968, rel=1e-14)
    f, g = fc.trig_auxiliary(5.0)
    si = math.pi / 2 - f * math.cos(5.0) - g * math.sin(5.0)
    assert si == pytest.approx(fc.sin_integral(5.0), rel=1e-13)


def test_kernels():
    w = fc.wightman_free(0.3, 1.0, eps=1e-3)
    assert w == pytest.approx(-1 / (4 * math.pi**2 * ((0.3 - 1e-3j) ** 2 - 1.0)), rel=1e-14)
    assert fc.wightman_free(-0.3, 1.0) == pytest.approx(w.conjugate())
    split = fc.wightman_free_split(0.0, 1.0)
    assert sorted(d.location for d in split.deltas) == [-1.0, 1.0]
    i = fc.disorder_I(1.0, 2.0, 1.0)
    assert i.imag == pytest.approx(-1.2045e-2, rel=1e-4)
    with pytest.raises(ValueError):
        fc.disorder_I_spacelike(2.0, 1.0, 1.0)


def test_scenario_one_matches_closed_form():
    p = fc.SystemParams(omega0=1.0, r=3.0, tau=1.5)
    res = fc.evaluate(fc.Scenario.PhiF, p)
    assert res.regime == fc.Regime.Precursor
    assert res.converged
    a = fc.precursor_closed_form_A(1.0, 3.0, 1.5)
    assert res.probability_r_dependent.value.real == pytest.approx(abs(a) ** 2 / 16, rel=1e-9)
    assert abs(res.term("free_amplitude_sq").value) > 0
    with pytest.raises(KeyError):
        res.term("no_such_term")


def test_inclusive_residual_cancels():
    res = fc.evaluate(fc.Scenario.BigPhiF, fc.SystemParams(r=3.0, tau=1.5))
    assert abs(res.probability_r_dependent.value) <= 1e-10 * res.largest_term


def test_invalid_parameters():
    with pytest.raises(ValueError):
        fc.SystemParams(r=-1.0)


def test_criterion():
    c = fc.run_criterion("A2")
    assert c.passed
    assert str(c).startswith("A2 PASS")
    assert "A8" in fc.suite_names() or "all" in fc.suite_names()
