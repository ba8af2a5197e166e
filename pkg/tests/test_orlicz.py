import math

import numpy as np
import pytest

import oracles
from pqwolff import (DomainError, NFunction, SublinearLaw, G_eval, G_star, check_growth_envelopes,
                     delta2_ratio, f_eval, g_eval, g_inv, gamma_admissible, gamma_upper)
from pqwolff.orlicz import ENVELOPE_FAMILIES, F_eval

# frozen from tests/oracles.py (brentq inverse, direct conjugate)
G_STAR_23_AT_5 = 5.436174132839387


def test_model_functions_exact(nf23):
    assert g_eval(nf23, 2.0) == 2.0 + 4.0
    assert G_eval(nf23, 1.0) == pytest.approx(0.5 + 1.0 / 3.0, rel=1e-15)
    assert g_inv(nf23, 2.0) == pytest.approx(1.0, rel=1e-15)
    assert g_inv(nf23, 0.0) == 0.0
    assert g_eval(nf23, 0.0) == 0.0


def test_homogeneous_inverse_closed_form():
    nf = NFunction(2.0, 2.0, 3)
    assert g_inv(nf, 5.0) == pytest.approx(2.5, rel=1e-15)
    assert G_star(nf, 4.0) == pytest.approx(4.0, rel=1e-14)  # s^2/4 when G = t^2


def test_conjugate_against_oracle(nf23):
    assert G_star(nf23, 5.0) == pytest.approx(G_STAR_23_AT_5, rel=1e-13)
    for s in (1e-8, 0.3, 7.0, 1e6):
        assert G_star(nf23, s) == pytest.approx(oracles.G_conjugate(2, 3, s), rel=1e-11)


def test_inverse_against_oracle():
    nf = NFunction(1.5, 4.0, 3)
    for s in (1e-12, 1e-3, 1.0, 42.0, 1e9):
        assert g_inv(nf, s) == pytest.approx(oracles.g_inverse(1.5, 4.0, s), rel=1e-12)


def test_roundtrip_wide_range(nf23):
    s = np.concatenate([[0.0], np.logspace(-12, 12, 2001)])
    back = g_eval(nf23, g_inv(nf23, s))
    assert np.all(np.abs(back - s) <= 1e-10 * np.maximum(s, 1e-300))


def test_vector_and_scalar_shapes(nf23):
    assert isinstance(g_eval(nf23, 1.5), float)
    assert g_inv(nf23, np.ones((2, 3))).shape == (2, 3)


@pytest.mark.parametrize("bad", [-1.0, math.nan, math.inf])
def test_rejects_bad_arguments(nf23, bad):
    with pytest.raises(DomainError):
        g_inv(nf23, bad)
    with pytest.raises(DomainError):
        g_eval(nf23, bad)


@pytest.mark.parametrize("p,q,n", [(1.0, 2.0, 3), (3.0, 2.0, 3), (2.0, 3.0, 2), (2.0, math.inf, 3)])
def test_nfunction_validation(p, q, n):
    with pytest.raises(DomainError):
        NFunction(p, q, n)


def test_gamma_window():
    assert gamma_upper(2.0, 3.0) == pytest.approx(0.5)
    assert gamma_upper(2.0, 2.0) == pytest.approx(1.0)
    assert gamma_admissible(2.0, 3.0, 0.49)
    assert not gamma_admissible(2.0, 3.0, 0.5)
    assert not gamma_admissible(2.0, 3.0, 0.0)
    with pytest.raises(DomainError):
        SublinearLaw(0.5, NFunction(2.0, 3.0, 3))


def test_sublinear_law(law23):
    t = 16.0
    assert f_eval(law23, t) == pytest.approx(2.0 + 4.0)
    assert F_eval(law23, t) == pytest.approx(32.0 / 1.25 + 64.0 / 1.5, rel=1e-14)
    assert law23.exponents == (0.25, 0.5)


def test_envelopes_pass(nf23, rng):
    samples = np.c_[10 ** rng.uniform(-6, 6, 10000), 10 ** rng.uniform(-3, 3, 10000)]
    rep = check_growth_envelopes(nf23, samples)
    assert set(rep.worst_slack) == set(ENVELOPE_FAMILIES)
    assert rep.passed, rep.worst_slack


def test_envelope_detects_a_broken_bound(nf23):
    # alpha = 0 makes every scaling family tight at zero, not violated
    rep = check_growth_envelopes(nf23, np.array([[1.0, 0.0]]))
    assert rep.passed


def test_delta2_ratio_bounds(nf23):
    r = delta2_ratio(nf23, np.logspace(-5, 5, 101))
    assert np.all((r >= 2.0 - 1e-12) & (r <= 3.0 + 1e-12))
