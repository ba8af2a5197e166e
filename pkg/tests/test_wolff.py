import math

import numpy as np
import pytest

import oracles
from pqwolff import (DomainError, Measure, NFunction, RadialProfile, RegimeError, WolffConfig, log_grid,
                     truncated_series, wolff_p_point, wolff_p_radial_profile, wolff_point, wolff_radial_profile)

# frozen from tests/oracles.py (scipy quad of the definition, brentq inverse)
BALL_23 = {0.0: 3.6946185608672564, 0.5: 3.550041924149178, 2.0: 1.775865073517406}
ATOM_23_AT_HALF = 1.313936140856686


@pytest.fixture(scope="module")
def newton():
    return NFunction(2.0, 2.0, 3)


def test_newtonian_atom(newton):
    m = Measure.atom(3, mass=3.0)
    for r in (1e-3, 0.2, 5.0, 1e3):
        assert wolff_point(newton, m, r) == pytest.approx(3.0 / (2 * r), rel=1e-10)


def test_wp_atom_closed_forms():
    m = Measure.atom(3)
    assert wolff_p_point(2, 3, m, 0.5) == pytest.approx(2.0, rel=1e-10)
    # p = 1.5: int_r^inf t^-4 dt = 1/(3 r^3)
    assert wolff_p_point(1.5, 3, m, 0.5) == pytest.approx(8.0 / 3.0, rel=1e-9)


def test_uniform_ball_center_is_pi(newton, ball):
    assert wolff_point(newton, ball, 0.0) == pytest.approx(math.pi, rel=1e-12)


def test_nonhomogeneous_ball_against_oracle(nf23, ball):
    for r, want in BALL_23.items():
        assert wolff_point(nf23, ball, r) == pytest.approx(want, rel=1e-9)


def test_nonhomogeneous_atom_against_oracle(nf23):
    assert wolff_point(nf23, Measure.atom(3), 0.5) == pytest.approx(ATOM_23_AT_HALF, rel=1e-9)


def test_off_axis_point_is_rotation_invariant(nf23, ball):
    a = wolff_point(nf23, ball, [0.3, 0.4, 0.0])
    b = wolff_point(nf23, ball, 0.5)
    assert a == pytest.approx(b, rel=1e-12)


def test_off_centre_atom_against_oracle(nf23):
    m = Measure(3, atoms=(([0.0, 0.0, 0.7], 1.0),))
    assert wolff_point(nf23, m, [0.0, 0.0, 0.2]) == pytest.approx(ATOM_23_AT_HALF, rel=1e-9)


def test_atom_at_point_is_infinite(nf23):
    assert wolff_point(nf23, Measure.atom(3), 0.0) == math.inf


def test_normalization_scales_newtonian(newton):
    m = Measure.atom(3)
    v = wolff_point(newton, m, 1.0, WolffConfig(A="n_omega_n"))
    assert v == pytest.approx(1 / (8 * math.pi), rel=1e-10)


def test_truncation_series_monotone(newton):
    vals = truncated_series(newton, Measure.atom(3), 1.0, [2.0, 4.0, math.inf])
    assert vals == pytest.approx([0.25, 0.375, 0.5], rel=1e-10)


def test_truncated_ball_against_oracle(nf23, ball):
    want = oracles.wolff_uniform_ball_3d(2, 3, 0.5, R_cut=0.8)
    got = wolff_point(nf23, ball, 0.5, WolffConfig(R=0.8))
    assert got == pytest.approx(want, rel=1e-9)


def test_regime_error_without_truncation():
    nf = NFunction(3.0, 4.0, 3)
    with pytest.raises(RegimeError):
        wolff_point(nf, Measure.uniform_ball(3), 0.5)
    assert math.isfinite(wolff_point(nf, Measure.uniform_ball(3), 0.5, WolffConfig(R=2.0)))


def test_zero_measure(nf23):
    prof = wolff_radial_profile(nf23, Measure.zero(3), log_grid(1e-2, 1e2, 11))
    assert np.all(prof.values == 0.0)


def test_radial_profile_needs_radial_measure(nf23):
    m = Measure(3, atoms=(([1.0, 0, 0], 1.0),))
    with pytest.raises(DomainError):
        wolff_radial_profile(nf23, m, log_grid(1e-2, 1e2, 11))


def test_wp_profile_ball_decay(ball):
    grid = log_grid(2.0, 200.0, 9)
    prof = wolff_p_radial_profile(2.0, ball, grid)
    # outside the support W_2 is the Newtonian potential M/r, M = 4 pi / 3
    assert np.allclose(prof.values, 4 * math.pi / 3 / grid, rtol=1e-10)


def test_profile_interpolation_and_csv(tmp_path):
    r = log_grid(1e-2, 1e2, 41)
    prof = RadialProfile(r, 1 / r)
    assert prof(0.37) == pytest.approx(1 / 0.37, rel=1e-12)
    assert prof(1e3) == pytest.approx(1e-3, rel=1e-9)
    path = tmp_path / "p.csv"
    prof.to_csv(path)
    back = RadialProfile.from_csv(path)
    assert np.array_equal(back.values, prof.values) and np.array_equal(back.radii, prof.radii)


def test_config_validation():
    for kw in ({"A": -1.0}, {"R": 0.0}, {"rel_tol": 0.0}, {"tail_mode": "nope"}):
        with pytest.raises(DomainError):
            WolffConfig(**kw)


@pytest.mark.parametrize("dq", [1e-10, 1e-8, 1e-4])
def test_nearly_homogeneous_tail_is_fast_and_continuous(dq):
    import time
    nf = NFunction(2.4, 2.4 + dq, 3)
    m = Measure.atom(3, mass=2.0)
    t0 = time.perf_counter()
    v = wolff_point(nf, m, 1.5)
    assert time.perf_counter() - t0 < 1.0
    ref = wolff_point(NFunction(2.4, 2.4, 3), m, 1.5)
    assert v == pytest.approx(ref, rel=10 * dq + 1e-12)


# scipy quad of the definition split at 0.75, 1, 1.5, 1.75, 5 (p close to 1, sharp bend of the inverse)
POWER_DENSITY_NEAR_ONE = 0.19040292651858057


def test_sharp_inverse_is_resolved_by_refinement():
    from pqwolff.measure import RadialDensity
    nf = NFunction(1.0625, 2.5625, 3)
    m = Measure(3, densities=(RadialDensity("power", 0.5, 2.0, s=1.0),))
    vals = [wolff_point(nf, m, 1.25, WolffConfig(R=R)) for R in (5.0, 10.0, math.inf)]
    for v in vals:
        assert v == pytest.approx(POWER_DENSITY_NEAR_ONE, rel=1e-7)
    assert vals[0] <= vals[1] * (1 + 1e-12) and vals[1] <= vals[2] * (1 + 1e-12)
