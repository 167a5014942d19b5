import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.interpolate import CubicSpline

from pqfronts.operator import OperatorSpec, make_r, q_value
from pqfronts.profile import (profile_on_grid, reconstruct_profile, tail_exponents,
                              y_interpolant)
from pqfronts.reaction import ReactionSpec
from pqfronts.shooting import integrate_backward

FISHER = ReactionSpec.classical_logistic()


def _fisher_rates(c):
    # linearisation oracles at u = 0 and u = 1 of U'' - cU' + U(1 - U) = 0
    return (c - math.sqrt(c * c - 4.0)) / 2.0, (math.sqrt(c * c + 4.0) - c) / 2.0


@pytest.fixture(scope="module")
def profile42():
    shoot = integrate_backward(OperatorSpec(4, 2), FISHER, 2.5)
    return shoot, reconstruct_profile(shoot)


@pytest.fixture(scope="module")
def fisher_profile():
    shoot = integrate_backward(OperatorSpec(2, 2, "single_q"), FISHER, 2.5)
    return reconstruct_profile(shoot)


def test_doubled_profile_endpoints():
    shoot = integrate_backward(OperatorSpec(2, 2), FISHER, 3.0)
    prof = reconstruct_profile(shoot)
    assert np.all(np.diff(prof.u) > 0)
    assert prof.u[0] <= 1e-6 and prof.u[-1] >= 1 - 1e-6
    z_min, z_max = prof.z_span
    assert z_min < 0 < z_max


def test_anchor(profile42):
    _, prof = profile42
    i = int(np.argmin(np.abs(prof.z)))
    assert prof.z[i] == 0.0 and prof.u[i] == 0.5
    assert prof.samples.shape == (prof.z.size, 2)


def test_custom_anchor():
    shoot = integrate_backward(OperatorSpec(4, 2), FISHER, 2.5)
    prof = reconstruct_profile(shoot, anchor=0.3)
    assert np.interp(0.0, prof.z, prof.u) == pytest.approx(0.3)


def test_slope_matches_reconstruction_ode(profile42):
    shoot, prof = profile42
    y_of = y_interpolant(shoot)
    R = make_r(shoot.op)
    expected = np.array([R(float(y_of(u)[0])) for u in prof.u])
    assert np.allclose(prof.du_dz, expected, rtol=1e-6, atol=0)


def test_finite_difference_slope(profile42):
    _, prof = profile42
    spline = CubicSpline(prof.z, prof.u)
    mid = (prof.u > 0.05) & (prof.u < 0.95)
    fd = spline(prof.z[mid], 1)
    assert np.allclose(fd, prof.du_dz[mid], rtol=1e-5)


def test_round_trip_y(profile42):
    shoot, prof = profile42
    mid = (prof.u >= 0.05) & (prof.u <= 0.95)
    y_back = q_value(shoot.op, prof.du_dz[mid])
    y_shoot = np.interp(prof.u[mid], shoot.u, shoot.y)
    assert np.max(np.abs(y_back - y_shoot)) <= 1e-4


def test_single_point_span():
    shoot = integrate_backward(OperatorSpec(4, 2), FISHER, 2.5)
    prof = reconstruct_profile(shoot, tail_tol=0.5)
    assert prof.u.size == 1 and prof.u[0] == 0.5 and prof.z_span == (0.0, 0.0)


def test_refuses_inadmissible():
    shoot = integrate_backward(OperatorSpec(4, 2), FISHER, 1.5)
    with pytest.raises(ValueError):
        reconstruct_profile(shoot)


def test_fisher_tail_rates(fisher_profile):
    left, right = tail_exponents(fisher_profile)
    lo, hi = _fisher_rates(2.5)
    assert left == pytest.approx(lo, rel=0.05)
    assert right == pytest.approx(hi, rel=0.05)


def test_tail_rates_positive(profile42):
    rates = tail_exponents(profile42[1])
    assert rates.left > 0 and rates.right > 0


def test_truncated_profile_has_no_rates():
    shoot = integrate_backward(OperatorSpec(2, 2, "single_q"), FISHER, 2.5)
    prof = reconstruct_profile(shoot, tail_tol=1e-2)
    assert tail_exponents(prof) == (None, None)


def test_profile_on_grid(fisher_profile):
    prof = fisher_profile
    x = np.linspace(-200, 200, 4001)
    u = profile_on_grid(prof, x)
    assert np.all(np.diff(u) >= 0)
    assert u[0] >= 0 and u[-1] <= 1
    assert u[0] < 1e-30 and 1 - u[-1] < 1e-20
    assert profile_on_grid(prof, np.array([0.0]))[0] == pytest.approx(0.5)
    assert profile_on_grid(prof, np.array([5.0]), shift=5.0)[0] == pytest.approx(0.5)


def test_profile_on_H_interval():
    r = ReactionSpec.classical_logistic(H=3.0)
    shoot = integrate_backward(OperatorSpec(2, 2, "single_q"), r, 2.5)
    prof = reconstruct_profile(shoot)
    assert prof.H == 3.0
    assert np.interp(0.0, prof.z, prof.u) == pytest.approx(1.5)
    assert prof.u[-1] >= 3.0 - 3e-6


@settings(max_examples=100)
@given(st.floats(2.9, 6.0))
def test_fisher_profile_monotone_and_normalised(c):
    shoot = integrate_backward(OperatorSpec(2, 2), FISHER, c)
    prof = reconstruct_profile(shoot, n_samples=401)
    assert np.all(np.diff(prof.u) > 0)
    assert np.all(np.diff(prof.z) > 0)
    assert np.interp(0.0, prof.z, prof.u) == pytest.approx(0.5, abs=1e-12)
    assert prof.u[0] <= 1e-6 and prof.u[-1] >= 1 - 1e-6


def test_compact_tail_extension():
    # q = 3 with f ~ u^{1/2}: u' ~ k u^{1/2} reaches zero at finite z
    shoot = integrate_backward(OperatorSpec(3, 3), ReactionSpec.matched(1.5), 2.9)
    prof = reconstruct_profile(shoot)
    x = np.linspace(prof.z[0] - 5.0, prof.z[0], 501)
    u = profile_on_grid(prof, x)
    assert u[0] == 0.0
    assert np.all(np.diff(u) >= 0)
    assert u[-1] == pytest.approx(prof.u[0])
    # k u^{1/2} law: sqrt(u) is linear in z near the foot
    z_sq = x[u > 0]
    s = np.sqrt(u[u > 0])
    assert np.allclose(np.diff(s, 2), 0.0, atol=1e-10)
    assert z_sq[0] > x[0]
