import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import pqfronts.pdesim as pdesim
from pqfronts.errors import BlowUp, BoundaryContamination
from pqfronts.operator import OperatorSpec
from pqfronts.pdesim import (GridSpec, flux, front_position, run, stable_dt, step,
                             suggested_domain)
from pqfronts.profile import profile_on_grid, reconstruct_profile
from pqfronts.reaction import ReactionSpec
from pqfronts.shooting import integrate_backward

FISHER = ReactionSpec.classical_logistic()
DOUBLED = OperatorSpec(2, 2)
OPS = [DOUBLED, OperatorSpec(4, 2), OperatorSpec(4, 2, "competitive"),
       OperatorSpec(3, 3, "single_q")]


@pytest.fixture(scope="module")
def doubled_profile():
    return reconstruct_profile(integrate_backward(DOUBLED, FISHER, 3.0))


def test_grid_validation():
    for kw in (dict(nx=10), dict(x_max=-200.0), dict(t_end=-1.0), dict(dt=0.0),
               dict(snapshot_stride=0)):
        args = dict(x_min=-100.0, x_max=10.0, nx=128, t_end=1.0) | kw
        with pytest.raises(ValueError):
            GridSpec(**args)
    g = GridSpec(0.0, 1.0, 101, 1.0)
    assert g.dx == pytest.approx(0.01) and g.x[-1] == 1.0


def test_flux_signs():
    D = np.array([-2.0, 0.0, 2.0])
    assert np.allclose(flux(OperatorSpec(4, 2), D), [-10.0, 0.0, 10.0])
    assert np.allclose(flux(OperatorSpec(4, 2, "competitive"), D), [6.0, 0.0, -6.0])
    assert np.allclose(flux(OperatorSpec(4, 2, "single_q"), D), D)


def test_stable_dt_rule():
    u = np.array([0.0, 0.1, 0.3, 0.4])
    dx = 0.1
    # largest slope 2: diffusivity 1 + 3*4 = 13
    assert stable_dt(OperatorSpec(4, 2), u, dx) == pytest.approx(0.25 * dx * dx / 13)
    # the doubled p = q = 2 operator is 2u'' whatever the slope
    assert stable_dt(DOUBLED, np.zeros(4), dx) == pytest.approx(0.25 * dx * dx / 2)
    assert stable_dt(OperatorSpec(3, 3, "single_q"), np.zeros(4), dx) == pytest.approx(
        0.25 * dx * dx)


@pytest.mark.parametrize("op", OPS)
@pytest.mark.parametrize("level", [0.0, 1.0])
def test_equilibria_preserved(op, level):
    u = np.full(200, level)
    new = step(u, op, FISHER, 0.1, 1e-3)
    assert np.array_equal(new, u)
    g = GridSpec(-10.0, 10.0, 200, 1.0)
    assert np.array_equal(run(u, op, FISHER, g).snapshots[-1][1], u)


def test_zero_initial_gives_empty_track():
    g = GridSpec(-50.0, 10.0, 128, 1.0)
    res = run(np.zeros(128), DOUBLED, FISHER, g)
    assert res.track.times == [] and res.fitted_speed is None
    assert np.all(res.snapshots[-1][1] == 0.0)


def test_rejects_bad_initial():
    g = GridSpec(-50.0, 10.0, 128, 1.0)
    with pytest.raises(ValueError):
        run(np.full(128, 1.5), DOUBLED, FISHER, g)
    with pytest.raises(ValueError):
        run(np.zeros(64), DOUBLED, FISHER, g)


def test_blow_up(monkeypatch):
    # a runaway time step overflows the update instead of being clipped away
    monkeypatch.setattr(pdesim, "stable_dt", lambda *a: 1e305)
    g = GridSpec(-5.0, 5.0, 4001, 1e306)
    with pytest.raises(BlowUp) as err:
        run(np.clip(0.5 + 20 * g.x, 0, 1), OperatorSpec(4, 2), FISHER, g)
    assert err.value.step_index == 1


def test_boundary_contamination(doubled_profile):
    g = GridSpec(-20.0, 20.0, 400, 20.0, snapshot_stride=50)
    with pytest.raises(BoundaryContamination) as err:
        run(profile_on_grid(doubled_profile, g.x), DOUBLED, FISHER, g)
    assert err.value.track.times


def test_front_position():
    x = np.linspace(0, 1, 11)
    assert front_position(x, x, 0.55) == pytest.approx(0.55)
    assert front_position(x, np.zeros(11), 0.5) is None


def test_profile_persistence(doubled_profile):
    T = 10.0
    g = GridSpec(*suggested_domain(3.0, T, 30.0), 1600, T)
    res = run(profile_on_grid(doubled_profile, g.x), DOUBLED, FISHER, g)
    assert res.fitted_speed == pytest.approx(3.0, rel=0.05)
    assert res.track.fit_residual < 0.05
    pos = np.asarray(res.track.positions)
    assert np.all(np.diff(pos) < 0)


def test_translated_profile_error_is_dx_limited(doubled_profile):
    errs = []
    for nx in (400, 800):
        g = GridSpec(-40.0, 30.0, nx, 2.0)
        res = run(profile_on_grid(doubled_profile, g.x), DOUBLED, FISHER, g)
        t, u = res.snapshots[-1]
        exact = profile_on_grid(doubled_profile, g.x, shift=-3.0 * t)
        errs.append(np.max(np.abs(u - exact)))
    assert errs[0] < 2e-2
    assert errs[1] < errs[0]


def test_step_function_fisher():
    T = 60.0
    g = GridSpec(-(2 * T + 60), 20.0, 1400, T)
    res = run((g.x > 0).astype(float), OperatorSpec(2, 2, "single_q"), FISHER, g,
              keep_snapshots=False)
    assert res.fitted_speed == pytest.approx(2.0, rel=0.05)


def test_grid_convergence(doubled_profile):
    T = 6.0
    speeds = []
    for nx in (600, 1200):
        g = GridSpec(*suggested_domain(3.0, T, 30.0), nx, T)
        speeds.append(run(profile_on_grid(doubled_profile, g.x), DOUBLED, FISHER, g,
                          keep_snapshots=False).fitted_speed)
    assert abs(speeds[0] - speeds[1]) < 0.05 * 3.0


@settings(max_examples=100)
@given(st.sampled_from(OPS), st.integers(0, 2**32 - 1))
def test_clipping_keeps_range(op, seed):
    rng = np.random.default_rng(seed)
    u = rng.uniform(0, 1, 96)
    # flat guard bands so the run is not aborted before it starts
    u[:12], u[-12:] = 0.0, 1.0
    g = GridSpec(-10.0, 10.0, 96, 0.05, snapshot_stride=1)
    try:
        res = run(u, op, FISHER, g)
    except BoundaryContamination as err:
        snaps = err.snapshots
    else:
        snaps = res.snapshots
    for _, v in snaps:
        assert np.all(v >= 0.0) and np.all(v <= 1.0)
    assert len(snaps) > 1
