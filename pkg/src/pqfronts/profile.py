"""Wave profiles rebuilt from an admissible shoot.

Along a front u(z), z = x + ct, the slope is u'(z) = R(y(u)), so the
profile follows from one autonomous ODE once y(u) is known.  The anchor
u(0) = H/2 fixes the translation.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import PchipInterpolator

from .operator import make_r
from .shooting import Classification, ShootOutcome

__all__ = [
    "WaveProfile",
    "TailRates",
    "y_interpolant",
    "reconstruct_profile",
    "tail_exponents",
    "profile_on_grid",
]

Z_CAP = 1e4
TAIL_WINDOW = 1e-3
MIN_TAIL_SAMPLES = 8


@dataclass
class WaveProfile:
    """Sampled monotone front with u(0) = anchor (H/2 by default)."""

    c: float
    H: float
    z: np.ndarray
    u: np.ndarray
    du_dz: np.ndarray
    tail_tol: float
    anchor: float

    @property
    def samples(self):
        return np.column_stack([self.z, self.u])

    @property
    def z_span(self):
        return float(self.z[0]), float(self.z[-1])


def y_interpolant(shoot: ShootOutcome):
    """Monotone cubic interpolant of y(u), clamped to be nonnegative.

    Above the switch point it interpolates the uniform samples; below it
    works with m = y/u^{q'} against ln u, and close to u = H with ln y
    against ln(H - u).  Both keep the ends accurate far below the spacing
    of the uniform grid.
    """
    u_sw, qp = shoot.u_switch, shoot.qprime
    keep = shoot.u >= u_sw
    # include the last node below the switch so the two pieces overlap
    first = max(int(np.argmax(keep)) - 1, 0)
    body = PchipInterpolator(shoot.u[first:], shoot.y[first:], extrapolate=False)
    if shoot.tail_u.size >= 2:
        lu = np.log(shoot.tail_u[::-1])
        tail = PchipInterpolator(lu, shoot.tail_m[::-1], extrapolate=False)
        lu_min = float(lu[0])
        m_floor = float(shoot.tail_m[-1])
    else:
        tail = None
    if shoot.head_gap.size >= 2 and np.all(shoot.head_y > 0.0):
        head = PchipInterpolator(np.log(shoot.head_gap), np.log(shoot.head_y),
                                 extrapolate=False)
        gap_lo, gap_hi = float(shoot.head_gap[0]), float(shoot.head_gap[-1])
    else:
        head = None
    negative = []

    def y_of(u):
        u = np.atleast_1d(np.asarray(u, dtype=float))
        out = np.zeros_like(u)
        hi = u >= u_sw
        out[hi] = body(np.minimum(u[hi], shoot.H))
        if head is not None:
            gap = shoot.H - u
            near = (gap >= gap_lo) & (gap <= gap_hi)
            out[near] = np.exp(head(np.log(gap[near])))
        lo = (u > 0.0) & ~hi
        if tail is not None and lo.any():
            lu_ = np.log(u[lo])
            m = np.where(lu_ >= lu_min, tail(np.maximum(lu_, lu_min)), m_floor)
            out[lo] = u[lo] ** qp * m
        if np.any(out < 0.0) and not negative:
            negative.append(True)
            warnings.warn("y interpolant went negative; clamped to 0", RuntimeWarning,
                          stacklevel=2)
        return np.clip(np.nan_to_num(out), 0.0, None)

    return y_of


def reconstruct_profile(shoot: ShootOutcome, tail_tol: float = 1e-6, anchor: float = 0.5,
                        z_cap: float = Z_CAP, n_samples: int = 4001) -> WaveProfile:
    """Integrate du/dz = R(y(u)) both ways from u(0) = anchor*H.

    Integration stops once u is within ``tail_tol*H`` of either equilibrium
    or |z| reaches ``z_cap``.  The returned samples merge a uniform z grid
    with the integrator's own nodes, so the tails stay resolved.
    """
    if shoot.classification is not Classification.ADMISSIBLE:
        raise ValueError(f"profile needs an admissible shoot, got {shoot.classification.value}")
    if shoot.op is None:
        raise ValueError("shoot carries no operator; use integrate_backward()")
    if not 0.0 < tail_tol < 1.0:
        raise ValueError("tail_tol must lie in (0, 1)")
    H = shoot.H
    u0 = anchor * H
    lo_lvl, hi_lvl = tail_tol * H, (1.0 - tail_tol) * H
    R = make_r(shoot.op)
    y_of = y_interpolant(shoot)

    def rate(u):
        return R(float(y_of(u)[0]))

    if not lo_lvl < u0 < hi_lvl:
        return WaveProfile(shoot.c, H, np.array([0.0]), np.array([u0]),
                           np.array([rate(u0)]), tail_tol, anchor)

    def rhs(z, u):
        return [rate(min(max(u[0], 0.0), H))]

    # aim slightly inside the bands so event rounding cannot land outside
    ev_lo, ev_hi = lo_lvl * (1.0 - 1e-8), H - (H - hi_lvl) * (1.0 - 1e-8)

    def hit_low(z, u):
        return u[0] - ev_lo
    hit_low.terminal = True

    def hit_high(z, u):
        return u[0] - ev_hi
    hit_high.terminal = True

    opts = dict(method="LSODA", rtol=1e-10, atol=1e-14 * H, dense_output=True)
    left = solve_ivp(rhs, (0.0, -z_cap), [u0], events=[hit_low], **opts)
    right = solve_ivp(rhs, (0.0, z_cap), [u0], events=[hit_high], **opts)
    zl, zr = float(left.t[-1]), float(right.t[-1])
    if not len(left.t_events[0]) or not len(right.t_events[0]):
        warnings.warn(f"profile truncated at |z| = {z_cap} before reaching tail_tol",
                      RuntimeWarning, stacklevel=2)

    zs_left = np.union1d(np.linspace(zl, 0.0, n_samples // 2 + 1), left.t)
    zs_right = np.union1d(np.linspace(0.0, zr, n_samples // 2 + 1), right.t)
    ul = left.sol(zs_left[zs_left < 0.0])[0]
    ur = right.sol(zs_right[zs_right > 0.0])[0]
    z = np.concatenate([zs_left[zs_left < 0.0], [0.0], zs_right[zs_right > 0.0]])
    u = np.concatenate([ul, [u0], ur])
    keep = np.concatenate([[True], np.diff(u) > 0.0])
    z, u = z[keep], u[keep]
    du = np.array([rate(x) for x in u])
    return WaveProfile(shoot.c, H, z, u, du, tail_tol, anchor)


class TailRates(NamedTuple):
    """Exponential decay rates of u (left) and H - u (right); None if unavailable."""

    left: float | None
    right: float | None


def _fit_rate(z, w):
    if z.size < MIN_TAIL_SAMPLES:
        return None
    slope = np.polyfit(z, np.log(w), 1)[0]
    return float(abs(slope))


def tail_exponents(profile: WaveProfile) -> TailRates:
    """Log-linear fits of the two tails over the samples within 1e-3 of each equilibrium.

    A side with fewer than eight such samples comes back as ``None``.
    """
    H = profile.H
    z, u = profile.z, profile.u
    lm = (u > 0.0) & (u <= TAIL_WINDOW * H)
    rm = (u < H) & (H - u <= TAIL_WINDOW * H)
    return TailRates(_fit_rate(z[lm], u[lm]), _fit_rate(z[rm], H - u[rm]))


def _tail_model(w0, dw0, w1, dw1):
    """Fit dw/dz = k w^alpha through two tail samples; returns (k, alpha)."""
    alpha = 1.0
    if w1 != w0 and dw0 > 0 and dw1 > 0:
        alpha = math.log(dw1 / dw0) / math.log(w1 / w0)
    return dw0 / w0**alpha, alpha


def _extend(w0, k, alpha, dist):
    """Solve dw/ds = -k w^alpha from w(0) = w0 over the distances ``dist`` >= 0."""
    if abs(1.0 - alpha) < 1e-6:
        return w0 * np.exp(-k / w0 ** (alpha - 1.0) * dist)
    base = w0 ** (1.0 - alpha) - (1.0 - alpha) * k * dist
    out = np.zeros_like(dist)
    pos = base > 0.0
    out[pos] = base[pos] ** (1.0 / (1.0 - alpha))
    return out


def profile_on_grid(profile: WaveProfile, x: np.ndarray, shift: float = 0.0) -> np.ndarray:
    """Evaluate the profile at z = x - shift, extending both tails past the samples.

    Beyond the sampled span each tail follows the power law dw/dz = k w^alpha
    fitted to its two outermost samples (w = u on the left, H - u on the
    right).  alpha = 1 gives exponential decay; alpha < 1, as for q > 2,
    reaches the equilibrium at a finite distance and is exactly zero after.
    """
    H = profile.H
    z = np.asarray(x, dtype=float) - shift
    zp, up, dp = profile.z, profile.u, profile.du_dz
    out = np.interp(z, zp, up)
    if zp.size < 2:
        return np.where(z < zp[0], 0.0, np.where(z > zp[0], H, up[0]))
    below, above = z < zp[0], z > zp[-1]
    with np.errstate(over="ignore", under="ignore", divide="ignore", invalid="ignore"):
        if below.any():
            k, alpha = _tail_model(up[0], dp[0], up[1], dp[1])
            out[below] = _extend(up[0], k, alpha, zp[0] - z[below])
        if above.any():
            w = H - up
            k, alpha = _tail_model(w[-1], dp[-1], w[-2], dp[-2])
            out[above] = H - _extend(w[-1], k, alpha, z[above] - zp[-1])
    return np.clip(np.nan_to_num(out, nan=0.0), 0.0, H)
