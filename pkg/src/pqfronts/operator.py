"""Diffusion kernel of the (p,q)-Laplacian.

For increasing fronts only nonnegative slopes matter, so everything here is
defined on ``s >= 0``.  ``Q`` is the primitive of the derivative of the flux
``|s|^{p-2}s + |s|^{q-2}s`` (with the sign of the p-term flipped in the
competitive mode) and ``R`` is its inverse.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainBreach

__all__ = [
    "Mode",
    "OperatorSpec",
    "AsymptoticConstants",
    "q_value",
    "q_derivative",
    "invertibility_limit",
    "r_inverse",
    "r_asymptotic_constants",
    "r_closed_form_2q",
]

Y_FLOOR = 1e-300
BOUNDARY_SLACK = 1e-12
_EPS = np.finfo(float).eps


class Mode(str, enum.Enum):
    COOPERATIVE = "cooperative"
    COMPETITIVE = "competitive"
    SINGLE_Q = "single_q"


@dataclass(frozen=True)
class OperatorSpec:
    """Exponents and sign convention of the diffusion operator.

    In ``single_q`` mode ``p`` is ignored and set equal to ``q``.  The
    cooperative mode with ``p == q`` is the doubled operator
    ``(2|u'|^{q-2}u')'``.
    """

    p: float
    q: float
    mode: Mode = Mode.COOPERATIVE

    def __post_init__(self):
        mode = Mode(self.mode)
        object.__setattr__(self, "mode", mode)
        p, q = float(self.p), float(self.q)
        if not (math.isfinite(p) and math.isfinite(q)):
            raise ValueError("exponents must be finite")
        if q < 2:
            raise ValueError(f"q must be >= 2, got {q}")
        if mode is Mode.SINGLE_Q:
            p = q
        elif mode is Mode.COOPERATIVE and p < q:
            raise ValueError(f"cooperative mode needs q <= p, got p={p}, q={q}")
        elif mode is Mode.COMPETITIVE and not p > q:
            raise ValueError(f"competitive mode needs q < p, got p={p}, q={q}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @property
    def q_conj(self) -> float:
        """Conjugate exponent q' = q/(q-1)."""
        return self.q / (self.q - 1.0)

    @property
    def p_conj(self) -> float:
        return self.p / (self.p - 1.0)

    @property
    def doubled(self) -> bool:
        return self.mode is Mode.COOPERATIVE and self.p == self.q

    def to_record(self) -> dict:
        return {"p": self.p, "q": self.q, "mode": self.mode.value}


def _coefficients(op: OperatorSpec):
    """Return (a_q, a_p) with Q(s) = a_q s^q + a_p s^p."""
    a_q = (op.q - 1.0) / op.q
    if op.mode is Mode.SINGLE_Q:
        return a_q, 0.0
    a_p = (op.p - 1.0) / op.p
    if op.mode is Mode.COMPETITIVE:
        return a_q, -a_p
    return a_q, a_p


def q_value(op: OperatorSpec, s):
    """Evaluate Q(s) for s >= 0 (scalar or array)."""
    a_q, a_p = _coefficients(op)
    return a_q * s**op.q + a_p * s**op.p


def q_derivative(op: OperatorSpec, s):
    """Q'(s), i.e. the local diffusivity of the operator at slope s."""
    a_q, a_p = _coefficients(op)
    return a_q * op.q * s ** (op.q - 1.0) + a_p * op.p * s ** (op.p - 1.0)


def invertibility_limit(op: OperatorSpec):
    """Largest slope s0 on which Q is increasing, and y_max = Q(s0).

    Both are ``inf`` outside the competitive mode.
    """
    if op.mode is not Mode.COMPETITIVE:
        return math.inf, math.inf
    s0 = ((op.q - 1.0) / (op.p - 1.0)) ** (1.0 / (op.p - op.q))
    return s0, q_value(op, s0)


def _r_scalar(op: OperatorSpec, y: float, a_q: float, a_p: float,
              s0: float, y_max: float) -> float:
    if y < Y_FLOOR:
        return 0.0
    q, p = op.q, op.p
    if a_p < 0.0:
        if y > y_max * (1.0 + BOUNDARY_SLACK):
            raise DomainBreach(f"y={y!r} exceeds the invertibility limit {y_max!r}")
        # Q'(s0) = 0: within rounding of y_max the inverse is only known to
        # ~sqrt(eps), and s0 itself already has a residual at rounding level.
        # The two terms of Q cancel, so rounding scales with their size.
        if y_max - y <= 8.0 * _EPS * (a_q * s0**q - a_p * s0**p):
            return s0
        hi = s0
        # Q(s) >= a_q s^q / 2 while |a_p| s^p <= a_q s^q / 2
        s_half = (a_q / (2.0 * -a_p)) ** (1.0 / (p - q))
        cand = (2.0 * y / a_q) ** (1.0 / q)
        if cand <= s_half:
            hi = cand
    else:
        # Q(s) >= a_q s^q and Q(s) >= a_p s^p, so both branches bound the root
        hi = (y / a_q) ** (1.0 / q)
        if a_p > 0.0:
            hi = min(hi, (y / a_p) ** (1.0 / p))
    lo = 0.0
    # Q is convex for cooperative kernels, so Newton from the right is monotone.
    s = hi
    for _ in range(200):
        g = a_q * s**q + a_p * s**p - y
        if g > 0.0:
            hi = s
        elif g < 0.0:
            lo = s
        else:
            return s
        dg = a_q * q * s ** (q - 1.0) + a_p * p * s ** (p - 1.0)
        step_ok = dg > 0.0
        if step_ok:
            s_new = s - g / dg
            step_ok = lo < s_new < hi
        if not step_ok:
            s_new = 0.5 * (lo + hi)
        if abs(s_new - s) <= 4e-16 * s_new or hi - lo <= 4e-16 * hi:
            return s_new
        s = s_new
    return s


def r_inverse(op: OperatorSpec, y):
    """Inverse of Q on its increasing branch.

    Accepts a scalar or an array.  In competitive mode values above
    ``y_max`` (beyond a relative slack of 1e-12) raise :class:`DomainBreach`.
    """
    a_q, a_p = _coefficients(op)
    s0, y_max = invertibility_limit(op)
    if np.ndim(y) == 0:
        y = float(y)
        if y < 0.0:
            raise ValueError("R is only defined for y >= 0")
        return _r_scalar(op, y, a_q, a_p, s0, y_max)
    arr = np.asarray(y, dtype=float)
    if np.any(arr < 0.0):
        raise ValueError("R is only defined for y >= 0")
    out = np.empty_like(arr)
    for idx, val in np.ndenumerate(arr):
        out[idx] = _r_scalar(op, float(val), a_q, a_p, s0, y_max)
    return out


def make_r(op: OperatorSpec):
    """Return a fast scalar ``R`` closure for use inside ODE right-hand sides.

    Negative arguments are treated as zero; this is how integrators are kept
    from tripping over round-off just below the equilibrium ``y = 0``.
    Competitive kernels saturate at s0 above ``y_max``: trial stages may poke
    past the limit before an integrator event catches the breach.
    """
    a_q, a_p = _coefficients(op)
    s0, y_max = invertibility_limit(op)

    def r(y):
        if y <= 0.0:
            return 0.0
        if y >= y_max:
            return s0
        return _r_scalar(op, y, a_q, a_p, s0, y_max)

    return r


class AsymptoticConstants(NamedTuple):
    c0: float
    exponent0: float
    c_inf: float | None
    exponent_inf: float | None


def r_asymptotic_constants(op: OperatorSpec) -> AsymptoticConstants:
    """Constants in R(s) ~ c0 s^{1/q} (s -> 0) and R(s) ~ c_inf s^{1/p} (s -> inf).

    The large-s branch does not exist in competitive mode and is returned as
    ``None`` there.
    """
    q, p = op.q, op.p
    if op.doubled:
        c = (q / (2.0 * (q - 1.0))) ** (1.0 / q)
        return AsymptoticConstants(c, 1.0 / q, c, 1.0 / q)
    c0 = (q / (q - 1.0)) ** (1.0 / q)
    if op.mode is Mode.COMPETITIVE:
        return AsymptoticConstants(c0, 1.0 / q, None, None)
    if op.mode is Mode.SINGLE_Q:
        return AsymptoticConstants(c0, 1.0 / q, c0, 1.0 / q)
    return AsymptoticConstants(c0, 1.0 / q, (p / (p - 1.0)) ** (1.0 / p), 1.0 / p)


def r_closed_form_2q(q: float, y):
    """Radical formula for R when p = 2q (cooperative), independent of Newton.

    Uses the cancellation-free rewriting of the inner root, so it stays
    accurate for tiny ``y``.
    """
    if q < 2:
        raise ValueError("q must be >= 2")
    y = np.asarray(y, dtype=float)
    a = (q - 1.0) / q
    b = 2.0 * (2.0 * q - 1.0) / q
    inner = b * y / (a + np.sqrt(a * a + b * y))
    out = (q / (2.0 * q - 1.0) * inner) ** (1.0 / q)
    return float(out) if out.ndim == 0 else out
