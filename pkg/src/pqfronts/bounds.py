"""Closed-form and subsolution-based bounds on the critical speed.

All formulas are stated for the problem on [0, 1].  :func:`speed_bounds`
handles a reaction on [0, H] by rescaling it to the unit interval and mapping
the resulting speeds back (c_H = c_unit / H).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict
from typing import NamedTuple

from .errors import BoundUndefined, NoCertificate
from .operator import Mode, OperatorSpec, invertibility_limit
from .reaction import ReactionSpec, rescale_to_unit, slope_limits

__all__ = [
    "SubsolutionParams",
    "BoundSet",
    "CompetitiveBounds",
    "lower_bound",
    "upper_bound_cplus",
    "cplus_branch",
    "g_script",
    "minimize_g_script",
    "numeric_cplus",
    "competitive_bounds",
    "speed_bounds",
]

BETA_FLOOR = 1e-12
COMPETITIVE_BETA_SHRINK = 1e-9


@dataclass(frozen=True)
class SubsolutionParams:
    """Test function y(u) = Q(beta u^alpha) with alpha fixed at q' - 1."""

    alpha: float
    beta: float
    c: float

    @classmethod
    def for_operator(cls, op: OperatorSpec, beta: float, c: float):
        if beta <= 0:
            raise ValueError("beta must be positive")
        s0, _ = invertibility_limit(op)
        if beta > s0:
            raise ValueError(f"beta={beta} leaves the invertible range [0, {s0}]")
        return cls(op.q_conj - 1.0, beta, c)


@dataclass(frozen=True)
class BoundSet:
    lower: float
    upper_analytic: float
    upper_case: str
    upper_numeric: float | None = None
    competitive_window: tuple[float, float] | None = None
    window_empty: bool | None = None

    def to_record(self) -> dict:
        return asdict(self)


def _check_L(L, name):
    if not (L > 0 and math.isfinite(L)):
        raise BoundUndefined(f"{name} must be finite and positive, got {L}")


def _q_constant(q):
    qp = q / (q - 1.0)
    return qp ** (1.0 / qp) * q ** (1.0 / q)


def lower_bound(op: OperatorSpec, L0: float) -> float:
    """L0^{1/q'} q'^{1/q'} q^{1/q}, times 2^{1/q} for the doubled p = q operator."""
    _check_L(L0, "L0")
    q = op.q
    val = L0 ** (1.0 / op.q_conj) * _q_constant(q)
    if op.doubled:
        val *= 2.0 ** (1.0 / q)
    return val


def upper_bound_cplus(op: OperatorSpec, L_plus: float):
    """Piecewise analytic upper bound; returns ``(value, case)``.

    ``case`` is one of ``"i"``, ``"ii"``, ``"iii"`` for p > q, ``"pq_equal"``
    for the doubled operator and ``"single_q"`` for the pure q-Laplacian.
    """
    _check_L(L_plus, "L+")
    if op.mode is Mode.COMPETITIVE:
        raise ValueError("competitive operators use competitive_bounds()")
    p, q = op.p, op.q
    qp = op.q_conj
    if op.mode is Mode.SINGLE_Q:
        return L_plus ** (1.0 / qp) * _q_constant(q), "single_q"
    if op.doubled:
        return 2.0 ** (1.0 / q) * L_plus ** (1.0 / qp) * _q_constant(q), "pq_equal"
    S = p + q - 2.0
    if L_plus <= S:
        return cplus_branch(p, q, L_plus, "i"), "i"
    if L_plus <= (p - 1.0) / (q - 1.0) * S:
        return cplus_branch(p, q, L_plus, "ii"), "ii"
    return cplus_branch(p, q, L_plus, "iii"), "iii"


def cplus_branch(p: float, q: float, L_plus: float, case: str) -> float:
    """Evaluate one branch of the piecewise c+ regardless of where L+ falls."""
    S = p + q - 2.0
    if case == "i":
        return L_plus ** ((q - 1.0) / q) * q / (q - 1.0) * S ** (1.0 / q)
    if case == "ii":
        return p * S / (q - 1.0)
    if case == "iii":
        return (L_plus ** ((p - 1.0) / p) * p / ((q - 1.0) ** (1.0 / p) * (p - 1.0) ** ((p - 1.0) / p))
                * S ** (1.0 / p))
    raise ValueError(f"unknown case {case!r}")


def _g_coeff(op):
    if op.mode is Mode.COOPERATIVE:
        return (op.p - 1.0) / (op.q - 1.0)
    return 0.0


def g_script(op: OperatorSpec, L_plus: float, c: float, beta):
    """G_c(beta) = (p-1)/(q-1) beta^p + beta^q - c beta + L+.

    In the single-q and competitive modes the p-term is dropped (for the
    competitive operator that is the u-independent sufficient condition).
    A non-positive value certifies that c is admissible.
    """
    A = _g_coeff(op)
    return A * beta**op.p + beta**op.q - c * beta + L_plus


def _dg(op, c, beta):
    A = _g_coeff(op)
    return A * op.p * beta ** (op.p - 1.0) + op.q * beta ** (op.q - 1.0) - c


def _d2g(op, beta):
    A = _g_coeff(op)
    return (A * op.p * (op.p - 1.0) * beta ** (op.p - 2.0)
            + op.q * (op.q - 1.0) * beta ** (op.q - 2.0))


class GMinimum(NamedTuple):
    beta: float
    value: float


def minimize_g_script(op: OperatorSpec, L_plus: float, c: float) -> GMinimum:
    """Minimise the strictly convex G_c over beta > 0 (beta <= s0 when competitive).

    Safeguarded Newton on G_c' = 0, started at the minimiser of the one-power
    envelope and kept inside ``[1e-12, beta_cap]``; bisection takes over if a
    Newton step leaves the bracket.
    """
    p, q = op.p, op.q
    A = _g_coeff(op)
    if A > 0:
        beta_cap = (c * (q - 1.0) / (p - 1.0)) ** (1.0 / (p - 1.0)) + 1.0
        beta = (c * (q - 1.0) / (q * (p + q - 2.0))) ** (1.0 / (q - 1.0))
    else:
        beta_cap = (c / q) ** (1.0 / (q - 1.0)) + 1.0
        beta = (c / q) ** (1.0 / (q - 1.0))
    if op.mode is Mode.COMPETITIVE:
        s0, _ = invertibility_limit(op)
        beta_cap = min(beta_cap, s0 * (1.0 - COMPETITIVE_BETA_SHRINK))
    lo, hi = BETA_FLOOR, beta_cap
    if _dg(op, c, hi) <= 0.0:
        # minimiser at or beyond the cap: G is decreasing on the whole range
        return GMinimum(hi, g_script(op, L_plus, c, hi))
    if _dg(op, c, lo) >= 0.0:
        return GMinimum(lo, g_script(op, L_plus, c, lo))
    beta = min(max(beta, lo), hi)
    for _ in range(200):
        d = _dg(op, c, beta)
        if d > 0:
            hi = beta
        else:
            lo = beta
        nb = beta - d / _d2g(op, beta)
        if not lo < nb < hi:
            nb = 0.5 * (lo + hi)
        if abs(nb - beta) <= 1e-15 * nb or hi - lo <= 1e-15 * hi:
            beta = nb
            break
        beta = nb
    return GMinimum(beta, g_script(op, L_plus, c, beta))


def numeric_cplus(op: OperatorSpec, L_plus: float, tol: float = 1e-6,
                  c_cap: float | None = None) -> float:
    """Smallest c (to ``tol``) for which min_beta G_c(beta) <= 0.

    Bisection in c between the q-only envelope bound (never certified) and the
    analytic c+ (always certified).  In competitive mode beta is restricted to
    the invertible range and the search stops at ``c_cap`` (default ten times
    the lower bound), raising :class:`NoCertificate` if nothing is found.
    """
    _check_L(L_plus, "L+")
    lo = L_plus ** (1.0 / op.q_conj) * _q_constant(op.q)
    if op.doubled:
        lo *= 2.0 ** (1.0 / op.q)
    if op.mode is Mode.COMPETITIVE:
        hi = 10.0 * lo if c_cap is None else c_cap
        if minimize_g_script(op, L_plus, hi).value > 0:
            raise NoCertificate(f"no admissible beta <= s0 for any c <= {hi}")
    else:
        hi, _ = upper_bound_cplus(op, L_plus)
    if minimize_g_script(op, L_plus, lo).value <= 0:
        return lo
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if minimize_g_script(op, L_plus, mid).value <= 0:
            hi = mid
        else:
            lo = mid
    return hi


class CompetitiveBounds(NamedTuple):
    c_lower: float
    c_upper: float
    c_max: float
    window_empty: bool


def competitive_bounds(op: OperatorSpec, L0: float, L_plus: float) -> CompetitiveBounds:
    """Sandwich for c* in competitive mode plus the cap of the certified window.

    The window [c*, c_max] only carries the analytic guarantee; an empty
    window does not mean no speed is admissible.
    """
    if op.mode is not Mode.COMPETITIVE:
        raise ValueError("competitive_bounds() needs a competitive operator")
    p, q = op.p, op.q
    c_lower = lower_bound(op, L0)
    c_upper = L_plus ** (1.0 / op.q_conj) * _q_constant(q)
    c_max = q * ((q - 1.0) / (p - 1.0)) ** ((q - 1.0) / (p - q))
    return CompetitiveBounds(c_lower, c_upper, c_max, c_upper > c_max)


def speed_bounds(op: OperatorSpec, r: ReactionSpec, numeric: bool = True) -> BoundSet:
    """All bounds for the front connecting 0 and H, in the H problem's speed units."""
    unit = rescale_to_unit(r).with_qprime(op.q_conj)
    H = r.H
    L0, Lp = slope_limits(unit)
    lower = lower_bound(op, L0) / H
    if op.mode is Mode.COMPETITIVE:
        cb = competitive_bounds(op, L0, Lp)
        up_num = None
        if numeric:
            try:
                up_num = numeric_cplus(op, Lp) / H
            except NoCertificate:
                up_num = None
        return BoundSet(lower, cb.c_upper / H, "competitive", up_num,
                        (cb.c_upper / H, cb.c_max / H), cb.window_empty)
    upper, case = upper_bound_cplus(op, Lp)
    up_num = numeric_cplus(op, Lp) / H if numeric else None
    return BoundSet(lower, upper / H, case, up_num)
