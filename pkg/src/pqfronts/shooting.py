"""Backward shooting on the reduced problem y' = c R(y) - f(u), y(0) = y(H) = 0.

A shoot starts at u = H from the regularised seed ``y(H) = seed_delta`` and
runs towards u = 0 in two legs:

1. the *body* leg integrates y itself down to ``u_switch = switch_fraction*H``;
2. the *tail* leg integrates the scaled unknown m = y / u^{q'} in the
   logarithmic variable s = ln u, down to ``u_tail = tail_depth*H``.

Near the origin R(y) ~ c0 y^{1/q} and f(u) ~ L0 u^{q'-1}, so the tail
equation becomes autonomous,

    dm/ds = c c0 m^{1/q} - L0 - q' m.

Going backwards in s its lower equilibrium attracts and its upper one repels.
A trajectory that ends below the upper equilibrium settles onto y ~ m1 u^{q'}
and reaches y(0) = 0; one that ends above it (or finds no equilibrium at all)
blows up in m, i.e. y(0) > 0.  Deciding admissibility from this picture is
sharp even where y(0) itself is far below double precision, which is what
happens just under a pulled critical speed.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field, asdict, replace

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .bounds import BoundSet, speed_bounds
from .errors import BracketFailure, IntegrationFailure
from .operator import (Mode, OperatorSpec, invertibility_limit, make_r,
                       r_asymptotic_constants, r_inverse)
from .reaction import ReactionSpec, slope_limits

__all__ = [
    "Classification",
    "ShootSettings",
    "ShootOutcome",
    "CriticalSpeedResult",
    "WindowScan",
    "integrate_backward",
    "classify_speed",
    "critical_speed",
    "competitive_window",
    "tail_equilibria",
]

log = logging.getLogger(__name__)


class Classification(str, enum.Enum):
    ADMISSIBLE = "admissible"
    INADMISSIBLE = "inadmissible"
    DOMAIN_BREACH = "domain_breach"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class ShootSettings:
    seed_delta: float = 1e-12
    rtol: float = 1e-10
    atol: float = 1e-12
    method: str = "LSODA"
    n_grid: int = 2048
    n_tail: int = 256
    switch_fraction: float = 0.1
    tail_depth: float = 1e-100
    tail_margin: float = 1e-6
    blowup_factor: float = 1e8
    bisect_tol: float = 1e-4
    max_expansions: int = 10

    def __post_init__(self):
        if self.seed_delta < 0:
            raise ValueError("seed_delta must be nonnegative")
        if not 0 < self.switch_fraction < 1:
            raise ValueError("switch_fraction must lie in (0, 1)")
        if not 0 < self.tail_depth < self.switch_fraction:
            raise ValueError("tail_depth must lie in (0, switch_fraction)")
        if self.n_grid < 16 or self.n_tail < 8:
            raise ValueError("grids too coarse")

    def to_record(self) -> dict:
        return asdict(self)


@dataclass
class ShootOutcome:
    """Result of one backward shoot at speed ``c``.

    ``u``/``y`` sample the solution on a uniform grid over [0, H] (NaN where
    the shoot never got, after a domain breach).  ``tail_u``/``tail_m`` hold
    the scaled tail m = y/u^{q'} on a log grid below ``u_switch``, and
    ``head_gap``/``head_y`` resolve y near u = H on a log grid in H - u.
    """

    c: float
    H: float
    qprime: float
    u: np.ndarray
    y: np.ndarray
    phi: np.ndarray
    tail_u: np.ndarray
    tail_m: np.ndarray
    y_at_zero: float
    max_y: float
    classification: Classification
    u_switch: float
    u_reached: float = 0.0
    tail_threshold: float | None = None
    tail_end: float | None = None
    seed_delta: float = 0.0
    op: OperatorSpec | None = None
    head_gap: np.ndarray = field(default_factory=lambda: np.empty(0))
    head_y: np.ndarray = field(default_factory=lambda: np.empty(0))

    @property
    def samples(self):
        return np.column_stack([self.u, self.y])

    @property
    def phi_samples(self):
        return np.column_stack([self.u, self.phi])

    def summary(self) -> dict:
        return {
            "c": self.c,
            "H": self.H,
            "classification": self.classification.value,
            "y_at_zero": self.y_at_zero,
            "max_y": self.max_y,
            "u_reached": self.u_reached,
            "tail_end": self.tail_end,
            "tail_threshold": self.tail_threshold,
            "seed_delta": self.seed_delta,
        }


def tail_equilibria(c: float, c0: float, L0: float, q: float):
    """Equilibria (m1, m2) of dm/ds = c c0 m^{1/q} - L0 - q' m, or None.

    Works in x = m^{1/q}, where the right-hand side is concave with its
    maximum at x* = (c c0 / (q q'))^{1/(q-1)}.
    """
    if not math.isfinite(L0):
        return None
    qp = q / (q - 1.0)

    def h(x):
        return c * c0 * x - qp * x**q - L0

    xs = (c * c0 / (q * qp)) ** (1.0 / (q - 1.0))
    top = h(xs)
    # a double root sits exactly at the lower bound; absorb round-off there
    if top < -1e-12 * max(L0, 1.0):
        return None
    if top <= 1e-12 * max(L0, 1.0):
        return xs**q, xs**q
    x1 = 0.0 if L0 == 0.0 else brentq(h, 0.0, xs, xtol=1e-15 * xs, rtol=1e-15)
    hi = 2.0 * xs + 1.0
    while h(hi) > 0.0:
        hi *= 2.0
    x2 = brentq(h, xs, hi, xtol=1e-15 * xs, rtol=1e-15)
    return x1**q, x2**q


def _frozen_threshold(c, u, qp, R, f, guess, limit):
    """Upper root in m of the exact tail right-hand side frozen at ``u``."""
    uq = u**qp
    scale = u ** (1.0 - qp)

    def h(m):
        return scale * (c * R(uq * m) - f(u)) - qp * m

    if guess is None or h(guess) < 0.0:
        # look for any point where h is positive first
        m = 1e-6
        while h(m) < 0.0 and m < limit:
            m *= 2.0
        if h(m) < 0.0:
            return None
        lo = m
    else:
        lo = guess
    hi = max(lo * 2.0, 1e-12)
    while h(hi) > 0.0:
        hi *= 2.0
        if hi > limit:
            return None
    return brentq(h, lo, hi, rtol=1e-14)


def _solve(fun, span, y0, settings, events=None, atol=None):
    sol = solve_ivp(fun, span, [y0], method=settings.method, rtol=settings.rtol,
                    atol=settings.atol if atol is None else atol,
                    dense_output=True, events=events)
    if sol.status == -1:
        raise IntegrationFailure(f"integration failed: {sol.message}", reached=float(sol.t[-1]))
    return sol


def integrate_backward(op: OperatorSpec, r: ReactionSpec, c: float,
                       settings: ShootSettings | None = None) -> ShootOutcome:
    """Shoot backwards from y(H) = seed_delta and classify the speed ``c``.

    The classification uses the tail analysis described in the module
    docstring; ``y_at_zero`` is the value the shoot actually reaches at
    u = 0 (continued with the unscaled equation after an m blow-up).
    In competitive mode the shoot stops with ``domain_breach`` as soon as y
    exceeds the invertibility limit.
    """
    out = _shoot(op, r, c, settings or ShootSettings())
    out.op = op
    return out


def _shoot(op, r, c, settings):
    if c < 0:
        raise ValueError("speed must be nonnegative")
    H = r.H
    qp = op.q_conj
    R = make_r(op)
    f = r.scalar_function()
    _, y_max = invertibility_limit(op)
    competitive = op.mode is Mode.COMPETITIVE
    u_sw = settings.switch_fraction * H
    u_tail = settings.tail_depth * H
    grid = np.linspace(0.0, H, settings.n_grid)

    def body(u, y):
        return [c * R(y[0]) - f(u)]

    events = None
    if competitive:
        def breach(u, y):
            return y[0] - y_max
        breach.terminal = True
        breach.direction = 1
        events = [breach]

    # y starts at seed_delta, so a fixed atol would swamp the head of the shoot
    body_atol = settings.atol
    if settings.seed_delta > 0:
        body_atol = min(body_atol, 1e-3 * settings.seed_delta)
    sol = _solve(body, (H, u_sw), settings.seed_delta, settings, events, atol=body_atol)
    if sol.status == 1:
        u_b = float(sol.t_events[0][0])
        mask = grid >= u_b
        y = np.full_like(grid, np.nan)
        y[mask] = np.clip(sol.sol(grid[mask])[0], 0.0, None)
        y[-1] = settings.seed_delta
        phi = np.full_like(grid, np.nan)
        phi[mask] = r_inverse(op, np.minimum(y[mask], y_max))
        return ShootOutcome(c, H, qp, grid, y, phi, np.empty(0), np.empty(0),
                            y_at_zero=math.nan, max_y=float(y_max),
                            classification=Classification.DOMAIN_BREACH,
                            u_switch=u_sw, u_reached=u_b, seed_delta=settings.seed_delta)
    y_sw = float(sol.y[0, -1])

    # tail leg in s = ln u for m = y / u^{q'}
    consts = r_asymptotic_constants(op)
    L0 = slope_limits(r, qprime=qp).L0
    eq = tail_equilibria(c, consts.c0, L0, op.q)
    m_sw = y_sw / u_sw**qp
    cap = settings.blowup_factor * max(1.0, m_sw, eq[1] if eq else 1.0)

    def tail(s, m):
        u = math.exp(s)
        return [u ** (1.0 - qp) * (c * R(u**qp * m[0]) - f(u)) - qp * m[0]]

    def blowup(s, m):
        return m[0] - cap
    blowup.terminal = True
    blowup.direction = 1
    tail_events = [blowup]
    if competitive:
        def tail_breach(s, m):
            return math.exp(qp * s) * m[0] - y_max
        tail_breach.terminal = True
        tail_breach.direction = 1
        tail_events.append(tail_breach)

    s_sw, s_end = math.log(u_sw), math.log(u_tail)
    tsol = _solve(tail, (s_sw, s_end), m_sw, settings, tail_events,
                  atol=settings.atol * max(1.0, m_sw))
    s_stop = float(tsol.t[-1])
    tail_u = np.exp(np.linspace(s_sw, max(s_stop, s_end), settings.n_tail))
    tail_m = tsol.sol(np.log(tail_u))[0]

    threshold = None
    m_end = float(tsol.y[0, -1])
    reached_end = tsol.status == 0
    if competitive and tsol.status == 1 and len(tsol.t_events[1]):
        # the scaled tail crossed y_max: treat exactly like a body breach
        u_b = math.exp(float(tsol.t_events[1][0]))
        y = _sample_y(grid, sol, tsol, qp, u_sw, settings.seed_delta, settings.atol, cutoff=u_b)
        phi = np.where(np.isnan(y), np.nan, r_inverse(op, np.nan_to_num(np.minimum(y, y_max))))
        return ShootOutcome(c, H, qp, grid, y, phi, tail_u, tail_m, math.nan, float(y_max),
                            Classification.DOMAIN_BREACH, u_sw, u_reached=u_b,
                            seed_delta=settings.seed_delta)

    if not reached_end:
        cls = Classification.INADMISSIBLE
    elif eq is None:
        cls = Classification.INADMISSIBLE
    else:
        threshold = _frozen_threshold(c, u_tail, qp, R, f, eq[1], cap)
        if threshold is None:
            # the frozen equation has no equilibria yet; fall back on the limit
            threshold = eq[1]
        gap = (m_end - threshold) / threshold
        if gap < -settings.tail_margin:
            cls = Classification.ADMISSIBLE
        elif gap > settings.tail_margin:
            cls = Classification.INADMISSIBLE
        else:
            cls = Classification.INDETERMINATE

    if reached_end:
        y_zero = max(u_tail**qp * m_end, 0.0)
        if cls is Classification.INADMISSIBLE:
            y_zero = max(_continue_to_zero(body, u_tail, y_zero, settings), 0.0)
        zsol = None
    else:
        u_stop = math.exp(s_stop)
        y_stop = u_stop**qp * m_end
        zsol = _solve(body, (u_stop, 0.0), y_stop, settings)
        y_zero = max(float(zsol.y[0, -1]), 0.0)

    y = _sample_y(grid, sol, tsol, qp, u_sw, settings.seed_delta, settings.atol, zsol=zsol,
                  u_stop=math.exp(s_stop))
    if cls is not Classification.INADMISSIBLE:
        y[0] = 0.0
    else:
        y[0] = y_zero
    phi = r_inverse(op, np.clip(y, 0.0, None))
    max_y = float(max(np.nanmax(y), np.max(sol.y[0])))
    head_gap = H * np.logspace(-10.0, -1.0, settings.n_tail)
    head_y = np.clip(sol.sol(H - head_gap)[0], 0.0, None)
    return ShootOutcome(c, H, qp, grid, y, phi, tail_u, tail_m, float(y_zero), max_y, cls,
                        u_sw, tail_threshold=threshold, tail_end=m_end,
                        seed_delta=settings.seed_delta, head_gap=head_gap, head_y=head_y)


def _check_positive(vals, atol):
    if vals.size and np.nanmin(vals) < -10 * atol:
        raise IntegrationFailure("backward solution turned negative inside (0, H)")


def _continue_to_zero(body, u_start, y_start, settings):
    if u_start <= 0.0:
        return y_start
    zsol = _solve(body, (u_start, 0.0), y_start, settings)
    return float(zsol.y[0, -1])


def _sample_y(grid, sol, tsol, qp, u_sw, seed, atol, zsol=None, u_stop=0.0, cutoff=None):
    y = np.empty_like(grid)
    body = grid >= u_sw
    y[body] = sol.sol(grid[body])[0]
    low = ~body
    ug = grid[low]
    vals = np.empty_like(ug)
    pos = ug > 0.0
    in_tail = pos & (ug >= u_stop)
    vals[in_tail] = ug[in_tail] ** qp * tsol.sol(np.log(ug[in_tail]))[0]
    rest = ~in_tail
    if zsol is not None:
        vals[rest] = zsol.sol(ug[rest])[0]
    else:
        vals[rest] = 0.0
    y[low] = vals
    y[-1] = seed
    if cutoff is not None:
        y[grid < cutoff] = np.nan
    _check_positive(y[1:-1], atol)
    return np.where(np.isnan(y), y, np.clip(y, 0.0, None))


def classify_speed(op: OperatorSpec, r: ReactionSpec, c: float,
                   settings: ShootSettings | None = None) -> Classification:
    """Classify ``c`` from two shoots, with seed_delta and seed_delta/2.

    Disagreement between the two is reported as ``indeterminate``; a domain
    breach in either shoot wins.
    """
    settings = settings or ShootSettings()
    a = integrate_backward(op, r, c, settings).classification
    b = integrate_backward(op, r, c, replace(settings, seed_delta=settings.seed_delta / 2)).classification
    if Classification.DOMAIN_BREACH in (a, b):
        return Classification.DOMAIN_BREACH
    if a is b:
        return a
    log.warning("speed %r classified %s/%s under seed halving", c, a.value, b.value)
    return Classification.INDETERMINATE


@dataclass
class CriticalSpeedResult:
    c_star: float
    bracket: tuple[float, float]
    bound_set: BoundSet
    iterations: int
    seed_delta: float
    settings: ShootSettings
    history: list = field(default_factory=list)
    monotone: bool = True

    def to_record(self) -> dict:
        return {
            "c_star": self.c_star,
            "bracket": list(self.bracket),
            "bounds": self.bound_set.to_record(),
            "iterations": self.iterations,
            "seed_delta": self.seed_delta,
            "settings": self.settings.to_record(),
            "history": [[c, cls.value] for c, cls in self.history],
            "monotone": self.monotone,
        }


def critical_speed(op: OperatorSpec, r: ReactionSpec,
                   settings: ShootSettings | None = None,
                   bounds: BoundSet | None = None) -> CriticalSpeedResult:
    """Bisect for the smallest admissible speed between the analytic bounds.

    Admissible speeds form an upper half-line, so the bracket
    [lower bound, c+] is shrunk until its width is ``bisect_tol`` relative
    to its right end.  The right end is doubled (at most ``max_expansions``
    times) if it does not shoot as admissible.  ``c_star`` is the smallest
    speed that shot admissible.
    """
    settings = settings or ShootSettings()
    if op.mode is Mode.COMPETITIVE:
        raise ValueError("critical_speed() covers cooperative and single_q operators; "
                         "use competitive_window() for competitive ones")
    bounds = bounds or speed_bounds(op, r)
    history = []

    def admissible(c):
        cls = classify_speed(op, r, c, settings)
        history.append((c, cls))
        return cls is Classification.ADMISSIBLE

    lo, hi = bounds.lower, bounds.upper_analytic
    if admissible(lo):
        return CriticalSpeedResult(lo, (lo, lo), bounds, 1, settings.seed_delta, settings,
                                   history, _monotone(history))
    n = 0
    while not admissible(hi):
        n += 1
        lo = hi
        hi *= 2.0
        if n > settings.max_expansions:
            raise BracketFailure(f"no admissible speed found up to {hi}; "
                                 "check seed_delta and tolerances")
    it = 0
    while hi - lo > settings.bisect_tol * hi:
        mid = 0.5 * (lo + hi)
        if admissible(mid):
            hi = mid
        else:
            lo = mid
        it += 1
    return CriticalSpeedResult(hi, (lo, hi), bounds, it, settings.seed_delta, settings,
                               history, _monotone(history))


def _monotone(history):
    """True if no tested speed shot admissible below one that did not."""
    ok = [c for c, cls in history if cls is Classification.ADMISSIBLE]
    bad = [c for c, cls in history if cls is not Classification.ADMISSIBLE]
    return not ok or not bad or min(ok) > max(bad)


@dataclass
class WindowScan:
    speeds: np.ndarray
    classifications: list
    admissible: list
    interval: tuple[float, float] | None
    contiguous: bool

    @property
    def empty(self):
        return not self.admissible

    def to_record(self) -> dict:
        return {
            "speeds": [float(c) for c in self.speeds],
            "classifications": [c.value for c in self.classifications],
            "interval": None if self.interval is None else list(self.interval),
            "contiguous": self.contiguous,
        }


def competitive_window(op: OperatorSpec, r: ReactionSpec,
                       settings: ShootSettings | None = None,
                       n_scan: int = 11, scan_cap: float | None = None,
                       scan_margin: float = 0.25) -> WindowScan:
    """Scan speeds from the lower bound upwards and report the admissible ones.

    The default scan covers ``[c_lower, (1 + scan_margin) max(c_upper, c_max)]``,
    i.e. the range the analytic sandwich places c* in.  Much larger speeds
    keep slopes small and can be admissible even when this scan comes back
    empty; pass ``scan_cap`` to look there.
    """
    if op.mode is not Mode.COMPETITIVE:
        raise ValueError("competitive_window() needs a competitive operator")
    settings = settings or ShootSettings()
    b = speed_bounds(op, r, numeric=False)
    lo = b.lower
    if scan_cap is None:
        scan_cap = (1.0 + scan_margin) * max(b.upper_analytic, b.competitive_window[1])
    speeds = np.linspace(lo, max(lo, scan_cap), n_scan)
    classes = [classify_speed(op, r, float(c), settings) for c in speeds]
    adm = [float(c) for c, k in zip(speeds, classes) if k is Classification.ADMISSIBLE]
    if not adm:
        return WindowScan(speeds, classes, [], None, True)
    idx = [i for i, k in enumerate(classes) if k is Classification.ADMISSIBLE]
    contiguous = idx == list(range(idx[0], idx[-1] + 1))
    return WindowScan(speeds, classes, adm, (adm[0], adm[-1]), contiguous)
