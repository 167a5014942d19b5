"""Explicit finite-difference solver for u_t = (phi(u_x))_x + f(u).

Here phi(D) = |D|^{p-2}D + |D|^{q-2}D (q-term minus p-term in competitive
mode).  Both boundary values are held at those of the initial data.  For
front data (0 on the left, H on the right) an increasing front invades the
zero state by moving left; ``fitted_speed`` is reported as a positive
invasion speed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BlowUp, BoundaryContamination
from .operator import Mode, OperatorSpec
from .reaction import ReactionSpec

__all__ = [
    "GridSpec",
    "FrontTrack",
    "PdeRun",
    "flux",
    "stable_dt",
    "step",
    "front_position",
    "run",
    "suggested_domain",
]

DT_SAFETY = 0.25
DT_REFRESH = 100
GUARD_CELLS = 10
TAIL_GUARD = 1e-3


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid of ``nx`` cells on [x_min, x_max].

    ``dt`` is an optional cap; the step actually used is the smaller of
    it and the stability rule.  Snapshots and front positions are taken
    every ``snapshot_stride`` steps.
    """

    x_min: float
    x_max: float
    nx: int
    t_end: float
    dt: float | None = None
    snapshot_stride: int = 200

    def __post_init__(self):
        if self.nx < 64:
            raise ValueError("nx must be at least 64")
        if not self.x_max > self.x_min:
            raise ValueError("x_max must exceed x_min")
        if self.t_end < 0:
            raise ValueError("t_end must be nonnegative")
        if self.dt is not None and self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.snapshot_stride < 1:
            raise ValueError("snapshot_stride must be positive")

    @property
    def x(self):
        return np.linspace(self.x_min, self.x_max, self.nx)

    @property
    def dx(self):
        return (self.x_max - self.x_min) / (self.nx - 1)

    def to_record(self) -> dict:
        return {"x_min": self.x_min, "x_max": self.x_max, "nx": self.nx, "t_end": self.t_end,
                "dt": self.dt, "snapshot_stride": self.snapshot_stride}


@dataclass
class FrontTrack:
    times: list = field(default_factory=list)
    positions: list = field(default_factory=list)
    fitted_speed: float | None = None
    fit_residual: float | None = None

    def to_record(self) -> dict:
        return {"times": list(self.times), "positions": list(self.positions),
                "fitted_speed": self.fitted_speed, "fit_residual": self.fit_residual}


@dataclass
class PdeRun:
    grid: GridSpec
    snapshots: list
    track: FrontTrack
    steps: int

    @property
    def fitted_speed(self):
        return self.track.fitted_speed


def _signed_coefficients(op: OperatorSpec):
    if op.mode is Mode.SINGLE_Q:
        return 0.0, 1.0
    if op.mode is Mode.COMPETITIVE:
        return -1.0, 1.0
    return 1.0, 1.0


def flux(op: OperatorSpec, D):
    """phi(D) evaluated exactly; continuous at D = 0 since p, q >= 2."""
    bp, bq = _signed_coefficients(op)
    a = np.abs(D)
    out = bq * a ** (op.q - 2.0) * D
    if bp:
        out = out + bp * a ** (op.p - 2.0) * D
    return out


def stable_dt(op: OperatorSpec, u, dx):
    """0.25 dx^2 over the largest local diffusivity, floored at 1."""
    a = np.abs(np.diff(u)) / dx
    diff = (op.q - 1.0) * a ** (op.q - 2.0)
    if op.mode is not Mode.SINGLE_Q:
        diff = diff + (op.p - 1.0) * a ** (op.p - 2.0)
    return DT_SAFETY * dx * dx / max(float(diff.max(initial=0.0)), 1.0)


def step(u, op: OperatorSpec, r: ReactionSpec, dx: float, dt: float):
    """One explicit Euler step with fluxes at the half nodes.

    The first and last values are held fixed; interior values are clipped
    to [0, H].  An overflowing update is returned as NaN rather than
    clipped, so the caller can detect it.
    """
    D = np.diff(u) / dx
    with np.errstate(over="ignore", invalid="ignore"):
        F = flux(op, D)
        inner = u[1:-1] + dt * (np.diff(F) / dx + r(u[1:-1]))
    new = u.copy()
    new[1:-1] = np.where(np.isfinite(inner), np.clip(inner, 0.0, r.H), np.nan)
    return new


def front_position(x, u, level):
    """x where u first crosses ``level`` from below (linear interpolation), or None."""
    above = np.nonzero(u >= level)[0]
    if not above.size or above[0] == 0:
        return None
    i = int(above[0])
    u0, u1 = u[i - 1], u[i]
    return float(x[i - 1] + (level - u0) / (u1 - u0) * (x[i] - x[i - 1]))


def _fit(track: FrontTrack, t_end):
    t = np.asarray(track.times)
    xs = np.asarray(track.positions)
    sel = t >= 0.5 * t_end
    if sel.sum() < 2:
        return
    slope, icpt = np.polyfit(t[sel], xs[sel], 1)
    resid = xs[sel] - (slope * t[sel] + icpt)
    track.fitted_speed = float(-slope)
    track.fit_residual = float(np.sqrt(np.mean(resid**2)))


def run(initial, op: OperatorSpec, r: ReactionSpec, grid: GridSpec,
        keep_snapshots: bool = True) -> PdeRun:
    """Advance ``initial`` to ``grid.t_end`` and measure the front speed.

    The H/2 crossing is recorded every ``snapshot_stride`` steps and a line
    is fitted through the second half of the record.  Raises
    :class:`BoundaryContamination` (carrying the partial record) when the
    crossing comes within ten cells of either edge or when u ten cells in
    from an edge has moved more than 1e-3 H away from the boundary value
    (a front can stall against a held boundary just outside the cell
    guard).  Raises :class:`BlowUp` on a non-finite value.
    """
    x = grid.x
    dx = grid.dx
    u = np.array(initial, dtype=float)
    if u.shape != x.shape:
        raise ValueError(f"initial data has shape {u.shape}, grid has {x.shape}")
    if np.any(u < 0.0) or np.any(u > r.H):
        raise ValueError(f"initial data must lie in [0, {r.H}]")
    level = 0.5 * r.H
    guard = GUARD_CELLS * dx
    g = GUARD_CELLS
    tail_tol = TAIL_GUARD * r.H
    left_bc, right_bc = u[0], u[-1]
    track = FrontTrack()
    snaps = []

    def record(t, n):
        pos = front_position(x, u, level)
        if keep_snapshots:
            snaps.append((t, u.copy()))
        if abs(u[g] - left_bc) > tail_tol or abs(u[-1 - g] - right_bc) > tail_tol:
            raise BoundaryContamination(
                f"front tail reached the {GUARD_CELLS}-cell guard band "
                f"(t={t:.6g}, step {n})", snaps, track)
        if pos is None:
            return
        if pos - x[0] < guard or x[-1] - pos < guard:
            raise BoundaryContamination(
                f"front at x={pos:.6g} is within {GUARD_CELLS} cells of the boundary "
                f"(t={t:.6g}, step {n})", snaps, track)
        track.times.append(t)
        track.positions.append(pos)

    t, n = 0.0, 0
    record(t, n)
    dt = None
    while t < grid.t_end - 1e-12 * max(grid.t_end, 1.0):
        if n % DT_REFRESH == 0:
            dt = stable_dt(op, u, dx)
            if grid.dt is not None:
                dt = min(dt, grid.dt)
        h = min(dt, grid.t_end - t)
        u = step(u, op, r, dx, h)
        t += h
        n += 1
        if not np.all(np.isfinite(u)):
            raise BlowUp(f"non-finite value after step {n}", n)
        if n % grid.snapshot_stride == 0 or t >= grid.t_end - 1e-12 * max(grid.t_end, 1.0):
            record(t, n)
    _fit(track, grid.t_end)
    return PdeRun(grid, snaps, track, n)


def suggested_domain(c: float, t_end: float, margin: float = 40.0):
    """x-range that keeps a leftward front started near 0 clear of the edges."""
    return -(c * t_end + margin), margin

