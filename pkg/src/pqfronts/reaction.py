"""Fisher-type reaction terms on [0, H] and the slope constants they feed.

Three families are supported:

``power_logistic``
    f(u) = a u^gamma (H - u)
``classical_logistic``
    f(u) = a u (1 - u/H), so that f'(0) = a
``tabulated``
    (u, f) pairs, interpolated by a shape-preserving cubic (PCHIP)

The slope constants are measured against ``u^{q'-1}``, where ``q'`` is the
conjugate of the small exponent of the operator.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping, NamedTuple

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import minimize_scalar

__all__ = [
    "Family",
    "ReactionSpec",
    "SlopeLimits",
    "evaluate_f",
    "slope_limits",
    "linear_cap_k",
    "rescale_to_unit",
    "load_tabulated_csv",
    "numeric_slope_limits",
]

_EXP_TOL = 1e-12


class Family(str, enum.Enum):
    POWER_LOGISTIC = "power_logistic"
    CLASSICAL_LOGISTIC = "classical_logistic"
    TABULATED = "tabulated"


@dataclass(frozen=True, eq=False)
class ReactionSpec:
    family: Family
    H: float = 1.0
    params: Mapping[str, float] = field(default_factory=dict)
    qprime: float = 2.0
    table_u: np.ndarray | None = None
    table_f: np.ndarray | None = None

    def __post_init__(self):
        family = Family(self.family)
        object.__setattr__(self, "family", family)
        H = float(self.H)
        if not (H > 0 and math.isfinite(H)):
            raise ValueError(f"H must be positive, got {self.H}")
        object.__setattr__(self, "H", H)
        if not 1.0 < self.qprime <= 2.0:
            raise ValueError(f"qprime must lie in (1, 2], got {self.qprime}")
        params = {k: float(v) for k, v in dict(self.params).items()}
        if family is Family.POWER_LOGISTIC:
            _require(params, ("gamma", "a"))
            if params["gamma"] <= 0:
                raise ValueError("gamma must be positive so that f(0) = 0")
            if params["a"] < 0:
                raise ValueError("amplitude a must be nonnegative")
        elif family is Family.CLASSICAL_LOGISTIC:
            _require(params, ("a",))
            if params["a"] < 0:
                raise ValueError("rate a must be nonnegative")
        else:
            u = np.array(self.table_u, dtype=float)
            fv = np.array(self.table_f, dtype=float)
            _check_table(u, fv)
            H = float(u[-1])
            object.__setattr__(self, "H", H)
            u.setflags(write=False)
            fv.setflags(write=False)
            object.__setattr__(self, "table_u", u)
            object.__setattr__(self, "table_f", fv)
            object.__setattr__(self, "_interp", PchipInterpolator(u, fv, extrapolate=False))
        object.__setattr__(self, "params", MappingProxyType(params))

    # constructors -----------------------------------------------------
    @classmethod
    def power_logistic(cls, gamma, a=1.0, H=1.0, qprime=2.0):
        return cls(Family.POWER_LOGISTIC, H, {"gamma": gamma, "a": a}, qprime)

    @classmethod
    def classical_logistic(cls, a=1.0, H=1.0, qprime=2.0):
        return cls(Family.CLASSICAL_LOGISTIC, H, {"a": a}, qprime)

    @classmethod
    def tabulated(cls, u, f, qprime=2.0):
        return cls(Family.TABULATED, 1.0, {}, qprime, table_u=u, table_f=f)

    @classmethod
    def matched(cls, qprime, a=1.0, H=1.0):
        """``a u^{q'-1}(H-u)``: the reaction whose two slope constants coincide."""
        return cls.power_logistic(qprime - 1.0, a, H, qprime)

    # evaluation ------------------------------------------------------
    def scalar_function(self):
        """Fast scalar f with no range checking, for ODE right-hand sides."""
        H = self.H
        if self.family is Family.POWER_LOGISTIC:
            g, a = self.params["gamma"], self.params["a"]
            return lambda u: a * u**g * (H - u) if u > 0.0 else 0.0
        if self.family is Family.CLASSICAL_LOGISTIC:
            a = self.params["a"]
            return lambda u: a * u * (1.0 - u / H)
        interp = self._interp
        return lambda u: float(interp(min(max(u, 0.0), H)))

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        H = self.H
        if self.family is Family.POWER_LOGISTIC:
            g, a = self.params["gamma"], self.params["a"]
            out = a * np.power(np.maximum(u, 0.0), g) * (H - u)
        elif self.family is Family.CLASSICAL_LOGISTIC:
            out = self.params["a"] * u * (1.0 - u / H)
        else:
            out = self._interp(np.clip(u, 0.0, H))
        return float(out) if out.ndim == 0 else out

    def with_qprime(self, qprime):
        if self.family is Family.TABULATED:
            return ReactionSpec.tabulated(self.table_u, self.table_f, qprime)
        return ReactionSpec(self.family, self.H, dict(self.params), qprime)

    def to_record(self) -> dict:
        rec = {"family": self.family.value, "H": self.H, "qprime": self.qprime,
               "params": dict(self.params)}
        if self.family is Family.TABULATED:
            rec["n_table"] = int(self.table_u.size)
        return rec


def _require(params, keys):
    missing = [k for k in keys if k not in params]
    if missing:
        raise ValueError(f"missing reaction parameters: {', '.join(missing)}")
    extra = set(params) - set(keys)
    if extra:
        raise ValueError(f"unknown reaction parameters: {', '.join(sorted(extra))}")


def _check_table(u, fv):
    if u.ndim != 1 or u.shape != fv.shape or u.size < 3:
        raise ValueError("tabulated reaction needs matching 1-D u and f arrays (>= 3 rows)")
    if u[0] != 0.0:
        raise ValueError("tabulated u must start at 0")
    if np.any(np.diff(u) <= 0):
        raise ValueError("tabulated u must be strictly increasing")
    if not np.all(np.isfinite(fv)):
        raise ValueError("tabulated f must be finite")
    if fv[0] != 0.0 or fv[-1] != 0.0:
        raise ValueError("tabulated f must vanish at both ends")
    if np.any(fv[1:-1] <= 0.0):
        raise ValueError("tabulated f must be positive strictly inside (0, H)")


def load_tabulated_csv(path, qprime=2.0) -> ReactionSpec:
    """Read a two-column ``u,f`` CSV into a tabulated :class:`ReactionSpec`."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = [h.strip() for h in next(reader)]
        if header != ["u", "f"]:
            raise ValueError(f"expected header 'u,f', got {','.join(header)!r}")
        rows = [(float(a), float(b)) for a, b in reader]
    arr = np.array(rows, dtype=float)
    return ReactionSpec.tabulated(arr[:, 0], arr[:, 1], qprime)


def evaluate_f(r: ReactionSpec, u):
    """f(u) for u in [0, H]; raises ``ValueError`` outside that range."""
    arr = np.asarray(u, dtype=float)
    slack = 1e-12 * r.H
    if np.any(arr < -slack) or np.any(arr > r.H + slack):
        raise ValueError(f"u must lie in [0, {r.H}]")
    return r(np.clip(arr, 0.0, r.H))


class SlopeLimits(NamedTuple):
    L0: float
    L_plus: float


def slope_limits(r: ReactionSpec, qprime=None) -> SlopeLimits:
    """Return (L0, L+): the limit at 0 and the sup over (0, H] of f(s)/s^{q'-1}.

    ``L0`` may come back as 0 or ``inf`` when f does not scale like
    ``u^{q'-1}`` near the origin; callers that need finite values must check.
    """
    qp = r.qprime if qprime is None else float(qprime)
    H = r.H
    if r.family is Family.POWER_LOGISTIC:
        g, a = r.params["gamma"], r.params["a"]
        d = g - (qp - 1.0)
        if abs(d) <= _EXP_TOL:
            return SlopeLimits(a * H, a * H)
        if d < 0:
            return SlopeLimits(math.inf, math.inf) if a > 0 else SlopeLimits(0.0, 0.0)
        # sup of a s^d (H - s) is attained at s = d H/(d+1)
        return SlopeLimits(0.0, a * (d * H / (d + 1.0)) ** d * H / (d + 1.0))
    if r.family is Family.CLASSICAL_LOGISTIC:
        a = r.params["a"]
        d = 2.0 - qp
        if abs(d) <= _EXP_TOL:
            return SlopeLimits(a, a)
        return SlopeLimits(0.0, a * (d * H / (d + 1.0)) ** d / (d + 1.0))
    return numeric_slope_limits(r.scalar_function(), H, qp)


def numeric_slope_limits(fun, H, qprime, n_grid=10_000) -> SlopeLimits:
    """Slope constants of an arbitrary f by sampling.

    The limit at 0 is read off at s = 1e-3, 1e-4, 1e-5 (times H); if those
    three disagree by more than 1% the quotient is taken to be diverging
    (``inf``) or vanishing (0) according to its trend.  The sup is a grid
    search refined by a bounded scalar minimisation around the best node.
    """
    e = qprime - 1.0

    def quotient(s):
        return fun(s) / s**e

    probes = [quotient(H * 10.0**-k) for k in (3, 4, 5)]
    lo, hi = min(probes), max(probes)
    if hi > 0 and (hi - lo) <= 0.01 * hi:
        L0 = probes[-1]
    elif probes[2] > probes[1] > probes[0]:
        L0 = math.inf
    elif probes[2] < probes[1] < probes[0]:
        L0 = 0.0
    else:
        L0 = probes[-1]

    s = np.linspace(H / n_grid, H, n_grid)
    vals = np.array([quotient(x) for x in s])
    k = int(np.argmax(vals))
    best = float(vals[k])
    a = s[max(k - 1, 0)]
    b = s[min(k + 1, n_grid - 1)]
    if b > a:
        res = minimize_scalar(lambda x: -quotient(x), bounds=(a, b), method="bounded",
                              options={"xatol": 1e-12 * H})
        best = max(best, -float(res.fun))
    if math.isfinite(L0):
        best = max(best, L0)
    else:
        best = math.inf
    return SlopeLimits(float(L0), float(best))


def linear_cap_k(r: ReactionSpec) -> float:
    """Smallest k with f(s) <= k (1 - s) on [0, 1] for the unit-rescaled reaction.

    Reactions with ``H != 1`` are rescaled first.  Returns ``inf`` when the
    quotient f(s)/(1-s) is seen to grow without bound near s = 1.  A table
    is linear between its nodes, so for tabulated reactions this is the
    sampled maximum and a divergence finer than the node spacing is missed.
    """
    u = rescale_to_unit(r) if r.H != 1.0 else r
    if u.family is Family.POWER_LOGISTIC:
        return u.params["a"]
    if u.family is Family.CLASSICAL_LOGISTIC:
        return u.params["a"]
    fun = u.scalar_function()
    s = np.linspace(0.0, 1.0, 10_001)[:-1]
    vals = np.array([fun(x) for x in s]) / (1.0 - s)
    best = float(vals.max())
    # endpoint limit -f'(1) from one-sided differences
    h1, h2 = 1e-4, 2e-4
    d1, d2 = fun(1.0 - h1) / h1, fun(1.0 - h2) / h2
    if d1 > 1.2 * d2:
        return math.inf
    return max(best, 2.0 * d1 - d2)


def rescale_to_unit(r: ReactionSpec) -> ReactionSpec:
    """Map the problem on [0, H] to [0, 1]: g(v) = H f(H v).

    Speeds transform as c -> H c.  With H = 1 the input is returned unchanged.
    """
    H = r.H
    if H == 1.0:
        return r
    if r.family is Family.POWER_LOGISTIC:
        g, a = r.params["gamma"], r.params["a"]
        return ReactionSpec.power_logistic(g, a * H ** (g + 2.0), 1.0, r.qprime)
    if r.family is Family.CLASSICAL_LOGISTIC:
        return ReactionSpec.classical_logistic(r.params["a"] * H * H, 1.0, r.qprime)
    return ReactionSpec.tabulated(r.table_u / H, H * r.table_f, r.qprime)
