"""Recipes that regenerate the data behind the five reference plots.

Figure 1 is the subsolution function G_c(beta) for p=4, q=3, L+=6 at the
first-case value of c+.  Figures 2-5 are backward shoots:

====== =========== ============================ ===================
figure operator    reaction                     speed
====== =========== ============================ ===================
2      (4,2) coop  u(1-u)                       2
3      (4,2) coop  u(7-u), H=7                  2 sqrt 7
4      (4,2) comp  u(1-u)                       2
5      (4,2) comp  u(4-u), H=4                  lower bound (4)
====== =========== ============================ ===================
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bounds import g_script, minimize_g_script, upper_bound_cplus
from .operator import OperatorSpec
from .reaction import ReactionSpec
from .shooting import ShootOutcome, ShootSettings, integrate_backward

__all__ = ["FigureData", "figure_data", "FIGURE_IDS"]

FIGURE_IDS = (1, 2, 3, 4, 5)


@dataclass
class FigureData:
    figure: int
    header: list
    columns: list
    meta: dict
    shoot: ShootOutcome | None = None

    @property
    def rows(self):
        return list(zip(*self.columns))


def _subsolution_curve(n=2001, beta_max=2.0):
    op = OperatorSpec(4, 3)
    L_plus = 6.0
    c_i = L_plus ** (1.0 / op.q_conj) * op.q / (op.q - 1.0) * (op.p + op.q - 2.0) ** (1.0 / op.q)
    c_ii, case = upper_bound_cplus(op, L_plus)
    beta = np.linspace(beta_max / n, beta_max, n)
    g_i = g_script(op, L_plus, c_i, beta)
    g_ii = g_script(op, L_plus, c_ii, beta)
    meta = {
        "operator": op.to_record(), "L_plus": L_plus,
        "c_case_i": c_i, "c_case_ii": c_ii, "case": case,
        "min_G_case_i": minimize_g_script(op, L_plus, c_i).value,
        "min_G_case_ii": minimize_g_script(op, L_plus, c_ii).value,
    }
    return FigureData(1, ["beta", "G_case_i", "G_case_ii"], [beta, g_i, g_ii], meta)


_SHOOTS = {
    2: (OperatorSpec(4, 2), ReactionSpec.power_logistic(1.0, 1.0, 1.0), 2.0),
    3: (OperatorSpec(4, 2), ReactionSpec.power_logistic(1.0, 1.0, 7.0), 2.0 * math.sqrt(7.0)),
    4: (OperatorSpec(4, 2, "competitive"), ReactionSpec.power_logistic(1.0, 1.0, 1.0), 2.0),
    5: (OperatorSpec(4, 2, "competitive"), ReactionSpec.power_logistic(1.0, 1.0, 4.0), 4.0),
}


def figure_data(figure: int, settings: ShootSettings | None = None) -> FigureData:
    """Return the curve(s) plotted in reference figure ``figure`` (1-5)."""
    if figure not in FIGURE_IDS:
        raise ValueError(f"figure must be one of {FIGURE_IDS}, got {figure!r}")
    if figure == 1:
        return _subsolution_curve()
    op, r, c = _SHOOTS[figure]
    out = integrate_backward(op, r, c, settings)
    meta = {"operator": op.to_record(), "reaction": r.to_record(), **out.summary()}
    return FigureData(figure, ["v", "y", "phi"], [out.u, out.y, out.phi], meta, out)
