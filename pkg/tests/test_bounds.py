import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pqfronts.bounds import (SubsolutionParams, competitive_bounds, cplus_branch, g_script,
                             lower_bound, minimize_g_script, numeric_cplus, speed_bounds,
                             upper_bound_cplus)
from pqfronts.errors import BoundUndefined, NoCertificate
from pqfronts.operator import OperatorSpec
from pqfronts.reaction import ReactionSpec
from pqfronts.shooting import Classification, classify_speed

# mpmath, 30 digits
CASE_I_436 = 8.46932425992925641970
NUMERIC_CPLUS = {
    (4, 3, 6.0): 8.49461188734484089,
    (4, 2, 1.0): 2.86340129967640006,
    (3, 2, 1.0): 2.97282940240536511,
    (5, 3, 2.0): 3.82726639496825393,
}
LOWER_431 = 1.88988157484230975


def test_lower_bound_examples():
    assert lower_bound(OperatorSpec(4, 2), 1.0) == pytest.approx(2.0, rel=1e-14)
    assert lower_bound(OperatorSpec(4, 2), 7.0) == pytest.approx(2 * math.sqrt(7), rel=1e-14)
    assert lower_bound(OperatorSpec(2, 2), 1.0) == pytest.approx(2 * math.sqrt(2), rel=1e-14)
    assert lower_bound(OperatorSpec(4, 3), 1.0) == pytest.approx(LOWER_431, rel=1e-14)
    assert lower_bound(OperatorSpec(4, 2, "competitive"), 1.0) == pytest.approx(2.0)
    assert lower_bound(OperatorSpec(9, 2, "single_q"), 1.0) == pytest.approx(2.0)


@pytest.mark.parametrize("L", [0.0, math.inf, -1.0])
def test_lower_bound_undefined(L):
    with pytest.raises(BoundUndefined):
        lower_bound(OperatorSpec(4, 2), L)


def test_cplus_examples():
    v, case = upper_bound_cplus(OperatorSpec(4, 3), 6.0)
    assert case == "ii" and v == pytest.approx(10.0, rel=1e-14)
    v, case = upper_bound_cplus(OperatorSpec(4, 2), 1.0)
    assert case == "i" and v == pytest.approx(4.0, rel=1e-14)
    v, case = upper_bound_cplus(OperatorSpec(2, 2), 1.0)
    assert case == "pq_equal" and v == pytest.approx(2 * math.sqrt(2), rel=1e-14)
    v, case = upper_bound_cplus(OperatorSpec(4, 3), 10.0)
    assert case == "iii"
    assert cplus_branch(4, 3, 6.0, "i") == pytest.approx(CASE_I_436, rel=1e-14)


def test_cplus_rejects_competitive():
    with pytest.raises(ValueError):
        upper_bound_cplus(OperatorSpec(4, 2, "competitive"), 1.0)
    with pytest.raises(ValueError):
        cplus_branch(4, 2, 1.0, "iv")


def test_g_script_examples():
    op = OperatorSpec(4, 3)
    assert g_script(op, 6.0, 10.0, 1.0) == pytest.approx(-1.5, abs=1e-14)
    assert g_script(op, 6.0, 10.0, 1e-14) == pytest.approx(6.0)
    beta = np.linspace(1e-4, 3, 30001)
    assert g_script(op, 6.0, CASE_I_436, beta).min() > 0
    assert minimize_g_script(op, 6.0, CASE_I_436).value > 0
    assert minimize_g_script(op, 6.0, 10.0).value <= -1.5


def test_minimizer_matches_grid_search():
    op = OperatorSpec(5, 3)
    beta = np.linspace(1e-5, 2, 200001)
    m = minimize_g_script(op, 2.0, 4.0)
    assert m.value == pytest.approx(g_script(op, 2.0, 4.0, beta).min(), abs=1e-8)


def test_subsolution_params():
    p = SubsolutionParams.for_operator(OperatorSpec(4, 3), 1.0, 10.0)
    assert p.alpha == pytest.approx(0.5)
    with pytest.raises(ValueError):
        SubsolutionParams.for_operator(OperatorSpec(4, 3), 0.0, 10.0)
    with pytest.raises(ValueError):
        SubsolutionParams.for_operator(OperatorSpec(4, 2, "competitive"), 1.0, 2.0)


@pytest.mark.parametrize("key", list(NUMERIC_CPLUS))
def test_numeric_cplus_oracle(key):
    p, q, L = key
    assert numeric_cplus(OperatorSpec(p, q), L) == pytest.approx(NUMERIC_CPLUS[key], abs=2e-6)


def test_numeric_cplus_examples():
    v = numeric_cplus(OperatorSpec(4, 3), 6.0)
    assert CASE_I_436 < v <= 10.0
    assert numeric_cplus(OperatorSpec(2, 2), 1.0) == pytest.approx(2 * math.sqrt(2), abs=1e-5)
    assert numeric_cplus(OperatorSpec(4, 2), 1.0) <= 4.0
    # beta <= s0 = 1/sqrt(3) leaves the q-only envelope minimiser beta = 1 out of reach
    assert numeric_cplus(OperatorSpec(4, 2, "competitive"), 1.0) == pytest.approx(
        2.30940107675850306, abs=2e-6)


def test_numeric_cplus_no_certificate():
    with pytest.raises(NoCertificate):
        numeric_cplus(OperatorSpec(4, 2, "competitive"), 1.0, c_cap=2.1)


def test_competitive_bounds_examples():
    cb = competitive_bounds(OperatorSpec(4, 2, "competitive"), 1.0, 1.0)
    assert cb.c_lower == pytest.approx(2.0) and cb.c_upper == pytest.approx(2.0)
    assert cb.c_max == pytest.approx(2 / math.sqrt(3)) and cb.window_empty
    cb = competitive_bounds(OperatorSpec(3, 2, "competitive"), 1.0, 1.0)
    assert cb.c_max == pytest.approx(1.0) and cb.window_empty
    assert competitive_bounds(OperatorSpec(4, 2, "competitive"), 1e-12, 1.0).c_lower < 1e-5
    with pytest.raises(ValueError):
        competitive_bounds(OperatorSpec(4, 2), 1.0, 1.0)


def test_speed_bounds_rescaled():
    b = speed_bounds(OperatorSpec(4, 2), ReactionSpec.power_logistic(1.0, 1.0, 7.0))
    assert b.lower == pytest.approx(2 * math.sqrt(7), rel=1e-12)
    b = speed_bounds(OperatorSpec(2, 2, "single_q"), ReactionSpec.classical_logistic())
    assert b.lower == pytest.approx(2.0) and b.upper_analytic == pytest.approx(2.0)
    b = speed_bounds(OperatorSpec(4, 2, "competitive"), ReactionSpec.classical_logistic())
    assert b.upper_case == "competitive" and b.window_empty
    rec = b.to_record()
    assert set(rec) >= {"lower", "upper_analytic", "upper_case", "upper_numeric"}


# properties -------------------------------------------------------------

pq = st.tuples(st.floats(2.0, 6.0), st.floats(0.01, 4.0)).map(lambda t: (t[0] + t[1], t[0]))
L_values = st.floats(1e-3, 50.0)


@given(pq, L_values, st.floats(0.0, 1.0))
def test_ordering(pq_, Lp, frac):
    p, q = pq_
    op = OperatorSpec(p, q)
    L0 = frac * Lp if frac > 0 else Lp
    assert lower_bound(op, L0) <= upper_bound_cplus(op, Lp)[0] * (1 + 1e-12)


@given(pq, L_values)
def test_numeric_below_analytic(pq_, Lp):
    op = OperatorSpec(*pq_)
    assert numeric_cplus(op, Lp) <= upper_bound_cplus(op, Lp)[0] + 1e-9


@given(st.floats(2.0, 6.0), st.floats(1e-3, 50.0))
def test_doubled_numeric_is_exact(q, L):
    op = OperatorSpec(q, q)
    assert numeric_cplus(op, L) == pytest.approx(upper_bound_cplus(op, L)[0], abs=2e-6)


@given(pq)
def test_cplus_continuous_at_second_junction(pq_):
    p, q = pq_
    L2 = (p - 1) / (q - 1) * (p + q - 2)
    a, b = cplus_branch(p, q, L2, "ii"), cplus_branch(p, q, L2, "iii")
    assert a == pytest.approx(b, rel=1e-9)


@given(st.floats(2.0, 6.0), L_values)
def test_cplus_collapse_at_p_equal_q(q, L):
    p = q + 1e-12
    i, iii = cplus_branch(p, q, L, "i"), cplus_branch(p, q, L, "iii")
    assert i == pytest.approx(iii, rel=1e-9)
    assert i == pytest.approx(upper_bound_cplus(OperatorSpec(q, q), L)[0], rel=1e-9)
    S = p + q - 2
    assert (p - 1) / (q - 1) * S - S < 1e-9


@given(pq, L_values, st.floats(0.5, 3.0))
def test_certificate_is_monotone_in_c(pq_, Lp, k):
    op = OperatorSpec(*pq_)
    c = k * lower_bound(op, Lp)
    if minimize_g_script(op, Lp, c).value <= 0:
        assert minimize_g_script(op, Lp, 1.1 * c).value <= 0


@pytest.mark.parametrize("p,q", [(3, 2), (4, 2), (4, 3), (5, 3)])
def test_certificate_soundness(p, q):
    op = OperatorSpec(p, q)
    r = ReactionSpec.power_logistic(op.q_conj - 1.0, 1.0, 1.0)
    c = numeric_cplus(op, 1.0) + 1e-5
    assert minimize_g_script(op, 1.0, c).value <= 0
    assert classify_speed(op, r, c) is Classification.ADMISSIBLE
