from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st
from mpmath import mp, mpf

from oracles import iterated, qpoch_inf, rel_err
from qverify import qops
from qverify.errors import DomainError, NoConvergence
from qverify.identities import evaluate_identity, function_F, function_G
from qverify.qcore import phi, pinf

ratq = st.fractions(min_value=F(1, 10), max_value=F(9, 10), max_denominator=10)
nonzero = st.fractions(min_value=-2, max_value=2, max_denominator=10).filter(lambda v: v != 0)


def square(a):
    return a * a


# -- q-difference operators ----------------------------------------------------------

def test_qdiff_examples():
    a, q = F(2, 3), F(1, 2)
    assert qops.qdiff_apply(qops.D, square, a, q, 1) == a * (1 - q ** 2)
    assert qops.qdiff_apply(qops.THETA, square, a, q, 1) == a * (1 / q - q)
    assert qops.qdiff_apply(qops.D, square, a, q, 0) == square(a)


def test_qdiff_rejects_zero_point():
    with pytest.raises(DomainError):
        qops.qdiff_apply(qops.D, square, 0.0, 0.5, 1)


@given(a=nonzero, q=ratq, n=st.integers(0, 5), kind=st.sampled_from([qops.D, qops.THETA]))
def test_qdiff_matches_iterated_definition_exactly(a, q, n, kind):
    f = lambda x: 3 * x ** 4 - x ** 2 + 1 / (x * x + 1)
    assert qops.qdiff_apply(kind, f, a, q, n) == iterated(kind, f, a, q, n)


@given(a=nonzero, q=ratq, n=st.integers(1, 4))
def test_theta_is_shifted_d(a, q, n):
    f = lambda x: x ** 3 + 2 * x
    assert qops.qdiff_apply(qops.THETA, f, a, q, 1) == qops.qdiff_apply(qops.D, f, a / q, q, 1)


def test_d_of_inverse_product_example():
    with mp.workdps(40):
        a, s, q = mpf(1) / 3, mpf(1) / 4, mpf(1) / 2
        f = lambda x: 1 / qpoch_inf(x * s, q)
        got = qops.qdiff_apply(qops.D, f, a, q, 2)
        assert rel_err(got, s ** 2 / qpoch_inf(a * s, q)) < mpf(10) ** -25


# -- Leibniz rules ------------------------------------------------------------------

def test_leibniz_examples():
    one_q = F(1, 2)
    ident = lambda x: x
    assert qops.leibniz_apply(qops.D, ident, ident, F(1), one_q, 1) == F(3, 4)
    assert qops.leibniz_apply(qops.THETA, ident, ident, F(1), one_q, 1) == F(3, 2)


@given(a=nonzero, q=ratq, n=st.integers(0, 4), kind=st.sampled_from([qops.D, qops.THETA]))
def test_leibniz_exact_on_polynomials(a, q, n, kind):
    f = lambda x: x ** 3 - 2 * x + 1
    g = lambda x: 5 * x ** 2 + x
    direct = qops.qdiff_apply(kind, lambda x: f(x) * g(x), a, q, n)
    assert qops.leibniz_apply(kind, f, g, a, q, n) == direct


@given(a=nonzero, q=ratq, n=st.integers(0, 4))
def test_leibniz_with_constant_factor(a, q, n):
    f = lambda x: x ** 5 + x
    assert qops.leibniz_apply(qops.D, f, lambda x: 1, a, q, n) == qops.qdiff_apply(qops.D, f, a, q, n)


# -- iterated closed forms ---------------------------------------------------------------

@pytest.mark.parametrize("sel", qops.LEMMA_FORMS)
@pytest.mark.parametrize("k", range(6))
def test_lemma_forms_against_iterated_oracle(sel, k):
    with mp.workdps(50):
        a, s, w, q = mpf(1) / 3, mpf(1) / 4, mpf(1) / 5, mpf(1) / 2
        closed = qops.lemma_closed_form(sel, a, s, q, k, w)
        kernel = qops.lemma_kernel(sel, s, q, w)
        oracle = iterated(qops.lemma_kind(sel), kernel, a, q, k)
        assert rel_err(closed, oracle) < mpf(10) ** -30


def test_lemma_order_zero_is_the_function():
    assert qops.lemma_closed_form("id1", 0.3, 0.25, 0.5, 0) == 1 / pinf(0.3 * 0.25, 0.5)


def test_lemma_theta_forms_need_nonzero_point():
    for sel in ("id2", "id4", "id6"):
        with pytest.raises(DomainError):
            qops.lemma_closed_form(sel, 0.0, 0.3, 0.5, 2, 0.2)


def test_lemma_unknown_selector():
    with pytest.raises(ValueError):
        qops.lemma_closed_form("id9", 0.3, 0.3, 0.5, 1, 0.2)


# -- operator series -----------------------------------------------------------------

def test_bruteforce_trivial_operator_is_identity_plus_shift():
    # T(0,0,0,0,0; y D) f = sum y^n D^n f/(q)_n; on 1/(xs)_inf this is 1/(xs, ys)_inf
    x, s, y, q = mpf("0.2"), mpf("0.25"), mpf("0.15"), mpf("0.5")
    # an order-25 difference table loses about a hundred digits
    with mp.workdps(qops.bruteforce_dps("T", x, q, 25) + 20):
        op = qops.OperatorSpec("T", 0, 0, 0, 0, 0, y, 25)
        f = qops.lemma_kernel("id1", s, q)
        res = qops.operator_apply_bruteforce(op, f, x, q)
        expect = 1 / (qpoch_inf(x * s, q) * qpoch_inf(y * s, q))
        assert rel_err(res.value, expect) < mpf(10) ** -12


def test_bruteforce_matches_corollary_three_phi_two():
    x, q = mpf(1) / 8, mpf(1) / 2
    with mp.workdps(qops.bruteforce_dps("T", x, q, 25) + 20):
        r, f_, g, v, w, u = (mpf(1) / k for k in (2, 3, 4, 5, 6, 7))
        s = mpf(1) / 9
        op = qops.OperatorSpec("T", r, f_, g, v, w, u, 25)
        res = qops.operator_apply_bruteforce(op, qops.lemma_kernel("id1", s, q), x, q)
        expect = phi((r, f_, g), (v, w), q, u * s) / pinf(x * s, q)
        assert rel_err(res.value, expect) < 1e-8


def test_bruteforce_rejects_bad_kind():
    with pytest.raises(ValueError):
        qops.operator_apply_bruteforce(qops.OperatorSpec("X", 0, 0, 0, 0, 0, 0.1), square, 0.3, 0.5)


def test_bruteforce_reports_no_convergence():
    op = qops.OperatorSpec("T", 0.5, 0.5, 0.5, 0.1, 0.1, 50.0, 10)
    with mp.workdps(60):
        with pytest.raises(NoConvergence):
            qops.operator_apply_bruteforce(op, qops.lemma_kernel("id1", mpf("0.3"), mpf("0.5")),
                                           mpf("0.2"), mpf("0.5"))


def test_operator_denominator_pole():
    op = qops.OperatorSpec("T", 0.1, 0.1, 0.1, 0.5 ** -2, 0.3, 0.1, 10)
    with pytest.raises(DomainError):
        op.validate(0.5)


def test_theorem_closed_form_rational_example():
    names = ("r", "f", "g", "v", "w", "u", "a", "s", "z", "t")
    p = {k: f"1/{i + 2}" for i, k in enumerate(names)}
    p["q"] = "1/2"
    for ident in ("THM1_3_T", "THM1_3_E"):
        assert evaluate_identity(ident, p, "float", 1e-6).verdict == "pass"


def test_theorem_closed_form_u_zero_is_prefactor():
    q, a, s, z, t = 0.5, 0.2, 0.15, 0.1, 0.12
    got = qops.thm13_closed_form("T", 0.3, 0.2, 0.1, 0.25, 0.15, 0.0, a, s, z, t, q)
    got = getattr(got, "value", got)
    expect = pinf(a * s, q) / (pinf(a * z, q) * pinf(a * t, q))
    assert abs(got - expect) < 1e-13 * abs(expect)


# -- stable evaluation -----------------------------------------------------------------

def test_stable_eval_converges():
    value, dps = qops.stable_eval(lambda: mp.pi, 30, digits=20)
    assert abs(value - mp.pi) < mpf(10) ** -25 and dps >= 50


def test_stable_eval_gives_up():
    state = {"n": 0}

    def noisy():
        state["n"] += 1
        return mpf(state["n"])
    with pytest.raises(NoConvergence):
        qops.stable_eval(noisy, 30, max_dps=60)


# -- difference equations -------------------------------------------------------------

def test_residual_zero_for_function_of_parameters_only():
    # both brackets are differences in x or y, so they vanish together
    f = qops.SevenPointFunc(lambda a, b, c, d, e, x, y: a + b * e)
    assert qops.diffeq_residual("I", f, (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7), 0.5) == 0


def test_residual_of_y_independent_function_is_x_difference():
    f = qops.SevenPointFunc(lambda a, b, c, d, e, x, y: x * x)
    a, b, c, d, e, x, y = point = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7)
    q = 0.5
    jump = x * x * (1 - q * q)
    expect = abs(y * jump * (1 - (a + b + c) + (a * b + a * c + b * c) - a * b * c))
    assert abs(qops.diffeq_residual("I", f, point, q) - expect) < 1e-15


def test_known_solutions_satisfy_equation_one():
    point = (0.21, -0.33, 0.17, 0.26, -0.12, 0.31, 0.22)
    q = 0.6
    F_ = function_F(0.35, -0.28, q)
    G_ = function_G(3, 0.9, q)
    assert qops.diffeq_residual("I", F_, point, q) < 1e-12
    assert qops.diffeq_residual("I", G_, point, q) < 1e-12
    lhs, _ = qops.diffeq_sides("I", F_, point, q)
    assert abs(lhs) > 1e-4          # the check is not vacuous


def test_residual_detects_a_wrong_function():
    point = (0.21, -0.33, 0.17, 0.26, -0.12, 0.31, 0.22)
    q = 0.6
    F_ = function_F(0.35, -0.28, q)
    bent = qops.SevenPointFunc(lambda *p: F_(*p) + 0.01 * p[-1] ** 2 * p[-2])
    assert qops.diffeq_residual("I", bent, point, q) > 1e-6


def test_equation_two_shape_and_bad_selector():
    f = qops.SevenPointFunc(lambda a, b, c, d, e, x, y: 1.0)
    assert qops.diffeq_residual("II", f, (0.1,) * 7, 0.5) == 0
    with pytest.raises(ValueError):
        qops.diffeq_residual("III", f, (0.1,) * 7, 0.5)
