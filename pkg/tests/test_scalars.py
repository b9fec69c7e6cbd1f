from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from laxchain.scalars import (
    Jet,
    QuadExt,
    format_scalar,
    is_degenerate_pair,
    is_exact_scalar,
    is_rational_square,
    rational,
    scalar_abs,
    scalar_value,
)

rationals = st.fractions(
    min_value=-1000, max_value=1000, max_denominator=997
)


def test_rational_parsing():
    assert rational("3/7") == Fraction(3, 7)
    assert rational("-2") == Fraction(-2)
    assert rational("1.25") == Fraction(5, 4)
    assert rational(4) == Fraction(4)
    with pytest.raises(TypeError):
        rational(0.1)


def test_rational_square_detection():
    assert is_rational_square(Fraction(4, 9))
    assert is_rational_square(Fraction(0))
    assert not is_rational_square(Fraction(8))
    assert not is_rational_square(Fraction(-4))
    assert not is_rational_square(Fraction(2, 9))


@given(rationals, rationals, rationals)
def test_fraction_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a
    if c != 0:
        assert (a / c) * c == a


# ---------------------------------------------------------------------------
# Quadratic extension
# ---------------------------------------------------------------------------

@given(rationals, rationals, rationals)
@settings(max_examples=60)
def test_quadext_conjugate_norm(a, b, d):
    x = QuadExt(a, b, d)
    prod = x * x.conjugate()
    assert prod.a == a * a - d * b * b
    assert prod.b == 0
    assert x.norm() == prod.a


def test_quadext_arithmetic():
    w = QuadExt(Fraction(0), Fraction(1), Fraction(8))
    assert w * w == 8
    x = 3 + 2 * w
    assert isinstance(x, QuadExt)
    assert x.a == 3 and x.b == 2
    y = x / w
    assert y * w == x
    assert (x - x) == 0
    assert -x == QuadExt(Fraction(-3), Fraction(-2), Fraction(8))
    assert x**0 == 1
    assert x**3 == x * x * x


def test_quadext_zero_test_and_disc_mixing():
    z = QuadExt(Fraction(0), Fraction(0), Fraction(5))
    assert z == 0 and not bool(z)
    nz = QuadExt(Fraction(0), Fraction(1), Fraction(5))
    assert nz != 0
    other = QuadExt(Fraction(1), Fraction(1), Fraction(7))
    with pytest.raises(ValueError):
        nz + other


def test_quadext_division_by_zero_divisor():
    # disc = 4 is a square: 2 + 1*w has norm 4 - 4 = 0
    x = QuadExt(Fraction(2), Fraction(1), Fraction(4))
    with pytest.raises(ZeroDivisionError):
        1 / x


def test_quadext_formatting():
    x = QuadExt(Fraction(1, 2), Fraction(-3), Fraction(8))
    assert format_scalar(x) == "1/2 + -3/1*w | w^2 = 8/1"


# ---------------------------------------------------------------------------
# Jets
# ---------------------------------------------------------------------------

def test_jet_identity_product():
    one = Jet((Fraction(1), Fraction(0)))
    c = Jet((Fraction(3), Fraction(5)))
    assert one * c == c


def test_jet_variable_square():
    x = Jet.variable(Fraction(5), 1)
    assert x.coeffs == (Fraction(5), Fraction(1))
    assert (x * x).coeffs == (Fraction(25), Fraction(10))


def test_jet_quotient_by_hand():
    # (1, 0) / (2, 3) -> value 1/2, derivative (0*2 - 1*3)/4 = -3/4
    num = Jet((Fraction(1), Fraction(0)))
    den = Jet((Fraction(2), Fraction(3)))
    q = num / den
    assert q.coeffs == (Fraction(1, 2), Fraction(-3, 4))
    assert q * den == num


def test_jet_order_mismatch_raises():
    with pytest.raises(ValueError):
        Jet((1, 2)) + Jet((1, 2, 3))


def test_jet_zero_value_division_raises():
    with pytest.raises(ZeroDivisionError):
        Jet((Fraction(1), Fraction(1))) / Jet((Fraction(0), Fraction(1)))


def test_jet_scalar_fast_paths():
    j = Jet((Fraction(2), Fraction(3), Fraction(4)))
    assert (j + 1).coeffs == (Fraction(3), Fraction(3), Fraction(4))
    assert (1 - j).coeffs == (Fraction(-1), Fraction(-3), Fraction(-4))
    assert (j * 2).coeffs == (Fraction(4), Fraction(6), Fraction(8))
    assert (j / 2).coeffs == (Fraction(1), Fraction(3, 2), Fraction(2))


@given(
    st.lists(rationals, min_size=4, max_size=4),
    st.lists(rationals, min_size=3, max_size=3),
    rationals,
    rationals,
)
@settings(max_examples=40)
def test_jet_chain_rule_vs_analytic_derivative(pc, qc, x0, dx):
    """r = p/q evaluated on a jet must produce the analytic derivative."""

    def poly_eval(cs, x):
        acc = Fraction(0)
        for c in reversed(cs):
            acc = acc * x + c
        return acc

    def poly_diff(cs):
        return [i * c for i, c in enumerate(cs)][1:]

    if poly_eval(qc, x0) == 0:
        return
    jet = Jet((x0, dx, Fraction(0)))
    num = Fraction(0)
    for c in reversed(pc):
        num = num * jet + c
    den = Fraction(0)
    for c in reversed(qc):
        den = den * jet + c
    r = num / den

    p0, q0 = poly_eval(pc, x0), poly_eval(qc, x0)
    dp = poly_eval(poly_diff(pc), x0)
    dq = poly_eval(poly_diff(qc), x0)
    assert r.coeffs[0] == p0 / q0
    assert r.coeffs[1] == (dp * q0 - p0 * dq) / q0**2 * dx


def test_nested_jets_mixed_partials():
    # f(x, y) = x^2 y + y^3 at (x, y) = (2, 3), first-order jets in each slot
    x_val, y_val = Fraction(2), Fraction(3)
    y_jet = Jet.variable(y_val, 1)
    zero_y = Jet.constant(Fraction(0), 1)
    x_nested = Jet((Jet.constant(x_val, 1), Jet.constant(Fraction(1), 1)))
    y_nested = Jet((y_jet, zero_y))
    f = x_nested * x_nested * y_nested + y_nested**3
    assert f.coeffs[0].coeffs[0] == 4 * 3 + 27  # value
    assert f.coeffs[1].coeffs[0] == 2 * x_val * y_val  # d/dx
    assert f.coeffs[0].coeffs[1] == x_val**2 + 3 * y_val**2  # d/dy
    assert f.coeffs[1].coeffs[1] == 2 * x_val  # d2/dxdy


def test_jet_derivative_and_truncate():
    j = Jet((Fraction(1), Fraction(2), Fraction(3)))
    assert j.derivative().coeffs == (Fraction(2), Fraction(3))
    assert j.truncate(1).coeffs == (Fraction(1), Fraction(2))
    with pytest.raises(ValueError):
        j.truncate(5)
    with pytest.raises(ValueError):
        Jet((1,)).derivative()


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def test_scalar_value_and_exactness():
    w = QuadExt(Fraction(1), Fraction(2), Fraction(3))
    nested = Jet((Jet((w, w)), Jet((w, w))))
    assert scalar_value(nested) == w
    assert is_exact_scalar(nested)
    assert not is_exact_scalar(1.5)


def test_scalar_abs():
    assert scalar_abs(Fraction(-3, 4)) == Fraction(3, 4)
    assert scalar_abs(QuadExt(Fraction(0), Fraction(0), Fraction(7))) == 0
    w = QuadExt(Fraction(1), Fraction(1), Fraction(4))
    assert scalar_abs(w) == pytest.approx(3.0)
    neg = QuadExt(Fraction(3), Fraction(4), Fraction(-1))
    assert scalar_abs(neg) == pytest.approx(5.0)
    assert scalar_abs(Jet((Fraction(0), Fraction(-2)))) == 2


def test_format_scalar_rationals_and_jets():
    assert format_scalar(Fraction(5)) == "5/1"
    assert format_scalar(Fraction(-2, 3)) == "-2/3"
    assert format_scalar(Jet((Fraction(1), Fraction(2)))) == "jet(1/1; 2/1)"


def test_degeneracy_guard():
    assert is_degenerate_pair(Fraction(1, 3), Fraction(1, 3))
    assert not is_degenerate_pair(Fraction(1, 3), Fraction(1, 3) + Fraction(1, 10**30))
    assert is_degenerate_pair(1.0, 1.0 + 1e-16)
    assert not is_degenerate_pair(1.0, 1.0 + 1e-9)
