import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from fpois import (ChartMismatch, DomainError, FormalSeries, OrderMismatch, Poly, Q,
                   fiber_radial_integral, neumann_inverse, parse_poly, poly_arith, poly_partial)
from fpois.kernel import cauchy

from oracles import from_sympy, to_sympy

Q2 = ("q1", "q2")
QP = ("q1", "q2", "p1", "p2")


def P(text, names=QP):
    return parse_poly(text, names)


def test_arith_examples():
    q1 = Poly.var(Q2, "q1")
    assert (q1 + 1) * (q1 - 1) == P("q1^2 - 1", Q2)
    p = Poly.var(QP, "p1")
    assert p + Poly.zero(QP) == p
    assert poly_arith(P("1/2*q1", Q2), P("2/3*q2", Q2), "*") == P("1/3*q1*q2", Q2)


def test_partial_examples():
    assert poly_partial(P("q1^2*q2"), "q1") == P("2*q1*q2")
    assert poly_partial(P("q1"), "p1") == Poly.zero(QP)
    assert poly_partial(P("p1*p2^2"), "p2") == P("2*p1*p2")


def test_fiber_radial_integral_examples():
    fib = ("p1", "p2")
    assert fiber_radial_integral(P("1"), fib, 1) == P("1")
    assert fiber_radial_integral(P("p2"), fib, 1) == P("1/2*p2")
    assert fiber_radial_integral(P("p1*p2"), fib, 2) == P("1/4*p1*p2")


def test_fiber_radial_integral_against_sympy():
    t = sp.Symbol("t")
    f = P("q1*p1^2 + 3*p1*p2 - q2 + 1/2*p2^3")
    for k in (1, 2, 3):
        expr = to_sympy(f).subs({sp.Symbol("p1"): t * sp.Symbol("p1"), sp.Symbol("p2"): t * sp.Symbol("p2")},
                                simultaneous=True)
        ref = sp.integrate(t ** (k - 1) * expr, (t, 0, 1))
        assert fiber_radial_integral(f, ("p1", "p2"), k) == from_sympy(ref, QP)


def test_canonical_text_and_parse_roundtrip():
    f = P("3/2*q1^2*p1 - q2 + 7")
    assert str(f) == "3/2 * q1^2 * p1 - q2 + 7"
    assert parse_poly(str(f), QP) == f
    assert str(Poly.zero(QP)) == "0"


def test_errors():
    with pytest.raises(ChartMismatch):
        Poly.var(Q2, 0) + Poly.var(QP, 0)
    with pytest.raises(DomainError):
        P("p1").project(Q2, (0, 1))
    with pytest.raises(ValueError):
        parse_poly("q1 + x9", Q2)
    a = FormalSeries.constant(Poly.var(Q2, 0), 2)
    b = FormalSeries.constant(Poly.var(Q2, 0), 3)
    with pytest.raises(OrderMismatch):
        a + b


def test_series_examples():
    one = Poly.const(Q2, 1)
    a = FormalSeries([one, one, Poly.zero(Q2)])
    b = FormalSeries([one, -one, Poly.zero(Q2)])
    assert a.mul(b) == FormalSeries([one, Poly.zero(Q2), -one])
    assert a + FormalSeries.zero(Poly.zero(Q2), 2) == a
    x = FormalSeries.monomial(Poly.var(Q2, 0), 1, 1)
    y = FormalSeries.monomial(Poly.var(Q2, 1), 1, 1)
    assert x.mul(y) == FormalSeries.zero(Poly.zero(Q2), 1)


def test_neumann_examples():
    f = FormalSeries.constant(Poly.var(Q2, 0), 2)
    assert neumann_inverse(lambda s: s.zero_like(), 2)(f) == f
    c = Q(3, 5)
    inv = neumann_inverse(lambda s: s.shift(1).scale(c), 2)
    x = Poly.var(Q2, 0)
    assert inv(f) == FormalSeries([x, x.scale(-c), x.scale(c * c)])


def test_neumann_rejects_non_contracting():
    f = FormalSeries.constant(Poly.var(Q2, 0), 2)
    with pytest.raises(DomainError):
        neumann_inverse(lambda s: s, 2)(f)


coeff = st.fractions(min_value=-5, max_value=5, max_denominator=4)
monos = st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(0, 2), st.integers(0, 2))
polys = st.dictionaries(monos, coeff, max_size=4).map(lambda d: Poly(QP, d))


@settings(max_examples=60, deadline=None)
@given(polys, polys, polys)
def test_ring_laws_and_sympy_product(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert a * b == from_sympy(to_sympy(a) * to_sympy(b), QP)
    assert (a * b).diff(2) == a.diff(2) * b + a * b.diff(2)


@settings(max_examples=40, deadline=None)
@given(polys, polys)
def test_substitute_matches_sympy(a, b):
    images = [b, Poly.var(QP, 1), a, Poly.const(QP, 2)]
    xs = sp.symbols(QP)
    ref = to_sympy(a).subs(dict(zip(xs, [to_sympy(g) for g in images])), simultaneous=True)
    assert a.substitute(images) == from_sympy(ref, QP)


@settings(max_examples=30, deadline=None)
@given(st.lists(polys, min_size=4, max_size=4), st.lists(polys, min_size=4, max_size=4))
def test_cauchy_truncation(xs, ys):
    A, B = FormalSeries(xs), FormalSeries(ys)
    C = cauchy(A, B, lambda u, v: u * v)
    for k in range(4):
        assert C[k] == sum((xs[i] * ys[k - i] for i in range(k + 1)), Poly.zero(QP))
