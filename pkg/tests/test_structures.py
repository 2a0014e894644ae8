import random

import pytest
import sympy as sp

from fpois import (ChartMismatch, DiffForm, DomainError, FormalPoisson, FormalSeries,
                   FormalSymplectic, MultiVector, OrderMismatch, Poly, Q, bivector_series, bracket,
                   check_equivalence_witness, exp_lie, flat, form_series, function_series, gauge,
                   hamiltonian_vf, invert_poisson, invert_symplectic, jacobi_residual, parse_poly,
                   sharp)
from fpois.cotangent import CotangentChart
from fpois.randgen import random_closed_form, random_formal_vf, random_poisson, so3
from fpois.structures import determinant, form_matrix, pair_bracket

from oracles import jacobiator, to_sympy

Q2 = ("q1", "q2")
Q3 = ("q1", "q2", "q3")


def P(text, names=Q2):
    return parse_poly(text, names)


def const_series(x, N):
    return FormalSeries.constant(x, N)


def test_jacobi_residual_examples():
    assert jacobi_residual(bivector_series(Q2, 3, {1: {(0, 1): 1}})).is_zero()
    assert jacobi_residual(bivector_series(Q2, 3, {1: {(0, 1): P("q1")}})).is_zero()
    pi = bivector_series(Q3, 3, {1: {(0, 1): P("q2", Q3), (1, 2): 1}})
    res = jacobi_residual(pi)
    assert not res[0] and not res[1] and res[2] and not res[3]
    with pytest.raises(DomainError):
        FormalPoisson(pi)


def test_jacobi_residual_against_jacobiator():
    pi = bivector_series(Q3, 2, {1: {(0, 1): P("q2", Q3), (1, 2): 1}})
    lam2 = {I: to_sympy(c) for I, c in pi[1].comps.items()}
    J = jacobiator(lam2, Q3)
    res = jacobi_residual(pi)[2]
    assert {I: to_sympy(c) for I, c in res.comps.items()} == {I: 2 * v for I, v in J.items()}


def test_sharp_flat_examples():
    pi = bivector_series(Q2, 2, {1: {(0, 1): 1}})
    dq1 = const_series(DiffForm.basis(Q2, (0,)), 2)
    assert sharp(pi, dq1) == FormalSeries.monomial(MultiVector.basis(Q2, (1,)), 1, 2)
    c = Q(5, 7)
    B = form_series(Q2, 2, {0: {(0, 1): c}})
    d2 = const_series(MultiVector.basis(Q2, (1,)), 2)
    assert flat(B, d2) == const_series(DiffForm.basis(Q2, (0,)).scale(-c), 2)
    zero = FormalSeries.zero(DiffForm.zero(Q2, 1), 2)
    assert not any(sharp(pi, zero))


def test_gauge_examples():
    pi = FormalPoisson(bivector_series(Q2, 2, {1: {(0, 1): 1}}))
    assert gauge(pi, form_series(Q2, 2, {})) == pi
    c = Q(-3, 2)
    out = gauge(pi, form_series(Q2, 2, {0: {(0, 1): c}}))
    assert out.pi == bivector_series(Q2, 2, {1: {(0, 1): 1}, 2: {(0, 1): c}})


def test_gauge_against_matrix_formula():
    # row-vector convention: alpha -> alpha Pi, X -> X B, so tau_B(pi) has matrix (1 + Pi B)^(-1) Pi
    lam = sp.Symbol("lam")
    q1, q2, q3 = sp.symbols(Q3)
    N = 3
    pi = so3(Q3, N)
    B = form_series(Q3, N, {0: {(0, 1): 1, (1, 2): 2}, 1: {(0, 2): Q(1, 3)}})
    Pm = sp.Matrix([[0, q3, -q2], [-q3, 0, q1], [q2, -q1, 0]]) * lam
    Bm = sp.Matrix([[0, 1, sp.Rational(1, 3) * lam], [-1, 0, 2], [-sp.Rational(1, 3) * lam, -2, 0]])
    ref = (sp.eye(3) + Pm * Bm).inv() * Pm
    got = gauge(pi, B).pi
    for i in range(3):
        for j in range(i + 1, 3):
            series = sp.expand(sp.series(ref[i, j], lam, 0, N + 1).removeO())
            for k in range(N + 1):
                assert sp.expand(series.coeff(lam, k) - to_sympy(got[k].component((i, j)))) == 0


def test_gauge_errors():
    pi = FormalPoisson(bivector_series(Q2, 2, {1: {(0, 1): 1}}))
    with pytest.raises(OrderMismatch):
        gauge(pi, form_series(Q2, 3, {}))
    with pytest.raises(ChartMismatch):
        gauge(pi, form_series(Q3, 2, {}))
    not_closed = form_series(Q3, 2, {0: {(0, 1): P("q3", Q3)}})
    with pytest.raises(DomainError):
        gauge(so3(Q3, 2), not_closed)
    with pytest.raises(DomainError):
        gauge(bivector_series(Q2, 2, {0: {(0, 1): 1}}), form_series(Q2, 2, {}))


def test_gauge_laws_random():
    rng = random.Random(3)
    for _ in range(8):
        names = Q3 if rng.random() < 0.5 else Q2
        pi = random_poisson(rng, names, 3)
        B1, B2 = random_closed_form(rng, names, 3), random_closed_form(rng, names, 3)
        assert gauge(gauge(pi, B1), B2) == gauge(pi, B1 + B2)
        assert jacobi_residual(gauge(pi, B1)).is_zero()


def test_invert_canonical():
    C = CotangentChart(1)
    w = FormalSymplectic(const_series(C.omega_can(), 2))
    q, p = const_series(C.q(0), 2), const_series(C.p(0), 2)
    assert bracket(w, q, p) == const_series(Poly.const(C.total, 1), 2)


def test_invert_symplectic_against_sympy_inverse():
    C = CotangentChart(2)
    N = 3
    w = FormalSeries.constant(C.omega_can(), N) + FormalSeries.monomial(DiffForm.basis(C.total, (2, 3)), 1, N)
    got = invert_symplectic(FormalSymplectic(w)).pi
    lam = sp.Symbol("lam")
    W = sp.Matrix([[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, lam], [0, -1, -lam, 0]])
    # adjugate / determinant oracle
    ref = -W.adjugate() / W.det()
    for i in range(4):
        for j in range(i + 1, 4):
            s = sp.series(ref[i, j], lam, 0, N + 1).removeO()
            for k in range(N + 1):
                assert s.coeff(lam, k) == to_sympy(got[k].component((i, j)))
    back = invert_poisson(FormalPoisson(got))
    assert back.omega == w


def test_determinant_requirement():
    C = CotangentChart(1)
    degenerate = FormalSeries.constant(DiffForm.basis(C.total, (0, 1)).times(C.q(0)), 1)
    with pytest.raises(DomainError):
        FormalSymplectic(degenerate)
    assert determinant(form_matrix(C.omega_can())) == Poly.const(C.total, 1)


def test_hamiltonian_vf():
    C = CotangentChart(2)
    N = 2
    w = FormalSymplectic(FormalSeries.constant(C.omega_can(), N))
    assert not any(hamiltonian_vf(w, FormalSeries.constant(Poly.const(C.total, 3), N)))
    X = hamiltonian_vf(w, FormalSeries.constant(C.q(0), N))
    assert X[0] == MultiVector.basis(C.total, (2,))
    F = FormalSeries.constant(parse_poly("p1^2*q2 + p2*q1", C.total), N)
    assert bracket(w, FormalSeries.constant(C.q(0), N), F) == F.map(lambda f: f.diff(2))
    G = FormalSeries.constant(parse_poly("q1*p2 - p1^3", C.total), N)
    assert bracket(w, F, G) == pair_bracket(w, F, G) == -bracket(w, G, F)


def test_equivalence_witness():
    rng = random.Random(9)
    pi = random_poisson(rng, Q3, 3, conjugate=False)
    zero = FormalSeries.zero(MultiVector.zero(Q3, 1), 3)
    assert check_equivalence_witness(pi, pi, zero)
    other = gauge(pi, random_closed_form(rng, Q3, 3, start=1))
    if other != pi:
        assert not check_equivalence_witness(pi, other, zero)
    X = random_formal_vf(rng, Q3, 3)
    assert check_equivalence_witness(pi, FormalPoisson(exp_lie(X, pi.pi)), X)


def test_function_series_builder():
    f = function_series(Q2, 2, {0: 1, 2: P("q1")})
    assert f[1] == Poly.zero(Q2) and f[2] == P("q1")
