import random

import pytest
import sympy as sp

from fpois import (DiffForm, DomainError, FormalPoisson, FormalSeries, FormalSymplectic, MultiVector,
                   OrderMismatch, Poly, Q, bivector_series, bracket, ce_delta, classifying_action,
                   exp_lie, extract_commutant_poisson, factor_morphism_ambiguity, form_series, gauge,
                   hamiltonian_vf, log_along_projection, morphism_residual, solve_commutant,
                   solve_poisson_morphism)
from fpois.cotangent import CotangentChart, is_vertical
from fpois.randgen import random_closed_form, random_formal_vf, random_poisson, so3
from fpois.solver import (FormalDiffeo, MorphismSolution, commutation_residuals, pair_residuals,
                          symplectic_from_base)
from fpois.structures import function_series, vf_series
import fpois.solver as solver

C2 = CotangentChart(2)
N = 3


def lam_d12(C, N, coeff=1):
    return FormalPoisson(bivector_series(C.base, N, {1: {(0, 1): coeff}}))


def canonical(C, N):
    return FormalSymplectic(FormalSeries.constant(C.omega_can(), N))


def all_zero(residuals):
    return all(not r for r in residuals.values())


def test_diffeo_basics():
    X = FormalSeries.monomial(MultiVector.basis(C2.total, (0,)), 1, N)
    Y = FormalSeries.monomial(MultiVector.basis(C2.total, (1,)).times(C2.q(0)), 1, N)
    D = FormalDiffeo([X, Y])
    f = FormalSeries.constant(C2.q(1) * C2.q(0), N)
    assert D(f) == exp_lie(X, exp_lie(Y, f))
    assert D.inverse()(D(f)) == f
    assert len(D.compose(D)) == 4
    with pytest.raises(DomainError):
        FormalDiffeo([FormalSeries.constant(MultiVector.basis(C2.total, (0,)), N)])


def test_log_examples():
    qs = [FormalSeries.constant(C2.q(i), N) for i in range(2)]
    assert not any(log_along_projection(C2, qs))
    imgs = [qs[0] + FormalSeries.monomial(C2.p(0), 1, N), qs[1]]
    Z = log_along_projection(C2, imgs)
    assert Z == FormalSeries.monomial(MultiVector.basis(C2.total, (0,)).times(C2.p(0)), 1, N)
    with pytest.raises(DomainError):
        log_along_projection(C2, [qs[1], qs[0]])


def test_morphism_residual_trivial():
    zero = FormalPoisson(bivector_series(C2.base, N, {}))
    for k in range(N):
        assert not morphism_residual(FormalDiffeo(), C2, zero, canonical(C2, N), k)
    sol = solve_poisson_morphism(zero, canonical(C2, N))
    assert sol.diffeo.is_identity()


def test_first_residual_against_matrix_inverse():
    # R_1 = order-1 part of {q1, q2}_omega minus pi_1^{12}; the bracket comes from a sympy inverse
    c = Q(2, 3)
    B = form_series(C2.base, N, {0: {(0, 1): c}, 1: {(0, 1): 5}})
    omega = symplectic_from_base(C2, B)
    pi = lam_d12(C2, N, 7)
    lam = sp.Symbol("lam")
    b = sp.Rational(2, 3) + 5 * lam
    W = sp.Matrix([[0, b, 1, 0], [-b, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]])
    P = -W.inv()
    order1 = sp.series(P[0, 1], lam, 0, 2).removeO().coeff(lam, 1)
    R = morphism_residual(FormalDiffeo(), C2, pi, omega, 0)
    assert R.component((0, 1)) == Poly.const(C2.total, Q(int(sp.fraction(order1)[0]), int(sp.fraction(order1)[1])) - 7)


def test_residuals_are_cocycles():
    rng = random.Random(21)
    C3 = CotangentChart(3)
    pi = random_poisson(rng, C3.base, N)
    omega = symplectic_from_base(C3, random_closed_form(rng, C3.base, N))
    sol = solve_poisson_morphism(pi, omega)
    assert len(sol.residual_report) == N
    for R in sol.residual_report:
        assert not ce_delta(R)


def test_self_equivalence_pair_solves():
    pi = lam_d12(C2, N)
    omega = FormalSymplectic(FormalSeries.constant(C2.omega_can(), N)
                             + FormalSeries.monomial(DiffForm.basis(C2.total, (2, 3)), 1, N))
    sol = solve_poisson_morphism(pi, omega)
    assert all_zero(sol.final_residuals())
    assert all_zero(pair_residuals(sol.diffeo, C2, pi, omega, 1, solver.test_functions(C2, N)))
    com = solve_commutant(sol)
    assert all_zero(commutation_residuals(com.diffeo, sol.diffeo, C2, omega, solver.test_functions(C2, N)))
    for layer in com.data:
        for D in layer:
            assert not ce_delta(D)
    pi_prime = extract_commutant_poisson(com.diffeo, omega, N, C2)
    # constant structures are rigid: the commutant carries the same bivector
    assert pi_prime == pi


def test_commutant_trivial():
    zero = FormalPoisson(bivector_series(C2.base, N, {}))
    omega = canonical(C2, N)
    sol = solve_poisson_morphism(zero, omega)
    com = solve_commutant(sol)
    assert com.diffeo.is_identity()
    assert extract_commutant_poisson(com.diffeo, omega, N, C2) == zero


def test_solver_input_checks():
    with pytest.raises(DomainError):
        solve_poisson_morphism(FormalPoisson(bivector_series(C2.base, N, {0: {(0, 1): 1}})), canonical(C2, N))
    with pytest.raises(OrderMismatch):
        solve_poisson_morphism(lam_d12(C2, N), canonical(C2, N + 1))
    bad = FormalSymplectic(FormalSeries.constant(C2.omega_can().scale(2), N))
    with pytest.raises(DomainError):
        solve_poisson_morphism(lam_d12(C2, N), bad)
    with pytest.raises(DomainError):
        C3 = CotangentChart(3)
        classifying_action(form_series(C3.base, N, {0: {(0, 1): C3.base_var(2)}}), so3(C3.base, N))


def test_classify_examples():
    zero = FormalPoisson(bivector_series(C2.base, N, {}))
    res = classifying_action(form_series(C2.base, N, {}), zero)
    assert res.pi_B == zero
    c = Q(3, 4)
    B = form_series(C2.base, N, {0: {(0, 1): c}})
    pi = lam_d12(C2, N)
    res = classifying_action(B, pi)
    assert res.pi_B.pi[1] == pi.pi[1]
    assert res.pi_B == gauge(pi, B)
    for group in res.residuals.values():
        assert all_zero(group)


def test_classify_first_order_rigidity():
    rng = random.Random(31)
    C3 = CotangentChart(3)
    for _ in range(2):
        pi = random_poisson(rng, C3.base, 2)
        B = random_closed_form(rng, C3.base, 2)
        res = classifying_action(B, pi)
        assert not res.pi_B.pi[0]
        assert res.pi_B.pi[1] == pi.pi[1]


def test_factorization_round_trips():
    q1, q2, p1, p2 = (Poly.var(C2.total, i) for i in range(4))
    pi = FormalPoisson(bivector_series(C2.base, N, {1: {(0, 1): C2.base_var(0)}}))
    omega = symplectic_from_base(C2, form_series(C2.base, N, {0: {(0, 1): 1}}))
    sol = solve_poisson_morphism(pi, omega)
    same = factor_morphism_ambiguity(sol, sol)
    assert not any(same.H) and all(not any(V) for V in same.V.factors)

    H = function_series(C2.total, N, {1: q1 * p2 + p1 * p1, 2: q2})
    V = vf_series(C2.total, N, {2: {2: q1 * p1, 3: Poly.const(C2.total, 1)}})
    other = MorphismSolution(C2, pi, omega, FormalDiffeo([hamiltonian_vf(omega, H)] + list(sol.diffeo.factors) + [V]))
    assert all_zero(other.final_residuals())
    f = factor_morphism_ambiguity(sol, other)
    for a in range(4):
        x = FormalSeries.constant(Poly.var(C2.total, a), N)
        assert f.reassembled(x) == other.diffeo(x)
    assert all(is_vertical(v, C2) for V in f.V.factors for v in V)

    vert_only = MorphismSolution(C2, pi, omega, FormalDiffeo(list(sol.diffeo.factors) + [V]))
    g = factor_morphism_ambiguity(sol, vert_only)
    assert not g.H[2]
