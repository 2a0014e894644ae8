"""Randomized invariant checks shared by the ``homotopy-check`` and ``fuzz`` commands.

Each check takes a seeded ``random.Random`` and returns ``(passed, detail)``.
"""

from __future__ import annotations

import random
from typing import Callable

from .calculus import (DiffForm, MultiVector, contract, exp_lie, exterior_d,
                       formal_times, lie_derivative, schouten, wedge)
from .ce import ce_delta, ce_homotopy, d_ver, degree0_defect, psi
from .cotangent import CotangentChart
from .courant import (CourantSection, apply_flow, backward_generators,
                      bfield_section, dorfman, involutivity_failures,
                      self_equivalence, check_dirac_criterion)
from .kernel import FormalSeries, Poly, Q, neumann_inverse
from .randgen import (random_closed_form, random_cochain, random_formal_function,
                      random_formal_vf, random_poisson, random_poly, random_tensor,
                      random_base_poly)
from .solver import log_along_projection
from .structures import FormalSymplectic, gauge, jacobi_residual

Check = Callable[[random.Random], tuple[bool, str]]


def _chart(rng, lo=1, hi=3) -> CotangentChart:
    return CotangentChart(rng.randint(lo, hi))


def _names(rng, lo=1, hi=3):
    return tuple(f"q{i + 1}" for i in range(rng.randint(lo, hi)))


# -- homotopy suite -------------------------------------------------------------


def check_homotopy(rng):
    C = _chart(rng)
    k = rng.randint(1, C.n)
    D = random_cochain(rng, C, k)
    lhs = ce_homotopy(D)
    total = ce_delta(lhs)
    if k < C.n:
        total = total + ce_homotopy(ce_delta(D))
    return total == D, f"n={C.n} k={k}"


def check_homotopy_degree0(rng):
    C = _chart(rng)
    f = random_poly(rng, C.total, 3, 4)
    return ce_homotopy(ce_delta(psi_function(C, f))).component(()) == degree0_defect(f, C), f"n={C.n}"


def psi_function(C, f):
    from .ce import CECochain
    return CECochain.function(C, f)


def check_chain_map(rng):
    C = _chart(rng)
    k = rng.randint(0, C.n - 1)
    D = random_cochain(rng, C, k)
    return d_ver(psi(D), C) == psi(ce_delta(D)), f"n={C.n} k={k}"


def check_delta_squared(rng):
    C = _chart(rng, 2, 3)
    k = rng.randint(0, C.n - 2)
    D = random_cochain(rng, C, k)
    return not ce_delta(ce_delta(D)), f"n={C.n} k={k}"


def check_linearity(rng):
    C = _chart(rng)
    k = rng.randint(1, C.n)
    D = random_cochain(rng, C, k)
    m = random_base_poly(rng, C)
    ok = ce_homotopy(D.times(m)) == ce_homotopy(D).times(m)
    if k < C.n:
        ok = ok and ce_delta(D.times(m)) == ce_delta(D).times(m)
    return ok, f"n={C.n} k={k}"


HOMOTOPY_SUITE: dict[str, Check] = {
    "homotopy": check_homotopy,
    "homotopy_degree0": check_homotopy_degree0,
    "chain_map": check_chain_map,
    "delta_squared": check_delta_squared,
    "linearity": check_linearity,
}


# -- calculus -------------------------------------------------------------------


def _mv(rng, names, k, deg=2):
    if k == 0:
        return random_poly(rng, names, deg, 3)
    return random_tensor(rng, MultiVector, names, k, deg)


def check_ring_axioms(rng):
    names = _names(rng)
    a, b, c = (random_poly(rng, names, 2, 3) for _ in range(3))
    return (a * b) * c == a * (b * c) and a * (b + c) == a * b + a * c, f"n={len(names)}"


def check_schouten_antisymmetry(rng):
    names = _names(rng, 2, 3)
    a, b = rng.randint(0, 2), rng.randint(0, 2)
    A, B = _mv(rng, names, a), _mv(rng, names, b)
    sign = -1 if ((a - 1) * (b - 1)) % 2 == 0 else 1
    return schouten(A, B) == schouten(B, A).scale(sign), f"degrees {a},{b}"


def check_schouten_jacobi(rng):
    names = _names(rng, 2, 3)
    a, b, c = (rng.randint(1, 2) for _ in range(3))
    A, B, C = _mv(rng, names, a, 1), _mv(rng, names, b, 1), _mv(rng, names, c, 1)
    # [A,[B,C]] = [[A,B],C] + (-1)^{(a-1)(b-1)} [B,[A,C]]
    lhs = schouten(A, schouten(B, C))
    rhs = schouten(schouten(A, B), C)
    t = schouten(B, schouten(A, C))
    rhs = rhs + (t if ((a - 1) * (b - 1)) % 2 == 0 else -t)
    return lhs == rhs, f"degrees {a},{b},{c}"


def check_schouten_leibniz(rng):
    names = _names(rng, 2, 3)
    a, b, c = (rng.randint(1, 2) for _ in range(3))
    A, B, C = _mv(rng, names, a), _mv(rng, names, b), _mv(rng, names, c)
    lhs = schouten(A, wedge(B, C))
    t = wedge(B, schouten(A, C))
    rhs = wedge(schouten(A, B), C) + (t if ((a - 1) * b) % 2 == 0 else -t)
    return lhs == rhs, f"degrees {a},{b},{c}"


def check_cartan(rng):
    names = _names(rng)
    k = rng.randint(1, len(names))
    X = random_tensor(rng, MultiVector, names, 1)
    w = random_tensor(rng, DiffForm, names, k)
    # lie_derivative is built from the Cartan formula; compare with the coordinate expression
    return lie_derivative(X, w) == _lie_coordinate(X, w), f"n={len(names)} k={k}"


def _lie_coordinate(X, w):
    """(L_X w)_I = X(w_I) + sum_l sum_j w_{I with i_l -> j} d_{i_l} X^j."""
    from .calculus import apply_vf, _sort_sign
    names = w.names
    out = {}
    for I, c in w.comps.items():
        out[I] = out.get(I, Poly.zero(names)) + apply_vf(X, c)
    for I, c in w.comps.items():
        for l, j in enumerate(I):
            for i in range(len(names)):
                dXj = X.component((j,)).diff(i)
                if not dXj:
                    continue
                J = I[:l] + (i,) + I[l + 1:]
                sign, key = _sort_sign(J)
                if not sign:
                    continue
                t = c * dXj
                out[key] = out.get(key, Poly.zero(names)) + (t if sign > 0 else -t)
    return DiffForm(names, w.degree, out)


def check_lie_iota(rng):
    names = _names(rng)
    k = rng.randint(1, len(names))
    X = random_tensor(rng, MultiVector, names, 1)
    Y = random_tensor(rng, MultiVector, names, 1)
    w = random_tensor(rng, DiffForm, names, k)
    lhs = lie_derivative(X, contract(Y, w)) - contract(Y, lie_derivative(X, w))
    return lhs == contract(schouten(X, Y), w), f"n={len(names)} k={k}"


def check_d_squared(rng):
    names = _names(rng)
    k = rng.randint(0, len(names))
    w = random_poly(rng, names, 3, 4) if k == 0 else random_tensor(rng, DiffForm, names, k, 3)
    return not exterior_d(exterior_d(w)), f"n={len(names)} k={k}"


def check_exp_multiplicative(rng):
    names = _names(rng)
    N = rng.randint(1, 4)
    X = random_formal_vf(rng, names, N, 1)
    f = random_formal_function(rng, names, N)
    g = random_formal_function(rng, names, N)
    ok = exp_lie(X, f.mul(g)) == exp_lie(X, f).mul(exp_lie(X, g))
    from .calculus import formal_d
    ok = ok and exp_lie(X, formal_d(f)) == formal_d(exp_lie(X, f))
    ok = ok and exp_lie(-X, exp_lie(X, f)) == f
    return ok, f"n={len(names)} N={N}"


# -- structures -----------------------------------------------------------------


def check_gauge_law(rng):
    names = _names(rng, 2, 3)
    N = rng.randint(2, 4)
    pi = random_poisson(rng, names, N)
    B1 = random_closed_form(rng, names, N)
    B2 = random_closed_form(rng, names, N)
    ok = gauge(gauge(pi, B1), B2) == gauge(pi, B1 + B2) and gauge(gauge(pi, B1), -B1) == pi
    return ok, f"n={len(names)} N={N}"


def check_neumann(rng):
    names = _names(rng)
    N = rng.randint(1, 4)
    Xs = random_formal_vf(rng, names, N, 1)
    T = lambda f: exp_lie(Xs, f) - f  # strictly raises the lambda-order
    inv = neumann_inverse(T, N)
    f = random_formal_function(rng, names, N)
    g = inv(f)
    return g + T(g) == f, f"n={len(names)} N={N}"


def check_log_roundtrip(rng):
    C = _chart(rng)
    N = rng.randint(1, 4)
    Z = random_formal_vf(rng, C.total, N, 1)
    qs = [FormalSeries.constant(C.q(i), N) for i in range(C.n)]
    imgs = [exp_lie(Z, q) for q in qs]
    L = log_along_projection(C, imgs)
    return [exp_lie(L, q) for q in qs] == imgs, f"n={C.n} N={N}"


# -- Courant --------------------------------------------------------------------


def _section(rng, C, N):
    X = random_formal_vf(rng, C.total, N, 1)
    X = X + FormalSeries.constant(random_tensor(rng, MultiVector, C.total, 1, 1), N)
    a = FormalSeries([random_tensor(rng, DiffForm, C.total, 1, 1, 0.5) for _ in range(N + 1)])
    return CourantSection(X, a)


def check_dorfman_leibniz(rng):
    C = _chart(rng, 1, 2)
    N = rng.randint(1, 2)
    e1, e2 = _section(rng, C, N), _section(rng, C, N)
    f = random_formal_function(rng, C.total, N, 1)
    from .calculus import formal_lie
    lhs = dorfman(e1, e2.times(f))
    rhs = dorfman(e1, e2).times(f) + e2.times(formal_lie(e1.X, f))
    return lhs == rhs, f"n={C.n} N={N}"


def check_bfield_automorphism(rng):
    C = _chart(rng, 1, 2)
    N = rng.randint(1, 2)
    e1, e2 = _section(rng, C, N), _section(rng, C, N)
    B = FormalSeries([exterior_d(random_tensor(rng, DiffForm, C.total, 1, 2)) for _ in range(N + 1)])
    ok = dorfman(bfield_section(B, e1), bfield_section(B, e2)) == bfield_section(B, dorfman(e1, e2))
    ok = ok and bfield_section(-B, bfield_section(B, e1)) == e1
    return ok, f"n={C.n} N={N}"


def check_flow_law(rng):
    C = _chart(rng, 1, 2)
    N = rng.randint(1, 3)
    X = random_formal_vf(rng, C.total, N, 1)
    b = FormalSeries([exterior_d(random_tensor(rng, DiffForm, C.total, 1, 1)) for _ in range(N + 1)])
    s = _section(rng, C, N)
    half = Q(1, 2)
    return apply_flow(X, b, half, apply_flow(X, b, half, s)) == apply_flow(X, b, 1, s), f"n={C.n} N={N}"


def check_involutivity(rng):
    n = rng.randint(2, 3)
    C = CotangentChart(n)
    pi = random_poisson(rng, C.base, 3)
    return not involutivity_failures(backward_generators(C, pi)), f"n={n}"


def check_self_equivalence(rng):
    n = rng.randint(2, 3)
    C = CotangentChart(n)
    pi = random_poisson(rng, C.base, rng.randint(1, 3))
    se = self_equivalence(pi, C)
    return se.report.passed, f"n={n} failed={se.report.first_failure()}"


def check_dirac_negative(rng):
    n = rng.randint(2, 3)
    C = CotangentChart(n)
    N = 3
    pi = random_poisson(rng, C.base, N)
    se = self_equivalence(pi, C, dirac=False)
    bump = FormalSeries.monomial(DiffForm.basis(C.total, (n, n + 1)), 1, N)
    bad = FormalSymplectic(se.omega.omega + bump)
    return not check_dirac_criterion(C, pi, pi, se.Z, bad).passed, f"n={n}"


FUZZ_SUITE: dict[str, Check] = {
    "ring_axioms": check_ring_axioms,
    "schouten_antisymmetry": check_schouten_antisymmetry,
    "schouten_jacobi": check_schouten_jacobi,
    "schouten_leibniz": check_schouten_leibniz,
    "cartan": check_cartan,
    "lie_iota": check_lie_iota,
    "d_squared": check_d_squared,
    "exp_multiplicative": check_exp_multiplicative,
    "gauge_law": check_gauge_law,
    "neumann": check_neumann,
    "log_roundtrip": check_log_roundtrip,
    "dorfman_leibniz": check_dorfman_leibniz,
    "bfield_automorphism": check_bfield_automorphism,
    "flow_law": check_flow_law,
    "involutivity": check_involutivity,
    "self_equivalence": check_self_equivalence,
    "dirac_negative_control": check_dirac_negative,
    **HOMOTOPY_SUITE,
}


def case_seed(seed: int, name: str, index: int) -> int:
    """Deterministic per-case seed independent of suite ordering and worker count."""
    h = 0
    for ch in name:
        h = (h * 131 + ord(ch)) % (1 << 61)
    return (seed * 1_000_003 + h * 7919 + index) % (1 << 63)


def run_case(args) -> tuple[str, int, bool, str]:
    suite, name, seed, index = args
    check = (HOMOTOPY_SUITE if suite == "homotopy" else FUZZ_SUITE)[name]
    rng = random.Random(case_seed(seed, name, index))
    ok, detail = check(rng)
    return name, index, bool(ok), detail
