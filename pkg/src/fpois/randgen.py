"""Seeded random instances for the property suites and the fuzz command."""

from __future__ import annotations

import os
import random
from typing import Sequence

from .calculus import DiffForm, MultiVector, exp_lie, exterior_d
from .ce import CECochain
from .cotangent import CotangentChart
from .kernel import FormalSeries, Poly, Q
from .structures import FormalPoisson


def max_degree(default: int = 3) -> int:
    """Polynomial degree cap, lowered by the FPOIS_MAX_DEGREE environment variable."""
    raw = os.environ.get("FPOIS_MAX_DEGREE")
    if raw is None:
        return default
    return max(0, min(default, int(raw)))


def random_scalar(rng: random.Random, big: int = 3) -> Q:
    num = rng.randint(-big, big)
    den = rng.choice((1, 1, 1, 2, 3))
    return Q(num, den)


def random_poly(rng: random.Random, names: Sequence[str], degree: int = 2, terms: int = 3,
                variables: Sequence[int] | None = None) -> Poly:
    names = tuple(names)
    degree = min(degree, max_degree(degree))
    pool = list(range(len(names))) if variables is None else list(variables)
    out = {}
    for _ in range(terms):
        exps = [0] * len(names)
        for _ in range(rng.randint(0, degree)):
            if pool:
                exps[rng.choice(pool)] += 1
        c = random_scalar(rng)
        out[tuple(exps)] = out.get(tuple(exps), 0) + c
    return Poly(names, out)


def random_tensor(rng: random.Random, cls, names: Sequence[str], k: int, degree: int = 2, density: float = 0.6,
                  variables: Sequence[int] | None = None):
    from itertools import combinations
    names = tuple(names)
    comps = {}
    for I in combinations(range(len(names)), k):
        if rng.random() < density:
            comps[I] = random_poly(rng, names, degree, rng.randint(1, 3), variables)
    return cls(names, k, comps)


def random_vf(rng, names, degree: int = 2, density: float = 0.6) -> MultiVector:
    return random_tensor(rng, MultiVector, names, 1, degree, density)


def random_series(rng, make, zero, N: int, start: int = 0, density: float = 0.7) -> FormalSeries:
    coeffs = [zero] * (N + 1)
    for k in range(start, N + 1):
        if rng.random() < density:
            coeffs[k] = make()
    return FormalSeries(coeffs)


def random_formal_vf(rng, names, N: int, degree: int = 2, density: float = 0.7) -> FormalSeries:
    """A formal vector field with vanishing order-0 part."""
    return random_series(rng, lambda: random_vf(rng, names, degree), MultiVector.zero(tuple(names), 1), N, 1, density)


def random_formal_function(rng, names, N: int, degree: int = 2, start: int = 0) -> FormalSeries:
    names = tuple(names)
    return random_series(rng, lambda: random_poly(rng, names, degree, 3), Poly.zero(names), N, start)


def random_cochain(rng, chart: CotangentChart, k: int, degree: int = 3) -> CECochain:
    from itertools import combinations
    comps = {}
    for I in combinations(range(chart.n), k):
        if rng.random() < 0.7:
            comps[I] = random_poly(rng, chart.total, degree, rng.randint(1, 4))
    return CECochain(chart, k, comps)


def random_base_poly(rng, chart: CotangentChart, degree: int = 2) -> Poly:
    """A polynomial in q only, on the total chart."""
    return random_poly(rng, chart.total, degree, 3, variables=range(chart.n))


def _nambu(names, g: Poly, F: Poly) -> MultiVector:
    """pi^{ij} = g eps^{ijk} dF/dx_k on a 3-chart."""
    comps = {(1, 2): g * F.diff(0), (2, 0): g * F.diff(1), (0, 1): g * F.diff(2)}
    return MultiVector(names, 2, comps)


def random_poisson(rng: random.Random, names: Sequence[str], N: int, degree: int = 1,
                   conjugate: bool = True) -> FormalPoisson:
    """A random formal Poisson structure with pi_0 = 0.

    Dimension 2: any bivector series.  Dimension 3: a Nambu tensor
    g eps grad F with g a formal function.  Higher: a function of q1, q2 times
    d1 ^ d2.  Optionally conjugated by exp(L_X) for a random X.
    """
    names = tuple(names)
    n = len(names)
    zero = MultiVector.zero(names, 2)
    if n < 2:
        return FormalPoisson(FormalSeries.zero(zero, N))
    if n == 2:
        pi = random_series(rng, lambda: MultiVector(names, 2, {(0, 1): random_poly(rng, names, degree, 2)}), zero, N, 1)
    elif n == 3:
        F = random_poly(rng, names, degree + 1, 3) + Poly.var(names, rng.randrange(3))
        pi = random_series(rng, lambda: _nambu(names, random_poly(rng, names, degree, 2), F), zero, N, 1)
        if pi[1].is_zero():
            pi = pi + FormalSeries.monomial(_nambu(names, Poly.const(names, 1), F), 1, N)
    else:
        pi = random_series(rng, lambda: MultiVector(names, 2, {(0, 1): random_poly(rng, names, degree, 2, variables=(0, 1))}), zero, N, 1)
    if pi[1].is_zero():
        pi = pi + FormalSeries.monomial(MultiVector(names, 2, {(0, 1): 1}), 1, N)
    if conjugate:
        X = random_formal_vf(rng, names, N, 1, 0.5)
        pi = exp_lie(X, pi)
    return FormalPoisson(pi)


def so3(names: Sequence[str], N: int, scale=1) -> FormalPoisson:
    """lambda * (q1 d2^d3 + q2 d3^d1 + q3 d1^d2)."""
    names = tuple(names)
    q = [Poly.var(names, i) for i in range(3)]
    pi = MultiVector(names, 2, {(1, 2): q[0], (2, 0): q[1], (0, 1): q[2]}).scale(scale)
    return FormalPoisson(FormalSeries.monomial(pi, 1, N))


def random_closed_form(rng: random.Random, names: Sequence[str], N: int, degree: int = 2, start: int = 0) -> FormalSeries:
    """Closed base 2-form series: a constant part plus d of a random 1-form at each order."""
    names = tuple(names)
    n = len(names)
    zero = DiffForm.zero(names, 2)
    coeffs = [zero] * (N + 1)
    if n < 2:
        return FormalSeries(coeffs)
    from itertools import combinations
    for k in range(start, N + 1):
        if rng.random() < 0.3:
            continue
        const = DiffForm(names, 2, {I: random_scalar(rng) for I in combinations(range(n), 2) if rng.random() < 0.5})
        theta = random_tensor(rng, DiffForm, names, 1, degree, 0.6)
        coeffs[k] = const + exterior_d(theta)
    return FormalSeries(coeffs)
