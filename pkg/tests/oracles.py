"""Independent sympy-side reference computations used by the tests."""

from __future__ import annotations

import sympy as sp

from fpois import Poly, Q


def to_sympy(p: Poly):
    xs = sp.symbols(p.names)
    return sp.Add(*[sp.Rational(int(c.numerator), int(c.denominator)) * sp.Mul(*[x ** e for x, e in zip(xs, exps)])
                    for exps, c in p.items()])


def from_sympy(expr, names) -> Poly:
    xs = sp.symbols(names)
    P = sp.Poly(sp.expand(expr), *xs)
    return Poly(names, {m: Q(int(c.p), int(c.q)) for m, c in P.terms() if c != 0})


def jacobiator(pi: dict, names) -> dict:
    """J^{ijk} = sum_l (pi^{il} d_l pi^{jk} + pi^{jl} d_l pi^{ki} + pi^{kl} d_l pi^{ij}) in sympy.

    ``pi`` maps ordered pairs (i, j) with i < j to sympy expressions.
    """
    xs = sp.symbols(names)
    n = len(xs)

    def P(i, j):
        if i == j:
            return 0
        return pi.get((i, j), 0) if i < j else -pi.get((j, i), 0)

    out = {}
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                s = 0
                for l in range(n):
                    s += P(i, l) * sp.diff(P(j, k), xs[l])
                    s += P(j, l) * sp.diff(P(k, i), xs[l])
                    s += P(k, l) * sp.diff(P(i, j), xs[l])
                s = sp.expand(s)
                if s != 0:
                    out[(i, j, k)] = s
    return out
