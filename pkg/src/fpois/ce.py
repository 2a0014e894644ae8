"""Chevalley-Eilenberg cochains along the projection T*R^n -> R^n.

A degree-k cochain is a section of rho^* (wedge^k TP): polynomial
coefficients in (q, p) attached to increasing tuples of base indices.  The
differential uses the undeformed bracket ``{q_i, F} = dF/dp_i``:

    (delta D)^{i_1..i_{k+1}} = sum_l (-1)^(l-1) dD^{..omit i_l..}/dp_{i_l}

Psi relabels d/dq_I as dp_I and turns delta into the vertical de Rham
differential, whose fiberwise Poincare homotopy transports back to ``h``.
"""

from __future__ import annotations

from itertools import combinations
from typing import Mapping, Sequence

from .calculus import DiffForm, _sort_sign, exterior_d, format_terms
from .cotangent import CotangentChart
from .kernel import ChartMismatch, DomainError, Poly, fiber_radial_integral


class CECochain:
    """Element of Gamma(rho^* wedge^k TP) on a cotangent chart."""

    __slots__ = ("chart", "degree", "comps")

    def __init__(self, chart: CotangentChart, degree: int, comps: Mapping[Sequence[int], Poly] | None = None):
        if degree < 0:
            raise ValueError("cochain degree must be non-negative")
        self.chart = chart
        self.degree = degree
        out: dict[tuple[int, ...], Poly] = {}
        for idx, c in (comps or {}).items():
            idx = tuple(idx)
            if len(idx) != degree or any(not 0 <= i < chart.n for i in idx):
                raise ValueError(f"bad index tuple {idx} for degree {degree}")
            if not isinstance(c, Poly):
                c = Poly.const(chart.total, c)
            elif c.names != chart.total:
                raise ChartMismatch(f"{c.names} vs {chart.total}")
            sign, key = _sort_sign(idx) if idx else (1, ())
            if not sign or not c:
                continue
            v = out.get(key)
            c = c if sign > 0 else -c
            v = c if v is None else v + c
            if v:
                out[key] = v
            else:
                out.pop(key, None)
        self.comps = out

    @classmethod
    def _raw(cls, chart, degree, comps):
        d = object.__new__(cls)
        d.chart, d.degree, d.comps = chart, degree, comps
        return d

    @classmethod
    def function(cls, chart: CotangentChart, f: Poly) -> "CECochain":
        return cls(chart, 0, {(): f})

    def zero_like(self) -> "CECochain":
        return CECochain._raw(self.chart, self.degree, {})

    def component(self, idx: Sequence[int]) -> Poly:
        sign, key = _sort_sign(idx) if idx else (1, ())
        c = self.comps.get(key)
        if c is None or not sign:
            return self.chart.zero()
        return c if sign > 0 else -c

    def __bool__(self) -> bool:
        return bool(self.comps)

    def _check(self, other: "CECochain") -> None:
        if other.chart != self.chart:
            raise ChartMismatch("cochains on different charts")
        if other.degree != self.degree:
            raise ValueError(f"degree mismatch: {self.degree} vs {other.degree}")

    def __add__(self, other: "CECochain") -> "CECochain":
        self._check(other)
        out = dict(self.comps)
        for k, c in other.comps.items():
            v = out.get(k)
            v = c if v is None else v + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return CECochain._raw(self.chart, self.degree, out)

    def __neg__(self) -> "CECochain":
        return CECochain._raw(self.chart, self.degree, {k: -c for k, c in self.comps.items()})

    def __sub__(self, other: "CECochain") -> "CECochain":
        return self + (-other)

    def scale(self, c) -> "CECochain":
        return CECochain(self.chart, self.degree, {k: v.scale(c) for k, v in self.comps.items()})

    def times(self, f: Poly) -> "CECochain":
        return CECochain(self.chart, self.degree, {k: v * f for k, v in self.comps.items()})

    def __mul__(self, other):
        return self.times(other) if isinstance(other, Poly) else self.scale(other)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, CECochain):
            return NotImplemented
        return other.chart == self.chart and other.degree == self.degree and other.comps == self.comps

    def __hash__(self) -> int:
        return hash((self.degree, frozenset(self.comps.items())))

    def __str__(self) -> str:
        if not self.comps:
            return "0"
        if self.degree == 0:
            return str(self.comps[()])
        base = self.chart.base
        return format_terms(sorted(self.comps.items()), lambda idx: "∧".join("∂" + base[i] for i in idx))

    def __repr__(self) -> str:
        return f"CECochain(k={self.degree}, {str(self)!r})"


def ce_delta(D: CECochain) -> CECochain:
    """The Chevalley-Eilenberg differential; degree k -> k + 1 (k < n)."""
    chart, k = D.chart, D.degree
    if k >= chart.n:
        raise DomainError("delta is not defined on top-degree cochains")
    n = chart.n
    out: dict[tuple[int, ...], Poly] = {}
    for I, c in D.comps.items():
        for i in range(n):
            if i in I:
                continue
            dc = c.diff(n + i)
            if not dc:
                continue
            # i lands at 1-based position l of the sorted tuple J
            l = sum(1 for j in I if j < i)
            J = I[:l] + (i,) + I[l:]
            if l & 1:
                dc = -dc
            v = out.get(J)
            v = dc if v is None else v + dc
            if v:
                out[J] = v
            else:
                out.pop(J, None)
    return CECochain._raw(chart, k + 1, out)


def psi(D: CECochain):
    """d/dq_I -> dp_I; a degree-0 cochain maps to its function."""
    chart = D.chart
    if D.degree == 0:
        return D.component(())
    n = chart.n
    return DiffForm._raw(chart.total, D.degree, {tuple(n + i for i in I): c for I, c in D.comps.items()})


def psi_inv(eta, chart: CotangentChart) -> CECochain:
    if isinstance(eta, Poly):
        return CECochain.function(chart, eta)
    n = chart.n
    comps = {}
    for I, c in eta.comps.items():
        if any(i < n for i in I):
            raise DomainError("form is not vertical (has dq components)")
        comps[tuple(i - n for i in I)] = c
    return CECochain._raw(chart, eta.degree, comps)


def d_ver(eta, chart: CotangentChart):
    """Vertical de Rham differential: the dp-only part of the full exterior derivative."""
    n = chart.n
    d = exterior_d(eta)
    return DiffForm._raw(chart.total, d.degree, {I: c for I, c in d.comps.items() if I[0] >= n})


def vertical_homotopy(eta: DiffForm, chart: CotangentChart):
    """Fiberwise Poincare operator on vertical forms of degree k >= 1.

    A monomial m(q) p^a dp_I with |a| = d and |I| = k goes to
    (1/(k+d)) sum_l (-1)^(l-1) p_{i_l} m(q) p^a dp_{I without i_l}.
    """
    if isinstance(eta, Poly):
        raise DomainError("vertical homotopy is not defined in degree 0")
    n, k = chart.n, eta.degree
    fibers = chart.fiber
    if k == 1:
        out = chart.zero()
        for (i,), c in eta.comps.items():
            if i < n:
                raise DomainError("form is not vertical (has dq components)")
            out = out + Poly.var(chart.total, i) * fiber_radial_integral(c, fibers, 1)
        return out
    comps: dict[tuple[int, ...], Poly] = {}
    for I, c in eta.comps.items():
        if any(i < n for i in I):
            raise DomainError("form is not vertical (has dq components)")
        w = fiber_radial_integral(c, fibers, k)
        for l, i in enumerate(I):
            t = Poly.var(chart.total, i) * w
            if l & 1:
                t = -t
            K = I[:l] + I[l + 1:]
            v = comps.get(K)
            v = t if v is None else v + t
            if v:
                comps[K] = v
            else:
                comps.pop(K, None)
    return DiffForm._raw(chart.total, k - 1, comps)


def ce_homotopy(D: CECochain) -> CECochain:
    """h = Psi^{-1} h_ver Psi; satisfies delta h + h delta = id in degrees >= 1."""
    if D.degree == 0:
        raise DomainError("the homotopy is not defined in degree 0")
    return psi_inv(vertical_homotopy(psi(D), D.chart), D.chart)


def degree0_defect(f: Poly, chart: CotangentChart) -> Poly:
    """f - rho^*(f restricted to the zero section); equals h(delta f) in degree 0."""
    return f - f.set_zero(range(chart.n, 2 * chart.n))


def cochain_from_matrix(chart: CotangentChart, M: Mapping[tuple[int, int], Poly]) -> CECochain:
    """Degree-2 cochain with components M[(i, j)] for i < j."""
    return CECochain(chart, 2, {(i, j): c for (i, j), c in M.items() if i < j})


def all_index_tuples(n: int, k: int):
    return combinations(range(n), k)
