"""The cotangent chart T*R^n: projection, canonical forms, lifts, the field Z.

Coordinates on the total space are ``q1..qn, p1..pn`` in that order, so the
fiber coordinate paired with base index ``i`` sits at index ``n + i``.
"""

from __future__ import annotations

from math import factorial
from typing import Sequence

from .calculus import (DiffForm, MultiVector, exterior_d, formal_d,
                       lie_power_series, pullback, require_positive_order)
from .kernel import ChartMismatch, DomainError, FormalSeries, Poly, Q
from .structures import FormalSymplectic, poisson_tensor


class CotangentChart:
    """Base chart ``q1..qn`` together with the total chart ``q1..qn, p1..pn``."""

    __slots__ = ("n", "base", "total")

    def __init__(self, n: int, base_names: Sequence[str] | None = None, fiber_names: Sequence[str] | None = None):
        if n < 1:
            raise ValueError("base dimension must be positive")
        self.n = n
        self.base = tuple(base_names or (f"q{i + 1}" for i in range(n)))
        fibers = tuple(fiber_names or (f"p{i + 1}" for i in range(n)))
        if len(self.base) != n or len(fibers) != n:
            raise ValueError("need n base and n fiber names")
        self.total = self.base + fibers
        if len(set(self.total)) != 2 * n:
            raise ValueError("coordinate names must be distinct")

    @property
    def fiber(self) -> tuple[str, ...]:
        return self.total[self.n:]

    def q(self, i: int) -> Poly:
        return Poly.var(self.total, i)

    def p(self, i: int) -> Poly:
        return Poly.var(self.total, self.n + i)

    def base_var(self, i: int) -> Poly:
        return Poly.var(self.base, i)

    def zero(self) -> Poly:
        return Poly.zero(self.total)

    def __eq__(self, other) -> bool:
        return isinstance(other, CotangentChart) and other.total == self.total

    def __hash__(self) -> int:
        return hash(self.total)

    def __repr__(self) -> str:
        return f"CotangentChart(n={self.n})"

    # -- projection -----------------------------------------------------------
    def rho_pullback(self, x):
        """rho^* of a base function, base form, or a series of either."""
        if isinstance(x, FormalSeries):
            return x.map(self.rho_pullback)
        if isinstance(x, Poly):
            if x.names != self.base:
                raise ChartMismatch(f"{x.names} is not the base chart {self.base}")
            return x.embed(self.total, range(self.n))
        if isinstance(x, DiffForm):
            if x.names != self.base:
                raise ChartMismatch(f"{x.names} is not the base chart {self.base}")
            return DiffForm._raw(self.total, x.degree, {I: c.embed(self.total, range(self.n)) for I, c in x.comps.items()})
        raise TypeError("only functions and forms pull back along the projection")

    def basic_part(self, F: Poly) -> Poly | None:
        """The base function f with rho^* f = F, or None when F depends on p."""
        try:
            return F.project(self.base, range(self.n))
        except DomainError:
            return None

    def is_basic(self, F: FormalSeries) -> FormalSeries | None:
        out = []
        for c in F:
            f = self.basic_part(c)
            if f is None:
                return None
            out.append(f)
        return FormalSeries(out)

    def project_vf(self, X: MultiVector) -> dict[int, Poly]:
        """q-direction components of a field on the total space (a section of rho^* TP)."""
        return {I[0]: c for I, c in X.comps.items() if I[0] < self.n}

    # -- canonical structures ---------------------------------------------------
    def theta_can(self) -> DiffForm:
        return DiffForm(self.total, 1, {(i,): self.p(i) for i in range(self.n)})

    def omega_can(self) -> DiffForm:
        return DiffForm(self.total, 2, {(i, self.n + i): 1 for i in range(self.n)})

    def canonical_forms(self) -> tuple[DiffForm, DiffForm]:
        return self.theta_can(), self.omega_can()

    def horizontal_lift(self, D):
        """Flat lift of a section of rho^* TP: coefficients kept, directions d/dq only."""
        if isinstance(D, FormalSeries):
            return D.map(self.horizontal_lift)
        comps = getattr(D, "comps", D)
        out = {}
        for idx, c in comps.items():
            i = idx[0] if isinstance(idx, tuple) else idx
            if not 0 <= i < self.n:
                raise DomainError(f"base index {i} out of range")
            if c.names != self.total:
                raise ChartMismatch(f"{c.names} vs {self.total}")
            out[(i,)] = c
        return MultiVector(self.total, 1, out)

    def vertical_field(self, comps: dict[int, Poly]) -> MultiVector:
        return MultiVector(self.total, 1, {(self.n + i,): c for i, c in comps.items()})

    # -- the self-equivalence field ------------------------------------------------
    def z_field(self, pi) -> FormalSeries:
        """Z = hor(pi^#(theta_can)) = sum_ij p_i pi^{ij}(q) d/dq_j."""
        P = poisson_tensor(pi)
        if P[0]:
            raise DomainError("z_field needs pi_0 = 0")
        if P[0].names != self.base:
            raise ChartMismatch(f"{P[0].names} is not the base chart")
        out = []
        for piece in P:
            comps: dict[tuple[int], Poly] = {}
            for (i, j), c in piece.comps.items():
                c = c.embed(self.total, range(self.n))
                comps[(j,)] = comps.get((j,), self.zero()) + self.p(i) * c
                comps[(i,)] = comps.get((i,), self.zero()) - self.p(j) * c
            out.append(MultiVector(self.total, 1, comps))
        return FormalSeries(out)

    def omega_from_z(self, Z: FormalSeries) -> tuple[FormalSymplectic, FormalSeries]:
        """omega = sum_k L_Z^k omega_can / (k+1)! and a potential Theta with omega = omega_can + d Theta.

        Theta = -sum_{k>=1} L_Z^k theta_can / (k! (k+1)), so its order-m
        coefficient theta_m satisfies omega_m = d theta_m for m >= 1.
        """
        require_positive_order(Z, "Z")
        N = Z.order
        if Z[0].names != self.total:
            raise ChartMismatch("Z must live on the total chart")
        w = FormalSeries.constant(self.omega_can(), N)
        omega = lie_power_series(Z, w, lambda k: Q(1, factorial(k + 1)))
        theta = FormalSeries.constant(self.theta_can(), N)
        potential = lie_power_series(Z, theta, lambda k: Q(0) if k == 0 else Q(-1, factorial(k) * (k + 1)))
        return FormalSymplectic(omega), potential

    # -- fiber translations ----------------------------------------------------------
    def fiber_translation(self, theta: DiffForm) -> list[Poly]:
        """Images of the total coordinates under p_i -> p_i - theta_i(q).

        Pulling back along this map sends omega_can + rho^* B' to
        omega_can + rho^* (B' + d theta).
        """
        if theta.names != self.base or theta.degree != 1:
            raise ChartMismatch("theta must be a 1-form on the base chart")
        images = [self.q(i) for i in range(self.n)]
        for i in range(self.n):
            t = theta.component((i,)).embed(self.total, range(self.n))
            images.append(self.p(i) - t)
        return images

    def substitute(self, images: Sequence[Poly], x):
        """Pull a function, form or series back along a coordinate substitution."""
        if isinstance(x, FormalSeries):
            return x.map(lambda c: pullback(images, c))
        return pullback(images, x)


def is_vertical(X: MultiVector, chart: CotangentChart) -> bool:
    return all(I[0] >= chart.n for I in X.comps)


def closed_check(omega: FormalSeries) -> bool:
    return formal_d(omega).is_zero()


def constant_form_check(w: DiffForm) -> bool:
    return not exterior_d(w)
