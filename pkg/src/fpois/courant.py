"""Courant-Dorfman calculus on T*R^n and the equivalence-bimodule certificates.

Sections are pairs ``X (+) alpha`` of formal vector fields and formal 1-forms
on the total chart.  Pairing is ``<X+a, Y+b> = b(X) + a(Y)`` and the Dorfman
bracket is ``[[X+a, Y+b]] = [X, Y] + (L_X b - iota_Y da)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial
from typing import Sequence

from .calculus import (DiffForm, MultiVector, exp_lie, formal_contract,
                       formal_d, formal_lie, formal_schouten, formal_times,
                       lie_power_series, require_positive_order)
from .cotangent import CotangentChart
from .kernel import ChartMismatch, DomainError, FormalSeries, OrderMismatch, Poly, Q
from .solver import (FormalDiffeo, base_generators, commutation_residuals,
                     pair_residuals, test_functions)
from .structures import (FormalPoisson, FormalSymplectic, gauge,
                         hamiltonian_vf, is_closed, poisson_tensor)


class CourantSection:
    """A formal section X (+) alpha of the generalized tangent bundle."""

    __slots__ = ("X", "alpha")

    def __init__(self, X: FormalSeries, alpha: FormalSeries):
        if X.order != alpha.order:
            raise OrderMismatch("X and alpha must share the truncation order")
        if X[0].names != alpha[0].names:
            raise ChartMismatch("X and alpha live on different charts")
        if not isinstance(X[0], MultiVector) or X[0].degree != 1:
            raise TypeError("X must be a formal vector field")
        if not isinstance(alpha[0], DiffForm) or alpha[0].degree != 1:
            raise TypeError("alpha must be a formal 1-form")
        self.X = X
        self.alpha = alpha

    @classmethod
    def zero(cls, names, N: int) -> "CourantSection":
        return cls(FormalSeries.zero(MultiVector.zero(names, 1), N),
                   FormalSeries.zero(DiffForm.zero(names, 1), N))

    @classmethod
    def constant(cls, X: MultiVector | None, alpha: DiffForm | None, names, N: int) -> "CourantSection":
        X = MultiVector.zero(names, 1) if X is None else X
        alpha = DiffForm.zero(names, 1) if alpha is None else alpha
        return cls(FormalSeries.constant(X, N), FormalSeries.constant(alpha, N))

    @property
    def N(self) -> int:
        return self.X.order

    @property
    def names(self):
        return self.X[0].names

    def __add__(self, other: "CourantSection") -> "CourantSection":
        return CourantSection(self.X + other.X, self.alpha + other.alpha)

    def __sub__(self, other: "CourantSection") -> "CourantSection":
        return CourantSection(self.X - other.X, self.alpha - other.alpha)

    def __neg__(self) -> "CourantSection":
        return CourantSection(-self.X, -self.alpha)

    def scale(self, c) -> "CourantSection":
        return CourantSection(self.X.scale(c), self.alpha.scale(c))

    def times(self, f: FormalSeries) -> "CourantSection":
        return CourantSection(formal_times(f, self.X), formal_times(f, self.alpha))

    def is_zero(self) -> bool:
        return self.X.is_zero() and self.alpha.is_zero()

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __eq__(self, other) -> bool:
        return isinstance(other, CourantSection) and other.X == self.X and other.alpha == self.alpha

    def __hash__(self) -> int:
        return hash((self.X, self.alpha))

    def text(self) -> str:
        return f"({self.X.text()}) ⊕ ({self.alpha.text()})"

    __str__ = text


def pairing(s1: CourantSection, s2: CourantSection) -> FormalSeries:
    return formal_contract(s1.X, s2.alpha) + formal_contract(s2.X, s1.alpha)


def dorfman(s1: CourantSection, s2: CourantSection) -> CourantSection:
    X = formal_schouten(s1.X, s2.X)
    alpha = formal_lie(s1.X, s2.alpha) - formal_contract(s2.X, formal_d(s1.alpha))
    return CourantSection(X, alpha)


def bfield_section(B: FormalSeries, s: CourantSection) -> CourantSection:
    """tau_B: X (+) alpha -> X (+) (alpha + iota_X B)."""
    return CourantSection(s.X, s.alpha + formal_contract(s.X, B))


def courant_derivation(X: FormalSeries, b: FormalSeries, s: CourantSection) -> CourantSection:
    """The derivation (X, b): Y (+) beta -> [X, Y] (+) (L_X beta - iota_Y b)."""
    return CourantSection(formal_schouten(X, s.X), formal_lie(X, s.alpha) - formal_contract(s.X, b))


def exp_section(Z: FormalSeries, s: CourantSection) -> CourantSection:
    """exp(L_Z) acting on both components."""
    return CourantSection(exp_lie(Z, s.X), exp_lie(Z, s.alpha))


def flow_bfield(X: FormalSeries, b: FormalSeries, t) -> tuple[FormalSeries, FormalSeries]:
    """Data of F_t = exp(-t L_X) tau_{B_t}: the field -tX and B_t = sum t^(k+1)/(k+1)! L_X^k b."""
    require_positive_order(X)
    t = Q(t)
    Bt = lie_power_series(X, b, lambda k: t ** (k + 1) / factorial(k + 1))
    return X.scale(-t), Bt


def apply_flow(X: FormalSeries, b: FormalSeries, t, s: CourantSection) -> CourantSection:
    field_, Bt = flow_bfield(X, b, t)
    return exp_section(field_, bfield_section(Bt, s))


# ---------------------------------------------------------------------------
# Backward images and membership
# ---------------------------------------------------------------------------


@dataclass
class GeneratorFrame:
    """Sections A_1..A_n, V_1..V_n spanning a rank-2n submodule."""

    chart: CotangentChart
    sections: list[CourantSection]

    @property
    def N(self) -> int:
        return self.sections[0].N


def backward_generators(chart: CotangentChart, pi) -> GeneratorFrame:
    """Frame of rho^! gr(pi): A_i = hor(pi^# dq_i) (+) dq_i and V_i = d/dp_i (+) 0."""
    P = poisson_tensor(pi)
    if P[0]:
        raise DomainError("backward_generators needs pi_0 = 0")
    N, n = P.order, chart.n
    tot = chart.total
    sections = []
    for i in range(n):
        coeffs = []
        for piece in P:
            comps = {}
            for j in range(n):
                c = piece.component((i, j))
                if c:
                    comps[(j,)] = chart.rho_pullback(c)
            coeffs.append(MultiVector(tot, 1, comps))
        alpha = FormalSeries.constant(DiffForm.basis(tot, (i,)), N)
        sections.append(CourantSection(FormalSeries(coeffs), alpha))
    for i in range(n):
        sections.append(CourantSection.constant(MultiVector.basis(tot, (n + i,)), None, tot, N))
    return GeneratorFrame(chart, sections)


def _standard_frame_ok(frame: GeneratorFrame) -> bool:
    n = frame.chart.n
    tot = frame.chart.total
    for i, s in enumerate(frame.sections):
        if i < n:
            want_X, want_a = MultiVector.zero(tot, 1), DiffForm.basis(tot, (i,))
        else:
            want_X, want_a = MultiVector.basis(tot, (i,)), DiffForm.zero(tot, 1)
        if s.X[0] != want_X or s.alpha[0] != want_a:
            return False
    return True


def membership(s: CourantSection, frame: GeneratorFrame) -> list[FormalSeries] | None:
    """Coefficients c with s = sum_k c_k frame_k, or None when s is not in the span.

    Order by order, the dq components fix the A-coefficients and the d/dp
    components fix the V-coefficients; what remains must vanish.
    """
    if not _standard_frame_ok(frame):
        raise DomainError("frame must reduce to {0 + dq_i, d/dp_i + 0} at order 0")
    chart = frame.chart
    n, N = chart.n, s.N
    zero = chart.zero()
    coeffs = [[zero] * (N + 1) for _ in range(2 * n)]
    residual = s
    for m in range(N + 1):
        Xm, am = residual.X[m], residual.alpha[m]
        step = CourantSection.zero(chart.total, N)
        for k in range(2 * n):
            c = am.component((k,)) if k < n else Xm.component((k,))
            if c:
                coeffs[k][m] = c
                step = step + frame.sections[k].times(FormalSeries.monomial(c, m, N))
        residual = residual - step
        if residual.X[m] or residual.alpha[m]:
            return None
    return [FormalSeries(c) for c in coeffs]


def combine(frame: GeneratorFrame, coeffs: Sequence[FormalSeries]) -> CourantSection:
    out = CourantSection.zero(frame.chart.total, frame.N)
    for c, s in zip(coeffs, frame.sections):
        out = out + s.times(c)
    return out


def involutivity_failures(frame: GeneratorFrame) -> list[tuple[int, int]]:
    bad = []
    for a, s1 in enumerate(frame.sections):
        for b, s2 in enumerate(frame.sections):
            if membership(dorfman(s1, s2), frame) is None:
                bad.append((a, b))
    return bad


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


@dataclass
class CheckResult:
    name: str
    passed: bool
    residuals: dict[str, str] = field(default_factory=dict)
    detail: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "pass": self.passed, "residuals": dict(self.residuals), "detail": self.detail}


ANALYTIC_NOTE = ("completeness and connected simply-connected fibers of rho: T*R^n -> R^n "
                 "are satisfied by construction and not computed")


@dataclass
class MoritaReport:
    checks: list[CheckResult] = field(default_factory=list)
    notes: list[str] = field(default_factory=lambda: [ANALYTIC_NOTE])

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, check: CheckResult) -> None:
        self.checks.append(check)

    def __getitem__(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def first_failure(self) -> str | None:
        for c in self.checks:
            if not c.passed:
                return c.name
        return None

    def to_dict(self) -> dict:
        return {"pass": self.passed, "checks": [c.to_dict() for c in self.checks], "notes": list(self.notes)}


def residual_check(name: str, residuals: dict, label=None, detail: str = "") -> CheckResult:
    """Pass iff every residual series is zero; records the non-zero ones as text."""
    bad = {}
    for key, r in residuals.items():
        if r:
            bad[label(key) if label else str(key)] = r.text() if hasattr(r, "text") else str(r)
    return CheckResult(name, not bad, bad, detail)


def _pair_label(chart: CotangentChart, fs_names: Sequence[str]):
    def label(key):
        i, j = key
        return f"({chart.base[i]}, {fs_names[j]})"
    return label


def _function_names(chart: CotangentChart, N: int) -> list[str]:
    return [str(f[0]) for f in test_functions(chart, N)]


def check_dirac_criterion(chart: CotangentChart, pi1, pi2, Z: FormalSeries, omega: FormalSymplectic) -> CheckResult:
    """Both inclusions exp(-L_Z) tau_{-omega} frame(pi1) in span frame(pi2) and back."""
    f1 = backward_generators(chart, pi1)
    f2 = backward_generators(chart, pi2)
    w = omega.omega
    bad = {}
    for k, s in enumerate(f1.sections):
        t = exp_section(-Z, bfield_section(-w, s))
        if membership(t, f2) is None:
            bad[f"forward generator {k + 1}"] = t.text()
    for k, s in enumerate(f2.sections):
        t = bfield_section(w, exp_section(Z, s))
        if membership(t, f1) is None:
            bad[f"backward generator {k + 1}"] = t.text()
    return CheckResult("dirac_criterion", not bad, bad)


def _closedness(omega: FormalSymplectic, chart: CotangentChart) -> CheckResult:
    d = formal_d(omega.omega)
    res = {"d omega": d} if d else {}
    detail = "omega_0 = omega_can" if omega.omega[0] == chart.omega_can() else "omega_0 differs from omega_can"
    return residual_check("closedness", res, detail=detail)


def bimodule_checks(chart: CotangentChart, omega: FormalSymplectic, poisson_leg: FormalDiffeo, pi_poisson,
                    anti_leg: FormalDiffeo, pi_anti, labels: tuple[str, str]) -> list[CheckResult]:
    """Poisson, anti-Poisson and commutation residuals on generators and degree-2 monomials."""
    N = omega.N
    fs = test_functions(chart, N)
    label = _pair_label(chart, _function_names(chart, N))
    return [
        residual_check("poisson_morphism", pair_residuals(poisson_leg, chart, pi_poisson, omega, 1, fs), label,
                       f"{labels[0]} is Poisson"),
        residual_check("anti_poisson", pair_residuals(anti_leg, chart, pi_anti, omega, -1, fs), label,
                       f"{labels[1]} is anti-Poisson"),
        residual_check("commutation", commutation_residuals(anti_leg, poisson_leg, chart, omega, fs), label,
                       "images Poisson-commute"),
    ]


@dataclass
class SelfEquivalence:
    chart: CotangentChart
    pi: FormalPoisson
    Z: FormalSeries
    omega: FormalSymplectic
    potentials: FormalSeries
    report: MoritaReport


def self_equivalence(pi, chart: CotangentChart | None = None, dirac: bool = True) -> SelfEquivalence:
    """Z = hor(pi^# theta_can), omega = int_0^1 exp(s L_Z) omega_can ds and its certificate."""
    P = poisson_tensor(pi)
    pi = pi if isinstance(pi, FormalPoisson) else FormalPoisson(P)
    chart = chart or CotangentChart(len(P[0].names), P[0].names)
    Z = chart.z_field(P)
    omega, potentials = chart.omega_from_z(Z)
    legZ = FormalDiffeo([Z])
    ident = FormalDiffeo()
    report = MoritaReport()
    report.add(_closedness(omega, chart))
    for c in bimodule_checks(chart, omega, legZ, pi, ident, pi, ("exp(L_Z) rho^*", "rho^*")):
        report.add(c)
    if dirac:
        report.add(check_dirac_criterion(chart, pi, pi, Z, omega))
    return SelfEquivalence(chart, pi, Z, omega, potentials, report)


@dataclass
class MoritaWitness:
    chart: CotangentChart
    pi: FormalPoisson
    pi_tilde: FormalPoisson
    B: FormalSeries
    Z: FormalSeries
    omega_B: FormalSymplectic
    report: MoritaReport


def morita_witness(pi, B: FormalSeries, chart: CotangentChart | None = None) -> MoritaWitness:
    """Certificate that pi and tau_{-B}(pi) are linked by the bimodule (omega + rho^* B, rho^*, exp(L_Z) rho^*)."""
    P = poisson_tensor(pi)
    pi = pi if isinstance(pi, FormalPoisson) else FormalPoisson(P)
    chart = chart or CotangentChart(len(P[0].names), P[0].names)
    if not is_closed(B):
        raise DomainError("B is not closed")
    pi_t = gauge(pi, -B)
    se = self_equivalence(pi_t, chart, dirac=False)
    Z, omega = se.Z, se.omega
    omega_B = FormalSymplectic(omega.omega + chart.rho_pullback(B))
    legZ = FormalDiffeo([Z])
    ident = FormalDiffeo()
    report = MoritaReport()
    report.add(_closedness(omega_B, chart))
    for c in bimodule_checks(chart, omega_B, legZ, pi_t, ident, pi, ("exp(L_Z) rho^* from tau_{-B}(pi)", "rho^* from pi")):
        report.add(c)
    N = omega.N
    diffs = {}
    for i, g in enumerate(base_generators(chart, N)):
        F = legZ(chart.rho_pullback(g))
        r = hamiltonian_vf(omega, F) - hamiltonian_vf(omega_B, F)
        diffs[chart.base[i]] = r
    report.add(residual_check("hamiltonian_invariance", diffs,
                              detail="X_F agrees for omega and omega + rho^* B on F = exp(L_Z) rho^* q_i"))
    return MoritaWitness(chart, pi, pi_t, B, Z, omega_B, report)
