"""Order-by-order solvers along the projection rho: T*R^n -> R^n.

Morphisms of function algebras are written ``Phi = exp(L_{X_1}) ... exp(L_{X_m}) rho^*``
and stored as a :class:`FormalDiffeo` (the factor list, leftmost applied last)
so that no Baker-Campbell-Hausdorff combination is ever needed.

Every cohomological step uses the undeformed bracket and the contracting
homotopy from :mod:`fpois.ce`; the cocycle conditions that make each step
solvable are asserted at every order and raise
:class:`~fpois.kernel.ConsistencyError` if violated.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from typing import Sequence

from .calculus import (DiffForm, MultiVector, exp_lie, require_positive_order,
                       vector_field)
from .ce import CECochain, ce_delta, ce_homotopy
from .cotangent import CotangentChart, is_vertical
from .kernel import ConsistencyError, DomainError, FormalSeries, OrderMismatch, Poly
from .structures import (FormalPoisson, FormalSymplectic, bracket,
                         hamiltonian_vf, poisson_tensor)


class FormalDiffeo:
    """A product exp(L_{X_1}) ... exp(L_{X_m}) of formal flows; X_m acts first."""

    __slots__ = ("factors",)

    def __init__(self, factors: Sequence[FormalSeries] = ()):
        for X in factors:
            require_positive_order(X, "diffeo factor")
        self.factors = tuple(factors)

    def apply(self, T: FormalSeries) -> FormalSeries:
        for X in reversed(self.factors):
            if X.order != T.order:
                raise OrderMismatch(f"truncation orders {X.order} and {T.order} differ")
            T = exp_lie(X, T)
        return T

    __call__ = apply

    def inverse(self) -> "FormalDiffeo":
        return FormalDiffeo([-X for X in reversed(self.factors)])

    def then(self, X: FormalSeries) -> "FormalDiffeo":
        """self followed on the right by exp(L_X) (so X acts first)."""
        return FormalDiffeo(self.factors + (X,))

    def compose(self, other: "FormalDiffeo") -> "FormalDiffeo":
        return FormalDiffeo(self.factors + other.factors)

    def is_identity(self) -> bool:
        return all(X.is_zero() for X in self.factors)

    def __len__(self) -> int:
        return len(self.factors)

    def __repr__(self) -> str:
        return f"FormalDiffeo({len(self.factors)} factors)"


def _const_series(x, N: int) -> FormalSeries:
    return FormalSeries.constant(x, N)


def base_generators(chart: CotangentChart, N: int) -> list[FormalSeries]:
    return [_const_series(chart.base_var(i), N) for i in range(chart.n)]


def test_functions(chart: CotangentChart, N: int) -> list[FormalSeries]:
    """Coordinate generators followed by all degree-2 monomials of the base."""
    gens = [chart.base_var(i) for i in range(chart.n)]
    out = list(gens)
    out += [gens[i] * gens[j] for i, j in combinations_with_replacement(range(chart.n), 2)]
    return [_const_series(f, N) for f in out]


def images(diffeo: FormalDiffeo, chart: CotangentChart, fs: Sequence[FormalSeries]) -> list[FormalSeries]:
    return [diffeo(chart.rho_pullback(f)) for f in fs]


def chart_of(omega: FormalSymplectic) -> CotangentChart:
    names = omega.names
    if len(names) % 2:
        raise DomainError("omega must live on a cotangent chart")
    n = len(names) // 2
    return CotangentChart(n, names[:n], names[n:])


def _check_order0(omega: FormalSymplectic, chart: CotangentChart) -> None:
    """omega_0 - omega_can must be the pullback of a base 2-form."""
    diff = omega.omega[0] - chart.omega_can()
    for I, c in diff.comps.items():
        if any(i >= chart.n for i in I) or chart.basic_part(c) is None:
            raise DomainError("omega_0 is not omega_can + rho^* B_0")


def _order_coefficient(F: FormalSeries, k: int, what: str) -> Poly:
    """Coefficient at order k, asserting that all lower orders vanish."""
    for m in range(k):
        if F[m]:
            raise ConsistencyError(f"{what}: non-zero residual at order {m} below the working order {k}")
    return F[k]


def _degree2(chart: CotangentChart, comps: dict) -> CECochain:
    return CECochain(chart, 2, comps)


def _assert_closed(D: CECochain, what: str) -> None:
    if D.degree < D.chart.n and ce_delta(D):
        raise ConsistencyError(f"{what} is not delta-closed")


@dataclass
class MorphismSolution:
    """A Poisson morphism Phi = diffeo o rho^* from (base, pi) into (total, omega)."""

    chart: CotangentChart
    pi: FormalPoisson
    omega: FormalSymplectic
    diffeo: FormalDiffeo
    residual_report: list[CECochain] = field(default_factory=list)

    @property
    def N(self) -> int:
        return self.omega.N

    def images(self) -> list[FormalSeries]:
        return images(self.diffeo, self.chart, base_generators(self.chart, self.N))

    def final_residuals(self) -> dict[tuple[int, int], FormalSeries]:
        return pair_residuals(self.diffeo, self.chart, self.pi, self.omega, sign=1)


def pair_residuals(diffeo: FormalDiffeo, chart: CotangentChart, pi, omega, sign: int = 1,
                   functions: Sequence[FormalSeries] | None = None) -> dict[tuple[int, int], FormalSeries]:
    """{Phi a, Phi b}_omega - sign * Phi(pi(a, b)) for pairs of test functions.

    With ``functions=None`` only coordinate pairs i < j are used.  Otherwise
    every generator is paired with every listed function.
    """
    N = omega.N
    gens = base_generators(chart, N)
    fs = gens if functions is None else list(functions)
    imgs_g = images(diffeo, chart, gens)
    imgs_f = imgs_g if functions is None else images(diffeo, chart, fs)
    P = poisson_tensor(pi)
    out = {}
    for i, a in enumerate(gens):
        for j, b in enumerate(fs):
            if functions is None and j <= i:
                continue
            lhs = bracket(omega, imgs_g[i], imgs_f[j])
            rhs = diffeo(chart.rho_pullback(bracket(P, a, b)))
            out[(i, j)] = lhs - rhs if sign > 0 else lhs + rhs
    return out


def commutation_residuals(left: FormalDiffeo, right: FormalDiffeo, chart: CotangentChart, omega,
                          functions: Sequence[FormalSeries] | None = None) -> dict[tuple[int, int], FormalSeries]:
    """{left(a), right(b)}_omega for generators a and test functions b."""
    N = omega.N
    gens = base_generators(chart, N)
    fs = gens if functions is None else list(functions)
    A = images(left, chart, gens)
    Bs = images(right, chart, fs)
    return {(i, j): bracket(omega, a, b) for i, a in enumerate(A) for j, b in enumerate(Bs)}


# ---------------------------------------------------------------------------
# Logarithms: images with order-0 part q_i come from a single formal vector field
# ---------------------------------------------------------------------------


def log_along_projection(chart: CotangentChart, imgs: Sequence[FormalSeries]) -> FormalSeries:
    """A formal field Z (flat-lifted, no vertical part) with exp(L_Z) rho^* q_i = imgs[i]."""
    if len(imgs) != chart.n:
        raise DomainError("need one image per base coordinate")
    N = imgs[0].order
    for i, F in enumerate(imgs):
        if F.order != N:
            raise OrderMismatch("images have different truncation orders")
        if F[0] != chart.q(i):
            raise DomainError(f"order-0 part of image {i} is not q{i + 1}")
    Z = FormalSeries.zero(MultiVector.zero(chart.total, 1), N)
    qs = [_const_series(chart.q(i), N) for i in range(chart.n)]
    for k in range(1, N + 1):
        comps = {}
        for i in range(chart.n):
            E = exp_lie(Z, qs[i])
            c = imgs[i][k] - E[k]
            if c:
                comps[i] = c
        if comps:
            Z = Z + FormalSeries.monomial(vector_field(chart.total, comps), k, N)
    return Z


# ---------------------------------------------------------------------------
# Poisson morphisms
# ---------------------------------------------------------------------------


def morphism_residual(diffeo: FormalDiffeo, chart: CotangentChart, pi, omega: FormalSymplectic, k: int) -> CECochain:
    """R_{k+1}^{ij}: order-(k+1) part of Phi^{-1}{Phi q_i, Phi q_j}_omega - rho^* pi^{ij}."""
    N = omega.N
    P = poisson_tensor(pi)
    gens = base_generators(chart, N)
    imgs = images(diffeo, chart, gens)
    inv = diffeo.inverse()
    comps = {}
    for i in range(chart.n):
        for j in range(i + 1, chart.n):
            G = inv(bracket(omega, imgs[i], imgs[j]))
            target = FormalSeries([chart.rho_pullback(c.component((i, j))) for c in P])
            c = _order_coefficient(G - target, k + 1, f"Poisson-morphism residual ({i + 1},{j + 1})")
            if c:
                comps[(i, j)] = c
    R = CECochain(chart, 2, comps)
    _assert_closed(R, f"residual R_{k + 1}")
    return R


def solve_poisson_morphism(pi: FormalPoisson, omega: FormalSymplectic, N: int | None = None) -> MorphismSolution:
    """Find Phi = exp(X) rho^* with {Phi a, Phi b}_omega = Phi(pi(a, b)) mod lambda^(N+1)."""
    chart = chart_of(omega)
    N = omega.N if N is None else N
    P = poisson_tensor(pi)
    if P.order != N or omega.N != N:
        raise OrderMismatch("pi, omega and N must share the truncation order")
    if P[0].names != chart.base:
        raise DomainError("pi must live on the base chart")
    if P[0]:
        raise DomainError("pi must vanish at order 0")
    _check_order0(omega, chart)
    pi = pi if isinstance(pi, FormalPoisson) else FormalPoisson(P)
    diffeo = FormalDiffeo()
    report = []
    for k in range(N):
        R = morphism_residual(diffeo, chart, pi, omega, k)
        report.append(R)
        if not R:
            continue
        xi = -ce_homotopy(R)
        X = chart.horizontal_lift(xi)
        diffeo = diffeo.then(FormalSeries.monomial(X, k + 1, N))
    sol = MorphismSolution(chart, pi, omega, diffeo, report)
    for key, r in sol.final_residuals().items():
        if r:
            raise ConsistencyError(f"Poisson-morphism residual {key} survives the correction")
    return sol


# ---------------------------------------------------------------------------
# Commutants
# ---------------------------------------------------------------------------


@dataclass
class CommutantSolution:
    diffeo: FormalDiffeo
    data: list[list[CECochain]]


def solve_commutant(sol: MorphismSolution, omega: FormalSymplectic | None = None, N: int | None = None) -> CommutantSolution:
    """Find Phi' = exp(X') rho^* whose image Poisson-commutes with the image of ``sol``."""
    omega = sol.omega if omega is None else omega
    N = omega.N if N is None else N
    chart = sol.chart
    partner = sol.images()
    gens = base_generators(chart, N)
    diffeo = FormalDiffeo()
    data = []
    for k in range(N):
        mine = images(diffeo, chart, gens)
        comps = {}
        layer = []
        for i in range(chart.n):
            D = CECochain(chart, 1, {(j,): _order_coefficient(bracket(omega, mine[i], partner[j]), k + 1,
                                                               f"commutation residual ({i + 1},{j + 1})")
                                     for j in range(chart.n)})
            _assert_closed(D, f"commutant data D_{i + 1} at order {k + 1}")
            layer.append(D)
            y = ce_homotopy(D).component(())
            if y:
                comps[i] = y
        data.append(layer)
        if comps:
            diffeo = diffeo.then(FormalSeries.monomial(vector_field(chart.total, comps), k + 1, N))
    for key, r in commutation_residuals(diffeo, sol.diffeo, chart, omega).items():
        if r:
            raise ConsistencyError(f"commutation residual {key} survives the correction")
    return CommutantSolution(diffeo, data)


def preimage(diffeo: FormalDiffeo, chart: CotangentChart, G: FormalSeries) -> FormalSeries:
    """The base series g with diffeo(rho^* g) = G, solved order by order."""
    N = G.order
    residual = G
    coeffs = []
    for m in range(N + 1):
        f = chart.basic_part(residual[m])
        if f is None:
            raise ConsistencyError(f"not basic at order {m}: the bracket left the commutant image")
        coeffs.append(f)
        if f:
            residual = residual - diffeo(chart.rho_pullback(FormalSeries.monomial(f, m, N)))
    if residual:
        raise ConsistencyError("preimage did not converge")
    return FormalSeries(coeffs)


def extract_commutant_poisson(diffeo: FormalDiffeo, omega: FormalSymplectic, N: int | None = None,
                              chart: CotangentChart | None = None) -> FormalPoisson:
    """pi' with pi'(q_i, q_j) = -g^{ij}, where Phi'(g^{ij}) = {Phi' q_i, Phi' q_j}_omega.

    The sign makes Phi' = diffeo o rho^* anti-Poisson from pi'.
    """
    chart = chart_of(omega) if chart is None else chart
    N = omega.N if N is None else N
    gens = base_generators(chart, N)
    imgs = images(diffeo, chart, gens)
    coeffs = [{} for _ in range(N + 1)]
    for i in range(chart.n):
        for j in range(i + 1, chart.n):
            g = preimage(diffeo, chart, bracket(omega, imgs[i], imgs[j]))
            for m, c in enumerate(g):
                if c:
                    coeffs[m][(i, j)] = -c
    pi = FormalSeries([MultiVector(chart.base, 2, c) for c in coeffs])
    return FormalPoisson(pi)


@dataclass
class ClassifyResult:
    pi_B: FormalPoisson
    omega: FormalSymplectic
    morphism: MorphismSolution
    commutant: CommutantSolution
    residuals: dict[str, dict]


def symplectic_from_base(chart: CotangentChart, B: FormalSeries) -> FormalSymplectic:
    """omega_can + rho^* B."""
    N = B.order
    w = FormalSeries.constant(chart.omega_can(), N) + chart.rho_pullback(B)
    return FormalSymplectic(w)


def classifying_action(B: FormalSeries, pi: FormalPoisson, N: int | None = None,
                       chart: CotangentChart | None = None) -> ClassifyResult:
    """Solve for the dual pair over omega_can + rho^* B and return the commutant structure pi^B."""
    P = poisson_tensor(pi)
    N = P.order if N is None else N
    if B.order != N:
        raise OrderMismatch("B and pi must share the truncation order")
    base = P[0].names
    chart = chart or CotangentChart(len(base), base)
    if B[0].names != chart.base:
        raise DomainError("B must live on the base chart")
    from .structures import is_closed
    if not is_closed(B):
        raise DomainError("B is not closed")
    omega = symplectic_from_base(chart, B)
    sol = solve_poisson_morphism(pi if isinstance(pi, FormalPoisson) else FormalPoisson(P), omega, N)
    com = solve_commutant(sol, omega, N)
    pi_B = extract_commutant_poisson(com.diffeo, omega, N, chart)
    fs = test_functions(chart, N)
    residuals = {
        "poisson": pair_residuals(sol.diffeo, chart, sol.pi, omega, 1, fs),
        "anti_poisson": pair_residuals(com.diffeo, chart, pi_B, omega, -1, fs),
        "commutation": commutation_residuals(com.diffeo, sol.diffeo, chart, omega, fs),
    }
    return ClassifyResult(pi_B, omega, sol, com, residuals)


# ---------------------------------------------------------------------------
# Uniqueness: two solutions differ by a Hamiltonian flow and a vertical flow
# ---------------------------------------------------------------------------


@dataclass
class Factorization:
    H: FormalSeries
    V: FormalDiffeo
    reassembled: FormalDiffeo


def factor_morphism_ambiguity(sol: MorphismSolution, other: MorphismSolution, N: int | None = None) -> Factorization:
    """Find H and vertical V with exp(X_H) Phi exp(V) = Phi_other on all total coordinates."""
    chart, omega = sol.chart, sol.omega
    N = omega.N if N is None else N
    n = chart.n
    coords = [_const_series(Poly.var(chart.total, a), N) for a in range(2 * n)]
    H = FormalSeries.zero(chart.zero(), N)
    V = FormalSeries.zero(MultiVector.zero(chart.total, 1), N)
    target_inv = other.diffeo.inverse()
    pulled = [target_inv(x) for x in coords]
    for k in range(N):
        C = FormalDiffeo([hamiltonian_vf(omega, H)] + list(sol.diffeo.factors) + [V])
        Zc = {}
        for a in range(2 * n):
            c = _order_coefficient(C(pulled[a]) - coords[a], k + 1, f"factorization residual on coordinate {a + 1}")
            if c:
                Zc[a] = c
        zeta = CECochain(chart, 1, {(i,): Zc[i] for i in range(n) if i in Zc})
        _assert_closed(zeta, f"pullback of the discrepancy field at order {k + 1}")
        Hk = ce_homotopy(zeta).component(()) if zeta else chart.zero()
        # leading-order Hamiltonian field of Hk for omega_0
        X0 = hamiltonian_vf(omega, FormalSeries.constant(Hk, N))[0]
        Vk = -X0 - MultiVector(chart.total, 1, {(a,): c for a, c in Zc.items()})
        if not is_vertical(Vk, chart):
            raise ConsistencyError(f"correction at order {k + 1} is not vertical")
        H = H + FormalSeries.monomial(Hk, k + 1, N)
        V = V + FormalSeries.monomial(Vk, k + 1, N)
    reassembled = FormalDiffeo([hamiltonian_vf(omega, H)] + list(sol.diffeo.factors) + [V])
    for a in range(2 * n):
        if reassembled(coords[a]) != other.diffeo(coords[a]):
            raise ConsistencyError(f"reassembly fails on coordinate {a + 1}")
    return Factorization(H, FormalDiffeo([V]), reassembled)
