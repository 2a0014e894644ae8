"""Formal Poisson and symplectic structures, B-field gauge transforms, brackets.

Bracket convention: ``{f, g} = pi(df, dg)`` with ``pi^#(dx_i) = pi^{ij} d_j``,
so ``{x_i, x_j} = pi^{ij}``.  A symplectic form ``omega`` with matrix
``W_ij = omega(d_i, d_j)`` inverts to the bivector with matrix ``-W^{-1}``;
on the cotangent chart this gives ``{q_i, F} = dF/dp_i`` for the canonical
form ``sum dq_i ^ dp_i``.
"""

from __future__ import annotations

from typing import Mapping, Sequence

from .calculus import (DiffForm, MultiVector, exp_lie, exterior_d,
                       formal_contract, formal_d, formal_lie,
                       formal_schouten, require_positive_order, series_zero)
from .kernel import (ChartMismatch, DomainError, FormalSeries, OrderMismatch,
                     Poly, Q, neumann_inverse)

Matrix = list[list[Poly]]


def bivector_series(names: Sequence[str], N: int, orders: Mapping[int, Mapping[tuple[int, int], object]]) -> FormalSeries:
    """Build a formal bivector from ``{order: {(i, j): coefficient}}`` (0-based)."""
    return _tensor_series(MultiVector, names, N, orders, 2)


def form_series(names: Sequence[str], N: int, orders: Mapping[int, Mapping[tuple, object]], degree: int = 2) -> FormalSeries:
    return _tensor_series(DiffForm, names, N, orders, degree)


def vf_series(names: Sequence[str], N: int, orders: Mapping[int, Mapping[int, object]]) -> FormalSeries:
    return _tensor_series(MultiVector, names, N, {k: {(i,): c for i, c in v.items()} for k, v in orders.items()}, 1)


def function_series(names: Sequence[str], N: int, orders: Mapping[int, object]) -> FormalSeries:
    names = tuple(names)
    coeffs = [Poly.zero(names)] * (N + 1)
    for k, c in orders.items():
        if k <= N:
            coeffs[k] = c if isinstance(c, Poly) else Poly.const(names, c)
    return FormalSeries(coeffs)


def _tensor_series(cls, names, N, orders, degree):
    names = tuple(names)
    coeffs = [cls.zero(names, degree)] * (N + 1)
    for k, comps in orders.items():
        if k <= N:
            coeffs[k] = coeffs[k] + cls(names, degree, comps)
    return FormalSeries(coeffs)


def names_of(series: FormalSeries) -> tuple[str, ...]:
    return series[0].names


def _check_degree(series: FormalSeries, cls, degree: int, what: str) -> None:
    for c in series:
        if not isinstance(c, cls) or c.degree != degree:
            raise TypeError(f"{what} must be a series of degree-{degree} {cls.__name__}s")


class FormalPoisson:
    """A formal bivector with vanishing Schouten square."""

    __slots__ = ("pi",)

    def __init__(self, pi: FormalSeries, check: bool = True):
        _check_degree(pi, MultiVector, 2, "pi")
        self.pi = pi
        if check:
            res = jacobi_residual(pi)
            if not res.is_zero():
                raise DomainError(f"not a formal Poisson structure: [pi, pi] has order-{res.valuation()} part")

    @property
    def N(self) -> int:
        return self.pi.order

    @property
    def names(self) -> tuple[str, ...]:
        return self.pi[0].names

    def __eq__(self, other) -> bool:
        return isinstance(other, FormalPoisson) and other.pi == self.pi

    def __hash__(self) -> int:
        return hash(self.pi)

    def __repr__(self) -> str:
        return f"FormalPoisson({self.pi.text()})"


class FormalSymplectic:
    """A closed formal 2-form whose order-0 matrix has constant non-zero determinant."""

    __slots__ = ("omega", "_inverse")

    def __init__(self, omega: FormalSeries, check: bool = True):
        _check_degree(omega, DiffForm, 2, "omega")
        self.omega = omega
        self._inverse = None
        if check:
            for k, w in enumerate(omega):
                if exterior_d(w):
                    raise DomainError(f"omega is not closed at order {k}")
            det = determinant(form_matrix(omega[0]))
            if not det.is_constant() or not det:
                raise DomainError("order-0 matrix has no polynomial inverse (determinant is not a non-zero constant)")

    @property
    def N(self) -> int:
        return self.omega.order

    @property
    def names(self) -> tuple[str, ...]:
        return self.omega[0].names

    def poisson(self) -> "FormalPoisson":
        if self._inverse is None:
            self._inverse = invert_symplectic(self)
        return self._inverse

    def __repr__(self) -> str:
        return f"FormalSymplectic({self.omega.text()})"


def poisson_tensor(struct) -> FormalSeries:
    if isinstance(struct, FormalSymplectic):
        return struct.poisson().pi
    if isinstance(struct, FormalPoisson):
        return struct.pi
    if isinstance(struct, FormalSeries):
        return struct
    raise TypeError("expected a FormalPoisson, FormalSymplectic or bivector series")


# ---------------------------------------------------------------------------


def jacobi_residual(pi) -> FormalSeries:
    """[pi, pi] truncated; zero exactly when pi is formal Poisson."""
    pi = pi.pi if isinstance(pi, FormalPoisson) else pi
    return formal_schouten(pi, pi)


def sharp(pi, alpha: FormalSeries) -> FormalSeries:
    """pi^# alpha = iota_alpha pi."""
    return formal_contract(alpha, poisson_tensor(pi))


def flat(B: FormalSeries, X: FormalSeries) -> FormalSeries:
    """B^flat X = iota_X B."""
    return formal_contract(X, B)


def is_closed(B: FormalSeries) -> bool:
    return formal_d(B).is_zero()


def gauge(pi, B: FormalSeries) -> FormalPoisson:
    """B-field transform: (tau_B pi)^# = pi^# (id + B^flat pi^#)^(-1)."""
    P = poisson_tensor(pi)
    names, N = names_of(P), P.order
    if names_of(B) != names:
        raise ChartMismatch(f"{names_of(B)} vs {names}")
    if B.order != N:
        raise OrderMismatch(f"truncation orders {N} and {B.order} differ")
    if P[0]:
        raise DomainError("gauge needs pi_0 = 0 (general invertibility is out of scope)")
    if not is_closed(B):
        raise DomainError("B is not closed")
    inverse = neumann_inverse(lambda a: flat(B, sharp(P, a)), N)
    n = len(names)
    columns = []
    for i in range(n):
        dx = FormalSeries.constant(DiffForm.basis(names, (i,)), N)
        columns.append(sharp(P, inverse(dx)))
    coeffs = []
    for k in range(N + 1):
        comps = {}
        for i in range(n):
            vi = columns[i][k]
            for j in range(n):
                c = vi.component((j,))
                cT = columns[j][k].component((i,))
                if c != -cT:
                    raise AssertionError("gauge result is not antisymmetric")
                if i < j and c:
                    comps[(i, j)] = c
        coeffs.append(MultiVector(names, 2, comps))
    return FormalPoisson(FormalSeries(coeffs))


def conjugate(pi, X: FormalSeries) -> FormalPoisson:
    """exp(L_X) pi."""
    return FormalPoisson(exp_lie(X, poisson_tensor(pi)), check=False)


def check_equivalence_witness(pi, pi2, X: FormalSeries) -> bool:
    return exp_lie(X, poisson_tensor(pi)) == poisson_tensor(pi2)


# ---------------------------------------------------------------------------
# Matrices of polynomials
# ---------------------------------------------------------------------------


def form_matrix(w) -> Matrix:
    """W_ij = w(d_i, d_j) for a 2-form, or pi^{ij} for a bivector."""
    names = w.names
    n = len(names)
    z = Poly.zero(names)
    M = [[z] * n for _ in range(n)]
    for (i, j), c in w.comps.items():
        M[i][j] = c
        M[j][i] = -c
    return M


def matrix_to_tensor(cls, names, M: Matrix):
    n = len(names)
    comps = {}
    for i in range(n):
        if M[i][i]:
            raise AssertionError("matrix is not antisymmetric")
        for j in range(i + 1, n):
            if M[i][j] != -M[j][i]:
                raise AssertionError("matrix is not antisymmetric")
            if M[i][j]:
                comps[(i, j)] = M[i][j]
    return cls(names, 2, comps)


def matmul(A: Matrix, B: Matrix) -> Matrix:
    n, m, p = len(A), len(B), len(B[0])
    z = A[0][0].zero_like()
    out = [[z] * p for _ in range(n)]
    for i in range(n):
        row = out[i]
        for k in range(m):
            a = A[i][k]
            if not a:
                continue
            Bk = B[k]
            for j in range(p):
                if Bk[j]:
                    row[j] = row[j] + a * Bk[j]
    return out


def matadd(A: Matrix, B: Matrix) -> Matrix:
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def matscale(A: Matrix, c) -> Matrix:
    return [[a.scale(c) for a in r] for r in A]


def _faddeev_leverrier(A: Matrix) -> tuple[list[Poly], Matrix]:
    """Characteristic coefficients c_0..c_n and the adjugate-type matrix M_n."""
    n = len(A)
    names = A[0][0].names
    one = Poly.const(names, 1)
    z = Poly.zero(names)
    c = [z] * (n + 1)
    c[n] = one
    M = [[z] * n for _ in range(n)]
    for k in range(1, n + 1):
        shift = c[n - k + 1]
        M = matadd(matmul(A, M), [[shift if i == j else z for j in range(n)] for i in range(n)])
        AM = matmul(A, M)
        tr = z
        for i in range(n):
            tr = tr + AM[i][i]
        c[n - k] = tr.scale(Q(-1, k))
    return c, M


def determinant(A: Matrix) -> Poly:
    n = len(A)
    c, _ = _faddeev_leverrier(A)
    return c[0] if n % 2 == 0 else -c[0]


def matrix_inverse(A: Matrix) -> Matrix:
    """Exact inverse of a polynomial matrix with constant non-zero determinant."""
    c, M = _faddeev_leverrier(A)
    c0 = c[0]
    if not c0.is_constant() or not c0:
        raise DomainError("no polynomial inverse: determinant is not a non-zero constant")
    return matscale(M, -1 / c0.constant_term())


def series_matrix_inverse(Ws: list[Matrix]) -> list[Matrix]:
    """Inverse of sum_k lambda^k W_k, truncated at len(Ws) - 1."""
    K = matrix_inverse(Ws[0])
    out = [K]
    for m in range(1, len(Ws)):
        acc = None
        for j in range(1, m + 1):
            t = matmul(Ws[j], out[m - j])
            acc = t if acc is None else matadd(acc, t)
        out.append(matscale(matmul(K, acc), -1))
    return out


def invert_symplectic(omega: FormalSymplectic | FormalSeries) -> FormalPoisson:
    """The formal Poisson structure of a formal symplectic form (matrix -W^{-1})."""
    w = omega.omega if isinstance(omega, FormalSymplectic) else omega
    names = names_of(w)
    inv = series_matrix_inverse([form_matrix(c) for c in w])
    return FormalPoisson(FormalSeries([matrix_to_tensor(MultiVector, names, matscale(M, -1)) for M in inv]), check=False)


def invert_poisson(pi) -> FormalSymplectic:
    """Inverse of :func:`invert_symplectic` for a non-degenerate formal Poisson tensor."""
    P = poisson_tensor(pi)
    names = names_of(P)
    inv = series_matrix_inverse([form_matrix(c) for c in P])
    return FormalSymplectic(FormalSeries([matrix_to_tensor(DiffForm, names, matscale(M, -1)) for M in inv]), check=False)


# ---------------------------------------------------------------------------
# Brackets
# ---------------------------------------------------------------------------


def hamiltonian_vf(struct, f: FormalSeries) -> FormalSeries:
    """X_f = pi^#(df), so that X_f(g) = {f, g}."""
    return sharp(poisson_tensor(struct), formal_d(f))


def bracket(struct, f: FormalSeries, g: FormalSeries) -> FormalSeries:
    return formal_lie(hamiltonian_vf(struct, f), g)


def pair_bracket(struct, f: FormalSeries, g: FormalSeries) -> FormalSeries:
    """Same as :func:`bracket`; kept for symmetry with the bivector-evaluation form pi(df, dg)."""
    P = poisson_tensor(struct)
    return formal_contract(formal_d(g), formal_contract(formal_d(f), P))


def zero_bivector(names, N) -> FormalSeries:
    return series_zero(names, "vector", 2, N)


def require_vanishing_start(pi, what: str = "pi") -> None:
    P = poisson_tensor(pi)
    if P[0]:
        raise DomainError(f"{what} must vanish at order 0")


__all__ = [
    "FormalPoisson", "FormalSymplectic", "bivector_series", "form_series", "vf_series",
    "function_series", "jacobi_residual", "sharp", "flat", "gauge", "conjugate",
    "check_equivalence_witness", "invert_symplectic", "invert_poisson", "hamiltonian_vf",
    "bracket", "determinant", "matrix_inverse", "is_closed", "require_positive_order",
]
