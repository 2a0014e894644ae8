"""Multivector fields, differential forms and their calculus on one chart.

Tensors of degree >= 1 are :class:`MultiVector` or :class:`DiffForm`;
degree-0 objects are plain :class:`~fpois.kernel.Poly` functions.
Components are keyed by strictly increasing 0-based index tuples.

Conventions used throughout the package:

* contraction is the degree -1 derivation with
  ``iota_a(X ^ Y) = a(X) Y - a(Y) X``;
* the Schouten bracket restricts to ``[X, f] = X(f)`` and to the Lie
  bracket on vector fields;
* ``L_X = d iota_X + iota_X d`` on forms and ``L_X = [X, .]`` on multivectors.
"""

from __future__ import annotations

from math import factorial
from typing import Mapping, Sequence

from .kernel import (ChartMismatch, DomainError, FormalSeries, Poly, Q,
                     as_scalar, cauchy)


class Chart:
    """An ordered list of coordinate names."""

    __slots__ = ("coords",)

    def __init__(self, coords: Sequence[str]):
        coords = tuple(coords)
        if not coords:
            raise ValueError("a chart needs at least one coordinate")
        if len(set(coords)) != len(coords):
            raise ValueError(f"duplicate coordinate names in {coords}")
        self.coords = coords

    @property
    def dim(self) -> int:
        return len(self.coords)

    def index(self, name: str) -> int:
        try:
            return self.coords.index(name)
        except ValueError:
            raise DomainError(f"unknown coordinate {name!r}") from None

    def var(self, name: str | int) -> Poly:
        return Poly.var(self.coords, name)

    def const(self, c) -> Poly:
        return Poly.const(self.coords, c)

    def zero(self) -> Poly:
        return Poly.zero(self.coords)

    def __eq__(self, other) -> bool:
        return isinstance(other, Chart) and other.coords == self.coords

    def __hash__(self) -> int:
        return hash(self.coords)

    def __repr__(self) -> str:
        return f"Chart{self.coords}"


def _sort_sign(idx: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    """Sign of the sorting permutation (0 if an index repeats) and the sorted tuple."""
    idx = list(idx)
    sign = 1
    for a in range(len(idx)):
        for b in range(len(idx) - 1 - a):
            if idx[b] > idx[b + 1]:
                idx[b], idx[b + 1] = idx[b + 1], idx[b]
                sign = -sign
            elif idx[b] == idx[b + 1]:
                return 0, ()
    return sign, tuple(idx)


def _merge(I: tuple[int, ...], J: tuple[int, ...]) -> tuple[int, tuple[int, ...]]:
    """Sign and index tuple of e_I ^ e_J for sorted I, J."""
    if not I:
        return 1, J
    if not J:
        return 1, I
    sI = set(I)
    if any(j in sI for j in J):
        return 0, ()
    inv = 0
    for j in J:
        for i in I:
            if i > j:
                inv += 1
    return (-1 if inv & 1 else 1), tuple(sorted(I + J))


def format_terms(items, basis) -> str:
    """Render ``[(index, Poly), ...]`` as ``coeff * basis`` terms joined by signs."""
    out = ""
    for idx, c in items:
        label = basis(idx)
        text, sign = str(c), "+"
        if len(c) > 1:
            text = f"({text})"
        elif text.startswith("-"):
            text, sign = text[1:], "-"
        body = label if text == "1" else f"{text} * {label}"
        if not out:
            out = body if sign == "+" else "-" + body
        else:
            out += f" {sign} {body}"
    return out or "0"


class Tensor:
    """Common base of :class:`MultiVector` and :class:`DiffForm` (degree >= 1)."""

    __slots__ = ("names", "degree", "comps")
    kind = "tensor"
    _glyph = "?"

    def __init__(self, names: Sequence[str], degree: int, comps: Mapping[Sequence[int], Poly] | None = None):
        self.names = tuple(names)
        if degree < 1:
            raise ValueError("degree-0 tensors are plain Poly functions")
        self.degree = degree
        out: dict[tuple[int, ...], Poly] = {}
        for idx, c in (comps or {}).items():
            idx = tuple(idx)
            if len(idx) != degree:
                raise ValueError(f"index tuple {idx} has wrong length for degree {degree}")
            if any(i < 0 or i >= len(self.names) for i in idx):
                raise ValueError(f"index tuple {idx} out of range")
            if not isinstance(c, Poly):
                c = Poly.const(self.names, c)
            elif c.names != self.names:
                raise ChartMismatch(f"{c.names} vs {self.names}")
            sign, key = _sort_sign(idx)
            if not sign or not c:
                continue
            v = out.get(key)
            v = (c if sign > 0 else -c) if v is None else (v + c if sign > 0 else v - c)
            if v:
                out[key] = v
            else:
                out.pop(key, None)
        self.comps = out

    @classmethod
    def _raw(cls, names, degree, comps):
        t = object.__new__(cls)
        t.names = names
        t.degree = degree
        t.comps = comps
        return t

    @classmethod
    def zero(cls, names: Sequence[str], degree: int):
        return cls._raw(tuple(names), degree, {})

    @classmethod
    def basis(cls, names: Sequence[str], idx: Sequence[int], coeff=1):
        names = tuple(names)
        c = coeff if isinstance(coeff, Poly) else Poly.const(names, coeff)
        return cls(names, len(idx), {tuple(idx): c})

    def zero_like(self):
        return type(self)._raw(self.names, self.degree, {})

    @property
    def dim(self) -> int:
        return len(self.names)

    def __bool__(self) -> bool:
        return bool(self.comps)

    def is_zero(self) -> bool:
        return not self.comps

    def component(self, idx: Sequence[int]) -> Poly:
        sign, key = _sort_sign(idx)
        c = self.comps.get(key)
        if c is None or not sign:
            return Poly.zero(self.names)
        return c if sign > 0 else -c

    def items(self):
        return sorted(self.comps.items())

    def _check(self, other) -> None:
        if type(other) is not type(self):
            raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        if other.names != self.names:
            raise ChartMismatch(f"{self.names} vs {other.names}")
        if other.degree != self.degree:
            raise ValueError(f"degree mismatch: {self.degree} vs {other.degree}")

    def __add__(self, other):
        self._check(other)
        if not other.comps:
            return self
        out = dict(self.comps)
        for k, c in other.comps.items():
            v = out.get(k)
            v = c if v is None else v + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return type(self)._raw(self.names, self.degree, out)

    def __neg__(self):
        return type(self)._raw(self.names, self.degree, {k: -c for k, c in self.comps.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = as_scalar(c)
        if not c:
            return self.zero_like()
        return type(self)._raw(self.names, self.degree, {k: v.scale(c) for k, v in self.comps.items()})

    def times(self, f: Poly):
        """Module action by a function."""
        if f.names != self.names:
            raise ChartMismatch(f"{f.names} vs {self.names}")
        out = {}
        for k, v in self.comps.items():
            w = v * f
            if w:
                out[k] = w
        return type(self)._raw(self.names, self.degree, out)

    def __mul__(self, other):
        if isinstance(other, Poly):
            return self.times(other)
        return self.scale(other)

    __rmul__ = __mul__

    def map_coefficients(self, f):
        out = {}
        for k, v in self.comps.items():
            w = f(v)
            if w:
                out[k] = w
        return type(self)._raw(self.names, self.degree, out)

    def __eq__(self, other) -> bool:
        if isinstance(other, Tensor):
            return (type(other) is type(self) and other.names == self.names
                    and other.degree == self.degree and other.comps == self.comps)
        return NotImplemented

    def __hash__(self) -> int:
        return hash((type(self).__name__, self.names, self.degree, frozenset(self.comps.items())))

    def __str__(self) -> str:
        return format_terms(self.items(), lambda idx: "∧".join(self._glyph + self.names[i] for i in idx))

    def __repr__(self) -> str:
        return f"{type(self).__name__}({str(self)!r}, degree={self.degree})"


class MultiVector(Tensor):
    """Multivector field; ``comps[(i, j)]`` is the coefficient of the i-th ^ j-th partials."""

    __slots__ = ()
    kind = "vector"
    _glyph = "∂"


class DiffForm(Tensor):
    """Differential form; ``comps[(i, j)]`` is the coefficient of dx_i ^ dx_j."""

    __slots__ = ()
    kind = "form"
    _glyph = "d"


def vector_field(names: Sequence[str], comps: Mapping[int, Poly]) -> MultiVector:
    return MultiVector(names, 1, {(i,): c for i, c in comps.items()})


def one_form(names: Sequence[str], comps: Mapping[int, Poly]) -> DiffForm:
    return DiffForm(names, 1, {(i,): c for i, c in comps.items()})


def coordinate_field(names: Sequence[str], i: int) -> MultiVector:
    return MultiVector.basis(names, (i,))


def coordinate_differential(names: Sequence[str], i: int) -> DiffForm:
    return DiffForm.basis(names, (i,))


def _names_of(t) -> tuple[str, ...]:
    return t.names


def _degree(t) -> int:
    return 0 if isinstance(t, Poly) else t.degree


def _zero_tensor(cls, names, degree):
    if degree == 0:
        return Poly.zero(names)
    return cls.zero(names, degree)


# ---------------------------------------------------------------------------
# Algebraic operations
# ---------------------------------------------------------------------------


def wedge(a, b):
    """Exterior product of two forms or two multivectors (functions act by scaling)."""
    if _names_of(a) != _names_of(b):
        raise ChartMismatch(f"{_names_of(a)} vs {_names_of(b)}")
    if isinstance(a, Poly):
        return a * b if isinstance(b, Poly) else b.times(a)
    if isinstance(b, Poly):
        return a.times(b)
    if type(a) is not type(b):
        raise TypeError("cannot wedge a form with a multivector")
    cls = type(a)
    out: dict[tuple[int, ...], Poly] = {}
    for I, ca in a.comps.items():
        for J, cb in b.comps.items():
            sign, K = _merge(I, J)
            if not sign:
                continue
            p = ca * cb
            if sign < 0:
                p = -p
            v = out.get(K)
            v = p if v is None else v + p
            if v:
                out[K] = v
            else:
                out.pop(K, None)
    return cls._raw(a.names, a.degree + b.degree, out)


def contract(arg: Tensor, T):
    """Insert a vector field into a form, or a 1-form into a multivector.

    Removing index ``a`` found at 1-based position ``l`` of a basis element
    carries the sign ``(-1)^(l-1)``.
    """
    if isinstance(T, Poly):
        raise DomainError("cannot contract into a degree-0 object")
    if not isinstance(arg, Tensor) or arg.degree != 1:
        raise DomainError("contraction argument must be a vector field or a 1-form")
    if arg.names != T.names:
        raise ChartMismatch(f"{arg.names} vs {T.names}")
    if arg.kind == T.kind:
        raise TypeError("contraction pairs vector fields with forms")
    names = T.names
    k = T.degree
    a = {I[0]: c for I, c in arg.comps.items()}
    if k == 1:
        out = Poly.zero(names)
        for (i,), c in T.comps.items():
            ai = a.get(i)
            if ai is not None:
                out = out + ai * c
        return out
    out: dict[tuple[int, ...], Poly] = {}
    for I, c in T.comps.items():
        for l, i in enumerate(I):
            ai = a.get(i)
            if ai is None:
                continue
            p = ai * c
            if l & 1:
                p = -p
            K = I[:l] + I[l + 1:]
            v = out.get(K)
            v = p if v is None else v + p
            if v:
                out[K] = v
            else:
                out.pop(K, None)
    return type(T)._raw(names, k - 1, out)


def pair(X: MultiVector, alpha: DiffForm) -> Poly:
    """alpha(X) for a vector field and a 1-form."""
    return contract(X, alpha)


def exterior_d(alpha):
    """de Rham differential of a function or a form."""
    if isinstance(alpha, Poly):
        names = alpha.names
        return DiffForm._raw(names, 1, {(i,): d for i in range(len(names)) if (d := alpha.diff(i))})
    if not isinstance(alpha, DiffForm):
        raise TypeError("exterior_d acts on functions and forms")
    names = alpha.names
    out: dict[tuple[int, ...], Poly] = {}
    for I, c in alpha.comps.items():
        for i in range(len(names)):
            if i in I:
                continue
            dc = c.diff(i)
            if not dc:
                continue
            sign, K = _merge((i,), I)
            if sign < 0:
                dc = -dc
            v = out.get(K)
            v = dc if v is None else v + dc
            if v:
                out[K] = v
            else:
                out.pop(K, None)
    return DiffForm._raw(names, alpha.degree + 1, out)


def _schouten_half(A, B, out: dict, names, sign: int) -> None:
    """Accumulate sign * sum_i (A d^R/d xi_i) ^ (d_i B) into ``out``."""
    if isinstance(A, Poly):
        return
    a = A.degree
    b_items = [((), B)] if isinstance(B, Poly) else list(B.comps.items())
    dcache: dict[tuple, Poly] = {}
    for I, ca in A.comps.items():
        for l, i in enumerate(I):
            # right derivative of xi_I in xi_i at 1-based position l+1
            s = sign if (a - 1 - l) % 2 == 0 else -sign
            rest = I[:l] + I[l + 1:]
            for J, cb in b_items:
                key = (J, i)
                db = dcache.get(key)
                if db is None:
                    db = dcache[key] = cb.diff(i)
                if not db:
                    continue
                s2, K = _merge(rest, J)
                if not s2:
                    continue
                p = ca * db
                if s * s2 < 0:
                    p = -p
                v = out.get(K)
                v = p if v is None else v + p
                if v:
                    out[K] = v
                else:
                    out.pop(K, None)


def schouten(A, B):
    """Schouten-Nijenhuis bracket of two multivector fields (functions allowed)."""
    if _names_of(A) != _names_of(B):
        raise ChartMismatch(f"{_names_of(A)} vs {_names_of(B)}")
    for t in (A, B):
        if isinstance(t, DiffForm):
            raise TypeError("schouten acts on multivector fields")
    names = _names_of(A)
    a, b = _degree(A), _degree(B)
    deg = a + b - 1
    if deg < 0:
        return Poly.zero(names)
    out: dict[tuple[int, ...], Poly] = {}
    _schouten_half(A, B, out, names, 1)
    _schouten_half(B, A, out, names, -1 if ((a - 1) * (b - 1)) % 2 == 0 else 1)
    if deg == 0:
        return out.get((), Poly.zero(names))
    return MultiVector._raw(names, deg, out)


def apply_vf(X: MultiVector, f: Poly) -> Poly:
    """Directional derivative X(f)."""
    out = Poly.zero(f.names)
    for (i,), c in X.comps.items():
        d = f.diff(i)
        if d:
            out = out + c * d
    return out


def lie_derivative(X: MultiVector, T):
    """Lie derivative of a function, multivector field or form along X."""
    if not isinstance(X, MultiVector) or X.degree != 1:
        raise TypeError("Lie derivative needs a vector field")
    if _names_of(T) != X.names:
        raise ChartMismatch(f"{X.names} vs {_names_of(T)}")
    if isinstance(T, Poly):
        return apply_vf(X, T)
    if isinstance(T, MultiVector):
        return schouten(X, T)
    if not X.comps:
        return T.zero_like()
    return exterior_d(contract(X, T)) + contract(X, exterior_d(T))


# ---------------------------------------------------------------------------
# Formal (lambda-series) versions
# ---------------------------------------------------------------------------


def series_zero(names: Sequence[str], kind: str, degree: int, N: int) -> FormalSeries:
    if degree == 0:
        z = Poly.zero(names)
    elif kind == "vector":
        z = MultiVector.zero(names, degree)
    else:
        z = DiffForm.zero(names, degree)
    return FormalSeries.zero(z, N)


def formal_wedge(a: FormalSeries, b: FormalSeries) -> FormalSeries:
    return cauchy(a, b, wedge)


def formal_contract(a: FormalSeries, T: FormalSeries) -> FormalSeries:
    return cauchy(a, T, contract)


def formal_schouten(A: FormalSeries, B: FormalSeries) -> FormalSeries:
    return cauchy(A, B, schouten)


def formal_lie(X: FormalSeries, T: FormalSeries) -> FormalSeries:
    return cauchy(X, T, lie_derivative)


def formal_d(a: FormalSeries) -> FormalSeries:
    return a.map(exterior_d)


def formal_times(f: FormalSeries, T: FormalSeries) -> FormalSeries:
    """Module action of a formal function on a formal tensor or function."""
    return cauchy(f, T, lambda x, y: x * y if isinstance(y, Poly) else y.times(x))


def require_positive_order(X: FormalSeries, what: str = "X") -> None:
    if X[0]:
        raise DomainError(f"{what} must have vanishing order-0 part")


def exp_lie(X: FormalSeries, T: FormalSeries) -> FormalSeries:
    """exp(L_X) T = sum_k L_X^k T / k!, truncated; X must start at order 1."""
    require_positive_order(X)
    if X.order != T.order:
        from .kernel import OrderMismatch
        raise OrderMismatch(f"truncation orders {X.order} and {T.order} differ")
    total = T
    term = T
    for k in range(1, T.order + 1):
        term = formal_lie(X, term)
        if term.is_zero():
            break
        term = term.scale(Q(1, k))
        total = total + term
    return total


def lie_power_series(X: FormalSeries, T: FormalSeries, weights) -> FormalSeries:
    """sum_k weights(k) L_X^k T for k = 0..N (X of positive order)."""
    require_positive_order(X)
    total = T.scale(weights(0))
    term = T
    for k in range(1, T.order + 1):
        term = formal_lie(X, term)
        if term.is_zero():
            break
        total = total + term.scale(weights(k))
    return total


def inverse_factorial_shift(k: int) -> Q:
    return Q(1, factorial(k + 1))


# ---------------------------------------------------------------------------
# Pullback along polynomial maps
# ---------------------------------------------------------------------------


def pullback(images: Sequence[Poly], T):
    """Pull a function or form back along the polynomial map x_i -> images[i].

    ``images`` live on the source chart; ``T`` lives on the target chart.
    """
    if isinstance(T, Poly):
        return T.substitute(images)
    if not isinstance(T, DiffForm):
        raise TypeError("only functions and forms pull back")
    src = images[0].names
    diffs = [exterior_d(g) for g in images]
    out = DiffForm.zero(src, T.degree)
    for I, c in T.comps.items():
        piece = c.substitute(images)
        for i in I:
            piece = wedge(piece, diffs[i])
        if isinstance(piece, Poly):
            continue
        out = out + piece
    return out
