"""Exact scalars, sparse multivariate polynomials and truncated formal series.

Everything else in the package is built on three objects defined here:

* ``Q`` -- the exact rational scalar type (``gmpy2.mpq``);
* :class:`Poly` -- a polynomial with rational coefficients in a fixed, named
  list of chart coordinates;
* :class:`FormalSeries` -- a power series in the formal parameter lambda,
  truncated at a fixed order ``N`` (all arithmetic is mod lambda^(N+1)).
"""

from __future__ import annotations

import operator
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from gmpy2 import mpq

Q = mpq

# Exponent vectors are packed into one integer, _BITS bits per variable, so
# that monomial multiplication is integer addition.
_BITS = 10
_MASK = (1 << _BITS) - 1
MAX_DEGREE = _MASK


class ChartMismatch(ValueError):
    """Operands live on different coordinate charts."""


class OrderMismatch(ValueError):
    """Formal series with different truncation orders were combined."""


class DomainError(ValueError):
    """An operation was called outside its documented domain."""


class ConsistencyError(RuntimeError):
    """An internal consistency assertion failed.

    These signal a bug (or a convention error), never bad user input.
    """


def as_scalar(c) -> mpq:
    if isinstance(c, Fraction):
        return mpq(c.numerator, c.denominator)
    if isinstance(c, str):
        return mpq(c)
    return mpq(c)


def _pack(exps: Sequence[int]) -> int:
    key = 0
    for i, e in enumerate(exps):
        if e < 0 or e > _MASK:
            raise OverflowError(f"exponent {e} out of range")
        key |= e << (_BITS * i)
    return key


def _unpack(key: int, n: int) -> tuple[int, ...]:
    return tuple((key >> (_BITS * i)) & _MASK for i in range(n))


def _exp_of(key: int, i: int) -> int:
    return (key >> (_BITS * i)) & _MASK


def _total_degree(key: int) -> int:
    d = 0
    while key:
        d += key & _MASK
        key >>= _BITS
    return d


def _format_scalar(c: mpq) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


class Poly:
    """Exact-rational polynomial in the coordinates ``names``.

    Immutable. Zero coefficients are never stored. Exponent vectors are kept
    packed; use :meth:`items` for ``(exponent tuple, coefficient)`` pairs.
    """

    __slots__ = ("names", "terms", "_deg")

    def __init__(self, names: Sequence[str], terms: Mapping[Sequence[int], object] | None = None):
        self.names = tuple(names)
        n = len(self.names)
        packed: dict[int, mpq] = {}
        for exps, c in (terms or {}).items():
            exps = tuple(exps)
            if len(exps) != n:
                raise ValueError(f"exponent vector {exps} does not match chart {self.names}")
            c = as_scalar(c)
            if c:
                k = _pack(exps)
                c = packed.get(k, 0) + c
                if c:
                    packed[k] = c
                else:
                    packed.pop(k, None)
        self.terms = packed
        self._deg = None

    @classmethod
    def _raw(cls, names: tuple[str, ...], terms: dict[int, mpq]) -> "Poly":
        p = object.__new__(cls)
        p.names = names
        p.terms = terms
        p._deg = None
        return p

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, names: Sequence[str]) -> "Poly":
        return cls._raw(tuple(names), {})

    @classmethod
    def const(cls, names: Sequence[str], c) -> "Poly":
        c = as_scalar(c)
        return cls._raw(tuple(names), {0: c} if c else {})

    @classmethod
    def var(cls, names: Sequence[str], name: str | int) -> "Poly":
        names = tuple(names)
        i = name if isinstance(name, int) else _index(names, name)
        return cls._raw(names, {1 << (_BITS * i): mpq(1)})

    @classmethod
    def monomial(cls, names: Sequence[str], exps: Sequence[int], c=1) -> "Poly":
        return cls(names, {tuple(exps): c})

    def zero_like(self) -> "Poly":
        return Poly._raw(self.names, {})

    # -- inspection -------------------------------------------------------
    @property
    def nvars(self) -> int:
        return len(self.names)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def items(self) -> list[tuple[tuple[int, ...], mpq]]:
        """Terms in canonical graded-lex order (highest degree first)."""
        n = self.nvars
        out = [(_unpack(k, n), c) for k, c in self.terms.items()]
        out.sort(key=lambda t: (sum(t[0]), t[0]), reverse=True)
        return out

    def degree(self) -> int:
        if self._deg is None:
            self._deg = max((_total_degree(k) for k in self.terms), default=-1)
        return self._deg

    def degree_in(self, indices: Iterable[int]) -> int:
        idx = tuple(indices)
        return max((sum(_exp_of(k, i) for i in idx) for k in self.terms), default=-1)

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and 0 in self.terms)

    def constant_term(self) -> mpq:
        return self.terms.get(0, mpq(0))

    def coefficient(self, exps: Sequence[int]) -> mpq:
        return self.terms.get(_pack(exps), mpq(0))

    def depends_on(self, i: int) -> bool:
        return any(_exp_of(k, i) for k in self.terms)

    # -- arithmetic -------------------------------------------------------
    def _same(self, other: "Poly") -> None:
        if self.names is not other.names and self.names != other.names:
            raise ChartMismatch(f"{self.names} vs {other.names}")

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            self._same(other)
            return other
        return Poly.const(self.names, other)

    def __add__(self, other) -> "Poly":
        other = self._coerce(other)
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = dict(self.terms)
        for k, c in other.terms.items():
            v = out.get(k)
            if v is None:
                out[k] = c
            else:
                v = v + c
                if v:
                    out[k] = v
                else:
                    del out[k]
        return Poly._raw(self.names, out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly._raw(self.names, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other) -> "Poly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Poly":
        return self._coerce(other) + (-self)

    def scale(self, c) -> "Poly":
        c = as_scalar(c)
        if not c:
            return self.zero_like()
        if c == 1:
            return self
        return Poly._raw(self.names, {k: v * c for k, v in self.terms.items()})

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            if hasattr(other, "__rmul__") and not isinstance(other, (int, mpq, Fraction)):
                return NotImplemented
            return self.scale(other)
        self._same(other)
        if not self.terms or not other.terms:
            return self.zero_like()
        if self.degree() + other.degree() > MAX_DEGREE:
            raise OverflowError("polynomial degree exceeds packed exponent range")
        if len(self.terms) > len(other.terms):
            a, b = other.terms, self.terms
        else:
            a, b = self.terms, other.terms
        out: dict[int, mpq] = {}
        get = out.get
        for k1, c1 in a.items():
            for k2, c2 in b.items():
                k = k1 + k2
                out[k] = get(k, 0) + c1 * c2
        return Poly._raw(self.names, {k: v for k, v in out.items() if v})

    def __rmul__(self, other) -> "Poly":
        return self.scale(other)

    def __truediv__(self, c) -> "Poly":
        return self.scale(1 / as_scalar(c))

    def __pow__(self, e: int) -> "Poly":
        out = Poly.const(self.names, 1)
        for _ in range(e):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.names == other.names and self.terms == other.terms
        try:
            c = as_scalar(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.is_constant() and self.constant_term() == c

    def __hash__(self) -> int:
        return hash((self.names, frozenset(self.terms.items())))

    # -- calculus & substitutions ------------------------------------------
    def diff(self, i: int) -> "Poly":
        """Partial derivative in the ``i``-th coordinate."""
        shift = _BITS * i
        unit = 1 << shift
        out = {}
        for k, c in self.terms.items():
            e = (k >> shift) & _MASK
            if e:
                out[k - unit] = c * e
        return Poly._raw(self.names, out)

    def partial(self, coord: str) -> "Poly":
        return self.diff(_index(self.names, coord))

    def map_coefficients(self, f: Callable[[tuple[int, ...], mpq], object]) -> "Poly":
        """Replace every coefficient ``c`` of monomial ``e`` by ``f(e, c)``."""
        n = self.nvars
        out = {}
        for k, c in self.terms.items():
            v = as_scalar(f(_unpack(k, n), c))
            if v:
                out[k] = v
        return Poly._raw(self.names, out)

    def set_zero(self, indices: Iterable[int]) -> "Poly":
        """Restrict to the coordinate subspace where the given variables vanish."""
        mask = 0
        for i in indices:
            mask |= _MASK << (_BITS * i)
        return Poly._raw(self.names, {k: c for k, c in self.terms.items() if not k & mask})

    def embed(self, names: Sequence[str], positions: Sequence[int]) -> "Poly":
        """Re-express on a bigger chart; variable ``i`` becomes ``names[positions[i]]``."""
        names = tuple(names)
        n = self.nvars
        out = {}
        for k, c in self.terms.items():
            e = _unpack(k, n)
            nk = 0
            for i, ei in enumerate(e):
                nk |= ei << (_BITS * positions[i])
            out[nk] = c
        return Poly._raw(names, out)

    def project(self, names: Sequence[str], positions: Sequence[int]) -> "Poly":
        """Inverse of :meth:`embed`; fails if a dropped variable occurs."""
        names = tuple(names)
        keep = set(positions)
        n = self.nvars
        out = {}
        for k, c in self.terms.items():
            e = _unpack(k, n)
            if any(e[j] for j in range(n) if j not in keep):
                raise DomainError("polynomial depends on a dropped coordinate")
            nk = 0
            for i, p in enumerate(positions):
                nk |= e[p] << (_BITS * i)
            out[nk] = c
        return Poly._raw(names, out)

    def substitute(self, images: Sequence["Poly"]) -> "Poly":
        """Compose with the polynomial map sending coordinate ``i`` to ``images[i]``."""
        if len(images) != self.nvars:
            raise ValueError("one image per coordinate required")
        target = images[0].names if images else self.names
        powers: list[dict[int, Poly]] = [{0: Poly.const(target, 1)} for _ in images]

        def power(i: int, e: int) -> Poly:
            cache = powers[i]
            if e not in cache:
                cache[e] = power(i, e - 1) * images[i]
            return cache[e]

        out = Poly.zero(target)
        n = self.nvars
        for k, c in self.terms.items():
            term = Poly.const(target, c)
            for i, e in enumerate(_unpack(k, n)):
                if e:
                    term = term * power(i, e)
            out = out + term
        return out

    # -- text ---------------------------------------------------------------
    def __str__(self) -> str:
        if not self.terms:
            return "0"
        pieces = []
        for exps, c in self.items():
            factors = []
            for name, e in zip(self.names, exps):
                if e == 1:
                    factors.append(name)
                elif e:
                    factors.append(f"{name}^{e}")
            mag = abs(c)
            if factors:
                body = " * ".join(factors)
                body = body if mag == 1 else f"{_format_scalar(mag)} * {body}"
            else:
                body = _format_scalar(mag)
            pieces.append(("-" if c < 0 else "+", body))
        sign, body = pieces[0]
        text = ("-" if sign == "-" else "") + body
        for sign, body in pieces[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self) -> str:
        return f"Poly({str(self)!r}, chart={self.names})"


def _index(names: Sequence[str], name: str) -> int:
    try:
        return names.index(name)
    except ValueError:
        raise DomainError(f"unknown coordinate {name!r} (chart {tuple(names)})") from None


def poly_arith(a: Poly, b, op: str) -> Poly:
    """Dispatch ``add``/``sub``/``mul``/``scale`` (or ``+ - *``) on polynomials."""
    op = {"+": "add", "-": "sub", "*": "mul"}.get(op, op)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        if not isinstance(b, Poly):
            raise TypeError("mul expects two polynomials; use scale for scalars")
        return a * b
    if op == "scale":
        return a.scale(b)
    raise ValueError(f"unknown op {op!r}")


def poly_partial(p: Poly, coord: str) -> Poly:
    return p.partial(coord)


def fiber_radial_integral(p: Poly, fiber_coords: Iterable[str], k: int) -> Poly:
    """Exact value of the integral over t in [0, 1] of t^(k-1) p(q, t p) dt.

    A monomial of fiber degree d is scaled by 1/(k+d).
    """
    if k < 1:
        raise DomainError("k must be positive")
    idx = [_index(p.names, c) for c in fiber_coords]
    return p.map_coefficients(lambda e, c: c / (k + sum(e[i] for i in idx)))


def parse_poly(text: str, names: Sequence[str]) -> Poly:
    """Parse the canonical text form (``3/2 * q1^2 * p1 - q2``) back to a Poly."""
    import sympy
    from sympy.parsing.sympy_parser import (convert_xor, parse_expr,
                                            standard_transformations)

    names = tuple(names)
    symbols = {n: sympy.Symbol(n) for n in names}
    try:
        expr = parse_expr(text, local_dict=symbols,
                          transformations=standard_transformations + (convert_xor,))
        sp = sympy.Poly(sympy.expand(expr), *[symbols[n] for n in names], domain="QQ")
    except (sympy.SympifyError, sympy.polys.polyerrors.BasePolynomialError, SyntaxError,
            TypeError, NameError) as exc:
        raise DomainError(f"cannot parse polynomial {text!r}: {exc}") from None
    return Poly(names, {m: Q(int(c.p), int(c.q)) for m, c in sp.terms()})


# ---------------------------------------------------------------------------
# Truncated formal series
# ---------------------------------------------------------------------------


class FormalSeries:
    """A lambda-power series truncated at order ``N`` (stored as N+1 coefficients).

    Coefficients can be anything closed under ``+``, ``-``, negation and scalar
    multiplication that also exposes ``zero_like()`` and truthiness for
    non-zero-ness: scalars, :class:`Poly`, tensors, cochains.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence):
        if not coeffs:
            raise ValueError("a formal series needs at least the order-0 coefficient")
        self.coeffs = tuple(coeffs)

    @classmethod
    def constant(cls, value, N: int) -> "FormalSeries":
        z = _zero_of(value)
        return cls((value,) + (z,) * N)

    @classmethod
    def monomial(cls, value, k: int, N: int) -> "FormalSeries":
        z = _zero_of(value)
        if k > N:
            return cls((z,) * (N + 1))
        return cls((z,) * k + (value,) + (z,) * (N - k))

    @classmethod
    def zero(cls, zero, N: int) -> "FormalSeries":
        return cls((zero,) * (N + 1))

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, k: int):
        return self.coeffs[k]

    def __iter__(self):
        return iter(self.coeffs)

    def __len__(self) -> int:
        return len(self.coeffs)

    def zero_like(self) -> "FormalSeries":
        z = _zero_of(self.coeffs[0])
        return FormalSeries((z,) * len(self.coeffs))

    def _check(self, other: "FormalSeries") -> None:
        if len(other.coeffs) != len(self.coeffs):
            raise OrderMismatch(f"truncation orders {self.order} and {other.order} differ")

    def __add__(self, other) -> "FormalSeries":
        if not isinstance(other, FormalSeries):
            return NotImplemented
        self._check(other)
        return FormalSeries([a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other) -> "FormalSeries":
        if not isinstance(other, FormalSeries):
            return NotImplemented
        self._check(other)
        return FormalSeries([a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self) -> "FormalSeries":
        return FormalSeries([-a for a in self.coeffs])

    def scale(self, c) -> "FormalSeries":
        c = as_scalar(c)
        return FormalSeries([c * a if not isinstance(a, Poly) else a.scale(c) for a in self.coeffs])

    def __mul__(self, other) -> "FormalSeries":
        if isinstance(other, FormalSeries):
            return self.mul(other)
        return self.scale(other)

    def __rmul__(self, other) -> "FormalSeries":
        return self.scale(other)

    def mul(self, other: "FormalSeries", product: Callable = operator.mul) -> "FormalSeries":
        """Cauchy product, truncated, using ``product`` on coefficients."""
        return cauchy(self, other, product)

    def map(self, f: Callable) -> "FormalSeries":
        """Apply a lambda-independent linear map coefficientwise."""
        return FormalSeries([f(a) for a in self.coeffs])

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __bool__(self) -> bool:
        return not self.is_zero()

    def valuation(self) -> int:
        """Lowest order with a non-zero coefficient (``N+1`` for the zero series)."""
        for k, a in enumerate(self.coeffs):
            if a:
                return k
        return len(self.coeffs)

    def shift(self, k: int) -> "FormalSeries":
        """Multiply by lambda^k (dropping what falls off the truncation)."""
        z = _zero_of(self.coeffs[0])
        n = len(self.coeffs)
        return FormalSeries(((z,) * k + self.coeffs)[:n])

    def __eq__(self, other) -> bool:
        if not isinstance(other, FormalSeries):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"FormalSeries(N={self.order}, {list(map(str, self.coeffs))})"

    def text(self, var: str = "λ") -> str:
        parts = [f"[{var}^{k}] {a}" for k, a in enumerate(self.coeffs) if a]
        return "; ".join(parts) if parts else "0"


def _zero_of(value):
    if hasattr(value, "zero_like"):
        return value.zero_like()
    return type(value)(0) if not isinstance(value, (int, Fraction)) else mpq(0)


def series_arith(a: FormalSeries, b: FormalSeries, op: str) -> FormalSeries:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a.mul(b)
    raise ValueError(f"unknown op {op!r}")


def cauchy(a: FormalSeries, b: FormalSeries, product: Callable) -> FormalSeries:
    """Lift a bilinear map to truncated series: (a*b)_m = sum_{i+j=m} product(a_i, b_j)."""
    a._check(b)
    N = a.order
    zero = product(_zero_of(a.coeffs[0]), _zero_of(b.coeffs[0]))
    out = [zero] * (N + 1)
    bnz = [(j, y) for j, y in enumerate(b.coeffs) if y]
    for i, x in enumerate(a.coeffs):
        if not x:
            continue
        for j, y in bnz:
            if i + j > N:
                break
            out[i + j] = out[i + j] + product(x, y)
    return FormalSeries(out)


def neumann_inverse(op: Callable[[FormalSeries], FormalSeries], N: int) -> Callable[[FormalSeries], FormalSeries]:
    """Return x -> sum_{k<=N} (-T)^k x, the inverse of id+T modulo lambda^(N+1).

    ``op`` must strictly raise the lambda-valuation of its argument; this is
    checked on every application and violations raise :class:`DomainError`.
    """

    def inverse(x: FormalSeries) -> FormalSeries:
        if x.order != N:
            raise OrderMismatch(f"expected truncation order {N}, got {x.order}")
        total = x
        term = x
        for _ in range(N):
            if term.is_zero():
                break
            image = op(term)
            if image and image.valuation() <= term.valuation():
                raise DomainError("operator has a non-zero order-0 part; id+T is not a Neumann series")
            term = -image
            total = total + term
        return total

    return inverse
