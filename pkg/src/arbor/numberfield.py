"""Exact arithmetic in K = Q[y]/(m(y)) and polynomials over K.

m is monic with rational coefficients and must be squarefree (checked);
irreducibility is the caller's contract and is not verified, since every
use here is identity-based.  Elements are coefficient vectors of exact
Fractions; k = 1 gives plain Q.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import SchemaError


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise SchemaError(f"cannot read rational from {x!r}")


def _poly_trim(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return c


def _poly_mul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _poly_trim(out)


def _poly_divmod(a, b):
    a = list(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    inv_lead = 1 / b[-1]
    for i in range(len(a) - len(b), -1, -1):
        coef = a[i + len(b) - 1] * inv_lead
        if coef:
            q[i] = coef
            for j, y in enumerate(b):
                a[i + j] -= coef * y
    return _poly_trim(q), _poly_trim(a)


def _poly_sub(a, b):
    n = max(len(a), len(b))
    a = list(a) + [Fraction(0)] * (n - len(a))
    b = list(b) + [Fraction(0)] * (n - len(b))
    return _poly_trim([x - y for x, y in zip(a, b)])


def _poly_gcd(a, b):
    a, b = _poly_trim(a), _poly_trim(b)
    while b:
        _, r = _poly_divmod(a, b)
        a, b = b, r
    if a:
        lead = a[-1]
        a = [x / lead for x in a]
    return a


class NumberField:
    """Q[y]/(m(y)) with m monic squarefree of degree k; k = 1 is Q itself."""

    def __init__(self, min_poly=None):
        if min_poly is None:
            min_poly = [Fraction(0), Fraction(1)]  # y, i.e. K = Q
        m = [_frac(c) for c in min_poly]
        if len(m) < 2:
            raise SchemaError("min_poly must have degree >= 1")
        if m[-1] != 1:
            raise SchemaError("min_poly must be monic")
        if len(m) > 2 and len(_poly_gcd(m, _poly_trim([i * c for i, c in enumerate(m)][1:] or [
                Fraction(0)]))) > 1:
            raise SchemaError("min_poly must be squarefree (gcd with derivative is 1)")
        self.min_poly = tuple(m)
        self.degree = len(m) - 1

    @property
    def is_rational(self) -> bool:
        return self.degree == 1

    def element(self, value) -> "NFElement":
        if isinstance(value, NFElement):
            if value.field != self:
                raise SchemaError("element belongs to a different field")
            return value
        if isinstance(value, (int, Fraction, str)):
            vec = [_frac(value)] + [Fraction(0)] * (self.degree - 1)
            return NFElement(self, vec)
        if isinstance(value, (list, tuple)):
            vec = [_frac(c) for c in value]
            if len(vec) > self.degree:
                raise SchemaError("coefficient vector longer than field degree")
            vec += [Fraction(0)] * (self.degree - len(vec))
            return NFElement(self, vec)
        raise SchemaError(f"cannot build field element from {value!r}")

    @property
    def zero(self):
        return self.element(0)

    @property
    def one(self):
        return self.element(1)

    def generator(self) -> "NFElement":
        """The class of y (a root of min_poly)."""
        if self.degree == 1:
            # y = -m0 in Q
            return self.element(-self.min_poly[0])
        return NFElement(self, [Fraction(0), Fraction(1)] + [Fraction(0)] * (self.degree - 2))

    def __eq__(self, other):
        return isinstance(other, NumberField) and self.min_poly == other.min_poly

    def __hash__(self):
        return hash(self.min_poly)

    def __repr__(self):
        if self.is_rational:
            return "Q"
        return f"Q[y]/({self.min_poly})"


QQ = NumberField()


class NFElement:
    """Immutable element of a NumberField; exact coefficientwise arithmetic."""

    __slots__ = ("field", "vec")

    def __init__(self, field: NumberField, vec):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "vec", tuple(vec))

    def __setattr__(self, name, value):
        raise AttributeError("NFElement is immutable")

    def _coerce(self, other):
        if isinstance(other, NFElement):
            if other.field != self.field:
                raise SchemaError("mixing elements of different fields")
            return other
        return self.field.element(other)

    def __add__(self, other):
        o = self._coerce(other)
        return NFElement(self.field, [a + b for a, b in zip(self.vec, o.vec)])

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NFElement(self.field, [a - b for a, b in zip(self.vec, o.vec)])

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return NFElement(self.field, [-a for a in self.vec])

    def __mul__(self, other):
        o = self._coerce(other)
        prod = _poly_mul(list(self.vec), list(o.vec))
        _, rem = _poly_divmod(prod, list(self.field.min_poly))
        rem += [Fraction(0)] * (self.field.degree - len(rem))
        return NFElement(self.field, rem)

    __rmul__ = __mul__

    def inverse(self) -> "NFElement":
        if self.is_zero():
            raise ZeroDivisionError("inverting zero")
        # extended Euclid keeping u with u*self = r mod min_poly
        r0, r1 = _poly_trim(list(self.vec)), list(self.field.min_poly)
        u0, u1 = [Fraction(1)], []
        while r1:
            q, r2 = _poly_divmod(r0, r1)
            r0, r1 = r1, r2
            u0, u1 = u1, _poly_sub(u0, _poly_mul(q, u1))
        if len(r0) != 1:
            raise ZeroDivisionError(
                "element is a zero divisor (min_poly is reducible)"
            )
        inv = [c / r0[0] for c in u0]
        _, rem = _poly_divmod(inv, list(self.field.min_poly))
        rem += [Fraction(0)] * (self.field.degree - len(rem))
        return NFElement(self.field, rem)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = self.field.one
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.vec)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, str)):
            other = self.field.element(other)
        return (
            isinstance(other, NFElement)
            and other.field == self.field
            and other.vec == self.vec
        )

    def __hash__(self):
        return hash((self.field.min_poly, self.vec))

    def as_rational(self) -> Fraction:
        if any(c != 0 for c in self.vec[1:]):
            raise ValueError("element is not rational")
        return self.vec[0]

    def to_json(self):
        if self.field.is_rational:
            return str(self.vec[0])
        return [str(c) for c in self.vec]

    def __repr__(self):
        if self.field.is_rational:
            return str(self.vec[0])
        return f"NF{list(map(str, self.vec))}"


class FieldPoly:
    """Univariate polynomial over a NumberField, ascending coefficients."""

    def __init__(self, field: NumberField, coeffs):
        self.field = field
        cs = [field.element(c) for c in coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        self.coeffs = tuple(cs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, z: NFElement) -> NFElement:
        out = self.field.zero
        for c in reversed(self.coeffs):
            out = out * z + c
        return out

    def derivative(self) -> "FieldPoly":
        return FieldPoly(self.field,
                         [c * i for i, c in enumerate(self.coeffs)][1:] or [0])

    def compose(self, inner: "FieldPoly") -> "FieldPoly":
        out = FieldPoly(self.field, [0])
        for c in reversed(self.coeffs):
            out = out * inner + FieldPoly(self.field, [c])
        return out

    def shift(self, constant: NFElement) -> "FieldPoly":
        """self - constant."""
        cs = list(self.coeffs) or [self.field.zero]
        cs[0] = cs[0] - constant
        return FieldPoly(self.field, cs)

    def divide_linear(self, root: NFElement):
        """Synthetic division by (x - root): (quotient, remainder)."""
        quot = []
        acc = self.field.zero
        for c in reversed(self.coeffs):
            acc = acc * root + c
            quot.append(acc)
        rem = quot.pop()
        quot.reverse()
        return FieldPoly(self.field, quot), rem

    def __add__(self, other):
        a, b = list(self.coeffs), list(other.coeffs)
        if len(a) < len(b):
            a, b = b, a
        out = a[:]
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return FieldPoly(self.field, out)

    def __mul__(self, other):
        if isinstance(other, NFElement):
            return FieldPoly(self.field, [c * other for c in self.coeffs])
        if not self.coeffs or not other.coeffs:
            return FieldPoly(self.field, [])
        out = [self.field.zero] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            for j, y in enumerate(other.coeffs):
                out[i + j] = out[i + j] + x * y
        return FieldPoly(self.field, out)

    def __eq__(self, other):
        return isinstance(other, FieldPoly) and self.coeffs == other.coeffs

    def to_json(self):
        return [c.to_json() for c in self.coeffs]

    def __repr__(self):
        return f"FieldPoly({[str(c) for c in self.coeffs]})"
