"""Sparse multivariate polynomials with exact rational coefficients.

A polynomial is a map from exponent tuples to :class:`fractions.Fraction`
coefficients, tied to a :class:`Ring` that names the variables.  Zero
coefficients are never stored.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping

Monomial = tuple  # tuple[int, ...], one exponent per ring variable


class RingMismatch(ValueError):
    pass


class NotDivisible(ArithmeticError):
    """Raised by :meth:`Poly.exact_div` when the divisor does not divide."""

    def __init__(self, remainder=None):
        super().__init__("polynomial is not divisible")
        self.remainder = remainder


class Ring:
    """An ordered list of variable names.

    Variable order matters twice: it fixes the exponent tuple layout, and the
    default monomial order treats later variables as larger (a<b<...<k,
    x<y<z).
    """

    __slots__ = ("names", "nvars", "_index")

    def __init__(self, names: Iterable[str]):
        self.names = tuple(names)
        self.nvars = len(self.names)
        self._index = {n: i for i, n in enumerate(self.names)}
        if len(self._index) != self.nvars:
            raise ValueError(f"duplicate variable names: {self.names}")

    def index(self, name: str) -> int:
        return self._index[name]

    def __contains__(self, name) -> bool:
        return name in self._index

    def __eq__(self, other) -> bool:
        return isinstance(other, Ring) and self.names == other.names

    def __hash__(self) -> int:
        return hash(self.names)

    def __repr__(self) -> str:
        return f"Ring({','.join(self.names)})"

    def gens(self) -> list[Poly]:
        return [self.gen(n) for n in self.names]

    def gen(self, name: str) -> Poly:
        e = [0] * self.nvars
        e[self.index(name)] = 1
        return Poly(self, {tuple(e): Fraction(1)})

    def zero(self) -> Poly:
        return Poly(self, {})

    def one(self) -> Poly:
        return self.const(1)

    def const(self, c) -> Poly:
        c = Fraction(c)
        return Poly(self, {(0,) * self.nvars: c} if c else {})

    def monomial(self, exps, coeff=1) -> Poly:
        coeff = Fraction(coeff)
        return Poly(self, {tuple(exps): coeff} if coeff else {})


XYZ = Ring(("x", "y", "z"))
PARAMS = Ring(("a", "b", "c", "d", "e", "f", "g", "h", "k"))


class MonomialOrder:
    """A monomial order given by its kind and variable precedence.

    ``greatest_first`` lists variable indices from the largest variable to the
    smallest.  :meth:`key` maps a monomial to a tuple whose natural ordering is
    the monomial order.
    """

    KINDS = ("lex", "grlex", "grevlex")

    def __init__(self, kind: str, greatest_first: tuple[int, ...]):
        if kind not in self.KINDS:
            raise ValueError(f"unknown monomial order {kind!r}")
        self.kind = kind
        self.greatest_first = tuple(greatest_first)
        gf = self.greatest_first
        if kind == "lex":
            self.key = lambda m: tuple(m[i] for i in gf)
        elif kind == "grlex":
            self.key = lambda m: (sum(m),) + tuple(m[i] for i in gf)
        else:
            rev = gf[::-1]
            self.key = lambda m: (sum(m),) + tuple(-m[i] for i in rev)

    @classmethod
    def for_ring(cls, ring: Ring, kind: str = "grevlex", precedence: str | None = None):
        """Order on ``ring``; ``precedence`` like ``"x>y"`` overrides the default.

        Variables missing from ``precedence`` follow in default order.
        """
        if precedence is None:
            gf = tuple(reversed(range(ring.nvars)))
        else:
            named = [ring.index(v.strip()) for v in precedence.split(">")]
            rest = [i for i in reversed(range(ring.nvars)) if i not in named]
            gf = tuple(named + rest)
        return cls(kind, gf)

    def __eq__(self, other):
        return (isinstance(other, MonomialOrder) and self.kind == other.kind
                and self.greatest_first == other.greatest_first)

    def __hash__(self):
        return hash((self.kind, self.greatest_first))

    def __repr__(self):
        return f"MonomialOrder({self.kind!r}, {self.greatest_first})"


def default_order(ring: Ring) -> MonomialOrder:
    return MonomialOrder.for_ring(ring, "grevlex")


def _coerce_scalar(c):
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, Rational)):
        return Fraction(c)
    return None


class Poly:
    """Immutable sparse polynomial over the rationals."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: Ring, terms: Mapping[Monomial, Fraction] | None = None):
        self.ring = ring
        # public constructor normalizes: Fraction coefficients, no stored zeros
        self.terms = {tuple(m): Fraction(c) for m, c in (terms or {}).items() if c}
        self._hash = None

    # construction helpers

    @classmethod
    def _raw(cls, ring, terms):
        p = cls.__new__(cls)
        p.ring = ring
        p.terms = terms
        p._hash = None
        return p

    def _lift(self, other) -> Poly:
        if isinstance(other, Poly):
            if other.ring != self.ring:
                raise RingMismatch(f"{self.ring} vs {other.ring}")
            return other
        c = _coerce_scalar(other)
        if c is None:
            return NotImplemented
        return self.ring.const(c)

    # predicates and accessors

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        z = (0,) * self.ring.nvars
        return not self.terms or (len(self.terms) == 1 and z in self.terms)

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * self.ring.nvars, Fraction(0))

    def coeff(self, mono) -> Fraction:
        return self.terms.get(tuple(mono), Fraction(0))

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(m) for m in self.terms), default=-1)

    def degree_in(self, name: str) -> int:
        i = self.ring.index(name)
        return max((m[i] for m in self.terms), default=-1)

    def homogeneous_part(self, d: int) -> Poly:
        return Poly._raw(self.ring, {m: c for m, c in self.terms.items() if sum(m) == d})

    def __len__(self) -> int:
        return len(self.terms)

    def variables(self) -> set[str]:
        used = set()
        for m in self.terms:
            for i, e in enumerate(m):
                if e:
                    used.add(self.ring.names[i])
        return used

    # ordering

    def leading_monomial(self, order: MonomialOrder | None = None) -> Monomial:
        if not self.terms:
            raise ValueError("zero polynomial has no leading monomial")
        order = order or default_order(self.ring)
        return max(self.terms, key=order.key)

    def leading_coeff(self, order: MonomialOrder | None = None) -> Fraction:
        return self.terms[self.leading_monomial(order)]

    def sorted_terms(self, order: MonomialOrder | None = None):
        order = order or default_order(self.ring)
        return sorted(self.terms.items(), key=lambda t: order.key(t[0]), reverse=True)

    def monic(self, order: MonomialOrder | None = None) -> Poly:
        if not self.terms:
            return self
        return self / self.leading_coeff(order)

    # arithmetic

    def __neg__(self) -> Poly:
        return Poly._raw(self.ring, {m: -c for m, c in self.terms.items()})

    def __pos__(self) -> Poly:
        return self

    def __add__(self, other) -> Poly:
        other = self._lift(other)
        if other is NotImplemented:
            return other
        if len(other.terms) > len(self.terms):
            big, small = other.terms, self.terms
        else:
            big, small = self.terms, other.terms
        out = dict(big)
        for m, c in small.items():
            s = out.get(m)
            if s is None:
                out[m] = c
            else:
                s += c
                if s:
                    out[m] = s
                else:
                    del out[m]
        return Poly._raw(self.ring, out)

    __radd__ = __add__

    def __sub__(self, other) -> Poly:
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> Poly:
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other) -> Poly:
        if not isinstance(other, Poly):
            c = _coerce_scalar(other)
            if c is None:
                return NotImplemented
            if not c:
                return Poly._raw(self.ring, {})
            return Poly._raw(self.ring, {m: v * c for m, v in self.terms.items()})
        if other.ring != self.ring:
            raise RingMismatch(f"{self.ring} vs {other.ring}")
        a, b = self.terms, other.terms
        if len(a) < len(b):
            a, b = b, a
        out: dict = {}
        get = out.get
        for mb, cb in b.items():
            for ma, ca in a.items():
                m = tuple(i + j for i, j in zip(ma, mb))
                s = get(m)
                out[m] = ca * cb if s is None else s + ca * cb
        return Poly._raw(self.ring, {m: c for m, c in out.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, other) -> Poly:
        c = _coerce_scalar(other)
        if c is None:
            if isinstance(other, Poly) and other.is_constant() and other:
                c = other.constant_term()
            else:
                return NotImplemented
        if not c:
            raise ZeroDivisionError("division of polynomial by zero")
        return Poly._raw(self.ring, {m: v / c for m, v in self.terms.items()})

    def __pow__(self, n: int) -> Poly:
        if not isinstance(n, int) or n < 0:
            raise ValueError("polynomial powers must be non-negative integers")
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def mul_term(self, mono: Monomial, coeff) -> Poly:
        coeff = Fraction(coeff)
        if not coeff:
            return Poly._raw(self.ring, {})
        return Poly._raw(self.ring, {tuple(i + j for i, j in zip(m, mono)): c * coeff
                                     for m, c in self.terms.items()})

    def exact_div(self, q: Poly, order: MonomialOrder | None = None) -> Poly:
        """Return r with q*r == self, or raise :class:`NotDivisible`."""
        q = self._lift(q)
        if not q:
            raise ZeroDivisionError("exact division by the zero polynomial")
        order = order or default_order(self.ring)
        lm_q = q.leading_monomial(order)
        lc_q = q.terms[lm_q]
        rem = self
        quot: dict = {}
        while rem:
            lm = rem.leading_monomial(order)
            shift = tuple(i - j for i, j in zip(lm, lm_q))
            if min(shift) < 0:
                raise NotDivisible(rem)
            c = rem.terms[lm] / lc_q
            quot[shift] = quot.get(shift, 0) + c
            rem = rem - q.mul_term(shift, c)
        return Poly._raw(self.ring, {m: c for m, c in quot.items() if c})

    def divides(self, p: Poly) -> bool:
        try:
            p.exact_div(self)
        except NotDivisible:
            return False
        return True

    # calculus and substitution

    def diff(self, name: str) -> Poly:
        i = self.ring.index(name)
        out = {}
        for m, c in self.terms.items():
            e = m[i]
            if e:
                mm = list(m)
                mm[i] = e - 1
                out[tuple(mm)] = c * e
        return Poly._raw(self.ring, out)

    def evaluate(self, values: Mapping[str, object]):
        """Substitute values for some or all variables.

        Values may be scalars or polynomials over any one ring.  Variables not
        named keep their place; if all variables are given scalars, a Fraction
        is returned.
        """
        names = self.ring.names
        missing = [n for n in names if n not in values]
        subs = [values.get(n) for n in names]
        if not missing and all(_coerce_scalar(v) is not None for v in subs):
            vals = [Fraction(v) for v in subs]
            total = Fraction(0)
            for m, c in self.terms.items():
                t = c
                for v, e in zip(vals, m):
                    if e:
                        t *= v ** e
                total += t
            return total
        target = None
        for v in subs:
            if isinstance(v, Poly):
                target = v.ring
                break
        if target is None:
            target = self.ring
        if missing and target != self.ring:
            raise RingMismatch("partial substitution must stay inside the source ring")
        keep = {n: (target.gen(n) if n in target else None) for n in missing}
        cache: dict = {}

        def power(i, e):
            key = (i, e)
            if key not in cache:
                v = subs[i] if subs[i] is not None else keep[names[i]]
                if isinstance(v, Poly):
                    cache[key] = v ** e
                else:
                    cache[key] = target.const(Fraction(v) ** e)
            return cache[key]

        total = target.zero()
        for m, c in self.terms.items():
            t = target.const(c)
            for i, e in enumerate(m):
                if e:
                    t = t * power(i, e)
            total = total + t
        return total

    def rename(self, ring: Ring, mapping: Mapping[str, str] | None = None) -> Poly:
        """Move to another ring by variable name (optionally renamed)."""
        mapping = mapping or {}
        idx = []
        for i, n in enumerate(self.ring.names):
            target = mapping.get(n, n)
            idx.append(ring.index(target) if target in ring else None)
        out = {}
        for m, c in self.terms.items():
            e = [0] * ring.nvars
            for i, k in enumerate(m):
                if k:
                    if idx[i] is None:
                        raise RingMismatch(f"variable {self.ring.names[i]} not in {ring}")
                    e[idx[i]] += k
            e = tuple(e)
            out[e] = out.get(e, 0) + c
        return Poly._raw(ring, {m: c for m, c in out.items() if c})

    def content_free(self, order: MonomialOrder | None = None) -> Poly:
        """Scale to integer coefficients with gcd 1 and positive leading coefficient."""
        if not self.terms:
            return self
        from math import gcd, lcm

        den = 1
        for c in self.terms.values():
            den = lcm(den, c.denominator)
        nums = [int(c * den) for c in self.terms.values()]
        g = 0
        for n in nums:
            g = gcd(g, n)
        p = self * Fraction(den, g)
        if p.leading_coeff(order) < 0:
            p = -p
        return p

    # comparison, hashing, printing

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.ring == other.ring and self.terms == other.terms
        c = _coerce_scalar(other)
        if c is None:
            return NotImplemented
        return self.terms == ({(0,) * self.ring.nvars: c} if c else {})

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self.terms.items())))
        return self._hash

    def __repr__(self) -> str:
        return f"Poly({self})"

    def __str__(self) -> str:
        return format_poly(self)


def _format_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_monomial(ring: Ring, m: Monomial) -> str:
    parts = []
    for n, e in zip(ring.names, m):
        if e == 1:
            parts.append(n)
        elif e:
            parts.append(f"{n}^{e}")
    return "*".join(parts)


def format_poly(p: Poly, order: MonomialOrder | None = None) -> str:
    """Render in the grammar accepted by :func:`lvint.expr.parse_poly`."""
    if not p.terms:
        return "0"
    out = []
    for i, (m, c) in enumerate(p.sorted_terms(order)):
        mono = format_monomial(p.ring, m)
        neg = c < 0
        a = -c if neg else c
        if not mono:
            body = _format_coeff(a)
        elif a == 1:
            body = mono
        else:
            body = f"{_format_coeff(a)}*{mono}"
        if i == 0:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)


def poly_mul(p: Poly, q: Poly) -> Poly:
    if not (isinstance(p, Poly) and isinstance(q, Poly)):
        raise TypeError("poly_mul expects two polynomials")
    return p * q


def poly_exact_div(p: Poly, q: Poly) -> Poly:
    return p.exact_div(q)
