"""Exact Darboux calculus for Lotka-Volterra vector fields.

A Darboux function here is ``x^r1 y^r2 z^r3 * prod F_i^l_i * exp(f/g)^l0``
with rational exponents.  Everything about it that matters for first
integrals, inverse Jacobi multipliers and eigenfunctions is captured by its
logarithmic derivative ``X(D)/D``, which is a polynomial whenever every
``F_i`` is invariant and ``exp(f/g)`` is an exponential factor.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from . import expr as _expr
from .linalg import nullspace, rank, solve
from .poly import XYZ, NotDivisible, Poly, RingMismatch
from .system import DUAL_XYZ, LVSystem, apply_vector_field, divergence


class NotInvariant(ValueError):
    """A factor is not an invariant algebraic surface; carries the witness."""

    def __init__(self, poly: Poly, remainder: Poly | None = None, index: int | None = None):
        self.poly = poly
        self.remainder = remainder
        self.index = index
        where = f"factor {index} " if index is not None else ""
        super().__init__(f"{where}({poly}) is not invariant; remainder {remainder}")


class ExpPartNotPolynomial(ValueError):
    pass


class ParametricExponent(ValueError):
    pass


def cofactor_of(sys: LVSystem, F: Poly) -> Poly:
    """The cofactor C with X(F) = C F, or raise :class:`NotInvariant`."""
    if not F:
        raise ValueError("the zero polynomial has no cofactor")
    XF = apply_vector_field(sys, F)
    try:
        C = XF.exact_div(F)
    except NotDivisible as exc:
        raise NotInvariant(F, exc.remainder) from None
    if C.degree() > 1:
        raise NotInvariant(F, C)
    return C


def _monomial_gcd(F: Poly):
    exps = list(F.terms)
    return tuple(min(m[i] for m in exps) for i in range(F.ring.nvars))


def _normalize_factor(F: Poly):
    """Split off monomial content and scale; returns (monomial exps, F or None)."""
    g = _monomial_gcd(F)
    if any(g):
        F = Poly(F.ring, {tuple(i - j for i, j in zip(m, g)): c for m, c in F.terms.items()})
    if F.is_constant():
        return g, None
    c0 = F.constant_term()
    F = F / c0 if c0 else F.monic()
    return g, F


@dataclass(frozen=True)
class DarbouxFunction:
    rho: tuple = (Fraction(0), Fraction(0), Fraction(0))
    factors: tuple = ()
    exp_part: tuple | None = None  # (f, g, lam0)
    _canonical: bool = field(default=False, repr=False, compare=False)

    def __post_init__(self):
        if self._canonical:
            return
        rho = [Fraction(r) for r in self.rho]
        merged: dict = {}
        for F, lam in self.factors:
            if not isinstance(lam, (int, Fraction)):
                raise ParametricExponent(f"exponent {lam!r} is not a rational number")
            if F.ring != XYZ:
                raise RingMismatch("Darboux factors must be polynomials in x,y,z")
            if not F:
                raise ValueError("Darboux factors must be nonzero")
            lam = Fraction(lam)
            mono, G = _normalize_factor(F)
            for i in range(3):
                rho[i] += lam * mono[i]
            if G is not None:
                merged[G] = merged.get(G, Fraction(0)) + lam
        factors = tuple(sorted(((F, l) for F, l in merged.items() if l), key=lambda t: str(t[0])))
        exp_part = self.exp_part
        if exp_part is not None:
            f, g, lam0 = exp_part
            lam0 = Fraction(lam0)
            if not g:
                raise ValueError("exponential factor with zero denominator")
            exp_part = None if (not f or not lam0) else (f, g, lam0)
        object.__setattr__(self, "rho", tuple(rho))
        object.__setattr__(self, "factors", factors)
        object.__setattr__(self, "exp_part", exp_part)
        object.__setattr__(self, "_canonical", True)

    @classmethod
    def monomial(cls, rho) -> DarbouxFunction:
        return cls(tuple(Fraction(r) for r in rho))

    def __mul__(self, other: DarbouxFunction) -> DarbouxFunction:
        rho = tuple(a + b for a, b in zip(self.rho, other.rho))
        exp_part = _merge_exp(self.exp_part, other.exp_part)
        return DarbouxFunction(rho, self.factors + other.factors, exp_part)

    def __pow__(self, s) -> DarbouxFunction:
        s = Fraction(s)
        exp_part = None
        if self.exp_part is not None:
            f, g, l0 = self.exp_part
            exp_part = (f, g, l0 * s)
        return DarbouxFunction(tuple(r * s for r in self.rho),
                               tuple((F, l * s) for F, l in self.factors), exp_part)

    def __truediv__(self, other: DarbouxFunction) -> DarbouxFunction:
        return self * other ** -1

    def dual(self) -> DarbouxFunction:
        """Swap the roles of x and z."""
        sw = lambda p: p.rename(XYZ, DUAL_XYZ)
        exp_part = None
        if self.exp_part is not None:
            f, g, l0 = self.exp_part
            exp_part = (sw(f), sw(g), l0)
        r = self.rho
        return DarbouxFunction((r[2], r[1], r[0]), tuple((sw(F), l) for F, l in self.factors),
                               exp_part)

    def __str__(self) -> str:
        parts = []
        for name, r in zip("xyz", self.rho):
            if r == 1:
                parts.append(name)
            elif r:
                parts.append(f"{name}^({r})" if r.denominator != 1 or r < 0 else f"{name}^{r}")
        for F, l in self.factors:
            parts.append(f"({F})" if l == 1 else f"({F})^({l})")
        if self.exp_part is not None:
            f, g, l0 = self.exp_part
            parts.append(f"exp(({f})/({g}))" + ("" if l0 == 1 else f"^({l0})"))
        return "*".join(parts) if parts else "1"


def _merge_exp(e1, e2):
    if e1 is None:
        return e2
    if e2 is None:
        return e1
    f1, g1, l1 = e1
    f2, g2, l2 = e2
    if g1 == g2:
        return (f1 * l1 + f2 * l2, g1, Fraction(1))
    return (f1 * g2 * l1 + f2 * g1 * l2, g1 * g2, Fraction(1))


def parse_darboux(text: str, env=None) -> DarbouxFunction:
    """Parse a product of powers into a :class:`DarbouxFunction`.

    ``env`` binds parameter names (a..k) to rationals; exponents must then
    evaluate to rationals, parametric exponents are rejected.
    """
    return darboux_from_ast(_expr.parse(text), env)


def darboux_from_ast(node, env=None) -> DarbouxFunction:
    env = dict(env or {})
    rho = [Fraction(0)] * 3
    factors = []
    exps = []

    def scalar(n):
        try:
            return _expr.eval_scalar(n, env)
        except _expr.EvalError as exc:
            if "unbound" in str(exc):
                raise ParametricExponent(f"exponent {_expr.to_text(n)} is not numeric: {exc}")
            raise

    def poly_factor(n, s):
        F = _expr.eval_poly(n, XYZ, env)
        if not F:
            raise ValueError("zero factor in Darboux expression")
        factors.append((F, s))

    def walk(n, s):
        tag = n[0]
        if tag == "mul":
            walk(n[1], s)
            walk(n[2], s)
        elif tag == "div":
            walk(n[1], s)
            walk(n[2], -s)
        elif tag == "paren":
            if n[1][0] in ("add", "sub"):
                poly_factor(n[1], s)
            else:
                walk(n[1], s)
        elif tag == "neg":
            walk(n[1], s)
        elif tag == "num":
            pass
        elif tag == "var":
            name = n[1]
            if name in XYZ:
                rho[XYZ.index(name)] += s
            elif name not in env:
                raise _expr.EvalError(f"unknown name {name!r}")
        elif tag == "pow":
            walk(n[1], s * scalar(n[2]))
        elif tag == "exp":
            num, den = _expr.eval_rational_function(n[1], XYZ, env)
            exps.append((num, den, s))
        elif tag in ("add", "sub"):
            poly_factor(n, s)
        else:
            raise _expr.EvalError(f"unsupported node {tag}")

    walk(node, Fraction(1))
    exp_part = None
    for e in exps:
        exp_part = _merge_exp(exp_part, e)
    return DarbouxFunction(tuple(rho), tuple(factors), exp_part)


def exp_factor_cofactor(sys: LVSystem, f: Poly, g: Poly) -> Poly:
    """X(f/g) as a polynomial, or raise :class:`ExpPartNotPolynomial`."""
    num = apply_vector_field(sys, f) * g - f * apply_vector_field(sys, g)
    try:
        return num.exact_div(g * g)
    except NotDivisible:
        raise ExpPartNotPolynomial(f"X(({f})/({g})) is not a polynomial") from None


def darboux_log_derivative(sys: LVSystem, D: DarbouxFunction) -> Poly:
    """The polynomial p with X(D) = p D."""
    Ls = sys.coordinate_cofactors()
    p = XYZ.zero()
    for r, L in zip(D.rho, Ls):
        if r:
            p = p + L * r
    for i, (F, lam) in enumerate(D.factors):
        try:
            C = cofactor_of(sys, F)
        except NotInvariant as exc:
            raise NotInvariant(F, exc.remainder, i) from None
        p = p + C * lam
    if D.exp_part is not None:
        f, g, lam0 = D.exp_part
        p = p + exp_factor_cofactor(sys, f, g) * lam0
    return p


FIRST_INTEGRAL = "fi"
IJM = "ijm"


def relation_target(sys: LVSystem, kind) -> Poly:
    """Required log-derivative for ``kind``: 'fi', 'ijm' or ('eig', kappa)."""
    if kind == FIRST_INTEGRAL:
        return XYZ.zero()
    if kind == IJM:
        return divergence(sys)
    if isinstance(kind, tuple) and kind[0] == "eig":
        return XYZ.const(kind[1])
    raise ValueError(f"unknown relation kind {kind!r}")


def relation_residual(sys: LVSystem, D: DarbouxFunction, kind) -> Poly:
    return darboux_log_derivative(sys, D) - relation_target(sys, kind)


def verify_relation(sys: LVSystem, D: DarbouxFunction, kind) -> bool:
    return not relation_residual(sys, D, kind)


def verify_rational_first_integral(sys: LVSystem, num: Poly, den: Poly) -> bool:
    """num/den is a first integral iff X(num) den == num X(den)."""
    return apply_vector_field(sys, num) * den == num * apply_vector_field(sys, den)


def _coefficient_rows(polys):
    monos = sorted({m for p in polys for m in p.terms})
    return monos, [[p.coeff(m) for p in polys] for m in monos]


def find_darboux_combination(sys: LVSystem, atoms, target: str = "zero"):
    """Rational exponents combining ``atoms`` into a first integral or IJM.

    For ``target='zero'`` returns a basis (list of exponent vectors) of all
    combinations with vanishing log-derivative, or None if only the trivial
    one exists.  For ``target='div'`` returns one exponent vector whose
    combination has log-derivative div(X), or None.
    """
    cofactors = [darboux_log_derivative(sys, A) for A in atoms]
    if target == "zero":
        _, rows = _coefficient_rows(cofactors)
        basis = nullspace(rows, len(atoms)) if rows else nullspace([], len(atoms))
        return [_primitive(v) for v in basis] or None
    if target in ("div", "divergence"):
        div = divergence(sys)
        monos, rows = _coefficient_rows(cofactors + [div])
        A = [r[:-1] for r in rows]
        b = [r[-1] for r in rows]
        return solve(A, b)
    raise ValueError(f"unknown target {target!r}")


def _primitive(v):
    """Scale a rational vector to coprime integers with positive leading entry."""
    den = 1
    for c in v:
        den = den * c.denominator // gcd(den, c.denominator)
    ints = [int(c * den) for c in v]
    g = 0
    for n in ints:
        g = gcd(g, n)
    g = g or 1
    lead = next((n for n in ints if n), 1)
    sign = 1 if lead > 0 else -1
    return [Fraction(sign * n, g) for n in ints]


def combine(atoms, exponents) -> DarbouxFunction:
    out = DarbouxFunction()
    for A, e in zip(atoms, exponents):
        out = out * A ** e
    return out


def independence_check(sys: LVSystem) -> bool:
    """True iff L_x, L_y, L_z and div(X) are linearly independent."""
    polys = list(sys.coordinate_cofactors()) + [divergence(sys)]
    basis = [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)]
    rows = [[p.coeff(m) for m in basis] for p in polys]
    return rank(rows) == 4
