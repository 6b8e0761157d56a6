"""Truncated power series and the resonant recursions built on them.

All constructions solve the same eigen-equation.  For a diagonal field
``x_i' = x_i (lam_i + P_i(x))`` and a prefactor exponent ``rho`` we look for

    X(x^rho u) = kappa x^rho u,    u = 1 + sum_{I != 0} c_I x^I.

The coefficient of ``x^(rho+I)`` gives

    c_I ((rho+I).lam - kappa) = -sum_{J<I} c_J sum_i (rho_i+J_i) [P_i]_{I-J}.

First integrals take ``kappa = 0``, linearizing coordinates take
``rho = e_i`` and ``kappa = lam_i``.  When ``(rho+I).lam = kappa`` the index
is resonant: ``c_I`` is set to 0 and the right-hand side is recorded as an
obstruction.  Coefficients may be Fractions or parameter polynomials.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement

from .system import LVSystem


class PreconditionViolated(ValueError):
    pass


class ResonantObstruction(ArithmeticError):
    def __init__(self, index, value):
        self.index = index
        self.value = value
        super().__init__(f"unsolvable coefficient equation at {index}: {value}")


class HypothesisFailed(ValueError):
    def __init__(self, index, coeffs):
        self.index = index
        self.coeffs = coeffs
        super().__init__(f"cross product vanishes at I={index} but A_I={coeffs} is nonzero")


class VerificationFailed(ValueError):
    pass


def indices(nvars: int, degree: int):
    """Exponent tuples of exactly ``degree``, in descending lex order."""
    out = []
    for combo in combinations_with_replacement(range(nvars), degree):
        e = [0] * nvars
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    out.sort(reverse=True)
    return out


def indices_upto(nvars: int, order: int):
    for d in range(order + 1):
        yield from indices(nvars, d)


def _index_sort_key(I):
    # total degree, then grevlex with the last variable largest
    return (sum(I),) + tuple(-v for v in I)


class TruncatedSeries:
    """Multivariate series with all terms of total degree > ``order`` dropped."""

    __slots__ = ("nvars", "order", "coeffs")

    def __init__(self, nvars: int, order: int, coeffs=None):
        self.nvars = nvars
        self.order = order
        self.coeffs = {}
        for I, c in (coeffs or {}).items():
            I = tuple(I)
            if len(I) != nvars or min(I) < 0:
                raise ValueError(f"bad exponent {I} for {nvars} variables")
            if sum(I) <= order and c:
                self.coeffs[I] = c

    @classmethod
    def one(cls, nvars, order):
        return cls(nvars, order, {(0,) * nvars: Fraction(1)})

    @classmethod
    def from_poly(cls, p, order):
        return cls(p.ring.nvars, order, p.terms)

    def __getitem__(self, I):
        return self.coeffs.get(tuple(I), 0)

    def __bool__(self):
        return bool(self.coeffs)

    def is_zero(self):
        return not self.coeffs

    def constant(self):
        return self.coeffs.get((0,) * self.nvars, 0)

    def truncate(self, order):
        return TruncatedSeries(self.nvars, min(order, self.order), self.coeffs)

    def homogeneous(self, d):
        return {I: c for I, c in self.coeffs.items() if sum(I) == d}

    def _check(self, other):
        if not isinstance(other, TruncatedSeries) or other.nvars != self.nvars:
            raise TypeError("series arithmetic needs series in the same variables")

    def __add__(self, other):
        self._check(other)
        order = min(self.order, other.order)
        out = dict(self.coeffs)
        for I, c in other.coeffs.items():
            out[I] = out.get(I, 0) + c
        return TruncatedSeries(self.nvars, order, out)

    def __neg__(self):
        return TruncatedSeries(self.nvars, self.order, {I: -c for I, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s):
        return TruncatedSeries(self.nvars, self.order, {I: c * s for I, c in self.coeffs.items()})

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            return self.scale(other)
        self._check(other)
        order = min(self.order, other.order)
        out: dict = {}
        for I, a in self.coeffs.items():
            dI = sum(I)
            for J, b in other.coeffs.items():
                if dI + sum(J) > order:
                    continue
                K = tuple(i + j for i, j in zip(I, J))
                out[K] = out.get(K, 0) + a * b
        return TruncatedSeries(self.nvars, order, out)

    __rmul__ = __mul__

    def power(self, q) -> TruncatedSeries:
        """``self**q`` for rational ``q``; needs constant term 1.

        Uses the Euler-operator identity E(w) u = q w E(u), one homogeneous
        degree at a time.
        """
        q = Fraction(q)
        if self.constant() != 1:
            raise ValueError("power() needs a series with constant term 1")
        N = self.order
        u = [self.homogeneous(d) for d in range(N + 1)]
        w = [{(0,) * self.nvars: Fraction(1)}]
        for n in range(1, N + 1):
            acc: dict = {}
            for k in range(1, n + 1):
                if not u[k] or not w[n - k]:
                    continue
                factor = (q * k - (n - k)) / n
                for I, a in w[n - k].items():
                    for J, b in u[k].items():
                        K = tuple(i + j for i, j in zip(I, J))
                        acc[K] = acc.get(K, 0) + a * b * factor
            w.append({K: c for K, c in acc.items() if c})
        out = {}
        for part in w:
            out.update(part)
        return TruncatedSeries(self.nvars, N, out)

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.nvars == other.nvars and self.order == other.order and self.coeffs == other.coeffs

    def items(self):
        return sorted(self.coeffs.items(), key=lambda t: _index_sort_key(t[0]))

    def __repr__(self):
        return f"TruncatedSeries(order={self.order}, terms={len(self.coeffs)})"


# -- eigen-equation recursion ------------------------------------------------

def _lv_cofactors(sys: LVSystem):
    """Nonconstant cofactor parts as {J: coeff} per coordinate."""
    units = [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
    return [{units[j]: sys.matrix[i][j] for j in range(3) if _nonzero(sys.matrix[i][j])}
            for i in range(3)]


def _nonzero(c) -> bool:
    return bool(c)


def eigen_series(eigs, cofactors, rho, kappa, order):
    """Solve X(x^rho u) = kappa x^rho u degree by degree.

    ``cofactors[i]`` maps exponent tuples (degree >= 1) to the coefficients of
    the nonconstant part of the i-th cofactor.  Returns ``(u, obstructions)``
    where obstructions lists ``(I, value)`` for every resonant index in order.
    """
    n = len(eigs)
    rho = tuple(Fraction(r) for r in rho)
    kappa = Fraction(kappa)
    # group cofactor terms by exponent: K -> [(i, coeff)]
    terms: dict = {}
    for i, cof in enumerate(cofactors):
        for K, a in cof.items():
            if _nonzero(a):
                terms.setdefault(tuple(K), []).append((i, a))
    c = {(0,) * n: Fraction(1)}
    obstructions = []
    for d in range(1, order + 1):
        for I in indices(n, d):
            rhs = 0
            for K, entries in terms.items():
                J = tuple(i - k for i, k in zip(I, K))
                if min(J) < 0:
                    continue
                cJ = c.get(J)
                if cJ is None:
                    continue
                w = 0
                for i, a in entries:
                    s = rho[i] + J[i]
                    if s:
                        w = w + a * s
                if _nonzero(w):
                    rhs = rhs + cJ * w
            denom = sum((r + i) * lam for r, i, lam in zip(rho, I, eigs)) - kappa
            if denom == 0:
                obstructions.append((I, rhs))
            elif _nonzero(rhs):
                c[I] = -rhs / denom
    return TruncatedSeries(n, order, c), obstructions


def eigen_residual(eigs, cofactors, rho, kappa, u: TruncatedSeries) -> TruncatedSeries:
    """(X(x^rho u) - kappa x^rho u) / x^rho through the order of ``u``.

    Evaluated by direct expansion, not by the recursion, so it can certify a
    recursion result.
    """
    n = len(eigs)
    rho = tuple(Fraction(r) for r in rho)
    out: dict = {}
    for I, cI in u.coeffs.items():
        base = sum((r + i) * lam for r, i, lam in zip(rho, I, eigs)) - kappa
        if base:
            out[I] = out.get(I, 0) + cI * base
        for i, cof in enumerate(cofactors):
            s = rho[i] + I[i]
            if not s:
                continue
            for K, a in cof.items():
                L = tuple(p + q for p, q in zip(I, K))
                if sum(L) > u.order:
                    continue
                out[L] = out.get(L, 0) + cI * a * s
    return TruncatedSeries(n, u.order, out)


# -- solvers -----------------------------------------------------------------

def solve_homological(weights, shift, rhs: TruncatedSeries, order=None):
    """Solve (w.I - w0) a_I = b_I termwise.

    Returns ``(a, residuals)``; indices with ``w.I == w0`` are left out of ``a``
    and returned as ``(I, b_I)`` pairs.
    """
    order = rhs.order if order is None else order
    w = tuple(Fraction(v) for v in weights)
    w0 = Fraction(shift)
    if rhs.constant():
        raise PreconditionViolated("right-hand side must have zero constant term")
    a = {}
    residual = []
    for I, b in rhs.items():
        if sum(I) > order:
            continue
        den = sum(wi * i for wi, i in zip(w, I)) - w0
        if den == 0:
            residual.append((I, b))
        else:
            a[I] = b / den
    return TruncatedSeries(rhs.nvars, order, a), residual


@dataclass
class ResonantIntegralResult:
    """Formal first integral ``x^rho u`` (or eigenfunction) to a finite order."""

    rho: tuple
    u: TruncatedSeries
    obstructions: list
    kappa: Fraction = Fraction(0)
    exceptional: list = field(default_factory=list)
    independent: bool = True

    @property
    def order(self):
        return self.u.order

    @property
    def nonzero_obstructions(self):
        return [(I, v) for I, v in self.obstructions if _nonzero(v)]

    @property
    def ok(self) -> bool:
        return not self.nonzero_obstructions


def resonant_series_integral(sys: LVSystem, rho, order: int) -> ResonantIntegralResult:
    """Series first integral ``x^rho (1 + ...)`` with resonant coefficients set to 0."""
    rho = tuple(Fraction(r) for r in rho)
    if sum(r * l for r, l in zip(rho, sys.eigenvalues)) != 0:
        raise PreconditionViolated(f"rho={rho} is not orthogonal to the eigenvalues")
    u, obs = eigen_series(sys.eigenvalues, _lv_cofactors(sys), rho, 0, order)
    return ResonantIntegralResult(rho, u, obs)


def integral_residual(sys: LVSystem, result: ResonantIntegralResult) -> TruncatedSeries:
    return eigen_residual(sys.eigenvalues, _lv_cofactors(sys), result.rho, result.kappa, result.u)


def lv_eigen_residual(sys: LVSystem, rho, kappa, u: TruncatedSeries) -> TruncatedSeries:
    return eigen_residual(sys.eigenvalues, _lv_cofactors(sys), rho, kappa, u)


def cross(u, v):
    return (u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0])


def theorem1_construct(sys: LVSystem, phi, M, order: int) -> ResonantIntegralResult:
    """Second first integral from a first integral ``phi`` and an IJM ``M``.

    ``psi = x^(1-theta) (1 + ...)`` where ``theta`` is the monomial prefactor of
    ``M``.  Indices where ``(theta - I - 1) x delta`` vanishes are allowed only
    if the vector field has no term at ``I`` (A_I = 0); they are listed in
    ``exceptional``.  Nonvanishing is checked only for ``1 <= |I| <= order``.
    """
    from .darboux import FIRST_INTEGRAL, IJM, relation_residual

    r = relation_residual(sys, phi, FIRST_INTEGRAL)
    if r:
        raise VerificationFailed(f"phi is not a first integral: X(phi)/phi = {r}")
    r = relation_residual(sys, M, IJM)
    if r:
        raise VerificationFailed(f"M is not an inverse Jacobi multiplier: residual {r}")
    delta = phi.rho
    theta = M.rho
    if not any(delta):
        raise PreconditionViolated("phi must have a nontrivial monomial prefactor")
    exceptional = []
    for I in indices_upto(3, order):
        if sum(I) == 0:
            continue
        v = tuple(t - i - 1 for t, i in zip(theta, I))
        if any(cross(v, delta)):
            continue
        A = sys.column(I.index(1)) if sum(I) == 1 else (0, 0, 0)
        if any(_nonzero(a) for a in A):
            raise HypothesisFailed(I, A)
        exceptional.append((I, A))
    rho = tuple(1 - t for t in theta)
    result = resonant_series_integral(sys, rho, order)
    result.exceptional = exceptional
    result.independent = any(cross(rho, delta))
    return result


def node_linearize_2d(eigs, p: TruncatedSeries, q: TruncatedSeries, order: int):
    """Linearize x' = x(l1 + p), z' = z(l2 + q) at a node with l1, l2 > 0.

    Returns ``(u, v)`` with X = x u, Z = z v satisfying X' = l1 X, Z' = l2 Z
    through ``order``.
    """
    l1, l2 = (Fraction(e) for e in eigs)
    if l1 <= 0 or l2 <= 0:
        raise PreconditionViolated("node eigenvalues must be positive")
    if p.constant() or q.constant():
        raise PreconditionViolated("p and q must vanish at the origin")
    cof = [dict(p.coeffs), dict(q.coeffs)]
    out = []
    for rho, kappa in (((1, 0), l1), ((0, 1), l2)):
        u, obs = eigen_series((l1, l2), cof, rho, kappa, order)
        for I, v in obs:
            if _nonzero(v):
                raise ResonantObstruction(I, v)
        out.append(u)
    return tuple(out)


@dataclass
class Linearization:
    u: tuple  # (u1, u2, u3): X = x u1, Y = y u2, Z = z u3
    obstructions: list  # (coordinate, I, value)

    @property
    def nonzero_obstructions(self):
        return [o for o in self.obstructions if _nonzero(o[2])]

    @property
    def ok(self) -> bool:
        return not self.nonzero_obstructions


def linearize_system(sys: LVSystem, order: int) -> Linearization:
    cof = _lv_cofactors(sys)
    us = []
    obstructions = []
    for i, name in enumerate("XYZ"):
        rho = tuple(int(i == j) for j in range(3))
        u, obs = eigen_series(sys.eigenvalues, cof, rho, sys.eigenvalues[i], order)
        us.append(u)
        obstructions.extend((name, I, v) for I, v in obs)
    return Linearization(tuple(us), obstructions)


def default_order(eigs) -> int:
    """Truncation degrees 6, 10, 12 for the three studied resonances."""
    return {(1, -1, 1): 6, (2, -1, 1): 10, (1, -2, 1): 12}.get(tuple(eigs), 6)
