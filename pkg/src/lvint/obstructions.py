"""Parametric obstruction polynomials and their reduction modulo case ideals."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .groebner import buchberger, normal_form
from .poly import PARAMS, XYZ, Poly, default_order
from .series import default_order as default_truncation
from .series import linearize_system, resonant_series_integral
from .system import LVSystem, check_resonance

INTEGRABILITY = "integrability"
LINEARIZABILITY = "linearizability"
_TARGET_RANK = {"phi1": 0, "phi2": 1, "X": 2, "Y": 3, "Z": 4}
_XYZ_ORDER = default_order(XYZ)


@dataclass(frozen=True)
class Obstruction:
    target: str  # phi1 | phi2 | X | Y | Z
    index: tuple
    value: object  # Fraction at a point, parameter Poly when symbolic

    @property
    def degree(self) -> int:
        return sum(self.index)

    def is_zero(self) -> bool:
        return not self.value

    def normalized(self):
        """Content-free form for display; the raw value is kept as computed."""
        if isinstance(self.value, Poly):
            return self.value.content_free()
        return Fraction(1) if self.value else Fraction(0)


def _sort_key(ob: Obstruction):
    return (ob.degree, _XYZ_ORDER.key(ob.index), _TARGET_RANK[ob.target])


@dataclass
class ObstructionSet:
    resonance: tuple
    kind: str
    order: int
    entries: list = field(default_factory=list)
    point: dict | None = None

    def __post_init__(self):
        self.entries = sorted(self.entries, key=_sort_key)

    @property
    def symbolic(self) -> bool:
        return self.point is None

    def nonzero(self) -> list:
        return [ob for ob in self.entries if not ob.is_zero()]

    def all_zero(self) -> bool:
        return not self.nonzero()

    def evaluate(self, point) -> list:
        """Values of every entry at a parameter point, in entry order."""
        env = {n: Fraction(point.get(n, 0)) for n in PARAMS.names}
        out = []
        for ob in self.entries:
            v = ob.value
            out.append(v.evaluate(env) if isinstance(v, Poly) else Fraction(v))
        return out

    def at(self, point) -> ObstructionSet:
        vals = self.evaluate(point)
        entries = [Obstruction(ob.target, ob.index, v) for ob, v in zip(self.entries, vals)]
        return ObstructionSet(self.resonance, self.kind, self.order, entries, dict(point))

    def truncate(self, order: int) -> ObstructionSet:
        entries = [ob for ob in self.entries if ob.degree <= order]
        return ObstructionSet(self.resonance, self.kind, min(order, self.order), entries, self.point)


def _system(resonance, point):
    if point is None:
        return LVSystem.symbolic(resonance)
    return LVSystem.from_params(resonance, point)


def integrability_obstructions(resonance, order: int | None = None, point=None) -> ObstructionSet:
    """Resonant coefficients of x^(-mu) y^lam (1+...) and y^nu z^(-mu) (1+...).

    With ``point=None`` the coefficients are polynomials in a..k; otherwise
    the rational pipeline runs at that parameter point.
    """
    lam, mu, nu = check_resonance(resonance)
    order = default_truncation((lam, mu, nu)) if order is None else order
    sys = _system((lam, mu, nu), point)
    entries = []
    for target, rho in (("phi1", (-mu, lam, 0)), ("phi2", (0, nu, -mu))):
        res = resonant_series_integral(sys, rho, order)
        entries.extend(Obstruction(target, I, v) for I, v in res.obstructions)
    return ObstructionSet((lam, mu, nu), INTEGRABILITY, order, entries, point)


def linearizability_obstructions(resonance, order: int | None = None, point=None) -> ObstructionSet:
    lam, mu, nu = check_resonance(resonance)
    order = default_truncation((lam, mu, nu)) if order is None else order
    lin = linearize_system(_system((lam, mu, nu), point), order)
    entries = [Obstruction(t, I, v) for t, I, v in lin.obstructions]
    return ObstructionSet((lam, mu, nu), LINEARIZABILITY, order, entries, point)


MEMBER = "member"
SAMPLES = "vanishes on samples but not by membership"
NONZERO = "nonzero"


@dataclass
class ReductionReport:
    label: str
    entries: list  # (Obstruction, normal form, status)
    sample_points: list

    @property
    def all_zero(self) -> bool:
        return all(status != NONZERO for _, _, status in self.entries)

    @property
    def by_membership(self) -> bool:
        return all(status == MEMBER for _, _, status in self.entries)

    @property
    def normal_forms(self) -> list:
        return [nf for _, nf, _ in self.entries]


def reduce_obstructions_mod_case(obs: ObstructionSet, case, samples: int = 10, seed: int = 0
                                 ) -> ReductionReport:
    """Normal forms of symbolic obstructions modulo the case's condition ideal.

    A nonzero normal form does not refute the case, since the ideal need not
    be radical; such entries are evaluated at ``samples`` points of the case
    variety instead.
    """
    if tuple(case.resonance) != tuple(obs.resonance):
        raise ValueError(f"case {case.label} is for {case.resonance}, obstructions for {obs.resonance}")
    if not obs.symbolic:
        raise ValueError("reduction needs symbolic obstructions")
    gb = buchberger(case.condition_polys())
    points = None
    entries = []
    for ob in obs.entries:
        nf = normal_form(ob.value, gb)
        if not nf:
            entries.append((ob, nf, MEMBER))
            continue
        if points is None:
            from .catalog import sample_case_point
            points = [sample_case_point(case, seed + i) for i in range(samples)]
        ok = all(nf.evaluate({n: p.get(n, 0) for n in PARAMS.names}) == 0 for p in points)
        entries.append((ob, nf, SAMPLES if ok else NONZERO))
    return ReductionReport(case.label, entries, points or [])
