"""Condition cases for the three resonances, with parametrizations and certificates.

The data lives in ``data/catalog.json``.  Each case carries one or more
parametrization branches (free parameters, rational assignments for the rest,
and inequations); each branch carries the closed-form certificates that prove
the case at its points.  Starred cases marked ``"derive": "dual"`` get their
branches from the base case through the involution (x,y,z) -> (z,y,x).
"""

from __future__ import annotations

import json
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources

from . import expr as _expr
from .darboux import (FIRST_INTEGRAL, IJM, cofactor_of, parse_darboux, verify_relation,
                      verify_rational_first_integral)
from .obstructions import integrability_obstructions, linearizability_obstructions
from .poly import PARAMS, XYZ
from .series import default_order, integral_residual, linearize_system, resonant_series_integral
from .series import theorem1_construct
from .system import DUAL_PARAMS, DUAL_XYZ, LVSystem, check_resonance

INTEGRABLE = "integrable"
LINEARIZABLE = "linearizable"
BOTH = "both"
MODES = ("exact", "series", "both")
SUPPORTED = ((1, -1, 1), (2, -1, 1), (1, -2, 1))
_DUAL_NAMES = {**DUAL_PARAMS, **DUAL_XYZ}


class UnsupportedResonance(ValueError):
    pass


class BranchInfeasible(ValueError):
    pass


class CatalogError(ValueError):
    """The data file is malformed or inconsistent."""


@dataclass(frozen=True)
class Certificate:
    kind: str  # fi | ijm | eig:<value> | cofactor | rfi | theorem1
    expr: str = ""
    cofactor: str = ""
    num: str = ""
    den: str = ""
    phi: str = ""
    m: str = ""
    prefactor: tuple = ()
    source: str = "printed"

    @classmethod
    def from_record(cls, rec) -> Certificate:
        known = {"kind", "expr", "cofactor", "num", "den", "phi", "m", "prefactor", "source"}
        extra = set(rec) - known
        if extra:
            raise CatalogError(f"unknown certificate fields {sorted(extra)}")
        rec = dict(rec)
        rec["prefactor"] = tuple(rec.get("prefactor", ()))
        return cls(**rec)

    def describe(self) -> str:
        if self.kind == "cofactor":
            return f"cofactor({self.expr}) = {self.cofactor}"
        if self.kind == "rfi":
            return f"rfi ({self.num})/({self.den})"
        if self.kind == "theorem1":
            return f"theorem1 prefactor ({', '.join(self.prefactor)})"
        return f"{self.kind} {self.expr}"

    def renamed(self, mapping) -> Certificate:
        def rn(text):
            return _expr.to_text(_expr.rename(_expr.parse(text), mapping)) if text else text

        kind = self.kind
        if kind.startswith("eig:"):
            kind = "eig:" + rn(kind[4:])
        pre = tuple(reversed(self.prefactor)) if mapping.get("x") == "z" else self.prefactor
        src = self.source if self.source.startswith("dual") else f"dual of {self.source}"
        return Certificate(kind, rn(self.expr), rn(self.cofactor), rn(self.num), rn(self.den),
                           rn(self.phi), rn(self.m), pre, src)


@dataclass(frozen=True)
class Branch:
    tag: str
    free: tuple
    assign: tuple = ()  # ((param, expression text), ...)
    nonzero: tuple = ()
    certificates: tuple = ()

    @classmethod
    def from_record(cls, rec) -> Branch:
        free = tuple(rec.get("free", ()))
        assign = tuple(rec.get("assign", {}).items())
        for name in free + tuple(n for n, _ in assign):
            if name not in PARAMS:
                raise CatalogError(f"branch {rec.get('tag')}: unknown parameter {name!r}")
        if set(free) & {n for n, _ in assign}:
            raise CatalogError(f"branch {rec.get('tag')}: parameter both free and assigned")
        certs = tuple(Certificate.from_record(c) for c in rec.get("certificates", ()))
        return cls(rec["tag"], free, assign, tuple(rec.get("nonzero", ())), certs)

    @property
    def assignments(self) -> dict:
        return dict(self.assign)

    def point(self, values) -> dict:
        """Full parameter point from free-parameter values (missing ones are 0)."""
        env = {n: Fraction(0) for n in PARAMS.names}
        for n in self.free:
            env[n] = Fraction(values[n])
        for n, text in self.assign:
            env[n] = _expr.eval_scalar(_expr.parse(text), {k: env[k] for k in self.free})
        return env

    def inequations_hold(self, point) -> bool:
        return all(_expr.eval_scalar(_expr.parse(t), point) != 0 for t in self.nonzero)

    def substituted(self, condition: str):
        """Condition with the parametrization plugged in, as (num, den) over PARAMS."""
        subst = {n: ("paren", _expr.parse(t)) for n, t in self.assign}
        fixed = set(self.free) | set(subst)

        def walk(node):
            tag = node[0]
            if tag == "var":
                name = node[1]
                if name in subst:
                    return subst[name]
                if name in PARAMS and name not in fixed:
                    return ("num", Fraction(0))
                return node
            if tag == "num":
                return node
            return (tag,) + tuple(walk(c) for c in node[1:])

        return _expr.eval_rational_function(walk(_expr.parse(condition)), PARAMS)

    def renamed(self, mapping) -> Branch:
        def rn(text):
            return _expr.to_text(_expr.rename(_expr.parse(text), mapping))

        return Branch(f"dual({self.tag})", tuple(mapping[n] for n in self.free),
                      tuple((mapping[n], rn(t)) for n, t in self.assign),
                      tuple(rn(t) for t in self.nonzero),
                      tuple(c.renamed(mapping) for c in self.certificates))


@dataclass(frozen=True)
class CaseSpec:
    label: str
    resonance: tuple
    kind: str
    conditions: tuple
    branches: tuple
    dual_of: str | None = None
    derived_from_dual: bool = False

    @property
    def linearizable(self) -> bool:
        return self.kind in (LINEARIZABLE, BOTH)

    @property
    def series_only(self) -> bool:
        return not any(b.certificates for b in self.branches)

    def condition_polys(self) -> list:
        return [_expr.parse_poly(c, PARAMS) for c in self.conditions]

    def branch(self, tag: str) -> Branch:
        for b in self.branches:
            if b.tag == tag:
                return b
        raise KeyError(f"{self.label} has no branch {tag!r}")


def _load_records():
    text = resources.files("lvint").joinpath("data/catalog.json").read_text(encoding="utf-8")
    data = json.loads(text)
    if data.get("format") != "lvint-catalog" or data.get("version") != 1:
        raise CatalogError("unrecognized catalog format or version")
    return data["cases"]


@lru_cache(maxsize=1)
def _catalog() -> dict:
    records = _load_records()
    raw = {}
    for rec in records:
        if rec["label"] in raw:
            raise CatalogError(f"duplicate label {rec['label']}")
        raw[rec["label"]] = rec
    out = {}
    for label, rec in raw.items():
        res = tuple(rec["resonance"])
        if rec["kind"] not in (INTEGRABLE, LINEARIZABLE, BOTH):
            raise CatalogError(f"{label}: bad kind {rec['kind']!r}")
        for c in rec["conditions"]:
            _expr.parse_poly(c, PARAMS)
        derived = rec.get("derive") == "dual"
        if derived:
            base = raw[rec["dual_of"]]
            if tuple(reversed(res)) != tuple(base["resonance"]):
                raise CatalogError(f"{label}: dual resonance mismatch")
            branches = tuple(Branch.from_record(b).renamed(_DUAL_NAMES) for b in base["branches"])
        else:
            branches = tuple(Branch.from_record(b) for b in rec["branches"])
        if not branches:
            raise CatalogError(f"{label}: no parametrization branches")
        out[label] = CaseSpec(label, res, rec["kind"], tuple(rec["conditions"]), branches,
                              rec.get("dual_of"), derived)
    return out


def all_cases() -> list:
    return list(_catalog().values())


def get_case(label: str) -> CaseSpec:
    try:
        return _catalog()[label]
    except KeyError:
        raise KeyError(f"no case labelled {label!r}") from None


def list_cases(resonance) -> list:
    """Every case recorded for a supported resonance, in catalog order."""
    res = check_resonance(resonance)
    if res not in SUPPORTED:
        raise UnsupportedResonance(f"no catalog for resonance {res}")
    return [c for c in _catalog().values() if c.resonance == res]


def _small_rational(rng: random.Random) -> Fraction:
    return Fraction(rng.choice((-1, 1)) * rng.randint(1, 5), rng.randint(1, 3))


def sample_case_point(case: CaseSpec, seed: int, branch: str | Branch | None = None,
                      attempts: int = 200) -> dict:
    """A rational parameter point on ``case``.

    Branch ``seed % len(branches)`` is used unless one is named.  Free
    parameters are small nonzero rationals drawn from ``seed``; draws that
    violate an inequation or divide by zero are retried.
    """
    if branch is None:
        br = case.branches[seed % len(case.branches)]
    elif isinstance(branch, Branch):
        br = branch
    else:
        br = case.branch(branch)
    rng = random.Random(f"{case.label}/{br.tag}/{seed}")
    polys = case.condition_polys()
    for _ in range(attempts):
        values = {n: _small_rational(rng) for n in br.free}
        try:
            point = br.point(values)
            if not br.inequations_hold(point):
                continue
        except _expr.EvalError:
            continue
        bad = [str(p) for p in polys if p.evaluate(point) != 0]
        if bad:
            raise CatalogError(f"{case.label} branch {br.tag}: point violates {bad}")
        return point
    raise BranchInfeasible(f"{case.label} branch {br.tag}: no admissible point in {attempts} draws")


# -- verification ---------------------------------------------------------------------------

@dataclass
class CertificateCheck:
    description: str
    source: str
    ok: bool
    message: str = ""


@dataclass
class SampleResult:
    seed: int | None
    branch: str | None
    point: dict
    obstructions_vanish: bool
    nonzero_obstructions: list = field(default_factory=list)
    certificates: list = field(default_factory=list)
    series_orders: tuple = ()
    series_ok: bool | None = None
    linearization_ok: bool | None = None
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return (self.obstructions_vanish and all(c.ok for c in self.certificates)
                and self.series_ok is not False and self.linearization_ok is not False)


@dataclass
class CaseReport:
    label: str
    order: int
    mode: str
    samples: list = field(default_factory=list)

    @property
    def verdict(self) -> bool:
        return bool(self.samples) and all(s.ok for s in self.samples)

    def failures(self) -> list:
        return [s for s in self.samples if not s.ok]


def _eig_value(kind: str, env) -> Fraction:
    return _expr.eval_scalar(_expr.parse(kind[4:]), env)


def check_certificate(sys: LVSystem, cert: Certificate, point, order: int) -> CertificateCheck:
    """Exact check of one certificate at one parameter point."""
    env = {n: point.get(n, Fraction(0)) for n in PARAMS.names}
    desc = cert.describe()
    try:
        if cert.kind in (FIRST_INTEGRAL, IJM):
            ok = verify_relation(sys, parse_darboux(cert.expr, env), cert.kind)
        elif cert.kind.startswith("eig:"):
            ok = verify_relation(sys, parse_darboux(cert.expr, env), ("eig", _eig_value(cert.kind, env)))
        elif cert.kind == "cofactor":
            F = _expr.parse_poly(cert.expr, XYZ, env)
            ok = cofactor_of(sys, F) == _expr.parse_poly(cert.cofactor, XYZ, env)
        elif cert.kind == "rfi":
            num = _expr.parse_poly(cert.num, XYZ, env)
            den = _expr.parse_poly(cert.den, XYZ, env)
            ok = bool(num) and bool(den) and verify_rational_first_integral(sys, num, den)
        elif cert.kind == "theorem1":
            res = theorem1_construct(sys, parse_darboux(cert.phi, env), parse_darboux(cert.m, env), order)
            want = tuple(Fraction(p) for p in cert.prefactor)
            ok = res.ok and res.independent and res.rho == want
            if not ok:
                return CertificateCheck(desc, cert.source, False,
                                        f"rho={res.rho} independent={res.independent} "
                                        f"obstructions={len(res.nonzero_obstructions)}")
        else:
            return CertificateCheck(desc, cert.source, False, f"unknown certificate kind {cert.kind}")
    except Exception as exc:  # noqa: BLE001 - any failure is a failed check
        return CertificateCheck(desc, cert.source, False, f"{type(exc).__name__}: {exc}")
    return CertificateCheck(desc, cert.source, ok, "" if ok else "relation does not hold")


def verify_point(case: CaseSpec, point, order: int | None = None, mode: str = "both",
                 branch: Branch | None = None, seed: int | None = None) -> SampleResult:
    """Run every check for ``case`` at one parameter point.

    Certificates are checked only when ``branch`` is given, since they are
    valid on their own branch.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    t0 = time.perf_counter()
    order = default_order(case.resonance) if order is None else order
    sys = LVSystem.from_params(case.resonance, point)
    obs = integrability_obstructions(case.resonance, order, point).nonzero()
    if case.linearizable:
        obs += linearizability_obstructions(case.resonance, order, point).nonzero()
    out = SampleResult(seed, branch.tag if branch else None, dict(point), not obs,
                       [(o.target, o.index, o.value) for o in obs])
    if mode in ("exact", "both") and branch is not None:
        out.certificates = [check_certificate(sys, c, point, order) for c in branch.certificates]
    if mode in ("series", "both"):
        lam, mu, nu = case.resonance
        orders = []
        ok = True
        for rho in ((-mu, lam, 0), (0, nu, -mu)):
            res = resonant_series_integral(sys, rho, order)
            ok = ok and res.ok and not integral_residual(sys, res)
            orders.append(res.order)
        out.series_orders = tuple(orders)
        out.series_ok = ok
        if case.linearizable:
            out.linearization_ok = linearize_system(sys, order).ok
    out.seconds = time.perf_counter() - t0
    return out


def _verify_seed(args):
    label, seed, order, mode = args
    case = get_case(label)
    br = case.branches[seed % len(case.branches)]
    point = sample_case_point(case, seed, br)
    return verify_point(case, point, order, mode, br, seed)


def verify_case(case: CaseSpec | str, N: int | None = None, samples: int = 5, mode: str = "both",
                seed: int = 0, workers: int = 1) -> CaseReport:
    """Check ``samples`` seeded points of ``case``; seeds cycle through the branches."""
    if isinstance(case, str):
        case = get_case(case)
    order = default_order(case.resonance) if N is None else N
    jobs = [(case.label, seed + i, order, mode) for i in range(samples)]
    if workers > 1 and samples > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_verify_seed, jobs))
    else:
        results = [_verify_seed(j) for j in jobs]
    return CaseReport(case.label, order, mode, results)
