import random
from fractions import Fraction as Q

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lvint.darboux import (DarbouxFunction, NotInvariant, ParametricExponent, cofactor_of,
                           darboux_log_derivative, find_darboux_combination, independence_check,
                           parse_darboux, verify_relation)
from lvint.linalg import rank
from lvint.poly import XYZ, RingMismatch
from lvint.system import (InvalidResonance, LVSystem, apply_vector_field, check_resonance,
                          divergence, dual_transform)

from strategies import polys, small_fractions

x, y, z = XYZ.gens()
ZERO = [[0] * 3] * 3
ONES = [[1] * 3] * 3


def lv(eigs, **params):
    return LVSystem.from_params(eigs, {k: Q(v) for k, v in params.items()})


def fi(sys, text, env=None):
    return verify_relation(sys, parse_darboux(text, env or sys.params()), "fi")


# T3 Case 1, e != 0: d=ab/e, f=hk/e, c=k(e+b-h)/e, g=a(e+h-b)/e
CASE1 = lv((1, -1, 1), a=1, b=2, e=1, h=3, k=1, d=2, f=3, c=0, g=2)
# T4 Case 7, a != 0
CASE7 = lv((2, -1, 1), a=2, d=1, e=1, g=1, k=1, h=1, f=1)
# T4 Case 11 with d+g=0 and a=2d
CASE11 = lv((2, -1, 1), a=2, d=1, g=-1, e=1, k=1, c=4, h=-1, f=-1)


def test_resonance_validation():
    assert check_resonance((2, -1, 1)) == (2, -1, 1)
    for bad in [(1, 1, 1), (0, -1, 1), (2, -2, 2), (1, -1, -1), (1.5, -1, 1)]:
        with pytest.raises(InvalidResonance):
            LVSystem(bad)


def test_apply_vector_field_examples():
    s = LVSystem((1, -1, 1), ZERO)
    assert apply_vector_field(s, x) == x
    assert apply_vector_field(s, x * y) == XYZ.zero()
    g = lv((2, -1, 1), a=3, b=-1, c=Q(1, 2))
    assert apply_vector_field(g, x) == x * (2 + 3 * x - y + Q(1, 2) * z)
    from lvint.poly import PARAMS
    with pytest.raises(RingMismatch):
        apply_vector_field(s, PARAMS.gen("a"))


def test_divergence_examples():
    assert divergence(LVSystem((1, -1, 1), ZERO)) == XYZ.const(1)
    assert divergence(LVSystem((2, -1, 1), ZERO)) == XYZ.const(2)
    assert divergence(LVSystem((1, -1, 1), ONES)) == 1 + 4 * x + 4 * y + 4 * z


def test_cofactor_examples():
    s = lv((1, -1, 1), d=2, e=3, f=5, a=7)
    assert cofactor_of(s, y) == -1 + 2 * x + 3 * y + 5 * z
    case2 = lv((1, -1, 1), e=1, a=2, c=3, g=-1, k=1)
    assert cofactor_of(case2, 1 - y) == y
    with pytest.raises(NotInvariant) as info:
        cofactor_of(LVSystem((1, -1, 1), ONES), 1 + x)
    assert info.value.remainder


def test_log_derivative_examples():
    s = LVSystem((1, -1, 1), ZERO)
    assert not darboux_log_derivative(s, parse_darboux("x*y"))
    # Case 1(ii): e=h=a=f=k=0, g=-d
    ii = lv((1, -1, 1), b=2, c=3, d=1, g=-1)
    D = parse_darboux("exp(d*x-b*y+c*z)", ii.params())
    assert darboux_log_derivative(ii, D) == x + 2 * y + 3 * z
    M = parse_darboux("x^(5/2)*y^3*(1+a/2*x)^(-1/2-2*d/a+g/a)", CASE7.params())
    assert darboux_log_derivative(CASE7, M) == divergence(CASE7)


def test_verify_relation_examples():
    assert fi(CASE1, "x*y*(1+a*x-e*y+k*z)^(-1-b/e)")
    assert fi(CASE1, "y*z*(1+a*x-e*y+k*z)^(-1-h/e)")
    assert verify_relation(CASE11, parse_darboux("x^(3/2)*y"), "ijm")
    assert not fi(LVSystem((1, -1, 1), ONES), "x*y")
    assert verify_relation(CASE7, parse_darboux("x*(1+x)^(-1)", CASE7.params()), ("eig", 2))


def test_parametric_exponent_rejected():
    with pytest.raises(ParametricExponent):
        parse_darboux("x^b*y")


def _same_span(basis, expected):
    rows = [list(v) for v in basis]
    return len(rows) == len(expected) and rank(rows + [list(v) for v in expected]) == len(expected)


def test_find_combination_examples():
    atoms = [parse_darboux(t) for t in ("x", "y", "z")]
    basis = find_darboux_combination(LVSystem((1, -1, 1), ZERO), atoms)
    assert _same_span(basis, [(1, 1, 0), (0, 1, 1)])
    ell = parse_darboux("1+a*x-e*y+k*z", CASE1.params())
    basis = find_darboux_combination(CASE1, atoms[:2] + [ell])
    b, e = Q(2), Q(1)
    assert _same_span(basis, [(1, 1, -1 - b / e)])
    # a=2, remaining entries 1: off every T3 linearizable and integrable branch
    off = lv((1, -1, 1), a=2, b=1, c=1, d=1, e=1, f=1, g=1, h=1, k=1)
    assert find_darboux_combination(off, atoms) is None
    div = find_darboux_combination(LVSystem((2, -1, 1), ZERO), atoms, "div")
    assert div is not None and 2 * div[0] - div[1] + div[2] == 2


def test_all_ones_is_case_1_3():
    # the all-ones matrix satisfies the Case 1.3 conditions, so x*z^{-1} is an integral
    atoms = [parse_darboux(t) for t in ("x", "y", "z")]
    basis = find_darboux_combination(LVSystem((1, -1, 1), ONES), atoms)
    assert _same_span(basis, [(1, 0, -1)])


def test_dual_examples():
    s = lv((2, -1, 1), a=1, b=2, c=3, d=4, e=5, f=6, g=7, h=8, k=9)
    assert dual_transform(dual_transform(s)) == s
    d = dual_transform(s)
    assert d.eigenvalues == (1, -1, 2)
    assert d.matrix == ((9, 8, 7), (6, 5, 4), (3, 2, 1))
    z0 = LVSystem((1, -2, 1), ZERO)
    assert dual_transform(z0) == z0
    case3 = lv((1, -1, 1), a=2, d=2, b=3, e=3, c=-1, k=4)
    p = dual_transform(case3).params()
    assert p["b"] == p["c"] == p["d"] == 0 and p["f"] == p["k"] and p["e"] == p["h"]


def test_independence_examples():
    assert not independence_check(LVSystem((1, -1, 1), ZERO))
    assert not independence_check(LVSystem((1, -1, 1), ONES))
    rng = random.Random(3)
    s = LVSystem((2, -1, 1), [[rng.randint(-5, 5) for _ in range(3)] for _ in range(3)])
    assert independence_check(s)


RESONANCES = [(1, -1, 1), (2, -1, 1), (1, -1, 2), (3, -1, 1), (1, -2, 1), (2, -3, 5)]
systems = st.builds(
    lambda eigs, vals: LVSystem(eigs, [vals[0:3], vals[3:6], vals[6:9]]),
    st.sampled_from(RESONANCES), st.lists(small_fractions, min_size=9, max_size=9))
rhos = st.tuples(small_fractions, small_fractions, small_fractions)
exp_polys = polys(XYZ, max_deg=2, max_terms=3)


@settings(max_examples=200, deadline=None)
@given(systems, rhos, exp_polys, rhos, exp_polys)
def test_log_derivative_product_rule(sys, r1, f1, r2, f2):
    D1 = DarbouxFunction(r1, (), (f1, XYZ.one(), 1) if f1 else None)
    D2 = DarbouxFunction(r2, (), (f2, XYZ.one(), 1) if f2 else None)
    lhs = darboux_log_derivative(sys, D1 * D2)
    assert lhs == darboux_log_derivative(sys, D1) + darboux_log_derivative(sys, D2)


@settings(max_examples=200, deadline=None)
@given(systems)
def test_coordinate_planes_are_invariant(sys):
    for var, L in zip((x, y, z), sys.coordinate_cofactors()):
        assert cofactor_of(sys, var) == L


@settings(max_examples=100, deadline=None)
@given(systems)
def test_first_integrals_survive_duality(sys):
    # xy-type monomial integrals of the linear part map to their mirror images
    lam, mu, nu = sys.eigenvalues
    D = DarbouxFunction.monomial((-mu, lam, 0))
    holds = verify_relation(sys, D, "fi")
    assert verify_relation(dual_transform(sys), D.dual(), "fi") == holds


@settings(max_examples=200, deadline=None)
@given(systems)
def test_resonance_identity(sys):
    lam, mu, _ = sys.eigenvalues
    F = x ** (-mu) * y ** lam
    assert apply_vector_field(sys, F).coeff((-mu, lam, 0)) == 0


def test_case1_integrals_map_under_duality():
    D = parse_darboux("x*y*(1+a*x-e*y+k*z)^(-1-b/e)", CASE1.params())
    assert verify_relation(CASE1, D, "fi")
    assert verify_relation(dual_transform(CASE1), D.dual(), "fi")


def test_not_invariant_names_the_factor():
    D = parse_darboux("x*(1+x)^2")
    with pytest.raises(NotInvariant) as info:
        darboux_log_derivative(LVSystem((1, -1, 1), ONES), D)
    assert info.value.index == 0
