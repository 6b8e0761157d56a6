"""Buchberger's algorithm and normal-form reduction.

Case ideals here are small (a handful of generators of degree <= 2), so pair
elimination uses only Buchberger's product and chain criteria.
"""

from __future__ import annotations

from dataclasses import dataclass

from .poly import MonomialOrder, Poly, Ring, RingMismatch, default_order


@dataclass(frozen=True)
class GroebnerBasis:
    generators: tuple
    order: MonomialOrder
    ring: Ring

    def __iter__(self):
        return iter(self.generators)

    def __len__(self):
        return len(self.generators)

    def is_unit(self) -> bool:
        return len(self.generators) == 1 and self.generators[0].is_constant()

    def contains(self, p: Poly) -> bool:
        return not normal_form(p, self)


def _divides(a, b) -> bool:
    return all(i <= j for i, j in zip(a, b))


def _lcm(a, b):
    return tuple(max(i, j) for i, j in zip(a, b))


def reduce_full(p: Poly, basis, order: MonomialOrder) -> Poly:
    """Fully reduce ``p`` by ``basis`` (list of monic polys)."""
    if not basis:
        return p
    leads = [(g.leading_monomial(order), g) for g in basis]
    key = order.key
    rem: dict = {}
    work = dict(p.terms)
    ring = p.ring
    while work:
        m = max(work, key=key)
        c = work.pop(m)
        for lm, g in leads:
            if _divides(lm, m):
                shift = tuple(i - j for i, j in zip(m, lm))
                # g is monic: subtract c * shift * g, skipping its leading term
                for gm, gc in g.terms.items():
                    if gm == lm:
                        continue
                    t = tuple(i + j for i, j in zip(gm, shift))
                    v = work.get(t, 0) - c * gc
                    if v:
                        work[t] = v
                    else:
                        work.pop(t, None)
                break
        else:
            rem[m] = c
    return Poly(ring, rem)


def spoly(f: Poly, g: Poly, order: MonomialOrder) -> Poly:
    lf, lg = f.leading_monomial(order), g.leading_monomial(order)
    lcm = _lcm(lf, lg)
    s1 = f.mul_term(tuple(i - j for i, j in zip(lcm, lf)), 1 / f.terms[lf])
    s2 = g.mul_term(tuple(i - j for i, j in zip(lcm, lg)), 1 / g.terms[lg])
    return s1 - s2


def buchberger(gens, order: MonomialOrder | None = None) -> GroebnerBasis:
    """Reduced Groebner basis of the ideal generated by ``gens``."""
    gens = [g for g in gens]
    if not gens:
        raise ValueError("buchberger needs at least one generator")
    ring = gens[0].ring
    for g in gens:
        if g.ring != ring:
            raise RingMismatch(f"{g.ring} vs {ring}")
    order = order or default_order(ring)
    G = []
    for g in gens:
        if g:
            G.append(g.monic(order))
    if not G:
        return GroebnerBasis((), order, ring)

    lms = [g.leading_monomial(order) for g in G]
    pairs = {(i, j) for j in range(len(G)) for i in range(j)}

    def lcm_key(pair):
        i, j = pair
        return (order.key(_lcm(lms[i], lms[j])), j, i)

    while pairs:
        pair = min(pairs, key=lcm_key)
        pairs.discard(pair)
        i, j = pair
        lcm = _lcm(lms[i], lms[j])
        # product criterion: coprime leading monomials
        if all(a == 0 or b == 0 for a, b in zip(lms[i], lms[j])):
            continue
        # chain criterion: some g_m with lm dividing lcm and both other pairs handled
        skip = False
        for m in range(len(G)):
            if m in (i, j) or not _divides(lms[m], lcm):
                continue
            pim = (min(i, m), max(i, m))
            pjm = (min(j, m), max(j, m))
            if pim not in pairs and pjm not in pairs:
                skip = True
                break
        if skip:
            continue
        s = reduce_full(spoly(G[i], G[j], order), G, order)
        if s:
            s = s.monic(order)
            n = len(G)
            G.append(s)
            lms.append(s.leading_monomial(order))
            pairs.update((a, n) for a in range(n))
            if s.is_constant():
                return GroebnerBasis((ring.one(),), order, ring)
    return GroebnerBasis(tuple(_interreduce(G, order)), order, ring)


def _interreduce(G, order):
    # drop generators whose leading monomial is divisible by another's
    lms = [g.leading_monomial(order) for g in G]
    keep = []
    for i, g in enumerate(G):
        redundant = False
        for j, h in enumerate(G):
            if i == j:
                continue
            if _divides(lms[j], lms[i]) and (lms[j] != lms[i] or j < i):
                redundant = True
                break
        if not redundant:
            keep.append(g)
    out = []
    for i, g in enumerate(keep):
        others = keep[:i] + keep[i + 1:]
        r = reduce_full(g, others, order)
        out.append(r.monic(order))
    out.sort(key=lambda p: order.key(p.leading_monomial(order)))
    return out


def normal_form(p: Poly, gb: GroebnerBasis) -> Poly:
    """Unique remainder of ``p`` modulo the ideal with Groebner basis ``gb``."""
    if p.ring != gb.ring:
        raise RingMismatch(f"{p.ring} vs {gb.ring}")
    return reduce_full(p, list(gb.generators), gb.order)


def ideal_equal(gens1, gens2, order: MonomialOrder | None = None) -> bool:
    """Two generator sets span the same ideal (mutual normal forms vanish)."""
    gb1 = buchberger(gens1, order)
    gb2 = buchberger(gens2, order)
    return all(not normal_form(g, gb1) for g in gens2) and all(
        not normal_form(g, gb2) for g in gens1)


def s_pairs_reduce_to_zero(gb: GroebnerBasis) -> bool:
    G = list(gb.generators)
    for j in range(len(G)):
        for i in range(j):
            if reduce_full(spoly(G[i], G[j], gb.order), G, gb.order):
                return False
    return True


__all__ = ["GroebnerBasis", "buchberger", "normal_form", "ideal_equal", "spoly",
           "reduce_full", "s_pairs_reduce_to_zero"]
