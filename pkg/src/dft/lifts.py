"""Isotropic subgroups, lift/descent matrices, and the lift span.

The central object is the rational span of all columns of all lift
matrices over prime-order isotropic subgroups.  Its rank equals |D|
exactly when every basis vector e^gamma is a combination of isotropic
lifts; per-element membership is decided against a verified exact basis
of the orthogonal complement (the common kernel of the descents).

Also here: the explicit certificate constructions -- the kernel vector
showing e^gamma misses the span when gamma_perp carries at most one
isotropic line, the signed odd-closed-walk combination equal to e^gamma
for 2-power level, and the five-generator expression for forms splitting
as an anisotropic rank-four block plus one higher-order generator.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import bounds
from .errors import (BoundExceeded, EvenLength, HypothesisFailed, NotACycle,
                     NotIsotropic, NotNested, ValidityError)
from .exact import SpanResult, span_of_indicator_columns
from .fqm import (DiscriminantForm, Element, Subgroup, is_isotropic,
                  orthogonal_complement, quotient_form, subgroup,
                  subgroup_from_generators)
from .ntheory import prime_power

# ---------------------------------------------------------------------------
# isotropic elements and subgroups
# ---------------------------------------------------------------------------


def isotropic_elements(form: DiscriminantForm, order_filter=None) -> list[Element]:
    """All nonzero gamma with q(gamma) = 0, optionally of a fixed order."""
    qn = form.qnum_array()
    out = []
    for i in np.nonzero(qn == 0)[0]:
        if i == 0:
            continue
        e = form.element(int(i))
        if order_filter is None or form.element_order(e) == order_filter:
            out.append(e)
    return out


def prime_order_subgroups(form: DiscriminantForm) -> list[Subgroup]:
    """The isotropic subgroups of prime order, sorted deterministically."""
    seen = set()
    lines = []
    for e in isotropic_elements(form):
        o = form.element_order(e)
        if prime_power(o) is None or prime_power(o)[1] != 1:
            continue
        members = []
        x = e
        while x != form.zero:
            members.append(x)
            x = form.add(x, e)
        key = tuple(sorted(form.index(m) for m in members))
        if key in seen:
            continue
        seen.add(key)
        lines.append(subgroup(form, members))
    lines.sort(key=lambda H: (H.order, tuple(form.index(e) for e in H.elements)))
    return lines


def isotropic_subgroups(form: DiscriminantForm, max_order=None) -> list[Subgroup]:
    """All non-trivial subgroups on which q vanishes identically.

    Closure search over isotropic elements; the prime-order sublist is
    exactly ``prime_order_subgroups``.  Bounded enumeration: prime-order
    only runs up to the span bound, the full search up to the (smaller)
    enumeration bound.
    """
    limit = bounds.max_enum_order() if max_order is None else bounds.max_span_order()
    if form.order > limit:
        raise BoundExceeded(
            f"|D| = {form.order} exceeds the enumeration bound {limit}")
    iso = isotropic_elements(form)
    iso_set = {form.zero} | set(iso)
    seen: set[tuple] = set()
    out: list[Subgroup] = []
    queue: list[frozenset] = []

    def register(members: frozenset) -> None:
        key = tuple(sorted(form.index(m) for m in members))
        if key in seen:
            return
        seen.add(key)
        if max_order is None or len(members) <= max_order:
            out.append(subgroup(form, members))
        queue.append(members)

    for e in iso:
        members = frozenset(_cyclic_members(form, e))
        if max_order is not None and len(members) > max_order:
            continue
        register(members)
    while queue:
        members = queue.pop()
        if max_order is not None and len(members) >= max_order:
            continue
        for e in iso:
            if e in members:
                continue
            if any(form.b(e, m) != 0 for m in members):
                continue
            bigger = set(members)
            x = e
            while x != form.zero:
                bigger.update(form.add(x, m) for m in members)
                x = form.add(x, e)
            if not bigger <= iso_set:
                continue
            register(frozenset(bigger))
    out.sort(key=lambda H: (H.order,
                            tuple(form.index(e) for e in H.elements)))
    return out


def _cyclic_members(form, e):
    members = [form.zero]
    x = e
    while x != form.zero:
        members.append(x)
        x = form.add(x, e)
    return members


# ---------------------------------------------------------------------------
# lift and descent matrices
# ---------------------------------------------------------------------------


@dataclass
class LiftMap:
    """The 0/1 matrix of the isotropic lift from H_perp/H into D.

    Column j (one per coset, indexed by the source form's elements) has
    ones exactly at the rows of that coset's members; the descent matrix
    is the transpose.
    """

    form: DiscriminantForm
    H: Subgroup
    source: DiscriminantForm           # the quotient form on H_perp/H
    columns: tuple[tuple[int, ...], ...]  # row supports, one per source element

    def matrix(self) -> np.ndarray:
        U = np.zeros((self.form.order, self.source.order), dtype=np.int64)
        for j, support in enumerate(self.columns):
            U[list(support), j] = 1
        return U

    def descent(self) -> np.ndarray:
        return self.matrix().T


def lift_matrix(form: DiscriminantForm, H: Subgroup) -> LiftMap:
    if H.order <= 1:
        raise ValidityError("lifts are taken along non-trivial subgroups")
    if not is_isotropic(form, H):
        raise NotIsotropic("q does not vanish on H")
    quotient, project, _ = quotient_form(form, H)
    cols = []
    for rep in quotient.elements:
        support = sorted(form.index(form.add(rep, h)) for h in H.elements)
        cols.append(tuple(support))
    return LiftMap(form, H, quotient, tuple(cols))


def descent_matrix(form: DiscriminantForm, H: Subgroup) -> np.ndarray:
    return lift_matrix(form, H).descent()


# ---------------------------------------------------------------------------
# the span of all lifts
# ---------------------------------------------------------------------------


def span_columns(form: DiscriminantForm, subgroups) -> list[tuple[int, ...]]:
    """All lift-matrix columns (coset supports) for the given subgroups."""
    cols = []
    every = np.arange(form.order)
    for H in subgroups:
        h_idx = [form.index(h) for h in H.elements]
        mask = np.ones(form.order, dtype=bool)
        for g in H.generators:
            mask &= form.b_row_num(form.index(g)) == 0
        perp = every[mask]
        stacked = np.stack([form.add_index_vec(perp, j) for j in h_idx])
        reps = stacked.min(axis=0)
        is_rep = perp == reps
        for col in stacked[:, is_rep].T:
            cols.append(tuple(sorted(int(x) for x in col)))
    return cols


def _span_data(form: DiscriminantForm):
    cached = getattr(form, "_lift_span_data", None)
    if cached is not None:
        return cached
    if form.order > bounds.max_span_order():
        raise BoundExceeded(
            f"|D| = {form.order} exceeds the span bound {bounds.max_span_order()}")
    cols = span_columns(form, prime_order_subgroups(form))
    result = span_of_indicator_columns(form.order, cols)
    form._lift_span_data = (cols, result)
    return cols, result


def lift_span(form: DiscriminantForm) -> SpanResult:
    """Certified span of all prime-order isotropic lifts (cached)."""
    return _span_data(form)[1]


@dataclass
class SpanBasis:
    """Deterministic exact basis of the lift span: independent columns."""

    dim: int
    rank: int
    column_supports: tuple[tuple[int, ...], ...]

    def dense(self) -> np.ndarray:
        M = np.zeros((self.rank, self.dim), dtype=np.int64)
        for r, support in enumerate(self.column_supports):
            M[r, list(support)] = 1
        return M


def image_rank(form: DiscriminantForm):
    """Exact rational rank of the lift span, with a certified basis."""
    cols, res = _span_data(form)
    basis = SpanBasis(form.order, res.rank,
                      tuple(cols[i] for i in res.pivot_columns))
    return res.rank, basis


def e_gamma_in_image(form: DiscriminantForm, gamma: Element) -> bool:
    """Whether e^gamma lies in the span of all isotropic lifts."""
    return bool(lift_span(form).membership[form.index(gamma)])


def spans_agree_with_all_subgroups(form: DiscriminantForm) -> bool:
    """Span over prime-order subgroups = span over all isotropic subgroups.

    The prime-order span is contained in the full span by definition, so
    only the deficient case needs work: every coset column of every
    isotropic subgroup must be orthogonal to the verified kernel.
    """
    res = lift_span(form)
    if res.full:
        return True
    all_cols = span_columns(form, isotropic_subgroups(form))
    for support in all_cols:
        for vec in res.kernel:
            if sum(vec.get(i, Fraction(0)) for i in support):
                return False
    return True


# ---------------------------------------------------------------------------
# explicit constructions
# ---------------------------------------------------------------------------


def perp_pair_table(form: DiscriminantForm, p: int) -> np.ndarray:
    """For every element index: does its orthogonal complement contain an
    isotropic subgroup isomorphic to (Z/pZ)^2?  Vectorized over the form."""
    qn = form.qnum_array()
    cand = []
    for i in np.nonzero(qn == 0)[0]:
        if i == 0:
            continue
        if form.element_order(form.element(int(i))) == p:
            cand.append(int(i))
    n = form.order
    out = np.zeros(n, dtype=bool)
    if len(cand) < 2:
        return out
    B = np.stack([form.b_row_num(c) for c in cand])       # b(cand_i, -)
    orth = B[:, cand] == 0
    line = np.empty(len(cand), dtype=np.int64)
    for a, c in enumerate(cand):
        multiples = [c]
        x = int(form.add_index_vec(np.array([c]), c)[0])
        while x != c and x != 0:
            multiples.append(x)
            x = int(form.add_index_vec(np.array([x]), c)[0])
        line[a] = min(multiples)
    indep = line[:, None] != line[None, :]
    pairok = orth & indep
    for g in range(n):
        mask = B[:, g] == 0
        if mask.sum() < 2:
            continue
        sub = pairok[np.ix_(mask, mask)]
        out[g] = bool(sub.any())
    return out


def _iso_pair_in(form, members) -> bool:
    """Does the element set contain two independent orthogonal isotropic
    prime-order elements generating an isotropic subgroup?"""
    prims = [e for e in members
             if e != form.zero and form.q(e) == 0
             and prime_power(form.element_order(e)) is not None
             and prime_power(form.element_order(e))[1] == 1]
    for i, a in enumerate(prims):
        pa = form.element_order(a)
        line = set(_cyclic_members(form, a))
        for c in prims[i + 1:]:
            if form.element_order(c) != pa or c in line:
                continue
            if form.b(a, c) == 0:
                return True
    return False


def kernel_vector(form: DiscriminantForm, gamma: Element) -> dict[Element, Fraction]:
    """The descent-annihilated vector pinned to e^gamma.

    Requires a prime-power order form whose gamma_perp contains no
    isotropic subgroup isomorphic to (Z/pZ)^2.  The returned coordinate
    vector v satisfies <v, e^gamma> = 1 and all descents along isotropic
    subgroups inside gamma_perp kill it (verified before returning).
    """
    pk = prime_power(form.order)
    if form.order > 1 and pk is None:
        raise HypothesisFailed("form must have prime-power order")
    gamma = tuple(gamma)
    perp = orthogonal_complement(form, gamma)
    if _iso_pair_in(form, perp.elements):
        raise HypothesisFailed("gamma_perp contains an isotropic (Z/pZ)^2")
    v: dict[Element, Fraction] = {gamma: Fraction(1)}
    if form.order > 1:
        p = pk[0]
        perp_set = set(perp.elements)
        lines = [H for H in prime_order_subgroups(form)
                 if set(H.elements) <= perp_set]
        for H in lines:
            for mu in H.elements:
                if mu == form.zero:
                    continue
                key = form.add(gamma, mu)
                v[key] = v.get(key, Fraction(0)) - Fraction(1, p - 1)
        if v.get(gamma) != 1:
            raise HypothesisFailed("correction sum touched e^gamma")
        # without an isotropic (Z/pZ)^2 every isotropic subgroup inside
        # gamma_perp is cyclic, so cyclic closures exhaust them
        seen = set()
        for e in perp.elements:
            if e == form.zero or form.q(e) != 0:
                continue
            members = _cyclic_members(form, e)
            key = tuple(sorted(members))
            if key in seen:
                continue
            seen.add(key)
            H = subgroup(form, members)
            if not _descent_kills(form, H, v):
                raise HypothesisFailed(f"descent along {H.generators} "
                                       "does not vanish")
    return {k: val for k, val in v.items() if val}


def _descent_kills(form, H, v) -> bool:
    perp_set = set(orthogonal_complement(form, H).elements)
    sums: dict[Element, Fraction] = {}
    for e, val in v.items():
        if e not in perp_set:
            continue
        rep = min(form.add(e, h) for h in H.elements)
        sums[rep] = sums.get(rep, Fraction(0)) + val
    return all(x == 0 for x in sums.values())


def odd_cycle_expression(form: DiscriminantForm, cycle):
    """Lift combination summing to e^{cycle[0]} along an odd closed walk.

    Each step difference must be an isotropic element of order two
    orthogonal to both endpoints.  Returns (subgroup, coset
    representative, coefficient) triples; their expansion is verified to
    equal the unit vector exactly.
    """
    walk = [tuple(g) for g in cycle]
    n = len(walk)
    if n % 2 == 0:
        raise EvenLength(f"closed walk of even length {n}")
    steps = []
    for i in range(n):
        mu = form.add(walk[(i + 1) % n], form.neg(walk[i]))
        if mu == form.zero or form.element_order(mu) != 2:
            raise NotACycle(f"step {i} is not an order-2 difference")
        if form.q(mu) != 0 or form.b(mu, walk[i]) != 0:
            raise NotACycle(f"step {i} is not an edge of the isotropy graph")
        steps.append(mu)
    terms = []
    total: dict[Element, Fraction] = {}
    for i, mu in enumerate(steps, start=1):
        H = subgroup_from_generators(form, [mu])
        coeff = Fraction(-1, 2) * (-1) ** i
        rep = min(walk[i - 1], form.add(walk[i - 1], mu))
        terms.append((H, rep, coeff))
        for h in H.elements:
            key = form.add(rep, h)
            total[key] = total.get(key, Fraction(0)) + coeff
    target = {walk[0]: Fraction(1)}
    if {k: v for k, v in total.items() if v} != target:
        raise NotACycle("expansion does not telescope to the unit vector")
    return terms


def rank5_expression(form: DiscriminantForm, gamma: Element):
    """e^gamma as a lift combination for forms splitting off one generator
    of order q > p over an anisotropic four-generator block of level p.

    The combination averages plain lifts of gamma over all isotropic
    lines, corrects with lifts along mixed lines through (q/p)*gamma, and
    rebalances with lifts of shifted cosets; the occurrence counts are
    obtained by enumeration and the final expansion is verified exactly.
    """
    gamma = tuple(gamma)
    n = form.element_order(gamma)
    pk = prime_power(n)
    if pk is None or pk[0] == 2:
        raise HypothesisFailed("order of gamma must be a power of an odd prime")
    p, k = pk
    if k < 2:
        raise HypothesisFailed("order of gamma must exceed p")
    qg = form.q(gamma)
    if qg.denominator != n:
        raise HypothesisFailed("q(gamma) must have denominator ord(gamma)")
    j = qg.numerator
    perp = orthogonal_complement(form, gamma)
    if perp.order != p ** 4 or form.order != n * p ** 4:
        raise HypothesisFailed("gamma_perp is not a rank-four block of order p^4")
    if any(form.element_order(e) not in (1, p) for e in perp.elements):
        raise HypothesisFailed("gamma_perp is not of level p")
    block = list(perp.elements)
    iso = [e for e in block if e != form.zero and form.q(e) == 0]
    if not iso or _iso_pair_in(form, block):
        raise HypothesisFailed("the block must be anisotropic of its rank")

    def bnum(a, c):
        return form.b(a, c)

    # counts: a0 over pairs inside the isotropic set, a_l and b_l over
    # shifted norm classes; all must be positive and choice-independent
    target0 = mod_fr(Fraction(-2 * j, p))
    a0_vals = {sum(1 for beta in iso if bnum(beta, mu) == target0)
               for mu in iso}
    if len(a0_vals) != 1 or 0 in a0_vals:
        raise HypothesisFailed("pair count a0 is not constant and positive")
    a0 = a0_vals.pop()
    a_l, b_l = {}, {}
    for el in range(1, p):
        norm = mod_fr(Fraction(-2 * el * j, p))
        alphas = [e for e in block if e != form.zero and form.q(e) == norm]
        if not alphas:
            raise HypothesisFailed(f"no block elements of norm {norm}")
        targ = mod_fr(Fraction(-2 * el * j, p))
        counts_a = {sum(1 for mu in iso if bnum(alpha, mu) == targ)
                    for alpha in alphas}
        counts_b = {sum(1 for mu in iso if bnum(alpha, mu) == 0)
                    for alpha in alphas}
        if len(counts_a) != 1 or len(counts_b) != 1:
            raise HypothesisFailed("occurrence counts depend on the choice")
        a_l[el] = counts_a.pop()
        b_l[el] = counts_b.pop()
        if a_l[el] == 0 or b_l[el] == 0:
            raise HypothesisFailed("vanishing occurrence count")

    size = len(iso)
    terms = []
    for mu in iso:
        H = subgroup_from_generators(form, [mu])
        terms.append((H, gamma, Fraction(1, size)))
    g_over = form.smul(n // p, gamma)
    coeff_w = Fraction(-(p - 1), a0 * size)
    for mu in iso:
        for beta in iso:
            if bnum(mu, beta) != target0:
                continue
            H = subgroup_from_generators(form, [form.add(g_over, beta)])
            terms.append((H, form.add(gamma, mu), coeff_w))
    for el in range(1, p):
        norm = mod_fr(Fraction(-2 * el * j, p))
        coeff_u = Fraction((p - 1) * a_l[el], a0 * p * b_l[el] * size)
        shift = form.smul(1 + el * (n // p), gamma)
        for mu in iso:
            for beta in block:
                if form.q(beta) != norm or bnum(mu, beta) != 0:
                    continue
                H = subgroup_from_generators(form, [mu])
                terms.append((H, form.add(shift, beta), coeff_u))

    total: dict[Element, Fraction] = {}
    for H, rep, coeff in terms:
        if any(form.b(rep, g) != 0 for g in H.generators):
            raise HypothesisFailed("coset representative misses H_perp")
        for h in H.elements:
            key = form.add(rep, h)
            total[key] = total.get(key, Fraction(0)) + coeff
    if {e: c for e, c in total.items() if c} != {gamma: Fraction(1)}:
        raise HypothesisFailed("expansion does not collapse to e^gamma")
    return terms


def mod_fr(x: Fraction) -> Fraction:
    return Fraction(x.numerator % x.denominator, x.denominator)


# ---------------------------------------------------------------------------
# transitivity
# ---------------------------------------------------------------------------


def check_transitivity(form: DiscriminantForm, H: Subgroup, K: Subgroup) -> bool:
    """Exact identity: lifting along H then along K/H equals lifting along K
    (and dually for descents), through the quotient-form maps."""
    if not set(H.elements) <= set(K.elements):
        raise NotNested("H must be contained in K")
    for S in (H, K):
        if not is_isotropic(form, S):
            raise NotIsotropic("subgroups must be isotropic")
    if H.order == K.order:
        return True  # K/H trivial; the composition is the lift itself
    if H.order == 1:
        raise ValidityError("H must be non-trivial")
    U_K = lift_matrix(form, K)
    U_H = lift_matrix(form, H)
    D1, project, _ = quotient_form(form, H)
    KH = subgroup(D1, {project(e) for e in K.elements})
    U_KH = lift_matrix(D1, KH)
    left = U_H.matrix() @ U_KH.matrix()
    right = U_K.matrix()
    # identify the two presentations of the double quotient
    K_reps = {e: i for i, e in enumerate(U_K.source.elements)}
    perm = np.zeros(U_KH.source.order, dtype=np.int64)
    for j, rep in enumerate(U_KH.source.elements):
        coset = min(form.add(rep, k) for k in K.elements)
        perm[j] = K_reps[coset]
    # the descent identity is the transpose of the same matrix equality
    return bool(np.array_equal(left, right[:, perm]))
