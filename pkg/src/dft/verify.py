"""Named invariant suites tying the modules together.

Three suites, each a list of named checks over documented corpora:

* ``relations``     -- exact Weil matrix identities and lift equivariance;
* ``lemmas``        -- structural equivalences (prime-order spans suffice,
                       membership criteria, graph vs. algebra, duality,
                       catalogs vs. search, tail independence);
* ``constructions`` -- the explicit certificate constructions re-evaluate
                       exactly, plus adjointness and transitivity.

The acceptance tests run the same checks at the spec bounds; the CLI
suites use slightly smaller corpora to stay snappy.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Callable

import numpy as np

from .classify import (build_graph_cached, contains_isotropic_elementary,
                       max_isotropic_rank, no_cube_catalog_check, small_type)
from .errors import DftError, HypothesisFailed
from .fqm import (DiscriminantForm, build_form, direct_sum, milgram_check,
                  orthogonal_complement, subgroup_from_generators)
from .lifts import (check_transitivity, e_gamma_in_image, isotropic_subgroups,
                    kernel_vector, lift_matrix, lift_span, odd_cycle_expression,
                    perp_pair_table, prime_order_subgroups, rank5_expression,
                    span_columns, spans_agree_with_all_subgroups)
from .ntheory import prime_power
from .symbols import GenusSymbol, enumerate_symbols, parse_symbol
from .weil import check_lift_equivariance, check_relations


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str


# ---------------------------------------------------------------------------
# corpora
# ---------------------------------------------------------------------------

_NAMED_WEIL = (
    "1", "2_1^+1", "2_7^+1", "3^-1", "3^+1", "5^+1", "5^-1", "7^+1", "7^-1",
    "2_II^+2", "2_II^-2", "4_1^+1", "4_II^+2", "4_II^-2", "8_1^+1",
    "2_1^+1.3^-1", "2_II^-2.3^-1", "8_1^+1.2_1^+1", "2_1^+1.4_1^+1",
    "3^-2", "3^+2", "9^-1", "2_1^+1.5^+1", "4_5^-1.3^+1",
    "2_II^+2.3^-1.5^+1", "2_3^-3", "2_II^+4", "2_0^+4", "16_1^+1",
    "2_II^+6", "2_2^+6", "2_II^-6", "8_0^+2",
)


def weil_corpus() -> list[GenusSymbol]:
    syms = {str(s): s for s in enumerate_symbols(12, {2, 3})}
    for text in _NAMED_WEIL:
        sym = parse_symbol(text)
        if sym.order <= 64:
            syms[str(sym)] = sym
    return [syms[k] for k in sorted(syms, key=lambda t: (syms[t].order, t))]


def lemma_corpus(max_order: int = 128) -> list[GenusSymbol]:
    return enumerate_symbols(max_order, {2, 3, 5})


_forms: dict[str, DiscriminantForm] = {}


def form_of(sym: GenusSymbol) -> DiscriminantForm:
    """Process-wide form cache so spans and graphs are computed once."""
    key = str(sym)
    if key not in _forms:
        _forms[key] = build_form(sym)
    return _forms[key]


def _is_prime_local(sym: GenusSymbol) -> bool:
    return len(sym.primes) == 1


# ---------------------------------------------------------------------------
# relations suite
# ---------------------------------------------------------------------------


def _check_weil_relations() -> CheckResult:
    n = 0
    for sym in weil_corpus():
        check_relations(form_of(sym))
        n += 1
    return CheckResult("weil-relations", True, f"{n} forms, all exact")


def _check_conductor_independence() -> CheckResult:
    form = form_of(parse_symbol("2_1^+1.3^-1"))
    base = lcm(8, form.level)
    check_relations(form, conductor=2 * base)
    return CheckResult("conductor-independence", True,
                       f"relations reproduced at conductor {2 * base}")


def _check_equivariance() -> CheckResult:
    pairs = 0
    for sym in weil_corpus():
        form = form_of(sym)
        if form.order > 32:
            continue
        for H in prime_order_subgroups(form):
            check_lift_equivariance(form, H)
            pairs += 1
    for text, gens in (("2_II^+4", [(1, 0, 0, 0), (0, 0, 1, 0)]),
                       ("2_II^+2", [(1, 0)])):
        form = form_of(parse_symbol(text))
        check_lift_equivariance(form, subgroup_from_generators(form, gens))
        pairs += 1
    return CheckResult("lift-equivariance", True, f"{pairs} (form, H) pairs")


def _check_milgram() -> CheckResult:
    n = 0
    for sym in lemma_corpus(96):
        if not milgram_check(form_of(sym)):
            return CheckResult("milgram-certificate", False, str(sym))
        n += 1
    return CheckResult("milgram-certificate", True, f"{n} forms")


# ---------------------------------------------------------------------------
# lemmas suite
# ---------------------------------------------------------------------------


def _check_prime_order_spans(max_order: int = 128) -> CheckResult:
    n = 0
    for sym in lemma_corpus(max_order):
        if not spans_agree_with_all_subgroups(form_of(sym)):
            return CheckResult("prime-order-spans-suffice", False, str(sym))
        n += 1
    return CheckResult("prime-order-spans-suffice", True, f"{n} forms")


def _line_counts(form: DiscriminantForm) -> np.ndarray:
    """Number of isotropic prime-order subgroups inside each gamma_perp."""
    lines = prime_order_subgroups(form)
    counts = np.zeros(form.order, dtype=np.int64)
    for H in lines:
        gen = H.generators[0]
        counts += (form.b_row_num(form.index(gen)) == 0).astype(np.int64)
    return counts


def _check_two_lines_necessary(max_order: int = 128) -> CheckResult:
    checked = 0
    for sym in lemma_corpus(max_order):
        if not _is_prime_local(sym):
            continue
        form = form_of(sym)
        member = lift_span(form).membership
        counts = _line_counts(form)
        if np.any(member & (counts < 2)):
            return CheckResult("membership-needs-two-lines", False, str(sym))
        checked += 1
    return CheckResult("membership-needs-two-lines", True, f"{checked} forms")


def _check_pair_sufficient(max_order: int = 128) -> CheckResult:
    checked = 0
    for sym in lemma_corpus(max_order):
        if not _is_prime_local(sym):
            continue
        p = sym.primes[0]
        form = form_of(sym)
        member = lift_span(form).membership
        pair = perp_pair_table(form, p)
        if np.any(pair & ~member):
            return CheckResult("orthogonal-pair-forces-membership", False,
                               str(sym))
        checked += 1
    return CheckResult("orthogonal-pair-forces-membership", True,
                       f"{checked} forms")


def _odd_p_hypothesis_mask(form: DiscriminantForm, p: int) -> np.ndarray:
    """Elements of order <= p, or of higher order with p dividing the
    numerator of q against the denominator ord(gamma)."""
    n = form.order
    mask = np.zeros(n, dtype=bool)
    for i in range(n):
        e = form.element(i)
        o = form.element_order(e)
        if o <= p:
            mask[i] = True
            continue
        qv = form.q(e)
        j = qv.numerator * (o // qv.denominator)
        mask[i] = j % p == 0
    return mask


def _check_odd_p_iff(max_order: int = 125) -> CheckResult:
    checked = 0
    for p in (3, 5):
        for sym in enumerate_symbols(max_order, {p}):
            form = form_of(sym)
            member = lift_span(form).membership
            pair = perp_pair_table(form, p)
            hyp = _odd_p_hypothesis_mask(form, p)
            if np.any(hyp & (member != pair)):
                return CheckResult("odd-p-membership-iff-pair", False, str(sym))
            checked += 1
    return CheckResult("odd-p-membership-iff-pair", True, f"{checked} forms")


def _check_graph_matches_algebra(max_order: int = 128) -> CheckResult:
    checked = 0
    for sym in enumerate_symbols(max_order, {2}):
        form = form_of(sym)
        member = lift_span(form).membership
        graph = build_graph_cached(form)
        verdicts = np.array([not graph.bipartite[int(c)]
                             for c in graph.component])
        if not np.array_equal(verdicts, member):
            return CheckResult("graph-matches-algebra", False, str(sym))
        checked += 1
    return CheckResult("graph-matches-algebra", True, f"{checked} forms")


def _check_duality(max_order: int = 96) -> CheckResult:
    checked = 0
    for sym in lemma_corpus(max_order):
        form = form_of(sym)
        cols = span_columns(form, prime_order_subgroups(form))
        res = lift_span(form)
        if res.rank + len(res.kernel) != form.order:
            return CheckResult("span-kernel-duality", False, str(sym))
        for vec in res.kernel:
            for cid in res.pivot_columns:
                if sum(vec.get(i, Fraction(0)) for i in cols[cid]):
                    return CheckResult("span-kernel-duality", False, str(sym))
        checked += 1
    return CheckResult("span-kernel-duality", True, f"{checked} forms")


def _check_catalog_vs_search(max_order: int = 128) -> CheckResult:
    checked = 0
    for sym in lemma_corpus(max_order):
        if not _is_prime_local(sym):
            continue
        p = sym.primes[0]
        predicted = no_cube_catalog_check(sym)
        found = contains_isotropic_elementary(form_of(sym), p, 3)
        if predicted != (not found):
            return CheckResult("catalog-matches-search", False, str(sym))
        checked += 1
    return CheckResult("catalog-matches-search", True, f"{checked} forms")


def _check_max_rank_formula(spot_six: bool = False) -> CheckResult:
    cases = []
    for n in range(1, 6):
        for sign in (1, -1):
            cases.append((n, sign))
    if spot_six:
        cases += [(6, 1), (6, -1)]
    for n, sign in cases:
        sym = parse_symbol(f"3^{'+' if sign == 1 else '-'}{n}")
        form = form_of(sym)
        want = max_isotropic_rank(3, n, sign)
        if not contains_isotropic_elementary(form, 3, want) and want > 0:
            return CheckResult("max-isotropic-rank", False, f"{sym}: < {want}")
        if contains_isotropic_elementary(form, 3, want + 1):
            return CheckResult("max-isotropic-rank", False, f"{sym}: > {want}")
    return CheckResult("max-isotropic-rank", True, f"{len(cases)} level-3 forms")


_TAIL_SAMPLE = ("1", "2_1^+1", "2_7^+1", "2_II^+2", "2_II^-2", "4_1^+1",
                "4_3^-1", "2_2^+2", "2_1^+1.4_1^+1", "2_II^+2.4_1^+1",
                "2_3^-1", "2_0^+2")


def _check_tail_independence() -> CheckResult:
    from .ntheory import kronecker2
    rows = 0
    for a_text in _TAIL_SAMPLE:
        base = parse_symbol(a_text)
        verdicts = set()
        for scale in (8, 16):
            for t in (1, 3, 5, 7):
                sign = "+" if kronecker2(t) == 1 else "-"
                tail = f"{scale}_{t}^{sign}1"
                text = tail if a_text == "1" else f"{a_text}.{tail}"
                form = form_of(parse_symbol(text))
                verdicts.add(lift_span(form).full)
                rows += 1
        if len(verdicts) != 1:
            return CheckResult("tail-independence", False, a_text)
    return CheckResult("tail-independence", True,
                       f"{rows} forms over {len(_TAIL_SAMPLE)} bases")


def _check_rank_seven_not_small() -> CheckResult:
    # group rank = max over p of the p-rank
    checked = 0
    for sym in lemma_corpus(256):
        rank = max((sym.rank_of_prime(p) for p in sym.primes), default=0)
        if rank >= 7 and small_type(sym).small:
            return CheckResult("rank7-never-small", False, str(sym))
        if rank >= 6 and sym.level % 2 and small_type(sym).small:
            return CheckResult("rank7-never-small", False,
                               f"{sym} (odd level, rank 6)")
        checked += 1
    return CheckResult("rank7-never-small", True, f"{checked} symbols")


# ---------------------------------------------------------------------------
# constructions suite
# ---------------------------------------------------------------------------


def _check_kernel_vectors() -> CheckResult:
    cases = 0
    form = form_of(parse_symbol("3^-1"))
    v = kernel_vector(form, (1,))
    if v != {(1,): Fraction(1)}:
        return CheckResult("kernel-vector", False, "3^-1")
    cases += 1
    split = direct_sum(build_form(parse_symbol("3^-2")),
                       build_form(parse_symbol("3^+1")))
    v = kernel_vector(split, (0, 0, 1))
    if v[(0, 0, 1)] != 1 or sorted(v.values()).count(Fraction(-1, 2)) != 4:
        return CheckResult("kernel-vector", False, "3^-2 + 3^+1")
    cases += 1
    for text, gamma in (("2_II^+2", (0, 0)), ("2_1^+1", (1,)),
                        ("9^-1", (1,)), ("5^+1", (2,)), ("4_1^+1", (2,))):
        form = form_of(parse_symbol(text))
        v = kernel_vector(form, gamma)   # self-verifying
        if v[gamma] != 1:
            return CheckResult("kernel-vector", False, text)
        cases += 1
    return CheckResult("kernel-vector", True, f"{cases} cases")


def _check_odd_cycles(max_order: int = 64) -> CheckResult:
    walks = 0
    for sym in enumerate_symbols(max_order, {2}):
        form = form_of(sym)
        graph = build_graph_cached(form)
        done = set()
        for i in range(form.order):
            cid = int(graph.component[i])
            if cid in done or graph.bipartite[cid]:
                continue
            done.add(cid)
            gamma = form.element(i)
            walk = graph.odd_walk_through(gamma)
            terms = odd_cycle_expression(form, walk)  # self-verifying
            if not terms or not e_gamma_in_image(form, gamma):
                return CheckResult("odd-cycle-expression", False, str(sym))
            walks += 1
    return CheckResult("odd-cycle-expression", True, f"{walks} closed walks")


def _check_rank5() -> CheckResult:
    built = 0
    for tail in ("9^+1", "9^-1"):
        form = direct_sum(build_form(parse_symbol("3^-4")),
                          build_form(parse_symbol(tail)))
        gamma = (0, 0, 0, 0, 1)
        rank5_expression(form, gamma)    # self-verifying
        if not e_gamma_in_image(form, gamma):
            return CheckResult("rank5-expression", False, tail)
        built += 1
    try:
        bad = direct_sum(build_form(parse_symbol("3^-4")),
                         build_form(parse_symbol("3^+1")))
        rank5_expression(bad, (0, 0, 0, 0, 1))
        return CheckResult("rank5-expression", False,
                           "level-p case must be rejected")
    except HypothesisFailed:
        pass
    return CheckResult("rank5-expression", True,
                       f"{built} expressions + hypothesis guard")


def _check_adjointness(max_order: int = 64) -> CheckResult:
    pairs = 0
    for sym in lemma_corpus(max_order):
        form = form_of(sym)
        if form.order > 64:
            continue
        for H in prime_order_subgroups(form):
            lm = lift_matrix(form, H)
            U = lm.matrix()
            if not np.array_equal(lm.descent(), U.T):
                return CheckResult("descent-is-transpose", False, str(sym))
            if not np.all(U.sum(axis=0) == H.order):
                return CheckResult("descent-is-transpose", False,
                                   f"{sym}: column sums")
            pairs += 1
    return CheckResult("descent-is-transpose", True, f"{pairs} lift maps")


def _check_transitivity(max_order: int = 64, cap: int = 40000) -> CheckResult:
    pairs = 0
    for sym in lemma_corpus(max_order):
        form = form_of(sym)
        subs = isotropic_subgroups(form)
        for i, H in enumerate(subs):
            h_set = set(H.elements)
            for K in subs:
                if K.order <= H.order or not h_set <= set(K.elements):
                    continue
                if not check_transitivity(form, H, K):
                    return CheckResult("lift-transitivity", False,
                                       f"{sym}: {H.generators} in {K.generators}")
                pairs += 1
                if pairs >= cap:
                    return CheckResult("lift-transitivity", True,
                                       f"{pairs} nested pairs (capped)")
    return CheckResult("lift-transitivity", True, f"{pairs} nested pairs")


# ---------------------------------------------------------------------------
# suite registry
# ---------------------------------------------------------------------------

SUITES: dict[str, tuple[Callable[[], CheckResult], ...]] = {
    "relations": (_check_weil_relations, _check_conductor_independence,
                  _check_equivariance, _check_milgram),
    "lemmas": (_check_prime_order_spans, _check_two_lines_necessary,
               _check_pair_sufficient, _check_odd_p_iff,
               _check_graph_matches_algebra, _check_duality,
               _check_catalog_vs_search, _check_max_rank_formula,
               _check_tail_independence, _check_rank_seven_not_small),
    "constructions": (_check_kernel_vectors, _check_odd_cycles, _check_rank5,
                      _check_adjointness, _check_transitivity),
}


def run_suite(name: str, log=print) -> list[CheckResult]:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; "
                         f"choose from {sorted(SUITES)}")
    results = []
    for check in SUITES[name]:
        try:
            res = check()
        except DftError as exc:
            res = CheckResult(check.__name__.removeprefix("_check_")
                              .replace("_", "-"), False, f"{type(exc).__name__}: {exc}")
        results.append(res)
        if log:
            log(f"{'PASS' if res.passed else 'FAIL'} {res.name}: {res.detail}")
    return results
