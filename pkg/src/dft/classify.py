"""Small-type classification and the order-2 isotropy graph.

For odd primes the classification is by rank and shape of the level-p
part; for p = 2 the symbol is split as A + B, where A collects the
components containing anisotropic elements of order 2 (scale 2 of either
parity, odd parity at scale 4) and B the rest.  B of rank r < 3 and A in
the catalog D_{3-r} is the small-type condition; the primed catalogs
characterize the absence of an isotropic (Z/2Z)^3 and are kept separate
for the cross-check against explicit search.

The graph criterion: vertices are the elements of a 2-power-level form,
with an edge between gamma and beta when their difference is an
isotropic order-2 element orthogonal to both.  e^gamma lies in the lift
span exactly when gamma's connected component contains an odd cycle.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import bounds
from .errors import BoundExceeded, NotTwoAdic, ValidityError
from .fqm import DiscriminantForm, Element
from .ntheory import legendre, kronecker2, prime_power
from .symbols import EVEN, ODD, GenusSymbol

# ---------------------------------------------------------------------------
# catalogs for p = 2
# ---------------------------------------------------------------------------


def _two_adic_split(part: GenusSymbol):
    """(scale-2 component or None, odd scale-4 component or None, B-rank)."""
    c2 = o4 = None
    b_rank = 0
    for c in part.components:
        if c.prime != 2:
            raise ValidityError("2-adic split applied to an odd-prime part")
        if c.scale_exp == 1:
            c2 = c
        elif c.scale_exp == 2 and c.parity == ODD:
            o4 = c
        else:
            b_rank += c.rank
    return c2, o4, b_rank


def _sign_e8_is_one(t: int, sign: int) -> bool:
    # sign * e(t/8) == 1 iff (sign=+1, t=0) or (sign=-1, t=4) mod 8
    return (sign == 1 and t % 8 == 0) or (sign == -1 and t % 8 == 4)


def _catalog_d1(c2, o4) -> Optional[str]:
    if c2 is None and o4 is None:
        return "D1:0"
    if o4 is None:
        if c2.parity == EVEN:
            return "D1:2_II^-2" if (c2.rank, c2.sign) == (2, -1) else None
        n, t, s = c2.rank, c2.oddity, c2.sign
        if n == 1:
            return "D1:2_t^e1"
        if n == 2 and t % 4 == 2:
            return "D1:2_t^e2,t=2mod4"
        if n == 3 and s * kronecker2(t) == -1:
            return "D1:2_t^e3,e(t|2)=-1"
        return None
    if o4.rank == 1:
        if c2 is None:
            return "D1:4_t^e1"
        if c2.parity == ODD and c2.rank == 1:
            return "D1:2_t^e1.4_s^e1"
    return None


def _catalog_d2(c2, o4, primed: bool) -> Optional[str]:
    tag = "D2'" if primed else "D2"
    if c2 is None and o4 is None:
        return f"{tag}:0"
    if o4 is None:
        if c2.parity == EVEN:
            if (c2.rank, abs(c2.sign)) == (2, 1):
                return f"{tag}:2_II^e2"
            if primed and (c2.rank, c2.sign) == (4, -1):
                return f"{tag}:2_II^-4"
            return None
        n, t, s = c2.rank, c2.oddity, c2.sign
        if n <= 3:
            return f"{tag}:2_t^en,n<=3"
        if n == 4 and not _sign_e8_is_one(t, s):
            return f"{tag}:2_t^e4,e*e(t/8)!=1"
        if primed and n == 5 and s * kronecker2(t) == -1:
            return f"{tag}:2_t^e5,e(t|2)=-1"
        return None
    if o4.rank == 1:
        if c2 is None:
            return f"{tag}:4_s^e1"
        if c2.parity == EVEN and c2.rank == 2:
            return f"{tag}:2_II^e2.4_s^e1"
        if c2.parity == ODD and c2.rank <= 3:
            return f"{tag}:2_t^en.4_s^e1,n<=3"
        return None
    if o4.rank == 2:
        if c2 is None:
            return f"{tag}:4_s^e2"
        if c2.parity == ODD and c2.rank == 1:
            return f"{tag}:2_t^e1.4_s^e2"
    return None


def _catalog_d3(c2, o4, primed: bool) -> Optional[str]:
    tag = "D3'" if primed else "D3"
    if c2 is None and o4 is None:
        return f"{tag}:0"
    if o4 is None:
        if c2.parity == EVEN:
            if c2.rank in (2, 4):
                return f"{tag}:2_II^e{c2.rank}"
            if primed and (c2.rank, c2.sign) == (6, -1):
                return f"{tag}:2_II^-6"
            return None
        n, t, s = c2.rank, c2.oddity, c2.sign
        if n <= 5:
            return f"{tag}:2_t^en,n<=5"
        if n == 6:
            if primed:
                if not _sign_e8_is_one(t, s):
                    return f"{tag}:2_t^e6,e*e(t/8)!=1"
            elif t % 4 == 2:
                return f"{tag}:2_t^e6,t=2mod4"
            return None
        if primed and n == 7 and s * kronecker2(t) == -1:
            return f"{tag}:2_t^e7,e(t|2)=-1"
        return None
    if o4.rank == 1:
        if c2 is None:
            return f"{tag}:4_s^e1"
        if c2.parity == EVEN and c2.rank in (2, 4):
            return f"{tag}:2_II^e{c2.rank}.4_s^e1"
        if c2.parity == ODD and c2.rank <= 5:
            return f"{tag}:2_t^en.4_s^e1,n<=5"
        return None
    if o4.rank == 2:
        if c2 is None:
            return f"{tag}:4_s^e2"
        if c2.parity == EVEN and c2.rank == 2:
            return f"{tag}:2_II^e2.4_s^e2"
        if c2.parity == ODD and c2.rank <= 3:
            return f"{tag}:2_t^en.4_s^e2,n<=3"
        return None
    if o4.rank == 3:
        if c2 is None:
            return f"{tag}:4_s^e3"
        if c2.parity == ODD and c2.rank == 1:
            return f"{tag}:2_t^e1.4_s^e3"
    return None


def _catalog_match(index: int, c2, o4, primed: bool) -> Optional[str]:
    if index == 1:
        return _catalog_d1(c2, o4)
    if index == 2:
        return _catalog_d2(c2, o4, primed)
    if index == 3:
        return _catalog_d3(c2, o4, primed)
    raise ValueError(f"no catalog D_{index}")


# ---------------------------------------------------------------------------
# small type
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SmallTypeVerdict:
    small: bool
    rule: str
    per_prime: dict

    def __bool__(self):
        return self.small


def _odd_part_rule(p: int, part: GenusSymbol) -> Optional[str]:
    rank = part.rank_of_prime(p)
    if rank <= 2:
        return f"p{p}:rank<=2"
    level_p = [c for c in part.components if c.scale_exp == 1]
    if rank == 3:
        return f"p{p}:rank3,level-p-component" if level_p else None
    eps = legendre(-1, p)
    if rank == 4:
        higher = sum(c.rank for c in part.components if c.scale_exp >= 2)
        if higher > 2:
            return None
        if higher == 2:
            ok = (len(level_p) == 1 and level_p[0].rank == 2
                  and level_p[0].sign == -eps)
            return f"p{p}:rank4,-e2+two-lines" if ok else None
        # with at most one higher generator both level-p signs decompose
        return f"p{p}:rank4,-e2+two-lines"
    if rank == 5 and part.level == p:
        return f"p{p}:rank5,level-p"
    return None


def _two_part_rule(part: GenusSymbol) -> Optional[str]:
    c2, o4, b_rank = _two_adic_split(part)
    if b_rank >= 3:
        return None
    return _catalog_match(3 - b_rank, c2, o4, primed=False)


def small_type(sym: GenusSymbol) -> SmallTypeVerdict:
    """Decide small type from the symbol, prime part by prime part."""
    per_prime = {}
    small = True
    for p in sym.primes:
        part = sym.prime_part(p)
        rule = _two_part_rule(part) if p == 2 else _odd_part_rule(p, part)
        per_prime[p] = (rule is not None, rule or f"p{p}:none")
        small = small and rule is not None
    if not sym.primes:
        return SmallTypeVerdict(True, "rank<=2", {})
    rule = ";".join(r for _, r in per_prime.values())
    return SmallTypeVerdict(small, rule, per_prime)


def no_cube_catalog_check(sym: GenusSymbol) -> bool:
    """Catalog prediction for 'contains no isotropic (Z/pZ)^3'."""
    primes = sym.primes
    if not primes:
        return True
    if len(primes) > 1:
        raise ValidityError("catalog check requires a prime-power level symbol")
    p = primes[0]
    part = sym.prime_part(p)
    if p == 2:
        c2, o4, b_rank = _two_adic_split(part)
        if b_rank >= 3:
            return False
        return _catalog_match(3 - b_rank, c2, o4, primed=True) is not None
    if _odd_part_rule(p, part) is not None:
        return True
    rank = part.rank_of_prime(p)
    eps = legendre(-1, p)
    if rank == 5:
        higher = sum(c.rank for c in part.components if c.scale_exp >= 2)
        if higher > 1:
            return False
        if higher == 0:
            return True  # any level-p rank-5 form splits off a -4 block
        level_p = [c for c in part.components if c.scale_exp == 1]
        return (len(level_p) == 1 and level_p[0].rank == 4
                and level_p[0].sign == -1)
    if rank == 6:
        comps = part.components
        return (len(comps) == 1 and comps[0].scale_exp == 1
                and comps[0].sign == -eps)
    return False


def max_isotropic_rank(p: int, n: int, eps: int) -> int:
    """Rank of a maximal isotropic subgroup of the level-p form p^{eps*n}."""
    if p == 2:
        raise ValidityError("formula applies to odd primes")
    if n % 2 == 0:
        return n // 2 if eps == legendre(-1, p) ** (n // 2) else (n - 2) // 2
    return (n - 1) // 2


# ---------------------------------------------------------------------------
# explicit search for elementary isotropic subgroups
# ---------------------------------------------------------------------------


def contains_isotropic_elementary(form: DiscriminantForm, p: int, k: int) -> bool:
    """Search for an isotropic subgroup isomorphic to (Z/pZ)^k."""
    if form.order > bounds.max_span_order():
        raise BoundExceeded(f"|D| = {form.order} exceeds the span bound")
    if k == 0:
        return True
    qn = form.qnum_array()
    cand = []
    for i in np.nonzero(qn == 0)[0]:
        if i == 0:
            continue
        e = form.element(int(i))
        if form.element_order(e) == p:
            cand.append(int(i))
    if len(cand) < p ** k - 1:
        return False
    m = len(cand)
    orth = np.zeros((m, m), dtype=bool)
    for a in range(m):
        row = form.b_row_num(cand[a]) == 0
        orth[a] = row[cand]

    idx_of = {c: a for a, c in enumerate(cand)}
    zero = 0

    def extend(chosen, span_idx, mask, start):
        if len(chosen) == k:
            return True
        for a in range(start, m):
            if not mask[a]:
                continue
            c = cand[a]
            if c in span_idx:
                continue
            new_span = set(span_idx)
            arr = np.fromiter(span_idx, dtype=np.int64)
            x = c
            while x != zero:
                new_span.update(int(v) for v in form.add_index_vec(arr, x))
                x = int(form.add_index_vec(np.array([x]), c)[0])
            if extend(chosen + [a], new_span, mask & orth[a], a + 1):
                return True
        return False

    return extend([], {zero}, np.ones(m, dtype=bool), 0)


# ---------------------------------------------------------------------------
# the isotropy graph (p = 2)
# ---------------------------------------------------------------------------


class IsotropyGraph:
    """Vertices are the form's elements; edges join gamma to gamma + mu for
    isotropic order-2 mu orthogonal to gamma."""

    def __init__(self, form: DiscriminantForm):
        if any(p != 2 for p in prime_power_factors(form.level)):
            raise NotTwoAdic(f"level {form.level} is not a power of 2")
        if form.order > bounds.max_span_order():
            raise BoundExceeded(f"|D| = {form.order} exceeds the span bound")
        self.form = form
        n = form.order
        qn = form.qnum_array()
        neighbors: list[list[int]] = [[] for _ in range(n)]
        idx = np.arange(n)
        for i in np.nonzero(qn == 0)[0]:
            if i == 0:
                continue
            mu = form.element(int(i))
            if form.element_order(mu) != 2:
                continue
            mask = form.b_row_num(int(i)) == 0
            partners = form.add_index_vec(idx[mask], int(i))
            for a, c in zip(idx[mask], partners):
                neighbors[int(a)].append(int(c))
        self.neighbors = [sorted(set(ns)) for ns in neighbors]
        self._analyze()

    def _analyze(self):
        n = self.form.order
        comp = np.full(n, -1, dtype=np.int64)
        color = np.zeros(n, dtype=np.int64)
        parent = np.full(n, -1, dtype=np.int64)
        self.bipartite: list[bool] = []
        self.odd_cycles: dict[int, list[int]] = {}
        cid = 0
        for root in range(n):
            if comp[root] >= 0:
                continue
            comp[root] = cid
            color[root] = 0
            queue = deque([root])
            conflict = None
            while queue:
                u = queue.popleft()
                for w in self.neighbors[u]:
                    if comp[w] < 0:
                        comp[w] = cid
                        color[w] = color[u] ^ 1
                        parent[w] = u
                        queue.append(w)
                    elif color[w] == color[u] and conflict is None:
                        conflict = (u, w)
            self.bipartite.append(conflict is None)
            if conflict is not None:
                self.odd_cycles[cid] = self._trace_cycle(parent, *conflict)
            cid += 1
        self.component = comp
        self.color = color
        self.n_components = cid

    @staticmethod
    def _trace_cycle(parent, u, w):
        anc_u = [u]
        while parent[anc_u[-1]] >= 0:
            anc_u.append(int(parent[anc_u[-1]]))
        pos = {v: i for i, v in enumerate(anc_u)}
        path_w = [w]
        while path_w[-1] not in pos:
            path_w.append(int(parent[path_w[-1]]))
        lca = path_w[-1]
        cycle = anc_u[:pos[lca] + 1] + path_w[-2::-1]
        return cycle

    def component_of(self, gamma: Element) -> int:
        return int(self.component[self.form.index(gamma)])

    def is_nonbipartite_at(self, gamma: Element) -> bool:
        return not self.bipartite[self.component_of(gamma)]

    def odd_walk_through(self, gamma: Element) -> Optional[list[Element]]:
        """A closed walk of odd length through gamma, or None if bipartite."""
        cid = self.component_of(gamma)
        if self.bipartite[cid]:
            return None
        cycle = self.odd_cycles[cid]
        start = self.form.index(gamma)
        if start in cycle:
            at = cycle.index(start)
            walk = cycle[at:] + cycle[:at]
        else:
            path = self._bfs_path(start, cycle[0])
            walk = path + cycle[1:] + [cycle[0]] + path[-2:0:-1]
        return [self.form.element(i) for i in walk]

    def _bfs_path(self, src: int, dst: int) -> list[int]:
        prev = {src: None}
        queue = deque([src])
        while queue:
            u = queue.popleft()
            if u == dst:
                break
            for w in self.neighbors[u]:
                if w not in prev:
                    prev[w] = u
                    queue.append(w)
        path = [dst]
        while prev[path[-1]] is not None:
            path.append(prev[path[-1]])
        return path[::-1]


def prime_power_factors(n: int) -> tuple[int, ...]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return tuple(out)


def build_isotropy_graph(form: DiscriminantForm) -> IsotropyGraph:
    return IsotropyGraph(form)


def gamma_in_image_by_graph(form: DiscriminantForm, gamma: Element) -> bool:
    """Graph-side membership: gamma's component is not bipartite."""
    return build_graph_cached(form).is_nonbipartite_at(gamma)


def build_graph_cached(form: DiscriminantForm) -> IsotropyGraph:
    graph = getattr(form, "_isotropy_graph", None)
    if graph is None:
        graph = IsotropyGraph(form)
        form._isotropy_graph = graph
    return graph


def graph_to_dot(graph: IsotropyGraph) -> str:
    """DOT rendering: labels carry the coefficient vector and q-value,
    components are annotated, bipartite components are two-colored."""
    form = graph.form
    lines = ["graph isotropy {", "  node [style=filled];"]
    palette = ("lightblue", "khaki")
    for i, e in enumerate(form.elements):
        cid = int(graph.component[i])
        if graph.bipartite[cid]:
            fill = palette[int(graph.color[i])]
        else:
            fill = "salmon"
        label = f"{e} q={form.q(e)}"
        lines.append(f'  v{i} [label="{label}", comp={cid}, fillcolor={fill}];')
    for i, ns in enumerate(graph.neighbors):
        for j in ns:
            if i < j:
                lines.append(f"  v{i} -- v{j};")
    lines.append("}")
    return "\n".join(lines)
