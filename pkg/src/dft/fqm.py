"""Discriminant forms (finite quadratic modules) in exact arithmetic.

Forms come in two presentations sharing one interface:

* ``GeneratorForm`` -- built from a genus symbol out of fixed Jordan
  block models; elements are coefficient vectors against the build-order
  generators.
* ``TableForm`` -- element-table presented (quotients H_perp/H, p-parts,
  products); elements are canonical representative tuples and no
  generator recovery is attempted.

Values of q live in Q/Z as ``Fraction`` objects normalized to [0, 1).
The signature is extracted from the Gauss sum with an exact cyclotomic
certificate G^2 = |D| e(s/4); floating point only picks between the two
residues mod 8 the certificate leaves open.

Jordan block models (odd p, scale q = p^k): Z/q with q(x) = a x^2 / q,
one generator per unit a; all a = 1 except the last, which is the
smallest unit making the product of (2a|p) equal the component sign.
For p = 2, odd components use q(x) = a x^2 / 2q with the units from the
oddity decomposition search, and even components are sums of the plane
q(x,y) = xy/q (sign +1) and q(x,y) = (x^2+xy+y^2)/q (sign -1), the sign
carrier last.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm, prod
from typing import Callable, Iterable, NamedTuple, Optional, Sequence

import numpy as np

from . import cyclo
from .bounds import DEFAULT_NONDEG_ORDER
from .errors import (DegenerateForm, DimensionMismatch, NotIsotropic,
                     ValidityError)
from .ntheory import legendre
from .symbols import ODD, GenusSymbol, unit_decomposition

Element = tuple[int, ...]


def mod1(x: Fraction) -> Fraction:
    return Fraction(x.numerator % x.denominator, x.denominator)


class DiscriminantForm:
    """Shared interface; concrete storage lives in the subclasses."""

    _elements: tuple[Element, ...]

    def __init__(self):
        self._level: Optional[int] = None
        self._signature: Optional[int] = None
        self._qnum: Optional[np.ndarray] = None
        self._index_map: Optional[dict] = None

    # -- subclass obligations ------------------------------------------------

    def add(self, a: Element, b: Element) -> Element:
        raise NotImplementedError

    def neg(self, a: Element) -> Element:
        raise NotImplementedError

    def q(self, a: Element) -> Fraction:
        raise NotImplementedError

    # -- generic group structure ---------------------------------------------

    @property
    def order(self) -> int:
        return len(self._elements)

    @property
    def elements(self) -> tuple[Element, ...]:
        return self._elements

    @property
    def zero(self) -> Element:
        return self._elements[0]

    def index(self, a: Element) -> int:
        if self._index_map is None:
            self._index_map = {e: i for i, e in enumerate(self._elements)}
        try:
            return self._index_map[tuple(a)]
        except KeyError:
            raise DimensionMismatch(f"{a} is not an element of this form")

    def element(self, i: int) -> Element:
        return self._elements[i]

    def smul(self, k: int, a: Element) -> Element:
        k %= self.exponent_bound()
        acc = self.zero
        for _ in range(k):
            acc = self.add(acc, a)
        return acc

    def exponent_bound(self) -> int:
        return self.order

    def element_order(self, a: Element) -> int:
        k, acc = 1, a
        while acc != self.zero:
            acc = self.add(acc, a)
            k += 1
        return k

    def b(self, a: Element, c: Element) -> Fraction:
        return mod1(self.q(self.add(a, c)) - self.q(a) - self.q(c))

    # -- vectorized views (index space) ---------------------------------------

    def qnum_array(self) -> np.ndarray:
        """q numerators over the common denominator level(D)."""
        if self._qnum is None:
            L = self.level
            self._qnum = np.array(
                [int(self.q(e) * L) % L for e in self._elements], dtype=np.int64)
        return self._qnum

    def add_index_vec(self, indices: np.ndarray, j: int) -> np.ndarray:
        raise NotImplementedError

    def neg_index_vec(self, indices: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def b_row_num(self, i: int) -> np.ndarray:
        """Numerators of b(element(i), -) over the denominator level(D)."""
        L = self.level
        qn = self.qnum_array()
        col = self.add_index_vec(np.arange(self.order), i)
        return (qn[col] - qn[i] - qn) % L

    # -- invariants ------------------------------------------------------------

    @property
    def level(self) -> int:
        if self._level is None:
            self._level = lcm(*(self.q(e).denominator for e in self._elements)) \
                if self.order > 1 else 1
        return self._level

    @property
    def signature(self) -> int:
        if self._signature is None:
            self._signature = self._compute_signature()
        return self._signature

    def gauss_counts(self, M: Optional[int] = None) -> np.ndarray:
        """Multiplicities of e(q(gamma)) as powers of e(1/M)."""
        L = self.level
        M = M or L
        if M % L:
            raise ValueError("conductor must be a multiple of the level")
        counts = np.zeros(M, dtype=np.int64)
        np.add.at(counts, (self.qnum_array() * (M // L)) % M, 1)
        return counts

    def _compute_signature(self) -> int:
        n = self.order
        if n == 1:
            return 0
        N = self.level
        counts = self.gauss_counts()
        roots = np.exp(2j * np.pi * np.arange(N) / N)
        g = complex(np.dot(counts.astype(np.float64), roots))
        if abs(g) < 0.5:
            if cyclo.vanishes(N, counts):
                raise DegenerateForm("Gauss sum vanishes")
        s_float = (cmath.phase(g) * 4.0 / cmath.pi) % 8.0
        s = round(s_float) % 8
        if min(abs(s_float - s), abs(s_float - s - 8), abs(s_float - s + 8)) > 0.25:
            raise DegenerateForm(f"ambiguous Gauss sum argument {s_float}")
        if not milgram_vector_vanishes(N, counts, n, s):
            raise DegenerateForm(f"signature certificate failed for s={s}")
        return s

    def is_nondegenerate(self) -> bool:
        L = self.level
        n = self.order
        for i in range(1, n):
            if not self.b_row_num(i).any():
                return False
        return True

    def __repr__(self):
        return f"<{type(self).__name__} of order {self.order}>"


def milgram_vector_vanishes(N: int, counts: np.ndarray, n: int, s: int) -> bool:
    """Exact check of G^2 = n e(s/4) for G = sum counts[a] e(a/N)."""
    sq = np.convolve(counts, counts)
    vec = np.zeros(N, dtype=np.int64)
    np.add.at(vec, np.arange(len(sq)) % N, sq)
    if s % 2 == 0:
        vec[0] -= n if s % 4 == 0 else -n
    else:
        if N % 4:
            return False  # e(s/4) = +-i does not live in Q(zeta_N)
        vec[(s * (N // 4)) % N] -= n
    return cyclo.vanishes(N, vec)


def milgram_check(form: DiscriminantForm) -> bool:
    """Re-run the exact Gauss-sum certificate for the cached signature."""
    if form.order == 1:
        return form.signature == 0
    return milgram_vector_vanishes(form.level, form.gauss_counts(),
                                   form.order, form.signature)


# ---------------------------------------------------------------------------
# generator presentation
# ---------------------------------------------------------------------------

class GeneratorForm(DiscriminantForm):
    def __init__(self, orders: Sequence[int], qdiag: Sequence[Fraction],
                 gram: Sequence[Sequence[Fraction]], check: bool = True):
        super().__init__()
        self.orders = tuple(int(o) for o in orders)
        self.qdiag = tuple(mod1(Fraction(x)) for x in qdiag)
        self.gram = tuple(tuple(mod1(Fraction(x)) for x in row) for row in gram)
        m = len(self.orders)
        if len(self.qdiag) != m or len(self.gram) != m or any(
                len(r) != m for r in self.gram):
            raise ValidityError("generator data of inconsistent shape")
        n = prod(self.orders, start=1)
        self._n = n
        self._places = tuple(prod(self.orders[i + 1:], start=1) for i in range(m))
        self._coeffs: Optional[np.ndarray] = None
        self._elements_cache: Optional[tuple[Element, ...]] = None
        if check:
            self._check_consistency()

    def _check_consistency(self):
        for i, o in enumerate(self.orders):
            if mod1(2 * self.qdiag[i] - self.gram[i][i]) != 0:
                raise ValidityError("Gram diagonal must equal 2q")
            if mod1(o * o * self.qdiag[i]) != 0:
                raise ValidityError(f"q(g_{i}) incompatible with order {o}")
            for j, x in enumerate(self.gram[i]):
                if x != self.gram[j][i]:
                    raise ValidityError("Gram table must be symmetric")
                if mod1(o * x) != 0:
                    raise ValidityError("b value incompatible with generator order")
        if self._n <= DEFAULT_NONDEG_ORDER and not self.is_nondegenerate():
            raise DegenerateForm("built form is degenerate")

    # -- structure -------------------------------------------------------------

    @property
    def _elements(self) -> tuple[Element, ...]:  # type: ignore[override]
        if self._elements_cache is None:
            self._elements_cache = tuple(
                tuple(self.coeff_matrix()[i].tolist()) for i in range(self._n))
        return self._elements_cache

    @property
    def order(self) -> int:
        return self._n

    def coeff_matrix(self) -> np.ndarray:
        if self._coeffs is None:
            m = len(self.orders)
            idx = np.arange(self._n, dtype=np.int64)
            cols = [(idx // self._places[i]) % self.orders[i] for i in range(m)]
            self._coeffs = (np.stack(cols, axis=1) if m else
                            np.zeros((self._n, 0), dtype=np.int64))
        return self._coeffs

    def _reduce(self, a) -> Element:
        if len(a) != len(self.orders):
            raise DimensionMismatch(
                f"element of length {len(a)} in a rank-{len(self.orders)} form")
        return tuple(int(x) % o for x, o in zip(a, self.orders))

    def index(self, a: Element) -> int:
        a = self._reduce(a)
        return sum(x * p for x, p in zip(a, self._places))

    def element(self, i: int) -> Element:
        i = int(i)
        return tuple((i // p) % o for p, o in zip(self._places, self.orders))

    @property
    def zero(self) -> Element:
        return (0,) * len(self.orders)

    def add(self, a: Element, b: Element) -> Element:
        a, b = self._reduce(a), self._reduce(b)
        return tuple((x + y) % o for x, y, o in zip(a, b, self.orders))

    def neg(self, a: Element) -> Element:
        a = self._reduce(a)
        return tuple((-x) % o for x, o in zip(a, self.orders))

    def smul(self, k: int, a: Element) -> Element:
        a = self._reduce(a)
        return tuple((k * x) % o for x, o in zip(a, self.orders))

    def element_order(self, a: Element) -> int:
        a = self._reduce(a)
        return lcm(*(o // gcd(o, x) for x, o in zip(a, self.orders))) if a else 1

    # -- exact values ------------------------------------------------------------

    def q(self, a: Element) -> Fraction:
        a = self._reduce(a)
        total = Fraction(0)
        for i, x in enumerate(a):
            if x:
                total += x * x * self.qdiag[i]
        for i in range(len(a)):
            if a[i]:
                for j in range(i + 1, len(a)):
                    if a[j]:
                        total += a[i] * a[j] * self.gram[i][j]
        return mod1(total)

    def b(self, a: Element, c: Element) -> Fraction:
        a, c = self._reduce(a), self._reduce(c)
        total = Fraction(0)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(c):
                    if y:
                        total += x * y * self.gram[i][j]
        return mod1(total)

    # -- vectorized ---------------------------------------------------------------

    @property
    def level(self) -> int:
        if self._level is None:
            dens = [x.denominator for x in self.qdiag]
            dens += [x.denominator for row in self.gram for x in row]
            self._level = lcm(*dens) if dens else 1
        return self._level

    def _scaled_tables(self):
        L = self.level
        qn = np.array([int(x * L) for x in self.qdiag], dtype=np.int64)
        gn = np.array([[int(x * L) for x in row] for row in self.gram],
                      dtype=np.int64)
        return L, qn, gn

    def qnum_array(self) -> np.ndarray:
        if self._qnum is None:
            L, qn, gn = self._scaled_tables()
            C = self.coeff_matrix()
            total = (C * C) @ qn if len(self.orders) else np.zeros(1, np.int64)
            for i in range(len(self.orders)):
                for j in range(i + 1, len(self.orders)):
                    if gn[i][j]:
                        total = total + C[:, i] * C[:, j] * gn[i][j]
            self._qnum = total % L
        return self._qnum

    def b_row_num(self, i: int) -> np.ndarray:
        L, _, gn = self._scaled_tables()
        if not len(self.orders):
            return np.zeros(1, dtype=np.int64)
        C = self.coeff_matrix()
        vec = gn @ np.array(self.element(i), dtype=np.int64)
        return (C @ vec) % L

    def add_index_vec(self, indices: np.ndarray, j: int) -> np.ndarray:
        C = self.coeff_matrix()
        ej = np.array(self.element(j), dtype=np.int64)
        if not len(self.orders):
            return np.asarray(indices)
        digits = (C[indices] + ej) % np.array(self.orders, dtype=np.int64)
        return digits @ np.array(self._places, dtype=np.int64)

    def neg_index_vec(self, indices: np.ndarray) -> np.ndarray:
        C = self.coeff_matrix()
        if not len(self.orders):
            return np.asarray(indices)
        digits = (-C[indices]) % np.array(self.orders, dtype=np.int64)
        return digits @ np.array(self._places, dtype=np.int64)

    def is_nondegenerate(self) -> bool:
        L, _, gn = self._scaled_tables()
        if self.order == 1:
            return True
        C = self.coeff_matrix()
        B = (C @ gn @ C.T) % L
        return bool(np.all(B[1:].any(axis=1)))

    def __eq__(self, other):
        return (isinstance(other, GeneratorForm)
                and self.orders == other.orders
                and self.qdiag == other.qdiag
                and self.gram == other.gram)

    def __hash__(self):
        return hash((self.orders, self.qdiag))


# ---------------------------------------------------------------------------
# table presentation
# ---------------------------------------------------------------------------

class TableForm(DiscriminantForm):
    """Element-table presented form; elements are representative tuples."""

    def __init__(self, elements: Iterable[Element],
                 q_fn: Callable[[Element], Fraction],
                 add_fn: Callable[[Element, Element], Element],
                 neg_fn: Callable[[Element], Element],
                 check: bool = True):
        super().__init__()
        self._elements = tuple(sorted(tuple(e) for e in elements))
        self._qvals = tuple(mod1(Fraction(q_fn(e))) for e in self._elements)
        self._add_fn = add_fn
        self._neg_fn = neg_fn
        self._add_cols: dict[int, np.ndarray] = {}
        if check and self.order <= DEFAULT_NONDEG_ORDER:
            if not self.is_nondegenerate():
                raise DegenerateForm("table form is degenerate")

    def q(self, a: Element) -> Fraction:
        return self._qvals[self.index(a)]

    def add(self, a: Element, b: Element) -> Element:
        return self._add_fn(tuple(a), tuple(b))

    def neg(self, a: Element) -> Element:
        return self._neg_fn(tuple(a))

    def _add_col(self, j: int) -> np.ndarray:
        col = self._add_cols.get(j)
        if col is None:
            ej = self._elements[j]
            col = np.array([self.index(self.add(e, ej)) for e in self._elements],
                           dtype=np.int64)
            self._add_cols[j] = col
        return col

    def add_index_vec(self, indices: np.ndarray, j: int) -> np.ndarray:
        return self._add_col(j)[np.asarray(indices)]

    def neg_index_vec(self, indices: np.ndarray) -> np.ndarray:
        neg = np.array([self.index(self.neg(e)) for e in self._elements],
                       dtype=np.int64)
        return neg[np.asarray(indices)]

    @property
    def level(self) -> int:
        if self._level is None:
            self._level = lcm(*(x.denominator for x in self._qvals)) \
                if self._qvals else 1
        return self._level


# ---------------------------------------------------------------------------
# subgroups
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Subgroup:
    elements: tuple[Element, ...]   # sorted, closed under addition and negation
    generators: tuple[Element, ...]

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, e) -> bool:
        return tuple(e) in set(self.elements)


def _closure(form: DiscriminantForm, gens: Iterable[Element]) -> set[Element]:
    seen = {form.zero}
    frontier = [form.zero]
    gens = [tuple(g) for g in gens]
    while frontier:
        e = frontier.pop()
        for g in gens:
            s = form.add(e, g)
            if s not in seen:
                seen.add(s)
                frontier.append(s)
    return seen


def _minimal_generators(form: DiscriminantForm,
                        elements: Sequence[Element]) -> tuple[Element, ...]:
    # greedy by decreasing element order; minimal for finite abelian groups
    remaining = sorted(elements, key=lambda e: (-form.element_order(e), e))
    gens: list[Element] = []
    span = {form.zero}
    for e in remaining:
        if e in span:
            continue
        gens.append(e)
        span = _closure(form, gens)
        if len(span) == len(elements):
            break
    return tuple(gens)


def subgroup(form: DiscriminantForm, elements: Iterable[Element]) -> Subgroup:
    elts = sorted({tuple(e) for e in elements} | {form.zero})
    elt_set = set(elts)
    gens = _minimal_generators(form, elts)
    for e in elts:
        for g in gens:
            if form.add(e, g) not in elt_set:
                raise ValidityError("element set is not closed under addition")
    return Subgroup(tuple(elts), gens)


def subgroup_from_generators(form: DiscriminantForm,
                             gens: Iterable[Element]) -> Subgroup:
    elts = sorted(_closure(form, gens))
    return Subgroup(tuple(elts), _minimal_generators(form, elts))


def is_isotropic(form: DiscriminantForm, H: Subgroup) -> bool:
    return all(form.q(h) == 0 for h in H.elements)


def orthogonal_complement(form: DiscriminantForm, S) -> Subgroup:
    """All elements orthogonal to S (a Subgroup, one element, or a list)."""
    if isinstance(S, Subgroup):
        gens = S.generators
    elif S and isinstance(S[0], int):
        gens = [tuple(S)]
    else:
        gens = [tuple(e) for e in S]
    mask = np.ones(form.order, dtype=bool)
    for g in gens:
        mask &= form.b_row_num(form.index(g)) == 0
    elts = [form.element(i) for i in np.nonzero(mask)[0]]
    return Subgroup(tuple(sorted(elts)), _minimal_generators(form, elts))


# ---------------------------------------------------------------------------
# quotients, p-parts, direct sums
# ---------------------------------------------------------------------------

class QuotientResult(NamedTuple):
    form: TableForm
    project: Callable[[Element], Element]
    section: Callable[[Element], Element]


def quotient_form(form: DiscriminantForm, H: Subgroup) -> QuotientResult:
    """The form on H_perp/H for isotropic H, with projection and section."""
    if not is_isotropic(form, H):
        raise NotIsotropic("q does not vanish on H")
    perp = orthogonal_complement(form, H)
    perp_idx = np.array([form.index(e) for e in perp.elements], dtype=np.int64)
    stacked = np.stack([form.add_index_vec(perp_idx, form.index(h))
                        for h in H.elements])
    rep_idx = stacked.min(axis=0)
    canon = {int(i): int(r) for i, r in zip(perp_idx, rep_idx)}
    reps = sorted({form.element(int(r)) for r in rep_idx})

    def q_fn(e: Element) -> Fraction:
        return form.q(e)

    def add_fn(a: Element, b: Element) -> Element:
        return form.element(canon[form.index(form.add(a, b))])

    def neg_fn(a: Element) -> Element:
        return form.element(canon[form.index(form.neg(a))])

    quotient = TableForm(reps, q_fn, add_fn, neg_fn)

    def project(e: Element) -> Element:
        i = form.index(e)
        if i not in canon:
            raise DimensionMismatch("element is not orthogonal to H")
        return form.element(canon[i])

    def section(e: Element) -> Element:
        return quotient.element(quotient.index(e))

    return QuotientResult(quotient, project, section)


class PPartResult(NamedTuple):
    form: DiscriminantForm
    embed: Callable[[Element], Element]


def p_part(form: DiscriminantForm, p: int) -> PPartResult:
    """The p-part of the form together with its injection into the form."""
    if isinstance(form, GeneratorForm):
        keep = [i for i, o in enumerate(form.orders) if o % p == 0]
        sub = GeneratorForm([form.orders[i] for i in keep],
                            [form.qdiag[i] for i in keep],
                            [[form.gram[i][j] for j in keep] for i in keep])
        m = len(form.orders)

        def embed(e: Element) -> Element:
            out = [0] * m
            for pos, x in zip(keep, e):
                out[pos] = x
            return tuple(out)

        return PPartResult(sub, embed)
    nu = 0
    n = form.order
    while n % p == 0:
        n //= p
        nu += 1
    members = [e for e in form.elements
               if form.smul(p ** nu, e) == form.zero]
    sub = TableForm(members, form.q, form.add, form.neg)
    return PPartResult(sub, lambda e: e)


def direct_sum(d1: DiscriminantForm, d2: DiscriminantForm) -> DiscriminantForm:
    if isinstance(d1, GeneratorForm) and isinstance(d2, GeneratorForm):
        m1, m2 = len(d1.orders), len(d2.orders)
        gram = [[Fraction(0)] * (m1 + m2) for _ in range(m1 + m2)]
        for i in range(m1):
            for j in range(m1):
                gram[i][j] = d1.gram[i][j]
        for i in range(m2):
            for j in range(m2):
                gram[m1 + i][m1 + j] = d2.gram[i][j]
        return GeneratorForm(d1.orders + d2.orders, d1.qdiag + d2.qdiag, gram)
    split = len(d1.elements[0])

    def q_fn(e: Element) -> Fraction:
        return mod1(d1.q(e[:split]) + d2.q(e[split:]))

    def add_fn(a: Element, b: Element) -> Element:
        return d1.add(a[:split], b[:split]) + d2.add(a[split:], b[split:])

    def neg_fn(a: Element) -> Element:
        return d1.neg(a[:split]) + d2.neg(a[split:])

    elements = [e1 + e2 for e1 in d1.elements for e2 in d2.elements]
    return TableForm(elements, q_fn, add_fn, neg_fn)


# ---------------------------------------------------------------------------
# building from symbols
# ---------------------------------------------------------------------------

def _odd_prime_units(p: int, rank: int, sign: int) -> list[int]:
    base = legendre(2, p)
    units = [1] * rank
    target = sign * base ** (rank - 1)
    a = 1
    while legendre(2 * a, p) != target:
        a += 1
        if a % p == 0:
            a += 1
    units[-1] = a
    return units


def build_form(sym: GenusSymbol) -> GeneratorForm:
    """Realize a genus symbol by explicit Jordan block models."""
    orders: list[int] = []
    qdiag: list[Fraction] = []
    blocks: list[list[list[Fraction]]] = []
    for comp in sym.components:
        scale = comp.scale
        if comp.prime != 2:
            for a in _odd_prime_units(comp.prime, comp.rank, comp.sign):
                orders.append(scale)
                qdiag.append(mod1(Fraction(a, scale)))
                blocks.append([[mod1(Fraction(2 * a, scale))]])
        elif comp.parity == ODD:
            units = unit_decomposition(comp.rank, comp.oddity, comp.sign)
            for a in units:
                orders.append(scale)
                qdiag.append(mod1(Fraction(a, 2 * scale)))
                blocks.append([[mod1(Fraction(a, scale))]])
        else:
            half = comp.rank // 2
            for i in range(half):
                minus = (comp.sign == -1 and i == half - 1)
                orders.extend([scale, scale])
                diag = mod1(Fraction(1, scale)) if minus else Fraction(0)
                qdiag.extend([diag, diag])
                dd = mod1(Fraction(2, scale)) if minus else Fraction(0)
                off = Fraction(1, scale)
                blocks.append([[dd, off], [off, dd]])
    m = len(orders)
    gram = [[Fraction(0)] * m for _ in range(m)]
    pos = 0
    for blk in blocks:
        w = len(blk)
        for i in range(w):
            for j in range(w):
                gram[pos + i][pos + j] = blk[i][j]
        pos += w
    return GeneratorForm(orders, qdiag, gram)


# functional aliases matching the operation names

def q_value(form: DiscriminantForm, gamma: Element) -> Fraction:
    return form.q(gamma)


def b_value(form: DiscriminantForm, gamma: Element, beta: Element) -> Fraction:
    return form.b(gamma, beta)


def signature(form: DiscriminantForm) -> int:
    return form.signature


def level(form: DiscriminantForm) -> int:
    return form.level


def order(form: DiscriminantForm) -> int:
    return form.order


def element_order(form: DiscriminantForm, gamma: Element) -> int:
    return form.element_order(gamma)
