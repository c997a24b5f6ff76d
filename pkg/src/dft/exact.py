"""Certified rank and kernel for collections of 0/1 indicator columns.

The columns to be spanned are supports (index tuples) in Z^n.  Rank is
computed by row reduction modulo a word-size prime; a full modular rank
already certifies full rational rank.  When the span is deficient, the
kernel of the transposed system is reconstructed from the modular RREF
by rational reconstruction and then *verified exactly* against every
column, which certifies the rank from both sides:

    rank_mod_p <= rank_Q <= n - #(verified independent kernel vectors).

Verification is the only gate; a wrong prime can cost time, never
correctness.  Pivot choices are deterministic, so bases and membership
vectors are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt, lcm

import numpy as np

# 20-bit primes: residue products summed over <= 4096 terms stay below
# 2^53, so block reduction can run through exact float64 matrix products.
PRIMES = (1048573, 1048571, 1048559, 1048549, 1048517,
          1048507, 1048447, 1048433, 1048423, 1048391)

_BLOCK = 512


@dataclass
class SpanResult:
    dim: int
    rank: int
    pivot_columns: tuple[int, ...]          # ids of a certified column basis
    kernel: tuple[dict[int, Fraction], ...]  # verified exact kernel basis
    membership: np.ndarray                   # bool[n]; e_i in the span

    @property
    def full(self) -> bool:
        return self.rank == self.dim


class _Echelon:
    """Reduced row echelon accumulator modulo p with unit pivots."""

    def __init__(self, n: int, p: int):
        self.n = n
        self.p = p
        self._store = np.zeros((min(n, 64), n), dtype=np.int64)
        self.pivcols: list[int] = []
        self.pivot_ids: list[int] = []

    @property
    def rank(self) -> int:
        return len(self.pivcols)

    @property
    def rows(self) -> np.ndarray:
        return self._store[:self.rank]

    def _append_row(self, row: np.ndarray) -> None:
        if self.rank == len(self._store):
            grown = np.zeros((min(self.n, 2 * len(self._store)), self.n),
                             dtype=np.int64)
            grown[:self.rank] = self._store[:self.rank]
            self._store = grown
        self._store[self.rank] = row

    def reduce(self, block: np.ndarray) -> np.ndarray:
        if self.rank:
            # exact: entries < 2^20, accumulation over <= 4096 terms < 2^53
            coef = block[:, self.pivcols].astype(np.float64)
            prod = coef @ self.rows.astype(np.float64)
            block = (block - prod.astype(np.int64)) % self.p
        return block % self.p

    def insert_block(self, block: np.ndarray, ids) -> None:
        p = self.p
        block = self.reduce(block)
        fresh: list[tuple[int, np.ndarray]] = []  # (pivcol, row) added here
        for row, cid in zip(block, ids):
            for c, r in fresh:
                if row[c]:
                    row = (row - row[c] * r) % p
            nz = np.nonzero(row)[0]
            if not len(nz):
                continue
            c = int(nz[0])
            row = (row * pow(int(row[c]), -1, p)) % p
            if self.rank:
                coef = self._store[:self.rank, c]
                hit = np.nonzero(coef)[0]
                if len(hit):
                    self._store[hit] = (
                        self._store[hit] - np.outer(coef[hit], row)) % p
            self._append_row(row)
            self.pivcols.append(c)
            self.pivot_ids.append(int(cid))
            fresh.append((c, row))
            if self.rank == self.n:
                return

    def kernel_residues(self):
        """Modular kernel basis: free column -> residue dict over pivcols."""
        free = [c for c in range(self.n) if c not in set(self.pivcols)]
        out = []
        for f in free:
            entries = {f: 1}
            col = self.rows[:, f]
            for r, c in enumerate(self.pivcols):
                if col[r]:
                    entries[c] = int((-col[r]) % self.p)
            out.append(entries)
        return out


def _rational_reconstruct(x: int, m: int):
    """n/d with n/d = x mod m and |n|, d <= sqrt(m/2), or None."""
    bound = isqrt(m // 2)
    a0, a1 = m, x % m
    b0, b1 = 0, 1
    while a1 > bound:
        q = a0 // a1
        a0, a1 = a1, a0 - q * a1
        b0, b1 = b1, b0 - q * b1
    if b1 == 0 or abs(b1) > bound or gcd(a1, b1) > 1:
        return None
    if b1 < 0:
        a1, b1 = -a1, -b1
    return Fraction(a1, b1)


def _columns_to_block(columns, n):
    block = np.zeros((len(columns), n), dtype=np.int64)
    for i, support in enumerate(columns):
        block[i, list(support)] = 1
    return block


def _run_echelon(n, columns, p, early_stop):
    ech = _Echelon(n, p)
    for start in range(0, len(columns), _BLOCK):
        chunk = columns[start:start + _BLOCK]
        block = _columns_to_block(chunk, n)
        ech.insert_block(block, range(start, start + len(chunk)))
        if early_stop and ech.rank == n:
            break
    return ech


def _verify_kernel(vector: dict[int, Fraction], columns) -> bool:
    den = 1
    for v in vector.values():
        den = lcm(den, v.denominator)
    ints = {i: int(v * den) for i, v in vector.items() if v}
    for support in columns:
        total = 0
        for i in support:
            total += ints.get(i, 0)
        if total:
            return False
    return True


def _crt_pair(r1, m1, r2, m2):
    # assumes gcd(m1, m2) = 1
    inv = pow(m1 % m2, -1, m2)
    t = ((r2 - r1) * inv) % m2
    return r1 + m1 * t


def span_of_indicator_columns(n: int, columns) -> SpanResult:
    """Certified span data for 0/1 columns given as sorted index tuples."""
    columns = list(columns)
    if not columns:
        kernel = tuple({i: Fraction(1)} for i in range(n))
        return SpanResult(n, 0, (), kernel,
                          np.zeros(n, dtype=bool))

    ech = _run_echelon(n, columns, PRIMES[0], early_stop=True)
    if ech.rank == n:
        return SpanResult(n, n, tuple(ech.pivot_ids), (),
                          np.ones(n, dtype=bool))

    # Deficient modulo the first prime (the early stop never fired, so the
    # run saw every column): reconstruct and verify the kernel.
    base = ech
    residues = base.kernel_residues()
    modulus = PRIMES[0]
    for extra in (None,) + PRIMES[1:]:
        if extra is not None:
            run = _run_echelon(n, columns, extra, early_stop=False)
            if run.rank == n:
                return SpanResult(n, n, tuple(run.pivot_ids), (),
                                  np.ones(n, dtype=bool))
            if run.pivcols == base.pivcols:
                new = run.kernel_residues()
                residues = [
                    {c: _crt_pair(old.get(c, 0), modulus, cur.get(c, 0), extra)
                     for c in set(old) | set(cur)}
                    for old, cur in zip(residues, new)]
                modulus *= extra
            elif run.rank > base.rank:
                base, residues, modulus = run, run.kernel_residues(), extra
            else:
                continue
        kernel = _reconstruct_kernel(residues, modulus, columns)
        if kernel is not None:
            rank = n - len(kernel)
            membership = np.ones(n, dtype=bool)
            for vec in kernel:
                for i in vec:
                    membership[i] = False
            return SpanResult(n, rank, tuple(base.pivot_ids), tuple(kernel),
                              membership)

    return _exact_fallback(n, columns)


def _reconstruct_kernel(residues, modulus, columns):
    kernel = []
    for res in residues:
        vec = {}
        for c, r in res.items():
            val = _rational_reconstruct(r, modulus)
            if val is None:
                return None
            if val:
                vec[c] = val
        if not _verify_kernel(vec, columns):
            return None
        kernel.append(vec)
    return tuple(kernel)


def _exact_fallback(n: int, columns) -> SpanResult:
    """Plain fraction-free RREF; only reached if every prime failed."""
    rows = [[Fraction(0)] * n for _ in range(0)]
    pivcols: list[int] = []
    pivot_ids: list[int] = []
    for cid, support in enumerate(columns):
        row = [Fraction(0)] * n
        for i in support:
            row[i] = Fraction(1)
        for r, c in zip(rows, pivcols):
            if row[c]:
                f = row[c]
                row = [x - f * y for x, y in zip(row, r)]
        piv = next((i for i, x in enumerate(row) if x), None)
        if piv is None:
            continue
        inv = 1 / row[piv]
        row = [x * inv for x in row]
        for r in rows:
            if r[piv]:
                f = r[piv]
                for i in range(n):
                    r[i] -= f * row[i]
        rows.append(row)
        pivcols.append(piv)
        pivot_ids.append(cid)
    free = [c for c in range(n) if c not in set(pivcols)]
    kernel = []
    for f in free:
        vec = {f: Fraction(1)}
        for r, c in zip(rows, pivcols):
            if r[f]:
                vec[c] = -r[f]
        kernel.append(vec)
    membership = np.ones(n, dtype=bool)
    for vec in kernel:
        for i in vec:
            membership[i] = False
    return SpanResult(n, len(pivcols), tuple(pivot_ids), tuple(kernel),
                      membership)
