"""Weil representation matrices in exact cyclotomic arithmetic.

rho(T) is diagonal with entries e(q(gamma)).  The S-generator is carried
in scale-balanced form: the matrix W with W[beta, gamma] =
e(-sign/8) e(-(gamma, beta)) represents the operator W / |D|^(1/2), and
every identity checked here is stated with an even total power of the
scale so that no square root is ever represented:

    W W* = |D| I
    W^2  = |D| e(-sign/4) P,   P: gamma -> -gamma
    ((W rho_T)^3)^2 = |D| W^4
    W_D U = |H| U W_{H_perp/H}  and  rho_T(D) U = U rho_T(H_perp/H)

All entries are roots of unity in Q(zeta_M), M = lcm(8, level); matrix
products are accumulated as integer coefficient tensors over Z/M and
compared via the exact divisibility test in :mod:`dft.cyclo`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

import numpy as np

from . import bounds, cyclo
from .errors import BoundExceeded, RelationFailed
from .fqm import DiscriminantForm, Subgroup, quotient_form
from .lifts import lift_matrix


def _conductor(form: DiscriminantForm) -> int:
    return lcm(8, form.level)


def rho_T(form: DiscriminantForm) -> np.ndarray:
    """The diagonal matrix of e(q(gamma)), as exact Cyclotomic entries."""
    M = _conductor(form)
    n = form.order
    out = np.empty((n, n), dtype=object)
    out[:] = cyclo.Cyclotomic.rational(M, 0)
    for i, e in enumerate(form.elements):
        out[i, i] = cyclo.Cyclotomic.root(M, int(form.q(e) * M))
    return out


def _t_exponents(form: DiscriminantForm, M: int) -> np.ndarray:
    L = form.level
    return (form.qnum_array() * (M // L)) % M


def _w_exponents(form: DiscriminantForm, M: int) -> np.ndarray:
    """Exponent matrix of W: row beta, column gamma."""
    L = form.level
    n = form.order
    phase = (-form.signature * (M // 8)) % M
    exps = np.empty((n, n), dtype=np.int64)
    for j in range(n):
        row = form.b_row_num(j) * (M // L)   # b(gamma_j, beta) for all beta
        exps[:, j] = (phase - row) % M
    return exps


@dataclass
class ScaledWeilMatrix:
    """W together with the tracked power of |D|: the operator is
    W / |D|^(scale_exp / 2).  Entries are single roots of unity, stored
    as an exponent matrix over conductor M."""

    conductor: int
    exponents: np.ndarray
    scale_exp: int
    group_order: int

    @property
    def shape(self):
        return self.exponents.shape

    def entry(self, i: int, j: int) -> cyclo.Cyclotomic:
        return cyclo.Cyclotomic.root(self.conductor, int(self.exponents[i, j]))

    def dense(self) -> np.ndarray:
        n, m = self.exponents.shape
        out = np.empty((n, m), dtype=object)
        for i in range(n):
            for j in range(m):
                out[i, j] = self.entry(i, j)
        return out

    def operator_dense(self) -> np.ndarray:
        """Exact operator matrix; needs an even scale exponent so the
        power of |D| folds into rational coefficients."""
        if self.scale_exp % 2:
            raise ValueError("odd scale exponent cannot be folded exactly")
        factor = Fraction(1, self.group_order ** (self.scale_exp // 2))
        return self.dense() * factor


def rho_S_scaled(form: DiscriminantForm) -> ScaledWeilMatrix:
    """sqrt(|D|) * rho(S): entries e(-sign/8) e(-(gamma, beta))."""
    M = _conductor(form)
    return ScaledWeilMatrix(M, _w_exponents(form, M), 1, form.order)


# ---------------------------------------------------------------------------
# exact tensor engine
# ---------------------------------------------------------------------------


def _one_hot(exps: np.ndarray, M: int) -> np.ndarray:
    n, m = exps.shape
    T = np.zeros((n, m, M), dtype=np.int64)
    ii, jj = np.meshgrid(np.arange(n), np.arange(m), indexing="ij")
    T[ii.ravel(), jj.ravel(), exps.ravel()] = 1
    return T


def _mono_mul_left(exps: np.ndarray, tensor: np.ndarray) -> np.ndarray:
    """(monomial matrix) @ (coefficient tensor)."""
    n, k = exps.shape
    out = np.zeros((n,) + tensor.shape[1:], dtype=tensor.dtype)
    for i in range(n):
        acc = out[i]
        for t in range(k):
            acc += np.roll(tensor[t], int(exps[i, t]), axis=-1)
    return out


def _int_mul_left(U: np.ndarray, tensor: np.ndarray) -> np.ndarray:
    """(integer matrix) @ (coefficient tensor)."""
    n, k = U.shape
    out = np.zeros((n,) + tensor.shape[1:], dtype=tensor.dtype)
    for t in range(k):
        col = U[:, t]
        nz = np.nonzero(col)[0]
        for i in nz:
            out[i] += col[i] * tensor[t]
    return out


def _mono_tensor_of_int(U: np.ndarray, M: int) -> np.ndarray:
    T = np.zeros(U.shape + (M,), dtype=np.int64)
    T[..., 0] = U
    return T


def _entry_label(form, mask):
    where = np.argwhere(mask)
    if not len(where):
        return None
    i, j = where[0]
    return (form.element(int(i)), form.element(int(j)))


def check_relations(form: DiscriminantForm, conductor: int | None = None) -> dict:
    """Exact verification of unitarity, the S-square law, and the braid
    relation in scale-balanced form.  Raises RelationFailed with the
    offending entry on any mismatch.

    The conductor may be any multiple of lcm(8, level); results do not
    depend on the choice."""
    n = form.order
    if n > bounds.max_cyclo_order():
        raise BoundExceeded(f"|D| = {n} exceeds the cyclotomic budget")
    M = conductor or _conductor(form)
    if M % _conductor(form):
        raise ValueError("conductor must be a multiple of lcm(8, level)")
    s = form.signature
    expT = _t_exponents(form, M)
    expW = _w_exponents(form, M)
    report = {}

    # (a) W W* = |D| I
    expWstar = (-expW.T) % M
    prod = _mono_mul_left(expW, _one_hot(expWstar, M))
    target = np.zeros_like(prod)
    target[np.arange(n), np.arange(n), 0] = n
    _require(form, "unitarity", M, prod, target, report)

    # (b) W^2 = |D| e(-sign/4) P with P the negation permutation
    w2 = _mono_mul_left(expW, _one_hot(expW, M))
    target = np.zeros_like(w2)
    neg = form.neg_index_vec(np.arange(n))
    target[np.arange(n), neg, (-s * (M // 4)) % M] = n
    _require(form, "s-square", M, w2, target, report)

    # (c) ((W rho_T)^3)^2 = |D| W^4
    expWT = (expW + expT[None, :]) % M
    x = _one_hot(expWT, M)
    for _ in range(5):
        x = _mono_mul_left(expWT, x)
    w4 = _one_hot(expW, M)
    for _ in range(3):
        w4 = _mono_mul_left(expW, w4)
    _require(form, "braid", M, x, n * w4, report)

    # Gauss-sum consistency at the matrix level: the first row of
    # W rho_T^{-1} sums to e(-sign/8) * conj(G); its square is |D| e(-sign/2)
    row = np.zeros(M, dtype=np.int64)
    np.add.at(row, (expW[0] - expT) % M, 1)
    sq = np.convolve(row, row)
    vec = np.zeros(M, dtype=np.int64)
    np.add.at(vec, np.arange(len(sq)) % M, sq)
    vec[(-s * (M // 2)) % M] -= n
    if not cyclo.vanishes(M, vec):
        raise RelationFailed("gauss-row", entry=None)
    report["gauss-row"] = True
    return report


def _require(form, name, M, got, want, report):
    mask = cyclo.tensor_nonzero_mask(M, got - want)
    if mask.any():
        raise RelationFailed(f"{name} failed", entry=_entry_label(form, mask))
    report[name] = True


def check_lift_equivariance(form: DiscriminantForm, H: Subgroup) -> bool:
    """Exact identities rho_T(D) U = U rho_T(D') and W_D U = |H| U W_{D'}
    for the lift matrix U along an isotropic subgroup H."""
    n = form.order
    if n > bounds.max_cyclo_order():
        raise BoundExceeded(f"|D| = {n} exceeds the cyclotomic budget")
    lm = lift_matrix(form, H)
    quot = lm.source
    U = lm.matrix()
    M = _conductor(form)
    expT_D = _t_exponents(form, M)
    L_q = quot.level
    expT_Q = (quot.qnum_array() * (M // L_q)) % M
    rows, cols = np.nonzero(U)
    if not np.array_equal(expT_D[rows] % M, expT_Q[cols] % M):
        raise RelationFailed("rho_T equivariance failed")

    expW_D = _w_exponents(form, M)
    phase_q = (-quot.signature * (M // 8)) % M
    nq = quot.order
    expW_Q = np.empty((nq, nq), dtype=np.int64)
    for j in range(nq):
        expW_Q[:, j] = (phase_q - quot.b_row_num(j) * (M // L_q)) % M
    left = _mono_mul_left(expW_D, _mono_tensor_of_int(U, M))
    right = H.order * _int_mul_left(U, _one_hot(expW_Q, M))
    if not cyclo.tensor_vanishes(M, left - right):
        mask = cyclo.tensor_nonzero_mask(M, left - right)
        raise RelationFailed("W equivariance failed",
                             entry=_entry_label(form, mask))
    return True
