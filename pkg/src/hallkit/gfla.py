"""
Dense linear algebra over small finite fields.

Field elements are the integers ``0..q-1``.  For ``q = p**k`` an element
``sum c_j p**j`` stands for the polynomial ``sum c_j t**j`` modulo a fixed
Conway polynomial, so the generator ``t`` is the integer ``p``.  All
arithmetic goes through precomputed tables, which makes it work unchanged
on numpy arrays of any shape (fancy indexing).

Matrices are plain 2-d numpy integer arrays; batches of matrices are 3-d
arrays whose leading axis is the batch.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

MAX_FIELD_SIZE = 16

#: Conway polynomials, lowest degree coefficient first, leading 1 omitted.
CONWAY = {
    4: (1, 1),  # t^2 + t + 1
    8: (1, 1, 0),  # t^3 + t + 1
    9: (2, 2),  # t^2 + 2t + 2
    16: (1, 1, 0, 0),  # t^4 + t + 1
}


class FieldError(ValueError):
    pass


def _prime_power(q: int) -> tuple[int, int] | None:
    if q < 2:
        return None
    p = next(d for d in range(2, q + 1) if q % d == 0)
    k, rest = 0, q
    while rest % p == 0:
        rest //= p
        k += 1
    return (p, k) if rest == 1 else None


@dataclass(frozen=True, eq=False)
class FieldSpec:
    """Arithmetic tables of GF(q)."""

    q: int
    p: int
    k: int
    add: np.ndarray = field(repr=False)
    mul: np.ndarray = field(repr=False)
    neg: np.ndarray = field(repr=False)
    inv: np.ndarray = field(repr=False)  # inv[0] is 0 by convention

    @property
    def sub(self) -> np.ndarray:
        return self.add[:, self.neg]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FieldSpec) and other.q == self.q

    def __hash__(self) -> int:
        return hash(("GF", self.q))

    def __reduce__(self):
        return (field_make, (self.q,))

    def from_int(self, n: int) -> int:
        """Image of the integer ``n`` under ``Z -> GF(q)``."""
        return n % self.p

    # numpy-level helpers ------------------------------------------------

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Matrix product; works on stacked (batched) operands too."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.k == 1:
            return (a @ b) % self.p
        inner = a.shape[-1]
        shape = np.broadcast_shapes(a.shape[:-2], b.shape[:-2]) + (a.shape[-2], b.shape[-1])
        out = np.zeros(shape, dtype=np.int64)
        for j in range(inner):
            out = self.add[out, self.mul[a[..., :, j, None], b[..., None, j, :]]]
        return out

    def scale(self, c, a: np.ndarray) -> np.ndarray:
        return self.mul[c, np.asarray(a, dtype=np.int64)]

    def combine(self, coeffs: np.ndarray, basis: np.ndarray) -> np.ndarray:
        """``sum_j coeffs[..., j] * basis[j]`` for a stack of basis arrays."""
        coeffs = np.asarray(coeffs, dtype=np.int64)
        basis = np.asarray(basis, dtype=np.int64)
        extra = basis.ndim - 1
        out = np.zeros(coeffs.shape[:-1] + basis.shape[1:], dtype=np.int64)
        for j in range(basis.shape[0]):
            c = coeffs[..., j].reshape(coeffs.shape[:-1] + (1,) * extra)
            out = self.add[out, self.mul[c, basis[j]]]
        return out

    def matpow(self, a: np.ndarray, e: int) -> np.ndarray:
        """``a**e`` for square (possibly batched) matrices, ``e >= 1``."""
        result = None
        base = np.asarray(a, dtype=np.int64)
        while e:
            if e & 1:
                result = base if result is None else self.matmul(result, base)
            e >>= 1
            if e:
                base = self.matmul(base, base)
        return result

    def elements(self) -> range:
        return range(self.q)


@lru_cache(maxsize=None)
def field_make(q: int) -> FieldSpec:
    """Build GF(q) for a prime power ``q <= 16``."""
    pk = _prime_power(q)
    if pk is None:
        raise FieldError(f"field size {q} is not a prime power")
    if q > MAX_FIELD_SIZE:
        raise FieldError(f"field size {q} exceeds the supported maximum {MAX_FIELD_SIZE}")
    p, k = pk
    digits = [[(x // p**j) % p for j in range(k)] for x in range(q)]

    def encode(v: Sequence[int]) -> int:
        return sum(int(c) * p**j for j, c in enumerate(v))

    add = np.array(
        [[encode([(a + b) % p for a, b in zip(digits[x], digits[y])]) for y in range(q)] for x in range(q)],
        dtype=np.int64,
    )
    if k == 1:
        mul = np.array([[(x * y) % p for y in range(q)] for x in range(q)], dtype=np.int64)
    else:
        modulus = CONWAY[q]
        mul = np.zeros((q, q), dtype=np.int64)
        for x in range(q):
            for y in range(q):
                prod = [0] * (2 * k - 1)
                for i, a in enumerate(digits[x]):
                    for j, b in enumerate(digits[y]):
                        prod[i + j] = (prod[i + j] + a * b) % p
                # reduce t^m for m >= k using t^k = -sum modulus_j t^j
                for m in range(2 * k - 2, k - 1, -1):
                    c = prod[m]
                    if c:
                        prod[m] = 0
                        for j, mj in enumerate(modulus):
                            prod[m - k + j] = (prod[m - k + j] - c * mj) % p
                mul[x, y] = encode(prod[:k])
    neg = np.array([int(np.flatnonzero(add[x] == 0)[0]) for x in range(q)], dtype=np.int64)
    inv = np.zeros(q, dtype=np.int64)
    for x in range(1, q):
        hits = np.flatnonzero(mul[x] == 1)
        if len(hits) != 1:
            raise FieldError(f"element {x} of GF({q}) has no inverse")
        inv[x] = hits[0]
    for arr in (add, mul, neg, inv):
        arr.setflags(write=False)
    return FieldSpec(q=q, p=p, k=k, add=add, mul=mul, neg=neg, inv=inv)


def check_field_axioms(F: FieldSpec) -> bool:
    """Exhaustive check of the field axioms on the tables."""
    e = np.arange(F.q)
    A, M = F.add, F.mul
    a, b, c = np.meshgrid(e, e, e, indexing="ij")
    return bool(
        (A[a, b] == A[b, a]).all()
        and (M[a, b] == M[b, a]).all()
        and (A[A[a, b], c] == A[a, A[b, c]]).all()
        and (M[M[a, b], c] == M[a, M[b, c]]).all()
        and (M[a, A[b, c]] == A[M[a, b], M[a, c]]).all()
        and (A[e, 0] == e).all()
        and (M[e, 1] == e).all()
        and (A[e, F.neg] == 0).all()
        and (M[e[1:], F.inv[1:]] == 1).all()
    )


# ---------------------------------------------------------------------------
# elimination


def rref(m, F: FieldSpec) -> tuple[np.ndarray, int, list[int]]:
    """Reduced row echelon form, rank and pivot columns."""
    R = np.array(m, dtype=np.int64, copy=True)
    if R.ndim != 2:
        R = R.reshape(0, 0) if R.size == 0 else R.reshape(1, -1)
    rows, cols = R.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(R[r:, c])
        if len(nz) == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            R[[r, piv]] = R[[piv, r]]
        R[r] = F.mul[F.inv[R[r, c]], R[r]]
        others = np.flatnonzero(R[:, c])
        others = others[others != r]
        if len(others):
            factors = F.neg[R[others, c]]
            R[others] = F.add[R[others], F.mul[factors[:, None], R[r][None, :]]]
        pivots.append(c)
        r += 1
    return R, r, pivots


def rank(m, F: FieldSpec) -> int:
    if np.size(m) == 0:
        return 0
    return rref(m, F)[1]


@dataclass(frozen=True)
class SubspaceBasis:
    """A subspace of ``GF(q)^ambient_dim``, stored as its canonical RREF basis."""

    ambient_dim: int
    basis: tuple[tuple[int, ...], ...]

    @classmethod
    def from_rows(cls, rows, ambient_dim: int, F: FieldSpec) -> "SubspaceBasis":
        rows = np.asarray(rows, dtype=np.int64)
        rows = rows.reshape(len(rows) if rows.ndim > 1 else rows.size // max(ambient_dim, 1), ambient_dim)
        R, r, _ = rref(rows, F)
        return cls(ambient_dim, tuple(tuple(int(x) for x in row) for row in R[:r]))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def matrix(self) -> np.ndarray:
        return np.array(self.basis, dtype=np.int64).reshape(self.dim, self.ambient_dim)

    def pivots(self) -> list[int]:
        return [next(j for j, x in enumerate(row) if x) for row in self.basis]


def kernel_basis(m, F: FieldSpec) -> SubspaceBasis:
    """Basis of the right null space ``{x : m x = 0}``."""
    m = np.asarray(m, dtype=np.int64)
    cols = m.shape[1]
    if m.shape[0] == 0:
        return SubspaceBasis.from_rows(np.eye(cols, dtype=np.int64), cols, F)
    R, r, pivots = rref(m, F)
    free = [c for c in range(cols) if c not in pivots]
    vecs = []
    for f in free:
        v = np.zeros(cols, dtype=np.int64)
        v[f] = 1
        for i, pc in enumerate(pivots):
            v[pc] = F.neg[R[i, f]]
        vecs.append(v)
    return SubspaceBasis.from_rows(np.array(vecs, dtype=np.int64).reshape(len(vecs), cols), cols, F)


def nullspace_rows(m, F: FieldSpec) -> np.ndarray:
    """Kernel basis as an array of row vectors, in the order of free columns."""
    m = np.asarray(m, dtype=np.int64)
    cols = m.shape[1]
    if m.shape[0] == 0:
        return np.eye(cols, dtype=np.int64)
    R, r, pivots = rref(m, F)
    pivset = set(pivots)
    free = [c for c in range(cols) if c not in pivset]
    out = np.zeros((len(free), cols), dtype=np.int64)
    for n, f in enumerate(free):
        out[n, f] = 1
        for i, pc in enumerate(pivots):
            out[n, pc] = F.neg[R[i, f]]
    return out


def solve_left(basis_rows: np.ndarray, pivots: list[int], v: np.ndarray) -> np.ndarray:
    """Coordinates of ``v`` in an RREF basis (``v`` assumed to lie in the span)."""
    return np.asarray(v, dtype=np.int64)[..., pivots]


# ---------------------------------------------------------------------------
# subspace enumeration


def gaussian_binomial(n: int, k: int, q: int) -> int:
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (k - i) - 1
    return num // den


def enumerate_subspaces(ambient_dim: int, sub_dim: int, F: FieldSpec) -> Iterator[SubspaceBasis]:
    """Every ``sub_dim``-dimensional subspace exactly once.

    Ordered by pivot set (lexicographic), then by the free RREF entries.
    """
    n, k = ambient_dim, sub_dim
    if k < 0 or k > n:
        return
    for pivots in itertools.combinations(range(n), k):
        free_slots = [(i, c) for i, pc in enumerate(pivots) for c in range(pc + 1, n) if c not in pivots]
        for values in itertools.product(range(F.q), repeat=len(free_slots)):
            rows = [[0] * n for _ in range(k)]
            for i, pc in enumerate(pivots):
                rows[i][pc] = 1
            for (i, c), x in zip(free_slots, values):
                rows[i][c] = x
            yield SubspaceBasis(n, tuple(tuple(r) for r in rows))


def subspaces_between(lower: np.ndarray, upper: np.ndarray, k: int, F: FieldSpec) -> Iterator[np.ndarray]:
    """RREF bases of all ``k``-dim subspaces ``W`` with ``lower <= W <= upper``.

    ``lower`` and ``upper`` are row-basis arrays of the same ambient space with
    ``span(lower) <= span(upper)``.
    """
    n = upper.shape[1] if upper.ndim == 2 else lower.shape[1]
    if n == 0:
        if k == 0:
            yield np.zeros((0, 0), dtype=np.int64)
        return
    L, lo, _ = rref(lower.reshape(-1, n), F)
    L = L[:lo]
    if k < lo:
        return
    # extend the lower basis to a basis of the upper space
    U, up, _ = rref(upper.reshape(-1, n), F)
    U = U[:up]
    if k > up:
        return
    ext = []
    cur = L.copy()
    cur_rank = lo
    for row in U:
        trial = np.vstack([cur, row[None, :]]) if cur.size else row[None, :]
        r = rank(trial, F)
        if r > cur_rank:
            cur = trial
            cur_rank = r
            ext.append(row)
    ext = np.array(ext, dtype=np.int64).reshape(-1, n)
    m = len(ext)
    for sub in enumerate_subspaces(m, k - lo, F):
        coords = sub.matrix()
        extra = F.matmul(coords, ext) if len(coords) else np.zeros((0, n), dtype=np.int64)
        rows = np.vstack([L, extra]) if len(L) else extra
        R, r, _ = rref(rows, F)
        yield R[:r]


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64)


def gl_order(n: int, q: int) -> int:
    out = 1
    for i in range(n):
        out *= q**n - q**i
    return out


def invertible_mask(mats: np.ndarray, F: FieldSpec) -> np.ndarray:
    """Which matrices of a stack ``(B, n, n)`` are invertible."""
    mats = np.asarray(mats, dtype=np.int64)
    n = mats.shape[-1]
    if n == 0:
        return np.ones(mats.shape[0], dtype=bool)
    power = fitting_power(n, F.q)
    pw = F.matpow(mats, power)
    return (pw == identity(n)).all(axis=(-2, -1))


def fitting_power(n: int, q: int) -> int:
    """An exponent ``m`` with ``g**m`` idempotent for every n x n matrix ``g``.

    ``m >= n`` kills the nilpotent Fitting part and ``|GL(n, q)|`` divides ``m``
    so the invertible part becomes the identity.
    """
    return max(n, 1) * gl_order(max(n, 1), q)
