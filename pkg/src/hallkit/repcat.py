"""
Representations of a quiver with relations over GF(q).

The `RepCategory` object owns the classified isomorphism tables.  A table at
dimension vector ``d`` is assembled from its indecomposables (Krull-Schmidt):
every decomposable class is a multiset of indecomposables of smaller
dimension.  Indecomposables at ``d`` are found among the middle terms of
extensions ``0 -> S_i -> X -> Y -> 0`` with ``S_i`` a vertex simple and ``Y``
running over the table at ``d - e_i``; this reaches every class whenever all
representations are nilpotent.  Brute-force enumeration of all arrow-matrix
tuples is kept as a second strategy (and as a test oracle).

Endomorphisms are tested with Fitting powers: for ``m = n * |GL(n, q)|`` the
power ``g**m`` is the idempotent projecting onto the invertible part of ``g``.
So ``g`` is a unit iff ``g**m = 1``, nilpotent iff ``g**m = 0``, and anything
else splits the module.
"""

from __future__ import annotations

import itertools
import logging
import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from . import gfla
from .gfla import FieldSpec
from .quiver import (
    DimVector,
    QuiverPresentation,
    SubcategorySpec,
    add_dims,
    format_dim,
    is_path_nilpotent,
    satisfies_relations,
    sub_dims,
)

log = logging.getLogger(__name__)

ClassId = tuple[DimVector, int]
DEFAULT_BUDGET = 2**24


class BudgetExceeded(RuntimeError):
    """An enumeration would exceed the configured budget."""


def class_id_str(cid: ClassId) -> str:
    return f"{format_dim(cid[0])}#{cid[1]}"


def parse_class_id(s: str) -> ClassId:
    d, _, k = s.strip().strip("[]").partition("#")
    if not k:
        raise ValueError(f"malformed class id {s!r}")
    return tuple(int(x) for x in d.split(".")), int(k)


# ---------------------------------------------------------------------------
# representations


@dataclass(frozen=True, eq=False)
class Representation:
    """Dimension vector plus one ``d_tgt x d_src`` matrix per arrow."""

    dim: DimVector
    mats: tuple[np.ndarray, ...]

    def key(self) -> bytes:
        return repr(self.dim).encode() + b"|" + b"|".join(m.astype(np.int8).tobytes() for m in self.mats)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Representation) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def to_json(self) -> list:
        return [m.tolist() for m in self.mats]

    @classmethod
    def from_json(cls, qv: QuiverPresentation, dim: Sequence[int], data: list) -> "Representation":
        mats = []
        for a, m in zip(qv.arrows, data):
            mats.append(np.array(m, dtype=np.int64).reshape(dim[a.tgt], dim[a.src]))
        return cls(tuple(dim), tuple(mats))


def make_rep(qv: QuiverPresentation, dim: Sequence[int], mats: dict | Sequence | None = None) -> Representation:
    """Build a representation; ``mats`` maps arrow labels (or positions) to nested lists."""
    dim = tuple(int(x) for x in dim)
    out = []
    for k, a in enumerate(qv.arrows):
        m = None
        if isinstance(mats, dict):
            m = mats.get(a.label)
        elif mats is not None:
            m = mats[k]
        shape = (dim[a.tgt], dim[a.src])
        if m is None:
            out.append(np.zeros(shape, dtype=np.int64))
        else:
            out.append(np.array(m, dtype=np.int64).reshape(shape))
    return Representation(dim, tuple(out))


def zero_rep(qv: QuiverPresentation) -> Representation:
    return make_rep(qv, qv.zero())


def simple_rep(qv: QuiverPresentation, i: int) -> Representation:
    return make_rep(qv, qv.simple_dim(i))


def direct_sum(qv: QuiverPresentation, reps: Sequence[Representation]) -> Representation:
    if not reps:
        return zero_rep(qv)
    dim = tuple(sum(r.dim[i] for r in reps) for i in range(qv.n))
    mats = []
    for k, a in enumerate(qv.arrows):
        m = np.zeros((dim[a.tgt], dim[a.src]), dtype=np.int64)
        r0 = c0 = 0
        for r in reps:
            h, w = r.dim[a.tgt], r.dim[a.src]
            m[r0:r0 + h, c0:c0 + w] = r.mats[k]
            r0 += h
            c0 += w
        mats.append(m)
    return Representation(dim, tuple(mats))


def is_valid(qv: QuiverPresentation, rep: Representation, F: FieldSpec) -> bool:
    for a, m in zip(qv.arrows, rep.mats):
        if m.shape != (rep.dim[a.tgt], rep.dim[a.src]):
            return False
        if m.size and (m.min() < 0 or m.max() >= F.q):
            return False
    return satisfies_relations(qv, rep.mats, rep.dim, F)


def transport(qv: QuiverPresentation, rep: Representation, g: Sequence[np.ndarray], F: FieldSpec) -> Representation:
    """The representation ``g . rep`` with arrows ``g_t M_a g_s^{-1}``."""
    ginv = [inverse(m, F) for m in g]
    mats = tuple(F.matmul(F.matmul(g[a.tgt], m), ginv[a.src]) for a, m in zip(qv.arrows, rep.mats))
    return Representation(rep.dim, mats)


def inverse(m: np.ndarray, F: FieldSpec) -> np.ndarray:
    n = m.shape[0]
    if n == 0:
        return m.copy()
    R, r, _ = gfla.rref(np.hstack([m, gfla.identity(n)]), F)
    if r < n or not (R[:, :n] == gfla.identity(n)).all():
        raise ValueError("matrix is singular")
    return R[:, n:]


# ---------------------------------------------------------------------------
# Hom spaces


@dataclass(frozen=True, eq=False)
class HomBasis:
    """Basis of Hom(M, N); ``flat`` stacks basis elements as vectors."""

    src: DimVector
    tgt: DimVector
    flat: np.ndarray  # (h, sum_i tgt_i * src_i)

    @property
    def dim(self) -> int:
        return self.flat.shape[0]

    def unflatten(self, v: np.ndarray) -> list[np.ndarray]:
        return _unflatten(v, self.src, self.tgt)

    @property
    def basis(self) -> list[list[np.ndarray]]:
        return [self.unflatten(v) for v in self.flat]


def _offsets(src: Sequence[int], tgt: Sequence[int]) -> list[int]:
    offs = [0]
    for s, t in zip(src, tgt):
        offs.append(offs[-1] + s * t)
    return offs


def _unflatten(v: np.ndarray, src: Sequence[int], tgt: Sequence[int]) -> list[np.ndarray]:
    offs = _offsets(src, tgt)
    return [v[..., offs[i]:offs[i + 1]].reshape(v.shape[:-1] + (tgt[i], src[i])) for i in range(len(src))]


def hom_basis(qv: QuiverPresentation, M: Representation, N: Representation, F: FieldSpec) -> HomBasis:
    """Solve ``g_t M_a = N_a g_s`` for all arrows ``a: s -> t``."""
    src, tgt = M.dim, N.dim
    offs = _offsets(src, tgt)
    unknowns = offs[-1]
    if unknowns == 0:
        return HomBasis(src, tgt, np.zeros((0, 0), dtype=np.int64))
    blocks = []
    for a, Ma, Na in zip(qv.arrows, M.mats, N.mats):
        s, t = a.src, a.tgt
        rows = tgt[t] * src[s]
        if rows == 0:
            continue
        block = np.zeros((rows, unknowns), dtype=np.int64)
        left = np.kron(gfla.identity(tgt[t]), Ma.T)  # g_t -> g_t M_a
        right = F.neg[np.kron(Na, gfla.identity(src[s]))]  # g_s -> -N_a g_s
        sl_t = slice(offs[t], offs[t + 1])
        sl_s = slice(offs[s], offs[s + 1])
        block[:, sl_t] = left
        block[:, sl_s] = F.add[block[:, sl_s], right]
        blocks.append(block)
    if not blocks:
        flat = gfla.identity(unknowns)
    else:
        flat = gfla.nullspace_rows(np.vstack(blocks), F)
    return HomBasis(src, tgt, flat)


def compose_flat(F: FieldSpec, g: np.ndarray, f: np.ndarray, a: Sequence[int], b: Sequence[int],
                 c: Sequence[int]) -> np.ndarray:
    """Flat vector of ``g o f`` for ``f: A -> B``, ``g: B -> C`` (dims a, b, c)."""
    fs = _unflatten(f, a, b)
    gs = _unflatten(g, b, c)
    parts = [F.matmul(gi, fi).reshape(f.shape[:-1] + (-1,)) for gi, fi in zip(gs, fs)]
    return np.concatenate(parts, axis=-1) if parts else np.zeros(f.shape[:-1] + (0,), dtype=np.int64)


def _iter_combinations(h: int, q: int, chunk: int = 4096) -> Iterator[np.ndarray]:
    """All coefficient vectors of length ``h`` over ``0..q-1`` in chunks."""
    total = q**h
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
        out = np.zeros((len(idx), h), dtype=np.int64)
        for j in range(h - 1, -1, -1):
            out[:, j] = idx % q
            idx //= q
        yield out


def _endo_kinds(F: FieldSpec, dim: Sequence[int], elems: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """For a stack of flat endomorphisms: (is_unit, is_nilpotent, fitting idempotents)."""
    n = max(dim) if dim else 0
    if n == 0:
        B = elems.shape[0]
        return np.ones(B, bool), np.ones(B, bool), elems
    power = gfla.fitting_power(n, F.q)
    blocks = _unflatten(elems, dim, dim)
    unit = np.ones(elems.shape[0], dtype=bool)
    nil = np.ones(elems.shape[0], dtype=bool)
    idem = []
    for d, blk in zip(dim, blocks):
        if d == 0:
            idem.append(blk.reshape(elems.shape[0], 0))
            continue
        e = F.matpow(blk, power)
        unit &= (e == gfla.identity(d)).all(axis=(-2, -1))
        nil &= (e == 0).all(axis=(-2, -1))
        idem.append(e.reshape(elems.shape[0], -1))
    return unit, nil, np.concatenate(idem, axis=-1)


def aut_order(qv: QuiverPresentation, M: Representation, F: FieldSpec, budget: int = DEFAULT_BUDGET) -> int:
    """Number of invertible endomorphisms, by exhaustive iteration over End(M)."""
    E = hom_basis(qv, M, M, F)
    if F.q ** E.dim > budget:
        raise BudgetExceeded(f"End(M) has {F.q}^{E.dim} points, above the budget {budget}")
    if E.dim == 0:
        return 1
    count = 0
    for coeffs in _iter_combinations(E.dim, F.q):
        elems = F.combine(coeffs, E.flat)
        unit, _, _ = _endo_kinds(F, M.dim, elems)
        count += int(unit.sum())
    return count


def is_indecomposable(qv: QuiverPresentation, M: Representation, F: FieldSpec,
                      budget: int = DEFAULT_BUDGET) -> bool:
    """End(M) is local: every endomorphism is invertible or nilpotent (exhaustive)."""
    if not any(M.dim):
        return False
    E = hom_basis(qv, M, M, F)
    if F.q ** E.dim > budget:
        raise BudgetExceeded(f"End(M) has {F.q}^{E.dim} points, above the budget {budget}")
    for coeffs in _iter_combinations(E.dim, F.q):
        unit, nil, _ = _endo_kinds(F, M.dim, F.combine(coeffs, E.flat))
        if not (unit | nil).all():
            return False
    return True


def is_isomorphic(qv: QuiverPresentation, M: Representation, N: Representation, F: FieldSpec,
                  budget: int = DEFAULT_BUDGET) -> bool:
    """Search Hom(M, N) exhaustively for an element invertible at every vertex."""
    if M.dim != N.dim:
        return False
    if not any(M.dim):
        return True
    H = hom_basis(qv, M, N, F)
    if H.dim == 0:
        return False
    if F.q ** H.dim > budget:
        raise BudgetExceeded(f"Hom(M, N) has {F.q}^{H.dim} points, above the budget {budget}")
    for coeffs in _iter_combinations(H.dim, F.q):
        elems = F.combine(coeffs, H.flat)
        ok = np.ones(elems.shape[0], dtype=bool)
        for d, blk in zip(M.dim, _unflatten(elems, M.dim, N.dim)):
            if d:
                ok &= gfla.invertible_mask(blk, F)
        if ok.any():
            return True
    return False


# ---------------------------------------------------------------------------
# sub- and quotient representations


def _image_basis(m: np.ndarray, F: FieldSpec) -> tuple[np.ndarray, list[int]]:
    """RREF row basis of the column space of ``m``."""
    R, r, piv = gfla.rref(m.T, F)
    return R[:r], piv[:r]


def restrict(qv: QuiverPresentation, rep: Representation, bases: Sequence[np.ndarray], F: FieldSpec) -> Representation:
    """Subrepresentation on subspaces given by RREF row bases (assumed closed)."""
    dim = tuple(b.shape[0] for b in bases)
    pivots = [_pivots(b) for b in bases]
    mats = []
    for a, m in zip(qv.arrows, rep.mats):
        Bs, Bt = bases[a.src], bases[a.tgt]
        if dim[a.src] == 0 or dim[a.tgt] == 0:
            mats.append(np.zeros((dim[a.tgt], dim[a.src]), dtype=np.int64))
            continue
        img = F.matmul(m, Bs.T)  # d_t x k_s
        mats.append(img[pivots[a.tgt], :])
    return Representation(dim, tuple(mats))


def quotient(qv: QuiverPresentation, rep: Representation, bases: Sequence[np.ndarray], F: FieldSpec) -> Representation:
    """Quotient by a closed subrepresentation; complement = non-pivot coordinates."""
    pivots = [_pivots(b) for b in bases]
    comps = [[j for j in range(rep.dim[i]) if j not in set(pivots[i])] for i in range(qv.n)]
    dim = tuple(len(c) for c in comps)
    mats = []
    for a, m in zip(qv.arrows, rep.mats):
        s, t = a.src, a.tgt
        V = m[:, comps[s]]
        if len(pivots[t]) and V.size:
            V = F.sub[V, F.matmul(bases[t].T, V[pivots[t], :])]
        mats.append(V[comps[t], :])
    return Representation(dim, tuple(mats))


def _pivots(b: np.ndarray) -> list[int]:
    return [int(np.flatnonzero(row)[0]) for row in b]


def _preimage_constraint(m: np.ndarray, B: np.ndarray, F: FieldSpec) -> np.ndarray:
    """Matrix whose kernel is ``{x : m x in span(B)}``."""
    piv = _pivots(B)
    comp = [j for j in range(m.shape[0]) if j not in set(piv)]
    red = m
    if len(piv):
        red = F.sub[m, F.matmul(B.T, m[piv, :])]
    return red[comp, :]


def _contains(big: np.ndarray, small: np.ndarray, F: FieldSpec) -> bool:
    if small.shape[0] == 0:
        return True
    return gfla.rank(np.vstack([big, small]), F) == gfla.rank(big, F)


def subrep_bases(qv: QuiverPresentation, X: Representation, e: Sequence[int], F: FieldSpec,
                 budget: int = DEFAULT_BUDGET) -> Iterator[list[np.ndarray]]:
    """All subrepresentations of ``X`` with dimension vector ``e`` (deterministic order)."""
    n = qv.n
    bound = 1
    for i in range(n):
        bound *= gfla.gaussian_binomial(X.dim[i], e[i], F.q)
    if bound > budget:
        raise BudgetExceeded(f"{bound} candidate subspace tuples exceed the budget {budget}")
    if bound == 0:
        return
    chosen: list[np.ndarray | None] = [None] * n

    def rec(v: int) -> Iterator[list[np.ndarray]]:
        if v == n:
            yield [c for c in chosen]  # type: ignore[misc]
            return
        dv = X.dim[v]
        lower_rows = []
        cons = []
        loops = []
        for a, m in zip(qv.arrows, X.mats):
            if a.src == a.tgt == v:
                loops.append(m)
            elif a.tgt == v and a.src < v:
                Bs = chosen[a.src]
                if Bs.shape[0] and dv:
                    lower_rows.append(F.matmul(m, Bs.T).T)
            elif a.src == v and a.tgt < v and dv:
                cons.append(_preimage_constraint(m, chosen[a.tgt], F))
        lower = np.vstack(lower_rows) if lower_rows else np.zeros((0, dv), dtype=np.int64)
        if cons:
            stacked = np.vstack(cons)
            upper = gfla.nullspace_rows(stacked, F) if stacked.shape[0] else gfla.identity(dv)
        else:
            upper = gfla.identity(dv)
        if lower.shape[0] and not _contains(upper, lower, F):
            return
        if dv == 0:
            chosen[v] = np.zeros((0, 0), dtype=np.int64)
            yield from rec(v + 1)
            return
        for W in gfla.subspaces_between(lower, upper, e[v], F):
            if loops and W.shape[0]:
                if not all(_contains(W, F.matmul(m, W.T).T, F) for m in loops):
                    continue
            chosen[v] = W
            yield from rec(v + 1)

    yield from rec(0)


# ---------------------------------------------------------------------------
# iso tables


@dataclass
class ClassRecord:
    cid: ClassId
    rep: Representation
    aut_order: int
    indecomposable: bool
    summands: tuple[ClassId, ...]  # sorted indecomposable summands (itself if indecomposable)
    end_dim: int
    residue_degree: int = 0  # dim End/rad End, indecomposables only

    @property
    def class_id(self) -> str:
        return class_id_str(self.cid)


@dataclass
class IsoTable:
    dim: DimVector
    classes: list[ClassRecord]
    by_sig: dict = field(default_factory=dict, repr=False)
    by_summands: dict = field(default_factory=dict, repr=False)

    def __len__(self) -> int:
        return len(self.classes)

    def __getitem__(self, k: int) -> ClassRecord:
        return self.classes[k]

    def ids(self) -> list[ClassId]:
        return [c.cid for c in self.classes]

    def indecomposables(self) -> list[ClassRecord]:
        return [c for c in self.classes if c.indecomposable]


def _enumerate_paths(qv: QuiverPresentation, max_len: int, limit: int = 64) -> list[tuple[int, ...]]:
    paths = [(k,) for k in range(len(qv.arrows))]
    frontier = list(paths)
    for _ in range(max_len - 1):
        nxt = [(k,) + p for p in frontier for k in range(len(qv.arrows)) if qv.arrows[k].src == qv.arrows[p[0]].tgt]
        paths.extend(nxt)
        frontier = nxt
        if len(paths) >= limit:
            break
    return paths[:limit]


class RepCategory:
    """Classified representations of one quiver with relations over one field."""

    def __init__(
        self,
        qv: QuiverPresentation,
        F: FieldSpec,
        sub: SubcategorySpec | None = None,
        budget: int = DEFAULT_BUDGET,
        strategy: str = "auto",
        store=None,
    ):
        self.qv = qv
        self.F = F
        self.sub = sub or SubcategorySpec()
        self.budget = budget
        self.store = store
        if strategy == "auto":
            strategy = "extension" if is_path_nilpotent(qv, F) else "exhaustive"
        if strategy not in {"extension", "exhaustive"}:
            raise ValueError(f"unknown strategy {strategy!r}")
        self.strategy = strategy
        self._tables: dict[DimVector, IsoTable] = {}
        self._profiles: dict[tuple[ClassId, DimVector], dict] = {}
        self._homdim: dict[tuple[ClassId, ClassId], int] = {}
        self._paths = _enumerate_paths(qv, 4)
        self._pairs = [
            (p, r) for p, r in itertools.combinations([p for p in self._paths if len(p) <= 2], 2)
            if qv.arrows[p[-1]].src == qv.arrows[r[-1]].src and qv.arrows[p[0]].tgt == qv.arrows[r[0]].tgt
        ][:32]

    # -- invariants ---------------------------------------------------------

    def signature(self, rep: Representation) -> tuple:
        F, qv = self.F, self.qv
        d = rep.dim
        out: list = [d]
        for i in range(qv.n):
            outs = [m for a, m in zip(qv.arrows, rep.mats) if a.src == i]
            ins = [m for a, m in zip(qv.arrows, rep.mats) if a.tgt == i]
            out.append(gfla.rank(np.vstack(outs), F) if outs and d[i] else 0)
            out.append(gfla.rank(np.hstack(ins), F) if ins and d[i] else 0)
        pm = {}
        for p in self._paths:
            s, t = qv.arrows[p[-1]].src, qv.arrows[p[0]].tgt
            if d[s] == 0 or d[t] == 0:
                continue
            m = rep.mats[p[-1]]
            for k in reversed(p[:-1]):
                m = F.matmul(rep.mats[k], m)
            pm[p] = m
            out.append(gfla.rank(m, F))
        for p, r in self._pairs:
            if p not in pm or r not in pm:
                continue
            for lam in range(1, F.q):
                out.append(gfla.rank(F.add[pm[p], F.mul[lam, pm[r]]], F))
        return tuple(out)

    # -- hom helpers --------------------------------------------------------

    def hom(self, M: Representation, N: Representation) -> HomBasis:
        return hom_basis(self.qv, M, N, self.F)

    def hom_dim_classes(self, a: ClassId, b: ClassId) -> int:
        key = (a, b)
        if key not in self._homdim:
            self._homdim[key] = self.hom(self.record(a).rep, self.record(b).rep).dim
        return self._homdim[key]

    def analyze_end(self, M: Representation) -> tuple[bool, int | np.ndarray, int]:
        """Return ``(True, aut_order, end_dim)`` for indecomposable ``M`` else ``(False, idempotent, end_dim)``.

        Looks for an endomorphism that is neither a unit nor nilpotent; its
        Fitting power is a nontrivial idempotent.  Basis elements are tried
        first, then every element (exhaustive, which also counts units), or
        pseudo-random elements when End(M) is too large to exhaust.
        """
        F = self.F
        E = self.hom(M, M)
        h = E.dim
        if h <= 1:
            return True, (F.q - 1) if h == 1 else 1, h
        unit, nil, idem = _endo_kinds(F, M.dim, E.flat)
        bad = ~(unit | nil)
        if bad.any():
            return False, idem[int(np.flatnonzero(bad)[0])], h
        if F.q**h <= min(self.budget, 2**22):
            units = 0
            for coeffs in _iter_combinations(h, F.q):
                unit, nil, idem = _endo_kinds(F, M.dim, F.combine(coeffs, E.flat))
                bad = ~(unit | nil)
                if bad.any():
                    return False, idem[int(np.flatnonzero(bad)[0])], h
                units += int(unit.sum())
            return True, units, h
        rng = np.random.default_rng(h * 7919 + sum(M.dim))
        for _ in range(16):
            coeffs = rng.integers(0, F.q, size=(1024, h))
            unit, nil, idem = _endo_kinds(F, M.dim, F.combine(coeffs, E.flat))
            bad = ~(unit | nil)
            if bad.any():
                return False, idem[int(np.flatnonzero(bad)[0])], h
        raise BudgetExceeded(f"cannot decide indecomposability: End has {F.q}^{h} points")

    def split(self, M: Representation, idem: np.ndarray) -> tuple[Representation, Representation]:
        F = self.F
        es = _unflatten(idem, M.dim, M.dim)
        im1, im2 = [], []
        for d, e in zip(M.dim, es):
            if d == 0:
                im1.append(np.zeros((0, 0), dtype=np.int64))
                im2.append(np.zeros((0, 0), dtype=np.int64))
                continue
            im1.append(_image_basis(e, F)[0])
            im2.append(_image_basis(F.sub[gfla.identity(d), e], F)[0])
        A = restrict(self.qv, M, [b.reshape(len(b), d) for b, d in zip(im1, M.dim)], F)
        B = restrict(self.qv, M, [b.reshape(len(b), d) for b, d in zip(im2, M.dim)], F)
        return A, B

    def decompose_reps(self, M: Representation) -> list[tuple[Representation, int, int]]:
        """Indecomposable summands of ``M`` as ``(rep, aut_order, end_dim)``."""
        if not any(M.dim):
            return []
        ok, info, h = self.analyze_end(M)
        if ok:
            return [(M, int(info), h)]
        A, B = self.split(M, info)
        return self.decompose_reps(A) + self.decompose_reps(B)

    def indec_iso(self, M: Representation, N: Representation, end_dim: int | None = None) -> bool:
        """Isomorphism test for indecomposables via non-nilpotent composites."""
        if M.dim != N.dim:
            return False
        F = self.F
        f = self.hom(M, N)
        if f.dim == 0 or (end_dim is not None and f.dim != end_dim):
            return False
        g = self.hom(N, M)
        if g.dim != f.dim:
            return False
        h = f.dim
        comp = compose_flat(F, np.repeat(g.flat, h, axis=0), np.tile(f.flat, (h, 1)), M.dim, N.dim, M.dim)
        _, nil, _ = _endo_kinds(F, M.dim, comp)
        return bool((~nil).any())

    # -- tables -------------------------------------------------------------

    def in_sub(self, d: Sequence[int]) -> bool:
        return self.sub.contains(d)

    def record(self, cid: ClassId) -> ClassRecord:
        return self.table(cid[0]).classes[cid[1]]

    def table(self, d: Sequence[int]) -> IsoTable:
        d = tuple(int(x) for x in d)
        t = self._tables.get(d)
        if t is not None:
            return t
        if len(d) != self.qv.n or min(d) < 0:
            raise ValueError(f"bad dimension vector {d}")
        t = self.store.load_table(self, d) if self.store is not None else None
        if t is None:
            t = self._build_table(d)
            self._tables[d] = t
            if self.store is not None:
                self.store.save(self, d)
        else:
            self._tables[d] = t
        return t

    def _finalize(self, d: DimVector, classes: list[ClassRecord]) -> IsoTable:
        t = IsoTable(d, classes)
        for c in classes:
            t.by_sig.setdefault(self.signature(c.rep), []).append(c.cid[1])
            t.by_summands[c.summands] = c.cid[1]
        return t

    def _build_table(self, d: DimVector) -> IsoTable:
        qv, F = self.qv, self.F
        if not any(d):
            return self._finalize(d, [ClassRecord((d, 0), zero_rep(qv), 1, False, (), 0)])
        if self.strategy == "exhaustive":
            # fail before building the smaller tables
            total = sum(d[a.tgt] * d[a.src] for a in qv.arrows)
            if F.q**total > self.budget:
                raise BudgetExceeded(f"{F.q}^{total} arrow tuples at {d} exceed the budget {self.budget}")
        # make sure every smaller table exists first (bottom-up, deterministic)
        for e in sorted(itertools.product(*(range(x + 1) for x in d)), key=lambda e: (sum(e), e)):
            if e != d and any(e):
                self.table(e)
        indecs = self._find_indecomposables(d)
        classes: list[ClassRecord] = []
        for k, (rep, aut, h) in enumerate(indecs):
            f = h - _log_q(F.q**h - aut, F.q) if aut < F.q**h else h
            classes.append(ClassRecord((d, k), rep, aut, True, ((d, k),), h, f))
        k = len(classes)
        for combo in self._decomposable_types(d):
            rep = direct_sum(qv, [self.record(c).rep for c in combo])
            aut, h = self._sum_aut(combo)
            classes.append(ClassRecord((d, k), rep, aut, False, combo, h))
            k += 1
        log.debug("table %s: %d classes (%d indecomposable)", d, len(classes), len(indecs))
        return self._finalize(d, classes)

    def _sum_aut(self, combo: tuple[ClassId, ...]) -> tuple[int, int]:
        F = self.F
        mult = Counter(combo)
        types = sorted(mult)
        end_dim = sum(mult[a] * mult[b] * self.hom_dim_classes(a, b) for a in types for b in types)
        semisimple = sum(mult[a] ** 2 * self.record(a).residue_degree for a in types)
        aut = F.q ** (end_dim - semisimple)
        for a in types:
            aut *= gfla.gl_order(mult[a], F.q ** self.record(a).residue_degree)
        return aut, end_dim

    def _decomposable_types(self, d: DimVector) -> list[tuple[ClassId, ...]]:
        pool: list[ClassId] = []
        for e in sorted(itertools.product(*(range(x + 1) for x in d)), key=lambda e: (sum(e), e)):
            if e != d and any(e):
                pool.extend(c.cid for c in self.table(e).classes if c.indecomposable)
        pool.sort()
        out = []

        def rec(start: int, rest: DimVector, acc: list[ClassId]):
            if not any(rest):
                if len(acc) >= 2:
                    out.append(tuple(acc))
                return
            for j in range(start, len(pool)):
                cd = pool[j][0]
                if all(x <= y for x, y in zip(cd, rest)):
                    acc.append(pool[j])
                    rec(j, sub_dims(rest, cd), acc)
                    acc.pop()

        rec(0, d, [])
        return sorted(out)

    def _candidates(self, d: DimVector) -> Iterator[Representation]:
        qv, F = self.qv, self.F
        if self.strategy == "exhaustive":
            sizes = [(d[a.tgt], d[a.src]) for a in qv.arrows]
            total = sum(r * c for r, c in sizes)
            if F.q**total > self.budget:
                raise BudgetExceeded(f"{F.q}^{total} arrow tuples at {d} exceed the budget {self.budget}")
            for vals in itertools.product(range(F.q), repeat=total):
                mats, pos = [], 0
                for r, c in sizes:
                    mats.append(np.array(vals[pos:pos + r * c], dtype=np.int64).reshape(r, c))
                    pos += r * c
                rep = Representation(d, tuple(mats))
                if satisfies_relations(qv, rep.mats, d, F):
                    yield rep
            return
        if sum(d) == 1:
            yield make_rep(qv, d)
            return
        for i in range(qv.n):
            if d[i] == 0:
                continue
            ydim = sub_dims(d, qv.simple_dim(i))
            slots = [(k, ydim[a.src]) for k, a in enumerate(qv.arrows) if a.tgt == i]
            width = sum(w for _, w in slots)
            if width == 0:
                continue
            ytable = self.table(ydim)
            if F.q**width * len(ytable) > self.budget:
                raise BudgetExceeded(f"extension candidates at {d} exceed the budget {self.budget}")
            for Y in ytable.classes:
                for vals in itertools.product(range(F.q), repeat=width):
                    if not any(vals):
                        continue
                    yield self._extension(i, Y.rep, d, slots, vals)

    def _extension(self, i: int, Y: Representation, d: DimVector, slots, vals) -> Representation:
        """Middle term with ``S_i`` as subobject placed first at vertex ``i``."""
        qv = self.qv
        cocycle = {}
        pos = 0
        for k, w in slots:
            cocycle[k] = np.array(vals[pos:pos + w], dtype=np.int64)
            pos += w
        mats = []
        for k, a in enumerate(qv.arrows):
            m = np.zeros((d[a.tgt], d[a.src]), dtype=np.int64)
            r0 = 1 if a.tgt == i else 0
            c0 = 1 if a.src == i else 0
            m[r0:, c0:] = Y.mats[k]
            if k in cocycle:
                m[0, c0:] = cocycle[k]
            mats.append(m)
        return Representation(d, tuple(mats))

    def _find_indecomposables(self, d: DimVector) -> list[tuple[Representation, int, int]]:
        found: list[tuple[Representation, int, int]] = []
        buckets: dict[tuple, list[int]] = {}
        seen: set[bytes] = set()
        for rep in self._candidates(d):
            key = rep.key()
            if key in seen:
                continue
            seen.add(key)
            if not satisfies_relations(self.qv, rep.mats, d, self.F):
                continue
            ok, info, h = self.analyze_end(rep)
            if not ok:
                continue
            sig = (self.signature(rep), h)
            bucket = buckets.setdefault(sig, [])
            if any(self.indec_iso(found[j][0], rep, h) for j in bucket):
                continue
            bucket.append(len(found))
            found.append((rep, int(info), h))
        return found

    # -- identification -----------------------------------------------------

    def identify(self, rep: Representation) -> ClassId:
        """Class id of an arbitrary representation."""
        t = self.table(rep.dim)
        cands = t.by_sig.get(self.signature(rep), [])
        if len(cands) == 1:
            return (rep.dim, cands[0])
        if not cands:
            raise RuntimeError(f"representation at {rep.dim} matches no classified invariant")
        summands = tuple(sorted(self._identify_indec(r, h) for r, _, h in self.decompose_reps(rep)))
        return (rep.dim, t.by_summands[summands])

    def _identify_indec(self, rep: Representation, end_dim: int) -> ClassId:
        t = self.table(rep.dim)
        cands = [k for k in t.by_sig.get(self.signature(rep), []) if t.classes[k].indecomposable]
        if len(cands) == 1:
            return (rep.dim, cands[0])
        for k in cands:
            c = t.classes[k]
            if c.end_dim == end_dim and self.indec_iso(c.rep, rep, end_dim):
                return (rep.dim, k)
        raise RuntimeError(f"indecomposable at {rep.dim} not found in its table")

    def decompose(self, rep: Representation) -> Counter:
        """Krull-Schmidt factorization as a multiset of indecomposable class ids."""
        return Counter(self._identify_indec(r, h) for r, _, h in self.decompose_reps(rep))

    # -- subobjects ---------------------------------------------------------

    def profile(self, x: ClassId, e: Sequence[int]) -> dict[tuple[ClassId, ClassId], int]:
        """Counts of subobjects of dimension ``e``, keyed by (sub class, quotient class)."""
        e = tuple(e)
        key = (x, e)
        prof = self._profiles.get(key)
        if prof is not None:
            return prof
        X = self.record(x).rep
        counts: Counter = Counter()
        for bases in subrep_bases(self.qv, X, e, self.F, self.budget):
            U = restrict(self.qv, X, bases, self.F)
            Q = quotient(self.qv, X, bases, self.F)
            counts[(self.identify(U), self.identify(Q))] += 1
        prof = dict(sorted(counts.items()))
        self._profiles[key] = prof
        if self.store is not None:
            self.store.mark_dirty(x[0])
        return prof

    def subrep_count(self, x: ClassId, b: ClassId, a: ClassId) -> int:
        """Number of subobjects ``U <= X`` with ``U ~ B`` and ``X/U ~ A``."""
        if add_dims(a[0], b[0]) != x[0]:
            return 0
        return self.profile(x, b[0]).get((b, a), 0)

    # -- subcategory --------------------------------------------------------

    def classes_in_sub(self, d: Sequence[int]) -> list[ClassRecord]:
        if not self.in_sub(d):
            return []
        return list(self.table(d).classes)

    def sub_indecomposable(self, cid: ClassId) -> bool:
        """Indecomposable inside the (submonoid) subcategory."""
        rec = self.record(cid)
        if not any(cid[0]) or not self.in_sub(cid[0]):
            return False
        if self.sub.mode == "full":
            return rec.indecomposable
        parts = rec.summands
        n = len(parts)
        for mask in range(1, 2**n - 1):
            dsum = (0,) * self.qv.n
            for j in range(n):
                if mask >> j & 1:
                    dsum = add_dims(dsum, parts[j][0])
            if self.in_sub(dsum) and self.in_sub(sub_dims(cid[0], dsum)):
                return False
        return True

    def composition_series(self, x: ClassId, almost_simple: Callable[[ClassId], bool]) -> list[ClassId]:
        """Quotients of a chain ``X = X_0 > X_1 > ... > 0`` with almost simple factors."""
        out: list[ClassId] = []
        cur = x
        while any(cur[0]):
            best = None
            for e in sorted(itertools.product(*(range(v + 1) for v in cur[0])), key=lambda e: (-sum(e), e)):
                if e == cur[0] or not self.in_sub(e) or not self.in_sub(sub_dims(cur[0], e)):
                    continue
                for (u, qcls), cnt in self.profile(cur, e).items():
                    if cnt and almost_simple(qcls):
                        best = (u, qcls)
                        break
                if best:
                    break
            if best is None:
                raise RuntimeError(f"no almost simple quotient found for {class_id_str(cur)}")
            out.append(best[1])
            cur = best[0]
        return out

    # -- exhaustive helpers (oracles) --------------------------------------

    def count_valid_tuples(self, d: Sequence[int]) -> int:
        """Brute-force count of arrow tuples at ``d`` satisfying all relations."""
        qv, F = self.qv, self.F
        sizes = [(d[a.tgt], d[a.src]) for a in qv.arrows]
        total = sum(r * c for r, c in sizes)
        if F.q**total > self.budget:
            raise BudgetExceeded(f"{F.q}^{total} arrow tuples exceed the budget")
        if not qv.relations or total == 0:
            return F.q**total
        count = 0
        for coeffs in _iter_combinations(total, F.q, chunk=1 << 15):
            mats, pos = [], 0
            for r, c in sizes:
                mats.append(coeffs[:, pos:pos + r * c].reshape(coeffs.shape[0], r, c))
                pos += r * c
            ok = np.ones(coeffs.shape[0], dtype=bool)
            for rel in qv.relations:
                s, t = rel.source(qv.arrows), rel.target(qv.arrows)
                acc = np.zeros((coeffs.shape[0], d[t], d[s]), dtype=np.int64)
                for coeff, path in rel.terms:
                    c = F.from_int(coeff)
                    if c == 0:
                        continue
                    m = mats[path[-1]]
                    for k in reversed(path[:-1]):
                        m = F.matmul(mats[k], m)
                    acc = F.add[acc, F.mul[c, m]]
                ok &= (acc == 0).all(axis=(-2, -1))
            count += int(ok.sum())
        return count

    def group_order(self, d: Sequence[int]) -> int:
        out = 1
        for x in d:
            out *= gfla.gl_order(x, self.F.q)
        return out


def _log_q(n: int, q: int) -> int:
    k = 0
    while n > 1:
        if n % q:
            raise ValueError(f"{n} is not a power of {q}")
        n //= q
        k += 1
    return k
