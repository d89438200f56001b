"""Exact linear algebra over Q with `fractions.Fraction` entries (dense, small)."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Matrix = list[list[Fraction]]


def as_matrix(rows: Sequence[Sequence]) -> Matrix:
    return [[Fraction(x) for x in r] for r in rows]


def rref(rows: Sequence[Sequence], ncols: int | None = None) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    m = as_matrix(rows)
    if not m:
        return [], []
    ncols = len(m[0]) if ncols is None else ncols
    piv: list[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        piv.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], piv


def rank(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[0]) if rows else 0


def nullspace(rows: Sequence[Sequence], ncols: int) -> Matrix:
    """Basis of ``{x : A x = 0}`` as rows, in RREF."""
    if not rows:
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    R, piv = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in set(piv)]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for i, p in enumerate(piv):
            v[p] = -R[i][f]
        basis.append(v)
    return rref(basis, ncols)[0] if basis else []


def span_dim(*blocks: Sequence[Sequence]) -> int:
    rows = [r for b in blocks for r in b]
    return rank(rows) if rows else 0


def intersection_dim(a: Sequence[Sequence], b: Sequence[Sequence]) -> int:
    return span_dim(a) + span_dim(b) - span_dim(a, b)


def in_span(basis: Sequence[Sequence], v: Sequence) -> bool:
    return span_dim(basis, [v]) == span_dim(basis)
