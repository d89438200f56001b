"""
Structure of a bounded Hall algebra: Grothendieck monoid, almost simple
objects, primitive elements, multiplicities, PBW and quasi-Nichols checks,
and graded dimensions of generated subalgebras.

Everything here is computed inside the dimension bound of the underlying
`HallAlgebra`; statements about the Grothendieck monoid are only valid up to
that bound.
"""

from __future__ import annotations

import graphlib
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from . import qlinalg
from .hall import HallAlgebra, HallElement
from .quiver import DimVector, add_dims, sub_dims
from .repcat import ClassId, class_id_str


# ---------------------------------------------------------------------------
# extensions and the Grothendieck monoid


def uext_middle_terms(H: HallAlgebra, a: ClassId, b: ClassId) -> set[ClassId]:
    """Classes ``X`` with an exact sequence ``B >-> X ->> A``."""
    return set(H.product(HallElement.basis(a), HallElement.basis(b)).terms)


def admissible_pairs(H: HallAlgebra) -> list[tuple[ClassId, ClassId]]:
    dims = H.dims(include_zero=True)
    out = []
    for d, e in itertools.product(dims, repeat=2):
        s = add_dims(d, e)
        if H.bound.contains(s) and H.cat.in_sub(s):
            out.extend(itertools.product(H.classes(d), H.classes(e)))
    return out


def direct_sum_class(H: HallAlgebra, x: ClassId, y: ClassId) -> ClassId | None:
    d = add_dims(x[0], y[0])
    if not H.bound.contains(d):
        return None
    parts = tuple(sorted(H.cat.record(x).summands + H.cat.record(y).summands))
    return (d, H.cat.table(d).by_summands[parts])


class _UnionFind:
    def __init__(self, items: Iterable):
        self.parent = {x: x for x in items}

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            lo, hi = sorted((rx, ry))
            self.parent[hi] = lo


@dataclass
class GrothendieckTable:
    bound: dict
    partition: dict[ClassId, ClassId]  # class -> monoid class (least member)
    members: dict[ClassId, list[ClassId]]
    add: dict[tuple[ClassId, ClassId], ClassId]
    minimal_classes: list[ClassId]
    expressions: dict[ClassId, list[tuple[ClassId, ...]]] = field(default_factory=dict)
    note: str = "valid up to the dimension bound"

    def cls(self, x: ClassId) -> ClassId:
        return self.partition[x]

    def relations(self) -> list[list[tuple[ClassId, ...]]]:
        """Distinct sums of minimal classes that land in the same monoid class."""
        return [v for _, v in sorted(self.expressions.items()) if len(v) > 1]

    def is_free(self) -> bool:
        return all(len(v) == 1 for k, v in self.expressions.items())

    def to_json(self) -> dict:
        fmt = lambda e: " + ".join(class_id_str(g) for g in e) if e else "0"  # noqa: E731
        return {
            "bound": self.bound,
            "monoid_classes": {class_id_str(k): [class_id_str(m) for m in v] for k, v in sorted(self.members.items())},
            "minimal_classes": [class_id_str(m) for m in self.minimal_classes],
            "relations": [[fmt(e) for e in rel] for rel in self.relations()],
            "free": self.is_free(),
            "note": self.note,
        }


def grothendieck_monoid(H: HallAlgebra) -> GrothendieckTable:
    classes = [c for d in H.dims(include_zero=True) for c in H.classes(d)]
    uf = _UnionFind(classes)
    for a, b in admissible_pairs(H):
        mids = sorted(uext_middle_terms(H, a, b))
        for x in mids[1:]:
            uf.union(mids[0], x)
    partition = {c: uf.find(c) for c in classes}
    members: dict[ClassId, list[ClassId]] = {}
    for c in classes:
        members.setdefault(partition[c], []).append(c)
    reps = sorted(members)
    add = {}
    for x, y in itertools.product(reps, repeat=2):
        s = direct_sum_class(H, x, y)
        if s is not None and H.cat.in_sub(s[0]):
            add[(x, y)] = partition[s]
    zero = (H.qv.zero(), 0)
    nonzero = [m for m in reps if m != zero]
    decomposable = {add[(x, y)] for x in nonzero for y in nonzero if (x, y) in add}
    minimal = [m for m in nonzero if m not in decomposable]
    # all sums of minimal classes inside the bound
    expressions: dict[ClassId, list[tuple[ClassId, ...]]] = {zero: [()]}

    def rec(cur: ClassId, start: int, acc: tuple):
        for j in range(start, len(minimal)):
            nxt = add.get((cur, minimal[j]))
            if nxt is None:
                continue
            e = acc + (minimal[j],)
            expressions.setdefault(nxt, []).append(e)
            rec(nxt, j, e)

    rec(zero, 0, ())
    return GrothendieckTable(H.bound.describe(), partition, members, add, minimal, expressions)


def congruence_check(H: HallAlgebra, G: GrothendieckTable) -> dict:
    """``[X] = [Y]`` in the monoid implies ``[X + W] = [Y + W]`` whenever defined."""
    failures = []
    count = 0
    for m, mem in G.members.items():
        for x, y in itertools.combinations(mem, 2):
            for w in G.partition:
                sx, sy = direct_sum_class(H, x, w), direct_sum_class(H, y, w)
                if sx is None or sy is None or not H.cat.in_sub(sx[0]):
                    continue
                count += 1
                if G.partition[sx] != G.partition[sy]:
                    failures.append((class_id_str(x), class_id_str(y), class_id_str(w)))
    return {"checks": count, "failures": failures, "pass": not failures}


def extension_order_check(H: HallAlgebra) -> dict:
    """The relation ``[M] < [M+ (+) M-]`` over non-split extensions has no cycles."""
    graph: dict[ClassId, set[ClassId]] = {}
    edges = 0
    for a, b in admissible_pairs(H):
        split = direct_sum_class(H, a, b)
        for x in uext_middle_terms(H, a, b):
            if x != split:
                graph.setdefault(split, set()).add(x)
                edges += 1
    try:
        order = list(graphlib.TopologicalSorter(graph).static_order())
    except graphlib.CycleError as exc:
        return {"edges": edges, "pass": False, "cycle": [class_id_str(c) for c in exc.args[1]]}
    return {"edges": edges, "pass": True, "sorted_classes": len(order)}


def almost_simples(H: HallAlgebra) -> list[ClassId]:
    """Nonzero classes that are not the middle term of a conflation with nonzero ends."""
    out = []
    for d in H.dims():
        for x in H.classes(d):
            if is_almost_simple(H, x):
                out.append(x)
    return out


def is_almost_simple(H: HallAlgebra, x: ClassId) -> bool:
    d = x[0]
    if not any(d):
        return False
    for e in itertools.product(*(range(v + 1) for v in d)):
        if not any(e) or e == d:
            continue
        if H.cat.in_sub(e) and H.cat.in_sub(sub_dims(d, e)) and H.cat.profile(x, e):
            return False
    return True


def composition_series(H: HallAlgebra, x: ClassId) -> list[ClassId]:
    return H.cat.composition_series(x, lambda c: is_almost_simple(H, c))


# ---------------------------------------------------------------------------
# primitive elements


@dataclass
class PrimBasis:
    dim: DimVector
    classes: list[ClassId]
    vectors: list[HallElement]
    monoid_class: ClassId | None = None

    def __len__(self) -> int:
        return len(self.vectors)


def _vec(x: HallElement, classes: Sequence[ClassId]) -> list[Fraction]:
    return [x.terms.get(c, Fraction(0)) for c in classes]


def _elem(v: Sequence[Fraction], classes: Sequence[ClassId]) -> HallElement:
    return HallElement({c: a for c, a in zip(classes, v)})


def reduced_coproduct_matrix(H: HallAlgebra, classes: Sequence[ClassId]) -> list[list[Fraction]]:
    """Rows indexed by tensor keys, columns by ``classes``."""
    cols = [H.reduced_coproduct(HallElement.basis(c)).terms for c in classes]
    keys = sorted(set().union(*cols)) if cols else []
    return [[col.get(k, Fraction(0)) for col in cols] for k in keys]


def primitive_space(H: HallAlgebra, d, monoid_class: ClassId | None = None,
                    G: GrothendieckTable | None = None) -> PrimBasis:
    d = tuple(d)
    classes = H.classes(d)
    if monoid_class is not None:
        G = G or grothendieck_monoid(H)
        classes = [c for c in classes if G.partition[c] == monoid_class]
    if not any(d):
        return PrimBasis(d, classes, [], monoid_class)
    M = reduced_coproduct_matrix(H, classes)
    ker = qlinalg.nullspace(M, len(classes))
    return PrimBasis(d, classes, [_elem(v, classes) for v in ker], monoid_class)


def is_primitive(H: HallAlgebra, x: HallElement) -> bool:
    return not H.reduced_coproduct(x)


def indecomposables(H: HallAlgebra, d) -> list[ClassId]:
    return [c for c in H.classes(d) if H.cat.sub_indecomposable(c)]


def multiplicity(H: HallAlgebra, d, monoid_class: ClassId | None = None,
                 G: GrothendieckTable | None = None) -> int:
    """``#Ind - dim Prim`` on a graded component (optionally one monoid class)."""
    d = tuple(d)
    ind = indecomposables(H, d)
    if monoid_class is not None:
        G = G or grothendieck_monoid(H)
        ind = [c for c in ind if G.partition[c] == monoid_class]
    return len(ind) - len(primitive_space(H, d, monoid_class, G))


def multiplicities(H: HallAlgebra) -> dict[DimVector, dict]:
    out = {}
    for d in H.dims():
        p = len(primitive_space(H, d))
        n = len(indecomposables(H, d))
        out[d] = {"indecomposables": n, "primitive_dim": p, "multiplicity": n - p}
    return out


# ---------------------------------------------------------------------------
# PBW and quasi-Nichols


def default_order(c: ClassId) -> tuple:
    return (sum(c[0]), c[0], c[1])


def ordered_monomials(H: HallAlgebra, d, order: Callable[[ClassId], tuple] = default_order) -> list[tuple[ClassId, ...]]:
    d = tuple(d)
    pool = sorted({c for e in H.dims() if all(x <= y for x, y in zip(e, d)) for c in indecomposables(H, e)},
                  key=order)
    out = []

    def rec(start: int, rest: DimVector, acc: list):
        if not any(rest):
            out.append(tuple(acc))
            return
        for j in range(start, len(pool)):
            cd = pool[j][0]
            if all(x <= y for x, y in zip(cd, rest)):
                acc.append(pool[j])
                rec(j, sub_dims(rest, cd), acc)
                acc.pop()

    rec(0, d, [])
    return out


def pbw_check(H: HallAlgebra, order: Callable[[ClassId], tuple] = default_order) -> dict:
    """Ordered monomials in indecomposables span every component; basis for mode=full."""
    krull_schmidt = H.cat.sub.mode == "full"
    comps = []
    ok = True
    for d in H.dims():
        classes = H.classes(d)
        monos = ordered_monomials(H, d, order)
        vecs = [_vec(H.mul(*(HallElement.basis(c) for c in m)), classes) for m in monos]
        r = qlinalg.rank(vecs) if vecs else 0
        spans = r == len(classes)
        basis = spans and len(monos) == len(classes)
        good = spans and (basis or not krull_schmidt)
        ok &= good
        comps.append({"dim": d, "classes": len(classes), "monomials": len(monos), "rank": r,
                      "spanning": spans, "basis": basis, "pass": good})
    return {"krull_schmidt": krull_schmidt, "pass": ok, "components": comps}


def decomposable_products(H: HallAlgebra, d) -> list[HallElement]:
    """Products ``[M][N]`` with ``M, N`` nonzero that land in component ``d``."""
    d = tuple(d)
    out = []
    for e in H.dims():
        f = sub_dims(d, e)
        if min(f) < 0 or not any(f) or not H.cat.in_sub(f) or e == d:
            continue
        for a in H.classes(e):
            for b in H.classes(f):
                out.append(H.product(HallElement.basis(a), HallElement.basis(b)))
    return out


def quasi_nichols_check(H: HallAlgebra, d) -> dict:
    d = tuple(d)
    classes = H.classes(d)
    n = len(classes)
    prim = [_vec(v, classes) for v in primitive_space(H, d).vectors]
    P = [_vec(x, classes) for x in decomposable_products(H, d)]
    ind = indecomposables(H, d)
    ind_span = [_vec(HallElement.basis(c), classes) for c in ind]
    rest_span = [_vec(HallElement.basis(c), classes) for c in classes if c not in set(ind)]
    dim_p = qlinalg.span_dim(P)
    dim_prim = len(prim)
    direct = dim_p + dim_prim == n and qlinalg.span_dim(prim, P) == n
    m_formula = len(ind) - dim_prim
    m_meet = qlinalg.intersection_dim(P, ind_span)
    prim_meet = qlinalg.intersection_dim(prim, rest_span)
    good = direct and m_formula == m_meet and m_formula >= 0 and prim_meet == 0
    return {"dim": d, "classes": n, "prim_dim": dim_prim, "products_dim": dim_p, "direct_sum": direct,
            "multiplicity": m_formula, "products_meet_ind": m_meet, "prim_meet_decomposables": prim_meet,
            "pass": good}


# ---------------------------------------------------------------------------
# subalgebras


def exponential_element(H: HallAlgebra, monoid_class: ClassId, G: GrothendieckTable | None = None) -> HallElement:
    """Sum of all classes in one Grothendieck class."""
    G = G or grothendieck_monoid(H)
    return HallElement({c: 1 for c in G.members[monoid_class]})


@dataclass
class SubalgebraProfile:
    name: str
    graded_dims: dict[DimVector, int]

    def __le__(self, other: "SubalgebraProfile") -> bool:
        return all(v <= other.graded_dims.get(k, 0) for k, v in self.graded_dims.items())


def subalgebra_graded_dims(H: HallAlgebra, generators: Sequence[HallElement], name: str = "") -> SubalgebraProfile:
    """Graded dimensions of the subalgebra generated by homogeneous ``generators``."""
    gens = []
    for g in generators:
        if not g:
            continue
        if not g.is_homogeneous():
            raise ValueError("subalgebra generators must be homogeneous")
        gens.append(g)
    zero = H.qv.zero()
    spaces: dict[DimVector, list[HallElement]] = {zero: [H.one()]}
    dims_out: dict[DimVector, int] = {}
    for d in sorted(H.dims(), key=lambda e: (sum(e), e)):
        classes = H.classes(d)
        vecs = []
        for g in gens:
            e = next(iter(g.dims()))
            rest = sub_dims(d, e)
            if min(rest) < 0 or rest not in spaces:
                continue
            for s in spaces[rest]:
                vecs.append(_vec(H.product(g, s), classes))
        basis = qlinalg.rref(vecs, len(classes))[0] if vecs else []
        spaces[d] = [_elem(v, classes) for v in basis]
        dims_out[d] = len(basis)
    return SubalgebraProfile(name, dims_out)


def subalgebra_profiles(H: HallAlgebra) -> dict[str, SubalgebraProfile]:
    """Graded dimensions of C (almost simples), U (real simple roots), E (class sums) and H."""
    G = grothendieck_monoid(H)
    zero = (H.qv.zero(), 0)
    c_gens = [HallElement.basis(x) for x in almost_simples(H)]
    u_gens, e_gens = [], []
    for m in sorted(G.members):
        if m == zero:
            continue
        e_gens.append(exponential_element(H, m, G))
        pb = primitive_space(H, m[0], m, G)
        if len(pb) == 1:
            u_gens.extend(pb.vectors)
    h_gens = [HallElement.basis(c) for d in H.dims() for c in H.classes(d)]
    return {
        "C": subalgebra_graded_dims(H, c_gens, "C"),
        "U": subalgebra_graded_dims(H, u_gens, "U"),
        "E": subalgebra_graded_dims(H, e_gens, "E"),
        "H": subalgebra_graded_dims(H, h_gens, "H"),
    }
