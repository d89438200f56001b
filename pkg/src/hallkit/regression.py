"""
Regression suite over the bundled specs, used by ``hall examples``.

Each bundled spec gets the generic property checks (orbit-stabilizer
accounting, PBW, quasi-Nichols, pairing compatibility, extension order) plus
a handful of identities specific to that example.
"""

from __future__ import annotations

from fractions import Fraction

from . import structure as st
from .gfla import field_make
from .hall import HallAlgebra, HallElement
from .quiver import Bound, load_spec
from .repcat import ClassId, RepCategory, direct_sum, make_rep


def setup(name: str, q: int = 2, bound: Bound | None = None, budget: int | None = None):
    spec = load_spec(name, bound_override=bound, q_override=q)
    kw = {"budget": budget} if budget else {}
    cat = RepCategory(spec.quiver, field_make(q), spec.subcategory, **kw)
    return spec, cat, HallAlgebra(cat, spec.bound)


def rep_class(cat: RepCategory, dim, mats=None) -> ClassId:
    return cat.identify(make_rep(cat.qv, dim, mats))


def sum_class(cat: RepCategory, *parts: ClassId) -> ClassId:
    return cat.identify(direct_sum(cat.qv, [cat.record(p).rep for p in parts]))


def e(c: ClassId) -> HallElement:
    return HallElement.basis(c)


def orbit_stabilizer(cat: RepCategory, dims) -> bool:
    for d in dims:
        total = sum(Fraction(cat.group_order(d), c.aut_order) for c in cat.table(d).classes)
        try:
            count = cat.count_valid_tuples(d)
        except Exception:
            continue
        if total != count:
            return False
    return True


def named_objects(name: str, cat: RepCategory) -> dict[str, ClassId]:
    """Class ids of the objects singled out in each worked example."""
    r = lambda d, m=None: rep_class(cat, d, m)  # noqa: E731
    q = cat.F.q
    if name == "a2":
        return {"S1": r((1, 0)), "S2": r((0, 1)), "P1": r((1, 1), {"a": [[1]]})}
    if name == "three-vertex":
        out = {f"S{i}": r(tuple(int(i == j) for j in range(3))) for i in range(3)}
        out["P1"] = r((1, 1, 0), {"b": [[1]]})
        out["P2"] = r((1, 0, 1), {"c": [[1]]})
        out["I0"] = r((1, 1, 1), {"b": [[1]], "c": [[1]]})
        return out
    if name in ("square", "square-commutative"):
        return {f"S{i + 1}": r(tuple(int(i == j) for j in range(4))) for i in range(4)}
    if name == "tube2":
        out = {"X": r((0, 1, 0)), "Y": r((1, 0, 1), {"c": [[1]]}),
               "Z_YX": r((1, 1, 1), {"a": [[1]], "c": [[1]]}),
               "Z_XY": r((1, 1, 1), {"b": [[1]], "c": [[1]]})}
        for lam in range(q):
            out[f"E1({lam})"] = r((1, 1, 1), {"a": [[1]], "b": [[1]], "c": [[lam]]})
        return out
    if name in ("cyclic1", "cyclic2"):
        return {"S1": r((1, 0)), "S2": r((0, 1)),
                "S12": r((1, 1), {"a12": [[1]]}), "S21": r((1, 1), {"a21": [[1]]})}
    return {}


def _specific(name: str, cat: RepCategory, H: HallAlgebra) -> list[dict]:
    q = cat.F.q
    out = []
    o = named_objects(name, cat)
    if name == "a2":
        S1, S2, P1 = e(o["S1"]), e(o["S2"]), e(o["P1"])
        m = H.product
        out.append({"check": "[S1][S2]=[S2][S1]+[P1]", "pass": m(S1, S2) == m(S2, S1) + P1})
        out.append({"check": "[S1][P1]=q[P1][S1]", "pass": m(S1, P1) == m(P1, S1).scale(q)})
        out.append({"check": "[P1][S2]=q[S2][P1]", "pass": m(P1, S2) == m(S2, P1).scale(q)})
    elif name == "tube2":
        z = (e(o["Z_YX"]) + e(o["Z_XY"]) - e(sum_class(cat, o["X"], o["Y"])).scale(q - 1)
             - sum((e(o[f"E1({lam})"]) for lam in range(q)), HallElement()).scale(Fraction(1, q)))
        out.append({"check": "tube primitive element", "pass": st.is_primitive(H, z)})
        out.append({"check": "dim Prim(1,1,1)=q", "pass": len(st.primitive_space(H, (1, 1, 1))) == q})
    elif name in ("cyclic1", "cyclic2"):
        Z = e(o["S12"]) + e(o["S21"]) - e(sum_class(cat, o["S1"], o["S2"])).scale(q - 1)
        out.append({"check": "Z primitive", "pass": st.is_primitive(H, Z)})
        E1, E2 = e(o["S1"]), e(o["S2"])
        b = H.bracket
        lhs = b(E1, b(E1, E2, q), Fraction(1, q))
        out.append({"check": "[E1,[E1,E2]_q]_{1/q}=(1-1/q)E1Z",
                    "pass": lhs == H.product(E1, Z).scale(1 - Fraction(1, q))})
    elif name == "square":
        out.append({"check": "Prim(1,1,1,1)=0", "pass": len(st.primitive_space(H, (1, 1, 1, 1))) == 0})
    elif name in ("b2", "b3"):
        G = st.grothendieck_monoid(H)
        rel = G.relations()
        out.append({"check": "beta1+beta2=2beta1=2beta2",
                    "pass": len(G.minimal_classes) == 2 and any(len(r) == 3 for r in rel)})
    elif name == "kronecker":
        out.append({"check": "#Ind(1,1)=q+1", "pass": len(st.indecomposables(H, (1, 1))) == q + 1})
        out.append({"check": "m(1,1)=1", "pass": st.multiplicity(H, (1, 1)) == 1})
    return out


def run_suite(name: str, q: int = 2, budget: int | None = None) -> list[dict]:
    spec, cat, H = setup(name, q, budget=budget)
    dims = H.dims(include_zero=True)
    res = [{"check": "orbit-stabilizer", "pass": orbit_stabilizer(cat, dims)}]
    res.append({"check": "pbw", "pass": st.pbw_check(H)["pass"]})
    res.append({"check": "quasi-nichols", "pass": all(st.quasi_nichols_check(H, d)["pass"] for d in H.dims())})
    res.append({"check": "pairing", "pass": H.pairing_check(trials=25)["pass"]})
    res.append({"check": "extension order", "pass": st.extension_order_check(H)["pass"]})
    if spec.quiver.hereditary and spec.subcategory.mode == "full":
        res.append({"check": "green", "pass": H.green_identity_check()["pass"]})
    res.extend(_specific(name, cat, H))
    return res
