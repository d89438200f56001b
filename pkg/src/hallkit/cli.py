"""Command line front end: ``hall <subcommand> --spec FILE ...``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from . import structure as st
from .cache import TableStore
from .gfla import FieldError, field_make
from .hall import BoundError, HallAlgebra, HallElement, format_element, format_tensor
from .literals import LiteralError, parse_element
from .quiver import Bound, HallSpec, SpecError, bundled_spec_names, format_dim, load_spec, parse_dim
from .repcat import BudgetExceeded, DEFAULT_BUDGET, RepCategory, class_id_str, parse_class_id

log = logging.getLogger("hallkit")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    spec: HallSpec
    budget: int = DEFAULT_BUDGET
    jobs: int = 1
    cache: str | None = None
    json: bool = False

    def __post_init__(self):
        if self.spec.bound.total < 1:
            raise UsageError("bound must be at least 1")
        if self.budget < 2**16:
            raise UsageError("budget must be at least 2^16")

    def build(self) -> tuple[RepCategory, HallAlgebra, TableStore | None]:
        spec = self.spec
        store = TableStore(self.cache, spec.spec_hash) if self.cache else None
        cat = RepCategory(spec.quiver, field_make(spec.q), spec.subcategory, budget=self.budget, store=store)
        return cat, HallAlgebra(cat, spec.bound), store


def _dimstr(d) -> str:
    return format_dim(d)


def _elem_json(x: HallElement) -> dict:
    return {class_id_str(k): str(v) for k, v in x}


def _tensor_json(t) -> dict:
    return {f"{class_id_str(a)} x {class_id_str(b)}": str(v) for (a, b), v in t}


def _need_dim(args, n: int):
    if not args.dim:
        raise UsageError("this command needs --dim")
    d = parse_dim(args.dim)
    if len(d) != n or min(d) < 0:
        raise UsageError(f"--dim must have {n} nonnegative entries")
    return d


# ---------------------------------------------------------------------------
# commands; each returns (result dict, passed flag, text lines)


def cmd_iso(cfg: RunConfig, cat, H, args):
    d = _need_dim(args, cat.qv.n)
    if not H.bound.contains(d):
        raise BoundError(f"dimension vector {format_dim(d)} is outside the bound {H.bound.describe()}")
    t = cat.table(d) if cat.in_sub(d) else None
    rows = []
    if t is not None:
        for c in t.classes:
            rows.append({
                "class_id": c.class_id,
                "aut_order": c.aut_order,
                "indecomposable": c.indecomposable,
                "matrices": {a.label: m.tolist() for a, m in zip(cat.qv.arrows, c.rep.mats)},
            })
    lines = [f"dimension {format_dim(d)}: {len(rows)} classes, {sum(r['indecomposable'] for r in rows)} indecomposable"]
    for r in rows:
        flag = "ind" if r["indecomposable"] else "dec"
        lines.append(f"  [{r['class_id']}] {flag} |Aut| = {r['aut_order']}  {r['matrices']}")
    return {"dim": list(d), "classes": rows}, True, lines


def _literal(s, cfg):
    return parse_element(s, cfg.spec.q)


def cmd_product(cfg, cat, H, args):
    x, y = _literal(args.lhs, cfg), _literal(args.rhs, cfg)
    for el in (x, y):
        for k in el.terms:
            _validate_id(cat, H, k)
    z = H.product(x, y)
    return {"lhs": _elem_json(x), "rhs": _elem_json(y), "product": _elem_json(z)}, True, [format_element(z)]


def cmd_coproduct(cfg, cat, H, args):
    x = _literal(args.element, cfg)
    for k in x.terms:
        _validate_id(cat, H, k)
    t = H.reduced_coproduct(x) if args.reduced else H.coproduct(x)
    return {"element": _elem_json(x), "reduced": bool(args.reduced), "coproduct": _tensor_json(t)}, True, [format_tensor(t)]


def cmd_pairing(cfg, cat, H, args):
    x, y = _literal(args.lhs, cfg), _literal(args.rhs, cfg)
    for el in (x, y):
        for k in el.terms:
            _validate_id(cat, H, k)
    v = H.green_pairing(x, y)
    return {"pairing": str(v)}, True, [str(v)]


def _validate_id(cat, H, cid):
    H._check(cid[0])
    if cid[1] >= len(cat.table(cid[0])):
        raise UsageError(f"unknown class id [{class_id_str(cid)}]")


def cmd_primitives(cfg, cat, H, args):
    d = _need_dim(args, cat.qv.n)
    H._check(d)
    mc = parse_class_id(args.monoid_class) if args.monoid_class else None
    pb = st.primitive_space(H, d, mc)
    lines = [f"dimension: {len(pb)}"] + [f"  {format_element(v)}" for v in pb.vectors]
    return {"dim": list(d), "dimension": len(pb), "basis": [_elem_json(v) for v in pb.vectors]}, True, lines


def cmd_multiplicities(cfg, cat, H, args):
    dims = [_need_dim(args, cat.qv.n)] if args.dim else H.dims()
    out, ok, lines = [], True, []
    for d in dims:
        n = len(st.indecomposables(H, d))
        p = len(st.primitive_space(H, d))
        ok &= n - p >= 0
        out.append({"dim": list(d), "indecomposables": n, "primitive_dim": p, "multiplicity": n - p})
        lines.append(f"{format_dim(d)}: #Ind={n} dim Prim={p} m={n - p}")
    return {"components": out}, ok, lines


def cmd_monoid(cfg, cat, H, args):
    G = st.grothendieck_monoid(H)
    res = G.to_json()
    res["congruence"] = st.congruence_check(H, G)
    res["almost_simples"] = [class_id_str(c) for c in st.almost_simples(H)]
    lines = [f"minimal classes: {', '.join(res['minimal_classes'])}",
             f"free within bound: {res['free']}"]
    for rel in res["relations"]:
        lines.append("relation: " + " = ".join(rel))
    lines.append(f"almost simple: {', '.join(res['almost_simples'])}")
    lines.append(f"note: {G.note}")
    return res, res["congruence"]["pass"], lines


def cmd_pbw(cfg, cat, H, args):
    rep = st.pbw_check(H)
    for c in rep["components"]:
        c["dim"] = list(c["dim"])
    lines = [f"{format_dim(c['dim'])}: classes={c['classes']} monomials={c['monomials']} rank={c['rank']} "
             f"{'basis' if c['basis'] else 'spanning' if c['spanning'] else 'FAIL'}" for c in rep["components"]]
    return rep, rep["pass"], lines + [f"pass: {rep['pass']}"]


def cmd_quasi_nichols(cfg, cat, H, args):
    dims = [_need_dim(args, cat.qv.n)] if args.dim else H.dims()
    comps = [st.quasi_nichols_check(H, d) for d in dims]
    for c in comps:
        c["dim"] = list(c["dim"])
    ok = all(c["pass"] for c in comps)
    lines = [f"{format_dim(c['dim'])}: dim H={c['classes']} dim Prim={c['prim_dim']} dim P={c['products_dim']} "
             f"m={c['multiplicity']} {'ok' if c['pass'] else 'FAIL'}" for c in comps]
    return {"components": comps, "pass": ok}, ok, lines


def cmd_green(cfg, cat, H, args):
    res = {"pairing": H.pairing_check(trials=args.trials, seed=args.seed)}
    if cat.qv.hereditary and cat.sub.mode == "full":
        res["bialgebra"] = H.green_identity_check()
        res["riedtmann"] = H.riedtmann_check()
        res["bialgebra"].pop("results")
    ok = all(v["pass"] for v in res.values())
    lines = [f"{k}: {'pass' if v['pass'] else 'FAIL'}" for k, v in res.items()]
    return res, ok, lines


def cmd_subalgebras(cfg, cat, H, args):
    prof = st.subalgebra_profiles(H)
    dims = {k: {format_dim(d): v for d, v in p.graded_dims.items()} for k, p in prof.items()}
    chain = prof["C"] <= prof["E"] and prof["C"] <= prof["U"] and prof["U"] <= prof["H"]
    rel = {}
    for a, b in [("C", "U"), ("U", "E"), ("E", "H"), ("U", "H")]:
        rel[f"{a}={b}"] = prof[a].graded_dims == prof[b].graded_dims
    lines = [f"{k}: {v}" for k, v in dims.items()] + [f"{k}: {v}" for k, v in rel.items()]
    return {"graded_dims": dims, "equalities": rel, "containments_hold": chain}, chain, lines


def cmd_examples(cfg, cat, H, args):
    from .regression import run_suite

    names = bundled_spec_names()
    q = cfg.spec.q if args.q is not None else 2
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as ex:
            results = list(ex.map(run_suite, names, [q] * len(names), [cfg.budget] * len(names)))
    else:
        results = [run_suite(n, q, cfg.budget) for n in names]
    out = {n: r for n, r in zip(names, results)}
    ok = all(c["pass"] for r in results for c in r)
    lines = [f"{n}: {c['check']}: {'pass' if c['pass'] else 'FAIL'}" for n, r in out.items() for c in r]
    return {"suites": out}, ok, lines


COMMANDS = {
    "iso": cmd_iso,
    "product": cmd_product,
    "coproduct": cmd_coproduct,
    "pairing": cmd_pairing,
    "primitives": cmd_primitives,
    "multiplicities": cmd_multiplicities,
    "monoid": cmd_monoid,
    "pbw": cmd_pbw,
    "quasi-nichols": cmd_quasi_nichols,
    "green": cmd_green,
    "subalgebras": cmd_subalgebras,
    "examples": cmd_examples,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--spec", help="spec file or bundled spec name")
    common.add_argument("--dim", help="dimension vector, e.g. 1,1")
    common.add_argument("--bound", type=int, help="override the total dimension bound")
    common.add_argument("--q", type=int, help="override the field size")
    common.add_argument("--json", action="store_true", help="emit a JSON report")
    common.add_argument("--cache", help="directory for the table cache")
    common.add_argument("--jobs", type=int, default=1, help="worker processes (examples suite)")
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="enumeration budget")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="hall", description="Hall algebras of quivers with relations over GF(q)")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name in ("product", "pairing"):
            sp.add_argument("lhs")
            sp.add_argument("rhs")
        elif name == "coproduct":
            sp.add_argument("element")
            sp.add_argument("--reduced", action="store_true")
        elif name == "primitives":
            sp.add_argument("--monoid-class", help="restrict to one Grothendieck class (its least member id)")
        elif name == "green":
            sp.add_argument("--trials", type=int, default=100)
            sp.add_argument("--seed", type=int, default=0)
    return p


def _report(cfg: RunConfig, command: str, result, truncated: bool) -> dict:
    return {
        "spec_hash": cfg.spec.spec_hash,
        "q": cfg.spec.q,
        "bound": cfg.spec.bound.describe(),
        "command": command,
        "result": result,
        "truncated": truncated,
    }


def _default(o):
    if isinstance(o, Fraction):
        return str(o)
    if isinstance(o, tuple):
        return list(o)
    raise TypeError(type(o).__name__)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.command == "examples" and not args.spec:
            args.spec = "a2"
        if not args.spec:
            raise UsageError("--spec is required")
        base = load_spec(args.spec)
        bound = Bound(args.bound, base.bound.caps) if args.bound is not None else None
        spec = load_spec(args.spec, bound_override=bound, q_override=args.q)
        field_make(spec.q)
        cfg = RunConfig(spec, budget=args.budget, jobs=max(1, args.jobs), cache=args.cache, json=args.json)
        cat, H, store = cfg.build()
        result, ok, lines = COMMANDS[args.command](cfg, cat, H, args)
        if store is not None:
            store.flush(cat)
    except BudgetExceeded as exc:
        print(f"hall: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (SpecError, LiteralError, UsageError, BoundError, FieldError, ValueError) as exc:
        print(f"hall: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    truncated = args.command in ("monoid", "subalgebras", "pbw", "multiplicities")
    if args.json:
        print(json.dumps(_report(cfg, args.command, result, truncated), sort_keys=True, default=_default))
    else:
        for line in lines:
            print(line)
    return EXIT_OK if ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
