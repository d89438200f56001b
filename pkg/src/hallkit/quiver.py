"""
Quivers with relations, dimension vectors and the spec-file format.

A spec file is an INI-style document::

    [field]
    q = 2

    [quiver]
    vertices = 1, 2, 3, 4
    arrows = a12: 1 -> 2, a13: 1 -> 3, a24: 2 -> 4, a34: 3 -> 4
    hereditary = false

    [relations]
    zero = a24 a12

    [subcategory]
    generators = (1,0,0); (0,1,1)

    [bicharacter]
    source = trivial

    [bounds]
    total = 4
    caps = 1, 1, 1, 1

Paths are written as arrow labels separated by blanks, rightmost arrow applied
first, so ``a24 a12`` means "``a12`` then ``a24``".  ``l^3`` abbreviates
``l l l`` and the exponent may be ``(D+1)`` where ``D`` is the total dimension
bound.  A relation is a signed sum of terms ``c*path`` with integer ``c``.
"""

from __future__ import annotations

import configparser
import hashlib
import itertools
import json
import re
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .gfla import FieldSpec

DimVector = tuple[int, ...]


class SpecError(ValueError):
    """Malformed or semantically invalid spec file."""


@dataclass(frozen=True)
class Arrow:
    label: str
    src: int
    tgt: int


@dataclass(frozen=True)
class Relation:
    name: str
    terms: tuple[tuple[int, tuple[int, ...]], ...]  # (integer coefficient, arrow indices, leftmost first)

    def source(self, arrows: Sequence[Arrow]) -> int:
        return arrows[self.terms[0][1][-1]].src

    def target(self, arrows: Sequence[Arrow]) -> int:
        return arrows[self.terms[0][1][0]].tgt


@dataclass(frozen=True)
class QuiverPresentation:
    vertices: tuple[str, ...]
    arrows: tuple[Arrow, ...]
    relations: tuple[Relation, ...] = ()
    hereditary: bool = False
    bicharacter: str = "trivial"  # "euler", "matrix" or "trivial"
    bicharacter_matrix: tuple[tuple[int, ...], ...] | None = None

    @property
    def n(self) -> int:
        return len(self.vertices)

    def zero(self) -> DimVector:
        return (0,) * self.n

    def simple_dim(self, i: int) -> DimVector:
        return tuple(int(j == i) for j in range(self.n))

    def is_acyclic(self) -> bool:
        indeg = [0] * self.n
        out: dict[int, list[int]] = {i: [] for i in range(self.n)}
        for a in self.arrows:
            out[a.src].append(a.tgt)
            indeg[a.tgt] += 1
        stack = [i for i in range(self.n) if indeg[i] == 0]
        seen = 0
        while stack:
            v = stack.pop()
            seen += 1
            for w in out[v]:
                indeg[w] -= 1
                if indeg[w] == 0:
                    stack.append(w)
        return seen == self.n

    def arrow_index(self, label: str) -> int:
        for k, a in enumerate(self.arrows):
            if a.label == label:
                return k
        raise KeyError(label)

    def canonical(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "arrows": [[a.label, a.src, a.tgt] for a in self.arrows],
            "relations": [[list(map(list, ((c, list(p)) for c, p in r.terms)))] for r in self.relations],
            "hereditary": self.hereditary,
            "bicharacter": self.bicharacter,
            "bicharacter_matrix": self.bicharacter_matrix,
        }


@dataclass(frozen=True)
class Bound:
    total: int
    caps: DimVector | None = None

    def contains(self, d: Sequence[int]) -> bool:
        if sum(d) > self.total:
            return False
        return self.caps is None or all(x <= c for x, c in zip(d, self.caps))

    def dims(self, n: int, include_zero: bool = False) -> list[DimVector]:
        """All dimension vectors within the bound, by total dimension then lexicographically."""
        caps = self.caps or (self.total,) * n
        out = [d for d in itertools.product(*(range(c + 1) for c in caps)) if sum(d) <= self.total]
        if not include_zero:
            out = [d for d in out if sum(d) > 0]
        return sorted(out, key=lambda d: (sum(d), d))

    def describe(self) -> dict:
        return {"total": self.total, "caps": list(self.caps) if self.caps else None}


@dataclass(frozen=True)
class SubcategorySpec:
    mode: str = "full"  # "full" or "submonoid"
    generators: tuple[DimVector, ...] = ()

    def contains(self, d: Sequence[int]) -> bool:
        d = tuple(d)
        if self.mode == "full" or not any(d):
            return True
        return _in_monoid(d, self.generators)

    def canonical(self) -> dict:
        return {"mode": self.mode, "generators": [list(g) for g in self.generators]}


def _in_monoid(d: DimVector, gens: tuple[DimVector, ...]) -> bool:
    if not any(d):
        return True
    for g in gens:
        rest = tuple(x - y for x, y in zip(d, g))
        if min(rest) >= 0 and _in_monoid(rest, gens):
            return True
    return False


@dataclass(frozen=True)
class HallSpec:
    """Everything a spec file declares."""

    quiver: QuiverPresentation
    q: int
    subcategory: SubcategorySpec = field(default_factory=SubcategorySpec)
    bound: Bound = field(default_factory=lambda: Bound(4))
    name: str = ""
    description: str = ""

    @property
    def spec_hash(self) -> str:
        payload = json.dumps(
            {"quiver": self.quiver.canonical(), "subcategory": self.subcategory.canonical()},
            sort_keys=True,
        )
        return hashlib.sha256(payload.encode()).hexdigest()[:16]


# ---------------------------------------------------------------------------
# parsing

_ARROW_RE = re.compile(r"^\s*([A-Za-z_][\w']*)\s*:\s*(\S+)\s*->\s*(\S+)\s*$")
_FACTOR_RE = re.compile(r"^([A-Za-z_][\w']*)(?:\^(\d+|\{D1\}|\(D\))|)$")


def _line_of(text: str, section: str, key: str | None = None) -> int:
    cur = None
    for n, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        if s.startswith("[") and s.endswith("]"):
            cur = s[1:-1].strip()
            if key is None and cur == section:
                return n
            continue
        if cur == section and key is not None and re.match(rf"^{re.escape(key)}\s*[=:]", s):
            return n
    return 0


def _fail(text: str, section: str, key: str | None, msg: str) -> SpecError:
    line = _line_of(text, section, key)
    where = f"[{section}]" + (f" {key}" if key else "")
    return SpecError(f"line {line}: {where}: {msg}" if line else f"{where}: {msg}")


def _split_items(value: str, seps: str = ",\n") -> list[str]:
    return [s.strip() for s in re.split(f"[{re.escape(seps)}]", value) if s.strip()]


def _int_vector(s: str) -> tuple[int, ...]:
    s = s.strip().strip("()[]")
    return tuple(int(x) for x in re.split(r"[\s,]+", s) if x)


def _parse_relation(text: str, name: str, value: str, arrows: Sequence[Arrow], D: int) -> Relation:
    labels = {a.label: k for k, a in enumerate(arrows)}
    expr = value.replace("\n", " ").replace("(D+1)", "{D1}").strip()
    if not expr:
        raise _fail(text, "relations", name, "empty relation")
    # split into signed terms
    pieces = re.findall(r"([+-]?)\s*([^+-]+)", expr)
    terms = []
    for sign, body in pieces:
        body = body.strip()
        coeff = 1
        m = re.match(r"^(\d+)\s*\*?\s*(.*)$", body)
        if m and m.group(2) and not m.group(2)[0].isdigit():
            coeff, body = int(m.group(1)), m.group(2)
        if sign == "-":
            coeff = -coeff
        path: list[int] = []
        for tok in body.split():
            fm = _FACTOR_RE.match(tok)
            if not fm or fm.group(1) not in labels:
                raise _fail(text, "relations", name, f"unknown arrow or malformed factor {tok!r}")
            exp = fm.group(2)
            if exp is None:
                times = 1
            elif exp == "{D1}":
                times = D + 1
            elif exp == "(D)":
                times = D
            else:
                times = int(exp)
            path.extend([labels[fm.group(1)]] * times)
        if not path:
            raise _fail(text, "relations", name, f"term {body!r} has no path")
        terms.append((coeff, tuple(path)))
    rel = Relation(name, tuple(terms))
    ends = set()
    for _, path in rel.terms:
        if len(path) < 2:
            raise _fail(text, "relations", name, "relation paths must have length >= 2")
        for left, right in zip(path, path[1:]):
            if arrows[right].tgt != arrows[left].src:
                raise _fail(
                    text, "relations", name,
                    f"path is not composable at {arrows[right].label} -> {arrows[left].label}",
                )
        ends.add((arrows[path[-1]].src, arrows[path[0]].tgt))
    if len(ends) != 1:
        raise _fail(text, "relations", name, "relation terms are not parallel paths")
    return rel


def parse_spec(text: str, bound_override: Bound | None = None, q_override: int | None = None) -> HallSpec:
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    cp.optionxform = str  # keep key case
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise SpecError(f"parse error: {exc}") from exc

    for sec in cp.sections():
        if sec not in {"field", "quiver", "relations", "subcategory", "bicharacter", "bounds", "meta"}:
            raise _fail(text, sec, None, "unknown section")
    if not cp.has_section("quiver"):
        raise SpecError("missing [quiver] section")

    try:
        q = int(cp.get("field", "q", fallback="2"))
    except ValueError:
        raise _fail(text, "field", "q", "q must be an integer") from None
    if q_override is not None:
        q = q_override

    vertices = tuple(_split_items(cp.get("quiver", "vertices", fallback="")))
    if not vertices:
        raise _fail(text, "quiver", "vertices", "no vertices declared")
    if len(set(vertices)) != len(vertices):
        raise _fail(text, "quiver", "vertices", "duplicate vertex labels")
    vidx = {v: i for i, v in enumerate(vertices)}
    arrows: list[Arrow] = []
    for item in _split_items(cp.get("quiver", "arrows", fallback="")):
        m = _ARROW_RE.match(item)
        if not m:
            raise _fail(text, "quiver", "arrows", f"malformed arrow {item!r} (expected 'label: src -> tgt')")
        label, s, t = m.groups()
        for end in (s, t):
            if end not in vidx:
                raise _fail(text, "quiver", "arrows", f"arrow {label} has dangling endpoint {end!r}")
        if any(a.label == label for a in arrows):
            raise _fail(text, "quiver", "arrows", f"duplicate arrow label {label!r}")
        arrows.append(Arrow(label, vidx[s], vidx[t]))
    hereditary = cp.get("quiver", "hereditary", fallback="false").strip().lower() in {"1", "true", "yes"}

    # bounds first: relations may mention D
    if bound_override is not None:
        bound = bound_override
    else:
        try:
            total = int(cp.get("bounds", "total", fallback="4"))
            caps_s = cp.get("bounds", "caps", fallback="").strip()
            caps = _int_vector(caps_s) if caps_s else None
        except ValueError:
            raise _fail(text, "bounds", None, "bounds must be integers") from None
        bound = Bound(total, caps)
    if bound.caps is not None and len(bound.caps) != len(vertices):
        raise _fail(text, "bounds", "caps", "caps length differs from the number of vertices")
    if bound.total < 1:
        raise _fail(text, "bounds", "total", "bound must be at least 1")

    relations = []
    if cp.has_section("relations"):
        for name, value in cp.items("relations"):
            relations.append(_parse_relation(text, name, value, arrows, bound.total))

    presentation_kwargs = {}
    source = cp.get("bicharacter", "source", fallback="euler" if hereditary else "trivial").strip().lower()
    if source in {"euler", "euler-from-quiver"}:
        source = "euler"
    elif source == "matrix":
        rows = [r for r in cp.get("bicharacter", "matrix", fallback="").split(";") if r.strip()]
        try:
            B = tuple(_int_vector(r) for r in rows)
        except ValueError:
            raise _fail(text, "bicharacter", "matrix", "matrix entries must be integers") from None
        if len(B) != len(vertices) or any(len(r) != len(vertices) for r in B):
            raise _fail(text, "bicharacter", "matrix", "matrix must be square of size #vertices")
        presentation_kwargs["bicharacter_matrix"] = B
    elif source != "trivial":
        raise _fail(text, "bicharacter", "source", f"unknown bicharacter source {source!r}")

    qv = QuiverPresentation(
        vertices=vertices,
        arrows=tuple(arrows),
        relations=tuple(relations),
        hereditary=hereditary,
        bicharacter=source,
        **presentation_kwargs,
    )
    if hereditary and (relations or not qv.is_acyclic()):
        raise _fail(
            text, "quiver", "hereditary",
            "hereditary = true requires an acyclic quiver without relations",
        )
    if source == "euler" and not hereditary:
        raise _fail(text, "bicharacter", "source", "the Euler bicharacter needs a hereditary presentation")

    sub = SubcategorySpec()
    if cp.has_section("subcategory"):
        gens_s = cp.get("subcategory", "generators", fallback="").strip()
        if gens_s:
            try:
                gens = tuple(_int_vector(g) for g in gens_s.split(";") if g.strip())
            except ValueError:
                raise _fail(text, "subcategory", "generators", "generators must be integer vectors") from None
            for g in gens:
                if len(g) != len(vertices) or min(g) < 0 or not any(g):
                    raise _fail(text, "subcategory", "generators", f"bad generator {g}")
            sub = SubcategorySpec("submonoid", gens)

    return HallSpec(
        quiver=qv,
        q=q,
        subcategory=sub,
        bound=bound,
        name=cp.get("meta", "name", fallback=""),
        description=cp.get("meta", "description", fallback=""),
    )


def parse_quiver_spec(text: str) -> QuiverPresentation:
    return parse_spec(text).quiver


# ---------------------------------------------------------------------------
# evaluation


def path_matrix(mats: Sequence[np.ndarray], path: Sequence[int], dim: Sequence[int],
                arrows: Sequence[Arrow], F: FieldSpec) -> np.ndarray:
    """Product of arrow matrices along ``path`` (leftmost label applied last)."""
    out = None
    for k in reversed(path):
        out = mats[k] if out is None else F.matmul(mats[k], out)
    return out


def relation_value(qv: QuiverPresentation, mats: Sequence[np.ndarray], dim: Sequence[int],
                   rel: Relation, F: FieldSpec) -> np.ndarray:
    s, t = rel.source(qv.arrows), rel.target(qv.arrows)
    total = np.zeros((dim[t], dim[s]), dtype=np.int64)
    for coeff, path in rel.terms:
        c = F.from_int(coeff)
        if c == 0:
            continue
        total = F.add[total, F.mul[c, path_matrix(mats, path, dim, qv.arrows, F)]]
    return total


def satisfies_relations(qv: QuiverPresentation, mats: Sequence[np.ndarray], dim: Sequence[int],
                        F: FieldSpec) -> bool:
    return all(not relation_value(qv, mats, dim, r, F).any() for r in qv.relations)


def euler_form(qv: QuiverPresentation, d: Sequence[int], e: Sequence[int]) -> int:
    if not qv.hereditary:
        raise SpecError("the Euler form is only defined here for hereditary presentations")
    return sum(x * y for x, y in zip(d, e)) - sum(d[a.src] * e[a.tgt] for a in qv.arrows)


def bilinear_exponent(qv: QuiverPresentation, d: Sequence[int], e: Sequence[int]) -> int:
    """Exponent ``x`` with ``chi(d, e) = q**(-x)``."""
    if qv.bicharacter == "euler":
        return euler_form(qv, d, e)
    if qv.bicharacter == "matrix":
        B = qv.bicharacter_matrix
        return sum(d[i] * B[i][j] * e[j] for i in range(qv.n) for j in range(qv.n))
    return 0


def add_dims(d: Sequence[int], e: Sequence[int]) -> DimVector:
    return tuple(x + y for x, y in zip(d, e))


def sub_dims(d: Sequence[int], e: Sequence[int]) -> DimVector:
    return tuple(x - y for x, y in zip(d, e))


def dims_below(d: Sequence[int]) -> Iterator[DimVector]:
    """Every ``e`` with ``0 <= e <= d`` componentwise."""
    return itertools.product(*(range(x + 1) for x in d))


def format_dim(d: Sequence[int]) -> str:
    return ".".join(str(x) for x in d)


def parse_dim(s: str) -> DimVector:
    return tuple(int(x) for x in re.split(r"[.,\s]+", s.strip().strip("()")) if x)


def is_path_nilpotent(qv: QuiverPresentation, F: FieldSpec, max_len: int = 12) -> bool:
    """True if every path of some length lies in the relation ideal.

    Then every representation is nilpotent and all simples are vertex simples.
    Only homogeneous relations are handled; otherwise the answer is False.
    """
    if qv.is_acyclic():
        return True
    for r in qv.relations:
        if len({len(p) for _, p in r.terms}) != 1:
            return False
    arrows = qv.arrows
    # paths of length L, as tuples (leftmost first)
    paths_by_len: dict[int, list[tuple[int, ...]]] = {1: [(k,) for k in range(len(arrows))]}
    for L in range(2, max_len + 1):
        prev = paths_by_len[L - 1]
        cur = [(k,) + p for p in prev for k in range(len(arrows)) if arrows[k].src == arrows[p[0]].tgt]
        if not cur:
            return True
        if len(cur) > 4000:
            return False
        paths_by_len[L] = cur
        index = {p: i for i, p in enumerate(cur)}
        rows = []
        for r in qv.relations:
            rl = len(r.terms[0][1])
            if rl > L:
                continue
            for left in range(L - rl + 1):
                right = L - rl - left
                lefts = paths_by_len.get(left, [()]) if left else [()]
                rights = paths_by_len.get(right, [()]) if right else [()]
                for u in lefts:
                    for v in rights:
                        row = np.zeros(len(cur), dtype=np.int64)
                        ok = False
                        for coeff, p in r.terms:
                            full = u + p + v
                            if full in index:
                                row[index[full]] = F.add[row[index[full]], F.from_int(coeff)]
                                ok = True
                        if ok and row.any():
                            rows.append(row)
        if rows:
            from .gfla import rank

            if rank(np.array(rows), F) == len(cur):
                return True
    return False


def bundled_spec_names() -> list[str]:
    from importlib import resources

    root = resources.files("hallkit") / "specs"
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".ini"))


def read_spec_text(source: str) -> str:
    """Text of a spec given a file path or the name of a bundled spec."""
    from importlib import resources
    from pathlib import Path

    p = Path(source)
    if p.is_file():
        return p.read_text()
    res = resources.files("hallkit") / "specs" / f"{source}.ini"
    if res.is_file():
        return res.read_text()
    raise SpecError(f"no spec file or bundled spec named {source!r}")


def load_spec(source: str, bound_override: Bound | None = None, q_override: int | None = None) -> HallSpec:
    return parse_spec(read_spec_text(source), bound_override, q_override)
