"""
Hall algebra of a classified category: product, coproduct, Green's pairing.

Conventions
-----------
``[A][B] = sum_C F_{A,B}^C [C]`` where ``F_{A,B}^C`` counts subobjects
``U <= C`` with ``U ~ B`` and ``C/U ~ A``.  The coproduct is

    Delta[C] = sum F^{A,B}_C [A] (x) [B],
    F^{A,B}_C = |Aut A| |Aut B| / |Aut C| * F_{B,A}^C,

so the left tensor factor is the subobject.  The pairing on tensors pairs
the outer and the inner factors: <a (x) b, c (x) d> = <a, d><b, c>.
"""

from __future__ import annotations

import itertools
import random
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping

from .quiver import Bound, DimVector, add_dims, bilinear_exponent, euler_form, sub_dims
from .repcat import ClassId, RepCategory, class_id_str


class BoundError(ValueError):
    """A result would leave the configured dimension bound."""


def _clean(d: Mapping) -> dict:
    return {k: Fraction(v) for k, v in d.items() if v != 0}


class HallElement:
    """Finite Q-linear combination of isomorphism classes."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[ClassId, Fraction | int] | None = None):
        self.terms: dict[ClassId, Fraction] = _clean(terms or {})

    @classmethod
    def basis(cls, cid: ClassId) -> "HallElement":
        return cls({cid: 1})

    def __add__(self, other: "HallElement") -> "HallElement":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return HallElement(out)

    def __neg__(self) -> "HallElement":
        return HallElement({k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "HallElement") -> "HallElement":
        return self + (-other)

    def scale(self, c) -> "HallElement":
        c = Fraction(c)
        return HallElement({k: c * v for k, v in self.terms.items()})

    def __rmul__(self, c) -> "HallElement":
        if isinstance(c, (int, Fraction)):
            return self.scale(c)
        return NotImplemented

    def __eq__(self, other: object) -> bool:
        return isinstance(other, HallElement) and self.terms == other.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __iter__(self) -> Iterator[tuple[ClassId, Fraction]]:
        return iter(sorted(self.terms.items()))

    def dims(self) -> set[DimVector]:
        return {k[0] for k in self.terms}

    def component(self, d) -> "HallElement":
        d = tuple(d)
        return HallElement({k: v for k, v in self.terms.items() if k[0] == d})

    def is_homogeneous(self) -> bool:
        return len(self.dims()) <= 1

    def __repr__(self) -> str:
        return format_element(self)


class TensorElement:
    """Finite combination of pure tensors ``[A] (x) [B]``."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[tuple[ClassId, ClassId], Fraction | int] | None = None):
        self.terms: dict[tuple[ClassId, ClassId], Fraction] = _clean(terms or {})

    def __add__(self, other: "TensorElement") -> "TensorElement":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return TensorElement(out)

    def __neg__(self) -> "TensorElement":
        return TensorElement({k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "TensorElement") -> "TensorElement":
        return self + (-other)

    def scale(self, c) -> "TensorElement":
        c = Fraction(c)
        return TensorElement({k: c * v for k, v in self.terms.items()})

    def __eq__(self, other: object) -> bool:
        return isinstance(other, TensorElement) and self.terms == other.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __iter__(self):
        return iter(sorted(self.terms.items()))

    def __repr__(self) -> str:
        return format_tensor(self)

    @classmethod
    def pure(cls, x: HallElement, y: HallElement) -> "TensorElement":
        return cls({(a, b): u * v for a, u in x.terms.items() for b, v in y.terms.items()})


def format_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_element(x: HallElement) -> str:
    if not x.terms:
        return "0"
    return " + ".join(f"{format_coeff(v)}*[{class_id_str(k)}]" for k, v in x).replace("+ -", "- ")


def format_tensor(t: TensorElement) -> str:
    if not t.terms:
        return "0"
    parts = [f"{format_coeff(v)}*[{class_id_str(a)}]x[{class_id_str(b)}]" for (a, b), v in t]
    return " + ".join(parts).replace("+ -", "- ")


class HallAlgebra:
    """Structure constants and operations for one category within a bound."""

    def __init__(self, cat: RepCategory, bound: Bound):
        self.cat = cat
        self.bound = bound
        self.q = cat.F.q
        self._prod: dict[tuple[ClassId, ClassId], dict[ClassId, int]] = {}
        self._coprod: dict[ClassId, TensorElement] = {}

    # -- bookkeeping --------------------------------------------------------

    @property
    def qv(self):
        return self.cat.qv

    def dims(self, include_zero: bool = False) -> list[DimVector]:
        """Dimension vectors within the bound that belong to the subcategory."""
        return [d for d in self.bound.dims(self.qv.n, include_zero) if self.cat.in_sub(d)]

    def classes(self, d) -> list[ClassId]:
        return [c.cid for c in self.cat.classes_in_sub(tuple(d))]

    def one(self) -> HallElement:
        return HallElement.basis((self.qv.zero(), 0))

    def cls(self, cid: ClassId) -> HallElement:
        self._check(cid[0])
        return HallElement.basis(cid)

    def _check(self, d) -> None:
        d = tuple(d)
        if not self.bound.contains(d):
            raise BoundError(f"dimension vector {class_dim(d)} is outside the bound {self.bound.describe()}")
        if not self.cat.in_sub(d):
            raise BoundError(f"dimension vector {class_dim(d)} is not in the subcategory")

    def aut(self, cid: ClassId) -> int:
        return self.cat.record(cid).aut_order

    # -- structure constants ------------------------------------------------

    def hall_number(self, a: ClassId, b: ClassId, x: ClassId) -> int:
        """``F_{A,B}^X``: subobjects of ``X`` isomorphic to ``B`` with quotient ``A``."""
        if add_dims(a[0], b[0]) != x[0]:
            return 0
        return self.cat.subrep_count(x, b, a)

    def dual_hall_number(self, a: ClassId, b: ClassId, c: ClassId) -> Fraction:
        return Fraction(self.aut(a) * self.aut(b), self.aut(c)) * self.hall_number(b, a, c)

    def _mul_basis(self, a: ClassId, b: ClassId) -> dict[ClassId, int]:
        key = (a, b)
        got = self._prod.get(key)
        if got is not None:
            return got
        d = add_dims(a[0], b[0])
        self._check(d)
        out = {}
        for x in self.classes(d):
            n = self.cat.subrep_count(x, b, a)
            if n:
                out[x] = n
        self._prod[key] = out
        return out

    def product(self, x: HallElement, y: HallElement) -> HallElement:
        acc: dict[ClassId, Fraction] = defaultdict(Fraction)
        for a, u in x.terms.items():
            for b, v in y.terms.items():
                for c, n in self._mul_basis(a, b).items():
                    acc[c] += u * v * n
        return HallElement(acc)

    def mul(self, *xs: HallElement) -> HallElement:
        out = self.one()
        for x in xs:
            out = self.product(out, x)
        return out

    def power(self, x: HallElement, n: int) -> HallElement:
        return self.mul(*([x] * n))

    def bracket(self, x: HallElement, y: HallElement, t=1) -> HallElement:
        """``[x, y]_t = xy - t yx``."""
        return self.product(x, y) - self.product(y, x).scale(t)

    def coproduct_class(self, c: ClassId) -> TensorElement:
        got = self._coprod.get(c)
        if got is not None:
            return got
        cat = self.cat
        acc: dict[tuple[ClassId, ClassId], Fraction] = {}
        autc = self.aut(c)
        for e in _below(c[0]):
            if not cat.in_sub(e) or not cat.in_sub(sub_dims(c[0], e)):
                continue
            for (u, quo), n in cat.profile(c, e).items():
                acc[(u, quo)] = Fraction(n * self.aut(u) * self.aut(quo), autc)
        out = TensorElement(acc)
        self._coprod[c] = out
        return out

    def coproduct(self, x: HallElement) -> TensorElement:
        acc = TensorElement()
        for c, v in x.terms.items():
            acc = acc + self.coproduct_class(c).scale(v)
        return acc

    def reduced_coproduct(self, x: HallElement) -> TensorElement:
        zero = (self.qv.zero(), 0)
        acc: dict = {}
        for (a, b), v in self.coproduct(x).terms.items():
            if a == zero or b == zero:
                continue
            acc[(a, b)] = v
        return TensorElement(acc)

    def counit(self, x: HallElement) -> Fraction:
        return x.terms.get((self.qv.zero(), 0), Fraction(0))

    # -- tensors ------------------------------------------------------------

    def delta_left(self, t: TensorElement) -> dict:
        """``(Delta (x) id) t`` as a dict keyed by class triples."""
        out: dict = defaultdict(Fraction)
        for (a, b), v in t.terms.items():
            for (a1, a2), w in self.coproduct_class(a).terms.items():
                out[(a1, a2, b)] += v * w
        return {k: v for k, v in out.items() if v}

    def delta_right(self, t: TensorElement) -> dict:
        out: dict = defaultdict(Fraction)
        for (a, b), v in t.terms.items():
            for (b1, b2), w in self.coproduct_class(b).terms.items():
                out[(a, b1, b2)] += v * w
        return {k: v for k, v in out.items() if v}

    def chi(self, d, e) -> Fraction:
        """Bicharacter on dimension vectors."""
        return euler_bicharacter(d, e, self.qv, self.q)

    def twisted_product(self, s: TensorElement, t: TensorElement) -> TensorElement:
        """``(a (x) b)(a' (x) b') = chi(|b|, |a'|) aa' (x) bb'``."""
        acc: dict = defaultdict(Fraction)
        for (a, b), u in s.terms.items():
            for (a2, b2), v in t.terms.items():
                coeff = u * v * self.chi(b[0], a2[0])
                for c1, n1 in self._mul_basis(a, a2).items():
                    for c2, n2 in self._mul_basis(b, b2).items():
                        acc[(c1, c2)] += coeff * n1 * n2
        return TensorElement(acc)

    # -- pairing ------------------------------------------------------------

    def green_pairing(self, x: HallElement, y: HallElement) -> Fraction:
        total = Fraction(0)
        for k, v in x.terms.items():
            w = y.terms.get(k)
            if w:
                total += v * w / self.aut(k)
        return total

    def tensor_pairing(self, s: TensorElement, t: TensorElement) -> Fraction:
        """``<a (x) b, c (x) d> = <a, d><b, c>``."""
        total = Fraction(0)
        for (a, b), u in s.terms.items():
            for (c, d), v in t.terms.items():
                if a == d and b == c:
                    total += u * v / (self.aut(a) * self.aut(b))
        return total

    # -- checks -------------------------------------------------------------

    def pairing_check(self, trials: int = 100, seed: int = 0) -> dict:
        """``<xy, z> = <x (x) y, Delta z>`` on random basis triples."""
        rng = random.Random(seed)
        dims = [d for d in self.dims(include_zero=True)]
        pairs = [(d, e) for d in dims for e in dims if self.bound.contains(add_dims(d, e))
                 and self.cat.in_sub(add_dims(d, e))]
        failures = []
        for _ in range(trials):
            d, e = rng.choice(pairs)
            a = rng.choice(self.classes(d))
            b = rng.choice(self.classes(e))
            c = rng.choice(self.classes(add_dims(d, e)))
            x, y, z = HallElement.basis(a), HallElement.basis(b), HallElement.basis(c)
            lhs = self.green_pairing(self.product(x, y), z)
            rhs = self.tensor_pairing(TensorElement.pure(x, y), self.coproduct(z))
            if lhs != rhs:
                failures.append({"x": class_id_str(a), "y": class_id_str(b), "z": class_id_str(c),
                                 "lhs": str(lhs), "rhs": str(rhs)})
        return {"trials": trials, "failures": failures, "pass": not failures}

    def green_identity_check(self, generators: Iterable[ClassId] | None = None) -> dict:
        """Twisted bialgebra identity ``Delta(xy) = Delta(x) Delta(y)`` on generator pairs."""
        if not self.qv.hereditary:
            raise ValueError("the twisted bialgebra identity is only asserted for hereditary specs")
        if self.cat.sub.mode != "full":
            raise ValueError("the twisted bialgebra identity is only asserted for mode=full")
        if generators is None:
            generators = [c for d in self.dims(include_zero=True) for c in self.classes(d)]
        gens = list(generators)
        components = []
        ok = True
        for a, b in itertools.product(gens, repeat=2):
            d = add_dims(a[0], b[0])
            if not self.bound.contains(d):
                continue
            x, y = HallElement.basis(a), HallElement.basis(b)
            lhs = self.coproduct(self.product(x, y))
            rhs = self.twisted_product(self.coproduct(x), self.coproduct(y))
            good = lhs == rhs
            ok &= good
            entry = {"x": class_id_str(a), "y": class_id_str(b), "pass": good}
            if not good:
                diff = lhs - rhs
                entry["counterexample"] = format_tensor(diff)
            components.append(entry)
        return {"pairs": len(components), "pass": ok, "results": components}

    def riedtmann_check(self) -> dict:
        """``#Hom(B,A) * sum_C F^{A,B}_C = q^{dim Hom(B,A) - <|B|,|A|>}`` for all pairs in bound."""
        if not self.qv.hereditary:
            raise ValueError("the Riedtmann count is only asserted for hereditary specs")
        failures = []
        count = 0
        for d in self.dims(include_zero=True):
            for e in self.dims(include_zero=True):
                f = add_dims(d, e)
                if not self.bound.contains(f) or not self.cat.in_sub(f):
                    continue
                for a in self.classes(d):
                    for b in self.classes(e):
                        h = self.cat.hom(self.cat.record(b).rep, self.cat.record(a).rep).dim
                        total = sum((self.dual_hall_number(a, b, c) for c in self.classes(f)), Fraction(0))
                        lhs = self.q**h * total
                        rhs = Fraction(self.q) ** (h - euler_form(self.qv, e, d))
                        count += 1
                        if lhs != rhs:
                            failures.append({"A": class_id_str(a), "B": class_id_str(b),
                                             "lhs": str(lhs), "rhs": str(rhs)})
        return {"pairs": count, "failures": failures, "pass": not failures}

    def associativity_check(self) -> dict:
        failures = []
        count = 0
        dims = self.dims(include_zero=False)
        for d1, d2, d3 in itertools.product(dims, repeat=3):
            tot = add_dims(add_dims(d1, d2), d3)
            if not self.bound.contains(tot):
                continue
            for a in self.classes(d1):
                for b in self.classes(d2):
                    for c in self.classes(d3):
                        x, y, z = (HallElement.basis(k) for k in (a, b, c))
                        count += 1
                        if self.product(self.product(x, y), z) != self.product(x, self.product(y, z)):
                            failures.append((class_id_str(a), class_id_str(b), class_id_str(c)))
        return {"triples": count, "failures": failures, "pass": not failures}

    def coassociativity_check(self) -> dict:
        failures = []
        count = 0
        for d in self.dims(include_zero=True):
            for c in self.classes(d):
                t = self.coproduct_class(c)
                count += 1
                if self.delta_left(t) != self.delta_right(t):
                    failures.append(class_id_str(c))
        return {"classes": count, "failures": failures, "pass": not failures}


def euler_bicharacter(d, e, qv, q: int) -> Fraction:
    """``q^{-<d,e>}`` (euler), ``q^{-d^T B e}`` (matrix) or ``1`` (trivial)."""
    if qv.bicharacter == "trivial":
        return Fraction(1)
    return Fraction(q) ** (-bilinear_exponent(qv, d, e))


def _below(d: DimVector) -> list[DimVector]:
    return sorted(itertools.product(*(range(x + 1) for x in d)))


def class_dim(d) -> str:
    return "(" + ",".join(str(x) for x in d) + ")"
