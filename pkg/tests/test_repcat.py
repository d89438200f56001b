import itertools
from collections import Counter

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as hs

from hallkit import gfla
from hallkit import structure as st
from hallkit.gfla import field_make
from hallkit.quiver import Bound, load_spec
from hallkit.regression import named_objects, rep_class, setup, sum_class
from hallkit.repcat import (
    BudgetExceeded,
    RepCategory,
    _unflatten,
    aut_order,
    class_id_str,
    compose_flat,
    direct_sum,
    is_indecomposable,
    is_isomorphic,
    is_valid,
    make_rep,
    parse_class_id,
    simple_rep,
    transport,
)

SLOW = settings(max_examples=20, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])


def a2(q=2):
    return setup("a2", q)


def jordan_rep(cat, block_sizes):
    """Direct sum of nilpotent Jordan blocks."""
    n = sum(block_sizes)
    m = np.zeros((n, n), dtype=np.int64)
    pos = 0
    for b in block_sizes:
        for i in range(b - 1):
            m[pos + i + 1, pos + i] = 1
        pos += b
    return make_rep(cat.qv, (n,), {"l": m})


def test_class_id_round_trip():
    assert class_id_str(((1, 0, 2), 3)) == "1.0.2#3"
    assert parse_class_id("[1.0.2#3]") == ((1, 0, 2), 3)
    with pytest.raises(ValueError):
        parse_class_id("1.0#x")


@pytest.mark.parametrize("q", [2, 3])
def test_hom_dims_a2(q):
    _, cat, _ = a2(q)
    S1, S2 = simple_rep(cat.qv, 0), simple_rep(cat.qv, 1)
    P1 = make_rep(cat.qv, (1, 1), {"a": [[1]]})
    assert cat.hom(S1, S1).dim == 1
    assert cat.hom(S1, S2).dim == 0
    assert cat.hom(P1, S1).dim == 1
    assert cat.hom(S2, P1).dim == 1 and cat.hom(P1, S2).dim == 0


def test_hom_basis_intertwines():
    _, cat, H = setup("square", 3)
    F = cat.F
    for d in [(1, 1, 1, 1), (1, 1, 0, 1)]:
        reps = [c.rep for c in cat.table(d).classes]
        for M, N in itertools.product(reps, repeat=2):
            hb = cat.hom(M, N)
            for g in hb.basis:
                for a, Ma, Na in zip(cat.qv.arrows, M.mats, N.mats):
                    assert (F.matmul(g[a.tgt], Ma) == F.matmul(Na, g[a.src])).all()


def test_tube_e1_lambda_not_isomorphic():
    _, cat, _ = setup("tube2", 2)
    E = [make_rep(cat.qv, (1, 1, 1), {"a": [[1]], "b": [[1]], "c": [[lam]]}) for lam in range(2)]
    assert is_isomorphic(cat.qv, E[0], E[0], cat.F)
    assert not is_isomorphic(cat.qv, E[0], E[1], cat.F)
    assert cat.identify(E[0]) != cat.identify(E[1])


def test_conjugated_rep_is_isomorphic():
    _, cat, _ = setup("kronecker", 3)
    M = make_rep(cat.qv, (2, 2), {"x": [[1, 0], [0, 1]], "y": [[0, 1], [0, 0]]})
    g = [np.array([[1, 2], [0, 1]]), np.array([[2, 0], [1, 1]])]
    N = transport(cat.qv, M, g, cat.F)
    assert not (N.mats[1] == M.mats[1]).all()
    assert is_isomorphic(cat.qv, M, N, cat.F)
    assert cat.identify(M) == cat.identify(N)


@pytest.mark.parametrize("q", [2, 3])
def test_aut_orders(q):
    _, cat, _ = a2(q)
    F = cat.F
    S1 = simple_rep(cat.qv, 0)
    assert aut_order(cat.qv, S1, F) == q - 1
    assert aut_order(cat.qv, direct_sum(cat.qv, [S1, S1]), F) == (q**2 - 1) * (q**2 - q)
    _, jc, _ = setup("jordan", q)
    assert aut_order(jc.qv, jordan_rep(jc, [2]), jc.F) == q * (q - 1)


def test_aut_budget_guard():
    _, cat, _ = a2(2)
    S1 = simple_rep(cat.qv, 0)
    big = direct_sum(cat.qv, [S1] * 3)
    with pytest.raises(BudgetExceeded):
        aut_order(cat.qv, big, cat.F, budget=2**8)


def test_indecomposable_flags():
    _, cat, _ = a2(2)
    S1, S2 = simple_rep(cat.qv, 0), simple_rep(cat.qv, 1)
    assert is_indecomposable(cat.qv, S1, cat.F)
    assert not is_indecomposable(cat.qv, direct_sum(cat.qv, [S1, S2]), cat.F)
    _, jc, _ = setup("jordan", 2)
    assert is_indecomposable(jc.qv, jordan_rep(jc, [2]), jc.F)


def test_decompose():
    _, cat, _ = a2(2)
    S1, S2 = simple_rep(cat.qv, 0), simple_rep(cat.qv, 1)
    s1, s2 = cat.identify(S1), cat.identify(S2)
    assert cat.decompose(direct_sum(cat.qv, [S1, S2])) == Counter([s1, s2])
    P1 = make_rep(cat.qv, (1, 1), {"a": [[1]]})
    assert cat.decompose(P1) == Counter([cat.identify(P1)])
    _, jc, _ = setup("jordan", 2)
    M = jordan_rep(jc, [2, 1])
    assert jc.decompose(M) == Counter([jc.identify(jordan_rep(jc, [2])), jc.identify(jordan_rep(jc, [1]))])


@pytest.mark.parametrize("q", [2, 3])
def test_table_sizes(q):
    _, jc, _ = setup("jordan", q)
    t = jc.table((2,))
    assert len(t) == 2 and len(t.indecomposables()) == 1
    # nilpotent classes are partitions
    assert [len(jc.table((n,))) for n in range(1, 5)] == [1, 2, 3, 5]
    _, kc, _ = setup("kronecker", q)
    assert len(kc.table((1, 1))) == q + 2
    assert len(kc.table((1, 1)).indecomposables()) == q + 1
    _, ac, _ = a2(q)
    assert len(ac.table((1, 1))) == 2
    assert len(ac.table((0, 0))) == 1


def test_square_has_fourteen_indecomposables():
    _, cat, H = setup("square", 2, Bound(6, (2, 2, 2, 2)))
    ind = [c for d in H.dims() for c in H.classes(d) if cat.record(c).indecomposable]
    assert len(ind) == 14
    # only P1 and I4 share a dimension vector
    shared = Counter(c[0] for c in ind)
    assert [d for d, n in shared.items() if n > 1] == [(1, 1, 1, 1)]
    assert max(shared.values()) == 2


def test_subrep_counts():
    q = 2
    _, cat, _ = a2(q)
    o = named_objects("a2", cat)
    assert cat.subrep_count(o["P1"], o["S2"], o["S1"]) == 1
    assert cat.subrep_count(o["P1"], o["S1"], o["S2"]) == 0
    _, jc, _ = setup("jordan", q)
    I1 = jc.identify(jordan_rep(jc, [1]))
    I11 = jc.identify(jordan_rep(jc, [1, 1]))
    assert jc.subrep_count(I11, I1, I1) == q + 1
    zero = (jc.qv.zero(), 0)
    for c in jc.table((2,)).ids():
        assert jc.subrep_count(c, zero, c) == 1


def test_composition_series():
    _, cat, H = a2(2)
    o = named_objects("a2", cat)
    assert st.composition_series(H, o["P1"]) == [o["S1"], o["S2"]]
    assert st.composition_series(H, o["S1"]) == [o["S1"]]
    _, bc, B = setup("b2", 2)
    X1 = sum_class(bc, rep_class(bc, (1, 0)), rep_class(bc, (0, 1)), rep_class(bc, (0, 1)))
    assert st.composition_series(B, X1) == [X1]


@pytest.mark.parametrize("name", ["a2", "jordan", "square", "cyclic1", "cyclic2", "tube2", "kronecker"])
def test_strategies_agree(name):
    spec = load_spec(name, q_override=2)
    F = field_make(2)
    ex = RepCategory(spec.quiver, F, spec.subcategory, strategy="exhaustive")
    auto = RepCategory(spec.quiver, F, spec.subcategory)
    for d in spec.bound.dims(spec.quiver.n):
        if ex.F.q ** sum(d[a.tgt] * d[a.src] for a in spec.quiver.arrows) > 2**14:
            continue
        te, ta = ex.table(d), auto.table(d)
        assert len(te) == len(ta)
        # every exhaustive representative lands on a distinct class of the other table
        hits = {auto.identify(c.rep) for c in te.classes}
        assert len(hits) == len(ta)
        for c in te.classes:
            other = auto.record(auto.identify(c.rep))
            assert other.aut_order == c.aut_order
            assert other.indecomposable == c.indecomposable


@pytest.mark.parametrize("name", ["a2", "jordan", "square", "cyclic1", "tube2", "kronecker", "three-vertex"])
def test_table_aut_orders_match_exhaustive_count(name):
    _, cat, H = setup(name, 2)
    for d in H.dims():
        for c in cat.table(d).classes:
            E = cat.hom(c.rep, c.rep)
            if 2**E.dim > 2**16:
                continue
            assert aut_order(cat.qv, c.rep, cat.F) == c.aut_order, class_id_str(c.cid)
            assert is_indecomposable(cat.qv, c.rep, cat.F) == c.indecomposable


def _maps(cat, M, N, want_rank):
    """All homomorphisms M -> N whose vertex blocks have the requested full rank."""
    hb = cat.hom(M, N)
    F = cat.F
    out = []
    for coeffs in itertools.product(range(F.q), repeat=hb.dim):
        v = F.combine(np.array(coeffs, dtype=np.int64), hb.flat) if hb.dim else np.zeros(hb.flat.shape[1:], int)
        blocks = _unflatten(v, M.dim, N.dim)
        if all(gfla.rank(b, F) == want_rank(i) for i, b in enumerate(blocks) if b.size):
            out.append(v)
    return out


def exact_pairs(cat, X, A, B):
    """Pairs (mono B -> X, epi X -> A) that form short exact sequences."""
    F = cat.F
    monos = _maps(cat, B, X, lambda i: B.dim[i])
    epis = _maps(cat, X, A, lambda i: A.dim[i])
    n = 0
    for f in monos:
        for g in epis:
            if not compose_flat(F, g, f, B.dim, X.dim, A.dim).any():
                n += 1
    return n


@pytest.mark.parametrize("name,d", [("a2", (1, 1)), ("a2", (2, 1)), ("jordan", (2,)), ("jordan", (3,)),
                                    ("cyclic1", (1, 1)), ("tube2", (1, 1, 1))])
def test_hall_numbers_count_exact_sequences(name, d):
    _, cat, H = setup(name, 2)
    for x in H.classes(d):
        X = cat.record(x).rep
        lhs = rhs = 0
        for e in itertools.product(*(range(v + 1) for v in d)):
            f = tuple(a - b for a, b in zip(d, e))
            for b in H.classes(e):
                for a in H.classes(f):
                    A, B = cat.record(a).rep, cat.record(b).rep
                    lhs += cat.subrep_count(x, b, a) * H.aut(a) * H.aut(b)
                    rhs += exact_pairs(cat, X, A, B)
        assert lhs == rhs


@pytest.mark.parametrize("name,q", [("a2", 2), ("a2", 3), ("jordan", 2), ("jordan", 3), ("square", 2),
                                    ("cyclic1", 2), ("cyclic2", 3), ("kronecker", 2), ("tube2", 2)])
def test_orbit_stabilizer(name, q):
    _, cat, H = setup(name, q)
    for d in H.dims(include_zero=True):
        try:
            count = cat.count_valid_tuples(d)
        except BudgetExceeded:
            continue
        assert sum(cat.group_order(d) // c.aut_order for c in cat.table(d).classes) == count


def test_submonoid_tables_empty_outside_monoid():
    _, cat, _ = setup("b2", 2)
    assert cat.classes_in_sub((1, 1)) == []
    assert len(cat.classes_in_sub((1, 2))) == len(cat.table((1, 2)))


@pytest.fixture(scope="module")
def kron3():
    return setup("kronecker", 3)


@SLOW
@given(data=hs.data())
def test_transport_preserves_class(kron3, data):
    _, cat, H = kron3
    F = cat.F
    d = data.draw(hs.sampled_from([(1, 1), (1, 2), (2, 1), (2, 2)]))
    c = data.draw(hs.sampled_from(H.classes(d)))
    rep = cat.record(c).rep
    rng = np.random.default_rng(data.draw(hs.integers(0, 2**32 - 1)))
    g = []
    for n in d:
        while True:
            m = rng.integers(0, F.q, size=(n, n))
            if gfla.rank(m, F) == n:
                break
        g.append(m)
    N = transport(cat.qv, rep, g, F)
    assert is_valid(cat.qv, N, F)
    assert cat.identify(N) == c
    assert is_isomorphic(cat.qv, rep, N, F) and is_isomorphic(cat.qv, N, rep, F)


@SLOW
@given(data=hs.data())
def test_isomorphism_is_equivalence(kron3, data):
    _, cat, H = kron3
    reps = [cat.record(c).rep for c in H.classes((1, 1))]
    x, y, z = (data.draw(hs.sampled_from(reps)) for _ in range(3))
    iso = lambda m, n: is_isomorphic(cat.qv, m, n, cat.F)  # noqa: E731
    assert iso(x, x)
    assert iso(x, y) == iso(y, x)
    if iso(x, y) and iso(y, z):
        assert iso(x, z)
    assert iso(x, y) == (x == y)


@SLOW
@given(data=hs.data())
def test_decompose_is_order_independent(data):
    _, cat, H = setup("square", 2)
    pool = [c for d in H.dims() if sum(d) <= 2 for c in H.classes(d) if cat.record(c).indecomposable]
    parts = data.draw(hs.lists(hs.sampled_from(pool), min_size=1, max_size=3))
    total = tuple(sum(p[0][i] for p in parts) for i in range(4))
    if not Bound(4, (1, 1, 1, 1)).contains(total):
        return
    perm = data.draw(hs.permutations(parts))
    reps = [cat.record(p).rep for p in parts]
    prep = [cat.record(p).rep for p in perm]
    assert cat.decompose(direct_sum(cat.qv, reps)) == cat.decompose(direct_sum(cat.qv, prep)) == Counter(parts)
