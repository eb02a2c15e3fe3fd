import random
from itertools import permutations, product

import pytest

from catcsp.copresheaf import isomorphic
from catcsp.corpus import (
    multidigraph_edges,
    multidigraphs,
    random_diagram,
    random_digraph,
    random_formula,
    random_sentence,
    seeded,
    size_profile,
)
from catcsp.fincat import digraph_category, graph_category
from catcsp.pp import EqAtom, FunAtom, RelAtom


def iso_classes(n, m):
    """Multidigraphs on n vertices with exactly m edges, up to relabelling."""
    pairs = [(u, v) for u in range(n) for v in range(n)]
    seen = set()
    for counts in product(range(m + 1), repeat=len(pairs)):
        if sum(counts) != m:
            continue
        c = {p: k for p, k in zip(pairs, counts) if k}
        seen.add(min(tuple(sorted(((q[u], q[v]), k) for (u, v), k in c.items())) for q in permutations(range(n))))
    return len(seen)


def test_small_counts():
    # one vertex: only loops; two vertices, one edge: a loop or an arc
    assert len(list(multidigraph_edges(1, 3, min_vertices=1))) == 4
    assert sum(1 for n, e in multidigraph_edges(2, 1, min_vertices=2) if len(e) == 1) == 2


@pytest.mark.parametrize("n,m", [(2, 2), (2, 3), (3, 1), (3, 2), (4, 1)])
def test_counts_match_brute_force(n, m):
    got = sum(1 for k, e in multidigraph_edges(n, m, min_vertices=n) if len(e) == m)
    assert got == iso_classes(n, m)


def test_totals_up_to_five_vertices():
    totals = [len(multidigraphs(5, m)) for m in range(3)]
    assert totals == [5, 14, 53]


def test_no_isomorphic_duplicates():
    Xs = multidigraphs(3, 2)
    for i, X in enumerate(Xs):
        for Y in Xs[i + 1:]:
            assert not isomorphic(X, Y)


def test_labelled_enumeration_is_larger():
    assert len(multidigraphs(2, 1, up_to_iso=False)) == 1 + 1 + 1 + 4


def test_random_digraph():
    rng = seeded(4)
    X = random_digraph(4, 6, rng, loops=False)
    assert len(X.set_of("E")) == 6
    s, t = X.maps[X.shape.mor("s")], X.maps[X.shape.mor("t")]
    assert all(s[e] != t[e] for e in range(6))
    assert random_digraph(1, 3, rng, loops=False).set_of("E") == ()


def test_seeded_is_reproducible():
    a = [random_digraph(3, 3, seeded(9)).sets for _ in range(2)]
    assert a[0] == a[1]


@pytest.mark.parametrize("C", [digraph_category(), graph_category()])
def test_random_diagrams_are_functors(C):
    rng = random.Random(2)
    for _ in range(20):
        X = random_diagram(C, rng, max_size=3, min_size=1)
        assert X.validate()
        assert all(1 <= len(s) <= 3 for s in X.sets)


def test_random_formula_shape():
    rng = random.Random(0)
    phi = random_formula([("E", 2), ("R", 3)], rng, free=2, bound=2, atoms=6)
    assert phi.free == ("x1", "x2") and phi.bound == ("u1", "u2")
    for a in phi.atoms:
        assert isinstance(a, (RelAtom, EqAtom))
        if isinstance(a, RelAtom):
            assert len(a.args) == {"E": 2, "R": 3}[a.rel]
    qf = random_formula([("E", 2)], rng, bound=0, equalities=False)
    assert qf.quantifier_free and all(isinstance(a, RelAtom) for a in qf.atoms)


def test_random_sentence_is_well_sorted():
    C = graph_category()
    rng = random.Random(1)
    for _ in range(20):
        phi = random_sentence(C, rng, variables=3, atoms=4)
        assert phi.free == ()
        for a in phi.atoms:
            if isinstance(a, FunAtom):
                f = C.arrows[C.mor(a.path[0])]
                assert phi.sorts[a.arg] == C.objects[f.source]
                assert phi.sorts[a.value] == C.objects[f.target]
            else:
                assert phi.sorts[a.left] == phi.sorts[a.right]


def test_size_profile():
    assert size_profile(multidigraphs(1, 1)) == [(1, 0), (1, 1)]
