import random

import pytest

from catcsp.copresheaf import (
    check_naturality,
    complete_graph,
    cycle,
    digraph,
    directed_cycle,
    hom,
    hom_equivalent,
    isomorphic,
    loop,
    projection,
    ugraph,
    yoneda,
)
from catcsp.corpus import random_diagram, random_digraph
from catcsp.fincat import SizeCap, digraph_category, point, validate_category, validate_functor
from catcsp.findiag import FinDiagram, restrict
from catcsp.grothendieck import gl, gr
from catcsp.kan import (
    collage,
    functions,
    lan_eval,
    nerve,
    nerve_polymorphism,
    polymorphism,
    ran_eval,
    representable_minion,
    subdivision_gadget,
    verify_adjunction,
    yo_gadget,
    yoneda_extend,
)
from oracles import count_structure_homs, structure_power


def ucycle(n):
    return ugraph(range(n), [(i, (i + 1) % n) for i in range(n)])


def uclique(n):
    return ugraph(range(n), [(i, j) for i in range(n) for j in range(i + 1, n)])


def random_ugraph(n, m, rng):
    return ugraph(range(n), [(rng.randrange(n), rng.randrange(n)) for _ in range(m)])


def edge_relation(X):
    V, E = X.shape.obj("V"), X.shape.obj("E")
    s, t = X.shape.mor("s"), X.shape.mor("t")
    vs = X.sets[V]
    return list(vs), {"E": {(vs[X.maps[s][e]], vs[X.maps[t][e]]) for e in range(len(X.sets[E]))}}


def test_functions_enumerates_all_maps():
    assert list(functions(2, 2)) == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert list(functions(0, 3)) == [()]
    assert list(functions(2, 0)) == []


@pytest.mark.parametrize("k", [1, 2])
def test_representable_minion_is_functorial(k):
    T = representable_minion(k, [(), (0,), (0, 1)])
    assert T.validate()
    assert [T.size(i) for i in range(3)] == [0 if k else 1, 1, 2**k]


def test_ran_of_k3_small_arities():
    K3 = complete_graph(3)
    T = ran_eval(K3, K3, [(), (0,), (0, 1)])
    assert [T.size(i) for i in range(3)] == [0, 6, 12]
    assert T.validate()


def test_ran_arity_lookup():
    T = ran_eval(loop(), loop(), [(0,)])
    assert T.arity_index((0,)) == 0
    with pytest.raises(KeyError):
        T.arity_index((0, 1, 2))


def test_ran_respects_cap():
    with pytest.raises(SizeCap):
        ran_eval(complete_graph(3), complete_graph(3), [tuple(range(5))], cap=100)


@pytest.mark.parametrize("seed", range(12))
def test_ran_counts_match_power_oracle(seed):
    rng = random.Random(seed)
    # simple digraphs, so copresheaf homs are exactly edge-preserving vertex maps
    def simple(n, m):
        vs = range(n)
        es = {(rng.randrange(n), rng.randrange(n)) for _ in range(m)}
        return digraph(vs, sorted(es))

    A, B = simple(rng.randint(1, 3), rng.randint(0, 4)), simple(rng.randint(1, 3), rng.randint(0, 5))
    T = ran_eval(A, B, [(0,), (0, 1)])
    da, ra = edge_relation(A)
    db, rb = edge_relation(B)
    for i, k in enumerate([1, 2]):
        pd, pr = structure_power(da, ra, k)
        assert T.size(i) == count_structure_homs(pd, pr, db, rb)
    assert T.validate()


def test_polymorphism_is_natural():
    K3 = complete_graph(3)
    T = ran_eval(K3, K3, [(0, 1)])
    for k in range(T.size(0)):
        assert check_naturality(polymorphism(T, K3, K3, 0, k))


def test_lan_of_representable():
    S = digraph_category()
    A = directed_cycle(2)
    for o in ("V", "E"):
        X = yoneda(S, o)
        for n in (1, 2, 3):
            # el(yo s) has an initial object, so the colimit is N^{A(s)}
            assert len(lan_eval(A, X, range(n))) == n ** len(A.sets[S.obj(o)])


def test_lan_element_shape():
    A = complete_graph(2)
    X = digraph([0], [])
    out = lan_eval(A, X, "ab")
    assert len(out) == 4
    (s, x), phi = out[0]
    assert s == "V" and x == 0 and len(phi) == 2 and set(phi) <= {"a", "b"}


@pytest.mark.parametrize("seed", range(15))
def test_lan_against_collage_route(seed):
    rng = random.Random(seed)
    A = random_digraph(rng.randint(1, 2), rng.randint(0, 2), rng)
    X = random_digraph(rng.randint(0, 3), rng.randint(0, 3), rng)
    n = rng.randint(0, 3)
    N = FinDiagram.build(point(), {"*": list(range(n))}, {})
    K = collage(A, N)
    assert validate_category(K.category)
    assert validate_functor(K.left) and validate_functor(K.right)
    via = restrict(gl(gr(X).projection.then(K.left)), K.right)
    assert len(via.sets[0]) == len(lan_eval(A, X, range(n)))


def test_gadgets_validate():
    for G in (
        subdivision_gadget(),
        subdivision_gadget(directed=True),
        subdivision_gadget(2, directed=True),
        yo_gadget(digraph_category()),
    ):
        assert G.validate()
    with pytest.raises(ValueError):
        subdivision_gadget(0)


def test_subdivision_of_double_edge_is_hexagon():
    A = digraph([0, 1], [(0, 1), (0, 1)])
    assert isomorphic(yoneda_extend(subdivision_gadget(), A), ucycle(6))


def test_directed_subdivision_is_oriented():
    A = directed_cycle(2)
    out = yoneda_extend(subdivision_gadget(directed=True), A)
    assert isomorphic(out, directed_cycle(6))


def test_nerve_of_pentagon_is_k5():
    N = nerve(subdivision_gadget(), ucycle(5))
    assert [len(s) for s in N.sets] == [5, 40]
    assert hom_equivalent(N, complete_graph(5))
    assert not hom_equivalent(N, complete_graph(4))


def test_nerve_rejects_wrong_base():
    with pytest.raises(ValueError):
        nerve(subdivision_gadget(), cycle(5))


@pytest.mark.parametrize("seed", range(20))
def test_density(seed):
    rng = random.Random(seed)
    S = digraph_category()
    A = random_diagram(S, rng, max_size=3)
    assert isomorphic(yoneda_extend(yo_gadget(S), A), A)


@pytest.mark.parametrize("seed", range(20))
def test_adjunction_counts(seed):
    rng = random.Random(seed)
    A = random_digraph(rng.randint(1, 3), rng.randint(0, 3), rng)
    choice = seed % 3
    if choice == 0:
        G, C = subdivision_gadget(), random_ugraph(rng.randint(1, 4), rng.randint(0, 4), rng)
    elif choice == 1:
        G, C = subdivision_gadget(2, directed=True), random_digraph(rng.randint(1, 3), rng.randint(0, 5), rng)
    else:
        G, C = yo_gadget(digraph_category()), random_digraph(rng.randint(1, 3), rng.randint(0, 5), rng)
    res = verify_adjunction(G, A, C)
    assert res.ok and res.left == res.right
    assert res.left == hom(yoneda_extend(G, A), C, "count")


def test_nerve_polymorphism_is_natural():
    G = subdivision_gadget()
    K3 = uclique(3)
    N = (0, 1)
    proj = projection(K3, N, 0)
    lifted = nerve_polymorphism(G, K3, K3, proj, N)
    assert check_naturality(lifted)
    T = ran_eval(K3, K3, [N])
    for k in range(T.size(0)):
        assert check_naturality(nerve_polymorphism(G, K3, K3, polymorphism(T, K3, K3, 0, k), N))
