import random
from itertools import product

import pytest

from catcsp.copresheaf import check_naturality, complete_graph, digraph, directed_cycle, isomorphic, loop
from catcsp.fincat import CatFunctor, digraph_category
from catcsp.findiag import restrict
from catcsp.kan import ran_eval, representable_minion
from catcsp.minion import (
    BUILTINS,
    GlCondition,
    MinorCondition,
    MissingArity,
    check_choice,
    condition_to_diagram,
    constant_pattern,
    diagram_to_condition,
    format_condition,
    free_structure,
    indicator,
    interpretable,
    parse_condition,
    parse_identity,
    polymorphism_diagram,
    probe_hardness,
    satisfies,
    satisfies_direct,
    siggers,
    symmetric,
    trivial,
)
from oracles import count_limit


def as_digraph(D):
    """Read a two-object, two-arrow condition diagram over the digraph base."""
    F = CatFunctor.build(digraph_category(), D.shape, {"V": "t", "E": "s"}, {"s": "e1", "t": "e2"})
    return restrict(D, F)


def simple_digraph(n, edges):
    return digraph(range(n), sorted(set(edges)))


def has_symmetric_polymorphism(n, edges, m, edges_b):
    """Brute force over all binary maps [n]^2 -> [m]."""
    ea, eb = set(edges), set(edges_b)
    pairs = list(product(range(n), repeat=2))
    for vals in product(range(m), repeat=len(pairs)):
        f = dict(zip(pairs, vals))
        if any(f[(a, b)] != f[(b, a)] for a, b in pairs):
            continue
        if all((f[(a, c)], f[(b, d)]) in eb for a, b in ea for c, d in ea):
            return True
    return False


def test_parse_identity():
    assert parse_identity("f(x,y,x) = g(x,y)") == ("f", "g", (0, 1, 0), 3, 2)
    assert parse_identity("f(y) = g(x,y)") == ("f", "g", (1,), 1, 2)
    with pytest.raises(ValueError):
        parse_identity("f(x) = g(x,x)")
    with pytest.raises(ValueError):
        parse_identity("f(z) = g(x)")
    with pytest.raises(ValueError):
        parse_identity("f(x) g(x)")


def test_parse_condition_errors():
    with pytest.raises(ValueError, match="line 2"):
        parse_condition("symbol f/2\nidentity f(x) = f(x)\n")
    with pytest.raises(ValueError):
        parse_condition("frobnicate\n")


def test_format_round_trip():
    for make in BUILTINS.values():
        cond = make()
        assert parse_condition(format_condition(cond)) == cond


def test_build_validates():
    with pytest.raises(ValueError):
        MinorCondition.build({"f": 2}, [("f", "f", (0, 2))])
    cond = MinorCondition.build({"f": 2, "g": 1}, [("f", "g", (0, 0))])
    assert cond.arity("f") == 2 and cond.symbols == ("f", "g")


def test_siggers_diagram_shape():
    D = condition_to_diagram(siggers())
    assert D.shape.objects == ("s", "t")
    assert [len(x) for x in D.sets] == [6, 3]
    assert isomorphic(as_digraph(D), complete_graph(3))


def test_copy_for_symbols_on_both_sides():
    D = condition_to_diagram(symmetric())
    assert set(D.shape.objects) == {"f", "g"}
    D = condition_to_diagram(trivial())
    assert set(D.shape.objects) == {"f", "f'"}
    assert D.shape.has_morphism("copy_f")


def test_diagram_to_condition_round_trip():
    cond = siggers()
    assert diagram_to_condition(condition_to_diagram(cond)) == cond


def test_siggers_fails_for_three_colouring():
    K3, K4 = complete_graph(3), complete_graph(4)
    assert not satisfies(K3, K3, siggers())
    assert not satisfies(K3, K4, siggers())


def test_siggers_holds_for_bipartite_and_loop():
    K2 = complete_graph(2)
    res = satisfies(K2, K2, siggers())
    assert res
    for w in res.witness.values():
        assert check_naturality(w)
    assert satisfies(loop(), loop(), siggers())


@pytest.mark.parametrize("seed", range(10))
def test_symmetric_against_brute_force(seed):
    rng = random.Random(seed)
    n, m = rng.randint(1, 2), rng.randint(1, 3)
    ea = [(rng.randrange(n), rng.randrange(n)) for _ in range(rng.randint(0, 3))]
    eb = [(rng.randrange(m), rng.randrange(m)) for _ in range(rng.randint(0, 5))]
    A, B = simple_digraph(n, ea), simple_digraph(m, eb)
    expected = has_symmetric_polymorphism(n, set(ea), m, set(eb))
    assert bool(satisfies(A, B, symmetric())) == expected
    assert satisfies_direct(A, B, symmetric()) == expected


@pytest.mark.parametrize("seed", range(8))
def test_indicator_and_direct_routes_agree(seed):
    rng = random.Random(seed)
    A = simple_digraph(2, [(rng.randrange(2), rng.randrange(2)) for _ in range(3)])
    B = simple_digraph(3, [(rng.randrange(3), rng.randrange(3)) for _ in range(4)])
    # the direct route enumerates Pol(A, B) at each arity, so keep arities small
    for make in (symmetric, trivial, constant_pattern):
        assert bool(satisfies(A, B, make())) == satisfies_direct(A, B, make())


def test_polymorphism_diagram_solutions():
    K3 = complete_graph(3)
    D = condition_to_diagram(symmetric())
    T = ran_eval(K3, K3, [(0, 1)])
    P = polymorphism_diagram(T, D)
    # a symmetric binary polymorphism of K3 would need f(x,x) adjacent to itself
    assert count_limit(P) == 0
    with pytest.raises(MissingArity):
        polymorphism_diagram(ran_eval(K3, K3, [(0,)]), D)


def test_gl_condition_sizes():
    M = GlCondition(condition_to_diagram(trivial()))
    # f(x) = f(x) glues f' to f, leaving N
    assert [M.size(n) for n in range(4)] == [0, 1, 2, 3]
    S = GlCondition(condition_to_diagram(symmetric()))
    # g(x,y) terms identified with g(y,x): multisets of size 2
    assert [S.size(n) for n in range(1, 4)] == [1, 3, 6]


def test_indicator_of_trivial_is_the_template():
    A = directed_cycle(3)
    assert isomorphic(indicator(A, trivial()), A)


def test_interpretability():
    assert interpretable(trivial(), siggers())
    assert interpretable(siggers(), constant_pattern())
    assert not interpretable(siggers(), trivial())
    assert not interpretable(symmetric(), trivial())


def test_free_structure_from_table():
    A = directed_cycle(2)
    T = representable_minion(1, [(0,), (0, 1)])
    assert isomorphic(free_structure(A, T), A)
    with pytest.raises(MissingArity):
        free_structure(directed_cycle(3), T)


def test_probe_loop_refuted():
    res = probe_hardness(loop(), loop(), 2)
    assert res.refuted_at == 2 and res.verdict == "refuted-at-arity 2"
    assert res.witness is None


def test_probe_k3_bounded_witness():
    K3 = complete_graph(3)
    res = probe_hardness(K3, K3, 2)
    assert res.verdict == "bounded-witness"
    assert check_choice(res.table, res.witness)


def test_check_choice_detects_bad_witness():
    K3 = complete_graph(3)
    res = probe_hardness(K3, K3, 2)
    bad = (res.witness[0], tuple(1 - x for x in res.witness[1]))
    assert not check_choice(res.table, bad)


def test_probe_rejects_zero():
    with pytest.raises(ValueError):
        probe_hardness(loop(), loop(), 0)
