"""Acceptance suite: one check per criterion, one PASS/FAIL line each.

Run under pytest, or directly with ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import random
import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from catcsp.copresheaf import (  # noqa: E402
    complete_graph,
    digraph,
    directed_path,
    hom,
    hom_equivalent,
    isomorphic,
    loop,
    ugraph,
)
from catcsp.corpus import multidigraphs, random_diagram, random_digraph, random_formula  # noqa: E402
from catcsp.fincat import CatFunctor, FinCategory, digraph_category, graph_category  # noqa: E402
from catcsp.findiag import limit, restrict  # noqa: E402
from catcsp.grothendieck import gl, instance_diagram, template_condition  # noqa: E402
from catcsp.kan import (  # noqa: E402
    nerve,
    ran_eval,
    subdivision_gadget,
    verify_adjunction,
    yo_gadget,
    yoneda_extend,
)
from catcsp.minion import check_choice, condition_to_diagram, probe_hardness, satisfies, siggers  # noqa: E402
from catcsp.pp import (  # noqa: E402
    EqAtom,
    PPInterpretation,
    canonical_structure,
    gadget_to_ppinterp,
    interpret,
    ppinterp_to_gadget,
)
from catcsp.reduce import YES, NO, TemplatePair, harness, universal, universal_reduction  # noqa: E402
from catcsp.structures import (  # noqa: E402
    RelationalStructure,
    clique,
    cycle_structure,
    single_sorted,
    to_copresheaf,
    to_structure,
)
from oracles import (  # noqa: E402
    count_assignments,
    count_homs,
    count_limit,
    count_structure_homs,
    digraph_vertex_homs,
    edge_pairs,
    structure_power,
    three_colourable,
)
from routes import collage_route  # noqa: E402
from test_grothendieck import random_instance  # noqa: E402

CHECKS: list[tuple[int, str, object]] = []


def criterion(number: int, title: str):
    def register(fn):
        CHECKS.append((number, title, fn))
        return fn

    return register


def ucycle(n):
    return ugraph(range(n), [(i, (i + 1) % n) for i in range(n)])


def rels_of(A):
    return {r: set(ts) for (r, _), ts in zip(A.signature, A.relations)}


def random_structure(rng, sig, n, density):
    return RelationalStructure.build(
        sig,
        range(n),
        {r: [tuple(rng.randrange(n) for _ in range(k)) for _ in range(rng.randint(0, density))] for r, k in sig},
    )


# -- criteria --------------------------------------------------------------


@criterion(1, "3-colouring equivalence on the multidigraph corpus")
def check_colouring():
    corpus = multidigraphs(5, 3)
    rng = random.Random(101)
    corpus += [random_digraph(rng.randint(1, 7), rng.randint(0, 10), rng) for _ in range(200)]
    K3 = complete_graph(3)
    bad = [
        i for i, X in enumerate(corpus)
        if bool(hom(X, K3)) != three_colourable(X.set_of("V"), edge_pairs(X))
    ]
    return not bad, f"{len(corpus)} graphs, {len(bad)} disagreements"


@criterion(2, "|hom(X, A)| = |limit(A . gr X)| on 200 random pairs")
def check_gr_bijection():
    rng = random.Random(202)
    bad = 0
    for _ in range(200):
        C = rng.choice([digraph_category(), graph_category()])
        X, A = random_diagram(C, rng, max_size=3), random_diagram(C, rng, max_size=3)
        D = template_condition(A, X)
        n = hom(X, A, "count")
        ok = n == limit(D, "count")
        if X.total_size <= 5:
            ok = ok and n == count_homs(X, A) == count_limit(D)
        bad += not ok
    return bad == 0, f"200 pairs, {bad} mismatches"


@criterion(3, "|limit(A . D)| = |hom(gl D, A)| on 200 random pairs")
def check_gl_bijection():
    rng = random.Random(303)
    bad = 0
    for _ in range(200):
        S = rng.choice([digraph_category(), graph_category()])
        D = random_instance(S, rng)
        A = random_diagram(S, rng, max_size=3)
        n = limit(instance_diagram(A, D), "count")
        bad += not (n == hom(gl(D), A, "count") == count_limit(instance_diagram(A, D)))
    return bad == 0, f"200 pairs, {bad} mismatches"


@criterion(4, "gl of the zig-zag diagram is the 3-vertex path")
def check_zigzag():
    S = digraph_category()
    J = FinCategory.build(
        ["v0", "e1", "v1", "e2"],
        [("a", "e1", "v0"), ("b", "e1", "v1"), ("c", "e2", "v1")],
    )
    D = CatFunctor.build(J, S, {"v0": "V", "e1": "E", "v1": "V", "e2": "E"}, {"a": "s", "b": "t", "c": "s"})
    Y = gl(D)
    ok = isomorphic(Y, directed_path(3))
    return ok, f"sizes {[len(s) for s in Y.sets]}"


@criterion(5, "Ran_K3 K3 has 6 elements at [1], 0 at the empty set, functorial actions")
def check_ran_k3():
    K3 = complete_graph(3)
    T = ran_eval(K3, K3, [(), (0,), (0, 1)])
    at_empty, at_one = T.size(0), T.size(1)
    # A^0 is the one-vertex loop and A^1 is A itself
    oracle_one = digraph_vertex_homs(K3, K3)
    oracle_empty = digraph_vertex_homs(loop(), K3)
    report = T.validate()
    ok = at_one == oracle_one == 6 and at_empty == oracle_empty == 0 and bool(report)
    return ok, f"|Ran(0)|={at_empty}, |Ran(1)|={at_one}, functorial={bool(report)}"


@criterion(6, "subdividing two parallel edges gives a 6-cycle")
def check_hexagon():
    Y = yoneda_extend(subdivision_gadget(), digraph([0, 1], [(0, 1), (0, 1)]))
    return isomorphic(Y, ucycle(6)), f"sizes {[len(s) for s in Y.sets]}"


@criterion(7, "nerve of the subdivision gadget at C5 is hom-equivalent to K5")
def check_nerve_k5():
    N = nerve(subdivision_gadget(), ucycle(5))
    ok = hom_equivalent(N, complete_graph(5)) and not hom_equivalent(N, complete_graph(4))
    return ok, f"sizes {[len(s) for s in N.sets]}"


@criterion(8, "|hom(kay A, C)| = |hom(A, nerve C)| on 100 random triples")
def check_adjunction():
    rng = random.Random(808)
    gadgets = [
        (subdivision_gadget(), "graph"),
        (subdivision_gadget(directed=True), "digraph"),
        (subdivision_gadget(2, directed=True), "digraph"),
        (yo_gadget(digraph_category()), "digraph"),
    ]
    bad = 0
    for i in range(100):
        G, kind = gadgets[i % len(gadgets)]
        A = random_digraph(rng.randint(1, 3), rng.randint(0, 3), rng)
        if kind == "graph":
            n = rng.randint(1, 4)
            C = ugraph(range(n), [(rng.randrange(n), rng.randrange(n)) for _ in range(rng.randint(0, 4))])
        else:
            C = random_digraph(rng.randint(1, 3), rng.randint(0, 5), rng)
        r = verify_adjunction(G, A, C)
        ok = r.ok
        if kind == "digraph":
            ok = ok and r.left == digraph_vertex_homs(yoneda_extend(G, A), C)
        bad += not ok
    return bad == 0, f"100 triples, {bad} mismatches"


@criterion(9, "kay_yo(A) is isomorphic to A for 50 random copresheaves")
def check_density():
    rng = random.Random(909)
    S = digraph_category()
    G = yo_gadget(S)
    bad = sum(not isomorphic(yoneda_extend(G, X), X) for X in (random_diagram(S, rng, max_size=3) for _ in range(50)))
    return bad == 0, f"50 copresheaves, {bad} failures"


@criterion(10, "Pol(K3, K3) and Pol(K3, K4) do not satisfy Siggers")
def check_siggers():
    a = satisfies(complete_graph(3), complete_graph(3), siggers()).holds
    b = satisfies(complete_graph(3), complete_graph(4), siggers()).holds
    return not a and not b, f"K3->K3: {a}, K3->K4: {b}"


@criterion(11, "the Siggers diagram is isomorphic to K3")
def check_siggers_diagram():
    D = condition_to_diagram(siggers())
    F = CatFunctor.build(digraph_category(), D.shape, {"V": "t", "E": "s"}, {"s": "e1", "t": "e2"})
    return isomorphic(restrict(D, F), complete_graph(3)), "relabelled over the digraph base"


@criterion(12, "|Pol(A', B')(N)| = |Ran_A B(N)| for |N| = 1, 2 on 20 random pairs")
def check_single_sorted():
    rng = random.Random(1212)
    S = digraph_category()
    bad = 0
    for _ in range(20):
        A = random_diagram(S, rng, max_size=2, min_size=1)
        B = random_diagram(S, rng, max_size=2, min_size=1)
        T = ran_eval(A, B, [(0,), (0, 1)])
        As, Bs = single_sorted(A), single_sorted(B)
        for i, k in enumerate((1, 2)):
            dom, rels = structure_power(list(As.domain), rels_of(As), k)
            bad += T.size(i) != count_structure_homs(dom, rels, list(Bs.domain), rels_of(Bs))
    return bad == 0, f"40 comparisons, {bad} mismatches"


@criterion(13, "universal reduction for (K3, K3) has no violations on multidigraphs with <= 5 vertices")
def check_harness():
    P = TemplatePair.build(complete_graph(3))
    corpus = multidigraphs(5, 2)
    rep = harness(corpus, P, P, universal(P, P))
    wrong_input = sum(
        r.input_verdict != (YES if three_colourable(X.set_of("V"), edge_pairs(X)) else NO)
        for r, X in zip(rep.results, corpus)
    )
    return rep.passed and wrong_input == 0, rep.summary()


@criterion(14, "universal reduction equals the collage route on 100 random instances")
def check_two_paths():
    rng = random.Random(1414)
    S = digraph_category()
    bad = 0
    for _ in range(100):
        A = random_diagram(S, rng, max_size=2, min_size=1)
        Ap = random_diagram(S, rng, max_size=2, min_size=1)
        X = random_digraph(rng.randint(0, 3), rng.randint(0, 3), rng)
        Y = universal_reduction(TemplatePair.build(A), TemplatePair.build(Ap), X)
        Z = collage_route(A, Ap, X)
        bad += not (Y.sets == Z.sets and Y.maps == Z.maps)
    return bad == 0, f"100 instances, {bad} differences"


@criterion(15, "C5 -> K5 interpretation round trip through gadgets")
def check_interpretation():
    phi = PPInterpretation.build(
        1, [("E", 2)], [("E", 2)], "x = x", {"E": "exists u v . E(x,u) & E(u,v) & E(v,y)"}
    )
    G = ppinterp_to_gadget(phi)
    N = to_structure(nerve(G, to_copresheaf(cycle_structure(5))))
    first = hom_equivalent(to_copresheaf(N), to_copresheaf(clique(5)))
    H = ppinterp_to_gadget(gadget_to_ppinterp(G))
    rng = random.Random(1515)
    bad = 0
    for _ in range(20):
        A = random_structure(rng, [("E", 2)], rng.randint(1, 5), 7)
        X = to_copresheaf(A)
        NG = nerve(G, X)
        ok = hom_equivalent(NG, nerve(H, X))
        ok = ok and hom_equivalent(to_copresheaf(to_structure(NG)), to_copresheaf(interpret(phi, A)))
        bad += not ok
    return first and bad == 0, f"C5 nerve ~ K5: {first}; corpus of 20, {bad} failures"


@criterion(16, "assignment counts equal hom counts for 100 quantifier-free formulas")
def check_chandra_merlin():
    rng = random.Random(1616)
    sig = [("E", 2), ("R", 3), ("U", 1)]
    bad = 0
    for _ in range(100):
        A = random_structure(rng, sig, rng.randint(1, 3), 6)
        phi = random_formula(sig, rng, free=rng.randint(1, 4), bound=0, atoms=rng.randint(0, 5))
        atoms = [("=", a.left, a.right) if isinstance(a, EqAtom) else (a.rel, a.args) for a in phi.atoms]
        n = count_assignments(list(phi.variables), atoms, A.domain, rels_of(A))
        C = canonical_structure(phi, sig)
        bad += n != hom(to_copresheaf(C), to_copresheaf(A), "count")
    return bad == 0, f"100 formulas, {bad} mismatches"


@criterion(17, "hardness probe: loop refuted at arity 2, K3 bounded witness")
def check_probe():
    a = probe_hardness(loop(), loop(), 2)
    b = probe_hardness(complete_graph(3), complete_graph(3), 2)
    witness_ok = b.witness is not None and bool(check_choice(b.table, b.witness))
    ok = a.verdict == "refuted-at-arity 2" and b.verdict == "bounded-witness" and witness_ok
    return ok, f"loop: {a.verdict}; K3: {b.verdict}; witness natural: {witness_ok}"


# -- runners ---------------------------------------------------------------


def run_check(number: int, title: str, fn) -> tuple[bool, str]:
    t0 = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as err:  # a crash is a failure, reported like one
        ok, detail = False, f"{type(err).__name__}: {err}"
    line = f"{'PASS' if ok else 'FAIL'} {number:2d} {title} ({detail}; {time.perf_counter() - t0:.1f}s)"
    return ok, line


@pytest.mark.parametrize("number,title,fn", CHECKS, ids=[f"criterion_{n:02d}" for n, _, _ in CHECKS])
def test_criterion(number, title, fn, capsys):
    ok, line = run_check(number, title, fn)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


def main() -> int:
    failed = 0
    for number, title, fn in CHECKS:
        ok, line = run_check(number, title, fn)
        print(line, flush=True)
        failed += not ok
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
