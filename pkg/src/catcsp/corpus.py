"""Instance generators: exhaustive small multidigraphs and seeded random objects."""

from __future__ import annotations

import random
from itertools import combinations_with_replacement, permutations
from typing import Iterator

from .copresheaf import Copresheaf, digraph
from .fincat import FinCategory
from .findiag import FinDiagram
from .pp import EqAtom, FunAtom, PPFormula, RelAtom


def _canonical(n: int, edges: tuple[tuple[int, int], ...]) -> tuple:
    return min(
        tuple(sorted((p[u], p[v]) for u, v in edges)) for p in permutations(range(n))
    )


def multidigraph_edges(
    max_vertices: int, max_edges: int, up_to_iso: bool = True, min_vertices: int = 1
) -> Iterator[tuple[int, tuple[tuple[int, int], ...]]]:
    """Pairs ``(n, edges)`` with loops and parallel edges allowed.

    Ordered by vertex count, then edge count, then edge list.  With
    ``up_to_iso`` only the lexicographically least relabeling is kept.
    """
    for n in range(min_vertices, max_vertices + 1):
        pairs = [(u, v) for u in range(n) for v in range(n)]
        for m in range(max_edges + 1):
            seen = set()
            for edges in combinations_with_replacement(pairs, m):
                if up_to_iso:
                    key = _canonical(n, edges)
                    if key in seen:
                        continue
                    seen.add(key)
                    edges = key
                yield n, edges


def multidigraphs(
    max_vertices: int, max_edges: int, up_to_iso: bool = True, min_vertices: int = 1
) -> list[Copresheaf]:
    return [
        digraph(range(n), list(edges))
        for n, edges in multidigraph_edges(max_vertices, max_edges, up_to_iso, min_vertices)
    ]


def random_digraph(n: int, m: int, rng: random.Random, loops: bool = True) -> Copresheaf:
    pairs = [(u, v) for u in range(n) for v in range(n) if loops or u != v]
    return digraph(range(n), [rng.choice(pairs) for _ in range(m)] if pairs else [])


def random_diagram(
    C: FinCategory, rng: random.Random, max_size: int = 3, min_size: int = 0
) -> Copresheaf:
    """A uniformly drawn functor ``C -> FinSet`` by rejection on sizes.

    Sizes are drawn first; maps on generators are then drawn and checked
    against the composition table, retrying until a functor is found.
    """
    objs = range(len(C.objects))
    while True:
        sizes = [rng.randint(min_size, max_size) for _ in objs]
        for _ in range(200):
            maps: list[tuple[int, ...] | None] = [None] * len(C.arrows)
            for f, a in enumerate(C.arrows):
                if a.source == a.target and C.is_identity(f):
                    maps[f] = tuple(range(sizes[a.source]))
                elif sizes[a.target] == 0:
                    maps[f] = () if sizes[a.source] == 0 else None
                else:
                    maps[f] = tuple(rng.randrange(sizes[a.target]) for _ in range(sizes[a.source]))
            if any(m is None for m in maps):
                break
            if all(
                tuple(maps[g][y] for y in maps[f]) == maps[C.compose(g, f)]
                for g in range(len(C.arrows))
                for f in range(len(C.arrows))
                if C.arrows[f].target == C.arrows[g].source
            ):
                sets = tuple(tuple(range(k)) for k in sizes)
                return Copresheaf(C, sets, tuple(maps))


def random_formula(
    signature: list[tuple[str, int]],
    rng: random.Random,
    free: int = 2,
    bound: int = 1,
    atoms: int = 3,
    equalities: bool = True,
) -> PPFormula:
    """A random primitive positive formula over a relational signature."""
    fv = tuple(f"x{i}" for i in range(1, free + 1))
    bv = tuple(f"u{i}" for i in range(1, bound + 1))
    pool = fv + bv
    out = []
    for _ in range(atoms):
        if equalities and rng.random() < 0.2:
            out.append(EqAtom(rng.choice(pool), rng.choice(pool)))
        else:
            r, k = rng.choice(signature)
            out.append(RelAtom(r, tuple(rng.choice(pool) for _ in range(k))))
    return PPFormula(fv, bv, tuple(out), {})


def random_sentence(
    C: FinCategory, rng: random.Random, variables: int = 3, atoms: int = 3
) -> PPFormula:
    """A random well-sorted sentence of atoms ``f(x) = y`` and ``x = y``.

    Every variable gets a declared sort first; atoms then only use
    non-identity arrows between the sorts of their variables.
    """
    pool = tuple(f"x{i}" for i in range(1, variables + 1))
    sorts = {v: rng.choice(C.objects) for v in pool}
    out = []
    for _ in range(atoms):
        x = rng.choice(pool)
        src = C.obj(sorts[x])
        arrows = [f for f in C.non_identity if C.arrows[f].source == src]
        if arrows and rng.random() < 0.8:
            f = rng.choice(arrows)
            tgt = C.objects[C.arrows[f].target]
            ys = [v for v in pool if sorts[v] == tgt]
            if ys:
                out.append(FunAtom((C.arrows[f].name,), x, rng.choice(ys)))
                continue
        out.append(EqAtom(x, rng.choice([v for v in pool if sorts[v] == sorts[x]])))
    return PPFormula((), pool, tuple(out), sorts)


def seeded(seed: int | None) -> random.Random:
    return random.Random(seed)


def size_profile(Xs: list[FinDiagram]) -> list[tuple[int, ...]]:
    return [tuple(len(s) for s in X.sets) for X in Xs]
