"""Kan extensions at finite sets, Yoneda extensions and generalised nerves.

``Ran_A B`` is the polymorphism minion ``N |-> hom(A^N, B)``; only finite
windows of it are ever materialized, as a :class:`MinionTable`.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Hashable, Mapping, Sequence

from .copresheaf import (
    Copresheaf,
    NatTransformation,
    _check_base,
    check_naturality,
    hom,
    iter_hom,
    power,
    yoneda,
)
from .fincat import (
    Arrow,
    CatFunctor,
    FinCategory,
    SizeCap,
    ValidationReport,
    digraph_category,
    graph_category,
    opposite,
)
from .findiag import FinDiagram, colimit
from .grothendieck import gr

DEFAULT_CAP = 10**6

Element = Hashable


def functions(m: int, n: int):
    """All maps ``[m] -> [n]`` as image tuples, lexicographically."""
    return product(range(n), repeat=m)


def _check_power(A: FinDiagram, k: int, cap: int) -> None:
    for o, s in zip(A.shape.objects, A.sets):
        if len(s) ** k > cap:
            raise SizeCap(f"|A({o})|^{k} = {len(s) ** k} exceeds the cap {cap}")


# -- minion tables ---------------------------------------------------------


@dataclass(frozen=True, eq=False)
class MinionTable:
    """A finite window of a functor ``Fin -> Fin``.

    ``elements[i]`` lists ``M(arities[i])``.  For every map ``pi`` from
    arity ``i`` to arity ``j`` (an image tuple of positions), ``actions[(i,
    j, pi)][k]`` is the position of ``M(pi)(elements[i][k])``.
    """

    arities: tuple[tuple, ...]
    elements: tuple[tuple[Element, ...], ...]
    actions: Mapping[tuple[int, int, tuple[int, ...]], tuple[int, ...]]

    def arity_index(self, N: Sequence) -> int:
        N = tuple(N)
        for i, M in enumerate(self.arities):
            if M == N:
                return i
        raise KeyError(f"arity {N!r} not in the table")

    def size(self, i: int) -> int:
        return len(self.elements[i])

    def act(self, i: int, j: int, pi: Sequence[int], k: int) -> int:
        return self.actions[(i, j, tuple(pi))][k]

    def maps(self, i: int, j: int):
        return functions(len(self.arities[i]), len(self.arities[j]))

    def validate(self) -> ValidationReport:
        """Functoriality over every recorded pair of composable maps."""
        report = ValidationReport()
        n = len(self.arities)
        for i in range(n):
            ident = tuple(range(len(self.arities[i])))
            if self.actions[(i, i, ident)] != tuple(range(self.size(i))):
                report.violations.append(f"identity on arity {i} does not act trivially")
        for i, j, k in product(range(n), repeat=3):
            for pi in self.maps(i, j):
                api = self.actions[(i, j, pi)]
                for rho in self.maps(j, k):
                    arho = self.actions[(j, k, rho)]
                    comp = tuple(rho[x] for x in pi)
                    if self.actions[(i, k, comp)] != tuple(arho[y] for y in api):
                        report.violations.append(
                            f"action of {rho} . {pi} differs from the composite of actions"
                        )
        return report


def representable_minion(k: int, arities: Sequence[Sequence]) -> MinionTable:
    """``N |-> N^k``; ``k = 1`` is the identity functor."""
    arities = tuple(tuple(N) for N in arities)
    elements = tuple(tuple(product(N, repeat=k)) for N in arities)
    actions = {}
    for i, N in enumerate(arities):
        for j, M in enumerate(arities):
            idx = {t: p for p, t in enumerate(product(range(len(M)), repeat=k))}
            for pi in functions(len(N), len(M)):
                actions[(i, j, pi)] = tuple(
                    idx[tuple(pi[x] for x in t)] for t in product(range(len(N)), repeat=k)
                )
    return MinionTable(arities, elements, actions)


def _reindex(A: FinDiagram, n: int, m: int, pi: Sequence[int]) -> list[tuple[int, ...]]:
    # per object: position in A^m of a  |->  position in A^n of a . pi
    out = []
    for s in A.sets:
        q = len(s)
        row = []
        for a in product(range(q), repeat=m):
            idx = 0
            for x in pi:
                idx = idx * q + a[x]
            row.append(idx)
        out.append(tuple(row))
    return out


def ran_eval(
    A: FinDiagram, B: FinDiagram, arities: Sequence[Sequence], cap: int = DEFAULT_CAP
) -> MinionTable:
    """``hom(A^N, B)`` for each requested ``N``, with all action maps.

    Elements are component tuples of the homomorphisms; ``f`` along
    ``pi: N -> M`` becomes ``a |-> f(a . pi)``.
    """
    _check_base(A, B)
    arities = tuple(tuple(N) for N in arities)
    for N in arities:
        _check_power(A, len(N), cap)
    elements = []
    for N in arities:
        elements.append(tuple(h.components for h in iter_hom(power(A, N), B)))
    where = [{e: k for k, e in enumerate(es)} for es in elements]
    actions = {}
    for i, N in enumerate(arities):
        for j, M in enumerate(arities):
            for pi in functions(len(N), len(M)):
                re = _reindex(A, len(N), len(M), pi)
                row = []
                for f in elements[i]:
                    g = tuple(tuple(fs[p] for p in r) for fs, r in zip(f, re))
                    row.append(where[j][g])
                actions[(i, j, pi)] = tuple(row)
    return MinionTable(arities, tuple(elements), actions)


def polymorphism(table: MinionTable, A: FinDiagram, B: FinDiagram, i: int, k: int):
    """Element ``k`` at arity ``i`` as a transformation ``A^N -> B``."""
    P = power(A, table.arities[i])
    return NatTransformation(P, Copresheaf.of(B), table.elements[i][k])


# -- left Kan extension ----------------------------------------------------


def lan_eval(A: FinDiagram, X: FinDiagram, N: Sequence, cap: int = DEFAULT_CAP) -> list:
    """``gl(A . gr X)`` at the finite set ``N``.

    Elements are class representatives ``((s, x), phi)`` with ``phi`` a map
    ``A(s) -> N`` given as a tuple of elements of ``N``.
    """
    _check_base(A, X)
    return _lan_classes(A, X, tuple(N), cap)[0]


def _lan_classes(A: FinDiagram, X: FinDiagram, N: tuple, cap: int, E=None):
    n = len(N)
    C = A.shape
    for o, s in zip(C.objects, A.sets):
        if n ** len(s) > cap:
            raise SizeCap(f"|N|^|A({o})| = {n ** len(s)} exceeds the cap {cap}")
    # the diagram over (gr X)^op of the sets N^{A(s)}
    E = E or gr(X)
    J = E.category
    sets = []
    for s, _ in E.elements:
        sets.append(tuple(functions(len(A.sets[s]), n)))
    maps = []
    for u, a in enumerate(J.arrows):
        # u = f@x : (s, x) -> (t, y); phi on A(t) |-> phi . A(f) on A(s)
        f = E.projection.morphism_map[u]
        af = A.maps[f]
        row = []
        for phi in sets[a.target]:
            idx = 0
            for x in af:
                idx = idx * n + phi[x]
            row.append(idx)
        maps.append(tuple(row))
    Q = colimit(FinDiagram(opposite(J), tuple(sets), tuple(maps)))
    names = []
    for j, k in Q.carrier:
        s, x = E.elements[j]
        names.append(((C.objects[s], x), tuple(N[p] for p in sets[j][k])))
    return names, Q, E, sets


# -- collage ---------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Collage:
    """The category ``S + T`` with every function ``A(s) -> B(t)`` as a
    morphism ``s -> t``.

    ``left`` and ``right`` include ``S`` and ``T``; ``function[k]`` is the
    image tuple behind a crossing morphism ``k``.
    """

    category: FinCategory
    left: CatFunctor
    right: CatFunctor
    function: Mapping[int, tuple[int, ...]]


def collage(A: FinDiagram, B: FinDiagram, cap: int = DEFAULT_CAP) -> Collage:
    S, T = A.shape, B.shape
    nS = len(S.objects)
    objects = tuple(f"L.{o}" for o in S.objects) + tuple(f"R.{o}" for o in T.objects)
    arrows = [Arrow(a.name, a.source, a.target) for a in S.arrows]
    nSa = len(arrows)
    arrows += [Arrow(a.name, a.source + nS, a.target + nS) for a in T.arrows]
    function: dict[int, tuple[int, ...]] = {}
    index: dict[tuple[int, int, tuple[int, ...]], int] = {}
    total = 0
    for s, xs in enumerate(A.sets):
        for t, ys in enumerate(B.sets):
            total += len(ys) ** len(xs)
    if total > cap:
        raise SizeCap(f"collage has {total} crossing morphisms, over the cap {cap}")
    for s, xs in enumerate(A.sets):
        for t, ys in enumerate(B.sets):
            for phi in functions(len(xs), len(ys)):
                k = len(arrows)
                index[(s, t, phi)] = k
                function[k] = phi
                label = ",".join(map(str, phi))
                arrows.append(Arrow(f"{S.objects[s]}>{T.objects[t]}:{label}", s, t + nS))
    identities = S.identities + tuple(i + nSa for i in T.identities)
    table: dict[tuple[int, int], int] = {}
    for (g, f), h in S.table.items():
        table[(g, f)] = h
    for (g, f), h in T.table.items():
        table[(g + nSa, f + nSa)] = h + nSa
    for k, phi in function.items():
        a = arrows[k]
        s, t = a.source, a.target - nS
        # pre-composition with S, post-composition with T
        for f in range(len(S.arrows)):
            if S.arrows[f].target == s:
                af = A.maps[f]
                table[(k, f)] = index[(S.arrows[f].source, t, tuple(phi[x] for x in af))]
        for u in range(len(T.arrows)):
            if T.arrows[u].source == t:
                bu = B.maps[u]
                table[(u + nSa, k)] = index[(s, T.arrows[u].target, tuple(bu[y] for y in phi))]
    cat = FinCategory(objects, tuple(arrows), identities, table)
    left = CatFunctor(S, cat, tuple(range(nS)), tuple(range(nSa)))
    right = CatFunctor(
        T,
        cat,
        tuple(range(nS, nS + len(T.objects))),
        tuple(range(nSa, nSa + len(T.arrows))),
    )
    return Collage(cat, left, right, function)


# -- gadget functors -------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GadgetFunctor:
    """A contravariant assignment ``S^op -> [T, Fin]``.

    ``images[s]`` is ``G(s)``; ``transforms[f]`` is ``G(f): G(s') -> G(s)``
    for ``f: s -> s'``.
    """

    source: FinCategory
    target: FinCategory
    images: tuple[Copresheaf, ...]
    transforms: tuple[NatTransformation, ...]

    def image(self, s: str | int) -> Copresheaf:
        return self.images[self.source.obj(s)]

    def transform(self, f: str | int) -> NatTransformation:
        return self.transforms[self.source.mor(f)]

    @classmethod
    def build(
        cls,
        source: FinCategory,
        target: FinCategory,
        images: Mapping[str, Copresheaf],
        transforms: Mapping[str, Mapping[str, Mapping]],
    ) -> GadgetFunctor:
        """``transforms[f][t]`` maps elements of ``G(s')(t)`` to ``G(s)(t)``.

        Identities are filled in and missing composites derived.
        """
        imgs = tuple(Copresheaf.of(images[o]) for o in source.objects)
        for G in imgs:
            if G.shape != target:
                raise ValueError("gadget image over the wrong base")
        table: list[NatTransformation | None] = [None] * len(source.arrows)
        for f, a in enumerate(source.arrows):
            if source.is_identity(f):
                G = imgs[a.source]
                table[f] = NatTransformation(G, G, tuple(tuple(range(len(s))) for s in G.sets))
            elif a.name in transforms:
                table[f] = NatTransformation.build(
                    imgs[a.target], imgs[a.source], transforms[a.name]
                )
        changed = True
        while changed and any(t is None for t in table):
            changed = False
            for (g, f), h in source.table.items():
                if table[h] is None and table[g] is not None and table[f] is not None:
                    table[h] = table[g].then(table[f])
                    changed = True
        missing = [source.arrows[i].name for i, t in enumerate(table) if t is None]
        if missing:
            raise ValueError(f"no transformation given for {', '.join(missing)}")
        return cls(source, target, imgs, tuple(table))  # type: ignore[arg-type]

    def validate(self) -> ValidationReport:
        report = ValidationReport()
        S = self.source
        for f, a in enumerate(S.arrows):
            h = self.transforms[f]
            if h.source is not self.images[a.target] and not _same(h.source, self.images[a.target]):
                report.violations.append(f"G({a.name}) starts at the wrong gadget")
                continue
            if h.target is not self.images[a.source] and not _same(h.target, self.images[a.source]):
                report.violations.append(f"G({a.name}) ends at the wrong gadget")
                continue
            for v in check_naturality(h).violations:
                report.violations.append(f"G({a.name}): {v}")
        if report.violations:
            return report
        for s, i in enumerate(S.identities):
            G = self.images[s]
            if self.transforms[i].components != tuple(tuple(range(len(x))) for x in G.sets):
                report.violations.append(f"G sends id_{S.objects[s]} to a non-identity")
        for (g, f), h in S.table.items():
            if self.transforms[g].then(self.transforms[f]).components != self.transforms[h].components:
                report.violations.append(
                    f"G({S.arrows[g].name} . {S.arrows[f].name}) is not G({S.arrows[f].name}) . G({S.arrows[g].name})"
                )
        return report


def _same(X: FinDiagram, Y: FinDiagram) -> bool:
    return X.shape == Y.shape and X.sets == Y.sets and X.maps == Y.maps


def yo_gadget(S: FinCategory) -> GadgetFunctor:
    """``s |-> hom(s, -)`` with ``f`` acting by pre-composition."""
    imgs = tuple(yoneda(S, s) for s in range(len(S.objects)))
    transforms = []
    for f, a in enumerate(S.arrows):
        # hom(s', -) -> hom(s, -), g |-> g . f
        comps = []
        for t in range(len(S.objects)):
            pos = {g: k for k, g in enumerate(S.hom(a.source, t))}
            comps.append(tuple(pos[S.compose(g, f)] for g in S.hom(a.target, t)))
        transforms.append(NatTransformation(imgs[a.target], imgs[a.source], tuple(comps)))
    return GadgetFunctor(S, S, imgs, tuple(transforms))


def subdivision_gadget(length: int = 3, directed: bool = False) -> GadgetFunctor:
    """Replace every edge by a path of ``length`` edges from 0 to 1.

    By default the path is an undirected graph, so the gadget lands in
    copresheaves over the graph category; ``directed`` gives the variant
    over the digraph category with the path oriented from 0 to 1.
    """
    from .copresheaf import digraph, ugraph

    if length < 1:
        raise ValueError("length must be positive")
    path = [0, *range(2, length + 1), 1]
    edges = list(zip(path, path[1:]))
    if directed:
        T = digraph_category()
        GV, GE = digraph(["*"], []), digraph(path, edges)
    else:
        T = graph_category()
        GV, GE = ugraph(["*"], []), ugraph(path, edges)
    return GadgetFunctor.build(
        digraph_category(), T, {"V": GV, "E": GE}, {"s": {"V": {"*": 0}}, "t": {"V": {"*": 1}}}
    )


def yoneda_extend(G: GadgetFunctor, A: FinDiagram) -> Copresheaf:
    """``kay_G(A)``: a copy of ``G(s)`` per element of ``A(s)``, glued.

    Elements are representatives ``((s, x), y)`` with ``y`` an element of
    the gadget ``G(s)``.
    """
    if A.shape != G.source:
        raise ValueError("copresheaf is not over the gadget's source base")
    T = G.target
    E = gr(A)
    J = E.category
    Jop = opposite(J)
    proj = E.projection.morphism_map
    per_t = []
    for t in range(len(T.objects)):
        sets = tuple(G.images[s].sets[t] for s, _ in E.elements)
        maps = tuple(G.transforms[proj[u]].components[t] for u in range(len(J.arrows)))
        per_t.append(colimit(FinDiagram(Jop, sets, maps)))
    S = G.source
    out_sets = []
    for t, Q in enumerate(per_t):
        names = []
        for j, k in Q.carrier:
            s, x = E.elements[j]
            names.append(((S.objects[s], x), G.images[s].sets[t][k]))
        out_sets.append(tuple(names))
    out_maps = []
    for v, a in enumerate(T.arrows):
        Qs, Qt = per_t[a.source], per_t[a.target]
        row = []
        for j, k in Qs.carrier:
            s = E.elements[j][0]
            row.append(Qt.injections[j][G.images[s].maps[v][k]])
        out_maps.append(tuple(row))
    return Copresheaf(T, tuple(out_sets), tuple(out_maps))


def nerve(G: GadgetFunctor, B: FinDiagram, cap: int = DEFAULT_CAP) -> Copresheaf:
    """``s |-> hom(G(s), B)``, acting by pre-composition with ``G``.

    An element is a homomorphism written as a tuple, per object of the
    gadget base, of the images of that object's elements.
    """
    if B.shape != G.target:
        raise ValueError("copresheaf is not over the gadget's target base")
    S = G.source
    homs = []
    for s, Gs in enumerate(G.images):
        hs = []
        for h in iter_hom(Gs, B):
            hs.append(h.components)
            if len(hs) > cap:
                raise SizeCap(f"hom(G({S.objects[s]}), B) exceeds the cap {cap}")
        homs.append(hs)
    where = [{h: k for k, h in enumerate(hs)} for hs in homs]
    sets = tuple(
        tuple(tuple(tuple(B.sets[t][y] for y in comp) for t, comp in enumerate(h)) for h in hs)
        for hs in homs
    )
    maps = []
    for f, a in enumerate(S.arrows):
        gf = G.transforms[f].components
        row = []
        for h in homs[a.source]:
            # h . G(f) : G(s') -> B
            row.append(where[a.target][tuple(tuple(ht[y] for y in gt) for ht, gt in zip(h, gf))])
        maps.append(tuple(row))
    return Copresheaf(S, sets, tuple(maps))


@dataclass(frozen=True)
class AdjunctionCheck:
    ok: bool
    left: int
    right: int


def verify_adjunction(G: GadgetFunctor, A: FinDiagram, C: FinDiagram) -> AdjunctionCheck:
    """Compare ``|hom(kay_G A, C)|`` with ``|hom(A, nerve_G C)|``."""
    left = hom(yoneda_extend(G, A), C, "count")
    right = hom(A, nerve(G, C), "count")
    return AdjunctionCheck(left == right, left, right)


def nerve_polymorphism(
    G: GadgetFunctor, A: FinDiagram, B: FinDiagram, f: NatTransformation, N: Sequence
) -> NatTransformation:
    """Transport ``f: A^N -> B`` to ``nerve(A)^N -> nerve(B)`` coordinate-wise.

    A tuple of homomorphisms ``G(s) -> A`` is the homomorphism ``G(s) ->
    A^N`` it pairs to; composing with ``f`` lands in ``hom(G(s), B)``.
    """
    NA, NB = nerve(G, A), nerve(G, B)
    P = power(NA, N)
    k = len(N)
    S = G.source
    pos_b = [{x: i for i, x in enumerate(NB.sets[s])} for s in range(len(S.objects))]
    comps = []
    for s in range(len(S.objects)):
        row = []
        for tup in P.sets[s]:
            img = []
            for t in range(len(G.target.objects)):
                sz = len(A.sets[t])
                fcomp = f.components[t]
                col = []
                for e in range(len(G.images[s].sets[t])):
                    idx = 0
                    for c in range(k):
                        idx = idx * sz + A.index(t, tup[c][t][e])
                    col.append(B.sets[t][fcomp[idx]])
                img.append(tuple(col))
            row.append(pos_b[s][tuple(img)])
        comps.append(tuple(row))
    return NatTransformation(P, NB, tuple(comps))
