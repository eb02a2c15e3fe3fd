"""Copresheaves over finite categories and the homomorphism problem between them."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Hashable, Iterable, Iterator, Mapping, Sequence

from ._search import Network
from .fincat import FinCategory, ValidationReport, digraph_category, graph_category
from .findiag import FinDiagram

Element = Hashable


class BaseMismatch(ValueError):
    """Two copresheaves that should share a base category do not."""


class Copresheaf(FinDiagram):
    """A functor from a finite category into finite sets."""

    @property
    def base(self) -> FinCategory:
        return self.shape

    @classmethod
    def of(cls, D: FinDiagram) -> Copresheaf:
        return cls(D.shape, D.sets, D.maps)

    def same_as(self, other: FinDiagram) -> bool:
        """Literal equality: same base, element lists and tables."""
        return self.shape == other.shape and self.sets == other.sets and self.maps == other.maps


def _check_base(X: FinDiagram, A: FinDiagram) -> None:
    if X.shape != A.shape:
        raise BaseMismatch("copresheaves live over different base categories")


@dataclass(frozen=True, eq=False)
class NatTransformation:
    """Components ``h_s`` as position tables ``X(s) -> A(s)``."""

    source: Copresheaf
    target: Copresheaf
    components: tuple[tuple[int, ...], ...]

    def apply(self, obj: str | int, element: Element) -> Element:
        s = self.source.shape.obj(obj)
        return self.target.sets[s][self.components[s][self.source.index(s, element)]]

    def component(self, obj: str | int) -> dict[Element, Element]:
        s = self.source.shape.obj(obj)
        return {
            x: self.target.sets[s][y] for x, y in zip(self.source.sets[s], self.components[s])
        }

    def then(self, other: NatTransformation) -> NatTransformation:
        """The composite ``other . self``."""
        return NatTransformation(
            self.source,
            other.target,
            tuple(tuple(g[y] for y in f) for f, g in zip(self.components, other.components)),
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, NatTransformation):
            return NotImplemented
        return self.components == other.components and self.source.shape == other.source.shape

    def __hash__(self) -> int:
        return hash(self.components)

    @classmethod
    def build(
        cls, source: Copresheaf, target: Copresheaf, components: Mapping[str, Mapping]
    ) -> NatTransformation:
        comps = []
        for s, obj in enumerate(source.shape.objects):
            m = components.get(obj, {})
            comps.append(tuple(target.index(s, m[x]) for x in source.sets[s]))
        return cls(source, target, tuple(comps))


def identity_transformation(A: Copresheaf) -> NatTransformation:
    return NatTransformation(A, A, tuple(tuple(range(len(s))) for s in A.sets))


def check_naturality(h: NatTransformation) -> ValidationReport:
    report = ValidationReport()
    X, A = h.source, h.target
    C = X.shape
    for f, a in enumerate(C.arrows):
        hs, ht = h.components[a.source], h.components[a.target]
        xf, af = X.maps[f], A.maps[f]
        for x in range(len(X.sets[a.source])):
            if af[hs[x]] != ht[xf[x]]:
                report.violations.append(
                    f"naturality fails at ({a.name}, {X.sets[a.source][x]!r})"
                )
    return report


# -- homomorphism search ---------------------------------------------------


def _hom_network(X: FinDiagram, A: FinDiagram) -> tuple[Network, list[int]]:
    # the network of the diagram A . gr X, written down without building gr X
    C = X.shape
    offsets = []
    sizes: list[int] = []
    for s, xs in enumerate(X.sets):
        offsets.append(len(sizes))
        sizes.extend([len(A.sets[s])] * len(xs))
    net = Network(sizes)
    for f in C.non_identity:
        a = C.arrows[f]
        os, ot, g = offsets[a.source], offsets[a.target], A.maps[f]
        for x, y in enumerate(X.maps[f]):
            net.add(os + x, ot + y, g)
    return net, offsets


def iter_hom(
    X: FinDiagram, A: FinDiagram, injective: bool = False
) -> Iterator[NatTransformation]:
    _check_base(X, A)
    net, offsets = _hom_network(X, A)
    if injective:
        for s, xs in enumerate(X.sets):
            net.all_different(range(offsets[s], offsets[s] + len(xs)))
    Xc, Ac = Copresheaf.of(X), Copresheaf.of(A)
    bounds = [(o, o + len(xs)) for o, xs in zip(offsets, X.sets)]
    for sol in net.solutions():
        yield NatTransformation(Xc, Ac, tuple(sol[lo:hi] for lo, hi in bounds))


def hom(X: FinDiagram, A: FinDiagram, mode: str = "decide"):
    """Natural transformations ``X -> A``.

    ``mode`` is ``"decide"`` (bool), ``"enumerate"`` (list) or ``"count"`` (int).
    """
    it = iter_hom(X, A)
    if mode == "decide":
        return next(it, None) is not None
    if mode == "enumerate":
        return list(it)
    if mode == "count":
        return sum(1 for _ in it)
    raise ValueError(f"unknown mode {mode!r}")


def find_hom(X: FinDiagram, A: FinDiagram) -> NatTransformation | None:
    return next(iter_hom(X, A), None)


def hom_equivalent(A: FinDiagram, B: FinDiagram) -> bool:
    return hom(A, B) and hom(B, A)


def find_isomorphism(A: FinDiagram, B: FinDiagram) -> NatTransformation | None:
    _check_base(A, B)
    if [len(s) for s in A.sets] != [len(s) for s in B.sets]:
        return None
    return next(iter_hom(A, B, injective=True), None)


def isomorphic(A: FinDiagram, B: FinDiagram) -> bool:
    return find_isomorphism(A, B) is not None


# -- constructions ---------------------------------------------------------


def power(A: FinDiagram, N: Sequence) -> Copresheaf:
    """Componentwise ``A^N``: tuples indexed by positions of ``N``, lexicographic."""
    k = len(N)
    sets = []
    for s in A.sets:
        sets.append(tuple(product(s, repeat=k)))
    maps = []
    for f, a in enumerate(A.shape.arrows):
        g = A.maps[f]
        m = len(A.sets[a.target])
        row = []
        for t in product(range(len(A.sets[a.source])), repeat=k):
            idx = 0
            for x in t:
                idx = idx * m + g[x]
            row.append(idx)
        maps.append(tuple(row))
    return Copresheaf(A.shape, tuple(sets), tuple(maps))


def projection(A: FinDiagram, N: Sequence, i: int) -> NatTransformation:
    """The ``i``-th coordinate map ``A^N -> A``."""
    P = power(A, N)
    comps = []
    for s, xs in enumerate(A.sets):
        n = len(xs)
        comps.append(tuple(t[i] for t in product(range(n), repeat=len(N))))
    return NatTransformation(P, Copresheaf.of(A), tuple(comps))


def yoneda(S: FinCategory, s: str | int) -> Copresheaf:
    """``hom(s, -)``; elements are morphism names."""
    s = S.obj(s)
    sets = tuple(tuple(S.arrows[g].name for g in S.hom(s, t)) for t in range(len(S.objects)))
    pos = [{g: k for k, g in enumerate(S.hom(s, t))} for t in range(len(S.objects))]
    maps = []
    for u, a in enumerate(S.arrows):
        maps.append(tuple(pos[a.target][S.compose(u, g)] for g in S.hom(s, a.source)))
    return Copresheaf(S, sets, tuple(maps))


def empty(S: FinCategory) -> Copresheaf:
    return Copresheaf(S, tuple(() for _ in S.objects), tuple(() for _ in S.arrows))


def terminal(S: FinCategory) -> Copresheaf:
    return Copresheaf(S, tuple((0,) for _ in S.objects), tuple((0,) for _ in S.arrows))


def coproduct(A: FinDiagram, B: FinDiagram) -> Copresheaf:
    """Disjoint union; elements are tagged ``(0, x)`` and ``(1, y)``."""
    _check_base(A, B)
    sets = tuple(
        tuple((0, x) for x in a) + tuple((1, y) for y in b) for a, b in zip(A.sets, B.sets)
    )
    maps = []
    for f, arr in enumerate(A.shape.arrows):
        off = len(A.sets[arr.target])
        maps.append(A.maps[f] + tuple(y + off for y in B.maps[f]))
    return Copresheaf(A.shape, sets, tuple(maps))


# -- graphs ----------------------------------------------------------------


def digraph(
    vertices: Iterable[Element],
    edges: Iterable[tuple[Element, Element]] | Mapping[Element, tuple[Element, Element]],
    base: FinCategory | None = None,
) -> Copresheaf:
    """A multidigraph over the digraph category.

    A list of pairs names each edge by its pair, adding a counter to repeated
    pairs; a mapping gives edge names explicitly.
    """
    base = base or digraph_category()
    vertices = list(vertices)
    if isinstance(edges, Mapping):
        named = list(edges.items())
    else:
        named = []
        seen: dict[tuple, int] = {}
        for u, v in edges:
            k = seen.get((u, v), 0)
            seen[(u, v)] = k + 1
            named.append(((u, v) if k == 0 else (u, v, k), (u, v)))
    return Copresheaf.of(
        FinDiagram.build(
            base,
            {"V": vertices, "E": [e for e, _ in named]},
            {"s": {e: uv[0] for e, uv in named}, "t": {e: uv[1] for e, uv in named}},
        )
    )


def symmetric_digraph(n_or_vertices, edges: Iterable[tuple[Element, Element]]) -> Copresheaf:
    """Digraph with both orientations of each listed undirected edge."""
    vs = list(range(n_or_vertices)) if isinstance(n_or_vertices, int) else list(n_or_vertices)
    arcs = []
    for u, v in edges:
        arcs.append((u, v))
        if u != v:
            arcs.append((v, u))
    return digraph(vs, arcs)


def complete_graph(n: int) -> Copresheaf:
    """``K_n`` as a symmetric loopless digraph."""
    return digraph(range(n), [(u, v) for u in range(n) for v in range(n) if u != v])


def cycle(n: int) -> Copresheaf:
    """The undirected ``n``-cycle as a symmetric digraph."""
    return symmetric_digraph(n, [(i, (i + 1) % n) for i in range(n)])


def directed_cycle(n: int) -> Copresheaf:
    return digraph(range(n), [(i, (i + 1) % n) for i in range(n)])


def directed_path(n: int) -> Copresheaf:
    """``n`` vertices joined by ``n - 1`` forward edges."""
    return digraph(range(n), [(i, i + 1) for i in range(n - 1)])


def loop() -> Copresheaf:
    """One vertex with one loop: the terminal digraph."""
    return digraph([0], [(0, 0)])


def ugraph(vertices: Iterable[Element], edges: Iterable[tuple[Element, Element]]) -> Copresheaf:
    """An undirected graph over the category with edge reversal.

    Each edge ``{u, v}`` contributes the two darts ``(u, v)`` and ``(v, u)``
    swapped by ``r``; a loop contributes one dart fixed by ``r``.
    """
    darts: list[tuple] = []
    for u, v in edges:
        darts.append((u, v))
        if u != v:
            darts.append((v, u))
    darts = list(dict.fromkeys(darts))
    return Copresheaf.of(
        FinDiagram.build(
            graph_category(),
            {"V": list(vertices), "E": darts},
            {"s": lambda d: d[0], "t": lambda d: d[1], "r": lambda d: (d[1], d[0])},
        )
    )
