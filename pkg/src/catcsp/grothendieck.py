"""The category of elements ``gr`` and its left adjoint ``gl``.

``gr`` turns a homomorphism instance into a satisfiability instance: a
functor ``J -> S`` whose solutions in a template ``A`` are the
solutions of ``A . gr X``.  ``gl`` goes back by gluing representables.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable

from .copresheaf import Copresheaf, _check_base
from .fincat import Arrow, CatFunctor, FinCategory, opposite
from .findiag import FinDiagram, colimit, restrict


@dataclass(frozen=True, eq=False)
class ElementsCategory:
    """``gr X`` together with its projection to the base.

    ``elements[i]`` is the pair ``(s, x)`` behind object ``i``: a base object
    index and an element of ``X(s)``.
    """

    category: FinCategory
    projection: CatFunctor
    elements: tuple[tuple[int, Hashable], ...]


def element_name(obj: str, x: Hashable) -> str:
    if isinstance(x, tuple):
        x = "(" + ",".join(map(str, x)) + ")"
    return f"{obj}:{x}"


def gr(X: FinDiagram) -> ElementsCategory:
    """Objects ``(s, x)`` in base order then element order; one arrow per
    base morphism ``f`` and element of its source, named ``f@(s:x)``."""
    C = X.shape
    offsets = []
    elements: list[tuple[int, Hashable]] = []
    names: list[str] = []
    for s, xs in enumerate(X.sets):
        offsets.append(len(elements))
        for x in xs:
            elements.append((s, x))
            names.append(element_name(C.objects[s], x))
    arrows: list[Arrow] = []
    where: dict[tuple[int, int], int] = {}
    mmap: list[int] = []
    for f, a in enumerate(C.arrows):
        for x, y in enumerate(X.maps[f]):
            src, tgt = offsets[a.source] + x, offsets[a.target] + y
            where[(f, x)] = len(arrows)
            arrows.append(Arrow(f"{a.name}@{names[src]}", src, tgt))
            mmap.append(f)
    identities = tuple(
        where[(C.identities[s], x)] for s, xs in enumerate(X.sets) for x in range(len(xs))
    )
    table: dict[tuple[int, int], int] = {}
    for (g, f), h in C.table.items():
        for x, y in enumerate(X.maps[f]):
            table[(where[(g, y)], where[(f, x)])] = where[(h, x)]
    cat = FinCategory(tuple(names), tuple(arrows), identities, table)
    proj = CatFunctor(cat, C, tuple(s for s, _ in elements), tuple(mmap))
    return ElementsCategory(cat, proj, tuple(elements))


def template_condition(A: FinDiagram, I: FinDiagram) -> FinDiagram:
    """The diagram ``A . gr I``; its solutions are the homomorphisms ``I -> A``."""
    _check_base(A, I)
    return restrict(A, gr(I).projection)


def instance_diagram(A: FinDiagram, D: CatFunctor) -> FinDiagram:
    """``A . D`` for an instance ``D: J -> S``."""
    if D.target != A.shape:
        raise ValueError("instance does not land in the template's base")
    return restrict(A, D)


def gl(D: CatFunctor) -> Copresheaf:
    """The colimit of ``yo . D^op``, one base object at a time.

    Elements at ``t`` are class representatives ``(j, g)``: an object name of
    the shape and the name of a morphism ``g: D(j) -> t``.
    """
    J, S = D.source, D.target
    Jop = opposite(J)
    nJ, nS = len(J.objects), len(S.objects)
    classes = []
    for t in range(nS):
        sets = tuple(tuple(S.hom(D.object_map[j], t)) for j in range(nJ))
        pos = [{g: k for k, g in enumerate(hs)} for hs in sets]
        maps = []
        for u, a in enumerate(J.arrows):
            # in J^op, u runs from a.target to a.source: g |-> g . D(u)
            du = D.morphism_map[u]
            maps.append(tuple(pos[a.source][S.compose(g, du)] for g in sets[a.target]))
        Q = colimit(FinDiagram(Jop, sets, tuple(maps)))
        classes.append((sets, pos, Q))
    out_sets = tuple(
        tuple((J.objects[j], S.arrows[sets[j][k]].name) for j, k in Q.carrier)
        for sets, _, Q in classes
    )
    out_maps = []
    for v, a in enumerate(S.arrows):
        sets_s, _, Qs = classes[a.source]
        _, pos_t, Qt = classes[a.target]
        row = []
        for j, k in Qs.carrier:
            g = sets_s[j][k]
            vg = S.compose(v, g)
            row.append(Qt.injections[j][pos_t[j][vg]])
        out_maps.append(tuple(row))
    return Copresheaf(S, out_sets, tuple(out_maps))


def instance_of(X: FinDiagram) -> CatFunctor:
    """The satisfiability instance ``gr X -> S`` behind a homomorphism instance."""
    return gr(X).projection
