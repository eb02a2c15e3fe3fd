"""Diagrams of finite sets: limits by search, colimits by union-find."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Hashable, Iterator, Mapping, Sequence

from ._search import Network
from .fincat import FinCategory, ValidationReport

Element = Hashable


@dataclass(frozen=True, eq=False)
class FinDiagram:
    """A functor ``shape -> Fin``.

    ``sets[i]`` lists the elements of object ``i``; ``maps[f]`` gives, for
    each element position of the source of ``f``, the position of its image.
    """

    shape: FinCategory
    sets: tuple[tuple[Element, ...], ...]
    maps: tuple[tuple[int, ...], ...]

    @cached_property
    def _positions(self) -> tuple[dict[Element, int], ...]:
        return tuple({x: k for k, x in enumerate(s)} for s in self.sets)

    def index(self, obj: int, element: Element) -> int:
        return self._positions[obj][element]

    def set_of(self, obj: str | int) -> tuple[Element, ...]:
        return self.sets[self.shape.obj(obj)]

    def apply(self, f: str | int, element: Element) -> Element:
        f = self.shape.mor(f)
        a = self.shape.arrows[f]
        return self.sets[a.target][self.maps[f][self.index(a.source, element)]]

    def size(self, obj: str | int) -> int:
        return len(self.sets[self.shape.obj(obj)])

    @property
    def total_size(self) -> int:
        return sum(len(s) for s in self.sets)

    def __repr__(self) -> str:
        parts = ", ".join(f"{o}:{len(s)}" for o, s in zip(self.shape.objects, self.sets))
        return f"{type(self).__name__}({parts})"

    @classmethod
    def build(
        cls,
        shape: FinCategory,
        sets: Mapping[str, Sequence[Element]],
        maps: Mapping[str, Mapping[Element, Element] | Callable[[Element], Element]],
    ):
        """Build from element lists and maps given by name.

        Identities and maps out of empty sets are filled in.  Other omitted
        maps are derived by composing given ones when the morphism factors
        through them.
        """
        set_tuple = tuple(tuple(sets.get(o, ())) for o in shape.objects)
        pos = [{x: k for k, x in enumerate(s)} for s in set_tuple]
        for o, s in zip(shape.objects, set_tuple):
            if len(pos[shape.obj(o)]) != len(s):
                raise ValueError(f"duplicate elements in the set of {o}")
        table: list[tuple[int, ...] | None] = [None] * len(shape.arrows)
        for i, a in enumerate(shape.arrows):
            if shape.is_identity(i):
                table[i] = tuple(range(len(set_tuple[a.source])))
            elif not set_tuple[a.source] and a.name not in maps:
                table[i] = ()
            elif a.name in maps:
                m = maps[a.name]
                look = m if callable(m) else m.__getitem__
                try:
                    table[i] = tuple(pos[a.target][look(x)] for x in set_tuple[a.source])
                except KeyError as err:
                    raise ValueError(
                        f"map {a.name} is not total or leaves its target set: {err}"
                    ) from None
        changed = True
        while changed and any(t is None for t in table):
            changed = False
            for (g, f), h in shape.table.items():
                if table[h] is None and table[g] is not None and table[f] is not None:
                    tg, tf = table[g], table[f]
                    table[h] = tuple(tg[x] for x in tf)
                    changed = True
        missing = [shape.arrows[i].name for i, t in enumerate(table) if t is None]
        if missing:
            raise ValueError(f"no map given for {', '.join(missing)}")
        return cls(shape, set_tuple, tuple(table))  # type: ignore[arg-type]

    def validate(self) -> ValidationReport:
        report = ValidationReport()
        v = report.violations
        C = self.shape
        if len(self.sets) != len(C.objects) or len(self.maps) != len(C.arrows):
            v.append("diagram is not total on its shape")
            return report
        for f, a in enumerate(C.arrows):
            m = self.maps[f]
            if len(m) != len(self.sets[a.source]) or any(
                not 0 <= y < len(self.sets[a.target]) for y in m
            ):
                v.append(f"map of {a.name} is not a total function between its sets")
        if v:
            return report
        for o, i in enumerate(C.identities):
            if self.maps[i] != tuple(range(len(self.sets[o]))):
                v.append(f"identity of {C.objects[o]} is not sent to the identity")
        for (g, f), h in C.table.items():
            mg, mf = self.maps[g], self.maps[f]
            if tuple(mg[x] for x in mf) != self.maps[h]:
                v.append(f"composite {C.arrows[g].name} . {C.arrows[f].name} is not respected")
        return report


def restrict(D: FinDiagram, F) -> FinDiagram:
    """The composite ``D . F`` for a functor ``F`` into the shape of ``D``."""
    return FinDiagram(
        F.source,
        tuple(D.sets[o] for o in F.object_map),
        tuple(D.maps[f] for f in F.morphism_map),
    )


# -- limits ----------------------------------------------------------------


def network(D: FinDiagram) -> Network:
    net = Network([len(s) for s in D.sets])
    for f in D.shape.non_identity:
        a = D.shape.arrows[f]
        net.add(a.source, a.target, D.maps[f])
    return net


def iter_solutions(D: FinDiagram) -> Iterator[tuple[Element, ...]]:
    """Yield the solutions of ``D`` as tuples of elements, one per object."""
    for sol in network(D).solutions():
        yield tuple(D.sets[i][x] for i, x in enumerate(sol))


def limit(D: FinDiagram, mode: str = "decide"):
    """Solutions of ``D``.

    ``mode="decide"`` returns whether one exists, ``"enumerate"`` the list of
    all solutions, ``"count"`` their number.
    """
    it = iter_solutions(D)
    if mode == "decide":
        return next(it, None) is not None
    if mode == "enumerate":
        return list(it)
    if mode == "count":
        return sum(1 for _ in it)
    raise ValueError(f"unknown mode {mode!r}")


def is_solution(D: FinDiagram, solution: Sequence[Element]) -> bool:
    pos = [D.index(i, x) for i, x in enumerate(solution)]
    return all(
        D.maps[f][pos[a.source]] == pos[a.target] for f, a in enumerate(D.shape.arrows)
    )


# -- colimits --------------------------------------------------------------


@dataclass(frozen=True)
class QuotientSet:
    """Carrier of a colimit and the injections of each object's set into it.

    Carrier elements are the least ``(object, element position)`` pair of
    their class, listed in increasing order.
    """

    carrier: tuple[tuple[int, int], ...]
    injections: tuple[tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.carrier)

    def names(self, D: FinDiagram) -> tuple[tuple[str, Element], ...]:
        return tuple((D.shape.objects[o], D.sets[o][k]) for o, k in self.carrier)


def colimit(D: FinDiagram) -> QuotientSet:
    offsets = []
    total = 0
    for s in D.sets:
        offsets.append(total)
        total += len(s)
    parent = list(range(total))

    def find(x: int) -> int:
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    for f in D.shape.non_identity:
        a = D.shape.arrows[f]
        os, ot = offsets[a.source], offsets[a.target]
        for x, y in enumerate(D.maps[f]):
            rx, ry = find(os + x), find(ot + y)
            if rx != ry:
                if rx < ry:
                    parent[ry] = rx
                else:
                    parent[rx] = ry
    roots = sorted({find(x) for x in range(total)})
    where = {r: k for k, r in enumerate(roots)}
    owner = []
    for o, s in enumerate(D.sets):
        owner.extend((o, k) for k in range(len(s)))
    carrier = tuple(owner[r] for r in roots)
    injections = tuple(
        tuple(where[find(offsets[o] + k)] for k in range(len(s)))
        for o, s in enumerate(D.sets)
    )
    return QuotientSet(carrier, injections)
