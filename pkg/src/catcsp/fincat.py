"""Finite categories, functors between them, and finite presentations.

A :class:`FinCategory` stores its composition as a total explicit table
indexed by morphism positions.  Objects and morphisms keep their declaration
order, which every enumeration downstream relies on.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Iterable, Mapping, Sequence


class CapExceeded(Exception):
    """A closure or enumeration grew past its configured cap."""


class SizeCap(CapExceeded):
    """A power or product would exceed the configured size cap."""


@dataclass(frozen=True)
class Arrow:
    name: str
    source: int
    target: int


@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        if self.ok:
            return "ok"
        return "\n".join(self.violations)


@dataclass(frozen=True, eq=False)
class FinCategory:
    objects: tuple[str, ...]
    arrows: tuple[Arrow, ...]
    identities: tuple[int, ...]
    table: Mapping[tuple[int, int], int]

    # -- lookups ---------------------------------------------------------

    @cached_property
    def _object_index(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.objects)}

    @cached_property
    def _arrow_index(self) -> dict[str, int]:
        return {a.name: i for i, a in enumerate(self.arrows)}

    def obj(self, name: str | int) -> int:
        if isinstance(name, int):
            return name
        try:
            return self._object_index[name]
        except KeyError:
            raise KeyError(f"unknown object {name!r}") from None

    def mor(self, name: str | int) -> int:
        if isinstance(name, int):
            return name
        try:
            return self._arrow_index[name]
        except KeyError:
            raise KeyError(f"unknown morphism {name!r}") from None

    def has_morphism(self, name: str) -> bool:
        return name in self._arrow_index

    def src(self, f: int) -> int:
        return self.arrows[f].source

    def tgt(self, f: int) -> int:
        return self.arrows[f].target

    def compose(self, g: int, f: int) -> int:
        """Return ``g . f`` (apply ``f`` first)."""
        return self.table[(g, f)]

    def identity(self, obj: int) -> int:
        return self.identities[obj]

    @cached_property
    def identity_set(self) -> frozenset[int]:
        return frozenset(self.identities)

    def is_identity(self, f: int) -> bool:
        return f in self.identity_set

    @cached_property
    def _homs(self) -> dict[tuple[int, int], tuple[int, ...]]:
        out: dict[tuple[int, int], list[int]] = {}
        for i, a in enumerate(self.arrows):
            out.setdefault((a.source, a.target), []).append(i)
        return {k: tuple(v) for k, v in out.items()}

    def hom(self, s: int, t: int) -> tuple[int, ...]:
        return self._homs.get((s, t), ())

    @cached_property
    def non_identity(self) -> tuple[int, ...]:
        return tuple(i for i in range(len(self.arrows)) if i not in self.identity_set)

    def out_of(self, s: int) -> tuple[int, ...]:
        return tuple(i for i, a in enumerate(self.arrows) if a.source == s)

    @property
    def size(self) -> int:
        return len(self.arrows)

    def name(self, f: int) -> str:
        return self.arrows[f].name

    # -- equality --------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, FinCategory):
            return NotImplemented
        return (
            self.objects == other.objects
            and self.arrows == other.arrows
            and self.identities == other.identities
            and dict(self.table) == dict(other.table)
        )

    def __hash__(self) -> int:
        return hash((self.objects, self.arrows))

    def __repr__(self) -> str:
        return f"FinCategory({len(self.objects)} objects, {len(self.arrows)} morphisms)"

    # -- construction ----------------------------------------------------

    @classmethod
    def build(
        cls,
        objects: Sequence[str],
        arrows: Iterable[tuple[str, str, str]] = (),
        compose: Mapping[tuple[str, str], str] | None = None,
    ) -> FinCategory:
        """Build a category from names.

        Identities ``id_<obj>`` are added in front of the declared arrows and
        their composites are filled in.  ``compose`` maps ``(g, f)`` to the
        name of ``g . f`` for every composable pair of non-identity arrows.
        The result is not validated.
        """
        objects = tuple(objects)
        index = {o: i for i, o in enumerate(objects)}
        arrs = [Arrow(f"id_{o}", i, i) for i, o in enumerate(objects)]
        identities = tuple(range(len(objects)))
        for name, s, t in arrows:
            arrs.append(Arrow(name, index[s], index[t]))
        names = {a.name: i for i, a in enumerate(arrs)}
        if len(names) != len(arrs):
            raise ValueError("duplicate morphism names")
        table: dict[tuple[int, int], int] = {}
        for i, a in enumerate(arrs):
            table[(identities[a.target], i)] = i
            table[(i, identities[a.source])] = i
        for (g, f), h in (compose or {}).items():
            table[(names[g], names[f])] = names[h]
        return cls(objects, tuple(arrs), identities, table)


# -- validation ------------------------------------------------------------


def validate_category(C: FinCategory) -> ValidationReport:
    report = ValidationReport()
    v = report.violations
    n = len(C.arrows)
    if len(C.identities) != len(C.objects):
        v.append("identity map is not total on objects")
        return report
    for o, i in enumerate(C.identities):
        a = C.arrows[i]
        if a.source != o or a.target != o:
            v.append(f"identity {a.name} is not an endomorphism of {C.objects[o]}")
    for (g, f), h in C.table.items():
        if not (0 <= g < n and 0 <= f < n and 0 <= h < n):
            v.append(f"composition entry ({g}, {f}) -> {h} out of range")
            continue
        ag, af, ah = C.arrows[g], C.arrows[f], C.arrows[h]
        if af.target != ag.source:
            v.append(f"composite {ag.name} . {af.name} defined on a non-composable pair")
        elif ah.source != af.source or ah.target != ag.target:
            v.append(f"composite {ag.name} . {af.name} = {ah.name} has wrong endpoints")
    if v:
        return report
    for f, af in enumerate(C.arrows):
        for g in C.out_of(af.target):
            if (g, f) not in C.table:
                v.append(f"composite {C.arrows[g].name} . {af.name} is missing")
    if v:
        return report
    for f, af in enumerate(C.arrows):
        if C.table[(C.identities[af.target], f)] != f:
            v.append(f"left identity law fails for {af.name}")
        if C.table[(f, C.identities[af.source])] != f:
            v.append(f"right identity law fails for {af.name}")
    for f, af in enumerate(C.arrows):
        for g in C.out_of(af.target):
            gf = C.table[(g, f)]
            for h in C.out_of(C.arrows[g].target):
                if C.table[(h, gf)] != C.table[(C.table[(h, g)], f)]:
                    v.append(
                        "associativity fails for "
                        f"({C.arrows[h].name}, {C.arrows[g].name}, {af.name})"
                    )
    return report


# -- functors --------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CatFunctor:
    source: FinCategory
    target: FinCategory
    object_map: tuple[int, ...]
    morphism_map: tuple[int, ...]

    def on_object(self, i: int) -> int:
        return self.object_map[i]

    def on_morphism(self, f: int) -> int:
        return self.morphism_map[f]

    @classmethod
    def build(
        cls,
        source: FinCategory,
        target: FinCategory,
        objects: Mapping[str, str],
        morphisms: Mapping[str, str],
    ) -> CatFunctor:
        """Build from name maps; identities are mapped to identities unless given."""
        omap = tuple(target.obj(objects[o]) for o in source.objects)
        mmap = []
        for i, a in enumerate(source.arrows):
            if a.name in morphisms:
                mmap.append(target.mor(morphisms[a.name]))
            elif source.is_identity(i):
                mmap.append(target.identity(omap[a.source]))
            else:
                raise KeyError(f"no image given for morphism {a.name!r}")
        return cls(source, target, omap, tuple(mmap))

    def then(self, other: CatFunctor) -> CatFunctor:
        """The composite ``other . self``."""
        if self.target != other.source:
            raise ValueError("functors are not composable")
        return CatFunctor(
            self.source,
            other.target,
            tuple(other.object_map[o] for o in self.object_map),
            tuple(other.morphism_map[f] for f in self.morphism_map),
        )


def identity_functor(C: FinCategory) -> CatFunctor:
    return CatFunctor(C, C, tuple(range(len(C.objects))), tuple(range(len(C.arrows))))


def validate_functor(F: CatFunctor) -> ValidationReport:
    report = ValidationReport()
    v = report.violations
    S, T = F.source, F.target
    if len(F.object_map) != len(S.objects) or len(F.morphism_map) != len(S.arrows):
        v.append("functor maps are not total on the source")
        return report
    for f, a in enumerate(S.arrows):
        b = T.arrows[F.morphism_map[f]]
        if b.source != F.object_map[a.source] or b.target != F.object_map[a.target]:
            v.append(f"{a.name} is sent to {b.name} with mismatched endpoints")
    for o in range(len(S.objects)):
        if F.morphism_map[S.identities[o]] != T.identities[F.object_map[o]]:
            v.append(f"identity of {S.objects[o]} is not preserved")
    if v:
        return report
    for (g, f), h in S.table.items():
        if T.table[(F.morphism_map[g], F.morphism_map[f])] != F.morphism_map[h]:
            v.append(
                f"composite {S.arrows[g].name} . {S.arrows[f].name} is not preserved"
            )
    return report


# -- opposite --------------------------------------------------------------


def opposite(C: FinCategory) -> FinCategory:
    """Same objects and names, arrows reversed, composition transposed."""
    arrows = tuple(Arrow(a.name, a.target, a.source) for a in C.arrows)
    table = {(f, g): h for (g, f), h in C.table.items()}
    return FinCategory(C.objects, arrows, C.identities, table)


# -- standard categories ---------------------------------------------------


def discrete(objects: Sequence[str]) -> FinCategory:
    return FinCategory.build(objects)


def point() -> FinCategory:
    return FinCategory.build(["*"])


def digraph_category() -> FinCategory:
    """Two objects V, E and two arrows s, t : E -> V."""
    return FinCategory.build(["V", "E"], [("s", "E", "V"), ("t", "E", "V")])


def graph_category() -> FinCategory:
    """Like the digraph category plus an edge reversal r with r.r = id, s.r = t, t.r = s."""
    return FinCategory.build(
        ["V", "E"],
        [("s", "E", "V"), ("t", "E", "V"), ("r", "E", "E")],
        {("r", "r"): "id_E", ("s", "r"): "t", ("t", "r"): "s"},
    )


def signature_category(signature: Sequence[tuple[str, int]]) -> FinCategory:
    """One object ``V`` plus an object per relation symbol with projections ``R_1 .. R_k``."""
    names = [r for r, _ in signature]
    if "V" in names:
        raise ValueError("relation symbol 'V' clashes with the domain object")
    arrows = [(f"{r}_{i + 1}", r, "V") for r, k in signature for i in range(k)]
    return FinCategory.build(["V", *names], arrows)


def fin_window(sets: Sequence[Sequence]) -> FinCategory:
    """The full subcategory of finite sets on the given sets.

    Object ``i`` is named by its position; morphisms ``i -> j`` are all
    functions, named ``"i>j:" + images`` and listed in lexicographic order of
    their image tuples (an image tuple lists target positions).
    """
    sizes = [len(s) for s in sets]
    objects = tuple(str(i) for i in range(len(sets)))
    arrows: list[Arrow] = []
    fmap: list[tuple[int, ...]] = []
    index: dict[tuple[int, int, tuple[int, ...]], int] = {}
    for i, m in enumerate(sizes):
        for j, n in enumerate(sizes):
            for pi in product(range(n), repeat=m):
                index[(i, j, pi)] = len(arrows)
                arrows.append(Arrow(f"{i}>{j}:" + ",".join(map(str, pi)), i, j))
                fmap.append(pi)
    identities = tuple(index[(i, i, tuple(range(m)))] for i, m in enumerate(sizes))
    table: dict[tuple[int, int], int] = {}
    for f, af in enumerate(arrows):
        for j, n in enumerate(sizes):
            for pi in product(range(n), repeat=sizes[af.target]):
                g = index[(af.target, j, pi)]
                table[(g, f)] = index[(af.source, j, tuple(pi[x] for x in fmap[f]))]
    return FinCategory(objects, tuple(arrows), identities, table)


def window_map(C: FinCategory, f: int) -> tuple[int, ...]:
    """The function underlying a morphism of :func:`fin_window`."""
    body = C.arrows[f].name.split(":", 1)[1]
    return tuple(int(x) for x in body.split(",")) if body else ()


# -- presentations ---------------------------------------------------------

Word = tuple[str, ...]


@dataclass(frozen=True)
class Presentation:
    """Generators and relations.

    A word lists generator names in composition order: ``("s", "r")`` is
    ``s . r`` and applies ``r`` first.  The token ``id_X`` stands for the
    empty word at ``X``.
    """

    objects: tuple[str, ...]
    generators: tuple[tuple[str, str, str], ...]
    relations: tuple[tuple[Word, Word], ...] = ()

    def word_endpoints(self, word: Word) -> tuple[str, str]:
        gens = {g: (s, t) for g, s, t in self.generators}
        ends: tuple[str, str] | None = None
        for tok in reversed(word):
            if tok.startswith("id_") and tok[3:] in self.objects:
                s = t = tok[3:]
            elif tok in gens:
                s, t = gens[tok]
            else:
                raise KeyError(f"unknown generator {tok!r}")
            if ends is not None and ends[1] != s:
                raise ValueError(f"word {'.'.join(word)} is not composable")
            ends = (s if ends is None else ends[0], t)
        if ends is None:
            raise ValueError("empty word")
        return ends

    def validate(self) -> ValidationReport:
        report = ValidationReport()
        for u, w in self.relations:
            try:
                eu, ew = self.word_endpoints(u), self.word_endpoints(w)
            except (KeyError, ValueError) as err:
                report.violations.append(str(err))
                continue
            if eu != ew:
                report.violations.append(
                    f"relation {'.'.join(u)} = {'.'.join(w)} relates non-parallel words"
                )
        return report


def close_presentation(P: Presentation, cap: int) -> FinCategory:
    """Enumerate the category presented by ``P``.

    Runs a coset enumeration per source object: nodes are morphisms out of
    that object, generators act by post-composition, every relation is traced
    from every node and the endpoints are identified.  Raises
    :class:`CapExceeded` when more than ``cap`` morphisms are live.
    """
    if cap < len(P.generators):
        raise ValueError("cap must be at least the number of generators")
    report = P.validate()
    if not report:
        raise ValueError(str(report))
    objects = tuple(P.objects)
    oidx = {o: i for i, o in enumerate(objects)}
    gens = [(g, oidx[s], oidx[t]) for g, s, t in P.generators]
    gidx = {g: i for i, (g, _, _) in enumerate(gens)}
    gens_from: list[list[int]] = [[] for _ in objects]
    for i, (_, s, _) in enumerate(gens):
        gens_from[s].append(i)

    def steps(word: Word) -> list[int]:
        # application order, identities dropped
        return [gidx[tok] for tok in reversed(word) if tok in gidx]

    rels_at: list[list[tuple[list[int], list[int]]]] = [[] for _ in objects]
    for u, w in P.relations:
        src = oidx[P.word_endpoints(u)[0]]
        rels_at[src].append((steps(u), steps(w)))
    slack = max((max(len(u), len(w)) for u, w in P.relations), default=0)

    live_total = 0
    per_source: list[tuple[list[int], list[int], dict[tuple[int, int], int]]] = []
    for s in range(len(objects)):
        parent: list[int] = [0]
        where: list[int] = [s]
        edges: dict[tuple[int, int], int] = {}
        live = 1

        def find(n: int) -> int:
            while parent[n] != n:
                parent[n] = parent[parent[n]]
                n = parent[n]
            return n

        def define(n: int, g: int) -> int:
            nonlocal live
            if live_total + live >= cap + slack:
                raise CapExceeded(f"presentation has more than {cap} morphisms")
            m = len(parent)
            parent.append(m)
            where.append(gens[g][2])
            edges[(n, g)] = m
            live += 1
            return m

        def follow(n: int, g: int, make: bool) -> int | None:
            m = edges.get((n, g))
            if m is None:
                return define(n, g) if make else None
            m = find(m)
            edges[(n, g)] = m
            return m

        def coincide(a: int, b: int) -> None:
            nonlocal live
            queue = [(a, b)]
            while queue:
                a, b = queue.pop()
                a, b = find(a), find(b)
                if a == b:
                    continue
                if b < a:
                    a, b = b, a
                parent[b] = a
                live -= 1
                for g in gens_from[where[b]]:
                    tb = edges.pop((b, g), None)
                    if tb is None:
                        continue
                    ta = edges.get((a, g))
                    if ta is None:
                        edges[(a, g)] = tb
                    else:
                        queue.append((ta, tb))

        n = 0
        while n < len(parent):
            if find(n) != n:
                n += 1
                continue
            for u, w in rels_at[where[n]]:
                end_u = n
                for g in u:
                    end_u = follow(find(end_u), g, True)
                end_w = n
                for g in w:
                    end_w = follow(find(end_w), g, True)
                coincide(end_u, end_w)
                if find(n) != n:
                    break
            if find(n) == n:
                for g in gens_from[where[n]]:
                    follow(n, g, True)
            n += 1
        live_total += live
        if live_total > cap:
            raise CapExceeded(f"presentation has more than {cap} morphisms")
        per_source.append((parent, where, edges))

    # shortest words by breadth-first search, generators in declaration order
    arrows: list[Arrow] = []
    node_of: list[tuple[int, int]] = []
    index: dict[tuple[int, int], int] = {}
    words: list[list[int]] = []
    identities: list[int] = []
    for s, (parent, where, edges) in enumerate(per_source):
        seen = {0: []}
        order = [0]
        k = 0
        while k < len(order):
            n = order[k]
            k += 1
            for g in gens_from[where[n]]:
                m = edges[(n, g)]
                while parent[m] != m:
                    m = parent[m]
                if m not in seen:
                    seen[m] = seen[n] + [g]
                    order.append(m)
        for n in order:
            w = seen[n]
            if not w:
                name = f"id_{objects[s]}"
                identities.append(len(arrows))
            else:
                name = ".".join(gens[g][0] for g in reversed(w))
            index[(s, n)] = len(arrows)
            arrows.append(Arrow(name, s, where[n]))
            node_of.append((s, n))
            words.append(w)

    def run(s: int, n: int, w: list[int]) -> int:
        parent, _, edges = per_source[s]
        for g in w:
            n = edges[(n, g)]
            while parent[n] != n:
                n = parent[n]
        return n

    table: dict[tuple[int, int], int] = {}
    by_source: dict[int, list[int]] = {}
    for i, a in enumerate(arrows):
        by_source.setdefault(a.source, []).append(i)
    for f, af in enumerate(arrows):
        s, n = node_of[f]
        for g in by_source.get(af.target, []):
            table[(g, f)] = index[(s, run(s, n, words[g]))]
    # identities come first per source object in declaration order of objects
    return FinCategory(objects, tuple(arrows), tuple(identities), table)


def presentation_from_names(
    objects: Sequence[str],
    generators: Sequence[tuple[str, str, str]],
    relations: Sequence[tuple[str, str]] = (),
) -> Presentation:
    """Relations are given as strings like ``"s.r"`` and ``"t"``."""
    rels = tuple((tuple(u.split(".")), tuple(w.split("."))) for u, w in relations)
    return Presentation(tuple(objects), tuple(generators), rels)
