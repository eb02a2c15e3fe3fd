"""Relational structures and their copresheaf translations."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from math import prod
from typing import Hashable, Iterable, Mapping, Sequence

from .copresheaf import Copresheaf
from .fincat import FinCategory, SizeCap, signature_category
from .findiag import FinDiagram
from .kan import DEFAULT_CAP

Element = Hashable
Signature = tuple[tuple[str, int], ...]


class BaseShape(ValueError):
    """The base category is not the category of a relational signature."""


def check_signature(signature: Iterable[tuple[str, int]]) -> Signature:
    sig = tuple((str(r), int(k)) for r, k in signature)
    names = [r for r, _ in sig]
    if len(set(names)) != len(names):
        raise ValueError("relation names must be unique")
    for r, k in sig:
        if k < 1:
            raise ValueError(f"relation {r} has arity {k} < 1")
    return sig


@dataclass(frozen=True)
class RelationalStructure:
    signature: Signature
    domain: tuple[Element, ...]
    relations: tuple[tuple[tuple[Element, ...], ...], ...]

    @classmethod
    def build(
        cls,
        signature: Iterable[tuple[str, int]],
        domain: Iterable[Element],
        relations: Mapping[str, Iterable[Sequence[Element]]],
    ) -> RelationalStructure:
        sig = check_signature(signature)
        dom = tuple(dict.fromkeys(domain))
        known = set(dom)
        rels = []
        for r, k in sig:
            tuples = tuple(dict.fromkeys(tuple(t) for t in relations.get(r, ())))
            for t in tuples:
                if len(t) != k:
                    raise ValueError(f"tuple {t} in {r} does not have width {k}")
                if not known.issuperset(t):
                    raise ValueError(f"tuple {t} in {r} leaves the domain")
            rels.append(tuples)
        extra = set(relations) - {r for r, _ in sig}
        if extra:
            raise ValueError(f"relations {sorted(extra)} are not in the signature")
        return cls(sig, dom, tuple(rels))

    def relation(self, name: str) -> tuple[tuple[Element, ...], ...]:
        for (r, _), ts in zip(self.signature, self.relations):
            if r == name:
                return ts
        raise KeyError(f"unknown relation {name!r}")

    def is_homomorphism(self, other: RelationalStructure, h: Mapping) -> bool:
        for (r, _), ts in zip(self.signature, self.relations):
            target = set(other.relation(r))
            if any(tuple(h[x] for x in t) not in target for t in ts):
                return False
        return True


def graph_structure(vertices: Iterable[Element], edges: Iterable[tuple], symmetric: bool = True):
    """A structure with one binary relation ``E``."""
    es = []
    for u, v in edges:
        es.append((u, v))
        if symmetric:
            es.append((v, u))
    return RelationalStructure.build([("E", 2)], vertices, {"E": es})


def clique(n: int) -> RelationalStructure:
    return graph_structure(range(n), [(u, v) for u in range(n) for v in range(u + 1, n)])


def cycle_structure(n: int) -> RelationalStructure:
    return graph_structure(range(n), [(i, (i + 1) % n) for i in range(n)])


# -- translations ----------------------------------------------------------


def signature_shape(C: FinCategory) -> tuple[str, Signature, dict[str, tuple[int, ...]]]:
    """Recognize a signature category.

    Returns the domain object, the signature read off the other objects,
    and per relation the projection arrows in declaration order.
    """
    sinks = [o for o in range(len(C.objects)) if not any(
        C.arrows[f].source == o for f in C.non_identity
    )]
    if len(sinks) != 1:
        raise BaseShape("expected exactly one object without outgoing arrows")
    v = sinks[0]
    sig = []
    projections: dict[str, tuple[int, ...]] = {}
    for o, name in enumerate(C.objects):
        if o == v:
            continue
        out = [f for f in C.non_identity if C.arrows[f].source == o]
        if not out or any(C.arrows[f].target != v for f in out):
            raise BaseShape(f"object {name} does not project only to {C.objects[v]}")
        sig.append((name, len(out)))
        projections[name] = tuple(out)
    for f in C.non_identity:
        if C.arrows[f].target != v:
            raise BaseShape(f"arrow {C.arrows[f].name} does not end at {C.objects[v]}")
    return C.objects[v], tuple(sig), projections


def to_copresheaf(A: RelationalStructure, base: FinCategory | None = None) -> Copresheaf:
    """``A`` as a copresheaf: relation elements are the tuples themselves."""
    base = base or signature_category(A.signature)
    vname, sig, projections = signature_shape(base)
    if dict(sig) != dict(A.signature):
        raise BaseShape("base category does not match the structure's signature")
    sets = {vname: A.domain}
    maps = {}
    for r, ts in zip((r for r, _ in A.signature), A.relations):
        sets[r] = ts
        for i, f in enumerate(projections[r]):
            maps[base.arrows[f].name] = {t: t[i] for t in ts}
    return Copresheaf.of(FinDiagram.build(base, sets, maps))


def to_structure(X: FinDiagram) -> RelationalStructure:
    """Collapse a copresheaf over a signature category to tuple sets."""
    vname, sig, projections = signature_shape(X.shape)
    rels = {}
    for r, _ in sig:
        o = X.shape.obj(r)
        rels[r] = [
            tuple(X.sets[X.shape.obj(vname)][X.maps[f][k]] for f in projections[r])
            for k in range(len(X.sets[o]))
        ]
    return RelationalStructure.build(sig, X.set_of(vname), rels)


def single_sorted(A: FinDiagram, cap: int = DEFAULT_CAP) -> RelationalStructure:
    """One relation ``E_f`` per morphism on the product of all components."""
    size = prod(len(s) for s in A.sets)
    if size > cap:
        raise SizeCap(f"product domain has {size} elements, over the cap {cap}")
    C = A.shape
    domain = list(product(*A.sets))
    positions = list(product(*(range(len(s)) for s in A.sets)))
    by_coord: list[dict[int, list[int]]] = []
    for t in range(len(C.objects)):
        groups: dict[int, list[int]] = {}
        for k, p in enumerate(positions):
            groups.setdefault(p[t], []).append(k)
        by_coord.append(groups)
    sig = []
    rels = {}
    for f, a in enumerate(C.arrows):
        name = f"E_{a.name}"
        sig.append((name, 2))
        m = A.maps[f]
        ts = []
        for i, p in enumerate(positions):
            for j in by_coord[a.target].get(m[p[a.source]], ()):
                ts.append((domain[i], domain[j]))
                if len(ts) > cap:
                    raise SizeCap(f"relation {name} exceeds the cap {cap}")
        rels[name] = ts
    return RelationalStructure.build(sig, domain, rels)
