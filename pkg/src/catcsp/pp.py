"""Primitive positive formulas: parsing, evaluation, the Chandra-Merlin
correspondence, sentences as satisfiability instances, and pp-interpretations
as gadget functors."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Hashable, Iterator, Mapping, Sequence, Union

from .copresheaf import Copresheaf, NatTransformation
from .fincat import CatFunctor, FinCategory, signature_category
from .findiag import FinDiagram
from .kan import GadgetFunctor
from .structures import (
    RelationalStructure,
    Signature,
    check_signature,
    signature_shape,
    to_copresheaf,
    to_structure,
)

Element = Hashable


class UnknownMorphism(KeyError):
    """A functional atom names a morphism the base category lacks."""


class ShapeError(ValueError):
    """A formula is not in the shape a construction requires."""


@dataclass(frozen=True)
class RelAtom:
    rel: str
    args: tuple[str, ...]

    def __str__(self) -> str:
        return f"{self.rel}({','.join(self.args)})"


@dataclass(frozen=True)
class EqAtom:
    left: str
    right: str

    def __str__(self) -> str:
        return f"{self.left} = {self.right}"


@dataclass(frozen=True)
class FunAtom:
    """``f(g(x)) = y`` is ``FunAtom(("f", "g"), "x", "y")``."""

    path: tuple[str, ...]
    arg: str
    value: str

    def __str__(self) -> str:
        term = self.arg
        for f in reversed(self.path):
            term = f"{f}({term})"
        return f"{term} = {self.value}"


Atom = Union[RelAtom, EqAtom, FunAtom]


@dataclass(frozen=True)
class PPFormula:
    """``exists bound . atom & ...`` with free variables in ``free`` order.

    ``sorts`` optionally types variables by objects of a base category.
    """

    free: tuple[str, ...]
    bound: tuple[str, ...]
    atoms: tuple[Atom, ...]
    sorts: Mapping[str, str] = field(default_factory=dict)

    @property
    def variables(self) -> tuple[str, ...]:
        return self.free + self.bound

    def validate(self) -> None:
        declared = set(self.variables)
        if len(declared) != len(self.variables):
            raise ValueError("a variable is declared twice")
        for a in self.atoms:
            for v in atom_variables(a):
                if v not in declared:
                    raise ValueError(f"variable {v} of {a} is not declared")

    @property
    def quantifier_free(self) -> bool:
        return not self.bound

    def __str__(self) -> str:
        def var(v: str) -> str:
            return f"{v}:{self.sorts[v]}" if v in self.sorts else v

        body = " & ".join(map(str, self.atoms)) or "true"
        if self.bound:
            return f"exists {' '.join(var(v) for v in self.bound)} . {body}"
        return body


def atom_variables(a: Atom) -> tuple[str, ...]:
    if isinstance(a, RelAtom):
        return a.args
    if isinstance(a, EqAtom):
        return (a.left, a.right)
    return (a.arg, a.value)


# -- parser ----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(exists|∃)\b|([A-Za-z_][\w']*)|(:)|(\.)|(&|∧)|(\()|(\))|(,)|(=))")


def _tokens(text: str) -> list[tuple[str, str]]:
    kinds = ["exists", "name", ":", ".", "&", "(", ")", ",", "="]
    out = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"unexpected character at {text[pos:pos + 10]!r}")
        k = next(i for i, g in enumerate(m.groups()) if g is not None)
        out.append((kinds[k], m.group(k + 1)))
        pos = m.end()
    return out


def parse_pp(text: str, free: Sequence[str] | None = None) -> PPFormula:
    """Parse ``exists u v . E(x,u) & E(u,v) & x = y``.

    Bound variables may carry sorts as ``e:E``.  A term ``f(g(x)) = y``
    is a functional atom.  Without ``free`` the free variables are the
    unbound ones in order of first appearance.  ``true`` or an empty body is
    the empty conjunction.
    """
    toks = _tokens(text)
    i = 0
    bound: list[str] = []
    sorts: dict[str, str] = {}

    def peek(k: int = 0) -> tuple[str, str] | None:
        return toks[i + k] if i + k < len(toks) else None

    def take(kind: str) -> str:
        nonlocal i
        t = peek()
        if t is None or t[0] != kind:
            raise ValueError(f"expected {kind!r} at token {i}, got {t!r}")
        i += 1
        return t[1]

    if peek() and peek()[0] == "exists":
        take("exists")
        while peek() and peek()[0] == "name":
            v = take("name")
            bound.append(v)
            if peek() and peek()[0] == ":":
                take(":")
                sorts[v] = take("name")
            if peek() and peek()[0] == ",":
                take(",")
        take(".")
    atoms: list[Atom] = []

    def term() -> tuple[list[str], str]:
        # name | name(term); returns the function path and the variable
        name = take("name")
        if peek() and peek()[0] == "(":
            take("(")
            path, var = term()
            take(")")
            return [name, *path], var
        return [], name

    if toks[i:] == [("name", "true")]:
        i += 1
    while peek() is not None:
        name = take("name")
        if peek() and peek()[0] == "(":
            take("(")
            args = [term()]
            while peek() and peek()[0] == ",":
                take(",")
                args.append(term())
            take(")")
            if peek() and peek()[0] == "=":
                take("=")
                if len(args) != 1:
                    raise ValueError(f"functional atom {name} takes one argument")
                path, var = args[0]
                atoms.append(FunAtom((name, *path), var, take("name")))
            else:
                if any(path for path, _ in args):
                    raise ValueError(f"relational atom {name} has a non-variable argument")
                atoms.append(RelAtom(name, tuple(v for _, v in args)))
        else:
            take("=")
            atoms.append(EqAtom(name, take("name")))
        if peek() is not None:
            take("&")
    seen: list[str] = []
    for a in atoms:
        for v in atom_variables(a):
            if v not in seen:
                seen.append(v)
    if free is None:
        free = [v for v in seen if v not in bound]
    phi = PPFormula(tuple(free), tuple(bound), tuple(atoms), sorts)
    phi.validate()
    return phi


# -- evaluation ------------------------------------------------------------


def assignments(phi: PPFormula, A: RelationalStructure) -> Iterator[tuple[Element, ...]]:
    """Satisfying assignments of all variables, free then bound, by backtracking."""
    order = phi.variables
    pos = {v: k for k, v in enumerate(order)}
    rels = {r: set(ts) for (r, _), ts in zip(A.signature, A.relations)}
    due: list[list[Atom]] = [[] for _ in order]
    for a in phi.atoms:
        if isinstance(a, FunAtom):
            raise ShapeError(f"functional atom {a} cannot be evaluated in a relational structure")
        if isinstance(a, RelAtom) and a.rel not in rels:
            raise KeyError(f"structure has no relation {a.rel!r}")
        due[max(pos[v] for v in atom_variables(a))].append(a)
    value: list[Element] = [None] * len(order)

    def ok(k: int) -> bool:
        for a in due[k]:
            if isinstance(a, RelAtom):
                if tuple(value[pos[v]] for v in a.args) not in rels[a.rel]:
                    return False
            elif value[pos[a.left]] != value[pos[a.right]]:
                return False
        return True

    def extend(k: int) -> Iterator[tuple[Element, ...]]:
        if k == len(order):
            yield tuple(value)
            return
        for x in A.domain:
            value[k] = x
            if ok(k):
                yield from extend(k + 1)

    yield from extend(0)


def satisfying_tuples(phi: PPFormula, A: RelationalStructure) -> list[tuple[Element, ...]]:
    """The relation ``phi^A`` on the free variables, in order of discovery."""
    n = len(phi.free)
    return list(dict.fromkeys(t[:n] for t in assignments(phi, A)))


# -- Chandra-Merlin --------------------------------------------------------


def _classes(phi: PPFormula) -> dict[str, str]:
    parent = {v: v for v in phi.variables}
    rank = {v: k for k, v in enumerate(phi.variables)}

    def find(v: str) -> str:
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for a in phi.atoms:
        if isinstance(a, EqAtom):
            x, y = find(a.left), find(a.right)
            if x != y:
                if rank[y] < rank[x]:
                    x, y = y, x
                parent[y] = x
    return {v: find(v) for v in phi.variables}


def infer_signature(phi: PPFormula) -> Signature:
    ar: dict[str, int] = {}
    for a in phi.atoms:
        if isinstance(a, RelAtom) and ar.setdefault(a.rel, len(a.args)) != len(a.args):
            raise ValueError(f"relation {a.rel} used with two arities")
    return check_signature(ar.items())


def canonical_map(phi: PPFormula) -> dict[str, str]:
    """Variable to element of the canonical structure."""
    return _classes(phi)


def canonical_structure(phi: PPFormula, signature: Sequence[tuple[str, int]] | None = None):
    """The structure whose homomorphisms into ``A`` are the satisfying
    assignments of ``phi`` in ``A``.

    Elements are variable names; variables equated by ``=`` atoms share the
    earliest one.  Every variable, bound or free, is an element.
    """
    cls = _classes(phi)
    sig = check_signature(signature) if signature is not None else infer_signature(phi)
    rels: dict[str, list] = {r: [] for r, _ in sig}
    for a in phi.atoms:
        if isinstance(a, FunAtom):
            raise ShapeError(f"functional atom {a} has no relational reading")
        if isinstance(a, RelAtom):
            if a.rel not in rels:
                raise ShapeError(f"relation {a.rel} is not in the signature")
            rels[a.rel].append(tuple(cls[v] for v in a.args))
    domain = [v for v in phi.variables if cls[v] == v]
    return RelationalStructure.build(sig, domain, rels)


def canonical_formula(C: RelationalStructure) -> PPFormula:
    """One free variable ``x<k>`` per element, one atom per tuple."""
    name = {x: f"x{k}" for k, x in enumerate(C.domain)}
    atoms = [
        RelAtom(r, tuple(name[x] for x in t))
        for (r, _), ts in zip(C.signature, C.relations)
        for t in ts
    ]
    return PPFormula(tuple(name.values()), (), tuple(atoms))


# -- sentences as instances ------------------------------------------------


def _compose_path(S: FinCategory, path: Sequence[str]) -> int:
    try:
        ms = [S.mor(f) for f in path]
    except KeyError as err:
        raise UnknownMorphism(str(err)) from None
    f = ms[-1]
    for g in reversed(ms[:-1]):
        if S.arrows[g].source != S.arrows[f].target:
            raise ValueError(f"{'.'.join(path)} does not compose in the base")
        f = S.compose(g, f)
    return f


def pp_sentence_to_instance(phi: PPFormula, S: FinCategory) -> CatFunctor:
    """A functor ``J -> S`` solvable in ``A`` exactly when ``A`` satisfies ``phi``.

    Atoms are functional, ``f(x) = y``, or equalities.  Each variable ``x``
    gets a copy ``x'`` and an arrow ``x' -> x`` sent to the identity; atoms
    leave from copies and land on originals, so nothing composes.
    """
    if phi.free:
        raise ShapeError("a sentence has no free variables")
    sorts: dict[str, int] = {}

    def sort(v: str, o: int) -> None:
        if sorts.setdefault(v, o) != o:
            raise ValueError(f"variable {v} gets two sorts")

    for v, o in phi.sorts.items():
        try:
            sort(v, S.obj(o))
        except KeyError as err:
            raise UnknownMorphism(str(err)) from None
    atoms = []
    for a in phi.atoms:
        if isinstance(a, RelAtom):
            raise ShapeError(f"relational atom {a} in a multi-sorted sentence")
        if isinstance(a, FunAtom):
            f = _compose_path(S, a.path)
            sort(a.arg, S.arrows[f].source)
            sort(a.value, S.arrows[f].target)
            atoms.append((a.arg, a.value, f))
        else:
            atoms.append((a.left, a.right, None))
    for x, y, f in atoms:
        if f is None:
            if x in sorts:
                sort(y, sorts[x])
            elif y in sorts:
                sort(x, sorts[y])
    # equalities may chain before a sort is known
    changed = True
    while changed:
        changed = False
        for x, y, f in atoms:
            if f is None and (x in sorts) != (y in sorts):
                sort(y, sorts[x]) if x in sorts else sort(x, sorts[y])
                changed = True
    missing = [v for v in phi.variables if v not in sorts]
    if missing:
        raise ValueError(f"cannot infer the sort of {', '.join(missing)}")
    objects = []
    for v in phi.variables:
        objects += [v, v + "'"]
    arrows = [(f"copy_{v}", v + "'", v) for v in phi.variables]
    images = {f"copy_{v}": S.arrows[S.identity(sorts[v])].name for v in phi.variables}
    for k, (x, y, f) in enumerate(atoms, 1):
        arrows.append((f"a{k}", x + "'", y))
        images[f"a{k}"] = S.arrows[f if f is not None else S.identity(sorts[x])].name
    J = FinCategory.build(objects, arrows)
    omap = {}
    for v in phi.variables:
        omap[v] = omap[v + "'"] = S.objects[sorts[v]]
    return CatFunctor.build(J, S, omap, images)


def instance_to_sentence(D: CatFunctor) -> PPFormula:
    """The sentence of an instance: a sorted variable ``v<k>`` per object of
    the shape and an atom ``f(v_i) = v_j`` per non-identity arrow."""
    J, S = D.source, D.target
    names = [f"v{k}" for k in range(len(J.objects))]
    sorts = {n: S.objects[D.object_map[k]] for k, n in enumerate(names)}
    atoms = tuple(
        FunAtom((S.arrows[D.morphism_map[u]].name,), names[J.arrows[u].source], names[J.arrows[u].target])
        for u in J.non_identity
    )
    return PPFormula((), tuple(names), atoms, sorts)


# -- interpretations -------------------------------------------------------


@dataclass(frozen=True)
class PPInterpretation:
    """Formulas defining ``Pi``-structures inside ``Sigma``-structures.

    ``domain`` has ``dimension`` free variables; ``relations[R]`` has
    ``dimension * arity(R)`` free variables, read in blocks.
    """

    dimension: int
    source: Signature
    target: Signature
    domain: PPFormula
    relations: tuple[tuple[str, PPFormula], ...]

    def formula(self, r: str) -> PPFormula:
        return dict(self.relations)[r]

    def validate(self) -> None:
        n = self.dimension
        if len(self.domain.free) != n:
            raise ShapeError(f"domain formula needs {n} free variables")
        target = dict(self.target)
        if set(target) != {r for r, _ in self.relations}:
            raise ShapeError("relation formulas do not match the target signature")
        source = dict(self.source)
        for r, phi in [("domain", self.domain), *self.relations]:
            if r != "domain" and len(phi.free) != n * target[r]:
                raise ShapeError(f"formula for {r} needs {n * target[r]} free variables")
            for a in phi.atoms:
                if isinstance(a, FunAtom):
                    raise ShapeError(f"functional atom {a} in an interpretation")
                if isinstance(a, RelAtom) and source.get(a.rel) != len(a.args):
                    raise ShapeError(f"atom {a} does not fit the source signature")

    @classmethod
    def build(
        cls,
        dimension: int,
        source: Sequence[tuple[str, int]],
        target: Sequence[tuple[str, int]],
        domain: PPFormula | str,
        relations: Mapping[str, PPFormula | str],
    ) -> PPInterpretation:
        """Formulas may be given as text; free variables are then taken in
        order of first appearance."""
        def parse(x):
            return parse_pp(x) if isinstance(x, str) else x

        out = cls(
            dimension,
            check_signature(source),
            check_signature(target),
            parse(domain),
            tuple((r, parse(f)) for r, f in relations.items()),
        )
        out.validate()
        return out


def _point(t: tuple, n: int) -> Element:
    return t[0] if n == 1 else t


def interpret(phi: PPInterpretation, A: RelationalStructure) -> RelationalStructure:
    """``I_phi(A)``; for dimension 1 elements are those of ``A``, else tuples."""
    n = phi.dimension
    dom = [_point(t, n) for t in satisfying_tuples(phi.domain, A)]
    known = set(dom)
    rels = {}
    for r, k in phi.target:
        ts = []
        for t in satisfying_tuples(phi.formula(r), A):
            blocks = tuple(_point(t[i * n : (i + 1) * n], n) for i in range(k))
            if not known.issuperset(blocks):
                raise ValueError(f"containment fails: {r}{blocks} leaves the domain formula")
            ts.append(blocks)
        rels[r] = ts
    return RelationalStructure.build(phi.target, dom, rels)


def interpret_copresheaf(phi: PPInterpretation, A: RelationalStructure) -> Copresheaf:
    """``I^tri_phi(A)``: relation elements are full assignments of the
    quantifier-free parts, so parallel witnesses stay apart."""
    n = phi.dimension
    if phi.domain.bound:
        raise ShapeError("the domain formula must be quantifier free")
    base = signature_category(phi.target)
    dom = [_point(t, n) for t in satisfying_tuples(phi.domain, A)]
    known = set(dom)
    sets = {"V": dom}
    maps = {}
    for r, k in phi.target:
        f = phi.formula(r)
        elems = list(assignments(f, A))
        for t in elems:
            for i in range(k):
                if _point(t[i * n : (i + 1) * n], n) not in known:
                    raise ValueError(f"containment fails for {r} at {t}")
        sets[r] = elems
        for i in range(k):
            maps[f"{r}_{i + 1}"] = {t: _point(t[i * n : (i + 1) * n], n) for t in elems}
    return Copresheaf.of(FinDiagram.build(base, sets, maps))


def ppinterp_to_gadget(phi: PPInterpretation) -> GadgetFunctor:
    """``G(V)`` and ``G(R)`` are canonical structures of the domain formula and
    of the quantifier-free part of each relation formula; ``G(R_i)`` sends
    the domain variables to the ``i``-th block of free variables."""
    phi.validate()
    if phi.domain.bound:
        raise ShapeError("the domain formula must be quantifier free")
    n = phi.dimension
    S = signature_category(phi.target)
    T = signature_category(phi.source)
    dom_cls = _classes(phi.domain)
    GV = canonical_structure(phi.domain, phi.source)
    images = {"V": to_copresheaf(GV, T)}
    transforms = {}
    for r, k in phi.target:
        f = phi.formula(r)
        cls = _classes(f)
        GR = canonical_structure(f, phi.source)
        images[r] = to_copresheaf(GR, T)
        rel_sets = {rel: set(ts) for (rel, _), ts in zip(GR.signature, GR.relations)}
        for i in range(k):
            vmap: dict[str, str] = {}
            for d, x in enumerate(phi.domain.free):
                y = cls[f.free[i * n + d]]
                if vmap.setdefault(dom_cls[x], y) != y:
                    raise ShapeError(
                        f"block {i + 1} of {r} does not respect the equalities of the domain formula"
                    )
            comps: dict[str, dict] = {"V": vmap}
            for (rel, _), ts in zip(GV.signature, GV.relations):
                comp = {}
                for t in ts:
                    u = tuple(vmap[x] for x in t)
                    if u not in rel_sets[rel]:
                        raise ShapeError(
                            f"block {i + 1} of {r} does not entail {rel}{t} of the domain formula"
                        )
                    comp[t] = u
                comps[rel] = comp
            transforms[f"{r}_{i + 1}"] = comps
    return GadgetFunctor.build(S, T, images, transforms)


def gadget_to_ppinterp(G: GadgetFunctor) -> PPInterpretation:
    """Read a gadget between signature categories back as an interpretation.

    Domain variables ``x1..xn`` are the vertices of ``G(V)``; the formula for
    ``R`` quantifies ``y1..ym`` over the vertices of ``G(R)`` and equates
    block ``i`` with the image of ``G(R_i)``.
    """
    try:
        vS, target, proj_S = signature_shape(G.source)
        vT, source, _ = signature_shape(G.target)
    except ValueError as err:
        raise ShapeError(str(err)) from None
    GV = G.image(vS)
    GVs = to_structure(GV)
    xs = [f"x{k + 1}" for k in range(len(GVs.domain))]
    xname = dict(zip(GVs.domain, xs))
    dom_atoms = tuple(
        RelAtom(r, tuple(xname[a] for a in t))
        for (r, _), ts in zip(GVs.signature, GVs.relations)
        for t in ts
    )
    domain = PPFormula(tuple(xs), (), dom_atoms)
    n = len(xs)
    tobj = G.target.obj(vT)
    rels = []
    for r, k in target:
        GR = G.image(r)
        GRs = to_structure(GR)
        ys = [f"y{k_ + 1}" for k_ in range(len(GRs.domain))]
        yname = dict(zip(GRs.domain, ys))
        free = [f"x{i * n + d + 1}" for i in range(k) for d in range(n)]
        atoms: list[Atom] = [
            RelAtom(rel, tuple(yname[b] for b in t))
            for (rel, _), ts in zip(GRs.signature, GRs.relations)
            for t in ts
        ]
        for i, p in enumerate(proj_S[r]):
            h = G.transforms[p]
            for d, a in enumerate(GV.sets[tobj]):
                b = h.apply(tobj, a)
                atoms.append(EqAtom(free[i * n + d], yname[b]))
        rels.append((r, PPFormula(tuple(free), tuple(ys), tuple(atoms))))
    return PPInterpretation(n, source, target, domain, tuple(rels))
