"""Minor conditions, their diagrams and free functors, satisfaction in
polymorphism minions, interpretability, and the hardness probe."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import product
from typing import Mapping, Sequence

from ._search import Network
from .copresheaf import Copresheaf, NatTransformation, _check_base, find_hom, power
from .fincat import FinCategory, SizeCap, ValidationReport, opposite
from .findiag import FinDiagram, colimit, limit
from .kan import DEFAULT_CAP, MinionTable, functions, ran_eval


class MissingArity(KeyError):
    """A minion table lacks an arity the construction needs."""


@dataclass(frozen=True)
class MinorIdentity:
    """``left(x_pi(1), ..., x_pi(m)) = right(x_1, ..., x_n)``."""

    left: str
    right: str
    pi: tuple[int, ...]

    def __str__(self) -> str:
        return f"{self.left}{self.pi} ~ {self.right}"


@dataclass(frozen=True)
class MinorCondition:
    arities: tuple[tuple[str, int], ...]
    identities: tuple[MinorIdentity, ...]

    @property
    def symbols(self) -> tuple[str, ...]:
        return tuple(f for f, _ in self.arities)

    def arity(self, symbol: str) -> int:
        for f, n in self.arities:
            if f == symbol:
                return n
        raise KeyError(f"unknown symbol {symbol!r}")

    def validate(self) -> ValidationReport:
        report = ValidationReport()
        ar = dict(self.arities)
        if len(ar) != len(self.arities):
            report.violations.append("a symbol is declared twice")
        for f, n in self.arities:
            if n < 1:
                report.violations.append(f"symbol {f} has arity {n} < 1")
        for e in self.identities:
            if e.left not in ar or e.right not in ar:
                report.violations.append(f"identity {e} uses an undeclared symbol")
                continue
            if len(e.pi) != ar[e.left]:
                report.violations.append(f"identity {e} does not match the arity of {e.left}")
            if any(not 0 <= x < ar[e.right] for x in e.pi):
                report.violations.append(f"identity {e} leaves the arity of {e.right}")
        return report

    @classmethod
    def build(
        cls, arities: Mapping[str, int], identities: Sequence[tuple[str, str, Sequence[int]]]
    ) -> MinorCondition:
        cond = cls(
            tuple(arities.items()),
            tuple(MinorIdentity(f, g, tuple(pi)) for f, g, pi in identities),
        )
        report = cond.validate()
        if not report:
            raise ValueError(str(report))
        return cond


# -- surface syntax --------------------------------------------------------

_TERM = re.compile(r"^\s*([A-Za-z_][\w']*)\s*\(([^()]*)\)\s*$")


def _term(text: str) -> tuple[str, list[str]]:
    m = _TERM.match(text)
    if not m:
        raise ValueError(f"cannot parse term {text.strip()!r}")
    args = [a.strip() for a in m.group(2).split(",")] if m.group(2).strip() else []
    return m.group(1), args


def parse_identity(text: str) -> tuple[str, str, tuple[int, ...], int, int]:
    """Parse ``f(x,y,x) = g(x,y)`` into ``(f, g, pi, m, n)``."""
    if text.count("=") != 1:
        raise ValueError(f"identity needs exactly one '=': {text!r}")
    lhs, rhs = text.split("=")
    f, xs = _term(lhs)
    g, ys = _term(rhs)
    if len(set(ys)) != len(ys):
        raise ValueError(f"right-hand side of {text.strip()!r} repeats a variable")
    where = {y: k for k, y in enumerate(ys)}
    try:
        pi = tuple(where[x] for x in xs)
    except KeyError as err:
        raise ValueError(f"variable {err} of the left side is missing on the right") from None
    return f, g, pi, len(xs), len(ys)


def parse_condition(text: str) -> MinorCondition:
    """Lines ``symbol f/6`` and ``identity f(x,y) = g(x,y)``; ``#`` comments."""
    arities: dict[str, int] = {}
    identities = []

    def declare(sym: str, n: int) -> None:
        if arities.setdefault(sym, n) != n:
            raise ValueError(f"symbol {sym} used with arities {arities[sym]} and {n}")

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        kw, _, rest = line.partition(" ")
        try:
            if kw == "symbol":
                name, _, n = rest.strip().partition("/")
                declare(name.strip(), int(n))
            elif kw == "identity":
                f, g, pi, m, n = parse_identity(rest)
                declare(f, m)
                declare(g, n)
                identities.append(MinorIdentity(f, g, pi))
            else:
                raise ValueError(f"unknown keyword {kw!r}")
        except ValueError as err:
            raise ValueError(f"line {lineno}: {err}") from None
    cond = MinorCondition(tuple(arities.items()), tuple(identities))
    report = cond.validate()
    if not report:
        raise ValueError(str(report))
    return cond


_VARS = "xyzuvwabcdefghijklmnopqrst"


def _var(i: int, n: int) -> str:
    return _VARS[i] if n <= len(_VARS) else f"x{i + 1}"


def format_condition(cond: MinorCondition) -> str:
    lines = [f"symbol {f}/{n}" for f, n in cond.arities]
    for e in cond.identities:
        n = cond.arity(e.right)
        right = ",".join(_var(i, n) for i in range(n))
        left = ",".join(_var(i, n) for i in e.pi)
        lines.append(f"identity {e.left}({left}) = {e.right}({right})")
    return "\n".join(lines) + "\n"


# -- builtins --------------------------------------------------------------


def siggers() -> MinorCondition:
    return parse_condition(
        "symbol s/6\nsymbol t/3\n"
        "identity s(x,y,z,x,y,z) = t(x,y,z)\n"
        "identity s(y,z,x,z,x,y) = t(x,y,z)\n"
    )


def symmetric() -> MinorCondition:
    """A binary ``f`` with ``f(x,y) = f(y,x)``, through a common minor ``g``."""
    return parse_condition("identity f(x,y) = g(x,y)\nidentity f(y,x) = g(x,y)\n")


def trivial() -> MinorCondition:
    """``f(x) = f(x)``: satisfied by every minion, projections included."""
    return parse_condition("identity f(x) = f(x)\n")


def constant_pattern() -> MinorCondition:
    """``f(x) = g(x,y) = f(y)``: forces a constant, so implies every condition."""
    return parse_condition("identity f(x) = g(x,y)\nidentity f(y) = g(x,y)\n")


BUILTINS = {
    "siggers": siggers,
    "symmetric": symmetric,
    "trivial": trivial,
    "constant": constant_pattern,
}


# -- diagrams --------------------------------------------------------------


def condition_to_diagram(cond: MinorCondition) -> FinDiagram:
    """``D_Gamma``: a set ``[n]`` per symbol and the map ``pi`` per identity.

    Arrows are named ``e1, e2, ...`` in identity order.  A symbol on the
    left of one identity and the right of another (or of the same one) gets
    a copy ``f'`` that carries its outgoing arrows, linked to ``f`` by an
    identity-map arrow ``copy_f``, so that no two arrows compose.
    """
    lefts = {e.left for e in cond.identities}
    rights = {e.right for e in cond.identities}
    split = [f for f in cond.symbols if f in lefts and f in rights]
    copy = {f: f + "'" for f in split}
    names = set(cond.symbols)
    for f in split:
        while copy[f] in names:
            copy[f] += "'"
        names.add(copy[f])
    objects = list(cond.symbols) + [copy[f] for f in split]
    size = dict(cond.arities)
    size.update({copy[f]: size[f] for f in split})
    arrows = []
    maps = {}
    for k, e in enumerate(cond.identities, 1):
        src = copy.get(e.left, e.left)
        arrows.append((f"e{k}", src, e.right))
        maps[f"e{k}"] = dict(enumerate(e.pi))
    for f in split:
        arrows.append((f"copy_{f}", copy[f], f))
        maps[f"copy_{f}"] = {i: i for i in range(size[f])}
    shape = FinCategory.build(objects, arrows)
    return FinDiagram.build(shape, {o: range(size[o]) for o in objects}, maps)


def diagram_to_condition(D: FinDiagram) -> MinorCondition:
    """Read a composition-free diagram back as a minor condition."""
    C = D.shape
    for f in C.non_identity:
        for g in C.non_identity:
            if C.arrows[f].target == C.arrows[g].source:
                raise ValueError(
                    f"{C.arrows[g].name} . {C.arrows[f].name} composes; split the shape first"
                )
    arities = tuple((o, len(s)) for o, s in zip(C.objects, D.sets))
    identities = tuple(
        MinorIdentity(C.objects[C.arrows[f].source], C.objects[C.arrows[f].target], D.maps[f])
        for f in C.non_identity
    )
    return MinorCondition(arities, identities)


def as_diagram(cond: MinorCondition | FinDiagram) -> FinDiagram:
    return cond if isinstance(cond, FinDiagram) else condition_to_diagram(cond)


# -- the free functor gl D ---------------------------------------------------


@dataclass(frozen=True, eq=False)
class GlCondition:
    """``gl D`` as a functor ``Fin -> Fin`` for a diagram ``D`` of arity sets.

    ``gl D (N)`` is the sum over objects ``f`` of ``N^{D(f)}`` glued along
    ``(g, b) ~ (f, b . D(e))`` for ``e: f -> g``.
    """

    diagram: FinDiagram
    cap: int = DEFAULT_CAP
    _cache: dict = field(default_factory=dict, repr=False)

    def _classes(self, n: int):
        hit = self._cache.get(n)
        if hit is not None:
            return hit
        D = self.diagram
        J = D.shape
        total = sum(n ** len(s) for s in D.sets)
        if total > self.cap:
            raise SizeCap(f"gl D at a set of size {n} has {total} > {self.cap} terms")
        sets = tuple(tuple(functions(len(s), n)) for s in D.sets)
        maps = []
        for u, a in enumerate(J.arrows):
            du = D.maps[u]
            row = []
            for b in sets[a.target]:
                idx = 0
                for x in du:
                    idx = idx * n + b[x]
                row.append(idx)
            maps.append(tuple(row))
        Q = colimit(FinDiagram(opposite(J), sets, tuple(maps)))
        hit = (sets, Q)
        self._cache[n] = hit
        return hit

    def elements(self, N: Sequence) -> list[tuple[str, tuple]]:
        """Representatives ``(f, b)`` with ``b`` a tuple over ``N``."""
        sets, Q = self._classes(len(N))
        objs = self.diagram.shape.objects
        return [(objs[j], tuple(N[p] for p in sets[j][k])) for j, k in Q.carrier]

    def size(self, n: int) -> int:
        return len(self._classes(n)[1])

    def class_of(self, n: int, j: int, b: Sequence[int]) -> int:
        """Class of the term ``(j, b)`` with ``b`` a tuple of positions in ``[n]``."""
        _, Q = self._classes(n)
        idx = 0
        for x in b:
            idx = idx * n + x
        return Q.injections[j][idx]

    def act(self, n: int, m: int, phi: Sequence[int]) -> tuple[int, ...]:
        """``gl D (phi)`` for ``phi: [n] -> [m]``, on class positions."""
        sets, Q = self._classes(n)
        return tuple(
            self.class_of(m, j, tuple(phi[x] for x in sets[j][k])) for j, k in Q.carrier
        )


def indicator(A: FinDiagram, cond: MinorCondition | FinDiagram, cap: int = DEFAULT_CAP) -> Copresheaf:
    """``I_Gamma(A) = gl D_Gamma . A``.

    Elements at ``s`` are representatives ``(f, b)``: a symbol and a tuple
    of elements of ``A(s)``.
    """
    M = GlCondition(as_diagram(cond), cap)
    sets = tuple(tuple(M.elements(xs)) for xs in A.sets)
    maps = []
    for u, a in enumerate(A.shape.arrows):
        maps.append(M.act(len(A.sets[a.source]), len(A.sets[a.target]), A.maps[u]))
    return Copresheaf(A.shape, sets, tuple(maps))


# -- satisfaction ----------------------------------------------------------


@dataclass(frozen=True)
class Satisfaction:
    holds: bool
    witness: Mapping[str, NatTransformation] | None = None

    def __bool__(self) -> bool:
        return self.holds


def satisfies(
    A: FinDiagram, B: FinDiagram, cond: MinorCondition | FinDiagram, cap: int = DEFAULT_CAP
) -> Satisfaction:
    """Whether ``Pol(A, B)`` satisfies the condition, via ``hom(I_Gamma(A), B)``.

    The witness sends every symbol ``f`` of arity ``n`` to the polymorphism
    ``a |-> h([f, a])`` on ``A^n``.
    """
    _check_base(A, B)
    D = as_diagram(cond)
    I = indicator(A, D, cap)
    h = find_hom(I, B)
    if h is None:
        return Satisfaction(False)
    M = GlCondition(D, cap)
    witness = {}
    for j, f in enumerate(D.shape.objects):
        n = len(D.sets[j])
        P = power(A, range(n))
        comps = []
        for s, xs in enumerate(A.sets):
            q = len(xs)
            comps.append(
                tuple(h.components[s][M.class_of(q, j, a)] for a in product(range(q), repeat=n))
            )
        witness[f] = NatTransformation(P, Copresheaf.of(B), tuple(comps))
    return Satisfaction(True, witness)


def polymorphism_diagram(table: MinionTable, D: FinDiagram) -> FinDiagram:
    """``Pol . D_Gamma`` from a materialized table holding every needed arity."""
    idx = []
    for s in D.sets:
        i = next((i for i, N in enumerate(table.arities) if len(N) == len(s)), None)
        if i is None:
            raise MissingArity(f"table has no arity of size {len(s)}")
        idx.append(i)
    sets = tuple(tuple(range(table.size(i))) for i in idx)
    maps = []
    for u, a in enumerate(D.shape.arrows):
        maps.append(table.actions[(idx[a.source], idx[a.target], tuple(D.maps[u]))])
    return FinDiagram(D.shape, sets, tuple(maps))


def satisfies_direct(
    A: FinDiagram, B: FinDiagram, cond: MinorCondition | FinDiagram, cap: int = DEFAULT_CAP
) -> bool:
    """Materialize ``Pol(A, B)`` at the needed arities and solve ``Pol . D``."""
    D = as_diagram(cond)
    sizes = sorted({len(s) for s in D.sets})
    table = ran_eval(A, B, [tuple(range(n)) for n in sizes], cap)
    return limit(polymorphism_diagram(table, D))


def interpretable(pi: MinorCondition | FinDiagram, gamma: MinorCondition | FinDiagram, cap: int = DEFAULT_CAP) -> bool:
    """Whether every minion satisfying ``gamma`` satisfies ``pi``.

    Decided as a solution of ``gl D_gamma . D_pi``.
    """
    Dp = as_diagram(pi)
    M = GlCondition(as_diagram(gamma), cap)
    sets = tuple(tuple(range(M.size(len(s)))) for s in Dp.sets)
    maps = []
    for u, a in enumerate(Dp.shape.arrows):
        maps.append(M.act(len(Dp.sets[a.source]), len(Dp.sets[a.target]), Dp.maps[u]))
    return limit(FinDiagram(Dp.shape, sets, tuple(maps)))


# -- free structures -------------------------------------------------------


def free_structure(
    A: FinDiagram, M: MinionTable | MinorCondition | FinDiagram, cap: int = DEFAULT_CAP
) -> Copresheaf:
    """``M . A``: the minion applied componentwise to ``A``."""
    if not isinstance(M, MinionTable):
        return indicator(A, M, cap)
    idx = []
    for o, s in zip(A.shape.objects, A.sets):
        i = next((i for i, N in enumerate(M.arities) if len(N) == len(s)), None)
        if i is None:
            raise MissingArity(f"table has no arity of size {len(s)} needed at {o}")
        idx.append(i)
    sets = tuple(M.elements[i] for i in idx)
    maps = []
    for u, a in enumerate(A.shape.arrows):
        maps.append(M.actions[(idx[a.source], idx[a.target], tuple(A.maps[u]))])
    return Copresheaf(A.shape, sets, tuple(maps))


# -- hardness probe --------------------------------------------------------


@dataclass(frozen=True, eq=False)
class HardnessProbeResult:
    """``refuted_at`` is the least arity bound with no natural choice
    function, or ``None`` for a bounded witness.

    ``witness[i][k]`` is the position in arity ``i`` chosen for element
    ``k`` of the table.
    """

    refuted_at: int | None
    table: MinionTable
    witness: tuple[tuple[int, ...], ...] | None

    @property
    def verdict(self) -> str:
        if self.refuted_at is None:
            return "bounded-witness"
        return f"refuted-at-arity {self.refuted_at}"


def choice_network(table: MinionTable) -> tuple[Network, list[int]]:
    offsets = []
    sizes: list[int] = []
    for i, N in enumerate(table.arities):
        offsets.append(len(sizes))
        sizes.extend([len(N)] * table.size(i))
    net = Network(sizes)
    n = len(table.arities)
    for i in range(n):
        for j in range(n):
            for pi in table.maps(i, j):
                act = table.actions[(i, j, pi)]
                for k, l in enumerate(act):
                    net.add(offsets[i] + k, offsets[j] + l, pi)
    return net, offsets


def check_choice(table: MinionTable, witness: Sequence[Sequence[int]]) -> ValidationReport:
    """Every equation ``xi_M(pi . e) = pi(xi_N(e))`` of the table."""
    report = ValidationReport()
    n = len(table.arities)
    for i in range(n):
        if len(witness[i]) != table.size(i):
            report.violations.append(f"witness at arity {i} has the wrong length")
            return report
    for i in range(n):
        for j in range(n):
            for pi in table.maps(i, j):
                act = table.actions[(i, j, pi)]
                for k, l in enumerate(act):
                    if witness[j][l] != pi[witness[i][k]]:
                        report.violations.append(
                            f"naturality fails for map {pi} at element {k} of arity {i}"
                        )
    return report


def probe_hardness(
    A: FinDiagram, B: FinDiagram, max_arity: int, cap: int = DEFAULT_CAP
) -> HardnessProbeResult:
    """Search natural choice functions ``Pol(A, B)(N) -> N`` for ``N = [1..k]``.

    ``k`` runs up to ``max_arity``; the first ``k`` without a solution is
    reported.  A refutation is sound: any natural transformation to the
    identity would restrict to one.  A bounded witness proves nothing
    beyond the window.
    """
    if max_arity < 1:
        raise ValueError("max_arity must be positive")
    arities = [tuple(range(k)) for k in range(1, max_arity + 1)]
    table = ran_eval(A, B, arities, cap)
    for k in range(1, max_arity + 1):
        sub = _restrict_table(table, k)
        net, offsets = choice_network(sub)
        sol = next(net.solutions(), None)
        if sol is None:
            return HardnessProbeResult(k, sub, None)
        if k == max_arity:
            bounds = offsets + [len(sol)]
            witness = tuple(tuple(sol[bounds[i] : bounds[i + 1]]) for i in range(k))
            return HardnessProbeResult(None, sub, witness)
    raise AssertionError("unreachable")


def _restrict_table(table: MinionTable, k: int) -> MinionTable:
    keep = range(k)
    return MinionTable(
        table.arities[:k],
        table.elements[:k],
        {key: v for key, v in table.actions.items() if key[0] in keep and key[1] in keep},
    )
