"""Line-oriented text formats.

Categories::

    object V
    object E
    arrow s : E -> V
    compose g . f = h        # full table (every composable non-identity pair)
    relation s.r = t         # or a presentation; words compose right to left

Copresheaves::

    base digraph             # digraph | graph | point | signature E/2 R/3 | <file>
    set V = {0, 1, 2}
    map s : (0,1) -> 0

A copresheaf file may instead embed its base between ``begin category`` and
``end category``.  Maps of composite arrows may be omitted when they follow
from the composition table.

Structures::

    domain {0, 1, 2}
    rel E/2 = {(0,1), (1,0)}

Gadget directories hold ``gadget.txt``::

    source digraph
    target digraph
    image V = V.txt
    image E = E.txt
    transform s : V 0 -> 0   # G(s): G(V) -> G(E), component V

Elements are atoms or parenthesized tuples.  Atoms matching ``-?[0-9]+``
read back as integers; other atoms are strings.  ``#`` starts a comment.
"""

from __future__ import annotations

import json
import re
from pathlib import Path
from typing import Any, Hashable, Iterable

from .copresheaf import Copresheaf, complete_graph, cycle, directed_cycle, directed_path, loop, ugraph
from .fincat import (
    Arrow,
    CatFunctor,
    FinCategory,
    close_presentation,
    digraph_category,
    graph_category,
    point,
    presentation_from_names,
    signature_category,
    validate_category,
    validate_functor,
)
from .findiag import FinDiagram
from .kan import GadgetFunctor
from .pp import PPFormula, PPInterpretation, parse_pp
from .minion import BUILTINS, MinorCondition, format_condition, parse_condition
from .structures import RelationalStructure

PRESENTATION_CAP = 10_000
_ATOM = re.compile(r'[^\s,(){}"]+')
_INT = re.compile(r"-?[0-9]+\Z")


class FormatError(ValueError):
    """Malformed input text."""


def _split_name(rest: str) -> tuple[str, str]:
    # arrow names may contain ':' (elements-category names), so prefer " : "
    name, sep, tail = rest.partition(" : ")
    if not sep:
        name, sep, tail = rest.partition(":")
    if not sep:
        raise FormatError("expected ':'")
    return name.strip(), tail


def _lines(text: str) -> Iterable[tuple[int, str]]:
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield n, line


# -- elements --------------------------------------------------------------


def format_element(x: Hashable) -> str:
    if isinstance(x, tuple):
        return "(" + ",".join(format_element(y) for y in x) + ")"
    if isinstance(x, bool) or not isinstance(x, (int, str)):
        x = str(x)
    if isinstance(x, int):
        return str(x)
    if _ATOM.fullmatch(x) and not _INT.match(x) and x != "->":
        return x
    return json.dumps(x)


def _parse_element(s: str, i: int) -> tuple[Hashable, int]:
    while i < len(s) and s[i].isspace():
        i += 1
    if i >= len(s):
        raise FormatError("expected an element")
    if s[i] == "(":
        items: list[Hashable] = []
        i += 1
        while True:
            while i < len(s) and s[i].isspace():
                i += 1
            if i < len(s) and s[i] == ")":
                return tuple(items), i + 1
            x, i = _parse_element(s, i)
            items.append(x)
            while i < len(s) and s[i].isspace():
                i += 1
            if i < len(s) and s[i] == ",":
                i += 1
            elif i >= len(s) or s[i] != ")":
                raise FormatError(f"bad tuple near {s[i:i + 10]!r}")
    if s[i] == '"':
        end = i + 1
        while end < len(s) and s[end] != '"':
            end += 2 if s[end] == "\\" else 1
        return json.loads(s[i : end + 1]), end + 1
    m = _ATOM.match(s, i)
    if not m:
        raise FormatError(f"bad element near {s[i:i + 10]!r}")
    tok = m.group()
    return (int(tok) if _INT.match(tok) else tok), m.end()


def parse_element(s: str) -> Hashable:
    x, i = _parse_element(s, 0)
    if s[i:].strip():
        raise FormatError(f"trailing text after element: {s[i:]!r}")
    return x


def parse_set(s: str) -> list[Hashable]:
    s = s.strip()
    if not (s.startswith("{") and s.endswith("}")):
        raise FormatError(f"expected {{...}}, got {s!r}")
    body = s[1:-1]
    out = []
    i = 0
    while True:
        while i < len(body) and (body[i].isspace() or body[i] == ","):
            i += 1
        if i >= len(body):
            return out
        x, i = _parse_element(body, i)
        out.append(x)


def format_set(xs: Iterable[Hashable]) -> str:
    return "{" + ", ".join(format_element(x) for x in xs) + "}"


# -- categories ------------------------------------------------------------

BUILTIN_CATEGORIES = {"digraph": digraph_category, "graph": graph_category, "point": point}


def parse_category(text: str, cap: int = PRESENTATION_CAP) -> FinCategory:
    objects: list[str] = []
    arrows: list[tuple[str, str, str]] = []
    compose: dict[tuple[str, str], str] = {}
    relations: list[tuple[str, str]] = []
    ids: dict[str, str] = {}
    for n, line in _lines(text):
        tok = line.split()
        try:
            if tok[0] == "object" and len(tok) == 2:
                objects.append(tok[1])
            elif tok[0] == "identity" and len(tok) == 4 and tok[2] == ":":
                ids[tok[1]] = tok[3]
            elif tok[0] == "arrow" and len(tok) == 6 and tok[2] == ":" and tok[4] == "->":
                arrows.append((tok[1], tok[3], tok[5]))
            elif tok[0] == "compose" and len(tok) == 6 and tok[2] == "." and tok[4] == "=":
                compose[(tok[1], tok[3])] = tok[5]
            elif tok[0] == "relation" and len(tok) == 4 and tok[2] == "=":
                relations.append((tok[1], tok[3]))
            else:
                raise FormatError("unrecognized line")
        except FormatError as err:
            raise FormatError(f"line {n}: {err}: {line!r}") from None
    std = {name: f"id_{o}" for name, o in ids.items()}

    def word(w: str) -> str:
        return ".".join(std.get(t, t) for t in w.split("."))

    compose = {(std.get(g, g), std.get(f, f)): std.get(h, h) for (g, f), h in compose.items()}
    if relations:
        rels = [(word(u), word(w)) for u, w in relations]
        rels += [(f"{g}.{f}", h) for (g, f), h in compose.items()]
        try:
            C = close_presentation(presentation_from_names(objects, arrows, rels), cap)
        except (KeyError, ValueError) as err:
            raise FormatError(f"bad presentation: {err}") from None
        return _rename_identities(C, ids)
    try:
        C = FinCategory.build(objects, arrows, compose)
    except (KeyError, ValueError) as err:
        raise FormatError(f"bad category: {err}") from None
    if not compose:
        # free on the arrows: fine only if nothing composes
        for f in C.non_identity:
            for g in C.non_identity:
                if C.arrows[f].target == C.arrows[g].source:
                    raise FormatError(
                        f"{C.arrows[g].name} . {C.arrows[f].name} has no compose or relation line"
                    )
    report = validate_category(C)
    if not report:
        raise FormatError(f"not a category: {report}")
    return _rename_identities(C, ids)


def _rename_identities(C: FinCategory, ids: dict[str, str]) -> FinCategory:
    if not ids:
        return C
    new = {C.obj(o): name for name, o in ids.items()}
    arrows = tuple(
        Arrow(new[a.source], a.source, a.target) if i in C.identities and a.source in new else a
        for i, a in enumerate(C.arrows)
    )
    return FinCategory(C.objects, arrows, C.identities, C.table)


def format_category(C: FinCategory) -> str:
    lines = [f"object {o}" for o in C.objects]
    for o, i in enumerate(C.identities):
        if C.arrows[i].name != f"id_{C.objects[o]}":
            lines.append(f"identity {C.arrows[i].name} : {C.objects[o]}")
    for f in C.non_identity:
        a = C.arrows[f]
        lines.append(f"arrow {a.name} : {C.objects[a.source]} -> {C.objects[a.target]}")
    for f in C.non_identity:
        for g in C.non_identity:
            if C.arrows[f].target == C.arrows[g].source:
                h = C.compose(g, f)
                lines.append(f"compose {C.arrows[g].name} . {C.arrows[f].name} = {C.arrows[h].name}")
    return "\n".join(lines) + "\n"


def _signature_ref(C: FinCategory) -> str | None:
    from .structures import BaseShape, signature_shape

    try:
        _, sig, _ = signature_shape(C)
    except BaseShape:
        return None
    if sig and signature_category(sig) == C:
        return "signature " + " ".join(f"{r}/{k}" for r, k in sig)
    return None


def category_ref(C: FinCategory) -> str | None:
    """A builtin name for ``C``, if it is one."""
    for name, make in BUILTIN_CATEGORIES.items():
        if make() == C:
            return name
    ref = _signature_ref(C)
    return ref


def resolve_category(ref: str, here: Path | None = None) -> FinCategory:
    tok = ref.split()
    if tok[0] in BUILTIN_CATEGORIES and len(tok) == 1:
        return BUILTIN_CATEGORIES[tok[0]]()
    if tok[0] == "signature":
        sig = []
        for item in tok[1:]:
            r, _, k = item.partition("/")
            sig.append((r, int(k)))
        return signature_category(sig)
    path = Path(ref)
    if here is not None and not path.is_absolute():
        path = here / path
    return parse_category(path.read_text())


# -- copresheaves ----------------------------------------------------------


def parse_copresheaf(
    text: str, here: Path | None = None, base: FinCategory | None = None
) -> Copresheaf:
    inline: list[str] = []
    body: list[tuple[int, str]] = []
    in_cat = False
    for n, line in _lines(text):
        if line == "begin category":
            in_cat = True
        elif line == "end category":
            in_cat = False
            base = parse_category("\n".join(inline))
        elif in_cat:
            inline.append(line)
        elif line.startswith("base "):
            base = resolve_category(line[5:].strip(), here)
        else:
            body.append((n, line))
    if base is None:
        raise FormatError("no base category given")
    sets: dict[str, list] = {o: [] for o in base.objects}
    maps: dict[str, dict] = {}
    for n, line in body:
        try:
            if line.startswith("set "):
                name, _, rest = line[4:].partition("=")
                name = name.strip()
                if name not in sets:
                    raise FormatError(f"unknown object {name}")
                sets[name] = parse_set(rest)
            elif line.startswith("map "):
                name, rest = _split_name(line[4:])
                x, i = _parse_element(rest, 0)
                rest = rest[i:].strip()
                if not rest.startswith("->"):
                    raise FormatError("expected '->'")
                maps.setdefault(name, {})[x] = parse_element(rest[2:])
            else:
                raise FormatError("unrecognized line")
        except (FormatError, json.JSONDecodeError) as err:
            raise FormatError(f"line {n}: {err}: {line!r}") from None
    return _assemble(base, sets, maps)


def _assemble(C: FinCategory, sets: dict[str, list], maps: dict[str, dict]) -> Copresheaf:
    for name in maps:
        if not C.has_morphism(name):
            raise FormatError(f"unknown arrow {name}")
    try:
        D = FinDiagram.build(C, sets, maps)
    except (KeyError, ValueError) as err:
        raise FormatError(f"incomplete or inconsistent maps: {err}") from None
    report = D.validate()
    if not report:
        raise FormatError(f"not a functor: {report}")
    return Copresheaf.of(D)


def format_copresheaf(X: FinDiagram, base_ref: str | None = None) -> str:
    C = X.shape
    ref = base_ref or category_ref(C)
    lines = []
    if ref:
        lines.append(f"base {ref}")
    else:
        lines.append("begin category")
        lines.extend(format_category(C).splitlines())
        lines.append("end category")
    for o, xs in zip(C.objects, X.sets):
        lines.append(f"set {o} = {format_set(xs)}")
    for f in C.non_identity:
        a = C.arrows[f]
        src, tgt = X.sets[a.source], X.sets[a.target]
        for k, y in enumerate(X.maps[f]):
            lines.append(f"map {a.name} : {format_element(src[k])} -> {format_element(tgt[y])}")
    return "\n".join(lines) + "\n"


# -- structures ------------------------------------------------------------


def parse_structure(text: str) -> RelationalStructure:
    domain: list = []
    sig: list[tuple[str, int]] = []
    rels: dict[str, list] = {}
    for n, line in _lines(text):
        try:
            if line.startswith("domain"):
                domain = parse_set(line[6:])
            elif line.startswith("rel "):
                head, _, rest = line[4:].partition("=")
                r, _, k = head.strip().partition("/")
                if not k.strip().isdigit():
                    raise FormatError("expected R/k")
                sig.append((r.strip(), int(k)))
                tuples = parse_set(rest)
                if any(not isinstance(t, tuple) for t in tuples):
                    raise FormatError("relation members must be tuples")
                rels[r.strip()] = tuples
            else:
                raise FormatError("unrecognized line")
        except (FormatError, json.JSONDecodeError) as err:
            raise FormatError(f"line {n}: {err}: {line!r}") from None
    try:
        return RelationalStructure.build(sig, domain, rels)
    except ValueError as err:
        raise FormatError(str(err)) from None


def format_structure(A: RelationalStructure) -> str:
    lines = [f"domain {format_set(A.domain)}"]
    for (r, k), ts in zip(A.signature, A.relations):
        lines.append(f"rel {r}/{k} = {format_set(ts)}")
    return "\n".join(lines) + "\n"


# -- conditions ------------------------------------------------------------


def load_condition(ref: str) -> MinorCondition:
    """A builtin name (``siggers``, ``symmetric``, ...) or a condition file."""
    if ref in BUILTINS:
        return BUILTINS[ref]()
    return parse_condition(Path(ref).read_text())


def dump_condition(cond: MinorCondition) -> str:
    return format_condition(cond)


# -- gadgets ---------------------------------------------------------------


def read_gadget(directory: str | Path) -> GadgetFunctor:
    d = Path(directory)
    source = target = None
    images: dict[str, str] = {}
    trans: dict[str, dict[str, dict]] = {}
    for n, line in _lines((d / "gadget.txt").read_text()):
        try:
            if line.startswith("source "):
                source = resolve_category(line[7:].strip(), d)
            elif line.startswith("target "):
                target = resolve_category(line[7:].strip(), d)
            elif line.startswith("image "):
                o, _, f = line[6:].partition("=")
                images[o.strip()] = f.strip()
            elif line.startswith("transform "):
                name, rest = _split_name(line[10:])
                t, rest = rest.split(None, 1)
                x, i = _parse_element(rest, 0)
                rest = rest[i:].strip()
                if not rest.startswith("->"):
                    raise FormatError("expected '->'")
                comp = trans.setdefault(name, {}).setdefault(t, {})
                comp[x] = parse_element(rest[2:])
            else:
                raise FormatError("unrecognized line")
        except (FormatError, ValueError) as err:
            raise FormatError(f"gadget.txt line {n}: {err}: {line!r}") from None
    if source is None or target is None:
        raise FormatError("gadget.txt needs source and target lines")
    imgs = {
        o: parse_copresheaf((d / images[o]).read_text(), d, base=target) for o in source.objects
    }
    G = GadgetFunctor.build(source, target, imgs, trans)
    report = G.validate()
    if not report:
        raise FormatError(f"not a gadget functor: {report}")
    return G


def write_gadget(G: GadgetFunctor, directory: str | Path) -> None:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    S, T = G.source, G.target
    lines = []
    for name, C in (("source", S), ("target", T)):
        ref = category_ref(C)
        if ref is None:
            ref = f"{name}.cat"
            (d / ref).write_text(format_category(C))
        lines.append(f"{name} {ref}")
    tref = category_ref(T) or "target.cat"
    for o, img in zip(S.objects, G.images):
        fname = f"{o}.txt"
        lines.append(f"image {o} = {fname}")
        (d / fname).write_text(format_copresheaf(img, tref))
    for f in S.non_identity:
        h = G.transforms[f]
        for t, comp in enumerate(h.components):
            src, tgt = h.source.sets[t], h.target.sets[t]
            for k, y in enumerate(comp):
                lines.append(
                    f"transform {S.arrows[f].name} : {T.objects[t]} "
                    f"{format_element(src[k])} -> {format_element(tgt[y])}"
                )
    (d / "gadget.txt").write_text("\n".join(lines) + "\n")


# -- builtin templates and file loading ------------------------------------

_TEMPLATE = re.compile(r"(K|C|DC|P)([0-9]+)\Z")


def builtin_template(name: str, base: FinCategory | None = None) -> Copresheaf | None:
    """``K<n>``, ``C<n>`` (symmetric), ``DC<n>``, ``P<n>`` (directed path) or ``loop``.

    Over the graph base ``K<n>``, ``C<n>`` and ``loop`` are built as
    undirected graphs; the directed ones have no such reading.
    """
    undirected = base is not None and base == graph_category()
    m = _TEMPLATE.match(name)
    if name != "loop" and not m:
        return None
    if undirected:
        if name == "loop":
            return ugraph([0], [(0, 0)])
        kind, n = m.group(1), int(m.group(2))
        if kind == "K":
            return ugraph(range(n), [(u, v) for u in range(n) for v in range(u + 1, n)])
        if kind == "C":
            return ugraph(range(n), [(i, (i + 1) % n) for i in range(n)])
        raise ValueError(f"{name} is directed and has no graph-base version")
    if name == "loop":
        return loop()
    kind, n = m.group(1), int(m.group(2))
    return {"K": complete_graph, "C": cycle, "DC": directed_cycle, "P": directed_path}[kind](n)


def load_copresheaf(ref: str, base: FinCategory | None = None) -> Copresheaf:
    """A builtin template name, a copresheaf file or a structure file."""
    X = builtin_template(ref, base)
    if X is not None:
        return X
    path = Path(ref)
    text = path.read_text()
    first = next((line for _, line in _lines(text)), "")
    if first.startswith(("domain", "rel ")):
        from .structures import to_copresheaf

        return to_copresheaf(parse_structure(text))
    return parse_copresheaf(text, path.parent, base)


def load_structure(ref: str) -> RelationalStructure:
    from .structures import clique, cycle_structure, to_structure

    m = _TEMPLATE.match(ref)
    if m and m.group(1) == "K":
        return clique(int(m.group(2)))
    if m and m.group(1) == "C":
        return cycle_structure(int(m.group(2)))
    path = Path(ref)
    if path.exists():
        text = path.read_text()
        first = next((line for _, line in _lines(text)), "")
        if first.startswith(("base", "begin")):
            return to_structure(parse_copresheaf(text, path.parent))
        return parse_structure(text)
    X = builtin_template(ref)
    if X is not None:
        return to_structure(X)
    raise FileNotFoundError(ref)


# -- machine output --------------------------------------------------------


def element_json(x: Any) -> Any:
    if isinstance(x, tuple):
        return [element_json(y) for y in x]
    if isinstance(x, (int, str)) or x is None:
        return x
    return str(x)


def copresheaf_json(X: FinDiagram) -> dict:
    C = X.shape
    return {
        "base": category_ref(C) or category_json(C),
        "sets": {o: [element_json(x) for x in xs] for o, xs in zip(C.objects, X.sets)},
        "maps": {C.arrows[f].name: list(X.maps[f]) for f in C.non_identity},
    }


def category_json(C: FinCategory) -> dict:
    return {
        "objects": list(C.objects),
        "arrows": [
            [C.arrows[f].name, C.objects[C.arrows[f].source], C.objects[C.arrows[f].target]]
            for f in C.non_identity
        ],
        "compose": [
            [C.arrows[g].name, C.arrows[f].name, C.arrows[h].name]
            for (g, f), h in sorted(C.table.items())
            if not C.is_identity(g) and not C.is_identity(f)
        ],
    }


def structure_json(A: RelationalStructure) -> dict:
    return {
        "domain": [element_json(x) for x in A.domain],
        "relations": {
            r: {"arity": k, "tuples": [element_json(t) for t in ts]}
            for (r, k), ts in zip(A.signature, A.relations)
        },
    }


# -- functors --------------------------------------------------------------


def _category_block(lines: list[str], key: str, C: FinCategory) -> None:
    ref = category_ref(C)
    if ref:
        lines.append(f"{key} {ref}")
    else:
        lines.append(f"begin {key}")
        lines.extend(format_category(C).splitlines())
        lines.append(f"end {key}")


def format_functor(F: CatFunctor) -> str:
    """``source``/``target`` lines (or inline blocks), then the object and
    arrow assignments."""
    lines: list[str] = []
    _category_block(lines, "source", F.source)
    _category_block(lines, "target", F.target)
    for j, o in enumerate(F.source.objects):
        lines.append(f"object {o} -> {F.target.objects[F.object_map[j]]}")
    for u in F.source.non_identity:
        lines.append(f"arrow {F.source.arrows[u].name} -> {F.target.arrows[F.morphism_map[u]].name}")
    return "\n".join(lines) + "\n"


def parse_functor(text: str, here: Path | None = None) -> CatFunctor:
    cats: dict[str, FinCategory] = {}
    block: list[str] | None = None
    key = ""
    objs: dict[str, str] = {}
    arrs: dict[str, str] = {}
    for n, line in _lines(text):
        tok = line.split()
        if block is not None:
            if line == f"end {key}":
                cats[key] = parse_category("\n".join(block))
                block = None
            else:
                block.append(line)
        elif len(tok) == 2 and tok[0] == "begin" and tok[1] in ("source", "target"):
            key, block = tok[1], []
        elif tok[0] in ("source", "target") and len(tok) > 1:
            cats[tok[0]] = resolve_category(line.split(None, 1)[1], here)
        elif tok[0] == "object" and len(tok) == 4 and tok[2] == "->":
            objs[tok[1]] = tok[3]
        elif tok[0] == "arrow" and len(tok) == 4 and tok[2] == "->":
            arrs[tok[1]] = tok[3]
        else:
            raise FormatError(f"line {n}: unrecognized line: {line!r}")
    if set(cats) != {"source", "target"}:
        raise FormatError("functor needs a source and a target")
    F = CatFunctor.build(cats["source"], cats["target"], objs, arrs)
    report = validate_functor(F)
    if not report:
        raise FormatError(f"not a functor: {report}")
    return F


# -- interpretations -------------------------------------------------------


def format_interpretation(phi: PPInterpretation) -> str:
    """``dimension``, ``source``/``target`` signatures, then one line per
    formula with its free variables listed before the colon."""
    lines = [
        f"dimension {phi.dimension}",
        "source " + " ".join(f"{r}/{k}" for r, k in phi.source),
        "target " + " ".join(f"{r}/{k}" for r, k in phi.target),
        f"domain {' '.join(phi.domain.free)} : {phi.domain}",
    ]
    for r, f in phi.relations:
        lines.append(f"rel {r} {' '.join(f.free)} : {f}")
    return "\n".join(lines) + "\n"


def _sig(tokens: list[str]) -> list[tuple[str, int]]:
    out = []
    for item in tokens:
        r, _, k = item.partition("/")
        if not k.isdigit():
            raise FormatError(f"expected R/k, got {item!r}")
        out.append((r, int(k)))
    return out


def parse_interpretation(text: str) -> PPInterpretation:
    dim = 1
    source: list = []
    target: list = []
    domain = None
    rels: dict[str, PPFormula] = {}
    for n, line in _lines(text):
        tok = line.split()
        try:
            if tok[0] == "dimension":
                dim = int(tok[1])
            elif tok[0] == "source":
                source = _sig(tok[1:])
            elif tok[0] == "target":
                target = _sig(tok[1:])
            elif tok[0] in ("domain", "rel"):
                head, _, body = line.partition(":")
                names = head.split()[1:]
                if tok[0] == "rel":
                    r, names = names[0], names[1:]
                    rels[r] = parse_pp(body, free=names)
                else:
                    domain = parse_pp(body, free=names)
            else:
                raise FormatError("unrecognized line")
        except (FormatError, ValueError, IndexError) as err:
            raise FormatError(f"line {n}: {err}: {line!r}") from None
    if domain is None:
        raise FormatError("interpretation needs a domain line")
    return PPInterpretation.build(dim, source, target, domain, rels)
