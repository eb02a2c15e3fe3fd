"""Command line front end.

Every subcommand reads the text formats of :mod:`catcsp.textio`; wherever a
copresheaf is expected a builtin template name (``K3``, ``C5``, ``DC4``,
``P3``, ``loop``) may be given instead of a file.  Exit status is 0 on
success, 1 when a check finds a violation and 2 on bad input or a cap.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Callable

from . import copresheaf as cp
from . import textio as tio
from .copresheaf import Copresheaf
from .corpus import multidigraphs, random_digraph, seeded
from .fincat import CapExceeded
from .findiag import colimit, iter_solutions, limit
from .grothendieck import gl, gr, template_condition
from .kan import DEFAULT_CAP, lan_eval, nerve, ran_eval, verify_adjunction, yoneda_extend
from .minion import (
    indicator,
    interpretable,
    probe_hardness,
    satisfies,
    satisfies_direct,
)
from .pp import (
    canonical_formula,
    canonical_structure,
    gadget_to_ppinterp,
    parse_pp,
    pp_sentence_to_instance,
    ppinterp_to_gadget,
)
from .reduce import Reduction, TemplatePair, constant, harness, identity_reduction, universal
from .structures import single_sorted, to_copresheaf, to_structure

OK, VIOLATION, ERROR = 0, 1, 2


class Out:
    def __init__(self, machine: bool):
        self.machine = machine

    def emit(self, text: str, data: Any) -> None:
        if self.machine:
            print(json.dumps(data, sort_keys=True))
        else:
            sys.stdout.write(text if text.endswith("\n") else text + "\n")


# -- subcommands -----------------------------------------------------------


def cmd_solve(a, out: Out) -> int:
    A = tio.load_copresheaf(a.template)
    X = tio.load_copresheaf(a.instance, base=A.shape)
    if a.count:
        n = cp.hom(X, A, "count")
        out.emit(str(n), {"count": n})
        return OK
    if a.enumerate:
        hs = cp.hom(X, A, "enumerate")
        text = "\n".join(_format_hom(h) for h in hs) or "(none)"
        out.emit(f"{len(hs)} homomorphisms\n{text}", {"homomorphisms": [_hom_json(h) for h in hs]})
        return OK
    h = cp.find_hom(X, A)
    verdict = "YES" if h else "NO"
    text = verdict + ("\n" + _format_hom(h) if h else "")
    out.emit(text, {"verdict": verdict, "witness": _hom_json(h) if h else None})
    return OK


def _format_hom(h) -> str:
    X = h.source
    lines = []
    for o, xs, comp, ts in zip(X.shape.objects, X.sets, h.components, h.target.sets):
        pairs = ", ".join(f"{tio.format_element(x)} -> {tio.format_element(ts[y])}" for x, y in zip(xs, comp))
        lines.append(f"  {o}: {pairs}")
    return "\n".join(lines)


def _hom_json(h) -> dict:
    X = h.source
    return {
        o: [[tio.element_json(x), tio.element_json(ts[y])] for x, y in zip(xs, comp)]
        for o, xs, comp, ts in zip(X.shape.objects, X.sets, h.components, h.target.sets)
    }


def cmd_limit(a, out: Out) -> int:
    D = tio.load_copresheaf(a.diagram)
    if a.mode == "decide":
        ok = limit(D)
        out.emit("nonempty" if ok else "empty", {"nonempty": ok})
    elif a.mode == "count":
        n = limit(D, "count")
        out.emit(str(n), {"count": n})
    else:
        sols = [tuple(D.sets[i][k] for i, k in enumerate(s)) for s in iter_solutions(D)]
        text = "\n".join(tio.format_element(s) for s in sols)
        out.emit(f"{len(sols)} solutions\n{text}", {"solutions": [tio.element_json(s) for s in sols]})
    return OK


def cmd_colimit(a, out: Out) -> int:
    D = tio.load_copresheaf(a.diagram)
    Q = colimit(D)
    reps = [(D.shape.objects[j], D.sets[j][k]) for j, k in Q.carrier]
    text = f"{len(reps)} classes\n" + "\n".join(f"{o} {tio.format_element(x)}" for o, x in reps)
    out.emit(text, {"classes": [[o, tio.element_json(x)] for o, x in reps]})
    return OK


def cmd_gr(a, out: Out) -> int:
    X = tio.load_copresheaf(a.instance)
    E = gr(X)
    out.emit(tio.format_functor(E.projection), tio.category_json(E.category))
    return OK


def cmd_gl(a, out: Out) -> int:
    D = tio.parse_functor(Path(a.functor).read_text(), Path(a.functor).parent)
    Y = gl(D)
    out.emit(tio.format_copresheaf(Y), tio.copresheaf_json(Y))
    return OK


def cmd_convert(a, out: Out) -> int:
    A = tio.load_copresheaf(a.template)
    if a.to == "sat":
        if not a.instance:
            raise ValueError("convert --to sat needs --instance")
        X = tio.load_copresheaf(a.instance, base=A.shape)
        D = template_condition(A, X)
        out.emit(tio.format_copresheaf(D), tio.copresheaf_json(D))
    else:
        if not a.functor:
            raise ValueError("convert --to hom needs --functor")
        F = tio.parse_functor(Path(a.functor).read_text(), Path(a.functor).parent)
        Y = gl(F)
        out.emit(tio.format_copresheaf(Y), tio.copresheaf_json(Y))
    return OK


def _arities(spec: str) -> list[tuple[int, ...]]:
    return [tuple(range(int(n))) for n in spec.split(",")]


def cmd_ran(a, out: Out) -> int:
    A = tio.load_copresheaf(a.template)
    B = tio.load_copresheaf(a.target, base=A.shape) if a.target else A
    T = ran_eval(A, B, _arities(a.arities), a.cap)
    report = T.validate()
    sizes = [T.size(i) for i in range(len(T.arities))]
    lines = [f"|N|={len(N)}: {s} polymorphisms" for N, s in zip(T.arities, sizes)]
    lines.append("functorial" if report else f"not functorial: {report}")
    out.emit("\n".join(lines), {"arities": [len(N) for N in T.arities], "sizes": sizes, "functorial": bool(report)})
    return OK if report else VIOLATION


def cmd_lan(a, out: Out) -> int:
    A = tio.load_copresheaf(a.along)
    X = tio.load_copresheaf(a.instance, base=A.shape)
    names = lan_eval(A, X, range(a.size), a.cap)
    text = f"{len(names)} elements\n" + "\n".join(tio.format_element(x) for x in names)
    out.emit(text, {"size": len(names), "elements": [tio.element_json(x) for x in names]})
    return OK


def cmd_gadget_apply(a, out: Out) -> int:
    G = tio.read_gadget(a.gadget)
    X = tio.load_copresheaf(a.instance, base=G.source)
    Y = yoneda_extend(G, X)
    out.emit(tio.format_copresheaf(Y), tio.copresheaf_json(Y))
    return OK


def cmd_nerve(a, out: Out) -> int:
    G = tio.read_gadget(a.gadget)
    B = tio.load_copresheaf(a.template, base=G.target)
    Y = nerve(G, B, a.cap)
    out.emit(tio.format_copresheaf(Y), tio.copresheaf_json(Y))
    return OK


def cmd_verify_adjunction(a, out: Out) -> int:
    G = tio.read_gadget(a.gadget)
    A = tio.load_copresheaf(a.instance, base=G.source)
    C = tio.load_copresheaf(a.template, base=G.target)
    r = verify_adjunction(G, A, C)
    text = f"|hom(kay A, C)| = {r.left}, |hom(A, nerve C)| = {r.right}: {'ok' if r.ok else 'MISMATCH'}"
    out.emit(text, {"left": r.left, "right": r.right, "ok": r.ok})
    return OK if r.ok else VIOLATION


def cmd_check_condition(a, out: Out) -> int:
    cond = tio.load_condition(a.condition)
    A = tio.load_copresheaf(a.template)
    B = tio.load_copresheaf(a.target, base=A.shape) if a.target else A
    if a.direct:
        holds = bool(satisfies_direct(A, B, cond, a.cap))
        out.emit("satisfied" if holds else "not satisfied", {"holds": holds})
        return OK
    s = satisfies(A, B, cond, a.cap)
    lines = ["satisfied" if s.holds else "not satisfied"]
    if s.holds and a.witness:
        for f, h in s.witness.items():
            lines.append(f"{f}:\n{_format_hom(h)}")
    out.emit("\n".join(lines), {"holds": s.holds})
    return OK


def cmd_interpretable(a, out: Out) -> int:
    pi = tio.load_condition(a.pi)
    gamma = tio.load_condition(a.gamma)
    ok = interpretable(pi, gamma, a.cap)
    out.emit("interpretable" if ok else "not interpretable", {"interpretable": ok})
    return OK


def cmd_probe_hardness(a, out: Out) -> int:
    A = tio.load_copresheaf(a.template)
    B = tio.load_copresheaf(a.target, base=A.shape) if a.target else A
    r = probe_hardness(A, B, a.max_arity, a.cap)
    out.emit(r.verdict, {"verdict": r.verdict, "refuted_at": r.refuted_at})
    return OK


def cmd_indicator(a, out: Out) -> int:
    cond = tio.load_condition(a.condition)
    A = tio.load_copresheaf(a.template)
    Y = indicator(A, cond, a.cap)
    out.emit(tio.format_copresheaf(Y), tio.copresheaf_json(Y))
    return OK


def cmd_encode(a, out: Out) -> int:
    S = tio.load_structure(a.structure)
    Y = to_copresheaf(S)
    out.emit(tio.format_copresheaf(Y), tio.copresheaf_json(Y))
    return OK


def cmd_decode(a, out: Out) -> int:
    X = tio.load_copresheaf(a.copresheaf)
    S = to_structure(X)
    out.emit(tio.format_structure(S), tio.structure_json(S))
    return OK


def cmd_single_sorted(a, out: Out) -> int:
    X = tio.load_copresheaf(a.copresheaf)
    S = single_sorted(X, a.cap)
    out.emit(tio.format_structure(S), tio.structure_json(S))
    return OK


def cmd_pp_to_instance(a, out: Out) -> int:
    phi = parse_pp(a.formula, free=[])
    S = tio.resolve_category(a.base)
    D = pp_sentence_to_instance(phi, S)
    out.emit(tio.format_functor(D), tio.category_json(D.source))
    return OK


def cmd_pp_to_gadget(a, out: Out) -> int:
    phi = tio.parse_interpretation(Path(a.interpretation).read_text())
    G = ppinterp_to_gadget(phi)
    tio.write_gadget(G, a.out)
    out.emit(f"gadget written to {a.out}", {"directory": a.out})
    return OK


def cmd_gadget_to_pp(a, out: Out) -> int:
    G = tio.read_gadget(a.gadget)
    phi = gadget_to_ppinterp(G)
    out.emit(tio.format_interpretation(phi), {"interpretation": tio.format_interpretation(phi)})
    return OK


def cmd_canonical(a, out: Out) -> int:
    if a.formula is not None:
        S = canonical_structure(parse_pp(a.formula))
        out.emit(tio.format_structure(S), tio.structure_json(S))
    else:
        phi = canonical_formula(tio.load_structure(a.structure))
        text = f"{' '.join(phi.free)} : {phi}"
        out.emit(text, {"free": list(phi.free), "formula": str(phi)})
    return OK


def _reduction(a, src: TemplatePair, dst: TemplatePair) -> Reduction:
    if a.kind == "identity":
        return identity_reduction()
    if a.kind == "universal":
        return universal(src, dst, a.cap)
    if a.kind == "constant":
        return constant(dst.A)
    if a.kind == "gadget":
        if not a.gadget:
            raise ValueError("--kind gadget needs --gadget")
        return Reduction("gadget", gadget=tio.read_gadget(a.gadget))
    raise ValueError(f"unknown reduction {a.kind}")


def _pairs(a) -> tuple[TemplatePair, TemplatePair]:
    A = tio.load_copresheaf(a.src)
    B = tio.load_copresheaf(a.src_b, base=A.shape) if a.src_b else A
    Ap = tio.load_copresheaf(a.dst) if a.dst else A
    Bp = tio.load_copresheaf(a.dst_b, base=Ap.shape) if a.dst_b else Ap
    return TemplatePair.build(A, B), TemplatePair.build(Ap, Bp)


def cmd_reduce(a, out: Out) -> int:
    src, dst = _pairs(a)
    X = tio.load_copresheaf(a.instance, base=src.base)
    Y = _reduction(a, src, dst)(X)
    out.emit(tio.format_copresheaf(Y), tio.copresheaf_json(Y))
    return OK


def cmd_harness(a, out: Out) -> int:
    src, dst = _pairs(a)
    corpus: list[Copresheaf] = []
    if a.max_vertices is not None:
        corpus += multidigraphs(a.max_vertices, a.max_edges, up_to_iso=not a.labelled)
    if a.random:
        rng = seeded(a.seed)
        for _ in range(a.random):
            corpus.append(random_digraph(rng.randint(1, a.random_vertices), rng.randint(0, a.random_edges), rng))
    for f in a.corpus or ():
        corpus.append(tio.load_copresheaf(f, base=src.base))
    red = _reduction(a, src, dst)
    rep = harness(corpus, src, dst, red, workers=a.workers)
    lines = [rep.summary()]
    if rep.assumption:
        lines.append(f"assumption: {rep.assumption}")
    for r in rep.violations:
        lines.append(f"violation at instance {r.index}: input {r.input_verdict}, output {r.output_verdict}")
    data = {
        "reduction": rep.reduction,
        "assumption": rep.assumption,
        "counts": rep.counts(),
        "results": [
            {"index": r.index, "input": r.input_verdict, "output": r.output_verdict, "class": r.classification}
            for r in rep.results
        ],
    }
    out.emit("\n".join(lines), data)
    return OK if rep.passed else VIOLATION


# -- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    def flags(q: argparse.ArgumentParser, default: bool) -> None:
        # accepted before or after the subcommand
        d = (lambda v: v) if default else (lambda v: argparse.SUPPRESS)
        q.add_argument("--cap", type=int, default=d(DEFAULT_CAP), help="size cap for constructed objects")
        q.add_argument("--seed", type=int, default=d(0), help="seed for corpus sampling")
        q.add_argument("--format", choices=("text", "machine"), default=d("text"))

    p = argparse.ArgumentParser(prog="catcsp", description="Constraint satisfaction over copresheaves.")
    flags(p, True)
    common = argparse.ArgumentParser(add_help=False)
    flags(common, False)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name: str, fn: Callable, help: str) -> argparse.ArgumentParser:
        q = sub.add_parser(name, help=help, parents=[common])
        q.set_defaults(fn=fn)
        return q

    q = add("solve", cmd_solve, "decide hom(X, A)")
    q.add_argument("--template", required=True)
    q.add_argument("--instance", required=True)
    q.add_argument("--enumerate", action="store_true")
    q.add_argument("--count", action="store_true")

    q = add("limit", cmd_limit, "solutions of a diagram")
    q.add_argument("diagram")
    q.add_argument("--mode", choices=("decide", "count", "enumerate"), default="decide")

    q = add("colimit", cmd_colimit, "colimit of a diagram")
    q.add_argument("diagram")

    q = add("gr", cmd_gr, "category of elements with its projection")
    q.add_argument("instance")

    q = add("gl", cmd_gl, "gl of a functor into the base")
    q.add_argument("functor")

    q = add("convert", cmd_convert, "between homomorphism and satisfiability instances")
    q.add_argument("--to", choices=("sat", "hom"), required=True)
    q.add_argument("--template", required=True)
    q.add_argument("--instance")
    q.add_argument("--functor")

    q = add("ran", cmd_ran, "right Kan extension Ran_A B on small arities")
    q.add_argument("--template", required=True)
    q.add_argument("--target")
    q.add_argument("--arities", default="0,1,2", help="comma separated sizes")

    q = add("lan", cmd_lan, "Lan_A X at a finite set")
    q.add_argument("--along", required=True)
    q.add_argument("--instance", required=True)
    q.add_argument("--size", type=int, required=True)

    q = add("gadget-apply", cmd_gadget_apply, "Yoneda extension of a gadget")
    q.add_argument("--gadget", required=True)
    q.add_argument("--instance", required=True)

    q = add("nerve", cmd_nerve, "nerve of a template along a gadget")
    q.add_argument("--gadget", required=True)
    q.add_argument("--template", required=True)

    q = add("verify-adjunction", cmd_verify_adjunction, "compare hom counts across the adjunction")
    q.add_argument("--gadget", required=True)
    q.add_argument("--instance", required=True)
    q.add_argument("--template", required=True)

    q = add("check-condition", cmd_check_condition, "whether Pol(A, B) satisfies a minor condition")
    q.add_argument("--condition", required=True)
    q.add_argument("--template", required=True)
    q.add_argument("--target")
    q.add_argument("--direct", action="store_true", help="materialize polymorphisms instead")
    q.add_argument("--witness", action="store_true")

    q = add("interpretable", cmd_interpretable, "whether gamma implies pi in every minion")
    q.add_argument("pi")
    q.add_argument("gamma")

    q = add("probe-hardness", cmd_probe_hardness, "bounded search for Ran_A B -> id")
    q.add_argument("--template", required=True)
    q.add_argument("--target")
    q.add_argument("--max-arity", type=int, default=2)

    q = add("indicator", cmd_indicator, "indicator structure of a condition")
    q.add_argument("--condition", required=True)
    q.add_argument("--template", required=True)

    q = add("encode", cmd_encode, "relational structure to copresheaf")
    q.add_argument("structure")

    q = add("decode", cmd_decode, "copresheaf to relational structure")
    q.add_argument("copresheaf")

    q = add("single-sorted", cmd_single_sorted, "single-sorted encoding of a copresheaf")
    q.add_argument("copresheaf")

    q = add("pp-to-instance", cmd_pp_to_instance, "pp-sentence to satisfiability instance")
    q.add_argument("--formula", required=True)
    q.add_argument("--base", default="digraph")

    q = add("pp-to-gadget", cmd_pp_to_gadget, "pp-interpretation to gadget directory")
    q.add_argument("interpretation")
    q.add_argument("--out", required=True)

    q = add("gadget-to-pp", cmd_gadget_to_pp, "gadget directory to pp-interpretation")
    q.add_argument("gadget")

    q = add("canonical", cmd_canonical, "canonical structure or formula")
    g = q.add_mutually_exclusive_group(required=True)
    g.add_argument("--formula")
    g.add_argument("--structure")

    for name, fn, help in (
        ("reduce", cmd_reduce, "apply a reduction to one instance"),
        ("harness", cmd_harness, "check a reduction on a corpus"),
    ):
        q = add(name, fn, help)
        q.add_argument("--kind", choices=("identity", "universal", "gadget", "constant"), default="universal")
        q.add_argument("--src", required=True)
        q.add_argument("--src-b")
        q.add_argument("--dst")
        q.add_argument("--dst-b")
        q.add_argument("--gadget")
        if name == "reduce":
            q.add_argument("--instance", required=True)
        else:
            q.add_argument("--max-vertices", type=int)
            q.add_argument("--max-edges", type=int, default=2)
            q.add_argument("--labelled", action="store_true", help="do not identify isomorphic graphs")
            q.add_argument("--random", type=int, default=0, help="number of random graphs")
            q.add_argument("--random-vertices", type=int, default=5)
            q.add_argument("--random-edges", type=int, default=4)
            q.add_argument("--corpus", nargs="*")
            q.add_argument("--workers", type=int, default=1)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    a = parser.parse_args(argv)
    out = Out(a.format == "machine")
    try:
        return a.fn(a, out)
    except CapExceeded as err:
        print(f"error: cap exceeded: {err}", file=sys.stderr)
    except (ValueError, KeyError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
    return ERROR


if __name__ == "__main__":
    sys.exit(main())
