"""Reductions between promise templates and a corpus harness that checks them."""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .copresheaf import Copresheaf, NatTransformation, find_hom, hom
from .findiag import FinDiagram
from .kan import DEFAULT_CAP, GadgetFunctor, _lan_classes, yoneda_extend
from .grothendieck import gr


@dataclass(frozen=True, eq=False)
class TemplatePair:
    """A promise template ``(A, B)`` with a homomorphism ``A -> B``."""

    A: Copresheaf
    B: Copresheaf
    evidence: NatTransformation

    @classmethod
    def build(cls, A: FinDiagram, B: FinDiagram | None = None) -> TemplatePair:
        A = Copresheaf.of(A)
        B = A if B is None else Copresheaf.of(B)
        h = find_hom(A, B)
        if h is None:
            raise ValueError("no homomorphism A -> B: not a promise template")
        return cls(A, B, h)

    @property
    def base(self):
        return self.A.shape


def universal_reduction(
    src: TemplatePair, dst: TemplatePair, X: FinDiagram, cap: int = DEFAULT_CAP
) -> Copresheaf:
    """``gl(A . gr X) . A'``.

    At ``t`` the elements are classes of pairs ``((s, x), phi)`` with ``x``
    in ``X(s)`` and ``phi: A(s) -> A'(t)``, glued along ``phi ~ phi . A(f)``.
    Representatives carry ``phi`` as a tuple of elements of ``A'(t)``.
    Correct as a reduction only if ``Ran_{A'} B' -> Ran_A B`` exists; that
    is the caller's assertion.
    """
    A, Ap = src.A, dst.A
    if X.shape != A.shape:
        raise ValueError("instance is not over the source template's base")
    T = Ap.shape
    E = gr(X)
    per_t = [_lan_classes(A, X, Ap.sets[t], cap, E) for t in range(len(T.objects))]
    sets = tuple(tuple(names) for names, _, _, _ in per_t)
    maps = []
    for u, a in enumerate(T.arrows):
        _, Qs, _, terms_s = per_t[a.source]
        _, Qt, _, _ = per_t[a.target]
        m = len(Ap.sets[a.target])
        au = Ap.maps[u]
        row = []
        for j, k in Qs.carrier:
            idx = 0
            for p in terms_s[j][k]:
                idx = idx * m + au[p]
            row.append(Qt.injections[j][idx])
        maps.append(tuple(row))
    return Copresheaf(T, sets, tuple(maps))


def gadget_reduce(G: GadgetFunctor, X: FinDiagram, log: list | None = None) -> Copresheaf:
    """``kay_G(X)``; appends ``(input size, output size)`` to ``log`` if given."""
    Y = yoneda_extend(G, X)
    if log is not None:
        log.append((X.total_size, Y.total_size))
    return Y


# -- named reductions ------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Reduction:
    """A picklable named reduction.

    ``kind`` is ``identity``, ``universal``, ``gadget`` or ``constant``
    (which ignores its input and returns ``output``; a negative control).
    """

    kind: str
    src: TemplatePair | None = None
    dst: TemplatePair | None = None
    gadget: GadgetFunctor | None = None
    output: Copresheaf | None = None
    cap: int = DEFAULT_CAP
    assumption: str = ""

    def __call__(self, X: FinDiagram) -> Copresheaf:
        if self.kind == "identity":
            return Copresheaf.of(X)
        if self.kind == "universal":
            return universal_reduction(self.src, self.dst, X, self.cap)
        if self.kind == "gadget":
            return gadget_reduce(self.gadget, X)
        if self.kind == "constant":
            return self.output
        raise ValueError(f"unknown reduction {self.kind!r}")


def identity_reduction() -> Reduction:
    return Reduction("identity")


def universal(src: TemplatePair, dst: TemplatePair, cap: int = DEFAULT_CAP) -> Reduction:
    note = "asserted: Ran_{A'}B' -> Ran_A B exists"
    if src.A.same_as(dst.A) and src.B.same_as(dst.B):
        note = "identity natural transformation (src = dst)"
    return Reduction("universal", src, dst, cap=cap, assumption=note)


def gadget(G: GadgetFunctor) -> Reduction:
    return Reduction("gadget", gadget=G)


def constant(output: FinDiagram) -> Reduction:
    return Reduction("constant", output=Copresheaf.of(output))


REDUCTIONS = ("identity", "universal", "gadget", "constant")


# -- harness ---------------------------------------------------------------

YES, NO, NEITHER = "YES", "NO", "neither"


def verdict(X: FinDiagram, pair: TemplatePair) -> str:
    if hom(X, pair.A):
        return YES
    if not hom(X, pair.B):
        return NO
    return NEITHER


@dataclass(frozen=True)
class InstanceResult:
    index: int
    input_verdict: str
    output_verdict: str
    classification: str
    input_size: int
    output_size: int
    seconds: float


@dataclass
class ReductionReport:
    reduction: str
    assumption: str
    results: list[InstanceResult] = field(default_factory=list)

    @property
    def violations(self) -> list[InstanceResult]:
        return [r for r in self.results if r.classification == "violation"]

    @property
    def passed(self) -> bool:
        return not self.violations

    def counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for r in self.results:
            out[r.classification] = out.get(r.classification, 0) + 1
        return out

    def summary(self) -> str:
        c = self.counts()
        parts = ", ".join(f"{k}={c[k]}" for k in sorted(c))
        return f"{self.reduction}: {len(self.results)} instances ({parts}); violations={len(self.violations)}"


def classify(inp: str, out: str) -> str:
    if inp == NEITHER:
        return "outside-promise"
    if inp == YES:
        return "complete" if out == YES else "violation"
    return "sound" if out == NO else "violation"


def _run_one(args) -> InstanceResult:
    i, X, src, dst, reduction = args
    t0 = time.perf_counter()
    inp = verdict(X, src)
    Y = reduction(X)
    # only the promise-relevant side of the output verdict matters
    if inp == YES:
        out = YES if hom(Y, dst.A) else (NO if not hom(Y, dst.B) else NEITHER)
    elif inp == NO:
        out = NO if not hom(Y, dst.B) else (YES if hom(Y, dst.A) else NEITHER)
    else:
        out = verdict(Y, dst)
    return InstanceResult(
        i, inp, out, classify(inp, out), X.total_size, Y.total_size, time.perf_counter() - t0
    )


def harness(
    corpus: Sequence[FinDiagram],
    src: TemplatePair,
    dst: TemplatePair,
    reduction: Reduction | Callable[[FinDiagram], FinDiagram],
    workers: int = 1,
) -> ReductionReport:
    """Run the reduction and both solvers on every instance.

    Instances outside the source promise are reported but never count as
    violations.  Results are in corpus order whatever ``workers`` is.
    """
    name = getattr(reduction, "kind", getattr(reduction, "__name__", "custom"))
    report = ReductionReport(name, getattr(reduction, "assumption", ""))
    jobs = [(i, X, src, dst, reduction) for i, X in enumerate(corpus)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            report.results.extend(pool.map(_run_one, jobs, chunksize=1))
    else:
        report.results.extend(_run_one(j) for j in jobs)
    return report
