"""Backtracking over functional constraints with arc-consistency propagation.

A network has one variable per diagram object, each ranging over
``range(size)``, and arcs ``(i, j, g)`` demanding ``g[x_i] == x_j``.  Arcs
between the same ordered pair of variables are merged into a single partial
function (``-1`` marks values on which the merged maps disagree), and arcs
from a variable to itself become unary filters.
"""

from __future__ import annotations

from typing import Iterator, Sequence


class Network:
    def __init__(self, sizes: Sequence[int]):
        self.sizes = list(sizes)
        self._arcs: dict[tuple[int, int], Sequence[int]] = {}
        self._loops: dict[int, list[Sequence[int]]] = {}
        self.groups: list[list[int]] = []

    def add(self, i: int, j: int, g: Sequence[int]) -> None:
        if i == j:
            self._loops.setdefault(i, []).append(g)
            return
        cur = self._arcs.get((i, j))
        if cur is None:
            self._arcs[(i, j)] = g
        elif cur is not g:
            self._arcs[(i, j)] = [y if y == z else -1 for y, z in zip(cur, g)]

    def all_different(self, variables: Sequence[int]) -> None:
        """Require pairwise distinct values on ``variables``."""
        if len(variables) > 1:
            self.groups.append(list(variables))

    def solutions(self, order: Sequence[int] | None = None) -> Iterator[tuple[int, ...]]:
        return _Search(self, order).run()


def _bits(m: int) -> Iterator[int]:
    while m:
        low = m & -m
        yield low.bit_length() - 1
        m ^= low


class _Arc:
    """A functional arc with revisions memoized on (source, target) masks."""

    __slots__ = ("g", "memo", "small")

    def __init__(self, g: Sequence[int], small: bool):
        self.g = g
        self.memo: dict[tuple[int, int], tuple[int, int]] = {}
        self.small = small

    def revise(self, ds: int, dt: int) -> tuple[int, int]:
        """Supported part of ``ds`` and its image inside ``dt``."""
        if self.small:
            r = self.memo.get((ds, dt))
            if r is not None:
                return r
        g = self.g
        keep = img = 0
        for x in _bits(ds):
            y = g[x]
            if y >= 0 and dt >> y & 1:
                keep |= 1 << x
                img |= 1 << y
        if self.small:
            self.memo[(ds, dt)] = (keep, img)
        return keep, img


class _Search:
    # domains are int bitmasks over range(size)
    def __init__(self, net: Network, order: Sequence[int] | None):
        n = len(net.sizes)
        self.n = n
        doms: list[int] = []
        for v, k in enumerate(net.sizes):
            loops = net._loops.get(v)
            if loops:
                d = sum(1 << x for x in range(k) if all(g[x] == x for g in loops))
            else:
                d = (1 << k) - 1
            doms.append(d)
        self.doms = doms
        self.out: list[list[tuple[int, _Arc]]] = [[] for _ in range(n)]
        self.inc: list[list[tuple[int, _Arc]]] = [[] for _ in range(n)]
        shared: dict[tuple[int, bool], _Arc] = {}
        for (i, j), g in net._arcs.items():
            small = net.sizes[i] <= 12 and net.sizes[j] <= 12
            key = (id(g), small)
            arc = shared.get(key)
            if arc is None or arc.g is not g:
                arc = shared[key] = _Arc(g, small)
            self.out[i].append((j, arc))
            self.inc[j].append((i, arc))
        self.group_of: list[list[list[int]]] = [[] for _ in range(n)]
        for grp in net.groups:
            for v in grp:
                self.group_of[v].append(grp)
        if order is None:
            order = sorted(range(n), key=lambda v: (net.sizes[v], v))
        self.order = list(order)
        self.trail: list[tuple[int, int]] = []

    def _set(self, v: int, d: int) -> None:
        self.trail.append((v, self.doms[v]))
        self.doms[v] = d

    def _undo(self, mark: int) -> None:
        trail, doms = self.trail, self.doms
        while len(trail) > mark:
            v, d = trail.pop()
            doms[v] = d

    def propagate(self, queue: list[int]) -> bool:
        doms = self.doms
        trail = self.trail
        pending = set(queue)
        while queue:
            v = queue.pop()
            pending.discard(v)
            dv = doms[v]
            if not dv:
                return False
            for j, arc in self.out[v]:
                dj = doms[j]
                r = arc.memo.get((dv, dj))
                keep, img = r if r is not None else arc.revise(dv, dj)
                if keep != dv:
                    if not keep:
                        return False
                    trail.append((v, dv))
                    doms[v] = dv = keep
                    if v not in pending:
                        pending.add(v)
                        queue.append(v)
                if img != dj:
                    trail.append((j, dj))
                    doms[j] = img
                    if j not in pending:
                        pending.add(j)
                        queue.append(j)
            for i, arc in self.inc[v]:
                di = doms[i]
                r = arc.memo.get((di, dv))
                keep = (r if r is not None else arc.revise(di, dv))[0]
                if keep != di:
                    if not keep:
                        return False
                    trail.append((i, di))
                    doms[i] = keep
                    if i not in pending:
                        pending.add(i)
                        queue.append(i)
            if self.group_of[v] and dv & (dv - 1) == 0:
                for grp in self.group_of[v]:
                    for w in grp:
                        dw = doms[w]
                        if w != v and dw & dv:
                            dw &= ~dv
                            if not dw:
                                return False
                            trail.append((w, doms[w]))
                            doms[w] = dw
                            if w not in pending:
                                pending.add(w)
                                queue.append(w)
        return True

    def run(self) -> Iterator[tuple[int, ...]]:
        if any(not d for d in self.doms):
            return
        if not self.propagate(list(range(self.n))):
            return
        order = self.order
        doms = self.doms
        # explicit stack of (position in order, values left, trail mark)
        stack: list[tuple[int, list[int], int]] = []
        pos = 0
        while True:
            while pos < len(order) and doms[order[pos]] & (doms[order[pos]] - 1) == 0:
                pos += 1
            if pos == len(order):
                yield tuple(d.bit_length() - 1 for d in doms)
                values = None
            else:
                v = order[pos]
                values = sorted(_bits(doms[v]), reverse=True)
                stack.append((pos, values, len(self.trail)))
            # try the next value, unwinding exhausted levels
            while stack:
                p, vals, mark = stack[-1]
                self._undo(mark)
                if not vals:
                    stack.pop()
                    continue
                x = vals.pop()
                v = order[p]
                self._set(v, 1 << x)
                if self.propagate([v]):
                    pos = p + 1
                    break
            else:
                return
