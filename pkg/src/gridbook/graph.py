"""Dependency graph and recalculation planning.

Edges say "this cell's formula reads that cell". Dirty propagation walks
the inverse (dependent) edges; planning walks precedent edges depth-first
and emits post-order, so every cell lands after the cells it reads. The
DFS is iterative — a 10,000-cell chain must not hit the interpreter's
recursion limit.

Cycles are detected as gray-hits during the walk. A cell is poisoned with
#CYCLE! when it sits on a cycle or transitively depends on one, whether or
not its evaluation would actually read the poisoned value (IF may skip a
branch, the taint still applies: the dependency is structural).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .addresses import CellAddr

_WHITE, _GRAY, _BLACK = 0, 1, 2


@dataclass
class RecalcPlan:
    order: list = field(default_factory=list)
    cyclic: set = field(default_factory=set)
    tainted: set = field(default_factory=set)  # cyclic + downstream


class DependencyGraph:
    def __init__(self) -> None:
        self._precedents: dict = {}
        self._dependents: dict = {}

    def precedents_of(self, addr: CellAddr) -> frozenset:
        return frozenset(self._precedents.get(addr, ()))

    def dependents_of(self, addr: CellAddr) -> frozenset:
        return frozenset(self._dependents.get(addr, ()))

    def set_precedents(self, addr: CellAddr, new: set) -> None:
        """Replace addr's outgoing read-edges, keeping the inverse in sync."""
        old = self._precedents.get(addr, set())
        for gone in old - new:
            deps = self._dependents.get(gone)
            if deps:
                deps.discard(addr)
                if not deps:
                    del self._dependents[gone]
        for added in new - old:
            self._dependents.setdefault(added, set()).add(addr)
        if new:
            self._precedents[addr] = set(new)
        elif addr in self._precedents:
            del self._precedents[addr]

    def dirty_from(self, seeds: set) -> set:
        """Seeds plus every transitive dependent."""
        dirty = set(seeds)
        queue = deque(seeds)
        while queue:
            for dep in self._dependents.get(queue.popleft(), ()):
                if dep not in dirty:
                    dirty.add(dep)
                    queue.append(dep)
        return dirty

    def plan(self, dirty: set) -> RecalcPlan:
        """Topological order over the dirty subgraph, cycles split out.

        order holds every dirty cell not on a cycle, each after all its
        dirty precedents; tainted = cycle members plus their transitive
        dependents within the dirty set.
        """
        color: dict = {}
        order: list = []
        cyclic: set = set()

        for root in sorted(dirty):
            if color.get(root, _WHITE) != _WHITE:
                continue
            color[root] = _GRAY
            path = [root]
            stack = [(root, iter(sorted(self._precedents.get(root, ()))))]
            while stack:
                node, children = stack[-1]
                advanced = False
                for child in children:
                    if child not in dirty:
                        continue
                    state = color.get(child, _WHITE)
                    if state == _WHITE:
                        color[child] = _GRAY
                        path.append(child)
                        stack.append(
                            (child, iter(sorted(self._precedents.get(child, ())))))
                        advanced = True
                        break
                    if state == _GRAY:
                        cyclic.update(path[path.index(child):])
                if not advanced:
                    stack.pop()
                    path.pop()
                    color[node] = _BLACK
                    order.append(node)

        tainted = set(cyclic)
        queue = deque(cyclic)
        while queue:
            for dep in self._dependents.get(queue.popleft(), ()):
                if dep in dirty and dep not in tainted:
                    tainted.add(dep)
                    queue.append(dep)

        return RecalcPlan(order=[a for a in order if a not in cyclic],
                          cyclic=cyclic, tainted=tainted)
