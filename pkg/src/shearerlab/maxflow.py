"""Dinic max-flow over any ordered number type (floats or Fractions)."""

from __future__ import annotations

from collections import deque


class FlowNetwork:
    def __init__(self, nodes: int):
        self.nodes = nodes
        self.adj = [[] for _ in range(nodes)]
        self.to = []
        self.cap = []
        self.base = []

    def add_edge(self, u: int, v: int, cap) -> int:
        """Add ``u -> v``; returns the edge id (its reverse is ``id ^ 1``)."""
        idx = len(self.to)
        self.to += [v, u]
        self.cap += [cap, cap * 0]
        self.base += [cap, cap * 0]
        self.adj[u].append(idx)
        self.adj[v].append(idx + 1)
        return idx

    def flow_on(self, edge: int):
        return self.base[edge] - self.cap[edge]

    def _levels(self, s: int, t: int):
        level = [-1] * self.nodes
        level[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for e in self.adj[u]:
                v = self.to[e]
                if level[v] < 0 and self.cap[e] > 0:
                    level[v] = level[u] + 1
                    queue.append(v)
        return level if level[t] >= 0 else None

    def _augment(self, s: int, t: int, level, it):
        path = []
        u = s
        while True:
            if u == t:
                push = min(self.cap[e] for e in path)
                for e in path:
                    self.cap[e] -= push
                    self.cap[e ^ 1] += push
                return push
            adj = self.adj[u]
            while it[u] < len(adj):
                e = adj[it[u]]
                v = self.to[e]
                if self.cap[e] > 0 and level[v] == level[u] + 1:
                    path.append(e)
                    u = v
                    break
                it[u] += 1
            else:
                if u == s:
                    return None
                level[u] = -1
                e = path.pop()
                u = self.to[e ^ 1]
                it[u] += 1

    def max_flow(self, s: int, t: int, zero=0):
        flow = zero
        while True:
            level = self._levels(s, t)
            if level is None:
                return flow
            it = [0] * self.nodes
            while True:
                push = self._augment(s, t, level, it)
                if push is None:
                    break
                flow += push

    def reachable(self, s: int) -> list[bool]:
        """Nodes reachable from ``s`` in the residual graph."""
        seen = [False] * self.nodes
        seen[s] = True
        stack = [s]
        while stack:
            u = stack.pop()
            for e in self.adj[u]:
                v = self.to[e]
                if not seen[v] and self.cap[e] > 0:
                    seen[v] = True
                    stack.append(v)
        return seen
