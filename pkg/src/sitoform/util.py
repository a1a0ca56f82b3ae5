"""Small shared utilities."""
from __future__ import annotations


class UnionFind:
    """Union-find over arbitrary hashable keys with path compression."""

    def __init__(self, keys=()):
        self.parent: dict = {k: k for k in keys}

    def add(self, k):
        self.parent.setdefault(k, k)

    def find(self, k):
        root = k
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[k] != root:
            self.parent[k], k = root, self.parent[k]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # keep the lexicographically least representative
            lo, hi = (ra, rb) if str(ra) <= str(rb) else (rb, ra)
            self.parent[hi] = lo

    def classes(self) -> dict:
        """Map every key to its class representative."""
        return {k: self.find(k) for k in self.parent}
