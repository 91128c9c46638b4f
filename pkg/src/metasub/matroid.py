"""Matroid oracles: uniform, partition, and graphic.

Each oracle answers independence queries over bitmask subsets and caches
its rank and minimum circuit size. Base extension and greedy closures use
ascending element order everywhere, so runs are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import ValidationError
from .setfn import check_mask, elements_of, iter_elements


class MatroidOracle:
    kind = "abstract"

    def __init__(self, n: int):
        if n < 1:
            raise ValidationError("ground set must be non-empty")
        self.n = n
        self.rank: int = 0
        self.min_circuit_size: int | None = None  # None marks a free matroid

    def is_independent(self, mask: int) -> bool:
        raise NotImplementedError

    def rank_of(self, mask: int) -> int:
        """Greedy closure size inside mask, ascending element order."""
        check_mask(mask, self.n)
        acc = 0
        for v in iter_elements(mask):
            if self.is_independent(acc | (1 << v)):
                acc |= 1 << v
        return acc.bit_count()

    def extend_to_base(self, mask: int) -> int:
        """Smallest-first greedy superset base of an independent set."""
        check_mask(mask, self.n)
        if not self.is_independent(mask):
            raise ValidationError(f"set {mask:#x} is not independent")
        acc = mask
        for v in range(self.n):
            bit = 1 << v
            if not acc & bit and self.is_independent(acc | bit):
                acc |= bit
        return acc

    def _finish_init(self) -> None:
        self.rank = self.rank_of((1 << self.n) - 1)

    def exchange_bijection(self, S: int, T: int) -> "ExchangeBijection":
        """Pairing of S\\T onto T\\S with every single swap independent.

        Found as a perfect matching of the bipartite exchangeability graph;
        a failure indicates a broken oracle, not bad input.
        """
        for base in (S, T):
            if not self.is_independent(base) or base.bit_count() != self.rank:
                raise ValidationError(f"set {base:#x} is not a base")
        left = elements_of(S & ~T)
        right = elements_of(T & ~S)
        adm = {
            i: [j for j in right if self.is_independent((S & ~(1 << i)) | (1 << j))]
            for i in left
        }
        match_of: dict[int, int] = {}  # right element -> left element

        def try_assign(i: int, seen: set[int]) -> bool:
            for j in adm[i]:
                if j in seen:
                    continue
                seen.add(j)
                if j not in match_of or try_assign(match_of[j], seen):
                    match_of[j] = i
                    return True
            return False

        for i in left:
            if not try_assign(i, set()):
                raise AssertionError("exchange bijection must exist for two bases")
        return ExchangeBijection(sorted((i, j) for j, i in match_of.items()))


class UniformMatroid(MatroidOracle):
    kind = "uniform"

    def __init__(self, n: int, r: int):
        super().__init__(n)
        if r < 0:
            raise ValidationError("rank bound must be non-negative")
        self.r = min(r, n)
        self.rank = self.r
        self.min_circuit_size = self.r + 1 if n > self.r else None

    def is_independent(self, mask: int) -> bool:
        check_mask(mask, self.n)
        return mask.bit_count() <= self.r


class PartitionMatroid(MatroidOracle):
    kind = "partition"

    def __init__(self, blocks: Sequence[Sequence[int]], caps: Sequence[int]):
        if len(blocks) != len(caps):
            raise ValidationError("one cap per block required")
        seen = 0
        masks = []
        for block in blocks:
            m = 0
            for v in block:
                m |= 1 << v
            if m & seen:
                raise ValidationError("blocks must be disjoint")
            seen |= m
            masks.append(m)
        n = seen.bit_length()
        if seen != (1 << n) - 1 or n == 0:
            raise ValidationError("blocks must cover the ground set densely")
        super().__init__(n)
        self.block_masks = masks
        self.caps = [int(c) for c in caps]
        if any(c < 0 for c in self.caps):
            raise ValidationError("caps must be non-negative")
        self.rank = sum(min(c, m.bit_count()) for c, m in zip(self.caps, masks))
        overfull = [
            c + 1 for c, m in zip(self.caps, masks) if m.bit_count() > c
        ]
        self.min_circuit_size = min(overfull) if overfull else None

    def is_independent(self, mask: int) -> bool:
        check_mask(mask, self.n)
        return all(
            (mask & m).bit_count() <= c for m, c in zip(self.block_masks, self.caps)
        )


class GraphicMatroid(MatroidOracle):
    """Ground set = edges of a graph; independent sets are forests."""

    kind = "graphic"

    def __init__(self, num_vertices: int, edges: Sequence[tuple[int, int]]):
        super().__init__(len(edges))
        if num_vertices < 1:
            raise ValidationError("graph needs at least one vertex")
        self.num_vertices = num_vertices
        self.edges = []
        for u, v in edges:
            if not (0 <= u < num_vertices and 0 <= v < num_vertices):
                raise ValidationError(f"edge ({u},{v}) references unknown vertex")
            self.edges.append((int(u), int(v)))
        self._finish_init()
        self.min_circuit_size = self._girth()

    def is_independent(self, mask: int) -> bool:
        check_mask(mask, self.n)
        parent = list(range(self.num_vertices))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for e in iter_elements(mask):
            u, v = self.edges[e]
            ru, rv = find(u), find(v)
            if ru == rv:
                return False
            parent[ru] = rv
        return True

    def _girth(self) -> int | None:
        if any(u == v for u, v in self.edges):
            return 1
        pair_count: dict[tuple[int, int], int] = {}
        for u, v in self.edges:
            key = (min(u, v), max(u, v))
            pair_count[key] = pair_count.get(key, 0) + 1
        if any(c > 1 for c in pair_count.values()):
            return 2
        adj: list[list[int]] = [[] for _ in range(self.num_vertices)]
        for u, v in pair_count:
            adj[u].append(v)
            adj[v].append(u)
        best: int | None = None
        # BFS from every root finds some vertex of each shortest cycle
        for root in range(self.num_vertices):
            dist = {root: 0}
            par = {root: -1}
            queue = [root]
            while queue:
                nxt = []
                for u in queue:
                    for v in adj[u]:
                        if v not in dist:
                            dist[v] = dist[u] + 1
                            par[v] = u
                            nxt.append(v)
                        elif v != par[u]:
                            cycle = dist[u] + dist[v] + 1
                            if best is None or cycle < best:
                                best = cycle
                queue = nxt
        return best


@dataclass(frozen=True)
class ExchangeBijection:
    pairs: list[tuple[int, int]]


def generic_min_circuit(M: MatroidOracle) -> int | None:
    """Exponential smallest-dependent-set search; test oracle only."""
    from itertools import combinations

    for size in range(1, M.n + 1):
        for combo in combinations(range(M.n), size):
            m = 0
            for v in combo:
                m |= 1 << v
            if not M.is_independent(m):
                return size
    return None
