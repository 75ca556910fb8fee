"""Exchange-graph machinery for non-redundant allocations.

The graph is never materialized on the hot path: outgoing edges are found by
binary search over candidate goods (:func:`find_desired`) inside a BFS
(:func:`get_distances`). :func:`build_explicit_graph` is the quadratic
reference used by tests and the naive benchmark baseline.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .errors import InvariantError, PreconditionError
from .valuations import POOL, value

POOL_OWNER = -1
SOURCE = -1


class Allocation:
    """Agent bundles, the pool of unassigned goods, and the inverse map."""

    def __init__(self, m: int, n: int):
        self.m = m
        self.bundles: list[set[int]] = [set() for _ in range(n)]
        self.pool: set[int] = set(range(m))
        self.owner: list[int] = [POOL_OWNER] * m

    @property
    def n(self) -> int:
        return len(self.bundles)

    @classmethod
    def from_bundles(cls, m: int, bundles) -> "Allocation":
        alloc = cls(m, len(bundles))
        for i, bundle in enumerate(bundles):
            for g in bundle:
                alloc.move(g, i)
        alloc.check_partition()
        return alloc

    def copy(self) -> "Allocation":
        other = Allocation.__new__(Allocation)
        other.m = self.m
        other.bundles = [set(b) for b in self.bundles]
        other.pool = set(self.pool)
        other.owner = list(self.owner)
        return other

    def bundle(self, owner: int) -> set[int]:
        return self.pool if owner == POOL_OWNER else self.bundles[owner]

    def move(self, g: int, new_owner: int) -> None:
        self.bundle(self.owner[g]).discard(g)
        self.bundle(new_owner).add(g)
        self.owner[g] = new_owner

    def sizes(self) -> tuple[int, ...]:
        return tuple(len(b) for b in self.bundles)

    def check_partition(self) -> None:
        seen = set()
        for owner in [POOL_OWNER, *range(self.n)]:
            for g in self.bundle(owner):
                if g in seen or self.owner[g] != owner:
                    raise InvariantError(f"good {g} has inconsistent ownership")
                seen.add(g)
        if seen != set(range(self.m)):
            raise InvariantError("bundles do not partition the goods")

    def is_non_redundant(self, specs) -> bool:
        return all(spec.evaluate(b) == len(b) for spec, b in zip(specs, self.bundles))

    def __eq__(self, other):
        return isinstance(other, Allocation) and self.m == other.m and self.bundles == other.bundles

    def __repr__(self):
        return f"Allocation(pool={sorted(self.pool)}, bundles={[sorted(b) for b in self.bundles]})"

    def to_json(self) -> dict:
        return {"pool": sorted(self.pool), "bundles": [sorted(b) for b in self.bundles]}

    @classmethod
    def from_json(cls, m: int, data: dict) -> "Allocation":
        return cls.from_bundles(m, [set(b) for b in data["bundles"]])


@dataclass
class DistanceMap:
    dist: list  # int or None (unreachable)
    prev: list  # good id, SOURCE, or None

    def path_to(self, g: int) -> list[int]:
        path = [g]
        while self.prev[path[-1]] != SOURCE:
            path.append(self.prev[path[-1]])
        path.reverse()
        return path


def find_desired(spec, bundle, candidates) -> int | None:
    """Return a good in ``candidates`` with marginal 1 on ``bundle``, or None.

    ``candidates`` must be sorted by index. The lower half is searched first,
    so the least-index desired good is returned.
    """
    if not candidates:
        return None
    bundle = frozenset(bundle)
    base = value(spec, bundle)
    if value(spec, bundle.union(candidates)) == base:
        return None
    lo, hi = 0, len(candidates)
    while hi - lo > 1:
        mid = lo + (hi - lo + 1) // 2
        if value(spec, bundle.union(candidates[lo:mid])) > base:
            hi = mid
        else:
            lo = mid
    return candidates[lo]


def _owner_view(alloc: Allocation, specs, g: int):
    j = alloc.owner[g]
    if j == POOL_OWNER:
        return POOL, alloc.pool
    return specs[j], alloc.bundles[j]


def _require_non_redundant(alloc, specs):
    if not alloc.is_non_redundant(specs):
        raise PreconditionError("allocation is redundant")


def get_distances(alloc: Allocation, i: int, specs, early_exit: bool = False) -> DistanceMap:
    """BFS distances from the virtual source (edges to F_i(X)) to every good.

    A good leaves the candidate set the first time it is discovered, so each
    good enters the frontier at most once. With ``early_exit`` the search
    stops as soon as every good at the nearest pool distance is known.
    """
    _require_non_redundant(alloc, specs)
    m = alloc.m
    dist: list = [None] * m
    prev: list = [None] * m
    candidates = list(range(m))
    queue: deque[int] = deque()

    pool_layer = None

    def expand(spec, bundle, parent, d):
        nonlocal pool_layer
        while (b := find_desired(spec, bundle, candidates)) is not None:
            dist[b] = d
            prev[b] = parent
            queue.append(b)
            candidates.remove(b)
            if pool_layer is None and alloc.owner[b] == POOL_OWNER:
                pool_layer = d

    expand(specs[i], alloc.bundles[i], SOURCE, 1)
    while queue:
        a = queue.popleft()
        if early_exit and pool_layer is not None and dist[a] >= pool_layer:
            break
        spec, bundle = _owner_view(alloc, specs, a)
        expand(spec, bundle - {a}, a, dist[a] + 1)
    return DistanceMap(dist, prev)


def shortest_path_to_pool(alloc: Allocation, i: int, specs, early_exit: bool = False) -> list[int] | None:
    dm = get_distances(alloc, i, specs, early_exit=early_exit)
    return _pick_pool_path(alloc, dm)


def _pick_pool_path(alloc, dm):
    reachable = [(dm.dist[g], g) for g in alloc.pool if dm.dist[g] is not None]
    if not reachable:
        return None
    return dm.path_to(min(reachable)[1])


def augment(alloc: Allocation, i: int, path) -> Allocation:
    """Transfer goods along ``path`` in place; ``path[0]`` goes to agent ``i``."""
    if not path or len(set(path)) != len(path):
        raise InvariantError(f"augmenting path {path} is empty or repeats a good")
    if alloc.owner[path[-1]] != POOL_OWNER:
        raise InvariantError(f"augmenting path {path} does not end in the pool")
    if alloc.owner[path[0]] == i:
        raise InvariantError(f"agent {i} already owns the first good of {path}")
    previous = [alloc.owner[g] for g in path]
    for k in range(len(path) - 1, 0, -1):
        alloc.move(path[k], previous[k - 1])
    alloc.move(path[0], i)
    return alloc


def build_explicit_graph(alloc: Allocation, specs, i: int | None = None):
    """Full exchange graph, edges g -> g' with one counted query per pair.

    Returns ``(adjacency, sources)``; ``sources`` is F_i(X) when ``i`` is given.
    """
    m = alloc.m
    adjacency: dict[int, list[int]] = {g: [] for g in range(m)}
    base = {}
    for g in range(m):
        j = alloc.owner[g]
        spec, bundle = _owner_view(alloc, specs, g)
        if j not in base:
            base[j] = value(spec, frozenset(bundle))
        rest = frozenset(bundle - {g})
        for h in range(m):
            if h in bundle:
                continue
            if value(spec, rest | {h}) == base[j]:
                adjacency[g].append(h)
    sources = []
    if i is not None:
        own = frozenset(alloc.bundles[i])
        have = value(specs[i], own)
        sources = [g for g in range(m) if g not in own and value(specs[i], own | {g}) == have + 1]
    return adjacency, sources


def bfs_explicit(adjacency, sources, m: int) -> DistanceMap:
    dist: list = [None] * m
    prev: list = [None] * m
    queue = deque()
    for g in sources:
        dist[g], prev[g] = 1, SOURCE
        queue.append(g)
    while queue:
        a = queue.popleft()
        for b in adjacency[a]:
            if dist[b] is None:
                dist[b], prev[b] = dist[a] + 1, a
                queue.append(b)
    return DistanceMap(dist, prev)


def shortest_path_explicit(alloc: Allocation, i: int, specs) -> list[int] | None:
    """Naive baseline: build the whole graph, then BFS."""
    adjacency, sources = build_explicit_graph(alloc, specs, i)
    return _pick_pool_path(alloc, bfs_explicit(adjacency, sources, alloc.m))
