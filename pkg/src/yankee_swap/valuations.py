"""Matroid rank valuation oracles.

Every valuation is an immutable, JSON-serializable spec object with an
uncounted ``evaluate`` method. All algorithmic code goes through
:func:`value` / :func:`marginal`, which charge the module-level
:data:`counter` so that oracle query complexity can be measured.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import InstanceError, PreconditionError, QueryLimitExceeded, TooLargeError

MRF_CHECK_LIMIT = 12


class QueryCounter:
    """Counts valuation queries; optionally aborts past ``limit``."""

    def __init__(self, limit: int | None = None):
        self.count = 0
        self.limit = limit

    def reset(self) -> None:
        self.count = 0

    def tick(self) -> None:
        self.count += 1
        if self.limit is not None and self.count > self.limit:
            raise QueryLimitExceeded(f"valuation query limit of {self.limit} exceeded")

    @classmethod
    def from_env(cls, var: str = "YA_QUERY_LIMIT") -> "QueryCounter":
        raw = os.environ.get(var)
        return cls(int(raw) if raw else None)


counter = QueryCounter()


def _frozen(goods: Iterable[int]) -> frozenset[int]:
    return frozenset(int(g) for g in goods)


def _mask(goods: Iterable[int]) -> int:
    mask = 0
    for g in goods:
        mask |= 1 << g
    return mask


@dataclass(frozen=True)
class CappedRelevant:
    """v(S) = min(|S & relevant|, cap)."""

    relevant: frozenset[int]
    cap: int

    type_name = "capped_relevant"
    mrf_by_construction = True

    def __post_init__(self):
        object.__setattr__(self, "relevant", _frozen(self.relevant))
        if self.cap < 0:
            raise InstanceError("cap must be nonnegative")

    def evaluate(self, bundle) -> int:
        return min(len(self.relevant.intersection(bundle)), self.cap)

    def goods(self) -> frozenset[int]:
        return self.relevant

    def to_json(self) -> dict:
        return {"type": self.type_name, "relevant": sorted(self.relevant), "cap": self.cap}


@dataclass(frozen=True)
class Partition:
    """v(S) = sum over categories k of min(|S & C_k|, cap_k)."""

    categories: tuple[frozenset[int], ...]
    caps: tuple[int, ...]
    _category_of: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    type_name = "partition"
    mrf_by_construction = True

    def __post_init__(self):
        cats = tuple(_frozen(c) for c in self.categories)
        caps = tuple(int(c) for c in self.caps)
        if len(cats) != len(caps):
            raise InstanceError("partition needs exactly one cap per category")
        if any(c < 0 for c in caps):
            raise InstanceError("partition caps must be nonnegative")
        category_of = {}
        for k, cat in enumerate(cats):
            for g in cat:
                if g in category_of:
                    raise InstanceError(f"good {g} appears in two partition categories")
                category_of[g] = k
        object.__setattr__(self, "categories", cats)
        object.__setattr__(self, "caps", caps)
        object.__setattr__(self, "_category_of", category_of)

    def evaluate(self, bundle) -> int:
        counts = [0] * len(self.caps)
        for g in bundle:
            k = self._category_of.get(g)
            if k is not None:
                counts[k] += 1
        return sum(min(c, cap) for c, cap in zip(counts, self.caps))

    def goods(self) -> frozenset[int]:
        return frozenset(self._category_of)

    def to_json(self) -> dict:
        return {
            "type": self.type_name,
            "categories": [sorted(c) for c in self.categories],
            "caps": list(self.caps),
        }


@dataclass(frozen=True)
class Transversal:
    """v(S) = size of a maximum matching between S and the slots."""

    slots: int
    edges: frozenset[tuple[int, int]]
    _adj: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    type_name = "transversal"
    mrf_by_construction = True

    def __post_init__(self):
        edges = frozenset((int(g), int(s)) for g, s in self.edges)
        adj: dict[int, list[int]] = {}
        for g, s in sorted(edges):
            if not 0 <= s < self.slots:
                raise InstanceError(f"transversal slot {s} out of range [0, {self.slots})")
            adj.setdefault(g, []).append(s)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "_adj", adj)

    def evaluate(self, bundle) -> int:
        # Kuhn's augmenting-path matching; bundles are tiny relative to cost of a query.
        match_of_slot: dict[int, int] = {}

        def try_assign(g, seen):
            for s in self._adj.get(g, ()):
                if s in seen:
                    continue
                seen.add(s)
                if s not in match_of_slot or try_assign(match_of_slot[s], seen):
                    match_of_slot[s] = g
                    return True
            return False

        size = 0
        for g in sorted(bundle):
            if g in self._adj and try_assign(g, set()):
                size += 1
        return size

    def goods(self) -> frozenset[int]:
        return frozenset(self._adj)

    def to_json(self) -> dict:
        return {
            "type": self.type_name,
            "slots": self.slots,
            "edges": [list(e) for e in sorted(self.edges)],
        }


@dataclass(frozen=True)
class Graphic:
    """v(S) = size of a spanning forest of the edges labelled by S."""

    vertices: int
    edge_of: tuple[tuple[int, int, int], ...]  # (good, u, v)
    _ends: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    type_name = "graphic"
    mrf_by_construction = True

    def __post_init__(self):
        if isinstance(self.edge_of, dict):
            items = [(g, uv[0], uv[1]) for g, uv in self.edge_of.items()]
        else:
            items = list(self.edge_of)
        triples = tuple(sorted((int(g), int(a), int(b)) for g, a, b in items))
        ends = {}
        for g, a, b in triples:
            if g in ends:
                raise InstanceError(f"good {g} labels two graph edges")
            if not (0 <= a < self.vertices and 0 <= b < self.vertices):
                raise InstanceError(f"edge of good {g} uses a vertex outside [0, {self.vertices})")
            ends[g] = (a, b)
        object.__setattr__(self, "edge_of", triples)
        object.__setattr__(self, "_ends", ends)

    def evaluate(self, bundle) -> int:
        parent = {}

        def find(x):
            root = x
            while parent.get(root, root) != root:
                root = parent[root]
            while parent.get(x, x) != root:
                parent[x], x = root, parent[x]
            return root

        rank = 0
        for g in bundle:
            ends = self._ends.get(g)
            if ends is None:
                continue
            ra, rb = find(ends[0]), find(ends[1])
            if ra != rb:
                parent[ra] = rb
                rank += 1
        return rank

    def goods(self) -> frozenset[int]:
        return frozenset(self._ends)

    def to_json(self) -> dict:
        return {
            "type": self.type_name,
            "vertices": self.vertices,
            "edge_of": [[g, a, b] for g, a, b in self.edge_of],
        }


@dataclass(frozen=True)
class ExplicitTable:
    """A full value table over the ground set ``range(m)``, indexed by bitmask."""

    m: int
    values: tuple[int, ...]

    type_name = "explicit"
    mrf_by_construction = False

    def __post_init__(self):
        if self.m > MRF_CHECK_LIMIT:
            raise InstanceError(f"explicit tables are limited to m <= {MRF_CHECK_LIMIT}")
        values = tuple(int(v) for v in self.values)
        if len(values) != 1 << self.m:
            raise InstanceError(f"explicit table needs {1 << self.m} entries, got {len(values)}")
        if any(v < 0 for v in values):
            raise InstanceError("explicit table values must be nonnegative")
        object.__setattr__(self, "values", values)

    @classmethod
    def from_function(cls, m: int, fn) -> "ExplicitTable":
        return cls(m, tuple(fn(frozenset(g for g in range(m) if mask >> g & 1)) for mask in range(1 << m)))

    def evaluate(self, bundle) -> int:
        return self.values[_mask(bundle)]

    def goods(self) -> frozenset[int]:
        return frozenset(range(self.m))

    def to_json(self) -> dict:
        rows = []
        for mask, v in enumerate(self.values):
            rows.append([[g for g in range(self.m) if mask >> g & 1], v])
        return {"type": self.type_name, "m": self.m, "values": rows}


ValuationSpec = CappedRelevant | Partition | Transversal | Graphic | ExplicitTable

ZERO = CappedRelevant(frozenset(), 0)


class _Pool:
    """The pool pseudo-agent, v(S) = |S|; never charged to the counter."""

    type_name = "pool"

    def evaluate(self, bundle) -> int:
        return len(bundle)


POOL = _Pool()


def _check_goods(spec, goods, m):
    bound = spec.m if isinstance(spec, ExplicitTable) else m
    for g in goods:
        if g < 0 or (bound is not None and g >= bound):
            raise InstanceError(f"good id {g} out of range")


def value(spec, bundle, m: int | None = None) -> int:
    """Counted valuation query v(bundle)."""
    _check_goods(spec, bundle, m)
    if spec is not POOL:
        counter.tick()
    return spec.evaluate(bundle)


def marginal(spec, bundle, g: int, m: int | None = None) -> int:
    """v(bundle + g) - v(bundle), charged as two queries."""
    if g in bundle:
        raise PreconditionError(f"good {g} is already in the bundle")
    bundle = frozenset(bundle)
    return value(spec, bundle | {g}, m) - value(spec, bundle, m)


def table(spec, m: int) -> np.ndarray:
    """Uncounted value table over all 2^m bundles, indexed by bitmask."""
    if isinstance(spec, ExplicitTable) and spec.m == m:
        return np.asarray(spec.values, dtype=np.int64)
    out = np.empty(1 << m, dtype=np.int64)
    for mask in range(1 << m):
        out[mask] = spec.evaluate([g for g in range(m) if mask >> g & 1])
    return out


@dataclass(frozen=True)
class Violation:
    kind: str
    witness: tuple = ()
    detail: str = ""

    def to_json(self) -> dict:
        return {"kind": self.kind, "witness": _jsonable(self.witness), "detail": self.detail}


def _jsonable(x):
    if isinstance(x, (frozenset, set)):
        return sorted(x)
    if isinstance(x, (tuple, list)):
        return [_jsonable(v) for v in x]
    return x


def _goods_of(mask: int) -> frozenset[int]:
    return frozenset(g for g in range(mask.bit_length()) if mask >> g & 1)


def check_mrf(spec, m: int, limit: int = MRF_CHECK_LIMIT) -> Violation | None:
    """Exhaustively check the three matroid-rank axioms on ground set ``range(m)``.

    Returns ``None`` when the valuation is a matroid rank function, otherwise the
    first violation found. Submodularity is checked in its local form
    Δ(S, g) >= Δ(S + h, g), which is equivalent to the global one.
    """
    if m > limit:
        raise TooLargeError(f"ground set of {m} goods exceeds the brute-force limit of {limit}")
    if isinstance(spec, ExplicitTable) and spec.m != m:
        return Violation("ground-set-mismatch", (), f"table covers {spec.m} goods, instance has {m}")
    v = table(spec, m)
    if v[0] != 0:
        return Violation("empty-set", (frozenset(),), f"v(empty) = {v[0]}")
    masks = np.arange(1 << m)
    delta = {}
    for g in range(m):
        bit = 1 << g
        base = masks[(masks & bit) == 0]
        d = v[base | bit] - v[base]
        bad = np.flatnonzero((d != 0) & (d != 1))
        if bad.size:
            s = int(base[bad[0]])
            return Violation("marginal-not-binary", (_goods_of(s), g), f"marginal = {int(d[bad[0]])}")
        full = np.zeros(1 << m, dtype=np.int64)
        full[base] = d
        delta[g] = (base, full)
    for g in range(m):
        base, d = delta[g]
        for h in range(m):
            if h == g:
                continue
            hb = 1 << h
            s = base[(base & hb) == 0]
            bad = np.flatnonzero(d[s] < d[s | hb])
            if bad.size:
                smask = int(s[bad[0]])
                return Violation(
                    "not-submodular",
                    (_goods_of(smask), _goods_of(smask | hb), g),
                    "marginal increases on a superset",
                )
    return None


def zero_out_if_invalid(spec, m: int, limit: int = MRF_CHECK_LIMIT):
    """Replace a non-MRF report by the all-zero valuation."""
    if getattr(spec, "mrf_by_construction", False):
        return spec
    if check_mrf(spec, m, limit) is None:
        return spec
    return ZERO


def f_T(T) -> CappedRelevant:
    T = _frozen(T)
    return CappedRelevant(T, len(T))


def spec_from_json(data: dict):
    """Decode the ``{"type": ...}`` encoding; raises InstanceError on bad input."""
    if not isinstance(data, dict):
        raise InstanceError("valuation must be a JSON object")
    kind = data.get("type")
    fields = {
        "capped_relevant": {"relevant", "cap"},
        "partition": {"categories", "caps"},
        "transversal": {"slots", "edges"},
        "graphic": {"vertices", "edge_of"},
        "explicit": {"m", "values"},
    }
    if kind not in fields:
        raise InstanceError(f"unknown valuation type {kind!r}")
    extra = set(data) - fields[kind] - {"type"}
    missing = fields[kind] - set(data)
    if extra:
        raise InstanceError(f"unknown field(s) {sorted(extra)} for {kind} valuation")
    if missing:
        raise InstanceError(f"missing field(s) {sorted(missing)} for {kind} valuation")
    try:
        if kind == "capped_relevant":
            return CappedRelevant(frozenset(data["relevant"]), int(data["cap"]))
        if kind == "partition":
            return Partition(tuple(frozenset(c) for c in data["categories"]), tuple(data["caps"]))
        if kind == "transversal":
            return Transversal(int(data["slots"]), frozenset(tuple(e) for e in data["edges"]))
        if kind == "graphic":
            return Graphic(int(data["vertices"]), tuple(tuple(t) for t in data["edge_of"]))
        m = int(data["m"])
        vals = [None] * (1 << m)
        for goods, v in data["values"]:
            mask = _mask(goods)
            if mask >= len(vals):
                raise InstanceError(f"explicit table bundle {goods} outside ground set")
            vals[mask] = v
        if any(v is None for v in vals):
            raise InstanceError("explicit table must list every bundle")
        return ExplicitTable(m, tuple(vals))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InstanceError):
            raise
        raise InstanceError(f"malformed {kind} valuation: {exc}") from exc
