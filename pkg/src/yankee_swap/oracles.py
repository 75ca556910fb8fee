"""Brute-force ground truth for small instances and fairness-property checkers."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .criteria import Criterion, psi_compare
from .engine import Instance, RunResult, resolve_criterion
from .errors import TooLargeError
from .exchange import Allocation
from .valuations import Violation, table

ENUMERATION_LIMIT = 10**6


@dataclass(frozen=True)
class OptResult:
    best_utilities: tuple[int, ...]
    best_count: int
    witness: Allocation


def _digits(k: int, m: int) -> np.ndarray:
    """Every assignment of m goods to k owners, one row per assignment."""
    idx = np.arange(k**m, dtype=np.int64)
    return (idx[:, None] // (k ** np.arange(m, dtype=np.int64))) % k


def _utilities_of(digits, tables, m):
    bits = np.int64(1) << np.arange(m, dtype=np.int64)
    cols = []
    for a, t in enumerate(tables):
        masks = ((digits == a) * bits).sum(axis=1)
        cols.append(t[masks])
    return np.stack(cols, axis=1) if cols else np.zeros((len(digits), 0), dtype=np.int64)


@lru_cache(maxsize=16)
def _enumeration(inst: Instance, limit: int):
    n, m = inst.n, inst.m
    if (n + 1) ** m > limit:
        raise TooLargeError(f"(n+1)^m = {(n + 1) ** m} assignments exceeds the enumeration limit of {limit}")
    tables = [table(spec, m) for spec in inst.specs]
    digits = _digits(n + 1, m)  # owner n stands for the pool
    utils = _utilities_of(digits, tables, m)
    vectors = {tuple(int(x) for x in row) for row in np.unique(utils, axis=0)}
    return digits, utils, frozenset(vectors)


def enumerate_utilities(inst: Instance, limit: int = ENUMERATION_LIMIT) -> set[tuple[int, ...]]:
    """All utility vectors reachable by some assignment of goods to agents or the pool."""
    return set(_enumeration(inst, limit)[2])


def _witness(inst: Instance, digits, utils, target) -> Allocation:
    row = int(np.flatnonzero((utils == np.asarray(target)).all(axis=1))[0])
    alloc = Allocation(inst.m, inst.n)
    for i, spec in enumerate(inst.specs):
        kept: set[int] = set()
        for g in np.flatnonzero(digits[row] == i):
            if spec.evaluate(kept | {int(g)}) == len(kept) + 1:
                kept.add(int(g))
        for g in kept:
            alloc.move(g, i)
    return alloc


def brute_force_optimum(inst: Instance, c: Criterion, limit: int = ENUMERATION_LIMIT) -> OptResult:
    """Order-maximal utility vector; ties broken toward the lexicographically largest."""
    c = resolve_criterion(c, inst)
    digits, utils, vectors = _enumeration(inst, limit)
    weights = inst.weights
    best = None
    maximizers: list[tuple[int, ...]] = []
    for u in sorted(vectors):
        if best is None:
            best, maximizers = u, [u]
            continue
        order = psi_compare(c, u, best, weights)
        if order > 0:
            best, maximizers = u, [u]
        elif order == 0:
            maximizers.append(u)
    top = max(maximizers)
    return OptResult(top, len(maximizers), _witness(inst, digits, utils, top))


def max_usw(inst: Instance, limit: int = ENUMERATION_LIMIT) -> int:
    return max(sum(u) for u in _enumeration(inst, limit)[2])


def compute_mms(inst: Instance, i: int, limit: int = ENUMERATION_LIMIT) -> int:
    """Maximin share of agent ``i``: best worst bundle over partitions into n bundles."""
    n, m = inst.n, inst.m
    if n**m > limit:
        raise TooLargeError(
            f"n^m = {n**m} partitions exceeds the enumeration limit of {limit}; supply shares explicitly"
        )
    t = table(inst.specs[i], m)
    if m == 0:
        return 0
    digits = _digits(n, m)
    per_bundle = _utilities_of(digits, [t] * n, m)
    return int(per_bundle.min(axis=1).max())


def _allocation(x) -> Allocation:
    return x.allocation if isinstance(x, RunResult) else x


def check_mms_satisfaction(result, shares) -> Violation | None:
    utilities = _allocation(result).sizes() if not isinstance(result, RunResult) else result.utilities
    for i, (u, s) in enumerate(zip(utilities, shares)):
        if u < s:
            return Violation("mms", (i,), f"agent {i} has utility {u} below share {s}")
    return None


def check_efx(inst: Instance, result) -> Violation | None:
    """No agent envies another's bundle with any single good removed."""
    alloc = _allocation(result)
    for i, spec in enumerate(inst.specs):
        mine = spec.evaluate(alloc.bundles[i])
        for j, other in enumerate(alloc.bundles):
            if i == j:
                continue
            for g in sorted(other):
                if spec.evaluate(other - {g}) > mine:
                    return Violation("efx", (i, j, g), f"agent {i} envies agent {j} even without good {g}")
    return None


def check_wef1(inst: Instance, result) -> Violation | None:
    """Weighted EF1: some good of j can be dropped so i stops envying by weighted value."""
    alloc = _allocation(result)
    weights = inst.weights
    for i, spec in enumerate(inst.specs):
        mine = Fraction(spec.evaluate(alloc.bundles[i])) / weights[i]
        for j, other in enumerate(alloc.bundles):
            if i == j or not other:
                continue
            if not any(mine >= Fraction(spec.evaluate(other - {g})) / weights[j] for g in other):
                return Violation("wef1", (i, j), f"agent {i} weighted-envies agent {j} after dropping any good")
    return None
