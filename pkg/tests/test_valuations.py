import itertools
import random

import pytest

from yankee_swap.errors import InstanceError, PreconditionError, QueryLimitExceeded, TooLargeError
from yankee_swap.valuations import (
    POOL,
    ZERO,
    CappedRelevant,
    ExplicitTable,
    Graphic,
    Partition,
    QueryCounter,
    Transversal,
    check_mrf,
    counter,
    f_T,
    marginal,
    spec_from_json,
    table,
    value,
    zero_out_if_invalid,
)

from helpers import FAMILIES, random_spec


def subsets(m):
    for r in range(m + 1):
        yield from itertools.combinations(range(m), r)


def test_capped_relevant_examples():
    v = CappedRelevant(frozenset({0, 1, 2}), 2)
    assert v.evaluate({0, 1, 2, 3}) == 2
    assert v.evaluate({3}) == 0
    assert v.evaluate({1}) == 1


def test_partition_examples():
    v = Partition((frozenset({0, 1}), frozenset({2, 3, 4})), (1, 2))
    assert v.evaluate({0, 1}) == 1
    assert v.evaluate({0, 2, 3, 4}) == 3


def test_transversal_matching():
    # goods 0 and 1 both only fit slot 0
    v = Transversal(2, frozenset({(0, 0), (1, 0), (2, 1)}))
    assert v.evaluate({0, 1}) == 1
    assert v.evaluate({0, 1, 2}) == 2
    # augmenting path needed: 0 can use either slot, 1 only slot 0
    w = Transversal(2, frozenset({(0, 0), (0, 1), (1, 0)}))
    assert w.evaluate({0, 1}) == 2


def test_graphic_forest_rank():
    # triangle on vertices 0,1,2 plus a self loop
    v = Graphic(3, ((0, 0, 1), (1, 1, 2), (2, 0, 2), (3, 1, 1)))
    assert v.evaluate({0, 1, 2}) == 2
    assert v.evaluate({3}) == 0
    assert v.evaluate({0, 2}) == 2


def test_f_T_is_indicator_rank():
    v = f_T({1, 3})
    assert v.evaluate({0, 1, 2, 3}) == 2
    assert v.evaluate({0, 2}) == 0


@pytest.mark.parametrize("family", FAMILIES)
def test_families_are_rank_functions(family):
    rng = random.Random(hash(family) % 1000)
    for _ in range(25):
        m = rng.randint(0, 8)
        spec = random_spec(rng, m, family)
        assert check_mrf(spec, m) is None, spec


def test_exhaustive_axioms_small_tables():
    rng = random.Random(3)
    for _ in range(40):
        m = rng.randint(0, 6)
        spec = random_spec(rng, m, rng.choice(FAMILIES))
        for S in subsets(m):
            s = frozenset(S)
            for g in set(range(m)) - s:
                d = spec.evaluate(s | {g}) - spec.evaluate(s)
                assert d in (0, 1)
                for h in set(range(m)) - s - {g}:
                    assert spec.evaluate(s | {h, g}) - spec.evaluate(s | {h}) <= d


def test_check_mrf_detects_each_axiom():
    assert check_mrf(ExplicitTable(1, (1, 1)), 1).kind == "empty-set"
    assert check_mrf(ExplicitTable(1, (0, 2)), 1).kind == "marginal-not-binary"
    # v({0,1}) = 2 but singletons are 0: marginals grow
    assert check_mrf(ExplicitTable(2, (0, 0, 0, 1)), 2).kind == "not-submodular"
    assert check_mrf(ExplicitTable(2, (0, 1, 1, 1)), 3).kind == "ground-set-mismatch"
    with pytest.raises(TooLargeError):
        check_mrf(CappedRelevant(frozenset(), 0), 13)


def test_zero_out_replaces_only_invalid_reports():
    bad = ExplicitTable(2, (0, 0, 0, 1))
    good = ExplicitTable.from_function(2, lambda S: min(len(S), 1))
    assert zero_out_if_invalid(bad, 2) == ZERO
    assert zero_out_if_invalid(good, 2) is good


def test_value_and_marginal_counting():
    counter.reset()
    v = CappedRelevant(frozenset({0, 1}), 1)
    assert value(v, {0}) == 1
    assert counter.count == 1
    assert marginal(v, {0}, 1) == 0
    assert counter.count == 3
    with pytest.raises(PreconditionError):
        marginal(v, {0}, 0)
    value(POOL, {0, 1, 2})
    assert counter.count == 3  # the pool is free


def test_out_of_range_goods_rejected():
    with pytest.raises(InstanceError):
        value(CappedRelevant(frozenset({0}), 1), {5}, m=3)
    with pytest.raises(InstanceError):
        value(CappedRelevant(frozenset({0}), 1), {-1})


def test_query_limit_aborts():
    c = QueryCounter(limit=2)
    c.tick()
    c.tick()
    with pytest.raises(QueryLimitExceeded):
        c.tick()


def test_query_limit_from_environment(monkeypatch):
    monkeypatch.setenv("YA_QUERY_LIMIT", "17")
    assert QueryCounter.from_env().limit == 17
    monkeypatch.delenv("YA_QUERY_LIMIT")
    assert QueryCounter.from_env().limit is None


def test_counter_is_deterministic_across_repeats():
    spec = Partition((frozenset({0, 1, 2}), frozenset({3, 4})), (2, 1))
    counts = []
    for _ in range(2):
        counter.reset()
        for S in subsets(5):
            value(spec, S)
        counts.append(counter.count)
    assert counts[0] == counts[1] == 32


def test_table_matches_evaluate():
    rng = random.Random(11)
    spec = random_spec(rng, 5, "transversal")
    t = table(spec, 5)
    for mask in range(32):
        assert t[mask] == spec.evaluate({g for g in range(5) if mask >> g & 1})


@pytest.mark.parametrize("family", FAMILIES)
def test_json_round_trip(family):
    rng = random.Random(5)
    for _ in range(10):
        m = rng.randint(0, 6)
        spec = random_spec(rng, m, family)
        back = spec_from_json(spec.to_json())
        assert table(back, m).tolist() == table(spec, m).tolist()
        assert back.to_json() == spec.to_json()


def test_spec_from_json_rejects_bad_documents():
    with pytest.raises(InstanceError, match="unknown valuation type"):
        spec_from_json({"type": "additive"})
    with pytest.raises(InstanceError, match="unknown field"):
        spec_from_json({"type": "capped_relevant", "relevant": [], "cap": 0, "extra": 1})
    with pytest.raises(InstanceError, match="missing"):
        spec_from_json({"type": "partition", "categories": []})
    with pytest.raises(InstanceError, match="every bundle"):
        spec_from_json({"type": "explicit", "m": 1, "values": [[[], 0]]})
    with pytest.raises(InstanceError):
        ExplicitTable(13, (0,) * (1 << 13))


def test_documented_value_examples():
    assert CappedRelevant(frozenset({0, 1}), 2).evaluate(set()) == 0
    assert CappedRelevant(frozenset(range(4)), 2).evaluate({0, 1, 2}) == 2
    assert Transversal(2, frozenset({(0, 0), (1, 0)})).evaluate({0, 1}) == 1
    assert marginal(CappedRelevant(frozenset({1}), 1), set(), 1) == 1
    assert marginal(Partition((frozenset({0, 1}),), (1,)), {0}, 1) == 0
    assert f_T({1, 3}).evaluate({1, 2}) == 1
    assert f_T(set()).evaluate({0, 1, 2}) == 0


def test_squared_size_table_is_not_binary():
    squared = ExplicitTable.from_function(2, lambda S: len(S) ** 2)
    v = check_mrf(squared, 2)
    assert v.kind == "marginal-not-binary"


def test_zero_out_is_idempotent_on_zero():
    assert zero_out_if_invalid(ZERO, 4) == ZERO
    p = Partition((frozenset({0, 1}),), (1,))
    assert zero_out_if_invalid(p, 3) is p


def test_f_T_always_passes_rank_check():
    for T in subsets(5):
        assert check_mrf(f_T(T), 5) is None
