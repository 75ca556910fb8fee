"""Seeded random instance generators used by tests, the fuzzer and the benchmark."""

from __future__ import annotations

import random
from fractions import Fraction

from .engine import Agent, Instance
from .valuations import CappedRelevant, ExplicitTable, Graphic, Partition, Transversal

FAMILIES = ("capped_relevant", "partition", "transversal", "graphic", "explicit")
WEIGHTS = (Fraction(1, 2), Fraction(1), Fraction(2), Fraction(3), Fraction(8))
SHARES = (Fraction(0), Fraction(1, 2), Fraction(1), Fraction(2))


def _subset(rng: random.Random, goods, prob: float) -> frozenset[int]:
    return frozenset(g for g in goods if rng.random() < prob)


def random_spec(rng: random.Random, m: int, family: str):
    goods = range(m)
    if family == "capped_relevant":
        relevant = _subset(rng, goods, 0.6)
        return CappedRelevant(relevant, rng.randint(min(1, len(relevant)), max(len(relevant), 1)))
    if family == "partition":
        k = rng.randint(1, 3)
        labels = {g: rng.randrange(k + 1) for g in goods}  # label k means irrelevant
        cats = tuple(frozenset(g for g in goods if labels[g] == c) for c in range(k))
        return Partition(cats, tuple(rng.randint(0, 2) for _ in range(k)))
    if family == "transversal":
        slots = rng.randint(1, 3)
        edges = frozenset((g, s) for g in goods for s in range(slots) if rng.random() < 0.5)
        return Transversal(slots, edges)
    if family == "graphic":
        vertices = rng.randint(2, 4)
        triples = []
        for g in goods:
            if rng.random() < 0.85:
                triples.append((g, rng.randrange(vertices), rng.randrange(vertices)))
        return Graphic(vertices, tuple(triples))
    if family == "explicit":
        base = random_spec(rng, m, rng.choice(FAMILIES[:-1]))
        return ExplicitTable.from_function(m, base.evaluate)
    raise ValueError(f"unknown family {family!r}")


def random_instance(
    rng: random.Random,
    n_max: int = 4,
    m_max: int = 6,
    families=FAMILIES,
    weights=WEIGHTS,
    n_min: int = 1,
    m_min: int = 0,
) -> Instance:
    n = rng.randint(n_min, n_max)
    m = rng.randint(m_min, m_max)
    ranks = list(range(1, n + 1))
    rng.shuffle(ranks)
    agents = tuple(
        Agent(
            valuation=random_spec(rng, m, rng.choice(families)),
            weight=rng.choice(weights),
            priority=ranks[i],
            fair_share=rng.choice(SHARES),
        )
        for i in range(n)
    )
    return Instance(m, agents)


def small_corpus(count: int, seed: int = 0, **kwargs) -> list[Instance]:
    rng = random.Random(seed)
    return [random_instance(rng, **kwargs) for _ in range(count)]


def partition_instance(rng: random.Random, n: int, m: int) -> Instance:
    """Benchmark instance: each agent has a random partition valuation over all goods."""
    agents = []
    for _ in range(n):
        k = rng.randint(2, 6)
        labels = [rng.randrange(k) for _ in range(m)]
        cats = tuple(frozenset(g for g in range(m) if labels[g] == c) for c in range(k))
        caps = tuple(rng.randint(1, max(1, len(c) // 2)) for c in cats)
        agents.append(Agent(Partition(cats, caps)))
    return Instance(m, tuple(agents))
