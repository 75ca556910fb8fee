"""Shared generators for the test suite."""

from __future__ import annotations

import random
from fractions import Fraction

from yankee_swap.corpus import FAMILIES, random_instance, random_spec
from yankee_swap.criteria import FairShare, Harmonic, Leximin, Lorenz, Nash, PMean
from yankee_swap.engine import Agent, Instance
from yankee_swap.exchange import Allocation
from yankee_swap.valuations import CappedRelevant

P_GRID = (Fraction(1), Fraction(1, 2), Fraction(-1), Fraction(-2))


def unit_agents(m, weights):
    return Instance(m, tuple(Agent(CappedRelevant(frozenset(range(m)), m), Fraction(w)) for w in weights))


def capped_instance():
    spec = CappedRelevant(frozenset(range(4)), 2)
    return Instance(4, (Agent(spec, Fraction(10)), Agent(spec, Fraction(1))))


def all_criteria(inst):
    """Every criterion the engine supports, configured for ``inst``."""
    shares = inst.shares or tuple(Fraction(1) for _ in range(inst.n))
    return [Lorenz(inst.priorities), Leximin(), FairShare(shares), Nash(), Harmonic()] + [PMean(p) for p in P_GRID]


def random_nonredundant(rng: random.Random, inst: Instance) -> Allocation:
    """A random non-redundant allocation: goods go to a random owner when they add value."""
    alloc = Allocation(inst.m, inst.n)
    goods = list(range(inst.m))
    rng.shuffle(goods)
    for g in goods:
        i = rng.randrange(inst.n + 1)
        if i == inst.n:
            continue
        b = alloc.bundles[i]
        if inst.specs[i].evaluate(b | {g}) == len(b) + 1:
            alloc.move(g, i)
    return alloc


__all__ = [
    "FAMILIES",
    "P_GRID",
    "all_criteria",
    "capped_instance",
    "random_instance",
    "random_nonredundant",
    "random_spec",
    "unit_agents",
]
