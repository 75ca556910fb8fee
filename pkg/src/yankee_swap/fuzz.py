"""Randomized strategyproofness testing of the allocation mechanism.

Each trial lets one agent misreport and checks three properties against the
truthful outcome:

* ``utility-improved``: the true value of the manipulated bundle exceeds the
  truthful utility;
* ``faithfulness``: reporting f_T for T inside the truthful bundle must yield
  exactly T;
* ``monotonicity``: a report that pointwise dominates the true valuation must
  not yield a smaller bundle.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .criteria import Criterion, FairShare, Harmonic, Leximin, Lorenz, Nash, PMean
from .engine import Instance, RunResult, run_mechanism
from .valuations import (
    CappedRelevant,
    ExplicitTable,
    Graphic,
    Partition,
    Transversal,
    f_T,
    table,
    zero_out_if_invalid,
)

_CRITERIA = (Lorenz, Leximin, FairShare, Nash, PMean, Harmonic)
KINDS = ("truthful", "f_T", "cap_reduction", "relevant_set_edit", "random_table")


@dataclass(frozen=True)
class Manipulation:
    agent: int
    reported: object
    kind: str
    target: frozenset | None = None  # T for faithful f_T reports

    def to_json(self) -> dict:
        out = {"agent": self.agent, "kind": self.kind, "reported": self.reported.to_json()}
        if self.target is not None:
            out["target"] = sorted(self.target)
        return out


@dataclass
class FuzzReport:
    trials: int = 0
    violations: list[dict] = field(default_factory=list)
    kinds: Counter = field(default_factory=Counter)

    def merge(self, other: "FuzzReport") -> None:
        self.trials += other.trials
        self.violations.extend(other.violations)
        self.kinds.update(other.kinds)

    def to_json(self) -> dict:
        return {
            "trials": self.trials,
            "kinds": dict(sorted(self.kinds.items())),
            "violations": self.violations,
        }


def _random_subset(rng, goods):
    return frozenset(g for g in sorted(goods) if rng.random() < 0.5)


def _lift(spec, m, keep):
    """v'(S) = v(S & keep) + |S - keep|, a matroid rank function dominating v."""
    return ExplicitTable.from_function(m, lambda S: spec.evaluate(S & keep) + len(S - keep))


def _truncate(spec, m, k):
    if isinstance(spec, CappedRelevant):
        return CappedRelevant(spec.relevant, min(spec.cap, k))
    if isinstance(spec, Partition):
        return Partition(spec.categories, tuple(min(c, k) for c in spec.caps))
    return ExplicitTable.from_function(m, lambda S: min(spec.evaluate(S), k))


def _edit(rng, spec, m):
    goods = range(m)
    if rng.random() < 0.5 or m == 0:
        return _lift(spec, m, _random_subset(rng, goods))
    g = rng.randrange(m)
    if isinstance(spec, CappedRelevant):
        return CappedRelevant(spec.relevant ^ {g}, max(0, spec.cap + rng.choice((-1, 0, 1))))
    if isinstance(spec, Partition):
        cats = [set(c - {g}) for c in spec.categories]
        k = rng.randrange(len(cats) + 1)
        if k < len(cats):
            cats[k].add(g)
        return Partition(tuple(frozenset(c) for c in cats), spec.caps)
    if isinstance(spec, Transversal):
        s = rng.randrange(spec.slots)
        return Transversal(spec.slots, spec.edges ^ {(g, s)})
    if isinstance(spec, Graphic):
        triples = [t for t in spec.edge_of if t[0] != g]
        triples.append((g, rng.randrange(spec.vertices), rng.randrange(spec.vertices)))
        return Graphic(spec.vertices, tuple(triples))
    return _lift(spec, m, _random_subset(rng, goods))


def draw_manipulation(rng: random.Random, inst: Instance, truthful: RunResult) -> Manipulation:
    m = inst.m
    i = rng.randrange(inst.n)
    spec = inst.specs[i]
    kind = rng.choice(KINDS)
    if kind == "truthful":
        return Manipulation(i, spec, kind)
    if kind == "f_T":
        if rng.random() < 0.5:
            T = _random_subset(rng, truthful.allocation.bundles[i])
            return Manipulation(i, f_T(T), kind, target=T)
        return Manipulation(i, f_T(_random_subset(rng, range(m))), kind)
    if kind == "cap_reduction":
        return Manipulation(i, _truncate(spec, m, rng.randint(0, max(0, spec.evaluate(range(m)) - 1))), kind)
    if kind == "relevant_set_edit":
        return Manipulation(i, _edit(rng, spec, m), kind)
    if rng.random() < 0.8:
        values = [0] + [rng.randint(0, m) for _ in range((1 << m) - 1)]
        return Manipulation(i, ExplicitTable(m, tuple(values)), kind)
    from .corpus import FAMILIES, random_spec

    return Manipulation(i, ExplicitTable.from_function(m, random_spec(rng, m, rng.choice(FAMILIES[:-1])).evaluate), kind)


def _dominates(reported, truthful, m) -> bool:
    return bool(np.all(table(reported, m) >= table(truthful, m)))


def check_trial(inst, c, truthful: RunResult, manip: Manipulation, mechanism) -> list[tuple[str, int, int]]:
    """Run one manipulated profile; return (property, truthful, manipulated) failures."""
    i = manip.agent
    spec = inst.specs[i]
    result = mechanism(inst.with_valuation(i, manip.reported), c)
    mine = result.allocation.bundles[i]
    before = truthful.utilities[i]
    true_after = spec.evaluate(mine)
    failures = []
    if true_after > before:
        failures.append(("utility-improved", before, true_after))
    if manip.target is not None and set(mine) != set(manip.target):
        failures.append(("faithfulness", len(manip.target), len(mine)))
    effective = zero_out_if_invalid(manip.reported, inst.m)
    if len(mine) < len(truthful.allocation.bundles[i]) and _dominates(effective, spec, inst.m):
        failures.append(("monotonicity", len(truthful.allocation.bundles[i]), len(mine)))
    return failures


def fuzz_strategyproofness(
    inst: Instance, c: Criterion, trials: int, seed: int, mechanism=run_mechanism
) -> FuzzReport:
    """Draw ``trials`` seeded manipulations of ``inst`` and check each one.

    Every violation carries the per-trial seed; ``replay_trial`` reproduces it.
    """
    report = FuzzReport()
    if inst.n == 0:
        return report
    truthful = mechanism(inst, c)
    master = random.Random(seed)
    for _ in range(trials):
        trial_seed = master.getrandbits(32)
        manip = draw_manipulation(random.Random(trial_seed), inst, truthful)
        report.trials += 1
        report.kinds[manip.kind] += 1
        for prop, before, after in check_trial(inst, c, truthful, manip, mechanism):
            report.violations.append(
                {
                    "seed": trial_seed,
                    "agent": manip.agent,
                    "property": prop,
                    "manipulation": manip.to_json(),
                    "truthful_utility": before,
                    "manipulated_utility": after,
                }
            )
    return report


def replay_trial(inst: Instance, c: Criterion, trial_seed: int, mechanism=run_mechanism):
    truthful = mechanism(inst, c)
    manip = draw_manipulation(random.Random(trial_seed), inst, truthful)
    return manip, check_trial(inst, c, truthful, manip, mechanism)


def fuzz_corpus(instances, criteria, trials: int, seed: int, mechanism=run_mechanism) -> FuzzReport:
    """Spread ``trials`` manipulations round-robin over instance/criterion pairs.

    ``criteria`` holds criterion objects or functions mapping an instance to one.
    """
    pairs = [
        (inst, c if isinstance(c, _CRITERIA) else c(inst)) for inst in instances if inst.n > 0 for c in criteria
    ]
    report = FuzzReport()
    if not pairs:
        return report
    base, extra = divmod(trials, len(pairs))
    rng = random.Random(seed)
    for k, (inst, c) in enumerate(pairs):
        count = base + (k < extra)
        sub_seed = rng.getrandbits(32)
        if count:
            report.merge(fuzz_strategyproofness(inst, c, count, sub_seed, mechanism))
    return report


def broken_tiebreak_mechanism(reported: Instance, c: Criterion, **kwargs) -> RunResult:
    """Deliberately wrong variant for fuzzer-sensitivity checks.

    Gain ties go to the agent reporting the largest total value instead of
    the least index, which an agent can exploit by inflating its report.
    """
    from .criteria import gain
    from .engine import run, sanitize

    inst = sanitize(reported)
    demand = [spec.evaluate(range(inst.m)) for spec in inst.specs]

    def select(active, u, crit, weights):
        return max(sorted(active), key=lambda i: (gain(crit, u, weights, i), demand[i]))

    return run(inst, c, select=select, **kwargs)
