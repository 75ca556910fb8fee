"""The General Yankee Swap allocation loop and its audit replay."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction

from . import exchange
from .criteria import Criterion, FairShare, Lorenz, criterion_from_json, format_rational, gain, select_agent, welfare
from .errors import InvariantError, ValidationError
from .exchange import Allocation
from .valuations import ExplicitTable, Violation, check_mrf, counter, zero_out_if_invalid


@dataclass(frozen=True)
class Agent:
    valuation: object
    weight: Fraction = Fraction(1)
    priority: int | None = None
    fair_share: Fraction | None = None


@dataclass(frozen=True)
class Instance:
    m: int
    agents: tuple[Agent, ...]

    def __post_init__(self):
        object.__setattr__(self, "agents", tuple(self.agents))

    @property
    def n(self) -> int:
        return len(self.agents)

    @property
    def specs(self) -> list:
        return [a.valuation for a in self.agents]

    @property
    def weights(self) -> list[Fraction]:
        return [Fraction(a.weight) for a in self.agents]

    @property
    def priorities(self) -> tuple[int, ...] | None:
        if any(a.priority is None for a in self.agents):
            return None
        return tuple(a.priority for a in self.agents)

    @property
    def shares(self) -> tuple[Fraction, ...] | None:
        if any(a.fair_share is None for a in self.agents):
            return None
        return tuple(Fraction(a.fair_share) for a in self.agents)

    def with_valuation(self, i: int, spec) -> "Instance":
        agents = list(self.agents)
        agents[i] = replace(agents[i], valuation=spec)
        return Instance(self.m, tuple(agents))

    def problems(self, criterion: Criterion | None = None, require_mrf: bool = True) -> list[str]:
        out = []
        if not isinstance(self.m, int) or self.m < 0:
            return [f"m must be a nonnegative integer, got {self.m!r}"]
        given = [a.priority for a in self.agents if a.priority is not None]
        if given and sorted(given) != list(range(1, self.n + 1)):
            out.append(f"priorities must be a permutation of 1..{self.n}")
        for i, a in enumerate(self.agents):
            where = f"agents[{i}]"
            if Fraction(a.weight) <= 0:
                out.append(f"{where}.weight must be positive")
            if a.fair_share is not None and Fraction(a.fair_share) < 0:
                out.append(f"{where}.fair_share must be nonnegative")
            spec = a.valuation
            if isinstance(spec, ExplicitTable):
                if spec.m != self.m:
                    out.append(f"{where}.valuation: explicit table covers {spec.m} goods, instance has {self.m}")
                    continue
            elif any(g >= self.m for g in spec.goods()):
                out.append(f"{where}.valuation references a good outside 0..{self.m - 1}")
                continue
            if require_mrf and not spec.mrf_by_construction:
                v = check_mrf(spec, self.m)
                if v is not None:
                    out.append(f"{where}.valuation is not a matroid rank function ({v.kind})")
        if criterion is not None:
            out.extend(criterion.problems(self.n))
        return out

    def validate(self, criterion: Criterion | None = None, require_mrf: bool = True) -> None:
        problems = self.problems(criterion, require_mrf)
        if problems:
            raise ValidationError(problems)


@dataclass(frozen=True)
class TraceRecord:
    iteration: int
    active: int
    agent: int
    gain: dict
    outcome: str  # "augmented" or "retired"
    path: tuple[int, ...] = ()

    def to_json(self) -> dict:
        out = {
            "iteration": self.iteration,
            "active": self.active,
            "agent": self.agent,
            "gain": self.gain,
            "outcome": self.outcome,
        }
        if self.outcome == "augmented":
            out["path"] = list(self.path)
        return out

    @classmethod
    def from_json(cls, d: dict) -> "TraceRecord":
        return cls(d["iteration"], d["active"], d["agent"], d["gain"], d["outcome"], tuple(d.get("path", ())))


@dataclass(frozen=True)
class RunResult:
    allocation: Allocation
    utilities: tuple[int, ...]
    trace: tuple[TraceRecord, ...]
    query_count: int
    criterion: Criterion
    weights: tuple[Fraction, ...] = field(default=())

    @property
    def usw(self) -> int:
        return sum(self.utilities)

    @property
    def metrics(self) -> dict:
        return {
            "usw": self.usw,
            "welfare": welfare(self.criterion, self.utilities, self.weights),
            "query_count": self.query_count,
        }

    def to_json(self) -> dict:
        return {
            "criterion": self.criterion.to_json(),
            "m": self.allocation.m,
            "weights": [format_rational(w) for w in self.weights],
            "bundles": [sorted(b) for b in self.allocation.bundles],
            "pool": sorted(self.allocation.pool),
            "utilities": list(self.utilities),
            "usw": self.usw,
            "welfare": self.metrics["welfare"],
            "query_count": self.query_count,
            "trace": [r.to_json() for r in self.trace],
        }

    @classmethod
    def from_json(cls, d: dict) -> "RunResult":
        alloc = Allocation.from_json(d["m"], d)
        return cls(
            allocation=alloc,
            utilities=tuple(d["utilities"]),
            trace=tuple(TraceRecord.from_json(r) for r in d["trace"]),
            query_count=d["query_count"],
            criterion=criterion_from_json(d["criterion"]),
            weights=tuple(Fraction(w) for w in d["weights"]),
        )


PATH_FINDERS = {
    "bfs": exchange.shortest_path_to_pool,
    "explicit": exchange.shortest_path_explicit,
}


def resolve_criterion(c: Criterion, inst: Instance) -> Criterion:
    """Fill in instance-level priorities for the Lorenz criterion when it has none."""
    if isinstance(c, Lorenz) and c.priority is None and inst.priorities is not None:
        return Lorenz(inst.priorities)
    return c


def run(
    inst: Instance,
    c: Criterion,
    *,
    path_finder: str = "bfs",
    verify: bool = False,
    select=select_agent,
) -> RunResult:
    """Run General Yankee Swap on ``inst`` under criterion ``c``.

    ``verify`` re-checks the partition, non-redundancy and iteration bound
    after every step (uncounted evaluations). ``select`` replaces the agent
    selection rule and exists for mutation testing.
    """
    c = resolve_criterion(c, inst)
    inst.validate(c)
    specs, weights, n, m = inst.specs, inst.weights, inst.n, inst.m
    find_path = PATH_FINDERS[path_finder]
    alloc = Allocation(m, n)
    active = set(range(n)) if m else set()  # nothing to hand out: everyone is done
    trace = []
    start = counter.count
    while active:
        u = alloc.sizes()
        i = select(active, u, c, weights)
        rendered = gain(c, u, weights, i)
        record = {"render": rendered.render(), **rendered.to_json()}
        path = find_path(alloc, i, specs)
        if path is not None:
            exchange.augment(alloc, i, path)
            trace.append(TraceRecord(len(trace), len(active), i, record, "augmented", tuple(path)))
        else:
            active.discard(i)
            trace.append(TraceRecord(len(trace), len(active) + 1, i, record, "retired"))
        if verify:
            alloc.check_partition()
            if not alloc.is_non_redundant(specs):
                raise InvariantError(f"allocation became redundant at iteration {len(trace) - 1}")
            if len(trace) > m + n:
                raise InvariantError("iteration bound m + n exceeded")
    return RunResult(alloc, alloc.sizes(), tuple(trace), counter.count - start, c, tuple(weights))


def sanitize(reported: Instance) -> Instance:
    """Zero out every reported valuation that is not a matroid rank function."""
    agents = tuple(replace(a, valuation=zero_out_if_invalid(a.valuation, reported.m)) for a in reported.agents)
    return Instance(reported.m, agents)


def run_mechanism(reported: Instance, c: Criterion, **kwargs) -> RunResult:
    """The strategyproof mechanism: sanitize reports, then allocate."""
    return run(sanitize(reported), c, **kwargs)


def replay_check(result: RunResult, inst: Instance) -> Violation | None:
    """Re-execute ``result.trace`` step by step against ``inst``.

    At every iteration checks that the recorded agent is the selection rule's
    choice, that a recorded path is a shortest augmenting path made of real
    exchange edges (or that no path exists for a retirement), and that the
    allocation stays non-redundant. Uses uncounted evaluations.
    """
    c = resolve_criterion(result.criterion, inst)
    specs, weights, n, m = inst.specs, inst.weights, inst.n, inst.m
    alloc = Allocation(m, n)
    active = set(range(n)) if m else set()
    saved = counter.count
    try:
        for rec in result.trace:
            it = rec.iteration
            if not active:
                return Violation("extra-iteration", (it,), "trace continues after every agent retired")
            u = alloc.sizes()
            expected = select_agent(active, u, c, weights)
            if rec.agent != expected:
                return Violation("agent-choice", (it, rec.agent, expected), "recorded agent is not the gain maximizer")
            dm = exchange.get_distances(alloc, rec.agent, specs)
            reachable = [dm.dist[g] for g in alloc.pool if dm.dist[g] is not None]
            if rec.outcome == "retired":
                if reachable:
                    return Violation("bad-retirement", (it, rec.agent), "an augmenting path existed")
                active.discard(rec.agent)
            elif rec.outcome == "augmented":
                problem = _path_problem(alloc, rec.agent, list(rec.path), specs, min(reachable, default=None))
                if problem:
                    return Violation("bad-path", (it, rec.path), problem)
                exchange.augment(alloc, rec.agent, list(rec.path))
                if not alloc.is_non_redundant(specs):
                    return Violation("redundant", (it,), "allocation became redundant")
            else:
                return Violation("bad-outcome", (it,), f"unknown outcome {rec.outcome!r}")
        if active:
            return Violation("truncated", (len(result.trace),), "trace ends with active agents")
        if alloc != result.allocation or tuple(result.utilities) != alloc.sizes():
            return Violation("final-allocation", (), "replayed allocation differs from the reported one")
    finally:
        counter.count = saved
    return None


def _path_problem(alloc, i, path, specs, shortest) -> str | None:
    if not path or len(set(path)) != len(path):
        return "path is empty or repeats goods"
    if any(not 0 <= g < alloc.m for g in path):
        return "path names an unknown good"
    if shortest is None or len(path) != shortest:
        return f"path length {len(path)} is not the shortest distance {shortest}"
    if path[-1] not in alloc.pool:
        return "path does not end in the pool"
    own = alloc.bundles[i]
    if path[0] in own or specs[i].evaluate(own | {path[0]}) != len(own) + 1:
        return "first good is not desired by the agent"
    for a, b in zip(path, path[1:]):
        j = alloc.owner[a]
        bundle = alloc.bundle(j)
        if b in bundle:
            return f"edge {a}->{b} stays inside one bundle"
        if j != exchange.POOL_OWNER and specs[j].evaluate((bundle - {a}) | {b}) != len(bundle):
            return f"{a}->{b} is not an exchange edge"
    return None
