"""Justice criteria: gain functions, exact gain comparison, and utility-vector orders.

A criterion pairs a total order on utility vectors (``psi_compare``) with a
gain function that tells the allocation loop whom to serve next. Gains and
orders are compared exactly; floats only appear in renderings.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, total_ordering

from .errors import CriterionError, PreconditionError
from .radicals import approx_power, sign_of_power_sum
from .valuations import Violation

BOTTOM, FINITE, TOP = -1, 0, 1


def parse_rational(text) -> Fraction:
    """Parse ``"a/b"``, an integer string, or an int into a Fraction."""
    if isinstance(text, bool):
        raise ValueError(f"not a rational: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, Fraction):
        return text
    if not isinstance(text, str):
        raise ValueError(f"rationals must be strings like '3/2', got {text!r}")
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational: {text!r}") from exc


def format_rational(q: Fraction) -> str:
    return str(Fraction(q))


# ---------------------------------------------------------------- criteria


@dataclass(frozen=True)
class Lorenz:
    """Prioritized Lorenz dominance; ``priority[i]`` is agent i's rank in 1..n (1 is served first)."""

    priority: tuple[int, ...] | None = None
    name = "lorenz"

    def ranks(self, n):
        return self.priority if self.priority is not None else tuple(range(1, n + 1))

    def problems(self, n):
        if self.priority is not None and sorted(self.priority) != list(range(1, n + 1)):
            return [f"priority must be a permutation of 1..{n}"]
        return []

    def to_json(self):
        out = {"criterion": self.name}
        if self.priority is not None:
            out["priority"] = list(self.priority)
        return out


@dataclass(frozen=True)
class Leximin:
    name = "leximin"

    def problems(self, n):
        return []

    def to_json(self):
        return {"criterion": self.name}


@dataclass(frozen=True)
class FairShare:
    shares: tuple[Fraction, ...]
    name = "fair_share"

    def problems(self, n):
        out = []
        if len(self.shares) != n:
            out.append(f"fair_share needs {n} shares, got {len(self.shares)}")
        if any(c < 0 for c in self.shares):
            out.append("shares must be nonnegative")
        return out

    def to_json(self):
        return {"criterion": self.name, "shares": [format_rational(c) for c in self.shares]}


@dataclass(frozen=True)
class Nash:
    name = "nash"

    def problems(self, n):
        return []

    def to_json(self):
        return {"criterion": self.name}


@dataclass(frozen=True)
class PMean:
    p: Fraction
    name = "pmean"

    def __post_init__(self):
        p = Fraction(self.p)
        if p == 0:
            raise CriterionError("p = 0 is the weighted Nash limit; use the 'nash' criterion instead")
        if p > 1:
            raise CriterionError(f"p must be at most 1, got {p}")
        object.__setattr__(self, "p", p)

    def problems(self, n):
        return []

    def to_json(self):
        return {"criterion": self.name, "p": format_rational(self.p)}


@dataclass(frozen=True)
class Harmonic:
    name = "harmonic"

    def problems(self, n):
        return []

    def to_json(self):
        return {"criterion": self.name}


Criterion = Lorenz | Leximin | FairShare | Nash | PMean | Harmonic
CRITERION_NAMES = ("lorenz", "leximin", "fair_share", "nash", "pmean", "harmonic")


def criterion_from_json(data: dict) -> Criterion:
    if not isinstance(data, dict):
        raise CriterionError("criterion must be a JSON object")
    name = data.get("criterion")
    allowed = {"criterion", "p", "shares", "priority"}
    extra = set(data) - allowed
    if extra:
        raise CriterionError(f"unknown criterion field(s) {sorted(extra)}")
    try:
        if name == "lorenz":
            pr = data.get("priority")
            return Lorenz(tuple(int(x) for x in pr) if pr is not None else None)
        if name == "leximin":
            return Leximin()
        if name == "fair_share":
            if "shares" not in data:
                raise CriterionError("fair_share needs 'shares'")
            return FairShare(tuple(parse_rational(x) for x in data["shares"]))
        if name == "nash":
            return Nash()
        if name == "pmean":
            if "p" not in data:
                raise CriterionError("pmean needs 'p'")
            return PMean(parse_rational(data["p"]))
        if name == "harmonic":
            return Harmonic()
    except ValueError as exc:
        if isinstance(exc, CriterionError):
            raise
        raise CriterionError(str(exc)) from exc
    raise CriterionError(f"unknown criterion {name!r}; expected one of {', '.join(CRITERION_NAMES)}")


# ---------------------------------------------------------------- gains


@total_ordering
class Gain:
    """An exactly comparable gain value.

    ``rank`` is BOTTOM/FINITE/TOP; sentinels stand for the symbolic "very
    large" (or very small) gains and beat every finite gain. ``key`` is the
    criterion-specific exact payload.
    """

    __slots__ = ("criterion", "rank", "key")
    __hash__ = None

    def __init__(self, criterion: str, rank: int, key: tuple):
        self.criterion = criterion
        self.rank = rank
        self.key = key

    def __eq__(self, other):
        if not isinstance(other, Gain):
            return NotImplemented
        return compare(self, other) == 0

    def __lt__(self, other):
        return compare(self, other) < 0

    def __repr__(self):
        return f"Gain({self.criterion}, {self.rank}, {self.key})"

    def render(self) -> str:
        if self.rank == TOP:
            return "+M" if not self.key else f"+M*{float(self.key[0]):.6g}"
        if self.rank == BOTTOM:
            return "-M"
        return ", ".join(f"{x:.6g}" for x in _approx(self))

    def to_json(self) -> dict:
        cls = {TOP: "top", BOTTOM: "bottom", FINITE: "finite"}[self.rank]
        return {"class": cls, "key": [format_rational(x) for x in self.key]}


def _approx(g: Gain) -> tuple[float, ...]:
    if g.criterion == "nash":
        u, w = g.key
        return ((1 + 1 / u) ** float(w),)
    if g.criterion == "pmean":
        u, w, p = g.key
        d = approx_power(u + 1, p) - approx_power(u, p)
        return (float(w) * abs(d),)
    return tuple(float(x) for x in g.key)


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def _cmp_nash(k1, k2) -> int:
    (u1, w1), (u2, w2) = k1, k2
    L = math.lcm(w1.denominator, w2.denominator)
    lhs = Fraction(u1 + 1, u1) ** int(w1 * L)
    rhs = Fraction(u2 + 1, u2) ** int(w2 * L)
    return _sign(lhs - rhs)


def _cmp_pmean(k1, k2) -> int:
    (u1, w1, p), (u2, w2, _) = k1, k2
    terms = [(u1 + 1, w1), (u1, -w1), (u2 + 1, -w2), (u2, w2)]
    return _sign(p) * sign_of_power_sum(terms, p)


def _cmp_tuple(k1, k2) -> int:
    return (k1 > k2) - (k1 < k2)


_FINITE_CMP = {"nash": _cmp_nash, "pmean": _cmp_pmean}


def compare(g1: Gain, g2: Gain) -> int:
    """Exact three-way comparison: -1, 0 or 1."""
    if g1.criterion != g2.criterion:
        raise CriterionError(f"cannot compare {g1.criterion} gain with {g2.criterion} gain")
    if g1.rank != g2.rank:
        return _sign(g1.rank - g2.rank)
    if g1.rank != FINITE:
        return _cmp_tuple(g1.key, g2.key)
    return _FINITE_CMP.get(g1.criterion, _cmp_tuple)(g1.key, g2.key)


def gain(c: Criterion, u, weights, i: int) -> Gain:
    """Gain of giving one more unit of utility to agent ``i`` at utility vector ``u``."""
    if not 0 <= i < len(u):
        raise PreconditionError(f"unknown agent {i}")
    ui = u[i]
    if isinstance(c, Lorenz):
        return Gain("lorenz", FINITE, (-ui, -c.ranks(len(u))[i]))
    if isinstance(c, Leximin):
        w = Fraction(weights[i])
        return Gain("leximin", FINITE, (-Fraction(ui) / w, -w))
    if isinstance(c, FairShare):
        share = Fraction(c.shares[i])
        if share == 0:
            return Gain("fair_share", BOTTOM, ())
        return Gain("fair_share", FINITE, (-Fraction(ui) / share, -share))
    if isinstance(c, Nash):
        if ui == 0:
            return Gain("nash", TOP, ())
        return Gain("nash", FINITE, (ui, Fraction(weights[i])))
    if isinstance(c, PMean):
        w = Fraction(weights[i])
        if ui == 0:
            # Entering the positive set adds sign(p) * w to the objective.
            return Gain("pmean", TOP, (_sign(c.p) * w,))
        return Gain("pmean", FINITE, (ui, w, c.p))
    if isinstance(c, Harmonic):
        return Gain("harmonic", FINITE, (Fraction(weights[i]) / (ui + 1),))
    raise CriterionError(f"unsupported criterion {c!r}")


def select_agent(active, u, c: Criterion, weights, gain_fn=gain) -> int:
    """Gain-maximizing agent in ``active``; ties go to the least index."""
    best = best_gain = None
    for i in sorted(active):
        g = gain_fn(c, u, weights, i)
        if best is None or g > best_gain:
            best, best_gain = i, g
    if best is None:
        raise PreconditionError("no active agents to select from")
    return best


# ---------------------------------------------------------------- vector orders


@lru_cache(maxsize=None)
def harmonic_number(k: int) -> Fraction:
    return sum((Fraction(1, t) for t in range(1, k + 1)), Fraction(0))


def _positive(u):
    return [i for i, x in enumerate(u) if x > 0]


def psi_compare(c: Criterion, u1, u2, weights) -> int:
    """Three-way comparison of two utility vectors under the criterion's order."""
    if len(u1) != len(u2):
        raise PreconditionError("utility vectors differ in length")
    n = len(u1)
    if isinstance(c, Lorenz):
        ranks = c.ranks(n)
        key = lambda u: sorted(Fraction(x) + Fraction(r, n * n) for x, r in zip(u, ranks))  # noqa: E731
        return _cmp_tuple(key(u1), key(u2))
    if isinstance(c, Leximin):
        key = lambda u: sorted(Fraction(x) / Fraction(w) for x, w in zip(u, weights))  # noqa: E731
        return _cmp_tuple(key(u1), key(u2))
    if isinstance(c, FairShare):
        key = lambda u: sorted(Fraction(x) / s for x, s in zip(u, c.shares) if s > 0)  # noqa: E731
        return _cmp_tuple(key(u1), key(u2))
    if isinstance(c, Harmonic):
        key = lambda u: sum(Fraction(w) * harmonic_number(x) for x, w in zip(u, weights))  # noqa: E731
        return _cmp_tuple(key(u1), key(u2))
    p1, p2 = _positive(u1), _positive(u2)
    if len(p1) != len(p2):
        return _sign(len(p1) - len(p2))
    if isinstance(c, Nash):
        ws = [Fraction(w) for w in weights]
        L = math.lcm(*(w.denominator for w in ws)) if ws else 1
        prod = lambda u, P: math.prod(u[i] ** int(ws[i] * L) for i in P)  # noqa: E731
        return _sign(prod(u1, p1) - prod(u2, p2))
    if isinstance(c, PMean):
        terms = [(u1[i], Fraction(weights[i])) for i in p1]
        terms += [(u2[i], -Fraction(weights[i])) for i in p2]
        return _sign(c.p) * sign_of_power_sum(terms, c.p)
    raise CriterionError(f"unsupported criterion {c!r}")


def welfare(c: Criterion, u, weights) -> str:
    """Human-readable objective value of ``u`` (approximate, for reports only)."""
    n = len(u)
    if isinstance(c, (Lorenz, Leximin, FairShare)):
        if isinstance(c, Lorenz):
            vals = sorted(u)
        elif isinstance(c, Leximin):
            vals = sorted(Fraction(x) / Fraction(w) for x, w in zip(u, weights))
        else:
            vals = sorted(Fraction(x) / s for x, s in zip(u, c.shares) if s > 0)
        return "(" + ", ".join(f"{float(v):.6g}" for v in vals) + ")"
    if isinstance(c, Harmonic):
        return f"{float(sum(Fraction(w) * harmonic_number(x) for x, w in zip(u, weights))):.6g}"
    P = _positive(u)
    if isinstance(c, Nash):
        logp = sum(float(weights[i]) * math.log(u[i]) for i in P)
        return f"positive={len(P)}/{n} log_product={logp:.6g}"
    s = sum(float(weights[i]) * approx_power(u[i], c.p) for i in P)
    return f"positive={len(P)}/{n} sum={s:.6g}"


# ---------------------------------------------------------------- condition checks


def check_gain_conditions(c: Criterion, n: int, umax: int, weights, gain_fn=gain) -> Violation | None:
    """Exhaustively test Pareto consistency and both gain conditions on {0..umax}^n.

    Pareto consistency is checked through single-unit increments, which
    together with transitivity of the order covers every dominating pair.
    Returns the first counterexample, or None.
    """
    if n > 4 or umax > 6:
        raise PreconditionError("enumeration bound is n <= 4, umax <= 6")
    vectors = list(itertools.product(range(umax + 1), repeat=n))

    def bump(x, i):
        y = list(x)
        y[i] += 1
        return tuple(y)

    for x in vectors:
        for i in range(n):
            if psi_compare(c, bump(x, i), x, weights) <= 0:
                return Violation("C1", (x, i), "adding a unit of utility did not strictly improve the vector")

    for x in vectors:
        gains = [gain_fn(c, x, weights, i) for i in range(n)]
        for i, j in itertools.permutations(range(n), 2):
            order = compare(gains[i], gains[j])
            psi = psi_compare(c, bump(x, i), bump(x, j), weights)
            if order > 0 and psi <= 0:
                return Violation("G1", (x, i, j), "higher gain did not give a better vector")
            if order == 0 and psi != 0:
                return Violation("G1-equality", (x, i, j), "equal gains gave unequal vectors")

    for i in range(n):
        reps = {}
        for x in itertools.product(range(umax + 2), repeat=n):
            g = gain_fn(c, x, weights, i)
            t = x[i]
            if t not in reps:
                reps[t] = (x, g)
            elif compare(reps[t][1], g) != 0:
                return Violation("G2-equality", (reps[t][0], x, i), "gain depends on other agents' utility")
        for t in range(umax + 1):
            if compare(reps[t][1], reps[t + 1][1]) < 0:
                return Violation("G2", (reps[t][0], reps[t + 1][0], i), "gain increased with own utility")
    return None
