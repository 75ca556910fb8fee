"""JSON instance files.

Layout::

    {"m": 4,
     "agents": [{"valuation": {...}, "weight": "3/2", "priority": 1, "fair_share": "1"}],
     "criterion": {"criterion": "leximin"}}

Rationals are strings ("a/b" or integers); floats are rejected.
"""

from __future__ import annotations

import json
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .criteria import Criterion, criterion_from_json, format_rational
from .engine import Agent, Instance
from .errors import InstanceError, ValidationError, YankeeSwapError
from .valuations import spec_from_json

_TOP_FIELDS = {"m", "agents", "criterion"}
_AGENT_FIELDS = {"valuation", "weight", "priority", "fair_share"}


def _rational(value, where: str, problems: list) -> Fraction | None:
    if isinstance(value, bool) or isinstance(value, float):
        problems.append(f"{where}: rationals must be strings like \"3/2\", got {value!r}")
        return None
    try:
        return Fraction(value) if isinstance(value, int) else Fraction(str(value).strip())
    except (ValueError, ZeroDivisionError):
        problems.append(f"{where}: not a rational: {value!r}")
        return None


def parse_instance(data) -> tuple[Instance, Criterion | None]:
    """Decode an instance document, collecting every problem before failing."""
    problems: list[str] = []
    if not isinstance(data, dict):
        raise ValidationError(["top level must be a JSON object"])
    for key in sorted(set(data) - _TOP_FIELDS):
        problems.append(f"unknown field {key!r}")
    m = data.get("m")
    if not isinstance(m, int) or isinstance(m, bool) or m < 0:
        problems.append(f"m: must be a nonnegative integer, got {m!r}")
        m = None
    raw_agents = data.get("agents")
    if not isinstance(raw_agents, list):
        problems.append("agents: must be a list")
        raw_agents = []
    agents = []
    for i, raw in enumerate(raw_agents):
        where = f"agents[{i}]"
        if not isinstance(raw, dict):
            problems.append(f"{where}: must be an object")
            continue
        for key in sorted(set(raw) - _AGENT_FIELDS):
            problems.append(f"{where}: unknown field {key!r}")
        if "valuation" not in raw:
            problems.append(f"{where}.valuation: missing")
            continue
        try:
            spec = spec_from_json(raw["valuation"])
        except InstanceError as exc:
            problems.append(f"{where}.valuation: {exc}")
            continue
        weight = _rational(raw.get("weight", "1"), f"{where}.weight", problems)
        share = None
        if raw.get("fair_share") is not None:
            share = _rational(raw["fair_share"], f"{where}.fair_share", problems)
        priority = raw.get("priority")
        if priority is not None and (not isinstance(priority, int) or isinstance(priority, bool)):
            problems.append(f"{where}.priority: must be an integer rank")
            priority = None
        agents.append(Agent(spec, weight if weight is not None else Fraction(1), priority, share))
    criterion = None
    if data.get("criterion") is not None:
        try:
            criterion = criterion_from_json(data["criterion"])
        except YankeeSwapError as exc:
            problems.append(f"criterion: {exc}")
    if problems:
        raise ValidationError(problems)
    inst = Instance(m, tuple(agents))
    problems = inst.problems(criterion, require_mrf=False)
    if problems:
        raise ValidationError(problems)
    return inst, criterion


def instance_to_json(inst: Instance, criterion: Criterion | None = None) -> dict:
    agents = []
    for a in inst.agents:
        entry = {"valuation": a.valuation.to_json(), "weight": format_rational(a.weight)}
        if a.priority is not None:
            entry["priority"] = a.priority
        if a.fair_share is not None:
            entry["fair_share"] = format_rational(a.fair_share)
        agents.append(entry)
    out = {"m": inst.m, "agents": agents}
    if criterion is not None:
        out["criterion"] = criterion.to_json()
    return out


def example_path(name: str) -> Path:
    return Path(str(resources.files("yankee_swap") / "data" / f"{name}.json"))


def example_names() -> list[str]:
    return sorted(p.name[:-5] for p in resources.files("yankee_swap").joinpath("data").iterdir() if p.name.endswith(".json"))


def load_instance(path) -> tuple[Instance, Criterion | None]:
    """Read an instance file; ``example:NAME`` loads a bundled example."""
    path = str(path)
    if path.startswith("example:"):
        path = example_path(path.split(":", 1)[1])
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError([f"cannot read {path}: {exc.strerror}"]) from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError([f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}"]) from exc
    return parse_instance(data)


def dump_json(obj, pretty: bool = False) -> str:
    return json.dumps(obj, indent=2 if pretty else None, sort_keys=True, separators=None if pretty else (",", ":"))
