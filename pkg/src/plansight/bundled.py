"""Access to the example domains shipped inside the package."""

from __future__ import annotations

from importlib import resources

from .errors import InvalidCommandError

_DATA_PACKAGE = "plansight.data"

EXAMPLES = {
    "firefighting/scenario1": ("firefighting/domain.pddl", "firefighting/scenario1.pddl"),
    "firefighting/scenario2": ("firefighting/domain.pddl", "firefighting/scenario2.pddl"),
}

SCENARIO_EVENTS = {
    "firefighting/scenario1": "firefighting/scenario1.events",
    "firefighting/scenario2": "firefighting/scenario2.events",
}


def read_data(relpath: str) -> str:
    root = resources.files(_DATA_PACKAGE)
    target = root
    for part in relpath.split("/"):
        target = target / part
    return target.read_text(encoding="utf-8")


def load_example(name: str) -> tuple[str, str]:
    """Domain and problem text for a bundled example name."""
    if name not in EXAMPLES:
        known = ", ".join(sorted(EXAMPLES))
        raise InvalidCommandError(f"unknown bundled example {name!r} (known: {known})")
    domain_rel, problem_rel = EXAMPLES[name]
    return read_data(domain_rel), read_data(problem_rel)


def load_events(name: str) -> str:
    if name not in SCENARIO_EVENTS:
        known = ", ".join(sorted(SCENARIO_EVENTS))
        raise InvalidCommandError(f"unknown bundled scenario {name!r} (known: {known})")
    return read_data(SCENARIO_EVENTS[name])
