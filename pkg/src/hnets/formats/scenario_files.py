# src/hnets/formats/scenario_files.py

import logging
import os
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from hnets.exceptions import FormatError

logger = logging.getLogger(__name__)

SETTINGS = {"tolerance": float, "seed": int, "search_bound": int, "max_denominator": int}


@dataclass
class Step:
    name: str
    op: str
    params: Dict[str, str]
    line: int


@dataclass
class Expectation:
    step: str
    key: str
    value: str
    line: int


@dataclass
class Scenario:
    name: str
    source: str
    settings: Dict[str, object] = field(default_factory=dict)
    steps: List[Step] = field(default_factory=list)
    expectations: List[Expectation] = field(default_factory=list)

    @property
    def base_dir(self) -> str:
        return os.path.dirname(os.path.abspath(self.source))

    def step(self, name: str) -> Optional[Step]:
        return next((s for s in self.steps if s.name == name), None)


def parse_scenario(text: str, source: str = "<scenario>", known_ops=None) -> Scenario:
    """
    Scenario lines::

        scenario NAME
        set KEY VALUE
        step OP [as=NAME] KEY=VALUE ...
        expect STEP.FIELD[.FIELD...] VALUE

    Every step and expectation is resolved before anything runs.
    """
    scenario = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        keyword, *args = line.split()
        if keyword == "scenario":
            if scenario is not None:
                raise FormatError("second 'scenario' line", lineno, source)
            if len(args) != 1:
                raise FormatError("scenario takes one name", lineno, source)
            scenario = Scenario(args[0], source)
            continue
        if scenario is None:
            raise FormatError("file must start with a 'scenario' line", lineno, source)
        if keyword == "set":
            if len(args) != 2 or args[0] not in SETTINGS:
                raise FormatError(f"set takes one of {', '.join(sorted(SETTINGS))} and a value", lineno, source)
            try:
                scenario.settings[args[0]] = SETTINGS[args[0]](args[1])
            except ValueError:
                raise FormatError(f"bad value {args[1]!r} for {args[0]}", lineno, source) from None
        elif keyword == "step":
            if not args:
                raise FormatError("step needs an operation", lineno, source)
            op, params = args[0], {}
            if known_ops is not None and op not in known_ops:
                raise FormatError(f"unknown operation {op!r}", lineno, source)
            for token in args[1:]:
                key, eq, value = token.partition("=")
                if not eq or not key or not value:
                    raise FormatError(f"step parameters are KEY=VALUE, got {token!r}", lineno, source)
                params[key] = value
            name = params.pop("as", op)
            if scenario.step(name) is not None:
                raise FormatError(f"duplicate step name {name!r}; use as=NAME", lineno, source)
            scenario.steps.append(Step(name, op, params, lineno))
        elif keyword == "expect":
            if len(args) != 2 or "." not in args[0]:
                raise FormatError("expect takes STEP.FIELD and a value", lineno, source)
            step, _, key = args[0].partition(".")
            if scenario.step(step) is None:
                raise FormatError(f"expectation refers to unknown step {step!r}", lineno, source)
            scenario.expectations.append(Expectation(step, key, args[1], lineno))
        else:
            raise FormatError(f"unknown keyword {keyword!r}", lineno, source)
    if scenario is None:
        raise FormatError("empty scenario", None, source)
    if not scenario.steps:
        raise FormatError("scenario has no steps", None, source)
    return scenario


def read_scenario(path: str, known_ops=None) -> Scenario:
    if not os.path.exists(path):
        raise FormatError(f"scenario file not found: {path}")
    with open(path, "r") as f:
        scenario = parse_scenario(f.read(), path, known_ops)
    logger.info(f"Read scenario {scenario.name!r}: {len(scenario.steps)} steps, "
                f"{len(scenario.expectations)} expectations")
    return scenario
