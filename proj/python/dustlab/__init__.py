"""Python front end for the dustlab C++ core.

Scenarios are plain dicts in the same JSON schema the command-line tool
reads (see README.md).
"""

import json

from . import _dustlab
from ._dustlab import (
    DustlabError,
    ValidationError,
    blowup_time_upper_bound,
    comparison_solution,
    oracle_pole,
)

__version__ = _dustlab.__version__


def _text(scenario):
    return scenario if isinstance(scenario, str) else json.dumps(scenario)


def validate(scenario):
    return json.loads(_dustlab.validate(_text(scenario)))


def simulate(scenario):
    return json.loads(_dustlab.simulate(_text(scenario)))


def certify(scenario):
    return json.loads(_dustlab.certify(_text(scenario)))


def verify(scenario):
    return json.loads(_dustlab.verify(_text(scenario)))


def sweep(scenario, axis, values, jobs=1):
    return json.loads(_dustlab.sweep(_text(scenario), axis, list(values), jobs))


def check_blowup_conditions(mass, v_sup, lam, dimension, h0):
    return json.loads(_dustlab.check_blowup_conditions(mass, v_sup, lam, dimension, h0))


def load_scenario(path):
    with open(path) as fh:
        return json.load(fh)


__all__ = [
    "DustlabError",
    "ValidationError",
    "blowup_time_upper_bound",
    "certify",
    "check_blowup_conditions",
    "comparison_solution",
    "load_scenario",
    "oracle_pole",
    "simulate",
    "sweep",
    "validate",
    "verify",
]
