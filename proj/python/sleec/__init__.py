"""Python bindings for the SLEEC rule checker.

Every function takes ruleset source text and returns plain Python data.
Explanations use the offline mock provider.
"""

import json as _json

from . import _sleec
from ._sleec import ReportError, prompt_hash

__all__ = [
    "ReportError",
    "apply_suggestion",
    "check",
    "explain",
    "format",
    "parse_report",
    "prompt",
    "prompt_hash",
]


def check(text, horizon=None, max_env_events=None):
    """Diagnostics, verdicts and warnings for a ruleset."""
    return _json.loads(_sleec.check(text, horizon, max_env_events))


def format(text):  # noqa: A001 - mirrors the CLI subcommand
    """Canonical source; raises ValueError carrying the diagnostics on syntax errors."""
    return _sleec.format(text)


def prompt(text, verdict=0, system_description=""):
    """(prompt text, hex SHA-256) for one verdict."""
    return _sleec.prompt(text, verdict, system_description)


def explain(text, verdict=0, system_description="", fixtures_dir=None):
    """Explanation report for one verdict, as the template-shaped dict."""
    dirname = None if fixtures_dir is None else str(fixtures_dir)
    return _json.loads(_sleec.explain(text, verdict, system_description, dirname))


def parse_report(raw):
    """Validates a raw model answer; raises ReportError when it does not fit the template."""
    return _json.loads(_sleec.parse_report(raw))


def apply_suggestion(text, suggestion):
    """Applies a {kind, target_rule_id, sleec_text} suggestion and re-checks the result."""
    return _json.loads(_sleec.apply_suggestion(text, _json.dumps(suggestion)))
