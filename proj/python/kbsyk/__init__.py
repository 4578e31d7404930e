"""Python bindings for the kbsyk two-time Kadanoff-Baym solver."""

import json as _json

from ._kbsyk import *  # noqa: F401,F403
from ._kbsyk import __version__, detect_crossings as _detect_crossings, run_json as _run_json


def run(config):
    """Run a flat config (dict) and return its summary as a dict."""
    return _json.loads(_run_json(_json.dumps(config)))


def detect_crossings(a, b, t_min=0.0, deadband=-1.0):
    """Crossing report between two trace dicts, as a dict."""
    return _json.loads(_detect_crossings(a, b, t_min, deadband))
