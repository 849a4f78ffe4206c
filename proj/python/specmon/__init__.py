"""Runtime security monitor driven by component behavior specifications.

The native core lives in ``specmon._specmon``; this module decodes its JSON
results into plain Python objects.
"""

import json

from specmon._specmon import (
    EngineError,
    ParseError,
    TraceError,
    bundled_spec,
    format_spec,
    top_component,
    validate,
)
from specmon import _specmon

__all__ = [
    "EngineError",
    "ParseError",
    "Session",
    "TraceError",
    "bundled_spec",
    "format_spec",
    "monitor",
    "simulate",
    "top_component",
    "validate",
]


def _params_text(params):
    return json.dumps(params) if params else ""


def _trace_text(trace):
    if isinstance(trace, str):
        return trace
    return "".join(json.dumps(ev) + "\n" for ev in trace)


def monitor(spec_text, trace, *, atol=1e-9, rtol=1e-9, halt_on_first=False,
            attack_rules=True, params=None):
    """Monitor a trace (JSON-lines text or a list of event dicts).

    Returns the report as a dict with ``verdict``, ``alarms``, ``tree``...
    """
    report = _specmon.monitor(spec_text, _trace_text(trace), atol, rtol,
                              halt_on_first, attack_rules, _params_text(params))
    return json.loads(report)


def simulate(steps, attack="none", **config):
    """Water-tank run. Returns (events, params): a list of event dicts and
    the root parameters the monitor needs for this configuration."""
    text, params = _specmon.simulate(steps, attack, **config)
    return [json.loads(line) for line in text.splitlines()], json.loads(params)


class Session:
    """Incremental monitor: feed events one at a time."""

    def __init__(self, spec_text, *, atol=1e-9, rtol=1e-9, halt_on_first=False,
                 attack_rules=True, params=None):
        self._s = _specmon.Session(spec_text, atol, rtol, halt_on_first,
                                   attack_rules, _params_text(params))

    def feed(self, event):
        self._s.feed(event if isinstance(event, str) else json.dumps(event))

    @property
    def verdict(self):
        return self._s.verdict

    @property
    def alarm_count(self):
        return self._s.alarm_count

    def report(self):
        return json.loads(self._s.report())
