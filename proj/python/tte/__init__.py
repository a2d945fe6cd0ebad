"""Python interface to the tte trial-emulation workbench.

Structured results (estimates, premise reports, study reports) are returned
as plain dicts with the same layout as the CLI's JSON output.
"""

import json as _json

from . import _tte
from ._tte import TteError, exchangeability_table, parameter_count

__all__ = [
    "TteError",
    "bias_study",
    "ccw_asymptotic",
    "estimate",
    "exchangeability_table",
    "identification_report",
    "m_separated",
    "parameter_count",
    "simulate",
    "to_dot",
    "true_ate",
]


def _dgp_text(dgp):
    return "" if dgp is None else _json.dumps(dgp)


def true_ate(scenario="A", treat="always", control="never", dgp=None):
    """Exact counterfactual survival difference at the horizon."""
    return _tte.true_ate(scenario, treat, control, _dgp_text(dgp))


def ccw_asymptotic(scenario="A", treat="always", control="never", convention="lagged", dgp=None):
    """Large-sample limit of the clone-censor-weight estimator."""
    return _tte.ccw_asymptotic(scenario, treat, control, convention, _dgp_text(dgp))


def simulate(scenario="A", n=1000, seed=20240917, dgp=None):
    """Sample a cohort; returns it as long-format CSV text."""
    return _tte.simulate(scenario, n, seed, _dgp_text(dgp))


def estimate(cohort_csv, scenario="A", estimator="npmle", treat="always", control="never", convention="lagged"):
    return _json.loads(_tte.estimate(cohort_csv, scenario, estimator, treat, control, convention))


def identification_report(scenario="A", horizon=3):
    return _json.loads(_tte.identification_report(scenario, horizon))


def bias_study(config=None, workers=1):
    """Run a replication study; `config` uses the study-config JSON keys."""
    return _json.loads(_tte.bias_study(_json.dumps(config or {}), workers))


def to_dot(scenario="A", horizon=3, variant="full", regime="always"):
    return _tte.to_dot(scenario, horizon, variant, regime)


def m_separated(dot, a, b, z=()):
    """m-separation query on a DOT graph, with nodes given by name."""
    return _tte.m_separated(dot, list(a), list(b), list(z))
