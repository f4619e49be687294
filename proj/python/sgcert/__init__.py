"""Scaled graph containment certificates for LTI systems.

Thin wrapper over the compiled ``_sgcert`` module. Certificate functions
return plain dicts with the same fields as the ``sg`` tool's JSON reports.
"""

import json

from . import _sgcert
from ._sgcert import (
    InvalidArgument,
    StateSpace,
    UnstableSystem,
    first_order_bank,
    freq_response,
    hard_margin,
    is_hurwitz,
    load_system,
    preset,
    run_cli,
    sample,
)

__all__ = [
    "InvalidArgument",
    "StateSpace",
    "UnstableSystem",
    "certify_circle",
    "certify_conic",
    "equivalence_trial",
    "first_order_bank",
    "fit_circle",
    "fit_conic",
    "freq_response",
    "hard_margin",
    "is_hurwitz",
    "load_system",
    "preset",
    "run_cli",
    "sample",
    "stability",
]


def certify_circle(sys, c, r, backend=""):
    """Soft containment of the scaled graph in the disk |z - c| <= r."""
    return json.loads(_sgcert._certify_circle(sys, c, r, backend))


def fit_circle(sys):
    """Smallest certified disk."""
    return json.loads(_sgcert._fit_circle(sys))


def certify_conic(sys, theta):
    """Containment in the conic t11 x^2 + t22 y^2 + 2 t13 x + t33 <= 0."""
    return json.loads(_sgcert._certify_conic(sys, list(theta)))


def fit_conic(sys):
    """Smallest certified tall ellipse."""
    return json.loads(_sgcert._fit_conic(sys))


def stability(sys1, sys2, disk1, disk2, homotopy=False):
    """Feedback stability from two certified disks given as (c, r) pairs."""
    return json.loads(_sgcert._stability(sys1, sys2, tuple(disk1), tuple(disk2), homotopy))


def equivalence_trial(sys, disk, trials=500, seed=1):
    """Time-domain hard IQC trials for the disk multiplier (c, r); the per-trial log is omitted."""
    return json.loads(_sgcert._oracle(sys, tuple(disk), trials, seed))
