"""Multiprecision hypergeometric functions, Feynman integrals and identity checks."""

import json

from ._core import (
    DomainError,
    EvaluationError,
    NoBracket,
    NonConvergence,
    PoleError,
    QuadFailure,
    UnknownIdentity,
    Value,
    __version__,
    appell_f1,
    appell_f4,
    hyp2f1,
    hyp3f2,
    i2,
    i3,
    identity_defaults,
    identity_ids,
    im_j3,
    kdf_f210,
    run_cli,
)
from . import _core


def verify(identity, point=None, digits=50, seed=0):
    """Verification report for one point as a dict; missing parameters take the record defaults."""
    return json.loads(_core.verify_json(identity, point or {}, digits, seed))


def sweep(identity, n, seed=1, digits=50):
    """Reports for `n` sampled points, in sampler order."""
    return json.loads(_core.sweep_json(identity, n, seed, digits))


__all__ = [
    "DomainError",
    "EvaluationError",
    "NoBracket",
    "NonConvergence",
    "PoleError",
    "QuadFailure",
    "UnknownIdentity",
    "Value",
    "__version__",
    "appell_f1",
    "appell_f4",
    "hyp2f1",
    "hyp3f2",
    "i2",
    "i3",
    "identity_defaults",
    "identity_ids",
    "im_j3",
    "kdf_f210",
    "run_cli",
    "sweep",
    "verify",
]
