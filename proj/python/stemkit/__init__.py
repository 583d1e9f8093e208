"""Structured transition evaluation toolkit: Python bindings over the C++ core."""

import json

from . import _stemkit
from ._stemkit import StemError, __version__, correctness_probability

__all__ = [
    "StemError",
    "__version__",
    "build_pool",
    "classify_irv",
    "correctness_probability",
    "estimate",
    "run_cli",
    "sample_subset",
    "stats_report",
    "synthesize",
]


def _text(doc):
    return doc if isinstance(doc, str) else json.dumps(doc)


def classify_irv(irv):
    """Classify an outcome vector of 1/0/-1 ordered by ascending model size."""
    return json.loads(_stemkit.classify_irv(list(irv)))


def build_pool(matrix):
    """Build the transition-indexed pool from an outcome matrix document."""
    return json.loads(_stemkit.build_pool(_text(matrix)))


def sample_subset(pool, m, seed, allow_underfill=False):
    """Draw m items per class from a pool document."""
    return json.loads(_stemkit.sample_subset(_text(pool), m, seed, allow_underfill))


def estimate(subset, outcomes, family, threshold=15.0, floor=50.0):
    """Estimate the capability interval of a model from its subset outcomes."""
    return json.loads(_stemkit.estimate(_text(subset), dict(outcomes), _text(family), threshold, floor))


def stats_report(scores_csv, family=None, weighted=(), log_base=0.0):
    """Discriminability, weights, regression and difficulty for a score table (CSV text)."""
    family_text = "" if family is None else _text(family)
    return json.loads(_stemkit.stats_report(scores_csv, family_text, list(weighted), log_base))


def synthesize(config):
    """Generate a synthetic reference family from a config document."""
    return json.loads(_stemkit.synthesize(_text(config)))


def run_cli(args):
    """Run the command-line interface in-process; returns (exit_code, stdout, stderr)."""
    return _stemkit.run_cli([str(a) for a in args])
