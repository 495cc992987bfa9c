"""Python bindings for the radnmt translation toolkit."""

import json

from ._radnmt import (
    DecompositionTable,
    MetricScore,
    RadnmtError,
    bleu,
    character_sentence,
    hlepor_sentence,
    input_dim,
    nist,
    settings,
    translate,
)
from . import _radnmt

__all__ = [
    "DecompositionTable",
    "MetricScore",
    "RadnmtError",
    "bleu",
    "character_sentence",
    "evaluate",
    "hlepor_sentence",
    "input_dim",
    "nist",
    "run_matrix",
    "settings",
    "train",
    "translate",
]


def train(config, output_dir=None, progress=None):
    """Train from a config file; returns the run ledger as a dict."""
    return json.loads(_radnmt.train(str(config), None if output_dir is None else str(output_dir), progress))


def run_matrix(config, output_dir=None):
    """Train all five settings; returns the matrix summary as a dict."""
    return json.loads(_radnmt.run_matrix(str(config), None if output_dir is None else str(output_dir)))


def evaluate(hypotheses, references, case_insensitive=False):
    """BLEU, NIST, hLEPOR and CharacTER for one system.

    `references` is a list of reference corpora, each line-aligned with
    `hypotheses`.
    """
    return json.loads(_radnmt.evaluate(list(hypotheses), [list(r) for r in references], case_insensitive))
