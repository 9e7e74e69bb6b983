"""Exact probabilistic model checking of Markov chains against unambiguous Büchi automata."""

from .automata import Alphabet, Nba, delta_word, restrict_scc, verify_unambiguous, with_initial
from .engine import (
    AmbiguousAutomatonError,
    MeasureResult,
    NumericError,
    Options,
    almost_universal,
    measure,
    measure_uniform,
)
from .hoa import parse_hoa, to_hoa
from .markov import Dtmc, parse_dtmc, serialize_dtmc, uniform_chain
from .oracle import powerset_absorption_oracle
from .product import build_product

__all__ = [
    "Alphabet",
    "AmbiguousAutomatonError",
    "Dtmc",
    "MeasureResult",
    "Nba",
    "NumericError",
    "Options",
    "almost_universal",
    "build_product",
    "delta_word",
    "measure",
    "measure_uniform",
    "parse_dtmc",
    "parse_hoa",
    "powerset_absorption_oracle",
    "restrict_scc",
    "serialize_dtmc",
    "to_hoa",
    "uniform_chain",
    "verify_unambiguous",
    "with_initial",
]
