"""Timed-automata networks: types, file format, successors, static bounds, generators."""

from tareach.model.bounds import StaticBounds, maxedge, static_bounds, static_global_bounds
from tareach.model.generators import (
    gen_csma,
    gen_fddi,
    gen_fig1,
    gen_fischer,
    gen_fischer_buggy,
    gen_paper_a1,
    gen_paper_a2,
    gen_paper_a3,
)
from tareach.model.network import DiscreteState, Network, Query
from tareach.model.parser import (
    DiagonalConstraintError,
    IntRangeError,
    InvariantError,
    ModelError,
    ModelSyntaxError,
    UnknownIdentifierError,
    load_model,
    parse_model,
    print_model,
)
from tareach.model.semantics import Successor, initial_zone, product_successors

__all__ = [
    "DiagonalConstraintError",
    "DiscreteState",
    "IntRangeError",
    "InvariantError",
    "ModelError",
    "ModelSyntaxError",
    "Network",
    "Query",
    "StaticBounds",
    "Successor",
    "UnknownIdentifierError",
    "gen_csma",
    "gen_fddi",
    "gen_fig1",
    "gen_fischer",
    "gen_fischer_buggy",
    "gen_paper_a1",
    "gen_paper_a2",
    "gen_paper_a3",
    "initial_zone",
    "load_model",
    "maxedge",
    "parse_model",
    "print_model",
    "product_successors",
    "static_bounds",
    "static_global_bounds",
]
