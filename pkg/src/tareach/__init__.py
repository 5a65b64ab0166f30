"""Timed-automata reachability with closure-based subsumption and on-the-fly bounds."""

__version__ = "0.1.0"
