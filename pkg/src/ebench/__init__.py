"""Workbench for Event-B-style machines over finite carriers.

Parses the .ebm/.ebc model language, evaluates set-theoretic guards and
actions, explores reachable states, checks invariants / feasibility /
deadlock freedom / refinement / requirement properties, and serves an
interactive animator over HTTP.  Ships the aircraft landing-gear model chain.
"""

__version__ = "0.1.0"
