"""Multi-robot task planning: coalition solver, plan DSL, symbolic executor, benchmark harness."""

__version__ = "0.1.0"
