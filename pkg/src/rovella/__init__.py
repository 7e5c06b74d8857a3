"""Contracting Lorenz map toolkit.

Library and CLI for a one-parameter family of contracting Lorenz maps:
parameter-exclusion induction, super-attractor and preperiodic parameter
search, empirical-measure comparison, and a suspension-flow model.
"""

from rovella.family import FamilyParams, map_eval, map_value, map_zero, verify_axioms

__version__ = "0.1.0"
