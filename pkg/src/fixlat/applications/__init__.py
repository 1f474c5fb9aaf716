"""Verification front-ends built on the fixpoint machinery.

Submodules:
  formats  line-oriented input parsers (transition systems, NFAs,
           probabilistic systems, relations, tabulated functions)
  mucalc   modal mu-calculus model checking over transition systems
  bisim    similarity and bisimilarity checking
  nfa      NFA language equivalence, optionally up to congruence
  lukas    Lukasiewicz fixpoint terms, exact grid or epsilon evaluation
"""

from . import formats, mucalc, bisim, nfa, lukas

__all__ = ["formats", "mucalc", "bisim", "nfa", "lukas"]
