"""Exact computation of the Galois cohomology of universal ordinary distributions.

Levels are squarefree products r of primes; G_r is (Z/r)^x.  The modules are
organised bottom-up: exactlin (integer and mod-M linear algebra), galois
(group and group-ring arithmetic), distribution (U_r and its Galois action),
anderson (the acyclic resolution L), cohomology (cochain complexes,
cocycle lifts and cup products) and cli.
"""

from .distribution import DistElement, Fraction, OrderIdeal, basis, fixed_points, verify_theorem_b
from .exactlin import CohomologyGroup, ExactMatrix, homology_at, smith_normal_form, solve_mod
from .galois import PrimeConfig, make_config

__version__ = "0.1.0"

__all__ = [
    "CohomologyGroup", "DistElement", "ExactMatrix", "Fraction", "OrderIdeal", "PrimeConfig",
    "basis", "fixed_points", "homology_at", "make_config", "smith_normal_form", "solve_mod",
    "verify_theorem_b", "__version__",
]
