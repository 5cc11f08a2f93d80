"""Group cohomology of G_S with coefficients in Z, Z/M, U_S and U_S/MU_S."""

from .complexes import (KSymbol, TruncatedComplex, build_K, hom_P_U, theorem_a_prediction,
                        triple_identities, verify_degeneration, verify_modM_counts, verify_quasi_iso,
                        verify_theorem_A)
from .cup import check_cup, class_decomposition, cup_on_distribution_class
from .groupcoh import (A_e, cohomology_Z_closed_form, cohomology_Z_snf, cup_closed_form,
                       cup_via_diagonal, lemma_complex_check)
from .lifting import (CocycleClass, distribution_class, explicit_prime_cocycle, lift_cocycle,
                      prime_lift_report)
