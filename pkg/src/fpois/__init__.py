"""Exact, truncated computer algebra for formal Poisson structures.

Polynomial coefficients are exact rationals; every formal series is
truncated at a fixed order N and all identities are checked with zero
tolerance.
"""

from .kernel import (ChartMismatch, ConsistencyError, DomainError, FormalSeries,
                     OrderMismatch, Poly, Q, fiber_radial_integral, neumann_inverse,
                     parse_poly, poly_arith, poly_partial, series_arith)
from .calculus import (Chart, DiffForm, MultiVector, contract, exp_lie, exterior_d,
                       lie_derivative, schouten, wedge)
from .structures import (FormalPoisson, FormalSymplectic, bivector_series, bracket,
                         check_equivalence_witness, flat, form_series, function_series,
                         gauge, hamiltonian_vf, invert_poisson, invert_symplectic,
                         jacobi_residual, sharp, vf_series)
from .cotangent import CotangentChart
from .ce import CECochain, ce_delta, ce_homotopy, psi, psi_inv, vertical_homotopy
from .solver import (FormalDiffeo, MorphismSolution, classifying_action,
                     extract_commutant_poisson, factor_morphism_ambiguity,
                     log_along_projection, morphism_residual, solve_commutant,
                     solve_poisson_morphism)
from .courant import (CourantSection, GeneratorFrame, MoritaReport, backward_generators,
                      bfield_section, check_dirac_criterion, courant_derivation, dorfman,
                      flow_bfield, membership, morita_witness, pairing, self_equivalence)

__version__ = "0.1.0"
