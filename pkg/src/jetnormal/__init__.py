"""Formal normal forms for Lie algebra actions and the geometric structures they preserve.

Everything works on truncated polynomials (jets) with exact rational
coefficients, except the case-study module :mod:`jetnormal.numeric`, which
evaluates non-analytic fields in floating point.
"""
from .jet import (DimensionError, InvalidMapError, Jet, NonInvertibleError, PolyMap,
                  Substitution, VectorFieldJet, bracket_vf, jet_arith, jet_compose, monomials,
                  parse_jet, polymap_compose, polymap_inverse)
from .forms import (FormJet, NotClosedError, exterior_d, interior, lie_derivative,
                    poincare_primitive, pullback, standard_symplectic, wedge)
from .lie import (LieAlgebra, LinearPart, Report, Representation, check_lie_algebra,
                  check_representation, is_semisimple, linear_part, pushforward_rep,
                  sl2_algebra, sl2_linear_rep, structure_constants_of)
from .linearize import (NoSolutionError, NotPreparedError, NotReductiveError, cocycle_defect,
                        commutes_with_linear, invariant_projection, linearize_rep,
                        solve_homological)
from .symplectic import (DarbouxReport, DegenerateFormError, IllPosedFlowError,
                         NormalizeFirstError, NotEquivariantError, check_symplectic, darboux,
                         equivariant_darboux, formal_flow, moser_field)
from .cotangent import (CotangentContext, check_hamiltonian, cotangent_lift, dmu_rank,
                        moment_map, orbit_dimension, sample_points, strata_scan)
from .numeric import (ExprField, SingularityError, bracket_residual_numeric, cairns_ghys_fields,
                      cone_samples, gs_remark_fields, linear_sl2_fields, orbit_dim_numeric)
from .bpoisson import (BForm, BivectorJet, NotBExactError, NotPoissonError, SplitFailure,
                       b_d, b_darboux, b_nondegenerate, b_primitive, b_pullback, b_wedge,
                       bivector_pushforward, check_poisson, equivariant_b_darboux,
                       schouten_square, standard_b_form, weinstein_split)

__version__ = "0.1.0"
