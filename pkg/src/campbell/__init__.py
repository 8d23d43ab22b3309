"""Campbell diagrams of weakly anisotropic rotor systems.

Exact quadratic-pencil spectra, the analytic spectral mesh with symplectic
(Krein) signatures, first-order perturbation of the doublets at every mesh
crossing, exceptional-point geometry with unfolding classification, and the
rotating circular string as a closed-form continuum example.  Every
approximation ships with an exact-solver cross-check.
"""

from .circular_string import (StringCrossing, StringEP, StringParams,
                              butterfly_atlas, string_crossing,
                              string_eigen_approx, string_ep)
from .ep import (BranchCutLine, DegenerateDiscriminantError, Discriminants,
                 ExceptionalPointPair, UnfoldingClass, axis_node_asymptotics,
                 axis_node_ep, branch_cut_line, classify_unfolding,
                 exceptional_points)
from .linalg import EigenDecomposition, EigenSolverError, eig_dense, qep_linearize
from .mesh import (Branch, Node, branch_eigenpair, branch_value,
                   critical_speeds, doublet_eigenvectors, enumerate_nodes,
                   find_node, krein_product, krein_signature)
from .model import (Block2x2, GapConditionWarning, RotorModel, block,
                    example_6dof, gyro_matrix, load_model, pencil_at,
                    save_model, shaft_model, stiffness_matrix)
from .oracle import (ErrorReport, SpectrumSample, approx_error,
                     convergence_order, exact_spectrum, hausdorff_pair_distance,
                     local_spacing, multiset_distance, nearest_pair, sweep)
from .perturb import (DegenerateReductionError, InstabilityBoundary,
                      MackayCone, NodeExpansion, c_coefficient, eigen_approx,
                      expansion_coefficients, instability_boundary,
                      mackay_cone, pencil_roots, reduced_pencil)

__version__ = "0.1.0"
