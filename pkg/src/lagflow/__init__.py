"""lagflow: Lagrangian-Grassmannian computations for dense complex matrices.

Unitary/lagrangian correspondence, Arnold charts, symplectic reduction,
Schubert-cell classification, spectral flow, Maslov index and local
intersection numbers for families of self-adjoint matrices.
"""

from .errors import InputError, LagflowError, PreconditionError
from .flow import (
    Crossing,
    HermitianPath,
    LagrangianPath,
    maslov_index,
    spectral_flow_crossing,
    spectral_flow_tracking,
)
from .grassmann import (
    J_matrix,
    LagrangianFrame,
    cayley_graph,
    chart_coordinates,
    chart_point,
    graph_projection,
    lagrangian_to_unitary,
    reflection_of,
    standard_lagrangians,
    switched_graph,
    unitary_of_operator,
)
from .intersect import (
    FamilyJet,
    LagrangianJet,
    MeshedFamily,
    ProjectionJet,
    intersection_number_lagrangian,
    intersection_number_operator,
    intersection_number_projection,
    locate_crossings,
    operator_jet_to_lagrangian,
    total_intersection_number,
)
from .linalg import (
    Tolerance,
    hermitian_eig,
    numeric_kernel,
    subspace_intersection_dim,
    subspaces_equal,
)
from .reduction import (
    IsotropicSubspace,
    annihilator_and_reduced,
    generalized_reduce,
    reduce_lagrangian,
    reduce_unitary,
)
from .schubert import (
    Flag,
    SchubertIndex,
    cell_codimension,
    chart_membership_equations,
    incidence_profile,
    schubert_index_of,
    variety_membership,
)
from .universal import (
    UnitaryLoop,
    discretize_operator,
    exact_spectrum,
    reduced_boundary_frame,
    universal_loop_flow,
    universal_reduction,
)

__version__ = "0.1.0"
