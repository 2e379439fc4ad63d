"""Exact SU(2) recoupling engine and spin-network circuit simulator.

Angular momenta are passed as integers ``two_j`` equal to twice the spin.
"""

from .errors import (
    GateError,
    InputError,
    MoveError,
    NonEuclideanError,
    ParseError,
    ProgramError,
    ResourceError,
    SpinnetError,
    TruncationError,
)
from .exact import HalfInt, SignedSqrtRational
from .wigner import (
    clebsch_gordan,
    residual_biedenharn_elliott,
    residual_orthogonality,
    residual_racah,
    triangle_ok,
    wigner_6j,
    wigner_6j_oracle,
    wigner_9j,
)
from .trees import (
    CouplingTree,
    canonical_nonplane,
    count_trees,
    enumerate_trees,
    format_bracket,
    k_assignments,
    parse_bracket,
    rotation_move,
    twist_move,
)
from .graphs import build_graph, diameter, diameter_bound, distance, find_path
from .rotations import RotationSpec, compose_rotations, wigner_d, wigner_D
from .simulator import SimState, apply_phase, apply_racah, apply_rotation, recoupling_matrix
from .dynamics import Program, parse_program, path_sum, run_program, virtual_hamiltonian
from .semiclassics import ponzano_regge_estimate, prob_M, tet_geometry, wigner_limit_ratio
from .statesum import Triangulation3, parse_triangulation, partition_sum, state_functional

__version__ = "0.1.0"

__all__ = [
    "GateError",
    "InputError",
    "MoveError",
    "NonEuclideanError",
    "ParseError",
    "ProgramError",
    "ResourceError",
    "SpinnetError",
    "TruncationError",
    "clebsch_gordan",
    "residual_biedenharn_elliott",
    "residual_orthogonality",
    "residual_racah",
    "triangle_ok",
    "wigner_6j",
    "wigner_6j_oracle",
    "wigner_9j",
    "CouplingTree",
    "canonical_nonplane",
    "count_trees",
    "enumerate_trees",
    "format_bracket",
    "k_assignments",
    "parse_bracket",
    "rotation_move",
    "twist_move",
    "HalfInt",
    "SignedSqrtRational",
    "build_graph",
    "diameter",
    "diameter_bound",
    "distance",
    "find_path",
    "RotationSpec",
    "compose_rotations",
    "wigner_d",
    "wigner_D",
    "SimState",
    "apply_phase",
    "apply_racah",
    "apply_rotation",
    "recoupling_matrix",
    "Program",
    "parse_program",
    "path_sum",
    "run_program",
    "virtual_hamiltonian",
    "ponzano_regge_estimate",
    "prob_M",
    "tet_geometry",
    "wigner_limit_ratio",
    "Triangulation3",
    "parse_triangulation",
    "partition_sum",
    "state_functional",
]
