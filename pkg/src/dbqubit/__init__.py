"""Fock-space toolkit for arrays of silicon dangling-bond pair charge qubits."""

__version__ = "0.1.0"

from .errors import CodomainIncompleteError, DomainError, IntegrityError
from .fockspace import (
    SectorBasis,
    Side,
    Spin,
    SpinOrbital,
    desired_basis,
    enumerate_sector,
    format_state,
    full_fock_basis,
    hole_spin_pattern,
    is_desired,
    pair_occupation,
    parse_state,
    total_sz,
)
from .fermiops import (
    OperatorKind,
    SparseOperator,
    apply_annihilation,
    apply_creation,
    build_operator_matrix,
    operator_shapes,
    write_matrix_market,
)
from .hubbard import (
    DBP_CONSTANTS,
    DBGeometry,
    HubbardParams,
    PhysicalConstants,
    build_hamiltonian,
    energy_to_angular_rate,
    load_params_json,
    params_from_geometry,
)
from .blocks import (
    block_basis,
    count_dimensions,
    decompose_desired,
    eq2_erratum_check,
    reachable_basis,
    support_counts,
)
from .spectra import Spectrum, block_spectra, eigen_spectrum, verify_block_diagonal
from .memmodel import MemoryModel, MemoryReport, memory_fig2, memory_fig3, memory_fig4, memory_fig5
