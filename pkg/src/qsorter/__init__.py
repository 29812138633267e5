"""Universal d-dimensional quantum sorter: simulation, device models and mesh compilation."""

from .algebra import (
    CompositeState,
    NonUnitaryError,
    UnitaryMatrix,
    apply,
    controlled,
    fourier,
    identity,
    pauli_x,
    pauli_z,
    tensor,
)
from .devices import (
    AwgDesign,
    OamBasisMap,
    awg_design,
    awg_module,
    awg_phase,
    dove_phase,
    oam_module,
    pbs_module,
)
from .mesh import Beamsplitter, BeamsplitterMesh, PhaseShifter, decompose, reconstruct
from .sorter import (
    Architecture,
    OutputGate,
    PhaseModule,
    Reflector,
    SorterSpec,
    SortingMatrix,
    build,
    build_michelson,
    build_mzi,
    efficiency,
    ideal_module,
    simulate,
    sorter_probabilities,
    sorting_matrix,
    sweep_perturbations,
)

__version__ = "0.1.0"
