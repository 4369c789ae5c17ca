"""homkit: exact desk-scale checks for homogeneous-structure geometry.

Dense exact tensors, Lie algebras as structure constants, the
vector/cyclic/3-form split of metric torsion tensors, singular
homogeneous plane waves as explicit charts, and the normalizations
that take consistent bracket tables to symmetric-space or plane-wave
form.
"""

from .exact import EXACT, FLOAT
from .tensor_core import FrameMetric, Tensor, antisymmetrize, contract, raise_lower
from .lie_algebra import (
    LieAlgebra,
    ReductiveSplit,
    change_basis,
    check_reductive,
    jacobi_residual,
)
from .hom_structure import (
    CurvatureAtPoint,
    HomogeneousStructure,
    SpanError,
    StructureClass,
    build_isometry_algebra,
    classify,
    decompose,
    trace_one_form,
)
from .plane_wave import (
    ChartPoint,
    PlaneWaveData,
    as_residuals,
    christoffel,
    exact_curvature,
    frame_structure,
    metric_jet,
    pw_isometry_algebra,
    riemann,
    sample_points,
    structure_at,
)
from .reduction import (
    DegenerateAnsatz,
    NondegenerateAnsatz,
    ReductionReport,
    ansatz_from_plane_wave,
    assemble_algebra,
    degenerate_reduce,
    f_derivation,
    generate_instance,
    nondegenerate_reduce,
    verify_constraints,
)

__version__ = "0.1.0"
