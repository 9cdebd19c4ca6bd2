"""Degree-constrained minimisation of a nonlocal wall energy on the line."""

from .kernels import BACKEND as KERNEL_BACKEND
from .profiles import (
    DegreeError,
    FieldParam,
    Grid,
    Offset,
    Profile,
    WindingNumber,
    boundary_phases,
    degree_of,
    initial_ansatz,
    m_components,
    wall_count,
    wall_locations,
)
from .strayfield import (
    ExtensionSlab,
    SampledField,
    dirichlet_energy_extension,
    dtn,
    field_from_profile,
    h12_double_integral,
    h12_inner_product,
    h12_spectral,
    poisson_extend,
)

__version__ = "0.1.0"
