"""obstructo: mechanical verification of quantization obstructions.

Symbolic Poisson/operator algebra plus finite matrix and grid
representations for checking the no-go residuals and go-theorem
constructions on R^2n, S^2, T*S^1, T*R_+, and T^2.
"""

__version__ = "0.1.0"

from .scalars import ParamScalar, GaussianRational, scalar_arith, scalar_eval
from .poisson import (
    PhaseSpaceSpec,
    PoissonPoly,
    make_space,
    bracket,
    reduce_poly,
    jacobi_residual,
    normalizer,
    is_lie_subalgebra,
    symplectic_laplacian,
    obstruction_markers,
)

__all__ = [
    "ParamScalar",
    "GaussianRational",
    "scalar_arith",
    "scalar_eval",
    "PhaseSpaceSpec",
    "PoissonPoly",
    "make_space",
    "bracket",
    "reduce_poly",
    "jacobi_residual",
    "normalizer",
    "is_lie_subalgebra",
    "symplectic_laplacian",
    "obstruction_markers",
]
