"""Kähler geometry of C^N: canonical structures, Hopf reduction to S^2 and
unfolding onto U(N) coadjoint orbits, with seeded numerical verification."""

__version__ = "0.1.0"

from .algebra import (  # noqa: E402
    PAULI,
    bracket,
    generalized_pauli_basis,
    pairing,
    pairing_and_bracket,
    scalar,
)
from .hilbert_kaehler import (  # noqa: E402
    HilbertPoint,
    LinearVectorField,
    Tensor2,
    canonical_structures,
    hermitian_field,
    lie_derivative,
    lie_derivative_fd,
    schrodinger_flow,
)
from .hopf_reduction import SphereChart, project_point, sphere_kaehler  # noqa: E402
from .momentum_unfolding import (  # noqa: E402
    DualAlgebraPoint,
    OrbitFrame,
    build_orbit_frame,
    momentum_map,
    orbit_kaehler,
)

__all__ = [
    "PAULI", "bracket", "generalized_pauli_basis", "pairing", "pairing_and_bracket", "scalar",
    "HilbertPoint", "LinearVectorField", "Tensor2", "canonical_structures", "hermitian_field",
    "lie_derivative", "lie_derivative_fd", "schrodinger_flow",
    "SphereChart", "project_point", "sphere_kaehler",
    "DualAlgebraPoint", "OrbitFrame", "build_orbit_frame", "momentum_map", "orbit_kaehler",
]
