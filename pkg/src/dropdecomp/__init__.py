"""Constructive decompositions of dimension-drop interval algebra homomorphisms.

Sampled spectral data, bottleneck pairing metrics, spectral distribution
checks, and the two decomposition pipelines with their verifiers.
"""

from .multisets import (
    ComplexMultiset,
    SpectralMultiset,
    check_sdp,
    fractionalize,
    pair_within,
    pair_within_complex,
    pnk_distance,
)
from .elements import (
    DimensionDropElement,
    FullMatrixElement,
    TentFunction,
    eval_underline,
    test_function,
)
from .fields import (
    Block,
    ComplexMesh,
    Domain,
    HomRep,
    MatrixField,
    Mesh,
    ProjectionField,
    aff_trace,
    assemble_hom,
    circle_mesh,
    disk_mesh,
    hom_distance_on_F,
    interval_mesh,
    spectral_projection,
    unitary_geodesic,
)
from .geometry import (
    PLPath,
    Point,
    SimplicialComplex2,
    barycenter,
    barycentric_subdivision,
    geodesic_path,
    insert_vertex,
    make_point,
    path_distance,
    retract_to_skeleton,
    subdivide_until,
    vertex_point,
)

__version__ = "0.1.0"
