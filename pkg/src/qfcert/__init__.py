"""Length-spectrum computations and separation certificates for
surface-group representations acting on hyperbolic 2- and 3-space."""

__version__ = "0.1.0"

from .moebius import (
    BASEPOINT,
    BoundaryPoint,
    BusemannGap,
    Geodesic3,
    INF,
    IsometryClass,
    IsometryKind,
    LoxodromicData,
    MoebiusError,
    MoebiusMap,
    Point3,
    axis_crossing_gap,
    busemann_gap,
    classify,
    compose,
    dist_h3,
    dist_to_geodesic,
    fixed_points,
    geodesic_distance,
    geodesic_point,
    geodesic_through_points,
    midpoint,
    normalizer_to_axis,
    point_near_geodesic,
    translation_length,
    wrap_turns,
)
from .surface_group import (
    GroupPresentation,
    Word,
    WordError,
    cyclic_reduce,
    enumerate_words,
    free_reduce,
    shortlex_key,
    shortlex_min_rotation,
)
from .representations import (
    BEND_ANGLE_ENVELOPE,
    OCTAGON_TRANSLATION_LENGTH,
    GrowthEstimate,
    JorgensenReport,
    LengthSpectrum,
    Representation,
    RepresentationError,
    bend,
    bending_curve_word,
    compute_spectrum,
    conjugate_representation,
    estimate_growth,
    evaluate,
    find_complex_trace_element,
    fuchsian_octagon,
    jorgensen_pair_value,
    jorgensen_spot_check,
    normalize_spectrum,
    orbit_distance,
    orbit_length_estimate,
    orbit_point_distances,
    power_displacement,
    representation_from_dict,
    representation_hash,
    representation_json,
    representation_to_dict,
    stable_length,
    with_basepoint,
)
from .boundary import (
    AXIS_CROSS_TOL,
    BoundaryError,
    BoundaryPointRef,
    DEGENERATE_TOL,
    LimitSetSample,
    MIN_THETA,
    PairConfig,
    SpiralWitness,
    argument_lift,
    classify_angle_pairs,
    classify_pairs,
    classify_real_pairs,
    disk_angle,
    find_spiral_witness,
    fixed_angles,
    limit_set_sample,
    normalize_at,
    reference_representation,
    sample_to_csv,
    sample_to_svg,
    verify_witness_orders,
    witness_from_dict,
    witness_image_points,
    witness_to_dict,
)
from .certificates import (
    MIN_CERTIFICATE_MARGIN,
    CertificateError,
    DlipRatioBound,
    SeparationCertificate,
    TriangleTestRecord,
    certificate_from_dict,
    certificate_problems,
    certificate_to_dict,
    certify,
    diagnostic_delta,
    find_separation_certificate,
    ratio_lower_bound,
    triangle_harness,
)
