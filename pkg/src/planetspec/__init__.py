"""Ray-geometric and spectral computations for radially symmetric
layered planets: periodic broken rays and their length spectrum, trace
singularity amplitudes, gliding-ray limits, travel-time rigidity
operators, WKB mode sums, and exact arithmetic for the constant-speed
disk's lengths.
"""

from .profile import (
    ConstantSpeed,
    HerglotzReport,
    LayerDensity,
    LayeredProfile,
    LogSpeed,
    PolyLnSpeed,
    ScalarModel,
    SplineSpeed,
    check_distributional_herglotz,
    check_smooth_herglotz,
    emit_phase_space,
    make_log_profile,
    speed_model_from_json,
)
from .kinematics import (
    LegIntegrals,
    TracedPath,
    basic_ray_geometry,
    beta,
    classify_regimes,
    leg_alpha_derivative,
    leg_integrals,
    smooth_turning_radius,
    trace_path,
    turning_radius,
)
from .spectrum import (
    GlidingApproximant,
    GlidingApproximation,
    PeriodicBasicRay,
    RootSolveWarning,
    SpectrumEntry,
    TwoSpeedSpectrum,
    abel_forward,
    blsp,
    blsp_two_speeds,
    check_periodic_conjugacy,
    countable_conjugacy_scan,
    enumerate_basic,
    gliding_approximation,
    interface_motion_derivative,
    spectrum_to_csv,
    spectrum_to_json,
)
from .scattering import (
    GlidingDecay,
    InjectivityReport,
    InterfaceCoefficients,
    ScatteringItinerary,
    TraceSingularity,
    debye_count,
    debye_series,
    gliding_amplitude_decay,
    injectivity_check,
    interface_coefficients,
    kmah_index,
    q_product,
    scattering_itinerary,
    singularities_to_json,
    trace_amplitude,
    trace_table,
)
from .modesum import (
    ModeTable,
    PeakMatch,
    PeakReport,
    SmoothedTrace,
    detect_peaks,
    profile_fingerprint,
    trace_series,
    wkb_eigenfrequencies,
)
from .disk import (
    ChordRay,
    LengthScanReport,
    SineRatioDecision,
    chord_rays,
    cos_degree,
    euler_totient,
    phi_product_check,
    real_cyclotomic_equal,
    simple_lsp_scan,
    sine_ratio_rational,
)

__version__ = "0.1.0"
