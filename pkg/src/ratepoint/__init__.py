"""ratepoint: strain-driven material-point simulation of a rate-type
elastoplastic model with a hypoelastic (Jaumann) elastic law.

Public surface: fixed-size symmetric/skew tensor algebra, constitutive
ingredients (elastic tangent, yield function, flow direction), motion
programs, the segmented response engine, analysis helpers around the limit
surface, and the verification suites behind the CLI.
"""

from .errors import (
    AxiomViolated,
    OnLimitSurface,
    OutOfDomain,
    RatepointError,
    ScenarioError,
    SingularGradient,
)
from .tensors import (
    Mat3,
    Orth3,
    Skw3,
    Sym3,
    deviator,
    inner,
    jaumann_to_material,
    norm,
    random_rotation,
    random_symmetric,
    rotate,
    trace,
)
from .constitutive import (
    DruckerPragerLike,
    ElasticTangent,
    GradeZeroIsotropic,
    MaterialModel,
    NormalityDirection,
    PlasticDirection,
    VonMises,
    YieldFunction,
    c_apply,
    default_model,
    mu,
    p_tensor,
    psi,
)
from .motions import (
    ConstantVelocityGradient,
    Motion,
    MotionReport,
    PiecewiseMotion,
    RigidRotation,
    SimpleShear,
    SuperposedRotation,
    kinematics,
    rotation_about,
    validate,
)
from .engine import (
    CaseLabel,
    IntegrationOptions,
    MaterialState,
    ResponseMode,
    Segment,
    Trajectory,
    classify,
    in_elastic_domain,
    integrate,
    resolve_case_iii,
    rhs,
)
from .analysis import (
    LimitSurfacePoint,
    LimitSurfaceReport,
    StressPath,
    decompose_stretching,
    equilibrium_stretching,
    hardening_rate_check,
    limit_ratio_rhs,
    limit_surface_scan,
    locate_limit_radius,
    normality_check,
    plastic_work,
    radial_limit_path,
    stress_driven_stretching,
    stress_drift,
    stressing_power_sign,
    verify_equilibrium,
)
from .scenario import PortraitSpec, Scenario, load_scenario, parse_scenario
from .verification import CheckResult, VERIFY_SUITES, run_suite

__version__ = "0.1.0"
