"""Attitude control for the fully actuated rigid body, designed in the
ambient 3x3 matrix space with a manifold-attractive modification."""

from .controllers import (
    ControllerState,
    GainSet,
    GainValidationError,
    HurwitzReport,
    Variant,
    check_hurwitz_matrix,
    check_hurwitz_poly,
    epsilon_bound,
    pd_stabilizer,
    pid_stabilizer,
    tracking_control,
)
from .dynamics import (
    AmbientParams,
    ConstraintSpec,
    InertiaMatrix,
    ReferenceTrajectory,
    RigidState,
    cancel_gyroscopic_torque,
    make_attractive,
    manifold_potential_and_gradient,
    modified_vector_field,
    reference_consistency_check,
)
from .linearize import (
    LinearizedOperator,
    ZState,
    finite_difference_jacobian,
    flatten_rigid,
    linearize_along_trajectory,
    linearize_at_equilibrium,
    unflatten_rigid,
    z_dynamics,
    z_transform,
)
from .references import builtin_tracking_reference, constant_reference, spin_reference
from .simulate import (
    LOG_COLUMNS,
    NumericsError,
    Scenario,
    SimConfig,
    TrajectoryLog,
    error_metrics,
    exp_envelope_fit,
    rk4_step,
    run_scenario,
)
from .so3 import (
    RotationCheck,
    cross,
    exp_so3,
    frobenius_inner,
    hat,
    mat3,
    rotation_check,
    sym_skew_split,
    vec3,
    vee,
)

__version__ = "0.1.0"
