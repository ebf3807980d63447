"""spstack: feasible and force-optimal poses for serial stacks of Stewart
platforms.

The pipeline: a helper-arm initializer produces a feasible stack pose for a
goal end-effector transform, a static truss model prices every actuator
force, and a constrained minimizer refines the interior plate poses.
"""

from ._kernels import backend as kernel_backend
from .errors import (
    ConvergenceFailureError,
    DegenerateConfigurationError,
    SingularConfigurationError,
    SpstackError,
)
from .initializer import (
    HelperArm,
    InitResult,
    InitializerParams,
    build_helper_arm,
    helper_arm_ik,
    initial_condition,
    place_plates,
)
from .optimize import (
    ConstraintReport,
    OptimizationResult,
    OptimizerConfig,
    constraints,
    objective,
    optimize_pose,
    plate_deviation_angles,
)
from .platform import (
    PlatformGeometry,
    PlatformState,
    anchor_positions_global,
    default_geometry,
    deviation_angles,
    fk_numeric,
    home_state,
    ik_leg_lengths,
)
from .scenarios import (
    ScenarioReport,
    ScenarioSpec,
    builtin_scenarios,
    default_stack,
    render_force_table,
    run_scenario,
)
from .spatial import (
    TaaPose,
    Transform,
    rotation_from_axis_angle,
    taa_from_transform,
    transform_from_taa,
)
from .stack import (
    PlatformStack,
    StackPose,
    home_pose,
    pack_decision,
    stack_fk,
    stack_leg_matrix,
    unpack_decision,
    z_continuity_ok,
)
from .statics import (
    ForceMatrix,
    MassModel,
    Wrench,
    accumulate_wrench_above,
    platform_leg_forces,
    stack_leg_forces,
)

__version__ = "0.1.0"
