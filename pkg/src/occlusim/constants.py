"""Physical constants shared across the simulator. All lengths in meters."""

from enum import IntEnum

# Simulation clock
DT = 0.01                   # physics timestep, 100 Hz
CAMERA_PERIOD_STEPS = 3     # cameras + controller run every 3rd step (~33 Hz)
TRACE_PERIOD_STEPS = 10     # object trace sampled at 10 Hz

# Robot body
ROBOT_RADIUS = 0.04
ROBOT_HEIGHT = 0.06
ROBOT_MASS = 0.300
WHEEL_SEPARATION = 0.06
WHEEL_SPEED_MAX = 0.5       # m/s per wheel surface

# Robot sensing
CAMERA_HEIGHT = 0.09
CAMERA_RESOLUTION = 64      # pixels per side, per camera
N_CAMERAS = 4
N_COLUMNS = N_CAMERAS * CAMERA_RESOLUTION
IR_COUNT = 8
IR_HEIGHT = 0.03
IR_MAX_RANGE = 0.30

# Object / goal
OBJECT_MASS = 5.0
OBJECT_HEIGHT = 0.20
GOAL_RADIUS = 0.20
GOAL_HEIGHT = 0.20

# Arena
ARENA_SIZE = 3.0
WALL_HEIGHT = 0.20

# Contact / friction model (see physics module for rationale)
ROBOT_PUSH_FORCE_MAX = 2.0      # traction-limited force per robot, N
OBJECT_STATIC_FRICTION = 3.8    # ground dry-friction force threshold, N
OBJECT_VISCOUS_FRICTION = 20.0  # N*s/m (2.0 N at 0.1 m/s)
OBJECT_STATIC_TORQUE = 0.6      # N*m, keeps a single off-center robot from spinning the object
OBJECT_VISCOUS_TORQUE = 1.0     # N*m*s


class ColorClass(IntEnum):
    """Pixel classes emitted by the synthetic cameras."""

    FLOOR = 0
    WALL_BLACK = 1
    ROBOT_BLUE = 2
    GOAL_GREEN = 3
    OBJECT_RED = 4
    SKY = 5


# Entity heights as seen by the cameras
HEIGHT_BY_CLASS = {
    ColorClass.WALL_BLACK: WALL_HEIGHT,
    ColorClass.ROBOT_BLUE: ROBOT_HEIGHT,
    ColorClass.GOAL_GREEN: GOAL_HEIGHT,   # static goal; sub-goal robots use ROBOT_HEIGHT
    ColorClass.OBJECT_RED: OBJECT_HEIGHT,
}
