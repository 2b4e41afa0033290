//! Hybrid multi-robot motion planning by scheduling over fixed paths.
//!
//! Each robot plans alone on a constrained probabilistic roadmap. A
//! coordination-space scheduler then inserts random stops into the combined
//! path set, and collisions it cannot schedule away are fed back to the
//! robots so that their next paths detour around contested regions.

pub mod benchmark;
pub mod constraints;
pub mod feedback;
pub mod geometry;
pub mod planners;
pub mod roadmap;
pub mod scenario;
pub mod scheduler;
pub mod solution_file;
pub mod validate;

pub use constraints::{ConstraintError, ConstraintKind, ManifoldConstraint};
pub use geometry::{
    robot_robot_collision, robot_world_collision, Aabb, Body, Capsule, Configuration, GeometryError, Obstacle,
    Pose2, RobotModel, Vec2, World,
};
pub use roadmap::{build_roadmap, Path, Roadmap, RoadmapError, RoadmapParams, Segment, Terminals, Trajectory};
pub use scheduler::{
    collision_check, default_resolution, sample_candidate, schedule, schedule_in_order, schedule_priority,
    CandidateSolution, CollisionEvent,
};
pub use feedback::{
    normalize, random_walk_region, record_collision, CollisionHistory, CollisionRecord, FeedbackParams,
    HistoryElement, RobotPlanner,
};
pub use planners::{
    brute_force_schedule, priority_solve, stac_solve, synchronous_solve, Failure, FailureReason, PlannerKind,
    PlannerStats, Solution, StacParams,
};
pub use scenario::{RobotSpec, Scenario, ScenarioError};
pub use benchmark::{run_benchmark, Aggregate, BenchmarkConfig, BenchmarkReport, BenchmarkRow, Quartiles};
pub use solution_file::{read_solution, write_solution, SolutionFileError, SolutionRecord};
pub use validate::validate_solution;
