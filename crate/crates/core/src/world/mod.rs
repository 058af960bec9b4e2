//! The world model: maps, trajectory recordings, Frenet-frame geometry.

pub mod geometry;
mod map;
mod trajectory;

pub use geometry::{wrap_angle, Obb, Point, Polyline, PolylineError};
pub use map::{
    Lane, LaneId, LanePosition, LaneType, MapError, MapModel, NoLaneFound, LATERAL_TOLERANCE,
};
pub use trajectory::{
    assemble, load_trajectories, longitudinal_gap, write_native_csv, AgentId, AgentState,
    GapError, RawRow, Scene, Trace, TrajectoryError, TrajectoryFormat,
};
