//! Trajectory recordings: per-timestep scenes of agent states, loaded from
//! CSV (native layout or the INTERACTION dataset layout), with kinematics
//! derived by finite differences where the file does not provide them.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::geometry::Point;
use super::map::{LaneId, MapModel};

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub struct AgentId(pub u64);

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One agent at one timestep, already assigned to a lane.
#[derive(Debug, Clone)]
pub struct AgentState {
    pub id: AgentId,
    pub time: f64,
    pub position: Point,
    pub speed: f64,
    pub heading: f64,
    /// Signed longitudinal acceleration, m/s².
    pub accel: f64,
    pub length: f64,
    pub width: f64,
    pub lane: LaneId,
    /// Arc length along the assigned lane centerline.
    pub s: f64,
    pub lateral: f64,
}

impl AgentState {
    pub fn s_front(&self) -> f64 {
        self.s + self.length / 2.0
    }

    pub fn s_rear(&self) -> f64 {
        self.s - self.length / 2.0
    }
}

/// Immutable snapshot of all agents at one timestep.
#[derive(Debug, Clone, Default)]
pub struct Scene {
    pub time: f64,
    pub agents: BTreeMap<AgentId, AgentState>,
}

/// A time-ordered recording plus the map it is registered against.
#[derive(Debug)]
pub struct Trace {
    pub map: Arc<MapModel>,
    pub scenes: Vec<Scene>,
    pub dt: f64,
    /// First and last scene index (inclusive) each agent appears in the
    /// source data. Presence is contiguous over this interval, except for
    /// scenes where the agent was off the mapped region.
    lifespans: BTreeMap<AgentId, (usize, usize)>,
    /// (agent, scene) pairs dropped because the pose projected onto no lane.
    pub dropped: Vec<(AgentId, usize)>,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.scenes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scenes.is_empty()
    }

    pub fn agents(&self) -> impl Iterator<Item = AgentId> + '_ {
        self.lifespans.keys().copied()
    }

    pub fn agent_count(&self) -> usize {
        self.lifespans.len()
    }

    pub fn lifespan(&self, agent: AgentId) -> Option<(usize, usize)> {
        self.lifespans.get(&agent).copied()
    }

    pub fn lifespans(&self) -> &BTreeMap<AgentId, (usize, usize)> {
        &self.lifespans
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrajectoryFormat {
    NativeCsv,
    InteractionCsv,
}

/// One parsed input row, before lane assignment.
#[derive(Debug, Clone)]
pub struct RawRow {
    pub track_id: u64,
    pub frame: i64,
    pub timestamp_ms: i64,
    pub x: f64,
    pub y: f64,
    pub vx: Option<f64>,
    pub vy: Option<f64>,
    pub psi: f64,
    pub length: f64,
    pub width: f64,
}

#[derive(Debug, Error)]
pub enum TrajectoryError {
    #[error("failed to read trajectory file: {0}")]
    Io(#[from] std::io::Error),
    #[error("failed to parse trajectory CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("trajectory file is missing column `{0}`")]
    MissingColumn(&'static str),
    #[error("trajectory row {line}: bad value in column `{column}`")]
    BadValue { line: usize, column: &'static str },
    #[error("agent {agent}: timestamps are not strictly increasing at frame {frame}")]
    NonMonotonicTimestamps { agent: AgentId, frame: i64 },
    #[error("agent {agent}: missing frame {frame} (presence must be contiguous)")]
    AgentGap { agent: AgentId, frame: i64 },
    #[error("frame {frame}: agents disagree on its timestamp")]
    InconsistentTimestamp { frame: i64 },
    #[error("frame period is not constant: saw {a} ms and {b} ms")]
    NonConstantPeriod { a: i64, b: i64 },
    #[error("agent {agent}: non-positive {dimension} {value}")]
    BadDimension {
        agent: AgentId,
        dimension: &'static str,
        value: f64,
    },
    #[error("trajectory file contains no rows")]
    Empty,
}

/// Loads a trajectory file and registers it against `map`.
///
/// Speed is taken from the velocity columns when present, otherwise derived
/// by central finite differences over position (one-sided at the ends).
/// Acceleration is always derived from the speed series the same way.
/// Poses that project onto no lane are dropped from that scene and recorded
/// in [`Trace::dropped`].
pub fn load_trajectories(
    path: impl AsRef<Path>,
    map: Arc<MapModel>,
    format: TrajectoryFormat,
) -> Result<Trace, TrajectoryError> {
    let mut reader = csv::Reader::from_path(path.as_ref())?;
    let headers = reader.headers()?.clone();
    let col = |name: &'static str| -> Option<usize> {
        headers.iter().position(|h| h.trim() == name)
    };
    let require = |name: &'static str| -> Result<usize, TrajectoryError> {
        col(name).ok_or(TrajectoryError::MissingColumn(name))
    };

    let frame_col = match format {
        TrajectoryFormat::NativeCsv => require("frame")?,
        TrajectoryFormat::InteractionCsv => require("frame_id")?,
    };
    let track_col = require("track_id")?;
    let ts_col = require("timestamp_ms")?;
    let x_col = require("x")?;
    let y_col = require("y")?;
    let psi_col = require("psi_rad")?;
    let len_col = require("length")?;
    let wid_col = require("width")?;
    let vx_col = col("vx");
    let vy_col = col("vy");
    let type_col = col("agent_type");

    let mut rows = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let record = record?;
        let line = idx + 2;
        // only vehicle tracks are monitored; skip pedestrian/bicycle rows
        if let Some(type_col) = type_col {
            let kind = record.get(type_col).unwrap_or("").trim();
            if !kind.is_empty() && kind != "car" && kind != "truck" {
                continue;
            }
        }
        let parse_f64 = |column: &'static str, idx: usize| -> Result<f64, TrajectoryError> {
            record
                .get(idx)
                .and_then(|v| v.trim().parse::<f64>().ok())
                .ok_or(TrajectoryError::BadValue { line, column })
        };
        let parse_i64 = |column: &'static str, idx: usize| -> Result<i64, TrajectoryError> {
            record
                .get(idx)
                .and_then(|v| v.trim().parse::<i64>().ok())
                .ok_or(TrajectoryError::BadValue { line, column })
        };
        let opt_f64 = |idx: Option<usize>| -> Option<f64> {
            idx.and_then(|i| record.get(i)).and_then(|v| {
                let v = v.trim();
                if v.is_empty() {
                    None
                } else {
                    v.parse::<f64>().ok()
                }
            })
        };
        rows.push(RawRow {
            track_id: parse_i64("track_id", track_col)? as u64,
            frame: parse_i64("frame", frame_col)?,
            timestamp_ms: parse_i64("timestamp_ms", ts_col)?,
            x: parse_f64("x", x_col)?,
            y: parse_f64("y", y_col)?,
            vx: opt_f64(vx_col),
            vy: opt_f64(vy_col),
            psi: parse_f64("psi_rad", psi_col)?,
            length: parse_f64("length", len_col)?,
            width: parse_f64("width", wid_col)?,
        });
    }
    assemble(rows, map)
}

/// Builds a [`Trace`] from parsed rows; the entry point test fixtures use.
pub fn assemble(rows: Vec<RawRow>, map: Arc<MapModel>) -> Result<Trace, TrajectoryError> {
    if rows.is_empty() {
        return Err(TrajectoryError::Empty);
    }

    // group per agent, ordered by frame
    let mut per_agent: BTreeMap<AgentId, Vec<RawRow>> = BTreeMap::new();
    for row in rows {
        per_agent.entry(AgentId(row.track_id)).or_default().push(row);
    }
    let mut frame_times: BTreeMap<i64, i64> = BTreeMap::new();
    for (agent, rows) in per_agent.iter_mut() {
        rows.sort_by_key(|r| r.frame);
        for row in rows.iter() {
            for (dimension, value) in [("length", row.length), ("width", row.width)] {
                if value.is_nan() || value <= 0.0 {
                    return Err(TrajectoryError::BadDimension {
                        agent: *agent,
                        dimension,
                        value,
                    });
                }
            }
        }
        for pair in rows.windows(2) {
            if pair[1].frame != pair[0].frame + 1 {
                return Err(TrajectoryError::AgentGap {
                    agent: *agent,
                    frame: pair[0].frame + 1,
                });
            }
            if pair[1].timestamp_ms <= pair[0].timestamp_ms {
                return Err(TrajectoryError::NonMonotonicTimestamps {
                    agent: *agent,
                    frame: pair[1].frame,
                });
            }
        }
        for row in rows.iter() {
            match frame_times.get(&row.frame) {
                Some(&ts) if ts != row.timestamp_ms => {
                    return Err(TrajectoryError::InconsistentTimestamp { frame: row.frame })
                }
                Some(_) => {}
                None => {
                    frame_times.insert(row.frame, row.timestamp_ms);
                }
            }
        }
    }

    let first_frame = *frame_times.keys().next().unwrap();
    let last_frame = *frame_times.keys().next_back().unwrap();
    let frame_count = (last_frame - first_frame + 1) as usize;

    // constant period over observed consecutive frames
    let mut period_ms: Option<i64> = None;
    for (&frame, &ts) in &frame_times {
        if let Some(&prev_ts) = frame_times.get(&(frame - 1)) {
            let step = ts - prev_ts;
            match period_ms {
                None => period_ms = Some(step),
                Some(p) if p != step => {
                    return Err(TrajectoryError::NonConstantPeriod { a: p, b: step })
                }
                Some(_) => {}
            }
        }
    }
    let dt = period_ms.map_or(0.1, |ms| ms as f64 / 1000.0);

    let mut scenes: Vec<Scene> = (0..frame_count)
        .map(|i| Scene {
            time: frame_times
                .get(&(first_frame + i as i64))
                .map(|&ms| ms as f64 / 1000.0)
                .unwrap_or((frame_times[&first_frame] as f64 + i as f64 * dt * 1000.0) / 1000.0),
            agents: BTreeMap::new(),
        })
        .collect();
    let mut lifespans: BTreeMap<AgentId, (usize, usize)> = BTreeMap::new();
    let mut dropped: Vec<(AgentId, usize)> = Vec::new();

    for (agent, rows) in &per_agent {
        let speeds = derive_speeds(rows, dt);
        let accels = derive_rates(&speeds, dt);
        let start = (rows[0].frame - first_frame) as usize;
        let end = start + rows.len() - 1;
        lifespans.insert(*agent, (start, end));
        for (offset, row) in rows.iter().enumerate() {
            let scene_idx = start + offset;
            let position = Point::new(row.x, row.y);
            match map.project(position, row.psi) {
                Ok(pos) => {
                    scenes[scene_idx].agents.insert(
                        *agent,
                        AgentState {
                            id: *agent,
                            time: row.timestamp_ms as f64 / 1000.0,
                            position,
                            speed: speeds[offset],
                            heading: row.psi,
                            accel: accels[offset],
                            length: row.length,
                            width: row.width,
                            lane: pos.lane,
                            s: pos.s,
                            lateral: pos.lateral,
                        },
                    );
                }
                Err(_) => dropped.push((*agent, scene_idx)),
            }
        }
    }
    dropped.sort();

    Ok(Trace {
        map,
        scenes,
        dt,
        lifespans,
        dropped,
    })
}

fn derive_speeds(rows: &[RawRow], dt: f64) -> Vec<f64> {
    if rows.iter().all(|r| r.vx.is_some() && r.vy.is_some()) {
        return rows
            .iter()
            .map(|r| r.vx.unwrap().hypot(r.vy.unwrap()))
            .collect();
    }
    let positions: Vec<Point> = rows.iter().map(|r| Point::new(r.x, r.y)).collect();
    let n = positions.len();
    (0..n)
        .map(|i| {
            if n == 1 {
                0.0
            } else if i == 0 {
                positions[1].distance(positions[0]) / dt
            } else if i == n - 1 {
                positions[n - 1].distance(positions[n - 2]) / dt
            } else {
                (positions[i + 1] - positions[i - 1]).norm() / (2.0 * dt)
            }
        })
        .collect()
}

/// Central finite differences of a scalar series, one-sided at the ends.
fn derive_rates(values: &[f64], dt: f64) -> Vec<f64> {
    let n = values.len();
    (0..n)
        .map(|i| {
            if n == 1 {
                0.0
            } else if i == 0 {
                (values[1] - values[0]) / dt
            } else if i == n - 1 {
                (values[n - 1] - values[n - 2]) / dt
            } else {
                (values[i + 1] - values[i - 1]) / (2.0 * dt)
            }
        })
        .collect()
}

/// Writes a trace back out in the native CSV layout.
pub fn write_native_csv(trace: &Trace, path: impl AsRef<Path>) -> Result<(), TrajectoryError> {
    let mut writer = csv::Writer::from_path(path.as_ref())?;
    writer.write_record([
        "track_id",
        "frame",
        "timestamp_ms",
        "x",
        "y",
        "vx",
        "vy",
        "psi_rad",
        "length",
        "width",
    ])?;
    for (idx, scene) in trace.scenes.iter().enumerate() {
        for state in scene.agents.values() {
            writer.write_record([
                state.id.0.to_string(),
                idx.to_string(),
                ((state.time * 1000.0).round() as i64).to_string(),
                state.position.x.to_string(),
                state.position.y.to_string(),
                (state.speed * state.heading.cos()).to_string(),
                (state.speed * state.heading.sin()).to_string(),
                state.heading.to_string(),
                state.length.to_string(),
                state.width.to_string(),
            ])?;
        }
    }
    writer.flush().map_err(TrajectoryError::Io)?;
    Ok(())
}

/// Signed bumper-to-bumper distance between two agents measured along `j`'s
/// lane centerline, after projecting `i` into that lane's frame. Positive is
/// clear space, negative is the depth of longitudinal overlap.
pub fn longitudinal_gap(
    i: &AgentState,
    j: &AgentState,
    map: &MapModel,
) -> Result<f64, GapError> {
    if !map.same_carriageway(i.lane, j.lane) {
        return Err(GapError::DifferentCarriageway {
            a: i.lane,
            b: j.lane,
        });
    }
    let lane = map.lane(j.lane).expect("agent lane exists in map");
    let s_i = if i.lane == j.lane {
        i.s
    } else {
        lane.centerline.project(i.position).s
    };
    let (i_rear, i_front) = (s_i - i.length / 2.0, s_i + i.length / 2.0);
    let (j_rear, j_front) = (j.s_rear(), j.s_front());
    Ok((j_rear - i_front).max(i_rear - j_front))
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GapError {
    #[error("lanes {a} and {b} belong to different carriageways")]
    DifferentCarriageway { a: LaneId, b: LaneId },
}
