//! Map model: lanes with centerlines, adjacency, lane types, and the
//! static facts the predicates consume (built-up, motorway, lane ends,
//! merging points).

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::geometry::{wrap_angle, Point, Polyline, PolylineError};

pub type LaneId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LaneType {
    Normal,
    Diverging,
    Acceleration,
    Deceleration,
}

#[derive(Debug, Clone)]
pub struct Lane {
    pub id: LaneId,
    pub lane_type: LaneType,
    pub width: f64,
    pub left: Option<LaneId>,
    pub right: Option<LaneId>,
    /// Arc length at which the lane ends; `None` for a continuing lane.
    pub end_s: Option<f64>,
    /// Static merging point: past this arc length a merge is no longer
    /// possible.
    pub merge_s: Option<f64>,
    pub centerline: Polyline,
}

#[derive(Debug, Error)]
pub enum MapError {
    #[error("failed to read map: {0}")]
    Io(#[from] std::io::Error),
    #[error("failed to parse map JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("duplicate lane id {0}")]
    DuplicateLane(LaneId),
    #[error("lane {lane}: unknown {side} neighbor {neighbor}")]
    UnknownNeighbor {
        lane: LaneId,
        side: &'static str,
        neighbor: LaneId,
    },
    #[error("lanes {a} and {b}: left/right adjacency is not symmetric")]
    AsymmetricAdjacency { a: LaneId, b: LaneId },
    #[error("lane {lane}: {source}")]
    BadCenterline {
        lane: LaneId,
        #[source]
        source: PolylineError,
    },
    #[error("lane {lane}: end_s {end_s} exceeds centerline length {length}")]
    EndBeyondCenterline { lane: LaneId, end_s: f64, length: f64 },
    #[error("lane {lane}: width must be positive, got {width}")]
    BadWidth { lane: LaneId, width: f64 },
}

#[derive(Debug, Error, PartialEq)]
#[error("no lane within tolerance of point ({x:.2}, {y:.2})")]
pub struct NoLaneFound {
    pub x: f64,
    pub y: f64,
}

/// Result of projecting a pose onto the map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanePosition {
    pub lane: LaneId,
    pub s: f64,
    pub lateral: f64,
}

/// Lateral slack beyond half the lane width still accepted as "on lane".
pub const LATERAL_TOLERANCE: f64 = 0.5;

#[derive(Debug, Serialize, Deserialize)]
struct MapFile {
    built_up: bool,
    motorway: bool,
    lanes: Vec<LaneFile>,
}

#[derive(Debug, Serialize, Deserialize)]
struct LaneFile {
    id: LaneId,
    #[serde(rename = "type")]
    lane_type: LaneType,
    width: f64,
    left: Option<LaneId>,
    right: Option<LaneId>,
    #[serde(default)]
    end_s: Option<f64>,
    #[serde(default)]
    merge_s: Option<f64>,
    centerline: Vec<[f64; 2]>,
}

#[derive(Debug)]
pub struct MapModel {
    pub built_up: bool,
    pub motorway: bool,
    lanes: Vec<Lane>,
    by_id: HashMap<LaneId, usize>,
    /// Connected component of the left/right adjacency graph per lane:
    /// lanes in different components belong to different carriageways.
    component: HashMap<LaneId, usize>,
}

impl MapModel {
    pub fn from_json(text: &str) -> Result<Self, MapError> {
        let file: MapFile = serde_json::from_str(text)?;
        Self::build(file)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, MapError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn new(built_up: bool, motorway: bool, lanes: Vec<Lane>) -> Result<Self, MapError> {
        let mut by_id = HashMap::new();
        for (idx, lane) in lanes.iter().enumerate() {
            if lane.width <= 0.0 {
                return Err(MapError::BadWidth {
                    lane: lane.id,
                    width: lane.width,
                });
            }
            if let Some(end_s) = lane.end_s {
                let length = lane.centerline.length();
                if end_s > length {
                    return Err(MapError::EndBeyondCenterline {
                        lane: lane.id,
                        end_s,
                        length,
                    });
                }
            }
            if by_id.insert(lane.id, idx).is_some() {
                return Err(MapError::DuplicateLane(lane.id));
            }
        }
        for lane in &lanes {
            for (side, neighbor) in [("left", lane.left), ("right", lane.right)] {
                if let Some(neighbor) = neighbor {
                    let Some(&n_idx) = by_id.get(&neighbor) else {
                        return Err(MapError::UnknownNeighbor {
                            lane: lane.id,
                            side,
                            neighbor,
                        });
                    };
                    let back = if side == "left" {
                        lanes[n_idx].right
                    } else {
                        lanes[n_idx].left
                    };
                    if back != Some(lane.id) {
                        return Err(MapError::AsymmetricAdjacency {
                            a: lane.id,
                            b: neighbor,
                        });
                    }
                }
            }
        }

        // union neighbors into carriageway components
        let mut component: HashMap<LaneId, usize> = HashMap::new();
        let mut next_component = 0;
        for lane in &lanes {
            if component.contains_key(&lane.id) {
                continue;
            }
            let mut stack = vec![lane.id];
            while let Some(id) = stack.pop() {
                if component.insert(id, next_component).is_some() {
                    continue;
                }
                let lane = &lanes[by_id[&id]];
                for neighbor in [lane.left, lane.right].into_iter().flatten() {
                    if !component.contains_key(&neighbor) {
                        stack.push(neighbor);
                    }
                }
            }
            next_component += 1;
        }

        Ok(MapModel {
            built_up,
            motorway,
            lanes,
            by_id,
            component,
        })
    }

    fn build(file: MapFile) -> Result<Self, MapError> {
        let lanes = file
            .lanes
            .into_iter()
            .map(|lane| {
                let points = lane.centerline.iter().map(|[x, y]| Point::new(*x, *y)).collect();
                let centerline = Polyline::new(points).map_err(|source| MapError::BadCenterline {
                    lane: lane.id,
                    source,
                })?;
                Ok(Lane {
                    id: lane.id,
                    lane_type: lane.lane_type,
                    width: lane.width,
                    left: lane.left,
                    right: lane.right,
                    end_s: lane.end_s,
                    merge_s: lane.merge_s,
                    centerline,
                })
            })
            .collect::<Result<Vec<_>, MapError>>()?;
        Self::new(file.built_up, file.motorway, lanes)
    }

    pub fn lanes(&self) -> &[Lane] {
        &self.lanes
    }

    pub fn lane(&self, id: LaneId) -> Option<&Lane> {
        self.by_id.get(&id).map(|&idx| &self.lanes[idx])
    }

    pub fn same_carriageway(&self, a: LaneId, b: LaneId) -> bool {
        match (self.component.get(&a), self.component.get(&b)) {
            (Some(x), Some(y)) => x == y,
            _ => false,
        }
    }

    /// True when lane `a` lies somewhere in the chain of left neighbors of
    /// lane `b`.
    pub fn is_left_of(&self, a: LaneId, b: LaneId) -> bool {
        let mut seen = Vec::new();
        let mut current = self.lane(b).and_then(|l| l.left);
        while let Some(id) = current {
            if id == a {
                return true;
            }
            if seen.contains(&id) {
                break;
            }
            seen.push(id);
            current = self.lane(id).and_then(|l| l.left);
        }
        false
    }

    pub fn is_right_of(&self, a: LaneId, b: LaneId) -> bool {
        let mut seen = Vec::new();
        let mut current = self.lane(b).and_then(|l| l.right);
        while let Some(id) = current {
            if id == a {
                return true;
            }
            if seen.contains(&id) {
                break;
            }
            seen.push(id);
            current = self.lane(id).and_then(|l| l.right);
        }
        false
    }

    /// Assigns a pose to the best-matching lane: smallest absolute lateral
    /// offset among lanes whose corridor (half width plus tolerance)
    /// contains the point; ties by heading alignment with the centerline
    /// tangent, then by lower lane id.
    pub fn project(&self, p: Point, heading: f64) -> Result<LanePosition, NoLaneFound> {
        let mut best: Option<(f64, f64, LaneId, LanePosition)> = None;
        for lane in &self.lanes {
            let proj = lane.centerline.project(p);
            let abs_lateral = proj.lateral.abs();
            if abs_lateral > lane.width / 2.0 + LATERAL_TOLERANCE {
                continue;
            }
            let tangent_angle = proj.tangent.y.atan2(proj.tangent.x);
            let heading_diff = wrap_angle(heading - tangent_angle).abs();
            let candidate = (
                abs_lateral,
                heading_diff,
                lane.id,
                LanePosition {
                    lane: lane.id,
                    s: proj.s,
                    lateral: proj.lateral,
                },
            );
            let better = match &best {
                None => true,
                Some((best_lat, best_heading, best_id, _)) => {
                    if (abs_lateral - best_lat).abs() > 1e-9 {
                        abs_lateral < *best_lat
                    } else if (heading_diff - best_heading).abs() > 1e-9 {
                        heading_diff < *best_heading
                    } else {
                        lane.id < *best_id
                    }
                }
            };
            if better {
                best = Some(candidate);
            }
        }
        best.map(|(_, _, _, pos)| pos)
            .ok_or(NoLaneFound { x: p.x, y: p.y })
    }
}
