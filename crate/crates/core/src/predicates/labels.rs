//! The atomic propositions, evaluated per scene over agent tuples.
//!
//! Each proposition has a base name (`behind`, `sd_front`, ...) and refers
//! to one or two agent slots via its `_i`/`_ij`/... suffix. All thresholds
//! use strict inequalities; exact ties resolve to false.
//!
//! Directions: the relational labels describe where agent `i` sits relative
//! to agent `j` (`behind_ij` means i is behind j). `in_direct_front_ij`
//! holds when j is i's immediate same-lane predecessor — the direction the
//! zipper-merge rule relies on ("j will not be directly in front of i after
//! the merging point").

use thiserror::Error;

use crate::world::{
    longitudinal_gap, AgentId, AgentState, GapError, MapModel, Obb, Scene, Trace,
};

use super::params::PredicateParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PropKind {
    Dense,
    InDirectFront,
    Right,
    Left,
    Front,
    Behind,
    Merged,
    SdFront,
    SdRear,
    Colliding,
    LaneChange,
    Near,
    LaneEnd,
    Accelerate,
    SpeedDiff,
    BuiltUp,
    Motorway,
    DivergingLane,
    AccelerationLane,
}

/// All proposition kinds with their base names.
pub const ALL_KINDS: [(PropKind, &str); 19] = [
    (PropKind::Dense, "dense"),
    (PropKind::InDirectFront, "in_direct_front"),
    (PropKind::Right, "right"),
    (PropKind::Left, "left"),
    (PropKind::Front, "front"),
    (PropKind::Behind, "behind"),
    (PropKind::Merged, "merged"),
    (PropKind::SdFront, "sd_front"),
    (PropKind::SdRear, "sd_rear"),
    (PropKind::Colliding, "colliding"),
    (PropKind::LaneChange, "lane_change"),
    (PropKind::Near, "near"),
    (PropKind::LaneEnd, "lane_end"),
    (PropKind::Accelerate, "accelerate"),
    (PropKind::SpeedDiff, "speed_diff"),
    (PropKind::BuiltUp, "built_up"),
    (PropKind::Motorway, "motorway"),
    (PropKind::DivergingLane, "diverging_lane"),
    (PropKind::AccelerationLane, "acceleration_lane"),
];

impl PropKind {
    pub fn from_base(base: &str) -> Option<PropKind> {
        ALL_KINDS
            .iter()
            .find(|(_, name)| *name == base)
            .map(|(kind, _)| *kind)
    }

    pub fn base_name(self) -> &'static str {
        ALL_KINDS
            .iter()
            .find(|(kind, _)| *kind == self)
            .map(|(_, name)| *name)
            .unwrap()
    }

    /// Number of agent slots the proposition relates.
    pub fn arity(self) -> usize {
        match self {
            PropKind::InDirectFront
            | PropKind::Right
            | PropKind::Left
            | PropKind::Front
            | PropKind::Behind
            | PropKind::Near
            | PropKind::SpeedDiff => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum LabelError {
    #[error("unknown proposition `{0}`")]
    UnknownProposition(String),
    #[error("proposition `{prop}` relates {needed} agents but got {got}")]
    WrongArity {
        prop: &'static str,
        needed: usize,
        got: usize,
    },
    #[error("agent {agent} is not present in scene {scene}")]
    MissingAgent { agent: AgentId, scene: usize },
    #[error(transparent)]
    Gap(#[from] GapError),
}

/// Relational position of agent `i` with respect to agent `j`, measured in
/// j's lane frame. The regions overlap partially: a vehicle alongside may
/// be `behind` and `left` at the same time, which is what lets the chain
/// `behind U right U front` describe passing rather than full overtaking.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RelationalLabels {
    pub behind: bool,
    pub front: bool,
    pub left: bool,
    pub right: bool,
}

/// Computes the four relational labels of `i` with respect to `j`.
pub fn relational(
    i: &AgentState,
    j: &AgentState,
    map: &MapModel,
    params: &PredicateParams,
) -> Result<RelationalLabels, GapError> {
    if !map.same_carriageway(i.lane, j.lane) {
        return Err(GapError::DifferentCarriageway { a: i.lane, b: j.lane });
    }
    // project i into j's lane frame
    let s_i = if i.lane == j.lane {
        i.s
    } else {
        map.lane(j.lane)
            .expect("agent lane exists")
            .centerline
            .project(i.position)
            .s
    };
    let i_front = s_i + i.length / 2.0;
    let i_rear = s_i - i.length / 2.0;
    let behind = i_front < j.s_front();
    let front = i_rear > j.s_rear();
    // lateral labels require adjacency and longitudinal spans overlapping
    // or within delta_near
    let span_gap = (j.s_rear() - i_front).max(i_rear - j.s_front());
    let spans_close = span_gap < params.delta_near;
    let left = spans_close && map.is_left_of(i.lane, j.lane);
    let right = spans_close && map.is_right_of(i.lane, j.lane);
    Ok(RelationalLabels {
        behind,
        front,
        left,
        right,
    })
}

/// Same-lane agent directly ahead of `agent`: minimal positive
/// bumper-to-bumper gap. Ties break to the lower agent id.
pub fn predecessor_of(scene: &Scene, agent: &AgentState, map: &MapModel) -> Option<AgentId> {
    let mut best: Option<(f64, AgentId)> = None;
    for other in scene.agents.values() {
        if other.id == agent.id || other.lane != agent.lane || other.s <= agent.s {
            continue;
        }
        let gap = longitudinal_gap(agent, other, map).expect("same lane");
        if gap <= 0.0 {
            continue;
        }
        let better = match best {
            None => true,
            Some((best_gap, best_id)) => {
                gap < best_gap || (gap == best_gap && other.id < best_id)
            }
        };
        if better {
            best = Some((gap, other.id));
        }
    }
    best.map(|(_, id)| id)
}

/// Same-lane agent directly behind `agent`.
pub fn follower_of(scene: &Scene, agent: &AgentState, map: &MapModel) -> Option<AgentId> {
    let mut best: Option<(f64, AgentId)> = None;
    for other in scene.agents.values() {
        if other.id == agent.id || other.lane != agent.lane || other.s >= agent.s {
            continue;
        }
        let gap = longitudinal_gap(agent, other, map).expect("same lane");
        if gap <= 0.0 {
            continue;
        }
        let better = match best {
            None => true,
            Some((best_gap, best_id)) => {
                gap < best_gap || (gap == best_gap && other.id < best_id)
            }
        };
        if better {
            best = Some((gap, other.id));
        }
    }
    best.map(|(_, id)| id)
}

/// At least `n_dense` other agents closer than `rho_dense` (center
/// distance, strict).
pub fn dense(scene: &Scene, agent: &AgentState, params: &PredicateParams) -> bool {
    let count = scene
        .agents
        .values()
        .filter(|other| {
            other.id != agent.id
                && other.position.distance(agent.position) < params.rho_dense
        })
        .count();
    count >= params.n_dense
}

/// Required stopping gap to the predecessor: cover the reaction time, then
/// brake from own speed, credited with the leader's own stopping distance.
fn required_distance(v_rear: f64, v_front: f64, params: &PredicateParams) -> f64 {
    (v_rear * params.reaction_time + v_rear * v_rear / (2.0 * params.decel_max_rear)
        - v_front * v_front / (2.0 * params.decel_max_front))
        .max(0.0)
}

/// Safe distance to the preceding vehicle; vacuously true without one.
pub fn safe_distance_front(
    scene: &Scene,
    agent: &AgentState,
    map: &MapModel,
    params: &PredicateParams,
) -> bool {
    let Some(front_id) = predecessor_of(scene, agent, map) else {
        return true;
    };
    let front = &scene.agents[&front_id];
    let gap = longitudinal_gap(agent, front, map).expect("same lane");
    gap > required_distance(agent.speed, front.speed, params)
}

/// Safe distance of the following vehicle behind `agent`; vacuously true
/// without one.
pub fn safe_distance_rear(
    scene: &Scene,
    agent: &AgentState,
    map: &MapModel,
    params: &PredicateParams,
) -> bool {
    let Some(rear_id) = follower_of(scene, agent, map) else {
        return true;
    };
    let rear = &scene.agents[&rear_id];
    let gap = longitudinal_gap(agent, rear, map).expect("same lane");
    gap > required_distance(rear.speed, agent.speed, params)
}

fn footprint(agent: &AgentState) -> Obb {
    Obb {
        center: agent.position,
        heading: agent.heading,
        length: agent.length,
        width: agent.width,
    }
}

/// Overlap with any other agent's footprint, or a footprint corner outside
/// every lane corridor (road boundary).
pub fn colliding(scene: &Scene, agent: &AgentState, map: &MapModel) -> bool {
    let own = footprint(agent);
    for other in scene.agents.values() {
        if other.id != agent.id && own.overlaps(&footprint(other)) {
            return true;
        }
    }
    own.corners().iter().any(|&corner| {
        map.lanes().iter().all(|lane| {
            lane.centerline.project(corner).lateral.abs() > lane.width / 2.0
        })
    })
}

/// The agent's lane assignment changed since the previous scene. False at
/// the agent's first frame.
pub fn lane_change(scene_prev: Option<&Scene>, agent: &AgentState) -> bool {
    scene_prev
        .and_then(|prev| prev.agents.get(&agent.id))
        .is_some_and(|before| before.lane != agent.lane)
}

pub fn near(i: &AgentState, j: &AgentState, params: &PredicateParams) -> bool {
    i.position.distance(j.position) < params.delta_near
}

/// Less than `delta_rem` of lane remaining ahead of the front bumper.
pub fn lane_end(agent: &AgentState, map: &MapModel, params: &PredicateParams) -> bool {
    map.lane(agent.lane)
        .and_then(|lane| lane.end_s)
        .is_some_and(|end_s| end_s - agent.s_front() < params.delta_rem)
}

pub fn accelerate(agent: &AgentState, params: &PredicateParams) -> bool {
    agent.accel > params.a_limit
}

pub fn speed_diff(i: &AgentState, j: &AgentState, params: &PredicateParams) -> bool {
    i.speed > j.speed + params.v_thresh
}

/// Position test behind `merged`: past the lane's static merging point.
/// The latched trace-level label lives in [`TraceCache`].
pub fn merged_raw(agent: &AgentState, map: &MapModel) -> bool {
    map.lane(agent.lane)
        .and_then(|lane| lane.merge_s)
        .is_some_and(|merge_s| agent.s > merge_s)
}

/// Per-trace precomputed label series. `merged` latches: once an agent has
/// passed a merging point it stays merged, so projection jitter cannot
/// unfire the zipper rule.
#[derive(Debug)]
pub struct TraceCache {
    merged: std::collections::BTreeMap<AgentId, (usize, Vec<bool>)>,
}

impl TraceCache {
    pub fn new(trace: &Trace) -> TraceCache {
        let mut merged = std::collections::BTreeMap::new();
        for agent in trace.agents() {
            let (start, end) = trace.lifespan(agent).unwrap();
            let mut series = Vec::with_capacity(end - start + 1);
            let mut latched = false;
            for idx in start..=end {
                if let Some(state) = trace.scenes[idx].agents.get(&agent) {
                    latched = latched || merged_raw(state, &trace.map);
                }
                series.push(latched);
            }
            merged.insert(agent, (start, series));
        }
        TraceCache { merged }
    }

    pub fn merged(&self, agent: AgentId, scene_idx: usize) -> bool {
        self.merged
            .get(&agent)
            .is_some_and(|(start, series)| {
                scene_idx >= *start && scene_idx - *start < series.len() && series[scene_idx - *start]
            })
    }
}

/// Evaluates one proposition for an agent tuple at one scene.
pub fn eval(
    kind: PropKind,
    agents: &[AgentId],
    scene_idx: usize,
    trace: &Trace,
    cache: &TraceCache,
    params: &PredicateParams,
) -> Result<bool, LabelError> {
    if agents.len() != kind.arity() {
        return Err(LabelError::WrongArity {
            prop: kind.base_name(),
            needed: kind.arity(),
            got: agents.len(),
        });
    }
    let scene = &trace.scenes[scene_idx];
    let state = |id: AgentId| -> Result<&AgentState, LabelError> {
        scene.agents.get(&id).ok_or(LabelError::MissingAgent {
            agent: id,
            scene: scene_idx,
        })
    };
    let map = &*trace.map;
    Ok(match kind {
        PropKind::Dense => dense(scene, state(agents[0])?, params),
        PropKind::InDirectFront => {
            predecessor_of(scene, state(agents[0])?, map) == Some(agents[1])
        }
        PropKind::Right => relational(state(agents[0])?, state(agents[1])?, map, params)?.right,
        PropKind::Left => relational(state(agents[0])?, state(agents[1])?, map, params)?.left,
        PropKind::Front => relational(state(agents[0])?, state(agents[1])?, map, params)?.front,
        PropKind::Behind => relational(state(agents[0])?, state(agents[1])?, map, params)?.behind,
        PropKind::Merged => {
            state(agents[0])?;
            cache.merged(agents[0], scene_idx)
        }
        PropKind::SdFront => safe_distance_front(scene, state(agents[0])?, map, params),
        PropKind::SdRear => safe_distance_rear(scene, state(agents[0])?, map, params),
        PropKind::Colliding => colliding(scene, state(agents[0])?, map),
        PropKind::LaneChange => {
            let prev = scene_idx.checked_sub(1).map(|i| &trace.scenes[i]);
            lane_change(prev, state(agents[0])?)
        }
        PropKind::Near => near(state(agents[0])?, state(agents[1])?, params),
        PropKind::LaneEnd => lane_end(state(agents[0])?, map, params),
        PropKind::Accelerate => accelerate(state(agents[0])?, params),
        PropKind::SpeedDiff => speed_diff(state(agents[0])?, state(agents[1])?, params),
        PropKind::BuiltUp => {
            state(agents[0])?;
            map.built_up
        }
        PropKind::Motorway => {
            state(agents[0])?;
            map.motorway
        }
        PropKind::DivergingLane => {
            map.lane(state(agents[0])?.lane).unwrap().lane_type
                == crate::world::LaneType::Diverging
        }
        PropKind::AccelerationLane => {
            map.lane(state(agents[0])?.lane).unwrap().lane_type
                == crate::world::LaneType::Acceleration
        }
    })
}

/// Evaluates a proposition given by name (`behind_ij`, `sd_front_i`, ...),
/// resolving its agent slots against `tuple`.
pub fn eval_named(
    prop: &str,
    tuple: &[AgentId],
    scene_idx: usize,
    trace: &Trace,
    cache: &TraceCache,
    params: &PredicateParams,
) -> Result<bool, LabelError> {
    let (base, slots) = crate::ltl::proposition_slots(prop);
    let kind =
        PropKind::from_base(base).ok_or_else(|| LabelError::UnknownProposition(prop.into()))?;
    let agents: Vec<AgentId> = slots
        .iter()
        .map(|&slot| {
            tuple
                .get(slot as usize)
                .copied()
                .ok_or(LabelError::WrongArity {
                    prop: kind.base_name(),
                    needed: kind.arity(),
                    got: tuple.len(),
                })
        })
        .collect::<Result<_, _>>()?;
    eval(kind, &agents, scene_idx, trace, cache, params)
}

/// Boolean time series of one proposition over one agent tuple.
#[derive(Debug, Clone)]
pub struct LabelTrace {
    pub proposition: String,
    pub tuple: Vec<AgentId>,
    /// Scene index of the first value.
    pub start: usize,
    pub values: Vec<bool>,
}

/// Evaluates each named proposition over the tuple for every scene in
/// `start..=end`, producing one [`LabelTrace`] per proposition.
pub fn build_label_traces(
    props: &[String],
    tuple: &[AgentId],
    start: usize,
    end: usize,
    trace: &Trace,
    cache: &TraceCache,
    params: &PredicateParams,
) -> Result<Vec<LabelTrace>, LabelError> {
    props
        .iter()
        .map(|prop| {
            let values = (start..=end)
                .map(|idx| eval_named(prop, tuple, idx, trace, cache, params))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(LabelTrace {
                proposition: prop.clone(),
                tuple: tuple.to_vec(),
                start,
                values,
            })
        })
        .collect()
}
