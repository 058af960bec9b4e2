//! Synthetic maneuver fixtures with closed-form kinematics.
//!
//! Expected outcomes were derived by hand from the rule formulas before the
//! engine existed; the comments record the derivations. Positions are
//! chosen so that every comparison that must tie does so exactly in f64
//! (integer coordinates) and every comparison that must not tie has at
//! least a 0.1 m margin.

#![allow(dead_code)]

use std::sync::Arc;

use rulemon_core::predicates::PredicateParams;
use rulemon_core::world::{assemble, MapModel, RawRow, Trace};

pub struct Fixture {
    pub map: Arc<MapModel>,
    pub rows: Vec<RawRow>,
    pub params: PredicateParams,
}

impl Fixture {
    pub fn trace(&self) -> Trace {
        assemble(self.rows.clone(), self.map.clone()).unwrap()
    }
}

/// Three parallel lanes heading east: 0 (rightmost, y=-3.5), 1 (y=0),
/// 2 (leftmost, y=3.5). `lane1_type` lets the right-pass variant retype the
/// ego's lane.
pub fn three_lane_map(lane1_type: &str) -> Arc<MapModel> {
    let json = format!(
        r#"{{
        "built_up": false,
        "motorway": true,
        "lanes": [
            {{"id": 0, "type": "normal", "width": 3.5, "left": 1, "right": null,
              "centerline": [[0,-3.5],[1000,-3.5]]}},
            {{"id": 1, "type": "{lane1_type}", "width": 3.5, "left": 2, "right": 0,
              "centerline": [[0,0],[1000,0]]}},
            {{"id": 2, "type": "normal", "width": 3.5, "left": null, "right": 1,
              "centerline": [[0,3.5],[1000,3.5]]}}
        ]
    }}"#
    );
    Arc::new(MapModel::from_json(&json).unwrap())
}

/// Two lanes: the continuing lane 1 (y=0) and the ending lane 0 (y=-3.5,
/// ends at 300 m, merging point at 280 m on both).
pub fn merge_map() -> Arc<MapModel> {
    let json = r#"{
        "built_up": false,
        "motorway": true,
        "lanes": [
            {"id": 0, "type": "normal", "width": 3.5, "left": 1, "right": null,
             "end_s": 300.0, "merge_s": 280.0, "centerline": [[0,-3.5],[300,-3.5]]},
            {"id": 1, "type": "normal", "width": 3.5, "left": null, "right": 0,
             "merge_s": 280.0, "centerline": [[0,0],[1000,0]]}
        ]
    }"#;
    Arc::new(MapModel::from_json(json).unwrap())
}

/// Agent rows over `frames`, positions and velocities from a closure
/// `k -> (x, y, vx, vy)`, heading east.
pub fn agent_rows(
    track: u64,
    frames: std::ops::RangeInclusive<i64>,
    length: f64,
    width: f64,
    state: impl Fn(i64) -> (f64, f64, f64, f64),
) -> Vec<RawRow> {
    frames
        .map(|k| {
            let (x, y, vx, vy) = state(k);
            RawRow {
                track_id: track,
                frame: k,
                timestamp_ms: k * 100,
                x,
                y,
                vx: Some(vx),
                vy: Some(vy),
                psi: 0.0,
                length,
                width,
            }
        })
        .collect()
}

/// Right pass: ego 1 (lane 1, 30 m/s, from x=40) overtakes agent 2
/// (lane 2, 20 m/s, from x=50) on its right. Front-bumper positions tie
/// exactly at frame 10 (x=70 for both) and agent 1 pulls ahead while the
/// spans still overlap, so the chain behind U right U front discharges.
///
/// `dense` adds eight 20 m/s escorts that keep at least eight agents
/// within 20 m of the ego for frames 0..=9, the only frames where the
/// conclusion fails; every escort is placed so that no pass chain ever
/// discharges for it (constant offsets, or exact-tie frames at integer
/// offsets with no lateral `right` relation).
pub fn right_pass(lane1_type: &str, dense: bool) -> Fixture {
    let map = three_lane_map(lane1_type);
    let mut rows = Vec::new();
    rows.extend(agent_rows(1, 0..=40, 4.0, 2.0, |k| {
        (40.0 + 3.0 * k as f64, 0.0, 30.0, 0.0)
    }));
    rows.extend(agent_rows(2, 0..=40, 4.0, 2.0, |k| {
        (50.0 + 2.0 * k as f64, 3.5, 20.0, 0.0)
    }));
    if dense {
        // (track, lane y, integer offset from the ego's start)
        let escorts: [(u64, f64, f64); 8] = [
            (10, -3.5, -10.0),
            (11, -3.5, -5.0),
            (12, -3.5, 5.0),
            (13, -3.5, 10.0),
            (14, -3.5, 15.0),
            (20, 0.0, -5.0),
            (21, 0.0, -10.0),
            (30, 3.5, -5.0),
        ];
        for (track, y, offset) in escorts {
            rows.extend(agent_rows(track, 0..=40, 4.0, 2.0, move |k| {
                (40.0 + offset + 2.0 * k as f64, y, 20.0, 0.0)
            }));
        }
    }
    Fixture {
        map,
        rows,
        params: PredicateParams::default(),
    }
}

/// Left pass with a configurable speed advantage. Ego 1 (lane 2) passes
/// agent 2 (lane 1, 20 m/s) on its left at `20 + dv` m/s. Both vehicles are
/// 4 m long and the positions tie exactly on one frame (k = 200/dv), so the
/// takeover discharges the chain through the `left` region only — the
/// `behind U right U front` chain of the no-right-passing rule stays
/// undischarged.
///
/// With dv below v_thresh (2.78 m/s) the conclusion speed_diff U front
/// fails at every premise frame; above it, it holds everywhere.
pub fn left_pass(dv: f64) -> Fixture {
    let map = three_lane_map("normal");
    let v_ego = 20.0 + dv;
    let frames = if dv < 2.0 { 0..=210 } else { 0..=80 };
    let mut rows = Vec::new();
    rows.extend(agent_rows(1, frames.clone(), 4.0, 2.0, move |k| {
        ((400.0 + v_ego * k as f64) / 10.0, 3.5, v_ego, 0.0)
    }));
    rows.extend(agent_rows(2, frames, 4.0, 2.0, |k| {
        (60.0 + 2.0 * k as f64, 0.0, 20.0, 0.0)
    }));
    Fixture {
        map,
        rows,
        params: PredicateParams::default(),
    }
}

/// Tailgate: follower 1 sits 15 m behind leader 2, both at 20 m/s. The
/// required distance is exactly 20 m (equal speeds cancel the braking
/// terms), so sd_front fails at every one of the 100 frames.
pub fn tailgate() -> Fixture {
    let map = three_lane_map("normal");
    let mut rows = Vec::new();
    rows.extend(agent_rows(1, 0..=99, 4.0, 2.0, |k| {
        (2.0 * k as f64, 0.0, 20.0, 0.0)
    }));
    rows.extend(agent_rows(2, 0..=99, 4.0, 2.0, |k| {
        (19.0 + 2.0 * k as f64, 0.0, 20.0, 0.0)
    }));
    Fixture {
        map,
        rows,
        params: PredicateParams::default(),
    }
}

/// Two far-apart agents cruising: no rule fires.
pub fn clean() -> Fixture {
    let map = three_lane_map("normal");
    let mut rows = Vec::new();
    rows.extend(agent_rows(1, 0..=19, 4.0, 2.0, |k| {
        (2.0 * k as f64, 0.0, 20.0, 0.0)
    }));
    rows.extend(agent_rows(2, 0..=19, 4.0, 2.0, |k| {
        (100.0 + 2.0 * k as f64, 0.0, 20.0, 0.0)
    }));
    Fixture {
        map,
        rows,
        params: PredicateParams::default(),
    }
}

/// Zipper merge on [`merge_map`], delta_rem 55 m (the lane narrows early).
///
/// Ego 1 follows predecessor 2 on the continuing lane; agent 3 sits on the
/// ending lane right beside the ego (2 m ahead, center distance 4.03 m <
/// 5 m), 52 m before the lane end. The zipper situation plus
/// in_direct_front(1->2) holds from frame 0.
///
/// Compliant: the ego yields at 13 m/s, agent 3 (15 m/s) changes onto the
/// continuing lane at frame 15 and becomes the ego's new predecessor well
/// before the ego passes the 280 m merging point at frame 28 — the
/// conclusion G(merged_1 & merged_2 -> !in_direct_front(1->2)) holds.
///
/// Violating: the ego keeps 15 m/s, agent 3 never merges, and agent 2 is
/// still the ego's direct predecessor when both have passed the merging
/// point (ego crosses at frame 25, exactly at 280.0 m on frame 24).
pub fn zipper(compliant: bool) -> Fixture {
    let map = merge_map();
    let mut rows = Vec::new();
    if compliant {
        rows.extend(agent_rows(1, 0..=40, 4.0, 2.0, |k| {
            ((2440.0 + 13.0 * k as f64) / 10.0, 0.0, 13.0, 0.0)
        }));
        rows.extend(agent_rows(2, 0..=40, 4.0, 2.0, |k| {
            ((2640.0 + 15.0 * k as f64) / 10.0, 0.0, 15.0, 0.0)
        }));
        rows.extend(agent_rows(3, 0..=40, 4.0, 2.0, |k| {
            let y = if k < 15 { -3.5 } else { 0.0 };
            ((2460.0 + 15.0 * k as f64) / 10.0, y, 15.0, 0.0)
        }));
    } else {
        rows.extend(agent_rows(1, 0..=37, 4.0, 2.0, |k| {
            ((2440.0 + 15.0 * k as f64) / 10.0, 0.0, 15.0, 0.0)
        }));
        rows.extend(agent_rows(2, 0..=37, 4.0, 2.0, |k| {
            ((2640.0 + 15.0 * k as f64) / 10.0, 0.0, 15.0, 0.0)
        }));
        rows.extend(agent_rows(3, 0..=37, 4.0, 2.0, |k| {
            ((2460.0 + 15.0 * k as f64) / 10.0, -3.5, 15.0, 0.0)
        }));
    }
    let params = PredicateParams {
        delta_rem: 55.0,
        ..PredicateParams::default()
    };
    Fixture { map, rows, params }
}

/// Being overtaken: agent 2 (lane 2 but only 1.9 m to the ego's left,
/// 25 m/s, 5 m long) passes ego 1 (lane 1) closely. From t=2 s the ego
/// accelerates at `accel` m/s² while the passer is right & near
/// (center distance < 3 m around t = 2.6..3.6 s).
pub fn being_overtaken(accel: f64) -> Fixture {
    let map = three_lane_map("normal");
    let mut rows = Vec::new();
    rows.extend(agent_rows(1, 0..=50, 4.0, 2.0, move |k| {
        let t = k as f64 / 10.0;
        let (x, v) = if t < 2.0 {
            (50.0 + 20.0 * t, 20.0)
        } else {
            (
                50.0 + 20.0 * t + accel / 2.0 * (t - 2.0) * (t - 2.0),
                20.0 + accel * (t - 2.0),
            )
        };
        (x, 0.0, v, 0.0)
    }));
    rows.extend(agent_rows(2, 0..=50, 5.0, 2.0, |k| {
        ((350.0 + 25.0 * k as f64) / 10.0, 1.9, 25.0, 0.0)
    }));
    Fixture {
        map,
        rows,
        params: PredicateParams::default(),
    }
}

/// Four lane changes, one with an unsafe rear gap.
///
/// Ego 1 (20 m/s, lane 1) switches lanes at frames 10, 30, 50, 70
/// (1 -> 2 -> 1 -> 2 -> 1). Follower 2 stays on lane 2 at 20 m/s but runs
/// at 26 m/s during frames 30..49, closing the bumper gap from 30 m to
/// 18 m. At the frame-10 change the gap (30 m) exceeds the 20 m
/// requirement; at frame 50 the 18 m gap does not; the two changes onto
/// the follower-free lane 1 are vacuously safe. One unsafe change in four.
pub fn lane_change_quad() -> Fixture {
    let map = three_lane_map("normal");
    let mut rows = Vec::new();
    rows.extend(agent_rows(1, 0..=99, 4.0, 2.0, |k| {
        let y = match k {
            10..=29 | 50..=69 => 3.5,
            _ => 0.0,
        };
        (100.0 + 2.0 * k as f64, y, 20.0, 0.0)
    }));
    rows.extend(agent_rows(2, 0..=99, 4.0, 2.0, |k| {
        let (x, v) = if k <= 30 {
            (66.0 + 2.0 * k as f64, if k == 30 { 26.0 } else { 20.0 })
        } else if k <= 50 {
            ((1260.0 + 26.0 * (k - 30) as f64) / 10.0, if k == 50 { 20.0 } else { 26.0 })
        } else {
            (178.0 + 2.0 * (k - 50) as f64, 20.0)
        };
        (x, 3.5, v, 0.0)
    }));
    Fixture {
        map,
        rows,
        params: PredicateParams::default(),
    }
}
