//! The built-in rule library for dual carriageways.

use std::collections::BTreeMap;

use crate::ltl::{parse, Rule};

/// The six dual-carriageway rules, in the premise/conclusion shape
/// `G(premise -> conclusion)`.
///
/// Arities: no right passing 2, safe lane change 1, speed advantage 2,
/// safe distance 1, being overtaken 2, zipper merge 3. The safe lane change
/// and safe distance rules reference only the ego's labels; partner
/// resolution happens inside the `sd_*` predicates.
pub fn builtin_rules() -> Vec<Rule> {
    let rule = |name: &str, premise: &str, conclusion: &str, arity: u8, params: &[(&str, f64)]| {
        Rule::new(
            name,
            parse(premise).expect("built-in premise parses"),
            parse(conclusion).expect("built-in conclusion parses"),
            arity,
            params
                .iter()
                .map(|(k, v)| (k.to_string(), *v))
                .collect::<BTreeMap<_, _>>(),
        )
        .expect("built-in rule is well-formed")
    };

    vec![
        rule(
            "no_right_passing",
            "!diverging_lane_i & !acceleration_lane_i & !dense_i & (!built_up_i | motorway_i)",
            "!(behind_ij & X (behind_ij U right_ij U front_ij))",
            2,
            &[],
        ),
        rule("safe_lane_change", "lane_change_i", "sd_rear_i", 1, &[]),
        rule(
            "speed_advantage",
            "behind_ij & X (behind_ij U left_ij U front_ij)",
            "speed_diff_ij U front_ij",
            2,
            &[],
        ),
        rule("safe_distance", "true", "sd_front_i", 1, &[]),
        rule(
            "being_overtaken",
            "right_ij & near_ij",
            "!accelerate_i",
            2,
            &[("delta_near", 3.0)],
        ),
        rule(
            "zipper_merge",
            "left_ik & !front_ik & near_ik & lane_end_k & in_direct_front_ij & !merged_i \
             & (in_direct_front_ij | merged_j) U merged_i",
            "G (merged_i & merged_j -> !in_direct_front_ij)",
            3,
            &[("delta_near", 5.0)],
        ),
    ]
}

pub fn builtin_rule(name: &str) -> Option<Rule> {
    builtin_rules().into_iter().find(|r| r.name == name)
}
