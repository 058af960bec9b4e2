use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Scalar thresholds the predicates consume. Defaults follow the values
/// used for the dataset evaluation: a_limit 0.5 m/s², v_thresh 10 km/h,
/// rho 20 m with n = 8, reaction time 1 s. delta_near is overridden per
/// rule (5 m for zipper merge, 3 m for being overtaken); delta_rem is
/// map-specific (20 m, or 55 m where the lane narrows early). The braking
/// magnitudes are configurable defaults, not dataset ground truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PredicateParams {
    /// Radius of the traffic-density test (m).
    pub rho_dense: f64,
    /// Number of agents within `rho_dense` that makes traffic dense.
    pub n_dense: usize,
    /// Proximity threshold for `near` and the lateral-label span test (m).
    pub delta_near: f64,
    /// Remaining-lane threshold for `lane_end` (m).
    pub delta_rem: f64,
    /// Acceleration threshold for `accelerate` (m/s²).
    pub a_limit: f64,
    /// Speed advantage threshold for `speed_diff` (m/s).
    pub v_thresh: f64,
    /// Reaction time in the safe-distance formula (s).
    pub reaction_time: f64,
    /// Assumed maximal braking of the front vehicle (m/s², magnitude).
    pub decel_max_front: f64,
    /// Assumed maximal braking of the rear vehicle (m/s², magnitude).
    pub decel_max_rear: f64,
}

impl Default for PredicateParams {
    fn default() -> Self {
        PredicateParams {
            rho_dense: 20.0,
            n_dense: 8,
            delta_near: 5.0,
            delta_rem: 20.0,
            a_limit: 0.5,
            v_thresh: 10.0 / 3.6,
            reaction_time: 1.0,
            decel_max_front: 6.0,
            decel_max_rear: 6.0,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ParamError {
    #[error("unknown parameter `{0}`")]
    Unknown(String),
    #[error("parameter `{name}` must be {constraint}, got {value}")]
    OutOfRange {
        name: &'static str,
        constraint: &'static str,
        value: f64,
    },
}

impl PredicateParams {
    /// Applies named overrides (rule parameter sets, CLI/config overrides),
    /// rejecting unknown names.
    pub fn with_overrides(
        &self,
        overrides: &BTreeMap<String, f64>,
    ) -> Result<PredicateParams, ParamError> {
        let mut params = self.clone();
        for (name, &value) in overrides {
            match name.as_str() {
                "rho_dense" => params.rho_dense = value,
                "n_dense" => {
                    if value < 1.0 || value.fract() != 0.0 {
                        return Err(ParamError::OutOfRange {
                            name: "n_dense",
                            constraint: "a positive integer",
                            value,
                        });
                    }
                    params.n_dense = value as usize;
                }
                "delta_near" => params.delta_near = value,
                "delta_rem" => params.delta_rem = value,
                "a_limit" => params.a_limit = value,
                "v_thresh" => params.v_thresh = value,
                "reaction_time" => params.reaction_time = value,
                "decel_max_front" => params.decel_max_front = value,
                "decel_max_rear" => params.decel_max_rear = value,
                other => return Err(ParamError::Unknown(other.to_string())),
            }
        }
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        let checks = [
            ("rho_dense", self.rho_dense),
            ("delta_near", self.delta_near),
            ("delta_rem", self.delta_rem),
            ("a_limit", self.a_limit),
            ("v_thresh", self.v_thresh),
            ("reaction_time", self.reaction_time),
            ("decel_max_front", self.decel_max_front),
            ("decel_max_rear", self.decel_max_rear),
        ];
        for (name, value) in checks {
            if value.is_nan() || value <= 0.0 {
                return Err(ParamError::OutOfRange {
                    name,
                    constraint: "strictly positive",
                    value,
                });
            }
        }
        if self.n_dense < 1 {
            return Err(ParamError::OutOfRange {
                name: "n_dense",
                constraint: "a positive integer",
                value: self.n_dense as f64,
            });
        }
        Ok(())
    }
}
