//! Violation reports and the two violation metrics.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::monitor::{Verdict, VerdictValue};
use crate::world::AgentId;

/// Outcome of one rule instance over its active interval.
#[derive(Debug, Clone, Serialize)]
pub struct InstanceRecord {
    pub tuple: Vec<AgentId>,
    pub start: usize,
    pub end: usize,
    /// Monitor verdict; the position is an absolute scene index.
    pub verdict: Verdict,
    /// Scenes where the premise held and the conclusion did not
    /// (suffix-evaluated). Always a subset of `premise_frames`.
    pub violation_frames: Vec<usize>,
    /// Scenes where the premise held (suffix-evaluated).
    pub premise_frames: Vec<usize>,
    /// Diagnostic when label evaluation aborted this instance.
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RuleReport {
    pub rule: String,
    pub arity: u8,
    pub(crate) premise_is_true: bool,
    pub instances: Vec<InstanceRecord>,
}

impl RuleReport {
    /// Agents flagged for this rule: the ego (first tuple slot) of every
    /// instance whose monitor reported a violation.
    pub fn flagged_agents(&self) -> BTreeSet<AgentId> {
        self.instances
            .iter()
            .filter(|i| i.verdict.value == VerdictValue::Violated)
            .map(|i| i.tuple[0])
            .collect()
    }

    /// Egos for which this rule was instantiated at all.
    pub fn instantiated_agents(&self) -> BTreeSet<AgentId> {
        self.instances.iter().map(|i| i.tuple[0]).collect()
    }
}

/// Denominator choice for the once-per-agent metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Denominator {
    /// Every agent of the trace.
    #[default]
    AllAgents,
    /// Only agents the rule was instantiated for.
    Instantiated,
}

/// Per-time violation fractions of one rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PerTime {
    /// Violation scenes over all agent-lifespan scenes.
    pub by_total: f64,
    /// Violation scenes over premise-active scenes; `None` when the
    /// premise was never active.
    pub by_premise_active: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct ViolationReport {
    pub rules: Vec<RuleReport>,
    pub trace_len: usize,
    pub agent_count: usize,
    pub lifespans: BTreeMap<AgentId, (usize, usize)>,
}

impl ViolationReport {
    pub fn rule(&self, name: &str) -> Option<&RuleReport> {
        self.rules.iter().find(|r| r.rule == name)
    }

    /// Fraction of agents flagged at least once per rule ("once an agent
    /// violates a rule, that agent is flagged").
    pub fn metric_once_per_agent(&self, denominator: Denominator) -> BTreeMap<String, f64> {
        self.rules
            .iter()
            .map(|rule| {
                let flagged = rule.flagged_agents().len();
                let total = match denominator {
                    Denominator::AllAgents => self.agent_count,
                    Denominator::Instantiated => rule.instantiated_agents().len(),
                };
                let fraction = if total == 0 {
                    0.0
                } else {
                    flagged as f64 / total as f64
                };
                (rule.rule.clone(), fraction)
            })
            .collect()
    }

    /// Violations per time, normalized by (1) the summed agent lifespans
    /// and (2) the premise-active duration. For rules whose premise is
    /// `true` the two numerators and denominators coincide instance by
    /// instance, so the fractions are identical by construction.
    pub fn metric_per_time(&self) -> BTreeMap<String, PerTime> {
        let lifespan_total: usize = self
            .lifespans
            .values()
            .map(|(start, end)| end - start + 1)
            .sum();
        self.rules
            .iter()
            .map(|rule| {
                let violations: usize =
                    rule.instances.iter().map(|i| i.violation_frames.len()).sum();
                let premise_active: usize =
                    rule.instances.iter().map(|i| i.premise_frames.len()).sum();
                let by_total = if lifespan_total == 0 {
                    0.0
                } else {
                    violations as f64 / lifespan_total as f64
                };
                let by_premise_active = if premise_active == 0 {
                    None
                } else {
                    Some(violations as f64 / premise_active as f64)
                };
                (
                    rule.rule.clone(),
                    PerTime {
                        by_total,
                        by_premise_active,
                    },
                )
            })
            .collect()
    }

    /// Report in the published JSON shape, one object per rule. The
    /// timestamp header is omitted in deterministic mode.
    pub fn to_json(&self, denominator: Denominator, deterministic: bool) -> serde_json::Value {
        let once = self.metric_once_per_agent(denominator);
        let per_time = self.metric_per_time();
        let mut rules = serde_json::Map::new();
        for rule in &self.rules {
            let violations: Vec<serde_json::Value> = rule
                .instances
                .iter()
                .filter(|i| !i.violation_frames.is_empty())
                .map(|i| {
                    serde_json::json!({
                        "tuple": i.tuple.iter().map(|a| a.0).collect::<Vec<_>>(),
                        "frames": i.violation_frames,
                    })
                })
                .collect();
            let errors: Vec<serde_json::Value> = rule
                .instances
                .iter()
                .filter_map(|i| {
                    i.error.as_ref().map(|e| {
                        serde_json::json!({
                            "tuple": i.tuple.iter().map(|a| a.0).collect::<Vec<_>>(),
                            "error": e,
                        })
                    })
                })
                .collect();
            let pt = &per_time[&rule.rule];
            let mut entry = serde_json::json!({
                "flagged_agents": rule.flagged_agents().iter().map(|a| a.0).collect::<Vec<_>>(),
                "once_per_agent": once[&rule.rule],
                "per_time_total": pt.by_total,
                "per_time_premise": pt.by_premise_active,
                "violations": violations,
            });
            if !errors.is_empty() {
                entry["instance_errors"] = serde_json::Value::Array(errors);
            }
            rules.insert(rule.rule.clone(), entry);
        }
        let mut root = serde_json::Map::new();
        if !deterministic {
            let now = std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_millis() as u64)
                .unwrap_or(0);
            root.insert("generated_at_ms".into(), serde_json::json!(now));
        }
        root.insert("trace_len".into(), serde_json::json!(self.trace_len));
        root.insert("agent_count".into(), serde_json::json!(self.agent_count));
        root.insert("rules".into(), serde_json::Value::Object(rules));
        serde_json::Value::Object(root)
    }

    /// Flat CSV: one row per (rule, tuple, violation frame).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("rule,tuple,frame\n");
        for rule in &self.rules {
            for instance in &rule.instances {
                let tuple = instance
                    .tuple
                    .iter()
                    .map(|a| a.0.to_string())
                    .collect::<Vec<_>>()
                    .join("-");
                for frame in &instance.violation_frames {
                    out.push_str(&format!("{},{},{}\n", rule.rule, tuple, frame));
                }
            }
        }
        out
    }

    /// Plot-ready metric rows: rule, metric, value.
    pub fn metrics_csv(&self, denominator: Denominator) -> String {
        let once = self.metric_once_per_agent(denominator);
        let per_time = self.metric_per_time();
        let mut out = String::from("rule,metric,value\n");
        for rule in &self.rules {
            out.push_str(&format!(
                "{},once_per_agent,{}\n",
                rule.rule, once[&rule.rule]
            ));
            let pt = &per_time[&rule.rule];
            out.push_str(&format!("{},per_time_total,{}\n", rule.rule, pt.by_total));
            match pt.by_premise_active {
                Some(v) => out.push_str(&format!("{},per_time_premise,{}\n", rule.rule, v)),
                None => out.push_str(&format!("{},per_time_premise,\n", rule.rule)),
            }
        }
        out
    }

    /// Total violation count across rules (for the CLI exit code).
    pub fn total_violations(&self) -> usize {
        self.rules
            .iter()
            .flat_map(|r| &r.instances)
            .map(|i| i.violation_frames.len())
            .sum()
    }
}
