//! Rule instantiation over agent tuples and trace replay.

use rayon::prelude::*;
use thiserror::Error;

use crate::ltl::{proposition_slots, Rule};
use crate::monitor::{
    evaluate_all, Alphabet, CompileError, EvalError, MonitorAutomaton, MonitorRun, Verdict,
    VerdictValue,
};
use crate::predicates::{self, ParamError, PredicateParams, PropKind, TraceCache};
use crate::world::{AgentId, Trace};

use super::report::{InstanceRecord, RuleReport, ViolationReport};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("rule `{rule}`: {source}")]
    Param {
        rule: String,
        #[source]
        source: ParamError,
    },
    #[error("rule `{rule}`: unknown proposition `{prop}`")]
    UnknownProposition { rule: String, prop: String },
    #[error("rule `{rule}`: proposition `{prop}` relates {needed} agents but names {got} slots")]
    PropositionArity {
        rule: String,
        prop: String,
        needed: usize,
        got: usize,
    },
    #[error("rule `{rule}`: {source}")]
    Compile {
        rule: String,
        #[source]
        source: CompileError,
    },
}

/// One rule bound to an ordered agent tuple, with the scene interval the
/// monitor runs over.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleInstance {
    pub rule_idx: usize,
    pub tuple: Vec<AgentId>,
    /// First scene where all tuple agents are present.
    pub start: usize,
    /// Last scene of contiguous joint presence; a partner leaving earlier
    /// ends the instance there (the monitor finalizes at the exit).
    pub end: usize,
}

/// A rule with its effective parameters, compiled monitor, and per-letter
/// proposition resolution, shared by all its instances.
pub struct PreparedRule {
    pub rule: Rule,
    pub params: PredicateParams,
    pub automaton: MonitorAutomaton,
    pub alphabet: Alphabet,
    /// For each alphabet proposition: its kind and the tuple slots it reads.
    resolution: Vec<(PropKind, Vec<u8>)>,
}

impl PreparedRule {
    pub fn new(rule: Rule, base: &PredicateParams) -> Result<PreparedRule, EngineError> {
        let params = base
            .with_overrides(&rule.params)
            .map_err(|source| EngineError::Param {
                rule: rule.name.clone(),
                source,
            })?;
        let automaton =
            MonitorAutomaton::compile(&rule.as_formula()).map_err(|source| EngineError::Compile {
                rule: rule.name.clone(),
                source,
            })?;
        let alphabet = automaton.alphabet().clone();
        let resolution = alphabet
            .names()
            .iter()
            .map(|name| {
                let (base_name, slots) = proposition_slots(name);
                let kind = PropKind::from_base(base_name).ok_or_else(|| {
                    EngineError::UnknownProposition {
                        rule: rule.name.clone(),
                        prop: name.clone(),
                    }
                })?;
                if kind.arity() != slots.len() {
                    return Err(EngineError::PropositionArity {
                        rule: rule.name.clone(),
                        prop: name.clone(),
                        needed: kind.arity(),
                        got: slots.len(),
                    });
                }
                Ok((kind, slots))
            })
            .collect::<Result<Vec<_>, EngineError>>()?;
        Ok(PreparedRule {
            rule,
            params,
            automaton,
            alphabet,
            resolution,
        })
    }
}

/// First and last scene (inclusive) over which every tuple agent is
/// actually present, starting from the first jointly-present scene.
fn joint_interval(trace: &Trace, tuple: &[AgentId]) -> Option<(usize, usize)> {
    let start0 = tuple
        .iter()
        .map(|a| trace.lifespan(*a).map(|(s, _)| s))
        .collect::<Option<Vec<_>>>()?
        .into_iter()
        .max()?;
    let end0 = tuple
        .iter()
        .map(|a| trace.lifespan(*a).map(|(_, e)| e))
        .collect::<Option<Vec<_>>>()?
        .into_iter()
        .min()?;
    if start0 > end0 {
        return None;
    }
    let all_present = |idx: usize| {
        tuple
            .iter()
            .all(|a| trace.scenes[idx].agents.contains_key(a))
    };
    let start = (start0..=end0).find(|&idx| all_present(idx))?;
    let mut end = start;
    while end < end0 && all_present(end + 1) {
        end += 1;
    }
    Some((start, end))
}

/// Enumerates the tuples each rule runs over.
///
/// Arity 1: every agent. Arity 2: ordered pairs that coexist and come
/// within twice the density radius of each other (farther pairs cannot
/// fire any pairwise premise). Arity 3: triples matching the zipper
/// situation's geometry at some scene — the ego following a predecessor
/// with a near, ending-lane neighbor it is left of.
pub fn instantiate(
    trace: &Trace,
    prepared: &[PreparedRule],
    ) -> Vec<RuleInstance> {
    let agents: Vec<AgentId> = trace.agents().collect();
    let mut instances = Vec::new();

    for (rule_idx, prep) in prepared.iter().enumerate() {
        match prep.rule.arity {
            1 => {
                for &agent in &agents {
                    if let Some((start, end)) = joint_interval(trace, &[agent]) {
                        instances.push(RuleInstance {
                            rule_idx,
                            tuple: vec![agent],
                            start,
                            end,
                        });
                    }
                }
            }
            2 => {
                let reach = 2.0 * prep.params.rho_dense;
                for &i in &agents {
                    for &j in &agents {
                        if i == j {
                            continue;
                        }
                        let Some((start, end)) = joint_interval(trace, &[i, j]) else {
                            continue;
                        };
                        let ever_close = (start..=end).any(|idx| {
                            let scene = &trace.scenes[idx];
                            match (scene.agents.get(&i), scene.agents.get(&j)) {
                                (Some(a), Some(b)) => {
                                    a.position.distance(b.position) < reach
                                }
                                _ => false,
                            }
                        });
                        if ever_close {
                            instances.push(RuleInstance {
                                rule_idx,
                                tuple: vec![i, j],
                                start,
                                end,
                            });
                        }
                    }
                }
            }
            _ => {
                let mut triples = std::collections::BTreeSet::new();
                for scene in &trace.scenes {
                    for ego in scene.agents.values() {
                        let Some(pred) = predicates::predecessor_of(scene, ego, &trace.map)
                        else {
                            continue;
                        };
                        for blocked in scene.agents.values() {
                            if blocked.id == ego.id || blocked.id == pred {
                                continue;
                            }
                            if !predicates::lane_end(blocked, &trace.map, &prep.params) {
                                continue;
                            }
                            if !predicates::near(ego, blocked, &prep.params) {
                                continue;
                            }
                            let Ok(rel) =
                                predicates::relational(ego, blocked, &trace.map, &prep.params)
                            else {
                                continue;
                            };
                            if rel.left && !rel.front {
                                triples.insert((ego.id, pred, blocked.id));
                            }
                        }
                    }
                }
                for (i, j, k) in triples {
                    if let Some((start, end)) = joint_interval(trace, &[i, j, k]) {
                        instances.push(RuleInstance {
                            rule_idx,
                            tuple: vec![i, j, k],
                            start,
                            end,
                        });
                    }
                }
            }
        }
    }
    instances
}

fn run_instance(
    trace: &Trace,
    cache: &TraceCache,
    prep: &PreparedRule,
    instance: &RuleInstance,
) -> InstanceRecord {
    let record_err = |message: String| InstanceRecord {
        tuple: instance.tuple.clone(),
        start: instance.start,
        end: instance.end,
        verdict: Verdict {
            value: VerdictValue::Inconclusive,
            position: None,
        },
        violation_frames: Vec::new(),
        premise_frames: Vec::new(),
        error: Some(message),
    };

    // letters over the rule alphabet for the active interval
    let mut letters = Vec::with_capacity(instance.end - instance.start + 1);
    for scene_idx in instance.start..=instance.end {
        let mut bits = crate::monitor::Letter(0);
        for (prop_idx, (kind, slots)) in prep.resolution.iter().enumerate() {
            let agents: Vec<AgentId> = slots
                .iter()
                .map(|&slot| instance.tuple[slot as usize])
                .collect();
            match predicates::eval(*kind, &agents, scene_idx, trace, cache, &prep.params) {
                Ok(true) => bits = bits.with(prop_idx, true),
                Ok(false) => {}
                // agents on disconnected carriageways make the relational
                // labels undefined; skip the instance with a diagnostic
                // rather than aborting the run
                Err(err) => return record_err(format!("scene {scene_idx}: {err}")),
            }
        }
        letters.push(bits);
    }

    // monitor pass
    let mut run = MonitorRun::new(&prep.automaton);
    for &letter in &letters {
        run.step(letter).expect("run state is internal");
    }
    let verdict = match run.decided() {
        Some(v) => Verdict {
            value: v.value,
            position: v.position.map(|p| instance.start + p),
        },
        None => {
            let v = run.finalize();
            Verdict {
                value: v.value,
                position: v.position.map(|p| instance.start + p),
            }
        }
    };

    // pointwise premise/conclusion accounting via the reference evaluator
    let premise = evaluate_all(&prep.rule.premise, &prep.alphabet, &letters);
    let conclusion = evaluate_all(&prep.rule.conclusion, &prep.alphabet, &letters);
    let (premise, conclusion) = match (premise, conclusion) {
        (Ok(p), Ok(c)) => (p, c),
        (Err(e), _) | (_, Err(e)) => {
            let e: EvalError = e;
            return record_err(e.to_string());
        }
    };
    let premise_frames: Vec<usize> = premise
        .iter()
        .enumerate()
        .filter(|(_, &p)| p)
        .map(|(t, _)| instance.start + t)
        .collect();
    let violation_frames: Vec<usize> = premise
        .iter()
        .zip(conclusion.iter())
        .enumerate()
        .filter(|(_, (&p, &c))| p && !c)
        .map(|(t, _)| instance.start + t)
        .collect();

    InstanceRecord {
        tuple: instance.tuple.clone(),
        start: instance.start,
        end: instance.end,
        verdict,
        violation_frames,
        premise_frames,
        error: None,
    }
}

/// Replays the trace through every instance's monitor and collects the
/// violation report. Instances run in parallel; the report is assembled in
/// instance order, so the result does not depend on the worker count.
pub fn run(
    trace: &Trace,
    prepared: &[PreparedRule],
    instances: &[RuleInstance],
) -> ViolationReport {
    let cache = TraceCache::new(trace);

    let outcomes: Vec<(usize, InstanceRecord)> = instances
        .par_iter()
        .map(|instance| {
            let record = run_instance(trace, &cache, &prepared[instance.rule_idx], instance);
            (instance.rule_idx, record)
        })
        .collect();

    let mut rules: Vec<RuleReport> = prepared
        .iter()
        .map(|prep| RuleReport {
            rule: prep.rule.name.clone(),
            arity: prep.rule.arity,
            premise_is_true: prep.rule.premise == crate::ltl::Formula::True,
            instances: Vec::new(),
        })
        .collect();
    for (rule_idx, record) in outcomes {
        rules[rule_idx].instances.push(record);
    }
    for report in &mut rules {
        report
            .instances
            .sort_by(|a, b| a.tuple.cmp(&b.tuple).then(a.start.cmp(&b.start)));
    }

    ViolationReport {
        rules,
        trace_len: trace.len(),
        agent_count: trace.agent_count(),
        lifespans: trace.lifespans().clone(),
    }
}

/// Convenience wrapper: prepare, instantiate, run.
pub fn check_trace(
    trace: &Trace,
    rules: Vec<Rule>,
    base_params: &PredicateParams,
) -> Result<ViolationReport, EngineError> {
    let prepared = rules
        .into_iter()
        .map(|rule| PreparedRule::new(rule, base_params))
        .collect::<Result<Vec<_>, _>>()?;
    let instances = instantiate(trace, &prepared);
    Ok(run(trace, &prepared, &instances))
}
