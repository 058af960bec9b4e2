//! Monitor minimization by partition refinement.
//!
//! Moore-style refinement over the verdict tags: states start partitioned
//! by tag, then blocks split until every pair of states in a block agrees,
//! letter by letter, on the successor block. The quotient automaton yields
//! the same verdict as the input on every finite trace.

use std::collections::HashMap;

use super::automaton::{MonitorAutomaton, MonitorState, VerdictTag, VerdictValue};

pub fn minimize(automaton: &MonitorAutomaton) -> MonitorAutomaton {
    let n = automaton.state_count();
    let letters = automaton.alphabet().letter_count();
    let transitions = automaton.transitions();

    // block id per state, seeded by the observable verdicts: the tag and
    // the end-of-trace verdict (states that finalize differently must never
    // merge)
    let mut block: Vec<usize> = (0..n)
        .map(|s| {
            let tag = match automaton.tag(s) {
                VerdictTag::Inconclusive => 0,
                VerdictTag::PermanentlyFalse => 1,
                VerdictTag::PermanentlyTrue => 2,
            };
            tag * 2 + usize::from(automaton.finalize(s) == VerdictValue::Satisfied)
        })
        .collect();

    loop {
        let mut signatures: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
        let mut next_block = vec![0usize; n];
        for s in 0..n {
            let succ_blocks: Vec<usize> = (0..letters)
                .map(|bits| block[transitions[s][bits] as usize])
                .collect();
            let count = signatures.len();
            let id = *signatures.entry((block[s], succ_blocks)).or_insert(count);
            next_block[s] = id;
        }
        let stable = signatures.len() == block.iter().copied().collect::<std::collections::HashSet<_>>().len();
        block = next_block;
        if stable {
            break;
        }
    }

    // renumber blocks in order of first appearance, initial state's block first
    let block_count = block.iter().copied().max().unwrap_or(0) + 1;
    let mut renumber: Vec<Option<usize>> = vec![None; block_count];
    let mut representative: Vec<usize> = Vec::new();
    let assign = |state: usize, renumber: &mut Vec<Option<usize>>, representative: &mut Vec<usize>| {
        let b = block[state];
        if renumber[b].is_none() {
            renumber[b] = Some(representative.len());
            representative.push(state);
        }
    };
    assign(automaton.initial(), &mut renumber, &mut representative);
    for s in 0..n {
        assign(s, &mut renumber, &mut representative);
    }

    let states: Vec<MonitorState> = representative
        .iter()
        .map(|&s| MonitorState {
            residual: automaton.states()[s].residual.clone(),
            tag: automaton.tag(s),
        })
        .collect();
    let new_transitions: Vec<Vec<u32>> = representative
        .iter()
        .map(|&s| {
            (0..letters)
                .map(|bits| renumber[block[transitions[s][bits] as usize]].unwrap() as u32)
                .collect()
        })
        .collect();

    MonitorAutomaton::from_parts(
        automaton.alphabet().clone(),
        states,
        0,
        new_transitions,
    )
}
