//! Shared generators for property and acceptance tests.

#![allow(dead_code)]

pub mod fixtures;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::Rng;

use rulemon_core::ltl::Formula;
use rulemon_core::monitor::Letter;

pub const ATOMS: [&str; 3] = ["a", "b", "c"];

/// proptest strategy for formulas over up to three atoms.
pub fn formula_strategy(max_depth: u32) -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        1 => Just(Formula::True),
        1 => Just(Formula::False),
        4 => proptest::sample::select(ATOMS.to_vec()).prop_map(Formula::atom),
    ];
    leaf.prop_recursive(max_depth, 64, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            inner.clone().prop_map(Formula::next),
            inner.clone().prop_map(Formula::weak_next),
            inner.clone().prop_map(Formula::globally),
            inner.clone().prop_map(Formula::finally),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.and(b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.or(b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.implies(b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.until(b)),
            (inner.clone(), inner).prop_map(|(a, b)| a.release(b)),
        ]
    })
}

/// proptest strategy for non-empty traces over a `width`-bit alphabet.
pub fn trace_strategy(width: usize, max_len: usize) -> impl Strategy<Value = Vec<Letter>> {
    proptest::collection::vec(0u16..(1u16 << width), 1..=max_len)
        .prop_map(|bits| bits.into_iter().map(Letter).collect())
}

/// Seeded plain-rand formula generator for the high-volume acceptance loops.
pub fn random_formula(rng: &mut StdRng, depth: u32) -> Formula {
    if depth == 0 || rng.random_range(0..5) == 0 {
        return match rng.random_range(0..5) {
            0 => Formula::True,
            1 => Formula::False,
            _ => Formula::atom(ATOMS[rng.random_range(0..ATOMS.len())]),
        };
    }
    let sub = |rng: &mut StdRng| random_formula(rng, depth - 1);
    match rng.random_range(0..10) {
        0 => sub(rng).not(),
        1 => sub(rng).next(),
        2 => sub(rng).weak_next(),
        3 => sub(rng).globally(),
        4 => sub(rng).finally(),
        5 => sub(rng).and(random_formula(rng, depth - 1)),
        6 => sub(rng).or(random_formula(rng, depth - 1)),
        7 => sub(rng).implies(random_formula(rng, depth - 1)),
        8 => sub(rng).until(random_formula(rng, depth - 1)),
        _ => sub(rng).release(random_formula(rng, depth - 1)),
    }
}

pub fn random_trace(rng: &mut StdRng, width: usize, max_len: usize) -> Vec<Letter> {
    let len = rng.random_range(1..=max_len);
    (0..len)
        .map(|_| Letter(rng.random_range(0..(1u16 << width))))
        .collect()
}

/// All traces of exactly `len` over a `width`-bit alphabet.
pub fn enumerate_traces(width: usize, len: usize) -> impl Iterator<Item = Vec<Letter>> {
    let letters = 1usize << width;
    let total = letters.pow(len as u32);
    (0..total).map(move |mut code| {
        (0..len)
            .map(|_| {
                let letter = Letter((code % letters) as u16);
                code /= letters;
                letter
            })
            .collect()
    })
}