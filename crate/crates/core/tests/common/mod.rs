//! Seeded random instances shared by the integration tests.

#![allow(dead_code)]

use num_bigint::BigUint;
use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use wmc::{Clause, Formula, Instance, Lit, Var, Weights};

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_weights(rng: &mut ChaCha8Rng, n: usize, max: u64) -> Weights {
    let mut w = Weights::unit();
    for v in 1..=n as u32 {
        w.set(Var::new(v).pos(), BigUint::from(rng.gen_range(1..=max)));
        w.set(Var::new(v).neg(), BigUint::from(rng.gen_range(1..=max)));
    }
    w
}

fn random_lit(rng: &mut ChaCha8Rng, n: usize) -> Lit {
    Var::new(rng.gen_range(1..=n as u32)).lit(rng.gen_bool(0.5))
}

/// Clauses of exactly `k` literals on distinct variables.
pub fn exact_clauses(rng: &mut ChaCha8Rng, n: usize, m: usize, k: usize) -> Vec<Clause> {
    (0..m)
        .map(|_| {
            let vars = sample(rng, n, k.min(n)).into_vec();
            Clause::new(vars.into_iter().map(|v| Var::new(v as u32 + 1).lit(rng.gen_bool(0.5))).collect())
        })
        .collect()
}

/// Clauses of 1 to `k` literals drawn independently, so repeated and
/// complementary literals occur.
pub fn messy_clauses(rng: &mut ChaCha8Rng, n: usize, m: usize, k: usize) -> Vec<Clause> {
    (0..m)
        .map(|_| {
            let len = rng.gen_range(1..=k);
            Clause::new((0..len).map(|_| random_lit(rng, n)).collect())
        })
        .collect()
}

/// Mostly `k`-clauses with some shorter ones and occasional messy clauses.
pub fn mixed_clauses(rng: &mut ChaCha8Rng, n: usize, m: usize, k: usize) -> Vec<Clause> {
    let mut out = Vec::with_capacity(m);
    for _ in 0..m {
        let roll = rng.gen_range(0..10);
        if roll == 0 {
            out.extend(messy_clauses(rng, n, 1, k));
        } else {
            let len = if roll <= 2 { rng.gen_range(1..=k) } else { k };
            out.extend(exact_clauses(rng, n, 1, len));
        }
    }
    out
}

pub fn over_all_vars(clauses: Vec<Clause>, n: usize) -> Formula {
    Formula::from_clauses(clauses).with_extra_vars((1..=n as u32).map(Var::new))
}

pub fn instance(clauses: Vec<Clause>, n: usize, weights: Weights) -> Instance {
    Instance::new(over_all_vars(clauses, n), weights)
}
