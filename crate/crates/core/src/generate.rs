//! Seeded random k-CNF instances in DIMACS form.

use std::fmt::Write;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct GenSpec {
    pub vars: usize,
    pub clauses: usize,
    /// Literals per clause, all on distinct variables.
    pub width: usize,
    /// Weights are drawn from `1..=max_weight`; 1 means unweighted.
    pub max_weight: u64,
    pub seed: u64,
}

pub fn generate_random(spec: &GenSpec) -> Result<String> {
    if spec.width == 0 || spec.width > spec.vars {
        return Err(Error::Config(format!(
            "clause width {} needs between 1 and {} variables",
            spec.width, spec.vars
        )));
    }
    if spec.max_weight == 0 {
        return Err(Error::Config("max weight must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut out = format!("p cnf {} {}\n", spec.vars, spec.clauses);
    if spec.max_weight > 1 {
        for v in 1..=spec.vars {
            for lit in [v as i64, -(v as i64)] {
                let w = rng.gen_range(1..=spec.max_weight);
                writeln!(out, "c p weight {lit} {w} 0").unwrap();
            }
        }
    }
    for _ in 0..spec.clauses {
        let mut vars = sample(&mut rng, spec.vars, spec.width).into_vec();
        vars.sort_unstable();
        for v in vars {
            let lit = if rng.gen_bool(0.5) { v as i64 + 1 } else { -(v as i64 + 1) };
            write!(out, "{lit} ").unwrap();
        }
        out.push_str("0\n");
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dimacs::parse_dimacs;
    use proptest::prelude::*;

    fn spec(vars: usize, clauses: usize, width: usize, max_weight: u64, seed: u64) -> GenSpec {
        GenSpec { vars, clauses, width, max_weight, seed }
    }

    #[test]
    fn deterministic_per_seed() {
        let s = spec(8, 20, 3, 8, 7);
        assert_eq!(generate_random(&s).unwrap(), generate_random(&s).unwrap());
        assert_ne!(generate_random(&s).unwrap(), generate_random(&GenSpec { seed: 8, ..s }).unwrap());
    }

    #[test]
    fn examples() {
        let p = parse_dimacs(&generate_random(&spec(5, 10, 3, 1, 42)).unwrap()).unwrap();
        let f = &p.instance.formula;
        assert!(f.num_vars() <= 5 && f.num_clauses() == 10);
        assert!(f.clauses().iter().all(|c| c.len() == 3));
        assert_eq!(p.weight_lines, 0);

        let text = generate_random(&spec(6, 4, 2, 8, 1)).unwrap();
        for line in text.lines().filter(|l| l.starts_with("c p weight")) {
            let w: u64 = line.split_whitespace().nth(4).unwrap().parse().unwrap();
            assert!((1..=8).contains(&w));
        }

        assert!(generate_random(&spec(2, 1, 3, 1, 0)).is_err());
    }

    proptest! {
        #[test]
        fn always_valid(vars in 3usize..20, clauses in 0usize..40, width in 1usize..=3, w in 1u64..5, seed: u64) {
            let text = generate_random(&spec(vars, clauses, width, w, seed)).unwrap();
            let p = parse_dimacs(&text).unwrap();
            for c in p.instance.formula.clauses() {
                prop_assert_eq!(c.vars().count(), c.len());
            }
        }
    }
}
