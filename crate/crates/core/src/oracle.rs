//! Exhaustive weighted model counting.
//!
//! Used by the small-part reduction rules, as the terminal counter for small
//! formulas, and as the reference every other counting path is tested
//! against.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::formula::{Formula, Var, Weights};

/// Default limit on the number of enumerated variables.
pub const DEFAULT_BRUTE_CAP: usize = 30;

// Variables in the low half of an assignment word; their weight products are
// summed before the high half is multiplied in.
const LOW_BITS: usize = 10;

/// Weighted model count by enumerating all assignments, capped at
/// [`DEFAULT_BRUTE_CAP`] enumerated variables.
pub fn brute_wmc(formula: &Formula, weights: &Weights) -> Result<BigUint> {
    brute_wmc_capped(formula, weights, DEFAULT_BRUTE_CAP)
}

/// Weighted model count by enumeration.
///
/// Variables that occur in no clause are not enumerated; each contributes
/// the factor `w(x) + w(!x)`. The cap applies to the enumerated variables.
pub fn brute_wmc_capped(formula: &Formula, weights: &Weights, cap: usize) -> Result<BigUint> {
    if formula.has_empty_clause() {
        return Ok(BigUint::zero());
    }
    let degrees = formula.degrees();
    let (active, idle): (Vec<Var>, Vec<Var>) = degrees.keys().partition(|v| degrees[v] > 0);
    if active.len() > cap.min(63) {
        return Err(Error::TooLarge {
            vars: active.len(),
            cap: cap.min(63),
        });
    }

    let bit = |v: Var| 1u64 << active.binary_search(&v).expect("clause variable is active");
    let masks: Vec<(u64, u64)> = formula
        .clauses()
        .iter()
        .map(|c| {
            c.lits().iter().fold((0, 0), |(pos, neg), &l| {
                if l.is_positive() {
                    (pos | bit(l.var()), neg)
                } else {
                    (pos, neg | bit(l.var()))
                }
            })
        })
        .collect();

    let low = active.len().min(LOW_BITS);
    let low_products = products(&active[..low], weights);
    let high_products = products(&active[low..], weights);

    let mut total = BigUint::zero();
    for (h, high_weight) in high_products.iter().enumerate() {
        let mut partial = BigUint::zero();
        for (l, low_weight) in low_products.iter().enumerate() {
            let a = ((h as u64) << low) | l as u64;
            if masks.iter().all(|&(pos, neg)| (a & pos) | (!a & neg) != 0) {
                partial += low_weight;
            }
        }
        if !partial.is_zero() {
            total += partial * high_weight;
        }
    }
    for v in idle {
        total *= weights.var_sum(v);
    }
    Ok(total)
}

/// Weight products of all assignments to `vars`, indexed by assignment bits.
fn products(vars: &[Var], weights: &Weights) -> Vec<BigUint> {
    let mut table = vec![BigUint::one()];
    for (i, &v) in vars.iter().enumerate() {
        let mut next = Vec::with_capacity(table.len() * 2);
        next.extend(table.iter().map(|p| p * weights.get(v.neg())));
        next.extend(table.iter().map(|p| p * weights.get(v.pos())));
        // bit i set means v is true; entries [2^i, 2^(i+1)) carry w(v)
        debug_assert_eq!(next.len(), 1 << (i + 1));
        table = next;
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{Assignment, Clause, Lit};
    use proptest::prelude::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn empty_formula_counts_one() {
        assert_eq!(brute_wmc(&Formula::default(), &Weights::unit()).unwrap(), big(1));
    }

    #[test]
    fn single_binary_clause() {
        let f = Formula::from_dimacs(&[&[1, 2]]);
        assert_eq!(brute_wmc(&f, &Weights::unit()).unwrap(), big(3));

        let mut w = Weights::unit();
        w.set(Lit::from_dimacs(1), big(2));
        w.set(Lit::from_dimacs(-1), big(1));
        w.set(Lit::from_dimacs(2), big(3));
        w.set(Lit::from_dimacs(-2), big(5));
        // 2*3 + 2*5 + 1*3
        assert_eq!(brute_wmc(&f, &w).unwrap(), big(19));
    }

    #[test]
    fn empty_clause_counts_zero() {
        let f = Formula::from_clauses(vec![Clause::default()]);
        assert_eq!(brute_wmc(&f, &Weights::unit()).unwrap(), big(0));
    }

    #[test]
    fn idle_variables_are_factors() {
        let f = Formula::from_dimacs(&[&[1, 2]]).with_extra_vars([Var::new(9)]);
        let mut w = Weights::unit();
        w.set(Var::new(9).pos(), big(4));
        assert_eq!(brute_wmc(&f, &w).unwrap(), big(15));
    }

    #[test]
    fn cap_is_enforced() {
        let clauses: Vec<Clause> = (1..=12).map(|i| Clause::from_dimacs(&[i, i + 1])).collect();
        let f = Formula::from_clauses(clauses);
        assert_eq!(
            brute_wmc_capped(&f, &Weights::unit(), 12),
            Err(Error::TooLarge { vars: 13, cap: 12 })
        );
        assert!(brute_wmc_capped(&f, &Weights::unit(), 13).is_ok());
    }

    /// Independent count: walk assignments from the top down and subtract
    /// the falsifying ones from 2^n.
    fn falsifying_complement(f: &Formula) -> BigUint {
        let vars: Vec<Var> = f.vars().iter().copied().collect();
        let n = vars.len();
        let mut falsifying = 0u64;
        for a in (0..(1u64 << n)).rev() {
            let mut sigma = Assignment::new();
            for (i, &v) in vars.iter().enumerate() {
                sigma.set(v, a >> i & 1 == 1);
            }
            if !f.clauses().iter().all(|c| c.satisfied_by(&sigma)) {
                falsifying += 1;
            }
        }
        big((1u64 << n) - falsifying)
    }

    fn arb_formula(max_var: i64) -> impl Strategy<Value = Formula> {
        let lit = (1..=max_var, any::<bool>()).prop_map(|(v, s)| if s { v } else { -v });
        prop::collection::vec(prop::collection::vec(lit, 1..4), 0..10).prop_map(move |cs| {
            let clauses = cs.iter().map(|c| Clause::from_dimacs(c)).collect();
            Formula::from_clauses(clauses).with_extra_vars((1..=max_var as u32).map(Var::new))
        })
    }

    fn arb_weights(max_var: u32) -> impl Strategy<Value = Weights> {
        prop::collection::vec(1u64..=8, (2 * max_var) as usize).prop_map(move |ws| {
            let mut w = Weights::unit();
            for v in 1..=max_var {
                w.set(Var::new(v).pos(), big(ws[2 * (v as usize - 1)]));
                w.set(Var::new(v).neg(), big(ws[2 * (v as usize - 1) + 1]));
            }
            w
        })
    }

    proptest! {
        #[test]
        fn unweighted_matches_complement_count(f in arb_formula(7)) {
            prop_assert_eq!(brute_wmc(&f, &Weights::unit()).unwrap(), falsifying_complement(&f));
        }

        #[test]
        fn conditioning_identity(f in arb_formula(6), w in arb_weights(6), id in 1u32..=6) {
            let x = Var::new(id);
            let whole = brute_wmc(&f, &w).unwrap();
            let t = brute_wmc(&f.assign(x.pos()).unwrap(), &w).unwrap();
            let e = brute_wmc(&f.assign(x.neg()).unwrap(), &w).unwrap();
            prop_assert_eq!(whole, w.get(x.pos()) * t + w.get(x.neg()) * e);
        }

        #[test]
        fn disjoint_unions_multiply(f in arb_formula(5), g in arb_formula(5), w in arb_weights(10)) {
            // shift g onto variables 6..=10
            let shifted: Vec<Clause> = g
                .clauses()
                .iter()
                .map(|c| Clause::new(c.lits().iter().map(|l| Var::new(l.var().id() + 5).lit(l.is_positive())).collect()))
                .collect();
            let g = Formula::from_clauses(shifted).with_extra_vars((6..=10).map(Var::new));
            let mut clauses = f.clauses().to_vec();
            clauses.extend(g.clauses().iter().cloned());
            let union = Formula::from_clauses(clauses).with_extra_vars((1..=10).map(Var::new));
            prop_assert_eq!(
                brute_wmc(&union, &w).unwrap(),
                brute_wmc(&f, &w).unwrap() * brute_wmc(&g, &w).unwrap()
            );
        }
    }
}
