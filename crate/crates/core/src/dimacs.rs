//! DIMACS CNF reading and writing, with literal weights given on comment
//! lines of the form `c p weight <lit> <w> 0`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};
use crate::formula::{Clause, Formula, Instance, Lit, Var, Weights};

/// A parsed file with its header values.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ParsedInput {
    pub instance: Instance,
    pub declared_vars: usize,
    pub declared_clauses: usize,
    pub weight_lines: usize,
}

fn parse_err<T>(line: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse { line, msg: msg.into() })
}

fn parse_int(tok: &str, line: usize) -> Result<i64> {
    tok.parse::<i64>()
        .or_else(|_| parse_err(line, format!("expected an integer, found {tok:?}")))
}

pub fn parse_dimacs(text: &str) -> Result<ParsedInput> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current: Vec<i64> = Vec::new();
    let mut clause_start = 0;
    let mut weights: BTreeMap<i64, (BigUint, usize)> = BTreeMap::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        if trimmed == "%" {
            break;
        }
        let mut toks = trimmed.split_whitespace();
        let first = toks.next().unwrap();
        if first == "c" {
            let rest: Vec<&str> = toks.collect();
            if rest.len() >= 4 && rest[0] == "p" && rest[1] == "weight" {
                if rest.len() > 5 || (rest.len() == 5 && rest[4] != "0") {
                    return parse_err(line, "weight line must be `c p weight <lit> <w> 0`");
                }
                let lit = parse_int(rest[2], line)?;
                let w: BigUint = rest[3]
                    .parse()
                    .or_else(|_| parse_err(line, format!("weight must be a positive integer, found {:?}", rest[3])))?;
                if w < BigUint::one() {
                    return parse_err(line, "weight must be at least 1");
                }
                if lit == 0 {
                    return parse_err(line, "weight line names literal 0");
                }
                if weights.insert(lit, (w, line)).is_some() {
                    return parse_err(line, format!("second weight for literal {lit}"));
                }
            }
            continue;
        }
        if first.starts_with('c') {
            continue;
        }
        if first == "p" {
            if header.is_some() {
                return parse_err(line, "second problem line");
            }
            let fields: Vec<&str> = toks.collect();
            if fields.len() != 3 || fields[0] != "cnf" {
                return parse_err(line, "problem line must be `p cnf <vars> <clauses>`");
            }
            let n = fields[1].parse().or_else(|_| parse_err(line, "bad variable count"))?;
            let m = fields[2].parse().or_else(|_| parse_err(line, "bad clause count"))?;
            header = Some((n, m, line));
            continue;
        }
        let Some((n, _, _)) = header else {
            return parse_err(line, "clause before the `p cnf` header");
        };
        for tok in std::iter::once(first).chain(toks) {
            let lit = parse_int(tok, line)?;
            if lit == 0 {
                clauses.push(Clause::from_dimacs(&current));
                current.clear();
                continue;
            }
            if lit.unsigned_abs() as usize > n {
                return parse_err(line, format!("literal {lit} out of range for {n} variables"));
            }
            if current.is_empty() {
                clause_start = line;
            }
            current.push(lit);
        }
    }

    let Some((n, m, header_line)) = header else {
        return parse_err(last_line.max(1), "missing `p cnf` header");
    };
    if !current.is_empty() {
        return parse_err(clause_start, "clause is not terminated by 0");
    }
    if clauses.len() != m {
        return parse_err(header_line, format!("header declares {m} clauses, found {}", clauses.len()));
    }
    let mut w = Weights::unit();
    for (&lit, (weight, line)) in &weights {
        if lit.unsigned_abs() as usize > n {
            return parse_err(*line, format!("weight for literal {lit} out of range for {n} variables"));
        }
        w.set(Lit::from_dimacs(lit), weight.clone());
    }
    let vars: BTreeSet<Var> = (1..=n as u32).map(Var::new).collect();
    let formula = Formula::new(clauses, vars)?;
    Ok(ParsedInput {
        instance: Instance::new(formula, w),
        declared_vars: n,
        declared_clauses: m,
        weight_lines: weights.len(),
    })
}

/// DIMACS text for `f` and `w`. The variable count is the largest variable
/// id; weight lines appear for literals whose weight is not 1.
pub fn emit_dimacs(f: &Formula, w: &Weights) -> String {
    let n = f.vars().iter().next_back().map_or(0, |v| v.id());
    let mut out = format!("p cnf {n} {}\n", f.num_clauses());
    let mut weighted: Vec<(Lit, &BigUint)> = w
        .non_unit()
        .filter(|(l, _)| f.vars().contains(&l.var()))
        .collect();
    weighted.sort_by_key(|(l, _)| l.code());
    for (l, weight) in weighted {
        writeln!(out, "c p weight {l} {weight} 0").unwrap();
    }
    for c in f.clauses() {
        for l in c.lits() {
            write!(out, "{l} ").unwrap();
        }
        out.push_str("0\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    fn parse_line(text: &str) -> usize {
        match parse_dimacs(text) {
            Err(Error::Parse { line, .. }) => line,
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn parses_examples() {
        let p = parse_dimacs("p cnf 2 1\n1 2 0\n").unwrap();
        assert_eq!(p.instance.formula, Formula::from_dimacs(&[&[1, 2]]));
        assert!(p.instance.weights.is_unweighted());

        let p = parse_dimacs("p cnf 1 1\nc p weight 1 3 0\n-1 0\n").unwrap();
        assert_eq!(p.instance.formula.clauses(), &[Clause::from_dimacs(&[-1])]);
        assert_eq!(p.instance.weights.get(Lit::from_dimacs(1)), &big(3));
        assert_eq!(p.instance.weights.get(Lit::from_dimacs(-1)), &big(1));
        assert_eq!(p.weight_lines, 1);
    }

    #[test]
    fn clauses_may_span_lines_and_vars_may_be_unused() {
        let p = parse_dimacs("c hello\np cnf 5 2\n1 -2\n 3 0 4\n0\n").unwrap();
        assert_eq!(p.instance.formula.num_clauses(), 2);
        assert_eq!(p.instance.formula.num_vars(), 5);
    }

    #[test]
    fn reports_error_lines() {
        assert_eq!(parse_line("p cnf 1 1\n2 0\n"), 2);
        assert_eq!(parse_line("1 2 0\n"), 1);
        assert_eq!(parse_line("c only a comment\n"), 1);
        assert_eq!(parse_line("p cnf 2 2\n1 2 0\n"), 1);
        assert_eq!(parse_line("p cnf 2 1\nc p weight 1 0 0\n1 2 0\n"), 2);
        assert_eq!(parse_line("p cnf 2 1\nc p weight 3 2 0\n1 2 0\n"), 2);
        assert_eq!(parse_line("p cnf 2 1\n1 2\n"), 2);
        assert_eq!(parse_line("p cnf 2 1\n1 x 0\n"), 2);
        assert_eq!(parse_line("p cnf 2 1\nc p weight 1 2 0\nc p weight 1 4 0\n1 0\n"), 3);
    }

    fn arb_text() -> impl Strategy<Value = String> {
        let lit = (1i64..=6, any::<bool>()).prop_map(|(v, s)| if s { v } else { -v });
        let clauses = prop::collection::vec(prop::collection::vec(lit, 0..4), 0..8);
        let weights = prop::collection::btree_map(
            (1i64..=6, any::<bool>()).prop_map(|(v, s)| if s { v } else { -v }),
            1u64..=9,
            0..6,
        );
        (clauses, weights).prop_map(|(cs, ws)| {
            let mut t = format!("p cnf 6 {}\n", cs.len());
            for (l, w) in ws {
                t.push_str(&format!("c p weight {l} {w} 0\n"));
            }
            for c in cs {
                for l in c {
                    t.push_str(&format!("{l} "));
                }
                t.push_str("0\n");
            }
            t
        })
    }

    proptest! {
        #[test]
        fn round_trip(text in arb_text()) {
            let a = parse_dimacs(&text).unwrap();
            let emitted = emit_dimacs(&a.instance.formula, &a.instance.weights);
            let b = parse_dimacs(&emitted).unwrap();
            prop_assert_eq!(&a.instance, &b.instance);
            prop_assert_eq!(a.declared_clauses, b.declared_clauses);
        }
    }
}
