//! Structural properties every reduced formula has. Each check returns the
//! list of violations it found; an empty list means the property holds.

use std::fmt;

use crate::error::Result;
use crate::formula::{Clause, Formula, Instance, Lit, Var};

use super::{reduce, ReduceConfig};

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Violation {
    UnitClause(Clause),
    /// A 2-clause holds a variable that occurs only once.
    LonelyVariable { clause: Clause, var: Var },
    /// A 2-clause `(a b)` coexists with a clause that it forbids.
    ForbiddenCompanion { two_clause: Clause, other: Clause },
    LongClause(Clause),
    LowDegree(Var),
    MoreVarsThanClauses { vars: usize, clauses: usize },
    /// A clause holds two degree-2 neighbours of `var`.
    SharedDegreeTwoNeighbours { var: Var, clause: Clause },
    /// Assigning `lit` and reducing left too many clauses behind.
    AssignmentLeftovers { lit: Lit, before: usize, after: usize, degree: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnitClause(c) => write!(f, "1-clause {c} survives"),
            Violation::LonelyVariable { clause, var } => {
                write!(f, "2-clause {clause} contains {var}, which has degree 1")
            }
            Violation::ForbiddenCompanion { two_clause, other } => {
                write!(f, "2-clause {two_clause} coexists with {other}")
            }
            Violation::LongClause(c) => write!(f, "clause {c} is not a 2-clause"),
            Violation::LowDegree(v) => write!(f, "{v} has degree below 2"),
            Violation::MoreVarsThanClauses { vars, clauses } => {
                write!(f, "{vars} variables but only {clauses} clauses")
            }
            Violation::SharedDegreeTwoNeighbours { var, clause } => {
                write!(f, "{clause} holds two degree-2 neighbours of {var}")
            }
            Violation::AssignmentLeftovers { lit, before, after, degree } => write!(
                f,
                "setting {lit} took m from {before} to {after}, expected a drop of at least {degree}"
            ),
        }
    }
}

/// No 1-clause, and 2-clauses only hold variables of degree at least 2.
/// Skipped when an empty clause is present.
pub fn check_clause_lengths(f: &Formula) -> Vec<Violation> {
    if f.has_empty_clause() {
        return Vec::new();
    }
    let degrees = f.degrees();
    let mut out = Vec::new();
    for c in f.clauses() {
        match c.len() {
            1 => out.push(Violation::UnitClause(c.clone())),
            2 => out.extend(
                c.vars()
                    .filter(|v| degrees[v] < 2)
                    .map(|var| Violation::LonelyVariable { clause: c.clone(), var }),
            ),
            _ => {}
        }
    }
    out
}

/// For every 2-clause `(a b)`: no other clause contains `a b`, `!a b` or
/// `a !b`, and `(!a !b)` is not a clause.
pub fn check_two_clause_exclusions(f: &Formula) -> Vec<Violation> {
    let mut out = Vec::new();
    let clauses = f.clauses();
    for (i, c) in clauses.iter().enumerate() {
        let &[a, b] = c.lits() else { continue };
        if a.var() == b.var() {
            continue;
        }
        for (j, d) in clauses.iter().enumerate() {
            if i == j {
                continue;
            }
            let has = |x: Lit, y: Lit| d.contains(x) && d.contains(y);
            let forbidden = has(a, b)
                || has(!a, b)
                || has(a, !b)
                || (d.len() == 2 && has(!a, !b));
            if forbidden {
                out.push(Violation::ForbiddenCompanion { two_clause: c.clone(), other: d.clone() });
            }
        }
    }
    out
}

/// A reduced 2-CNF has only 2-clauses, only variables of degree at least 2,
/// and no more variables than clauses. Skipped when an empty clause is
/// present.
pub fn check_reduced_2cnf(f: &Formula) -> Vec<Violation> {
    if f.has_empty_clause() {
        return Vec::new();
    }
    let mut out: Vec<Violation> = f
        .clauses()
        .iter()
        .filter(|c| c.len() != 2)
        .map(|c| Violation::LongClause(c.clone()))
        .collect();
    out.extend(
        f.degrees()
            .into_iter()
            .filter(|&(_, d)| d < 2)
            .map(|(v, _)| Violation::LowDegree(v)),
    );
    if f.num_vars() > f.num_clauses() {
        out.push(Violation::MoreVarsThanClauses { vars: f.num_vars(), clauses: f.num_clauses() });
    }
    out
}

/// No clause holds two degree-2 neighbours of the same variable.
pub fn check_degree_two_separation(f: &Formula) -> Vec<Violation> {
    let mut out = Vec::new();
    for &x in f.vars() {
        let nb = f.neighborhood(x);
        let Some(twos) = nb.by_degree.get(&2) else { continue };
        for c in f.clauses() {
            if c.vars().filter(|v| twos.contains(v)).count() >= 2 {
                out.push(Violation::SharedDegreeTwoNeighbours { var: x, clause: c.clone() });
            }
        }
    }
    out
}

/// Assigning any variable of a reduced 2-CNF and reducing again removes
/// every clause that contained it: the clause count drops by at least the
/// variable's degree. Results with an empty clause are skipped.
pub fn check_assignment_cleanup(inst: &Instance, cfg: &ReduceConfig) -> Result<Vec<Violation>> {
    let f = &inst.formula;
    let mut out = Vec::new();
    for (&x, &degree) in &f.degrees() {
        for lit in [x.pos(), x.neg()] {
            let child = Instance { formula: f.assign(lit)?, ..inst.clone() };
            let reduced = reduce(&child, cfg)?.formula;
            if reduced.has_empty_clause() {
                continue;
            }
            let (before, after) = (f.num_clauses(), reduced.num_clauses());
            if after + degree > before || reduced.clauses().iter().any(|c| c.len() < 2) {
                out.push(Violation::AssignmentLeftovers { lit, before, after, degree });
            }
        }
    }
    Ok(out)
}

/// Every check that applies to a reduced formula. The 2-CNF checks run
/// only when `two_cnf` is set.
pub fn check_reduced(inst: &Instance, two_cnf: bool, cfg: &ReduceConfig) -> Result<Vec<Violation>> {
    let f = &inst.formula;
    let mut out = check_clause_lengths(f);
    out.extend(check_two_clause_exclusions(f));
    if two_cnf && !f.has_empty_clause() {
        out.extend(check_reduced_2cnf(f));
        out.extend(check_degree_two_separation(f));
        out.extend(check_assignment_cleanup(inst, cfg)?);
    }
    Ok(out)
}
