//! The nine reduction rules, their priority-ordered detector and the
//! fixpoint driver.
//!
//! Rules are tried in order R1..R9 and the scan restarts at R1 after every
//! application, so a rule only ever fires when all earlier ones are
//! inapplicable.

pub mod checks;

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use serde::Serialize;

use crate::error::{contract, Error, Result};
use crate::formula::{Clause, Formula, Instance, Lit, Var};
use crate::graphs::{primal_graph, small_cut_split};
use crate::oracle::brute_wmc;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize)]
pub enum RuleId {
    R1,
    R2,
    R3,
    R4,
    R5,
    R6,
    R7,
    R8,
    R9,
}

impl RuleId {
    pub const ALL: [RuleId; 9] = [
        RuleId::R1,
        RuleId::R2,
        RuleId::R3,
        RuleId::R4,
        RuleId::R5,
        RuleId::R6,
        RuleId::R7,
        RuleId::R8,
        RuleId::R9,
    ];

    /// Position in priority order, 0 for R1.
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn describe(self) -> &'static str {
        match self {
            RuleId::R1 => "duplicate literal",
            RuleId::R2 => "tautology",
            RuleId::R3 => "subsumption",
            RuleId::R4 => "unit clause",
            RuleId::R5 => "unused variable",
            RuleId::R6 => "2-clause strengthening",
            RuleId::R7 => "2-clause equivalence",
            RuleId::R8 => "small disjoint part",
            RuleId::R9 => "small part behind a cut variable",
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "R{}", self.index() + 1)
    }
}

/// Where a rule applies. Clause fields are indices into the formula's
/// clause list.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum RuleSite {
    Duplicate { clause: usize, lit: Lit },
    Tautology { clause: usize },
    Subsumption { subsumer: usize, subsumed: usize },
    Unit { clause: usize, lit: Lit },
    Unused { var: Var },
    /// `two_clause = (a b)`, `target ⊇ (a !b)`; `removed = !b`.
    Strengthen { two_clause: usize, target: usize, removed: Lit },
    /// `first = (a b)`, `second = (!a !b)`; `var(a)` is eliminated.
    Equivalence { first: usize, second: usize, a: Lit, b: Lit },
    Disjoint { vars: BTreeSet<Var> },
    Cut { cut: Var, side: BTreeSet<Var> },
}

impl RuleSite {
    pub fn rule(&self) -> RuleId {
        match self {
            RuleSite::Duplicate { .. } => RuleId::R1,
            RuleSite::Tautology { .. } => RuleId::R2,
            RuleSite::Subsumption { .. } => RuleId::R3,
            RuleSite::Unit { .. } => RuleId::R4,
            RuleSite::Unused { .. } => RuleId::R5,
            RuleSite::Strengthen { .. } => RuleId::R6,
            RuleSite::Equivalence { .. } => RuleId::R7,
            RuleSite::Disjoint { .. } => RuleId::R8,
            RuleSite::Cut { .. } => RuleId::R9,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ReduceConfig {
    /// Largest variable count of the part split off by R8 and R9.
    pub small_part_limit: usize,
}

impl Default for ReduceConfig {
    fn default() -> Self {
        ReduceConfig { small_part_limit: 10 }
    }
}

/// `n + m + L`, which every rule application strictly decreases.
pub fn potential(f: &Formula) -> usize {
    f.num_vars() + f.num_clauses() + f.total_len()
}

/// A site for `rule` if it applies, ignoring whether earlier rules do.
pub fn find_site(inst: &Instance, rule: RuleId, cfg: &ReduceConfig) -> Option<RuleSite> {
    let f = &inst.formula;
    let clauses = f.clauses();
    match rule {
        RuleId::R1 => clauses
            .iter()
            .enumerate()
            .find_map(|(i, c)| c.duplicate().map(|lit| RuleSite::Duplicate { clause: i, lit })),
        RuleId::R2 => clauses
            .iter()
            .position(|c| c.complementary().is_some())
            .map(|clause| RuleSite::Tautology { clause }),
        RuleId::R3 => find_subsumption(clauses),
        RuleId::R4 => clauses
            .iter()
            .enumerate()
            .find(|(_, c)| c.len() == 1)
            .map(|(i, c)| RuleSite::Unit { clause: i, lit: c.lits()[0] }),
        RuleId::R5 => {
            let degrees = f.degrees();
            degrees
                .iter()
                .find(|(_, &d)| d == 0)
                .map(|(&var, _)| RuleSite::Unused { var })
        }
        RuleId::R6 => find_strengthening(clauses),
        RuleId::R7 => find_equivalence(clauses),
        RuleId::R8 => {
            // a lone component counts too; isolated unused variables do not
            let part = primal_graph(f)
                .components()
                .into_iter()
                .filter(|c| c.len() <= cfg.small_part_limit && c.iter().any(|&v| f.degree(Var::new(v as u32)) > 0))
                .min_by_key(|c| (c.len(), *c.first().unwrap()))?;
            let vars = part.into_iter().map(|v| Var::new(v as u32)).collect();
            Some(RuleSite::Disjoint { vars })
        }
        RuleId::R9 => {
            let g = primal_graph(f);
            small_cut_split(&g, cfg.small_part_limit).map(|(x, side)| RuleSite::Cut {
                cut: Var::new(x as u32),
                side: side.into_iter().map(|v| Var::new(v as u32)).collect(),
            })
        }
    }
}

fn find_subsumption(clauses: &[Clause]) -> Option<RuleSite> {
    for (j, d) in clauses.iter().enumerate() {
        for (i, c) in clauses.iter().enumerate() {
            if i != j && c.len() <= d.len() && c.is_subset_of(d) {
                // identical clauses: keep the earlier copy
                if d.is_subset_of(c) && c.len() == d.len() && i > j {
                    continue;
                }
                return Some(RuleSite::Subsumption { subsumer: i, subsumed: j });
            }
        }
    }
    None
}

fn two_clause_pair(c: &Clause) -> Option<(Lit, Lit)> {
    match c.lits() {
        &[p, q] if p.var() != q.var() => Some((p, q)),
        _ => None,
    }
}

fn find_strengthening(clauses: &[Clause]) -> Option<RuleSite> {
    for (i, c) in clauses.iter().enumerate() {
        let Some((p, q)) = two_clause_pair(c) else { continue };
        for (a, b) in [(p, q), (q, p)] {
            if let Some(j) = clauses
                .iter()
                .enumerate()
                .position(|(j, d)| j != i && d.contains(a) && d.contains(!b))
            {
                return Some(RuleSite::Strengthen { two_clause: i, target: j, removed: !b });
            }
        }
    }
    None
}

fn find_equivalence(clauses: &[Clause]) -> Option<RuleSite> {
    for (i, c) in clauses.iter().enumerate() {
        let Some((a, b)) = two_clause_pair(c) else { continue };
        let mirror = Clause::new(vec![!a, !b]);
        if let Some(j) = clauses.iter().position(|d| *d == mirror) {
            return Some(RuleSite::Equivalence { first: i, second: j, a, b });
        }
    }
    None
}

/// Lowest-numbered applicable rule with its site.
pub fn find_applicable(inst: &Instance, cfg: &ReduceConfig) -> Option<RuleSite> {
    RuleId::ALL.iter().find_map(|&r| find_site(inst, r, cfg))
}

fn site_holds(inst: &Instance, site: &RuleSite, cfg: &ReduceConfig) -> bool {
    let f = &inst.formula;
    let clauses = f.clauses();
    let clause = |i: usize| clauses.get(i);
    match site {
        RuleSite::Duplicate { clause: i, lit } => {
            clause(*i).is_some_and(|c| c.lits().iter().filter(|&&l| l == *lit).count() >= 2)
        }
        RuleSite::Tautology { clause: i } => clause(*i).is_some_and(|c| c.complementary().is_some()),
        RuleSite::Subsumption { subsumer, subsumed } => {
            subsumer != subsumed
                && matches!((clause(*subsumer), clause(*subsumed)), (Some(c), Some(d)) if c.is_subset_of(d))
        }
        RuleSite::Unit { clause: i, lit } => clause(*i).is_some_and(|c| c.lits() == [*lit]),
        RuleSite::Unused { var } => f.vars().contains(var) && f.degree(*var) == 0,
        RuleSite::Strengthen { two_clause, target, removed } => {
            two_clause != target
                && match (clause(*two_clause).and_then(two_clause_pair), clause(*target)) {
                    (Some((p, q)), Some(d)) => {
                        let b = !*removed;
                        let a = if p == b { q } else { p };
                        (p == b || q == b) && d.contains(a) && d.contains(*removed)
                    }
                    _ => false,
                }
        }
        RuleSite::Equivalence { first, second, a, b } => {
            a.var() != b.var()
                && clause(*first).is_some_and(|c| *c == Clause::new(vec![*a, *b]))
                && clause(*second).is_some_and(|c| *c == Clause::new(vec![!*a, !*b]))
        }
        RuleSite::Disjoint { vars } => {
            !vars.is_empty()
                && vars.len() <= cfg.small_part_limit
                && vars.is_subset(f.vars())
                && clauses.iter().any(|c| !c.is_empty() && c.vars().all(|v| vars.contains(&v)))
                && clauses
                    .iter()
                    .all(|c| c.vars().all(|v| vars.contains(&v)) || c.vars().all(|v| !vars.contains(&v)))
        }
        RuleSite::Cut { cut, side } => {
            let inside = |c: &Clause| c.vars().all(|v| v == *cut || side.contains(&v));
            !side.is_empty()
                && !side.contains(cut)
                && side.len() < cfg.small_part_limit
                && side.is_subset(f.vars())
                && clauses.iter().any(|c| !c.is_empty() && inside(c))
                && clauses.iter().any(|c| !inside(c) && c.contains_var(*cut))
                && clauses
                    .iter()
                    .all(|c| inside(c) || c.vars().all(|v| !side.contains(&v)))
        }
    }
}

/// Applies one rule at `site`. Fails with a contract error if the site no
/// longer applies to `inst`.
pub fn apply_rule(inst: &Instance, site: &RuleSite, cfg: &ReduceConfig) -> Result<Instance> {
    if !site_holds(inst, site, cfg) {
        return contract(format!("{} is not applicable at {site:?}", site.rule()));
    }
    let mut out = inst.clone();
    let (mut clauses, mut vars) = out.formula.clone().into_parts();
    match site {
        RuleSite::Duplicate { clause, lit } => {
            let mut lits = clauses[*clause].without_lit(*lit).lits().to_vec();
            lits.push(*lit);
            clauses[*clause] = Clause::new(lits);
        }
        RuleSite::Tautology { clause } => {
            clauses.remove(*clause);
        }
        RuleSite::Subsumption { subsumed, .. } => {
            clauses.remove(*subsumed);
        }
        RuleSite::Unit { lit, .. } => {
            out.multiplier *= inst.weights.get(*lit);
            out.formula = inst.formula.assign(*lit)?;
            return Ok(out);
        }
        RuleSite::Unused { var } => {
            out.multiplier *= inst.weights.var_sum(*var);
            vars.remove(var);
        }
        RuleSite::Strengthen { target, removed, .. } => {
            clauses[*target] = clauses[*target].without_lit(*removed);
        }
        RuleSite::Equivalence { a, b, .. } => {
            let w = &inst.weights;
            out.weights.set(!*b, w.get(!*b) * w.get(*a));
            out.weights.set(*b, w.get(*b) * w.get(!*a));
            let gone = a.var();
            let (a, b) = (*a, *b);
            let substitute = |l: Lit| {
                if l == a {
                    !b
                } else if l == !a {
                    b
                } else {
                    l
                }
            };
            clauses = clauses
                .into_iter()
                .filter_map(|c| {
                    if !c.contains_var(gone) {
                        return Some(c);
                    }
                    let c = c.map_lits(substitute);
                    c.complementary().is_none().then_some(c)
                })
                .collect();
            vars.remove(&gone);
        }
        RuleSite::Disjoint { vars: part } => {
            let (inner, outer): (Vec<Clause>, Vec<Clause>) = clauses
                .into_iter()
                .partition(|c| !c.is_empty() && c.vars().all(|v| part.contains(&v)));
            let f1 = Formula::from_parts(inner, part.clone());
            out.multiplier *= small_count(&f1, inst)?;
            clauses = outer;
            vars.retain(|v| !part.contains(v));
        }
        RuleSite::Cut { cut, side } => {
            let (inner, outer): (Vec<Clause>, Vec<Clause>) = clauses
                .into_iter()
                .partition(|c| !c.is_empty() && c.vars().all(|v| v == *cut || side.contains(&v)));
            let mut f1_vars = side.clone();
            f1_vars.insert(*cut);
            let f1 = Formula::from_parts(inner, f1_vars);
            let wt = small_count(&f1.assign(cut.pos())?, inst)?;
            let wf = small_count(&f1.assign(cut.neg())?, inst)?;
            out.weights.set(cut.pos(), inst.weights.get(cut.pos()) * wt);
            out.weights.set(cut.neg(), inst.weights.get(cut.neg()) * wf);
            clauses = outer;
            vars.retain(|v| !side.contains(v));
        }
    }
    out.formula = Formula::from_parts(clauses, vars);
    Ok(out)
}

fn small_count(f: &Formula, inst: &Instance) -> Result<BigUint> {
    brute_wmc(f, &inst.weights)
}

/// Outcome of [`reduce_fixpoint`].
#[derive(Clone, Debug)]
pub struct Reduction {
    pub instance: Instance,
    pub applied: Vec<RuleId>,
    pub initial_potential: usize,
}

impl Reduction {
    /// Applications per rule, indexed by [`RuleId::index`].
    pub fn rule_counts(&self) -> [usize; 9] {
        let mut counts = [0; 9];
        for r in &self.applied {
            counts[r.index()] += 1;
        }
        counts
    }
}

/// Applies rules until none is applicable.
pub fn reduce_fixpoint(inst: &Instance, cfg: &ReduceConfig) -> Result<Reduction> {
    let initial_potential = potential(&inst.formula);
    let mut current = inst.clone();
    let mut applied = Vec::new();
    let mut phi = initial_potential;
    while let Some(site) = find_applicable(&current, cfg) {
        current = apply_rule(&current, &site, cfg)?;
        let next = potential(&current.formula);
        if next >= phi {
            return Err(Error::Invariant(format!(
                "{} did not decrease the potential ({phi} -> {next})",
                site.rule()
            )));
        }
        phi = next;
        applied.push(site.rule());
    }
    Ok(Reduction { instance: current, applied, initial_potential })
}

/// Shorthand for the reduced instance alone.
pub fn reduce(inst: &Instance, cfg: &ReduceConfig) -> Result<Instance> {
    reduce_fixpoint(inst, cfg).map(|r| r.instance)
}
