//! Branch-and-reduce counters for 2-CNF and 3-CNF formulas.
//!
//! Both drivers reduce, stop on an empty formula or an empty clause, branch
//! on a high-degree variable while one exists, and otherwise count the
//! remaining low-degree formula with a path-decomposition dynamic program
//! (primal graph for 2-CNF, dual graph for 3-CNF), or by enumeration when
//! few variables are left.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{contract, Error, Result};
use crate::formula::{check_alpha, Formula, Instance, Var};
use crate::graphs::{dual_graph, primal_graph};
use crate::oracle::brute_wmc_capped;
use crate::pathdecomp::heuristic_decompose;
use crate::pwdp::{dual_count_report, primal_count_report, DEFAULT_DENSE_BITS};
use crate::reduce::{reduce_fixpoint, ReduceConfig, RuleId};

/// Default weight of 2-clauses in the 3-CNF measure `m3 + alpha * m2`.
pub const DEFAULT_ALPHA: f64 = 0.6309297;

/// Largest accepted terminal enumeration cap.
pub const MAX_BRUTE_CAP: usize = 32;

const BOUND_EPS: f64 = 1e-9;

/// Which variable wins when several qualify for branching.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default, Serialize)]
pub enum TieBreak {
    #[default]
    LowestId,
    HighestId,
}

#[derive(Clone, PartialEq, Debug)]
pub struct SolverConfig {
    pub alpha: f64,
    /// Phase-three formulas with at most this many variables are enumerated.
    pub brute_cap: usize,
    pub reduce: ReduceConfig,
    /// Decomposition widths above this are logged.
    pub width_cap: Option<usize>,
    pub tie_break: TieBreak,
    pub dense_bits: usize,
    /// Turn failed branch or phase-three checks into errors.
    pub paranoid: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            alpha: DEFAULT_ALPHA,
            brute_cap: 20,
            reduce: ReduceConfig::default(),
            width_cap: None,
            tie_break: TieBreak::LowestId,
            dense_bits: DEFAULT_DENSE_BITS,
            paranoid: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        check_alpha(self.alpha)?;
        if self.brute_cap > MAX_BRUTE_CAP {
            return Err(Error::Config(format!(
                "brute cap {} exceeds the maximum of {MAX_BRUTE_CAP}",
                self.brute_cap
            )));
        }
        Ok(())
    }
}

/// Measured decreases at one branch and the lower bounds they must meet.
#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct BranchRecord {
    pub var: u32,
    pub degree: usize,
    pub delta_t: f64,
    pub delta_f: f64,
    pub lb_each: f64,
    pub lb_sum: Option<f64>,
    pub ok: bool,
}

/// Shape of the formula at one phase-three entry.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct PhaseThreeRecord {
    pub n: usize,
    pub m: usize,
    pub max_degree: usize,
    /// Set when the entry conditions hold.
    pub ok: bool,
    pub brute: bool,
    pub width: Option<isize>,
}

#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize)]
pub struct TerminalCounts {
    pub dp: usize,
    pub brute: usize,
    pub empty: usize,
    pub empty_clause: usize,
}

#[derive(Clone, PartialEq, Debug, Default, Serialize)]
pub struct SearchStats {
    /// Reduced instances visited, the root included.
    pub nodes: usize,
    pub branches: usize,
    pub rule_counts: BTreeMap<String, usize>,
    pub deltas: Vec<BranchRecord>,
    pub widths: Vec<isize>,
    pub terminal: TerminalCounts,
    pub phase_three: Vec<PhaseThreeRecord>,
    pub max_dp_states: usize,
}

impl SearchStats {
    fn count_rules(&mut self, applied: &[RuleId]) {
        for r in applied {
            *self.rule_counts.entry(r.to_string()).or_default() += 1;
        }
    }

    pub fn branch_violations(&self) -> usize {
        self.deltas.iter().filter(|d| !d.ok).count()
    }

    pub fn phase_three_violations(&self) -> usize {
        self.phase_three.iter().filter(|p| !p.ok).count()
    }
}

/// Per-branch measure decreases `(a_1, ..., a_l)`: all positive, at least two.
#[derive(Clone, PartialEq, Debug)]
pub struct BranchingVector(Vec<f64>);

impl BranchingVector {
    pub fn new(entries: Vec<f64>) -> Result<BranchingVector> {
        if entries.len() < 2 {
            return contract("a branching vector needs at least two entries");
        }
        if let Some(a) = entries.iter().find(|a| !(a.is_finite() && **a > 0.0)) {
            return contract(format!("branching vector entries must be positive, got {a}"));
        }
        Ok(BranchingVector(entries))
    }

    pub fn entries(&self) -> &[f64] {
        &self.0
    }
}

/// The root above 1 of `1 - sum x^(-a_i)`, by bisection.
pub fn branching_factor(v: &BranchingVector) -> f64 {
    let a = v.entries();
    let f = |x: f64| 1.0 - a.iter().map(|&ai| x.powf(-ai)).sum::<f64>();
    let min_a = a.iter().copied().fold(f64::INFINITY, f64::min);
    let (mut lo, mut hi) = (1.0, (a.len() as f64).powf(1.0 / min_a));
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Convenience wrapper over [`BranchingVector::new`] and [`branching_factor`].
pub fn tau(entries: &[f64]) -> Result<f64> {
    BranchingVector::new(entries.to_vec()).map(|v| branching_factor(&v))
}

fn pick(mut candidates: impl Iterator<Item = Var>, tie: TieBreak) -> Option<Var> {
    match tie {
        TieBreak::LowestId => candidates.next(),
        TieBreak::HighestId => candidates.last(),
    }
}

/// A maximum-degree variable if the degree is at least 5, else a degree-4
/// variable with at least three degree-4 neighbours, else nothing.
pub fn select_var_2cnf(f: &Formula, tie: TieBreak) -> Option<Var> {
    let profile = f.degree_profile();
    if profile.max_degree >= 5 {
        return pick(profile.max_degree_vars(), tie);
    }
    let fours = profile
        .degrees
        .iter()
        .filter(|&(_, &d)| d == 4)
        .map(|(&v, _)| v)
        .filter(|&v| f.neighborhood(v).count(4) >= 3);
    pick(fours, tie)
}

/// A maximum-degree variable if the degree is at least 3.
pub fn select_var_3cnf(f: &Formula, tie: TieBreak) -> Option<Var> {
    let profile = f.degree_profile();
    if profile.max_degree >= 3 {
        pick(profile.max_degree_vars(), tie)
    } else {
        None
    }
}

/// Lower bounds on the clause-count decrease of each branch on a
/// maximum-degree variable `x` of a reduced 2-CNF, and on their sum when the
/// degree is at most 7.
pub fn degree_branch_bounds(f: &Formula, x: Var) -> Result<(usize, Option<usize>)> {
    let profile = f.degree_profile();
    let d = profile.degrees.get(&x).copied().unwrap_or(0);
    if d != profile.max_degree {
        return contract(format!("{x} has degree {d}, below the maximum {}", profile.max_degree));
    }
    let nb = f.neighborhood(x);
    let each = d + nb.count(2);
    let sum = (d <= 7).then(|| {
        let weighted: usize = (2..=d).map(|i| (i - 1) * nb.count(i)).sum();
        2 * d + nb.count(2) + weighted.div_ceil(2) + 1
    });
    Ok((each, sum))
}

/// Lower bounds on the measure decrease of each branch on `x` in a reduced
/// 3-CNF, and on their sum.
pub fn measure_branch_bounds(f: &Formula, x: Var, alpha: f64) -> (f64, f64) {
    let (mut c2, mut c3) = (0.0, 0.0);
    for c in f.clauses().iter().filter(|c| c.contains_var(x)) {
        match c.len() {
            2 => c2 += 1.0,
            3 => c3 += 1.0,
            _ => {}
        }
    }
    (c2 * alpha + c3 * (1.0 - alpha), 2.0 * c2 * alpha + c3 * (2.0 - alpha))
}

/// Clause count and 3-CNF measure of a reduced formula; a formula holding
/// an empty clause is a finished branch and measures 0.
fn clause_count(f: &Formula) -> f64 {
    if f.has_empty_clause() {
        0.0
    } else {
        f.num_clauses() as f64
    }
}

fn measure(f: &Formula, alpha: f64) -> f64 {
    if f.has_empty_clause() {
        return 0.0;
    }
    let p = f.degree_profile();
    p.m3() as f64 + alpha * p.m2() as f64
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Width {
    Two,
    Three,
}

struct Search<'a> {
    cfg: &'a SolverConfig,
    width: Width,
    stats: SearchStats,
}

impl Search<'_> {
    fn reduce(&mut self, inst: &Instance) -> Result<Instance> {
        let r = reduce_fixpoint(inst, &self.cfg.reduce)?;
        self.stats.count_rules(&r.applied);
        Ok(r.instance)
    }

    fn select(&self, f: &Formula) -> Option<Var> {
        match self.width {
            Width::Two => select_var_2cnf(f, self.cfg.tie_break),
            Width::Three => select_var_3cnf(f, self.cfg.tie_break),
        }
    }

    /// `inst` must already be reduced.
    fn solve(&mut self, inst: Instance) -> Result<BigUint> {
        self.stats.nodes += 1;
        let f = &inst.formula;
        if f.clauses().is_empty() {
            self.stats.terminal.empty += 1;
            return Ok(inst.multiplier * f.vars().iter().map(|&v| inst.weights.var_sum(v)).product::<BigUint>());
        }
        if f.has_empty_clause() {
            self.stats.terminal.empty_clause += 1;
            return Ok(BigUint::zero());
        }
        match self.select(f) {
            Some(x) => self.branch(inst, x),
            None => self.phase_three(inst),
        }
    }

    fn branch(&mut self, inst: Instance, x: Var) -> Result<BigUint> {
        self.stats.branches += 1;
        let f = &inst.formula;
        let mut children = Vec::with_capacity(2);
        for lit in [x.pos(), x.neg()] {
            let child = Instance {
                formula: f.assign(lit)?,
                weights: inst.weights.clone(),
                multiplier: inst.multiplier.clone(),
            };
            children.push(self.reduce(&child)?);
        }
        let record = self.branch_record(f, x, &children[0].formula, &children[1].formula)?;
        if !record.ok {
            log::warn!("branch on {x} misses its decrease bounds: {record:?}");
            if self.cfg.paranoid {
                return Err(Error::Invariant(format!("branch on {x} misses its decrease bounds: {record:?}")));
            }
        }
        self.stats.deltas.push(record);
        let mut children = children.into_iter();
        let wt = self.solve(children.next().unwrap())?;
        let wf = self.solve(children.next().unwrap())?;
        Ok(inst.weights.get(x.pos()) * wt + inst.weights.get(x.neg()) * wf)
    }

    fn branch_record(&self, f: &Formula, x: Var, t: &Formula, e: &Formula) -> Result<BranchRecord> {
        let degree = f.degree(x);
        let (delta_t, delta_f, lb_each, lb_sum) = match self.width {
            Width::Two => {
                let (each, sum) = degree_branch_bounds(f, x)?;
                let m = f.num_clauses() as f64;
                (m - clause_count(t), m - clause_count(e), each as f64, sum.map(|s| s as f64))
            }
            Width::Three => {
                let (each, sum) = measure_branch_bounds(f, x, self.cfg.alpha);
                let mu = measure(f, self.cfg.alpha);
                (mu - measure(t, self.cfg.alpha), mu - measure(e, self.cfg.alpha), each, Some(sum))
            }
        };
        let ok = delta_t + BOUND_EPS >= lb_each
            && delta_f + BOUND_EPS >= lb_each
            && lb_sum.is_none_or(|s| delta_t + delta_f + BOUND_EPS >= s);
        Ok(BranchRecord { var: x.id(), degree, delta_t, delta_f, lb_each, lb_sum, ok })
    }

    fn phase_three_ok(&self, f: &Formula) -> bool {
        let profile = f.degree_profile();
        match self.width {
            Width::Two => {
                let fours_ok = profile
                    .degrees
                    .iter()
                    .filter(|&(_, &d)| d == 4)
                    .all(|(&v, _)| f.neighborhood(v).count(4) <= 2);
                let m = f.num_clauses();
                profile.max_degree <= 4 && fours_ok && profile.n(3) + 2 * profile.n(4) <= (8 * m).div_ceil(9)
            }
            Width::Three => profile.max_degree <= 2 && dual_graph(f).max_degree() <= 3,
        }
    }

    fn phase_three(&mut self, inst: Instance) -> Result<BigUint> {
        let f = &inst.formula;
        let ok = self.phase_three_ok(f);
        let mut record = PhaseThreeRecord {
            n: f.num_vars(),
            m: f.num_clauses(),
            max_degree: f.degree_profile().max_degree,
            ok,
            brute: false,
            width: None,
        };
        if !ok {
            log::warn!("phase-three entry conditions fail on {f}");
            if self.cfg.paranoid {
                return Err(Error::Invariant(format!("phase-three entry conditions fail on {f}")));
            }
        }
        let count = if f.num_vars() <= self.cfg.brute_cap {
            self.stats.terminal.brute += 1;
            record.brute = true;
            brute_wmc_capped(f, &inst.weights, self.cfg.brute_cap)?
        } else {
            self.stats.terminal.dp += 1;
            let (graph_width, report) = match self.width {
                Width::Two => {
                    let p = heuristic_decompose(&primal_graph(f));
                    (p.width(), primal_count_report(f, &inst.weights, &p, self.cfg.dense_bits)?)
                }
                Width::Three => {
                    let p = heuristic_decompose(&dual_graph(f));
                    (p.width(), dual_count_report(f, &inst.weights, &p, self.cfg.dense_bits)?)
                }
            };
            if self.cfg.width_cap.is_some_and(|cap| graph_width > cap as isize) {
                log::warn!("decomposition width {graph_width} exceeds the configured cap");
            }
            record.width = Some(graph_width);
            self.stats.widths.push(graph_width);
            self.stats.max_dp_states = self.stats.max_dp_states.max(report.max_states);
            report.count
        };
        self.stats.phase_three.push(record);
        Ok(inst.multiplier * count)
    }
}

fn run(inst: &Instance, cfg: &SolverConfig, width: Width) -> Result<(BigUint, SearchStats)> {
    cfg.validate()?;
    let k = match width {
        Width::Two => 2,
        Width::Three => 3,
    };
    if !inst.formula.is_k_cnf(k) {
        return contract(format!(
            "expected a {k}-CNF formula, found a clause of length {}",
            inst.formula.max_clause_len()
        ));
    }
    let mut search = Search { cfg, width, stats: SearchStats::default() };
    let root = search.reduce(inst)?;
    let count = search.solve(root)?;
    Ok((count, search.stats))
}

/// `W * WMC(F, w)` for a 2-CNF instance.
pub fn alg2cnf(inst: &Instance, cfg: &SolverConfig) -> Result<(BigUint, SearchStats)> {
    run(inst, cfg, Width::Two)
}

/// `W * WMC(F, w)` for a 3-CNF instance.
pub fn alg3cnf(inst: &Instance, cfg: &SolverConfig) -> Result<(BigUint, SearchStats)> {
    run(inst, cfg, Width::Three)
}
