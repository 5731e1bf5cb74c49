//! Variables, literals, clauses, formulas, literal weights and instances.
//!
//! Everything here is a plain value: operations such as [`Formula::assign`]
//! return a new formula and never mutate their receiver. Clauses keep their
//! literals sorted but allow duplicates, so that duplicate-literal and
//! tautology elimination stay observable as reduction rules.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::Not;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{contract, Error, Result};

/// A Boolean variable, identified by a positive index.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Var(u32);

impl Var {
    /// # Panics
    ///
    /// If `id` is zero.
    pub fn new(id: u32) -> Var {
        assert!(id > 0, "variable ids start at 1");
        Var(id)
    }

    pub fn id(self) -> u32 {
        self.0
    }

    pub fn pos(self) -> Lit {
        Lit(self.0 << 1)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(self) -> Lit {
        Lit((self.0 << 1) | 1)
    }

    pub fn lit(self, positive: bool) -> Lit {
        if positive {
            self.pos()
        } else {
            self.neg()
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

/// A literal; ordered by variable first, positive before negative.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Lit(u32);

impl Lit {
    pub fn var(self) -> Var {
        Var(self.0 >> 1)
    }

    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    /// Dense index usable for per-literal tables.
    pub fn code(self) -> usize {
        self.0 as usize
    }

    /// Builds a literal from its signed DIMACS form.
    ///
    /// # Panics
    ///
    /// If `value` is zero or out of the `u32` variable range.
    pub fn from_dimacs(value: i64) -> Lit {
        let id = u32::try_from(value.unsigned_abs()).expect("variable id out of range");
        Var::new(id).lit(value > 0)
    }

    pub fn to_dimacs(self) -> i64 {
        let id = i64::from(self.var().id());
        if self.is_positive() {
            id
        } else {
            -id
        }
    }

    /// Truth value of the literal when its variable takes `value`.
    pub fn eval(self, value: bool) -> bool {
        value == self.is_positive()
    }
}

impl Not for Lit {
    type Output = Lit;

    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// A disjunction of literals stored as a sorted multiset.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Clause(Vec<Lit>);

impl Clause {
    pub fn new(mut lits: Vec<Lit>) -> Clause {
        lits.sort_unstable();
        Clause(lits)
    }

    pub fn from_dimacs(lits: &[i64]) -> Clause {
        Clause::new(lits.iter().map(|&l| Lit::from_dimacs(l)).collect())
    }

    pub fn lits(&self) -> &[Lit] {
        &self.0
    }

    /// Number of literal occurrences, duplicates included.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, lit: Lit) -> bool {
        self.0.binary_search(&lit).is_ok()
    }

    pub fn contains_var(&self, var: Var) -> bool {
        self.contains(var.pos()) || self.contains(var.neg())
    }

    /// Distinct variables of the clause in ascending order.
    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        let mut last = None;
        self.0.iter().filter_map(move |l| {
            let v = l.var();
            if last == Some(v) {
                None
            } else {
                last = Some(v);
                Some(v)
            }
        })
    }

    /// First literal that occurs more than once.
    pub fn duplicate(&self) -> Option<Lit> {
        self.0.windows(2).find(|w| w[0] == w[1]).map(|w| w[0])
    }

    /// A positive literal whose complement also occurs.
    pub fn complementary(&self) -> Option<Lit> {
        self.0
            .windows(2)
            .find(|w| w[0].var() == w[1].var() && w[0] != w[1])
            .map(|w| w[0])
    }

    /// Set inclusion, ignoring multiplicities.
    pub fn is_subset_of(&self, other: &Clause) -> bool {
        self.0.iter().all(|&l| other.contains(l))
    }

    pub fn satisfied_by(&self, assignment: &Assignment) -> bool {
        self.0
            .iter()
            .any(|&l| assignment.get(l.var()).is_some_and(|v| l.eval(v)))
    }

    pub(crate) fn without_lit(&self, lit: Lit) -> Clause {
        Clause(self.0.iter().copied().filter(|&l| l != lit).collect())
    }

    pub(crate) fn map_lits(&self, f: impl Fn(Lit) -> Lit) -> Clause {
        Clause::new(self.0.iter().map(|&l| f(l)).collect())
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, ")")
    }
}

/// A total or partial assignment of truth values.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Assignment(BTreeMap<Var, bool>);

impl Assignment {
    pub fn new() -> Assignment {
        Assignment::default()
    }

    pub fn set(&mut self, var: Var, value: bool) {
        self.0.insert(var, value);
    }

    pub fn get(&self, var: Var) -> Option<bool> {
        self.0.get(&var).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Var, bool)> + '_ {
        self.0.iter().map(|(&v, &b)| (v, b))
    }
}

/// A CNF formula together with the variable set it ranges over.
///
/// The variable set may contain variables that no clause mentions; those are
/// the 0-degree variables that still contribute to the weighted count.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Formula {
    clauses: Vec<Clause>,
    vars: BTreeSet<Var>,
}

impl Formula {
    /// Fails if some clause mentions a variable outside `vars`.
    pub fn new(clauses: Vec<Clause>, vars: BTreeSet<Var>) -> Result<Formula> {
        if let Some(v) = clauses
            .iter()
            .flat_map(|c| c.vars())
            .find(|v| !vars.contains(v))
        {
            return contract(format!("clause variable {v} missing from the variable set"));
        }
        Ok(Formula { clauses, vars })
    }

    /// Formula over exactly the variables its clauses mention.
    pub fn from_clauses(clauses: Vec<Clause>) -> Formula {
        let vars = clauses.iter().flat_map(|c| c.vars()).collect();
        Formula { clauses, vars }
    }

    pub fn from_dimacs(clauses: &[&[i64]]) -> Formula {
        Formula::from_clauses(clauses.iter().map(|c| Clause::from_dimacs(c)).collect())
    }

    pub(crate) fn from_parts(clauses: Vec<Clause>, vars: BTreeSet<Var>) -> Formula {
        debug_assert!(clauses.iter().flat_map(|c| c.vars()).all(|v| vars.contains(&v)));
        Formula { clauses, vars }
    }

    /// Adds variables that do not occur in any clause.
    pub fn with_extra_vars(mut self, extra: impl IntoIterator<Item = Var>) -> Formula {
        self.vars.extend(extra);
        self
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn vars(&self) -> &BTreeSet<Var> {
        &self.vars
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    /// Total number of literal occurrences.
    pub fn total_len(&self) -> usize {
        self.clauses.iter().map(Clause::len).sum()
    }

    pub fn has_empty_clause(&self) -> bool {
        self.clauses.iter().any(Clause::is_empty)
    }

    pub fn max_clause_len(&self) -> usize {
        self.clauses.iter().map(Clause::len).max().unwrap_or(0)
    }

    /// True if every clause has at most `k` literal occurrences.
    pub fn is_k_cnf(&self, k: usize) -> bool {
        self.max_clause_len() <= k
    }

    /// `F[lit = 1]`: drops clauses containing `lit`, deletes `!lit` from the
    /// rest and removes the variable. Clauses may become empty.
    pub fn assign(&self, lit: Lit) -> Result<Formula> {
        let var = lit.var();
        if !self.vars.contains(&var) {
            return contract(format!("cannot assign {lit}: {var} is not in the formula"));
        }
        let clauses = self
            .clauses
            .iter()
            .filter(|c| !c.contains(lit))
            .map(|c| {
                if c.contains(!lit) {
                    c.without_lit(!lit)
                } else {
                    c.clone()
                }
            })
            .collect();
        let mut vars = self.vars.clone();
        vars.remove(&var);
        Ok(Formula { clauses, vars })
    }

    pub fn degree(&self, var: Var) -> usize {
        self.clauses
            .iter()
            .flat_map(|c| c.lits())
            .filter(|l| l.var() == var)
            .count()
    }

    pub fn degrees(&self) -> BTreeMap<Var, usize> {
        let mut degrees: BTreeMap<Var, usize> = self.vars.iter().map(|&v| (v, 0)).collect();
        for l in self.clauses.iter().flat_map(|c| c.lits()) {
            *degrees.entry(l.var()).or_default() += 1;
        }
        degrees
    }

    pub fn degree_profile(&self) -> DegreeProfile {
        let degrees = self.degrees();
        let mut histogram = BTreeMap::new();
        for &d in degrees.values() {
            *histogram.entry(d).or_default() += 1;
        }
        let mut clause_lengths = BTreeMap::new();
        for c in &self.clauses {
            *clause_lengths.entry(c.len()).or_default() += 1;
        }
        let max_degree = degrees.values().copied().max().unwrap_or(0);
        DegreeProfile {
            degrees,
            histogram,
            clause_lengths,
            max_degree,
        }
    }

    /// Neighbours of `var` split by their degree in this formula.
    pub fn neighborhood(&self, var: Var) -> Neighborhood {
        let all: BTreeSet<Var> = self
            .clauses
            .iter()
            .filter(|c| c.contains_var(var))
            .flat_map(|c| c.vars())
            .filter(|&v| v != var)
            .collect();
        let mut by_degree: BTreeMap<usize, BTreeSet<Var>> = BTreeMap::new();
        if !all.is_empty() {
            let degrees = self.degrees();
            for &v in &all {
                by_degree.entry(degrees[&v]).or_default().insert(v);
            }
        }
        Neighborhood { all, by_degree }
    }

    /// `m3 + alpha * m2`. One-literal clauses contribute nothing.
    pub fn measure_mu(&self, alpha: f64) -> Result<f64> {
        check_alpha(alpha)?;
        let mut m2 = 0usize;
        let mut m3 = 0usize;
        let mut short = 0usize;
        for c in &self.clauses {
            match c.len() {
                2 => m2 += 1,
                3 => m3 += 1,
                0 | 1 => short += 1,
                _ => {}
            }
        }
        if short > 0 {
            log::warn!("measure evaluated on a formula with {short} clause(s) of length <= 1");
        }
        Ok(m3 as f64 + alpha * m2 as f64)
    }

    pub(crate) fn into_parts(self) -> (Vec<Clause>, BTreeSet<Var>) {
        (self.clauses, self.vars)
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("alpha must lie in (0, 1), got {alpha}")))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, c) in self.clauses.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "}}")
    }
}

/// Degree statistics of a formula.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DegreeProfile {
    /// Degree of every variable in the variable set, 0-degree ones included.
    pub degrees: BTreeMap<Var, usize>,
    /// Degree to number of variables with that degree.
    pub histogram: BTreeMap<usize, usize>,
    /// Clause length to number of clauses with that length.
    pub clause_lengths: BTreeMap<usize, usize>,
    pub max_degree: usize,
}

impl DegreeProfile {
    /// Number of variables of degree exactly `d`.
    pub fn n(&self, d: usize) -> usize {
        self.histogram.get(&d).copied().unwrap_or(0)
    }

    /// Number of clauses of length exactly `k`.
    pub fn m(&self, k: usize) -> usize {
        self.clause_lengths.get(&k).copied().unwrap_or(0)
    }

    pub fn m2(&self) -> usize {
        self.m(2)
    }

    pub fn m3(&self) -> usize {
        self.m(3)
    }

    /// Variables of maximum degree, ascending.
    pub fn max_degree_vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.degrees
            .iter()
            .filter(move |&(_, &d)| d == self.max_degree)
            .map(|(&v, _)| v)
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Neighborhood {
    pub all: BTreeSet<Var>,
    pub by_degree: BTreeMap<usize, BTreeSet<Var>>,
}

impl Neighborhood {
    /// `|N_d(x)|`.
    pub fn count(&self, degree: usize) -> usize {
        self.by_degree.get(&degree).map_or(0, BTreeSet::len)
    }
}

fn one() -> &'static BigUint {
    static ONE: OnceLock<BigUint> = OnceLock::new();
    ONE.get_or_init(BigUint::one)
}

/// Literal weights. Literals never set weigh 1.
#[derive(Clone, Debug, Default)]
pub struct Weights {
    table: Vec<Option<BigUint>>,
}

impl PartialEq for Weights {
    fn eq(&self, other: &Weights) -> bool {
        self.non_unit().eq(other.non_unit())
    }
}

impl Eq for Weights {}

impl Weights {
    pub fn unit() -> Weights {
        Weights::default()
    }

    pub fn get(&self, lit: Lit) -> &BigUint {
        self.table
            .get(lit.code())
            .and_then(Option::as_ref)
            .unwrap_or_else(|| one())
    }

    /// Setting a weight of 1 restores the default.
    pub fn set(&mut self, lit: Lit, weight: BigUint) {
        let code = lit.code();
        if weight.is_one() {
            if let Some(slot) = self.table.get_mut(code) {
                *slot = None;
            }
            return;
        }
        if self.table.len() <= code {
            self.table.resize(code + 1, None);
        }
        self.table[code] = Some(weight);
    }

    /// `w(x) + w(!x)`.
    pub fn var_sum(&self, var: Var) -> BigUint {
        self.get(var.pos()) + self.get(var.neg())
    }

    /// Literals whose weight differs from 1.
    pub fn non_unit(&self) -> impl Iterator<Item = (Lit, &BigUint)> + '_ {
        self.table.iter().enumerate().filter_map(|(code, w)| {
            w.as_ref()
                .filter(|w| !w.is_one())
                .map(|w| (Lit(code as u32), w))
        })
    }

    pub fn is_unweighted(&self) -> bool {
        self.non_unit().next().is_none()
    }
}

/// A counting instance whose answer is `multiplier * WMC(formula, weights)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Instance {
    pub formula: Formula,
    pub weights: Weights,
    pub multiplier: BigUint,
}

impl Instance {
    pub fn new(formula: Formula, weights: Weights) -> Instance {
        Instance {
            formula,
            weights,
            multiplier: BigUint::one(),
        }
    }

    pub fn unweighted(formula: Formula) -> Instance {
        Instance::new(formula, Weights::unit())
    }
}
