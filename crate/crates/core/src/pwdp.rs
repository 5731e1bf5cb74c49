//! Weighted model counting by dynamic programming over path decompositions
//! of the primal graph (variables as vertices) and the dual graph (clauses
//! as vertices).
//!
//! Both programs walk the introduce/forget form of the decomposition. Live
//! vertices occupy bit slots of a `u64` state word; a slot is reused once its
//! vertex is forgotten.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{contract, Error, Result};
use crate::formula::{Formula, Var, Weights};
use crate::graphs::{dual_graph, primal_graph};
use crate::pathdecomp::{to_nice, PathDecomposition, Step};

/// Default largest slot count for which tables are dense arrays.
pub const DEFAULT_DENSE_BITS: usize = 12;

/// Count together with the size of the largest intermediate table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DpReport {
    pub count: BigUint,
    pub max_states: usize,
}

enum Table {
    Dense(Vec<BigUint>),
    Sparse(HashMap<u64, BigUint>),
}

impl Table {
    fn empty(slots: usize, dense_bits: usize) -> Table {
        if slots <= dense_bits {
            Table::Dense(vec![BigUint::zero(); 1 << slots])
        } else {
            Table::Sparse(HashMap::new())
        }
    }

    fn start(slots: usize, dense_bits: usize) -> Table {
        let mut t = Table::empty(slots, dense_bits);
        t.add(0, BigUint::one());
        t
    }

    fn blank_like(&self) -> Table {
        match self {
            Table::Dense(v) => Table::Dense(vec![BigUint::zero(); v.len()]),
            Table::Sparse(_) => Table::Sparse(HashMap::new()),
        }
    }

    fn add(&mut self, state: u64, count: BigUint) {
        match self {
            Table::Dense(v) => v[state as usize] += count,
            Table::Sparse(m) => *m.entry(state).or_default() += count,
        }
    }

    fn drain(&mut self) -> Vec<(u64, BigUint)> {
        match self {
            Table::Dense(v) => v
                .iter_mut()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(s, c)| (s as u64, std::mem::take(c)))
                .collect(),
            Table::Sparse(m) => m.drain().collect(),
        }
    }

    fn len(&self) -> usize {
        match self {
            Table::Dense(v) => v.iter().filter(|c| !c.is_zero()).count(),
            Table::Sparse(m) => m.len(),
        }
    }

    fn into_total(mut self) -> BigUint {
        self.drain().into_iter().map(|(_, c)| c).sum()
    }

    /// Rebuilds the table by sending every entry through `f`.
    fn remap(&mut self, mut f: impl FnMut(u64, BigUint, &mut Table)) {
        let mut next = self.blank_like();
        for (s, c) in self.drain() {
            f(s, c, &mut next);
        }
        *self = next;
    }
}

/// Assigns bit slots to live vertices, lowest free slot first.
#[derive(Default)]
struct Slots {
    of: BTreeMap<usize, usize>,
    used: u64,
}

impl Slots {
    fn take(&mut self, v: usize) -> Result<usize> {
        let s = (!self.used).trailing_zeros() as usize;
        if s >= 64 {
            return Err(Error::TooLarge { vars: 65, cap: 64 });
        }
        self.used |= 1 << s;
        self.of.insert(v, s);
        Ok(s)
    }

    fn release(&mut self, v: usize) -> usize {
        let s = self.of.remove(&v).expect("forgotten vertex is live");
        self.used &= !(1 << s);
        s
    }

    fn bit(&self, v: usize) -> u64 {
        1 << self.of[&v]
    }
}

pub fn primal_count(f: &Formula, w: &Weights, p: &PathDecomposition) -> Result<BigUint> {
    primal_count_report(f, w, p, DEFAULT_DENSE_BITS).map(|r| r.count)
}

pub fn primal_count_report(
    f: &Formula,
    w: &Weights,
    p: &PathDecomposition,
    dense_bits: usize,
) -> Result<DpReport> {
    if let Err(v) = p.validate(&primal_graph(f)) {
        return contract(format!("not a path decomposition of the primal graph: {v}"));
    }
    if f.has_empty_clause() {
        return Ok(DpReport { count: BigUint::zero(), max_states: 1 });
    }
    let nice = to_nice(p)?;
    let slots_needed = nice.max_live();

    // clauses waiting for their variables, indexed by variable
    let mut waiting: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, c) in f.clauses().iter().enumerate() {
        for v in c.vars() {
            waiting.entry(v.id() as usize).or_default().push(i);
        }
    }
    let mut checked = vec![false; f.num_clauses()];

    let mut slots = Slots::default();
    let mut table = Table::start(slots_needed, dense_bits);
    let mut max_states = 1;
    for step in &nice.steps {
        match *step {
            Step::Introduce(v) => {
                let bit = 1u64 << slots.take(v)?;
                table.remap(|s, c, next| {
                    next.add(s | bit, c.clone());
                    next.add(s, c);
                });
                max_states = max_states.max(table.len());
                let mut masks = Vec::new();
                for &ci in waiting.get(&v).into_iter().flatten() {
                    let clause = &f.clauses()[ci];
                    if checked[ci] || !clause.vars().all(|u| slots.of.contains_key(&(u.id() as usize))) {
                        continue;
                    }
                    checked[ci] = true;
                    let (mut pos, mut neg) = (0u64, 0u64);
                    for l in clause.lits() {
                        let b = slots.bit(l.var().id() as usize);
                        if l.is_positive() {
                            pos |= b;
                        } else {
                            neg |= b;
                        }
                    }
                    masks.push((pos, neg));
                }
                if !masks.is_empty() {
                    table.remap(|s, c, next| {
                        if masks.iter().all(|&(pos, neg)| (s & pos) | (!s & neg) != 0) {
                            next.add(s, c);
                        }
                    });
                }
            }
            Step::Forget(v) => {
                let bit = 1u64 << slots.release(v);
                let x = Var::new(v as u32);
                let (wt, wf) = (w.get(x.pos()), w.get(x.neg()));
                table.remap(|s, c, next| {
                    let weight = if s & bit != 0 { wt } else { wf };
                    next.add(s & !bit, c * weight);
                });
            }
        }
    }
    if let Some(ci) = checked.iter().position(|&done| !done) {
        return contract(format!("clause {} is not covered by any bag", f.clauses()[ci]));
    }
    Ok(DpReport { count: table.into_total(), max_states })
}

pub fn dual_count(f: &Formula, w: &Weights, p: &PathDecomposition) -> Result<BigUint> {
    dual_count_report(f, w, p, DEFAULT_DENSE_BITS).map(|r| r.count)
}

pub fn dual_count_report(
    f: &Formula,
    w: &Weights,
    p: &PathDecomposition,
    dense_bits: usize,
) -> Result<DpReport> {
    if let Err(v) = p.validate(&dual_graph(f)) {
        return contract(format!("not a path decomposition of the dual graph: {v}"));
    }
    let nice = to_nice(p)?;
    let slots_needed = nice.max_live();

    // clauses not yet introduced, per variable; a repeated variable counts once
    let mut remaining: BTreeMap<Var, usize> = BTreeMap::new();
    for c in f.clauses() {
        for v in c.vars() {
            *remaining.entry(v).or_default() += 1;
        }
    }
    let idle_factor: BigUint = f
        .vars()
        .iter()
        .filter(|v| !remaining.contains_key(v))
        .map(|&v| w.var_sum(v))
        .product();

    let mut slots = Slots::default();
    let mut table = Table::start(slots_needed, dense_bits);
    let mut max_states = 1;
    for step in &nice.steps {
        match *step {
            Step::Introduce(ci) => {
                slots.take(ci)?;
                let clause = &f.clauses()[ci];
                for x in clause.vars() {
                    let left = remaining.get_mut(&x).expect("clause variable counted");
                    *left -= 1;
                    if *left > 0 {
                        continue;
                    }
                    let (mut sat_true, mut sat_false) = (0u64, 0u64);
                    for (&cj, &s) in &slots.of {
                        let other = &f.clauses()[cj];
                        if other.contains(x.pos()) {
                            sat_true |= 1 << s;
                        }
                        if other.contains(x.neg()) {
                            sat_false |= 1 << s;
                        }
                    }
                    let (wt, wf) = (w.get(x.pos()), w.get(x.neg()));
                    table.remap(|s, c, next| {
                        next.add(s | sat_true, &c * wt);
                        next.add(s | sat_false, c * wf);
                    });
                    max_states = max_states.max(table.len());
                }
            }
            Step::Forget(ci) => {
                let clause = &f.clauses()[ci];
                if let Some(x) = clause.vars().find(|x| remaining[x] > 0) {
                    return Err(Error::Invariant(format!(
                        "clause {clause} forgotten before variable {x} expired"
                    )));
                }
                let bit = 1u64 << slots.release(ci);
                table.remap(|s, c, next| {
                    if s & bit != 0 {
                        next.add(s & !bit, c);
                    }
                });
            }
        }
    }
    Ok(DpReport { count: table.into_total() * idle_factor, max_states })
}
