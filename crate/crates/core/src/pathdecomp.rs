//! Path decompositions: validation, construction from vertex layouts, a
//! layout heuristic, and the introduce/forget form consumed by the counting
//! dynamic programs.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use crate::error::{contract, Error, Result};
use crate::graphs::Graph;

/// Ordered sequence of bags.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct PathDecomposition {
    bags: Vec<BTreeSet<usize>>,
}

/// Why a decomposition is not valid for a graph.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Violation {
    /// A bag holds a vertex the graph does not have.
    ForeignVertex { bag: usize, vertex: usize },
    /// A vertex appears in no bag.
    UncoveredVertex(usize),
    /// No bag contains both endpoints of an edge.
    UncoveredEdge(usize, usize),
    /// The bags containing a vertex are not consecutive.
    Discontiguous(usize),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ForeignVertex { bag, vertex } => {
                write!(f, "bag {bag} holds vertex {vertex}, which is not in the graph")
            }
            Violation::UncoveredVertex(v) => write!(f, "vertex {v} is in no bag"),
            Violation::UncoveredEdge(u, v) => write!(f, "edge {u}-{v} is in no bag"),
            Violation::Discontiguous(v) => write!(f, "the bags holding vertex {v} are not consecutive"),
        }
    }
}

impl PathDecomposition {
    pub fn new(bags: Vec<BTreeSet<usize>>) -> PathDecomposition {
        PathDecomposition { bags }
    }

    pub fn bags(&self) -> &[BTreeSet<usize>] {
        &self.bags
    }

    /// Largest bag size minus one; `-1` when there are no bags.
    pub fn width(&self) -> isize {
        self.bags.iter().map(BTreeSet::len).max().map_or(-1, |w| w as isize - 1)
    }

    /// Occurrence interval of every vertex, or the first vertex whose bags
    /// are not consecutive.
    fn intervals(&self) -> std::result::Result<BTreeMap<usize, (usize, usize)>, usize> {
        let mut spans: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
        for (i, bag) in self.bags.iter().enumerate() {
            for &v in bag {
                match spans.get_mut(&v) {
                    None => {
                        spans.insert(v, (i, i));
                    }
                    Some(span) if span.1 + 1 == i => span.1 = i,
                    Some(_) => return Err(v),
                }
            }
        }
        Ok(spans)
    }

    pub fn validate(&self, g: &Graph) -> std::result::Result<(), Violation> {
        for (i, bag) in self.bags.iter().enumerate() {
            if let Some(&v) = bag.iter().find(|&&v| !g.contains(v)) {
                return Err(Violation::ForeignVertex { bag: i, vertex: v });
            }
        }
        let spans = self.intervals().map_err(Violation::Discontiguous)?;
        if let Some(v) = g.vertices().find(|v| !spans.contains_key(v)) {
            return Err(Violation::UncoveredVertex(v));
        }
        for (u, v) in g.edges() {
            let (a, b) = (spans[&u], spans[&v]);
            if a.0.max(b.0) > a.1.min(b.1) {
                return Err(Violation::UncoveredEdge(u, v));
            }
        }
        Ok(())
    }

    /// One bag per line, vertex ids separated by spaces.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for bag in &self.bags {
            let ids: Vec<String> = bag.iter().map(usize::to_string).collect();
            out.push_str(&ids.join(" "));
            out.push('\n');
        }
        out
    }

    /// Inverse of [`PathDecomposition::to_text`]. Blank lines and lines
    /// starting with `c` are skipped.
    pub fn from_text(text: &str) -> Result<PathDecomposition> {
        let mut bags = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            let bag = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<usize>().map_err(|_| Error::Parse {
                        line: i + 1,
                        msg: format!("bad vertex id {tok:?}"),
                    })
                })
                .collect::<Result<BTreeSet<usize>>>()?;
            bags.push(bag);
        }
        Ok(PathDecomposition { bags })
    }
}

/// Bag `i` holds the `i`-th vertex of `order` plus every earlier vertex that
/// still has a neighbour at position `i` or later.
pub fn from_layout(g: &Graph, order: &[usize]) -> Result<PathDecomposition> {
    let position = layout_positions(g, order)?;
    let last = last_neighbor_positions(g, order, &position);
    let mut bags = Vec::with_capacity(order.len());
    let mut live: BTreeSet<usize> = BTreeSet::new();
    for (i, &v) in order.iter().enumerate() {
        live.retain(|u| last[u] >= i);
        live.insert(v);
        bags.push(live.clone());
    }
    Ok(PathDecomposition { bags })
}

fn layout_positions(g: &Graph, order: &[usize]) -> Result<BTreeMap<usize, usize>> {
    let mut position = BTreeMap::new();
    for (i, &v) in order.iter().enumerate() {
        if !g.contains(v) || position.insert(v, i).is_some() {
            return contract("layout is not a permutation of the graph's vertices");
        }
    }
    if position.len() != g.num_vertices() {
        return contract("layout is not a permutation of the graph's vertices");
    }
    Ok(position)
}

fn last_neighbor_positions(
    g: &Graph,
    order: &[usize],
    position: &BTreeMap<usize, usize>,
) -> BTreeMap<usize, usize> {
    order
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let last = g.neighbors(v).map(|u| position[&u]).max().unwrap_or(i).max(i);
            (v, last)
        })
        .collect()
}

/// Width of the decomposition [`from_layout`] would build for `order`.
pub fn layout_width(g: &Graph, order: &[usize]) -> Result<isize> {
    let position = layout_positions(g, order)?;
    let last = last_neighbor_positions(g, order, &position);
    // vertex at position j is live on [j, last(j)]
    let mut delta = vec![0isize; order.len() + 1];
    for (j, v) in order.iter().enumerate() {
        delta[j] += 1;
        delta[last[v] + 1] -= 1;
    }
    let mut live = 0isize;
    let mut best = 0isize;
    for d in &delta[..order.len()] {
        live += *d;
        best = best.max(live);
    }
    Ok(best - 1)
}

// Root and greedy-start budgets per component.
const MAX_BFS_ROOTS: usize = 48;
const MAX_GREEDY_STARTS: usize = 12;

/// Best-effort low-width decomposition.
///
/// Each connected component is laid out independently with several
/// candidate orders (breadth-first orders from a number of roots,
/// Cuthill-McKee and its reverse, and a greedy order that keeps the live set
/// small); the narrowest wins, ties by lexicographically smallest order.
/// The component decompositions are then concatenated.
pub fn heuristic_decompose(g: &Graph) -> PathDecomposition {
    let order = heuristic_layout(g);
    from_layout(g, &order).expect("heuristic layout is a permutation")
}

/// The vertex order behind [`heuristic_decompose`].
pub fn heuristic_layout(g: &Graph) -> Vec<usize> {
    let mut order = Vec::with_capacity(g.num_vertices());
    for comp in g.components() {
        order.extend(best_component_layout(g, &comp));
    }
    order
}

fn best_component_layout(g: &Graph, comp: &BTreeSet<usize>) -> Vec<usize> {
    if comp.len() <= 2 {
        return comp.iter().copied().collect();
    }
    let sub = induced(g, comp);
    let mut by_degree: Vec<usize> = comp.iter().copied().collect();
    by_degree.sort_by_key(|&v| (sub.degree(v), v));

    let mut candidates: Vec<Vec<usize>> = Vec::new();
    for &root in by_degree.iter().take(MAX_BFS_ROOTS) {
        candidates.push(bfs_order(&sub, root));
    }
    let cm = bfs_order(&sub, by_degree[0]);
    candidates.push(cm.iter().rev().copied().collect());
    for &start in by_degree.iter().take(MAX_GREEDY_STARTS) {
        let greedy = greedy_order(&sub, start);
        candidates.push(greedy.iter().rev().copied().collect());
        candidates.push(greedy);
    }

    candidates
        .into_iter()
        .map(|order| (layout_width(&sub, &order).expect("candidate is a permutation"), order))
        .min()
        .map(|(_, order)| order)
        .expect("at least one candidate")
}

fn induced(g: &Graph, comp: &BTreeSet<usize>) -> Graph {
    let mut sub = Graph::new();
    for &v in comp {
        sub.add_vertex(v);
        for u in g.neighbors(v) {
            sub.add_edge(v, u);
        }
    }
    sub
}

/// Breadth-first order visiting neighbours by ascending degree.
fn bfs_order(g: &Graph, root: usize) -> Vec<usize> {
    let mut order = Vec::with_capacity(g.num_vertices());
    let mut seen = BTreeSet::from([root]);
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        order.push(u);
        let mut next: Vec<usize> = g.neighbors(u).filter(|w| !seen.contains(w)).collect();
        next.sort_by_key(|&w| (g.degree(w), w));
        for w in next {
            seen.insert(w);
            queue.push_back(w);
        }
    }
    order
}

/// Repeatedly places the frontier vertex that leaves the fewest placed
/// vertices with unplaced neighbours.
fn greedy_order(g: &Graph, start: usize) -> Vec<usize> {
    let n = g.num_vertices();
    let mut placed: BTreeSet<usize> = BTreeSet::new();
    // unplaced-neighbour count of every vertex
    let mut open: BTreeMap<usize, usize> = g.vertices().map(|v| (v, g.degree(v))).collect();
    let mut live: BTreeSet<usize> = BTreeSet::new();
    let mut frontier: BTreeSet<usize> = BTreeSet::from([start]);
    let mut order = Vec::with_capacity(n);

    while order.len() < n {
        let pick = frontier
            .iter()
            .copied()
            .min_by_key(|&v| {
                // live vertices closed off by placing v
                let closed = g
                    .neighbors(v)
                    .filter(|u| live.contains(u) && open[u] == 1)
                    .count();
                let stays = usize::from(open[&v] > 0);
                (live.len() + stays - closed, open[&v], v)
            })
            .or_else(|| g.vertices().find(|v| !placed.contains(v)))
            .expect("unplaced vertex remains");
        frontier.remove(&pick);
        placed.insert(pick);
        order.push(pick);
        let neighbors: Vec<usize> = g.neighbors(pick).collect();
        for u in neighbors {
            *open.get_mut(&u).unwrap() -= 1;
            if placed.contains(&u) {
                if open[&u] == 0 {
                    live.remove(&u);
                }
            } else {
                frontier.insert(u);
            }
        }
        if open[&pick] > 0 {
            live.insert(pick);
        }
    }
    order
}

/// One elementary change of the live vertex set.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Step {
    Introduce(usize),
    Forget(usize),
}

/// Introduce/forget sequence that starts and ends with nothing live.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct NiceSteps {
    pub steps: Vec<Step>,
}

impl NiceSteps {
    /// Largest number of simultaneously live vertices.
    pub fn max_live(&self) -> usize {
        let mut live = 0usize;
        let mut best = 0;
        for s in &self.steps {
            match s {
                Step::Introduce(_) => {
                    live += 1;
                    best = best.max(live);
                }
                Step::Forget(_) => live -= 1,
            }
        }
        best
    }
}

/// Between consecutive bags, forget what leaves and then introduce what
/// enters, each group in ascending vertex order.
pub fn to_nice(p: &PathDecomposition) -> Result<NiceSteps> {
    if let Err(v) = p.intervals() {
        return contract(format!("decomposition is invalid: vertex {v} is discontiguous"));
    }
    let mut steps = Vec::new();
    let empty = BTreeSet::new();
    let mut prev = &empty;
    for bag in p.bags.iter().chain(std::iter::once(&empty)) {
        steps.extend(prev.difference(bag).map(|&v| Step::Forget(v)));
        steps.extend(bag.difference(prev).map(|&v| Step::Introduce(v)));
        prev = bag;
    }
    Ok(NiceSteps { steps })
}
