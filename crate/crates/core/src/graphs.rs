//! Primal and dual graphs of a formula and the connectivity queries used by
//! the reduction rules.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use crate::formula::Formula;

/// Simple undirected graph on integer vertex ids.
///
/// Primal graphs use variable ids as vertices, dual graphs use clause
/// positions (0-based).
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Graph {
    adj: BTreeMap<usize, BTreeSet<usize>>,
}

impl Graph {
    pub fn new() -> Graph {
        Graph::default()
    }

    pub fn add_vertex(&mut self, v: usize) {
        self.adj.entry(v).or_default();
    }

    /// Self loops are ignored; repeated edges collapse.
    pub fn add_edge(&mut self, u: usize, v: usize) {
        self.add_vertex(u);
        self.add_vertex(v);
        if u != v {
            self.adj.get_mut(&u).unwrap().insert(v);
            self.adj.get_mut(&v).unwrap().insert(u);
        }
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.adj.keys().copied()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.adj.contains_key(&v)
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj.get(&v).into_iter().flatten().copied()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj.get(&u).is_some_and(|n| n.contains(&v))
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj.get(&v).map_or(0, BTreeSet::len)
    }

    pub fn num_vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn num_edges(&self) -> usize {
        self.adj.values().map(BTreeSet::len).sum::<usize>() / 2
    }

    /// Edges as `(u, v)` with `u < v`, ascending.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .flat_map(|(&u, n)| n.range(u + 1..).map(move |&v| (u, v)))
    }

    pub fn max_degree(&self) -> usize {
        self.adj.values().map(BTreeSet::len).max().unwrap_or(0)
    }

    /// Degree to number of vertices with that degree.
    pub fn degree_histogram(&self) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for n in self.adj.values() {
            *h.entry(n.len()).or_default() += 1;
        }
        h
    }

    /// Vertices reachable from `start` without passing through `blocked`.
    fn reach(&self, start: usize, blocked: Option<usize>, seen: &mut BTreeSet<usize>) -> BTreeSet<usize> {
        let mut part = BTreeSet::new();
        let mut queue = VecDeque::from([start]);
        seen.insert(start);
        while let Some(u) = queue.pop_front() {
            part.insert(u);
            for w in self.neighbors(u) {
                if Some(w) != blocked && seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        part
    }

    /// Connected components, ordered by their smallest vertex.
    pub fn components(&self) -> Vec<BTreeSet<usize>> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for v in self.vertices() {
            if !seen.contains(&v) {
                out.push(self.reach(v, None, &mut seen));
            }
        }
        out
    }

    /// Components of `G - x` that contain a neighbour of `x`.
    pub fn components_around(&self, x: usize) -> Vec<BTreeSet<usize>> {
        let mut seen = BTreeSet::from([x]);
        let mut out = Vec::new();
        for y in self.neighbors(x) {
            if !seen.contains(&y) {
                out.push(self.reach(y, Some(x), &mut seen));
            }
        }
        out
    }

    /// Cut vertices, found in one iterative depth-first pass.
    pub fn articulation_points(&self) -> BTreeSet<usize> {
        let mut disc: BTreeMap<usize, usize> = BTreeMap::new();
        let mut low: BTreeMap<usize, usize> = BTreeMap::new();
        let mut points = BTreeSet::new();
        let mut time = 0;

        for root in self.vertices() {
            if disc.contains_key(&root) {
                continue;
            }
            disc.insert(root, time);
            low.insert(root, time);
            time += 1;
            let mut root_children = 0;
            // (vertex, parent, remaining neighbours)
            let mut stack: Vec<(usize, Option<usize>, Vec<usize>)> =
                vec![(root, None, self.neighbors(root).collect())];
            while let Some((u, parent, pending)) = stack.last_mut() {
                let (u, parent) = (*u, *parent);
                if let Some(w) = pending.pop() {
                    if Some(w) == parent {
                        continue;
                    }
                    if let Some(&dw) = disc.get(&w) {
                        let lu = low[&u].min(dw);
                        low.insert(u, lu);
                    } else {
                        disc.insert(w, time);
                        low.insert(w, time);
                        time += 1;
                        if u == root {
                            root_children += 1;
                        }
                        stack.push((w, Some(u), self.neighbors(w).collect()));
                    }
                } else {
                    stack.pop();
                    if let Some(p) = parent {
                        let lp = low[&p].min(low[&u]);
                        low.insert(p, lp);
                        if p != root && low[&u] >= disc[&p] {
                            points.insert(p);
                        }
                    }
                }
            }
            if root_children >= 2 {
                points.insert(root);
            }
        }
        points
    }

    /// Graphviz rendering; vertex `v` is labelled `{prefix}{v}`.
    pub fn to_dot(&self, prefix: &str) -> String {
        let mut out = String::from("graph G {\n");
        for v in self.vertices() {
            let _ = writeln!(out, "  {v} [label=\"{prefix}{v}\"];");
        }
        for (u, v) in self.edges() {
            let _ = writeln!(out, "  {u} -- {v};");
        }
        out.push_str("}\n");
        out
    }
}

/// Variables as vertices; two variables are adjacent when some clause
/// contains both.
pub fn primal_graph(formula: &Formula) -> Graph {
    let mut g = Graph::new();
    for v in formula.vars() {
        g.add_vertex(v.id() as usize);
    }
    for c in formula.clauses() {
        let vars: Vec<usize> = c.vars().map(|v| v.id() as usize).collect();
        for (i, &u) in vars.iter().enumerate() {
            for &w in &vars[i + 1..] {
                g.add_edge(u, w);
            }
        }
    }
    g
}

/// Clauses as vertices (by position); two clauses are adjacent when they
/// share a variable, whatever its polarity.
pub fn dual_graph(formula: &Formula) -> Graph {
    let mut g = Graph::new();
    let mut occurrences: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, c) in formula.clauses().iter().enumerate() {
        g.add_vertex(i);
        for v in c.vars() {
            occurrences.entry(v.id()).or_default().push(i);
        }
    }
    for clauses in occurrences.values() {
        for (i, &a) in clauses.iter().enumerate() {
            for &b in &clauses[i + 1..] {
                g.add_edge(a, b);
            }
        }
    }
    g
}

/// Smallest connected component with at most `limit` vertices, provided
/// some other component exists. Ties go to the component with the lowest
/// vertex.
pub fn small_component(g: &Graph, limit: usize) -> Option<BTreeSet<usize>> {
    let comps = g.components();
    if comps.len() < 2 {
        return None;
    }
    comps
        .into_iter()
        .filter(|c| c.len() <= limit)
        .min_by_key(|c| (c.len(), *c.first().unwrap()))
}

/// A cut vertex `x` and one side `K` of `G - x` such that `|K| + 1 <= limit`
/// and something else stays attached to `x`.
///
/// The smallest side wins; ties go to the lowest cut vertex, then to the
/// side with the lowest vertex.
pub fn small_cut_split(g: &Graph, limit: usize) -> Option<(usize, BTreeSet<usize>)> {
    let mut best: Option<(usize, BTreeSet<usize>)> = None;
    for x in g.articulation_points() {
        let sides = g.components_around(x);
        if sides.len() < 2 {
            continue;
        }
        for side in sides {
            if side.len() + 1 > limit {
                continue;
            }
            let better = match &best {
                None => true,
                Some((bx, bk)) => (side.len(), x, side.first()) < (bk.len(), *bx, bk.first()),
            };
            if better {
                best = Some((x, side));
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(vs: &[usize]) -> BTreeSet<usize> {
        vs.iter().copied().collect()
    }

    fn path(vs: &[usize]) -> Graph {
        let mut g = Graph::new();
        for w in vs.windows(2) {
            g.add_edge(w[0], w[1]);
        }
        g
    }

    #[test]
    fn primal_examples() {
        let g = primal_graph(&Formula::from_dimacs(&[&[1, 2, 3]]));
        assert_eq!(g.num_edges(), 3);
        assert!(g.has_edge(1, 2) && g.has_edge(2, 3) && g.has_edge(1, 3));

        let g = primal_graph(&Formula::from_dimacs(&[&[1, 2], &[2, 3]]));
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(1, 2), (2, 3)]);

        let g = primal_graph(&Formula::default().with_extra_vars([crate::formula::Var::new(1)]));
        assert_eq!(g.num_vertices(), 1);
        assert_eq!(g.num_edges(), 0);
    }

    #[test]
    fn dual_examples() {
        let g = dual_graph(&Formula::from_dimacs(&[&[1, 2], &[-2, 3]]));
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1)]);

        let g = dual_graph(&Formula::from_dimacs(&[&[1], &[2]]));
        assert_eq!(g.num_vertices(), 2);
        assert_eq!(g.num_edges(), 0);

        let g = dual_graph(&Formula::from_dimacs(&[&[1, 2], &[-1, 3], &[2, 3]]));
        assert_eq!(g.num_edges(), 3);
    }

    #[test]
    fn small_component_cases() {
        let mut g = path(&(10..25).collect::<Vec<_>>());
        g.add_edge(1, 2);
        assert_eq!(small_component(&g, 10), Some(set(&[1, 2])));

        let g = path(&[1, 2, 3, 4, 5]);
        assert_eq!(small_component(&g, 10), None);

        let mut g = path(&(1..=12).collect::<Vec<_>>());
        for w in (20..31).collect::<Vec<_>>().windows(2) {
            g.add_edge(w[0], w[1]);
        }
        assert_eq!(small_component(&g, 10), None);
    }

    #[test]
    fn small_cut_split_cases() {
        // a - x - (long tail)
        let g = path(&(1..=20).collect::<Vec<_>>());
        assert_eq!(small_cut_split(&g, 10), Some((2, set(&[1]))));

        let mut cycle = path(&[1, 2, 3, 4, 5]);
        cycle.add_edge(5, 1);
        assert_eq!(small_cut_split(&cycle, 10), None);

        let mut star = Graph::new();
        for leaf in 1..=12 {
            star.add_edge(100, leaf);
        }
        assert_eq!(small_cut_split(&star, 10), Some((100, set(&[1]))));
    }

    #[test]
    fn articulation_points_known() {
        let g = path(&[1, 2, 3, 4]);
        assert_eq!(g.articulation_points(), set(&[2, 3]));
        let mut bowtie = path(&[1, 2, 3, 1]);
        bowtie.add_edge(3, 4);
        bowtie.add_edge(4, 5);
        bowtie.add_edge(5, 3);
        assert_eq!(bowtie.articulation_points(), set(&[3]));
    }

    #[test]
    fn dot_output_lists_everything() {
        let dot = path(&[1, 2]).to_dot("x");
        assert!(dot.contains("1 [label=\"x1\"]"));
        assert!(dot.contains("1 -- 2;"));
    }

    fn arb_graph() -> impl Strategy<Value = Graph> {
        (1usize..12, prop::collection::vec((0usize..12, 0usize..12), 0..20)).prop_map(|(n, es)| {
            let mut g = Graph::new();
            for v in 0..n {
                g.add_vertex(v);
            }
            for (u, v) in es {
                if u < n && v < n {
                    g.add_edge(u, v);
                }
            }
            g
        })
    }

    fn without(g: &Graph, x: usize) -> Graph {
        let mut h = Graph::new();
        for v in g.vertices().filter(|&v| v != x) {
            h.add_vertex(v);
        }
        for (u, v) in g.edges().filter(|&(u, v)| u != x && v != x) {
            h.add_edge(u, v);
        }
        h
    }

    proptest! {
        #[test]
        fn articulation_points_match_removal(g in arb_graph()) {
            let base = g.components().len();
            let brute: BTreeSet<usize> = g
                .vertices()
                .filter(|&x| g.degree(x) > 0 && without(&g, x).components().len() > base)
                .collect();
            prop_assert_eq!(g.articulation_points(), brute);
        }

        #[test]
        fn clauses_are_primal_cliques(cs in prop::collection::vec(prop::collection::vec(-6i64..=6, 1..4), 1..8)) {
            let cs: Vec<Vec<i64>> = cs.into_iter().map(|c| c.into_iter().filter(|&l| l != 0).collect()).collect();
            let refs: Vec<&[i64]> = cs.iter().map(Vec::as_slice).collect();
            let f = Formula::from_dimacs(&refs);
            let g = primal_graph(&f);
            for c in f.clauses() {
                let vs: Vec<usize> = c.vars().map(|v| v.id() as usize).collect();
                for a in &vs { for b in &vs { if a != b { prop_assert!(g.has_edge(*a, *b)); } } }
            }
            let d = dual_graph(&f);
            for v in f.vars() {
                let holders: Vec<usize> = (0..f.num_clauses()).filter(|&i| f.clauses()[i].contains_var(*v)).collect();
                for a in &holders { for b in &holders { if a != b { prop_assert!(d.has_edge(*a, *b)); } } }
            }
        }
    }
}
