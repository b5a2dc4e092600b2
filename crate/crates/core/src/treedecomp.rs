//! Variable graphs and tree decompositions of rules.
//!
//! The variable graph of a rule connects two variables whenever they occur
//! together in one literal's argument vector (comparisons count: they pin
//! their two operands into a common bag). A tree decomposition of that
//! graph bounds how a rule can be split into smaller rules; its maximum bag
//! size φ is the quantity the decision procedure compares arities against.
//!
//! Decompositions come from elimination orders. Two greedy orders are
//! offered (minimum fill-in, minimum degree — ties broken by lexicographic
//! variable name), plus an exact mode that searches all elimination orders
//! with memoization on the eliminated set, which is feasible up to the
//! vertex cap and yields the true treewidth.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::collections::HashMap;

use serde::Serialize;

use crate::ast::{Rule, Term};

/// Co-occurrence graph over the variables of one rule.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VariableGraph {
    /// Variables in first-occurrence order.
    pub vertices: Vec<String>,
    /// Unordered pairs, stored lexicographically normalized.
    pub edges: BTreeSet<(String, String)>,
}

impl VariableGraph {
    fn add_edge(&mut self, a: &str, b: &str) {
        if a != b {
            let (x, y) = if a < b { (a, b) } else { (b, a) };
            self.edges.insert((x.to_string(), y.to_string()));
        }
    }

    /// Adjacency sets keyed by variable name.
    pub fn adjacency(&self) -> BTreeMap<String, BTreeSet<String>> {
        let mut adj: BTreeMap<String, BTreeSet<String>> =
            self.vertices.iter().map(|v| (v.clone(), BTreeSet::new())).collect();
        for (a, b) in &self.edges {
            adj.get_mut(a).unwrap().insert(b.clone());
            adj.get_mut(b).unwrap().insert(a.clone());
        }
        adj
    }
}

/// Build the variable graph: one clique per literal argument vector over
/// head, positive, and negative literals, plus one edge per comparison on
/// two variables.
pub fn build_variable_graph(rule: &Rule) -> VariableGraph {
    let mut graph = VariableGraph { vertices: rule.variables(), edges: BTreeSet::new() };
    for lit in rule.literals() {
        let vars: Vec<&str> = lit.variables().collect();
        for (i, a) in vars.iter().enumerate() {
            for b in &vars[i + 1..] {
                graph.add_edge(a, b);
            }
        }
    }
    for cmp in &rule.body_cmp {
        if let (Term::Var(a), Term::Var(b)) = (&cmp.lhs, &cmp.rhs) {
            graph.add_edge(a, b);
        }
    }
    graph
}

/// A tree decomposition: bags of variables arranged in a tree.
///
/// The empty graph decomposes into a single empty bag of width −1 by
/// convention. `root` is a default (bag 0); consumers that need a specific
/// root re-root the undirected tree themselves.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TreeDecomposition {
    /// Bag id → variable set.
    pub bags: Vec<BTreeSet<String>>,
    /// Undirected tree edges between bag ids.
    pub edges: Vec<(usize, usize)>,
    /// Designated root bag id.
    pub root: usize,
    /// max bag size − 1.
    pub width: i64,
}

impl TreeDecomposition {
    /// Neighbor lists over bag ids.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.bags.len()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    /// Parent of each bag when the tree is rooted at `root`.
    pub fn parents_from(&self, root: usize) -> Vec<Option<usize>> {
        let adj = self.adjacency();
        let mut parent = vec![None; self.bags.len()];
        let mut seen = vec![false; self.bags.len()];
        let mut stack = vec![root];
        seen[root] = true;
        while let Some(t) = stack.pop() {
            for &n in &adj[t] {
                if !seen[n] {
                    seen[n] = true;
                    parent[n] = Some(t);
                    stack.push(n);
                }
            }
        }
        parent
    }
}

/// Maximum bag size φ of a decomposition.
pub fn bag_size(td: &TreeDecomposition) -> usize {
    td.bags.iter().map(BTreeSet::len).max().unwrap_or(0)
}

/// Elimination-order strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TdStrategy {
    MinFill,
    MinDegree,
    Exact,
}

/// Hard vertex cap for the exact strategy.
pub const EXACT_VERTEX_CAP: usize = 12;

/// Decomposition configuration: a strategy plus the threshold below which
/// heuristic strategies silently upgrade to the exact search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TdConfig {
    pub strategy: TdStrategy,
    /// Heuristic strategies run exactly when |vertices| ≤ this value.
    pub auto_exact_cap: usize,
}

impl Default for TdConfig {
    fn default() -> Self {
        TdConfig { strategy: TdStrategy::MinFill, auto_exact_cap: 6 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TdError {
    #[error("exact tree decomposition requested for {vertices} variables (cap {cap})")]
    ExactCapExceeded { vertices: usize, cap: usize },
}

/// Decompose with an explicit strategy and the default exact cap.
pub fn decompose(graph: &VariableGraph, strategy: TdStrategy) -> Result<TreeDecomposition, TdError> {
    let order = match strategy {
        TdStrategy::MinFill => greedy_order(graph, fill_cost),
        TdStrategy::MinDegree => greedy_order(graph, degree_cost),
        TdStrategy::Exact => {
            if graph.vertices.len() > EXACT_VERTEX_CAP {
                return Err(TdError::ExactCapExceeded {
                    vertices: graph.vertices.len(),
                    cap: EXACT_VERTEX_CAP,
                });
            }
            exact_order(graph)
        }
    };
    Ok(td_from_order(graph, &order))
}

/// Decompose per configuration, upgrading small graphs to the exact search.
pub fn decompose_with(graph: &VariableGraph, config: &TdConfig) -> Result<TreeDecomposition, TdError> {
    let strategy = if config.strategy != TdStrategy::Exact
        && graph.vertices.len() <= config.auto_exact_cap
    {
        TdStrategy::Exact
    } else {
        config.strategy
    };
    decompose(graph, strategy)
}

/// Check the three decomposition conditions against a variable graph.
/// Returns a description of the first violation, if any.
pub fn validate(td: &TreeDecomposition, graph: &VariableGraph) -> Result<(), String> {
    if td.bags.is_empty() {
        return Err("no bags".into());
    }
    if td.edges.len() + 1 != td.bags.len() {
        return Err(format!("{} edges cannot form a tree over {} bags", td.edges.len(), td.bags.len()));
    }
    // Connectivity (with the right edge count this also rules out cycles).
    let adj = td.adjacency();
    let mut seen = vec![false; td.bags.len()];
    let mut stack = vec![0usize];
    seen[0] = true;
    while let Some(t) = stack.pop() {
        for &n in &adj[t] {
            if !seen[n] {
                seen[n] = true;
                stack.push(n);
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return Err("bag tree is disconnected".into());
    }
    for v in &graph.vertices {
        let holders: Vec<usize> =
            (0..td.bags.len()).filter(|&t| td.bags[t].contains(v)).collect();
        if holders.is_empty() {
            return Err(format!("variable {v} not covered by any bag"));
        }
        // The bags holding v must induce a connected subtree.
        let holder_set: BTreeSet<usize> = holders.iter().copied().collect();
        let mut reached = BTreeSet::from([holders[0]]);
        let mut stack = vec![holders[0]];
        while let Some(t) = stack.pop() {
            for &n in &adj[t] {
                if holder_set.contains(&n) && reached.insert(n) {
                    stack.push(n);
                }
            }
        }
        if reached.len() != holders.len() {
            return Err(format!("occurrences of {v} do not form a connected subtree"));
        }
    }
    for (a, b) in &graph.edges {
        if !td.bags.iter().any(|bag| bag.contains(a) && bag.contains(b)) {
            return Err(format!("edge {a}−{b} not contained in any bag"));
        }
    }
    let expect = td.bags.iter().map(BTreeSet::len).max().unwrap_or(0) as i64 - 1;
    if td.width != expect {
        return Err(format!("stored width {} but bags give {expect}", td.width));
    }
    Ok(())
}

/// Number of fill edges eliminating `v` would add.
fn fill_cost(adj: &BTreeMap<String, BTreeSet<String>>, v: &str) -> usize {
    let neigh: Vec<&String> = adj[v].iter().collect();
    let mut fill = 0;
    for (i, a) in neigh.iter().enumerate() {
        for b in &neigh[i + 1..] {
            if !adj[*a].contains(*b) {
                fill += 1;
            }
        }
    }
    fill
}

fn degree_cost(adj: &BTreeMap<String, BTreeSet<String>>, v: &str) -> usize {
    adj[v].len()
}

/// Greedy elimination order under a cost function; ties resolve to the
/// lexicographically smallest variable (BTreeMap iteration order).
fn greedy_order(
    graph: &VariableGraph,
    cost: fn(&BTreeMap<String, BTreeSet<String>>, &str) -> usize,
) -> Vec<String> {
    let mut adj = graph.adjacency();
    let mut order = Vec::with_capacity(adj.len());
    while !adj.is_empty() {
        let pick = adj
            .keys()
            .min_by_key(|v| (cost(&adj, v), (*v).clone()))
            .unwrap()
            .clone();
        eliminate(&mut adj, &pick);
        order.push(pick);
    }
    order
}

/// Remove `v`, connecting its neighborhood into a clique.
fn eliminate(adj: &mut BTreeMap<String, BTreeSet<String>>, v: &str) {
    let neigh = adj.remove(v).unwrap();
    for a in &neigh {
        let set = adj.get_mut(a).unwrap();
        set.remove(v);
        for b in &neigh {
            if a != b {
                set.insert(b.clone());
            }
        }
    }
}

/// Exact elimination order by search over eliminated subsets.
///
/// The key fact: after eliminating a set S (in any order), two remaining
/// vertices are adjacent iff the original graph connects them by a path
/// whose interior lies in S. The eliminated-vertex degree therefore depends
/// on S alone, and the best achievable width from state S is memoizable.
fn exact_order(graph: &VariableGraph) -> Vec<String> {
    let vertices: Vec<String> = {
        let mut v = graph.vertices.clone();
        v.sort();
        v
    };
    let n = vertices.len();
    if n == 0 {
        return Vec::new();
    }
    let index: HashMap<&str, usize> =
        vertices.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
    let mut adj = vec![0u32; n];
    for (a, b) in &graph.edges {
        let (i, j) = (index[a.as_str()], index[b.as_str()]);
        adj[i] |= 1 << j;
        adj[j] |= 1 << i;
    }
    let full: u32 = if n == 32 { u32::MAX } else { (1 << n) - 1 };

    // Degree of v in the fill graph after eliminating S: vertices outside
    // S ∪ {v} reachable from v through S.
    let degree_after = |s: u32, v: usize| -> u32 {
        let mut frontier = adj[v] & !(1 << v);
        let mut reached_elim = 0u32;
        let mut result = frontier & !s;
        let mut pending = frontier & s;
        while pending != 0 {
            let u = pending.trailing_zeros() as usize;
            pending &= pending - 1;
            if reached_elim & (1 << u) != 0 {
                continue;
            }
            reached_elim |= 1 << u;
            frontier = adj[u] & !(1 << v);
            result |= frontier & !s;
            pending |= (frontier & s) & !reached_elim;
        }
        result.count_ones()
    };

    let mut memo: HashMap<u32, u32> = HashMap::new();
    fn best(
        s: u32,
        full: u32,
        n: usize,
        degree_after: &dyn Fn(u32, usize) -> u32,
        memo: &mut HashMap<u32, u32>,
    ) -> u32 {
        if s == full {
            return 0;
        }
        if let Some(&w) = memo.get(&s) {
            return w;
        }
        let mut result = u32::MAX;
        for v in 0..n {
            if s & (1 << v) != 0 {
                continue;
            }
            let w = degree_after(s, v).max(best(s | (1 << v), full, n, degree_after, memo));
            result = result.min(w);
        }
        memo.insert(s, result);
        result
    }

    let mut order = Vec::with_capacity(n);
    let mut s = 0u32;
    while s != full {
        let target = best(s, full, n, &degree_after, &mut memo);
        // Smallest-index (lexicographically first) vertex achieving the
        // optimum, for deterministic output.
        for v in 0..n {
            if s & (1 << v) != 0 {
                continue;
            }
            let w = degree_after(s, v).max(best(s | (1 << v), full, n, &degree_after, &mut memo));
            if w == target {
                order.push(vertices[v].clone());
                s |= 1 << v;
                break;
            }
        }
    }
    order
}

/// Standard bags-from-elimination-order construction, then subsumed-bag
/// merging. Parent of a bag is the bag of its earliest-eliminated
/// neighbor; neighborless bags chain to the next bag so the result stays a
/// tree across disconnected components.
fn td_from_order(graph: &VariableGraph, order: &[String]) -> TreeDecomposition {
    if order.is_empty() {
        return TreeDecomposition { bags: vec![BTreeSet::new()], edges: vec![], root: 0, width: -1 };
    }
    let position: HashMap<&str, usize> =
        order.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
    let mut adj = graph.adjacency();
    let mut bags: Vec<BTreeSet<String>> = Vec::with_capacity(order.len());
    let mut edges = Vec::new();
    for (i, v) in order.iter().enumerate() {
        let neigh = adj[v].clone();
        let mut bag = neigh.clone();
        bag.insert(v.clone());
        eliminate(&mut adj, v);
        if let Some(parent) = neigh.iter().map(|u| position[u.as_str()]).min() {
            edges.push((i, parent));
        } else if i + 1 < order.len() {
            edges.push((i, i + 1));
        }
        bags.push(bag);
    }
    merge_subsumed(&mut bags, &mut edges);
    let width = bags.iter().map(BTreeSet::len).max().unwrap_or(0) as i64 - 1;
    TreeDecomposition { bags, edges, root: 0, width }
}

/// Repeatedly splice out bags that are subsets of a tree neighbor.
fn merge_subsumed(bags: &mut Vec<BTreeSet<String>>, edges: &mut Vec<(usize, usize)>) {
    loop {
        let mut victim = None;
        'outer: for (i, bag) in bags.iter().enumerate() {
            for &(a, b) in edges.iter() {
                let other = if a == i { b } else if b == i { a } else { continue };
                if bag.is_subset(&bags[other]) {
                    victim = Some((i, other));
                    break 'outer;
                }
            }
        }
        let Some((gone, into)) = victim else { break };
        edges.retain(|&(a, b)| !(a == gone && b == into || a == into && b == gone));
        for e in edges.iter_mut() {
            if e.0 == gone {
                e.0 = into;
            }
            if e.1 == gone {
                e.1 = into;
            }
        }
        bags.remove(gone);
        for e in edges.iter_mut() {
            if e.0 > gone {
                e.0 -= 1;
            }
            if e.1 > gone {
                e.1 -= 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::parse_program;

    fn graph_of(rule_text: &str) -> VariableGraph {
        let p = parse_program(rule_text).unwrap();
        build_variable_graph(&p.rules[0])
    }

    fn named_graph(n: usize, edges: &[(usize, usize)]) -> VariableGraph {
        let names: Vec<String> = (0..n).map(|i| format!("V{i:02}")).collect();
        let mut g = VariableGraph { vertices: names.clone(), edges: BTreeSet::new() };
        for &(a, b) in edges {
            g.add_edge(&names[a], &names[b]);
        }
        g
    }

    #[test]
    fn chain_rule_gives_path_graph() {
        let g = graph_of(":- f(X1,X2), f(X2,X3), f(X3,X4).");
        assert_eq!(g.vertices, vec!["X1", "X2", "X3", "X4"]);
        assert_eq!(g.edges.len(), 3);
        assert!(g.edges.contains(&("X1".into(), "X2".into())));
        assert!(g.edges.contains(&("X2".into(), "X3".into())));
        assert!(g.edges.contains(&("X3".into(), "X4".into())));
    }

    #[test]
    fn triangle_rule_gives_triangle_graph() {
        let g = graph_of(":- g(X1,X2), g(X1,X3), g(X2,X3).");
        assert_eq!(g.edges.len(), 3);
    }

    #[test]
    fn ground_rule_gives_empty_graph() {
        let g = graph_of("a :- b.");
        assert!(g.vertices.is_empty());
        assert!(g.edges.is_empty());
    }

    #[test]
    fn comparison_operands_are_connected() {
        let g = graph_of(":- p(X), q(Y), X < Y.");
        assert_eq!(g.edges, BTreeSet::from([("X".to_string(), "Y".to_string())]));
    }

    #[test]
    fn repeated_variable_adds_no_self_edge() {
        let g = graph_of(":- p(X,X).");
        assert_eq!(g.vertices, vec!["X"]);
        assert!(g.edges.is_empty());
    }

    #[test]
    fn path_decomposes_to_width_one_with_expected_bags() {
        let g = graph_of(":- f(X1,X2), f(X2,X3), f(X3,X4).");
        let td = decompose(&g, TdStrategy::MinFill).unwrap();
        validate(&td, &g).unwrap();
        assert_eq!(td.width, 1);
        assert_eq!(bag_size(&td), 2);
        let bags: BTreeSet<BTreeSet<String>> = td.bags.iter().cloned().collect();
        let expect: BTreeSet<BTreeSet<String>> = [
            ["X1", "X2"],
            ["X2", "X3"],
            ["X3", "X4"],
        ]
        .iter()
        .map(|b| b.iter().map(|s| s.to_string()).collect())
        .collect();
        assert_eq!(bags, expect);
    }

    #[test]
    fn triangle_decomposes_to_single_bag() {
        let g = graph_of(":- g(X1,X2), g(X1,X3), g(X2,X3).");
        let td = decompose(&g, TdStrategy::MinFill).unwrap();
        validate(&td, &g).unwrap();
        assert_eq!(td.width, 2);
        assert_eq!(bag_size(&td), 3);
        assert_eq!(td.bags.len(), 1);
    }

    #[test]
    fn empty_graph_single_empty_bag() {
        let g = graph_of("a :- b.");
        for strategy in [TdStrategy::MinFill, TdStrategy::MinDegree, TdStrategy::Exact] {
            let td = decompose(&g, strategy).unwrap();
            assert_eq!(td.bags, vec![BTreeSet::new()]);
            assert_eq!(td.width, -1);
            assert_eq!(bag_size(&td), 0);
            validate(&td, &g).unwrap();
        }
    }

    #[test]
    fn singleton_bag_width_zero() {
        let g = graph_of(":- p(X,X).");
        let td = decompose(&g, TdStrategy::MinFill).unwrap();
        assert_eq!(bag_size(&td), 1);
        assert_eq!(td.width, 0);
    }

    #[test]
    fn complete_graph_width_is_n_minus_one() {
        for n in 2..=7 {
            let edges: Vec<(usize, usize)> =
                (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
            let g = named_graph(n, &edges);
            for strategy in [TdStrategy::MinFill, TdStrategy::MinDegree, TdStrategy::Exact] {
                let td = decompose(&g, strategy).unwrap();
                validate(&td, &g).unwrap();
                assert_eq!(td.width, n as i64 - 1);
                assert_eq!(bag_size(&td), n, "φ equals |var| exactly on complete graphs");
            }
        }
    }

    #[test]
    fn trees_have_width_one() {
        // A star and a caterpillar.
        let star = named_graph(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]);
        let caterpillar = named_graph(7, &[(0, 1), (1, 2), (2, 3), (1, 4), (2, 5), (0, 6)]);
        for g in [star, caterpillar] {
            for strategy in [TdStrategy::MinFill, TdStrategy::MinDegree, TdStrategy::Exact] {
                let td = decompose(&g, strategy).unwrap();
                validate(&td, &g).unwrap();
                assert_eq!(td.width, 1);
            }
        }
    }

    #[test]
    fn cycles_have_width_two() {
        for n in 3..=8 {
            let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
            let g = named_graph(n, &edges);
            let td = decompose(&g, TdStrategy::Exact).unwrap();
            validate(&td, &g).unwrap();
            assert_eq!(td.width, 2, "C{n}");
        }
    }

    #[test]
    fn disconnected_components_still_form_one_tree() {
        let g = named_graph(6, &[(0, 1), (2, 3)]);
        for strategy in [TdStrategy::MinFill, TdStrategy::MinDegree, TdStrategy::Exact] {
            let td = decompose(&g, strategy).unwrap();
            validate(&td, &g).unwrap();
            assert_eq!(td.width, 1);
        }
    }

    #[test]
    fn exact_cap_is_enforced() {
        let edges: Vec<(usize, usize)> = (0..13).map(|i| (i, (i + 1) % 13)).collect();
        let g = named_graph(13, &edges);
        let err = decompose(&g, TdStrategy::Exact).unwrap_err();
        assert_eq!(err, TdError::ExactCapExceeded { vertices: 13, cap: 12 });
        assert!(decompose(&g, TdStrategy::MinFill).is_ok());
    }

    #[test]
    fn auto_exact_applies_below_cap_only() {
        let edges: Vec<(usize, usize)> = (0..5).map(|i| (i, (i + 1) % 5)).collect();
        let g = named_graph(5, &edges);
        let td = decompose_with(&g, &TdConfig::default()).unwrap();
        assert_eq!(td.width, 2);
        let big: Vec<(usize, usize)> = (0..13).map(|i| (i, (i + 1) % 13)).collect();
        let g = named_graph(13, &big);
        // Above the auto cap the configured heuristic runs, not exact.
        let td = decompose_with(&g, &TdConfig::default()).unwrap();
        validate(&td, &g).unwrap();
    }

    #[test]
    fn decomposition_is_deterministic() {
        let g = graph_of(":- e(A,B), e(B,C), e(C,D), e(D,A), e(A,C).");
        for strategy in [TdStrategy::MinFill, TdStrategy::MinDegree, TdStrategy::Exact] {
            let td1 = decompose(&g, strategy).unwrap();
            let td2 = decompose(&g, strategy).unwrap();
            assert_eq!(td1, td2);
        }
    }

    /// Minimum width over every elimination order — the defining brute force.
    fn permutation_oracle_width(g: &VariableGraph) -> i64 {
        fn rec(g: &VariableGraph, remaining: &mut Vec<String>, chosen: &mut Vec<String>, best: &mut i64) {
            if remaining.is_empty() {
                let td = td_from_order(g, chosen);
                *best = (*best).min(td.width);
                return;
            }
            for i in 0..remaining.len() {
                let v = remaining.remove(i);
                chosen.push(v);
                rec(g, remaining, chosen, best);
                let v = chosen.pop().unwrap();
                remaining.insert(i, v);
            }
        }
        let mut best = i64::MAX;
        rec(g, &mut g.vertices.clone(), &mut Vec::new(), &mut best);
        best
    }

    #[test]
    fn exact_width_matches_permutation_oracle() {
        let cases = vec![
            named_graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]),
            named_graph(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (0, 3)]),
            named_graph(6, &[(0, 1), (0, 2), (0, 3), (0, 4), (0, 5), (1, 2), (3, 4)]),
            named_graph(4, &[]),
            named_graph(6, &[(0, 1), (1, 2), (0, 2), (1, 3), (2, 3), (3, 4), (4, 5), (3, 5)]),
        ];
        for g in cases {
            let td = decompose(&g, TdStrategy::Exact).unwrap();
            validate(&td, &g).unwrap();
            assert_eq!(td.width, permutation_oracle_width(&g));
        }
    }

    mod random_graphs {
        use super::*;
        use proptest::prelude::*;

        fn arb_graph(max_n: usize) -> impl Strategy<Value = VariableGraph> {
            (2..=max_n)
                .prop_flat_map(|n| {
                    let pairs = n * (n - 1) / 2;
                    (Just(n), proptest::collection::vec(any::<bool>(), pairs))
                })
                .prop_map(|(n, include)| {
                    let all: Vec<(usize, usize)> =
                        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
                    let edges: Vec<(usize, usize)> = all
                        .into_iter()
                        .zip(&include)
                        .filter(|(_, keep)| **keep)
                        .map(|(e, _)| e)
                        .collect();
                    named_graph(n, &edges)
                })
        }

        proptest! {
            #[test]
            fn all_strategies_produce_valid_decompositions(g in arb_graph(10)) {
                for strategy in [TdStrategy::MinFill, TdStrategy::MinDegree, TdStrategy::Exact] {
                    let td = decompose(&g, strategy).unwrap();
                    prop_assert!(validate(&td, &g).is_ok(), "{:?}: {:?}", strategy, validate(&td, &g));
                }
            }

            #[test]
            fn heuristics_never_beat_exact(g in arb_graph(8)) {
                let exact = decompose(&g, TdStrategy::Exact).unwrap().width;
                for strategy in [TdStrategy::MinFill, TdStrategy::MinDegree] {
                    let w = decompose(&g, strategy).unwrap().width;
                    prop_assert!(w >= exact, "{:?} width {w} below exact {exact}", strategy);
                }
            }

            #[test]
            fn bag_size_never_exceeds_vertex_count(g in arb_graph(9)) {
                let td = decompose(&g, TdStrategy::MinFill).unwrap();
                prop_assert!(bag_size(&td) <= g.vertices.len());
            }
        }
    }
}
