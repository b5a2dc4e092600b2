//! Program analysis: fact splitting, the predicate dependency graph, SCC and
//! stratification structure, per-rule classification, and domain inference.
//!
//! Everything here is computed once per program and then read immutably by
//! the estimators and the per-rule decision procedure. The analysis follows
//! the usual bottom-up grounder's view of a program: facts are separated
//! from proper rules, predicates form a labeled digraph (positive and
//! negative dependencies), and the condensation of that graph yields the
//! evaluation order along which constant domains and tuple-count estimates
//! are propagated.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::collections::HashMap;
use std::collections::HashSet;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use petgraph::graph::NodeIndex;
use serde::Serialize;

use crate::ast::{Const, HeadKind, Literal, Program, Rule, Term};
use crate::estimator::{join_core, DomainView};

/// Edge label in the dependency graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Sign {
    Pos,
    Neg,
}

/// Labeled predicate digraph: an edge `(b, h, sign)` states that predicate
/// `h` depends on `b` through a rule body occurrence of the given sign.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DependencyGraph {
    pub vertices: BTreeSet<String>,
    pub edges: BTreeSet<(String, String, Sign)>,
}

/// SCC partition of the dependency graph plus everything derived from it:
/// the reduced DAG, a topological order, per-SCC stratification flags, the
/// ancestor fixpoint, and the positive-edge-only SCC structure used for
/// head-cycle and recursion checks.
///
/// SCC ids are topological positions: every reduced edge goes from a
/// smaller id to a larger one, so iterating `0..sccs.len()` visits
/// dependencies before dependents. The same holds for `pos_sccs`.
#[derive(Debug, Clone, Default)]
pub struct SccInfo {
    pub scc_of: BTreeMap<String, usize>,
    pub sccs: Vec<BTreeSet<String>>,
    pub reduced_edges: BTreeSet<(usize, usize)>,
    pub topo_order: Vec<usize>,
    pub stratified_scc: Vec<bool>,
    pub ancestors: Vec<BTreeSet<usize>>,
    pub pos_scc_of: BTreeMap<String, usize>,
    pub pos_sccs: Vec<BTreeSet<String>>,
    pub pos_self_loop: BTreeSet<String>,
}

impl SccInfo {
    /// A predicate is stratified iff every SCC it (transitively) depends on,
    /// including its own, contains no negative edge. Predicates absent from
    /// the graph (fresh names, pure fact predicates) are trivially stratified.
    pub fn pred_stratified(&self, pred: &str) -> bool {
        match self.scc_of.get(pred) {
            None => true,
            Some(&s) => self.ancestors[s].iter().all(|&t| self.stratified_scc[t]),
        }
    }

    /// True iff the predicate lies on a cycle of positive edges (a positive
    /// SCC with more than one member, or a positive self-loop).
    pub fn positively_recursive(&self, pred: &str) -> bool {
        match self.pos_scc_of.get(pred) {
            None => false,
            Some(&s) => self.pos_sccs[s].len() > 1 || self.pos_self_loop.contains(pred),
        }
    }

    /// Mixed-graph SCC comparison that treats unknown predicates as fresh
    /// singleton components (equal only to themselves by name).
    fn same_scc(&self, p: &str, q: &str) -> bool {
        match (self.scc_of.get(p), self.scc_of.get(q)) {
            (Some(a), Some(b)) => a == b,
            (None, None) => p == q,
            _ => false,
        }
    }

    fn same_pos_scc(&self, p: &str, q: &str) -> bool {
        match (self.pos_scc_of.get(p), self.pos_scc_of.get(q)) {
            (Some(a), Some(b)) => a == b,
            (None, None) => p == q,
            _ => false,
        }
    }
}

/// Constant domains and tuple-count estimates inferred from the facts.
#[derive(Debug, Clone, Default)]
pub struct DomainTable {
    /// All constants occurring in the fact base.
    pub global_domain: BTreeSet<Const>,
    /// Exact distinct-tuple count per fact predicate.
    pub fact_counts: BTreeMap<String, usize>,
    /// Constants that can reach each predicate position.
    pub pos_domain: BTreeMap<(String, usize), BTreeSet<Const>>,
    /// Per rule and variable: union of the positional domains at the
    /// variable's occurrences in positive body literals.
    pub var_domain: BTreeMap<(usize, String), BTreeSet<Const>>,
    /// Estimated tuple count per predicate (exact for fact predicates).
    pub derived_estimate: BTreeMap<String, f64>,
    arities: BTreeMap<String, usize>,
}

impl DomainTable {
    pub fn fact_count(&self, pred: &str) -> usize {
        self.fact_counts.get(pred).copied().unwrap_or(0)
    }

    /// Estimated tuple count; unknown predicates have nothing derivable.
    pub fn pred_estimate(&self, pred: &str) -> f64 {
        self.derived_estimate.get(pred).copied().unwrap_or(0.0)
    }

    pub fn pos_domain_set(&self, pred: &str, position: usize) -> Option<&BTreeSet<Const>> {
        self.pos_domain.get(&(pred.to_string(), position))
    }

    /// Stored `dom(X, r)` for a rule that was part of domain inference.
    pub fn stored_var_domain(&self, rule_id: usize, var: &str) -> Option<&BTreeSet<Const>> {
        self.var_domain.get(&(rule_id, var.to_string()))
    }

    /// Product of positional domain sizes; the generic upper bound on the
    /// number of distinct tuples of a predicate.
    pub fn positional_product(&self, pred: &str) -> f64 {
        let arity = self.arities.get(pred).copied().unwrap_or(0);
        (0..arity)
            .map(|j| self.pos_domain_set(pred, j).map_or(0, BTreeSet::len) as f64)
            .product()
    }
}

impl DomainView for DomainTable {
    fn pred_estimate(&self, pred: &str) -> f64 {
        DomainTable::pred_estimate(self, pred)
    }

    fn var_domain_set(&self, rule: &Rule, var: &str) -> BTreeSet<Const> {
        if let Some(stored) = self.stored_var_domain(rule.id, var) {
            return stored.clone();
        }
        var_domain_union(rule, var, &|pred, j| self.pos_domain_set(pred, j).cloned())
    }
}

/// Union formula for `dom(X, r)`: constants reaching any position where `X`
/// occurs in a positive body literal.
pub(crate) fn var_domain_union(
    rule: &Rule,
    var: &str,
    pos_domain: &dyn Fn(&str, usize) -> Option<BTreeSet<Const>>,
) -> BTreeSet<Const> {
    let mut out = BTreeSet::new();
    for lit in &rule.body_pos {
        for (j, t) in lit.args.iter().enumerate() {
            if t.as_var() == Some(var) {
                if let Some(dom) = pos_domain(&lit.predicate, j) {
                    out.extend(dom);
                }
            }
        }
    }
    out
}

/// Separate facts (ground singleton-head rules with empty bodies) from
/// proper rules. Facts are deduplicated and sorted; rules keep their ids.
pub fn split_facts(program: &Program) -> (Vec<Literal>, Vec<Rule>) {
    let mut facts: BTreeSet<Literal> = program.facts.iter().cloned().collect();
    let mut rules = Vec::new();
    for rule in &program.rules {
        if rule.is_fact() {
            facts.insert(rule.head[0].clone());
        } else {
            rules.push(rule.clone());
        }
    }
    (facts.into_iter().collect(), rules)
}

/// Build the labeled dependency graph of a rule set: one `(+)` edge per
/// positive body-to-head pair, one `(−)` edge per negative pair, and a `(−)`
/// self-loop on every choice head (a guessed predicate behaves like the
/// negative-cycle pair it abbreviates).
pub fn build_dependency_graph(rules: &[Rule]) -> DependencyGraph {
    let mut graph = DependencyGraph::default();
    for rule in rules {
        for lit in rule.literals() {
            graph.vertices.insert(lit.predicate.clone());
        }
        for h in &rule.head {
            for b in &rule.body_pos {
                graph.edges.insert((b.predicate.clone(), h.predicate.clone(), Sign::Pos));
            }
            for b in &rule.body_neg {
                graph.edges.insert((b.predicate.clone(), h.predicate.clone(), Sign::Neg));
            }
            if rule.head_kind == HeadKind::Choice {
                graph.edges.insert((h.predicate.clone(), h.predicate.clone(), Sign::Neg));
            }
        }
    }
    graph
}

/// Tarjan SCCs relabeled so ids follow a topological order (dependencies
/// first), for the mixed graph and for the positive-edge subgraph.
fn scc_partition(
    vertices: &[String],
    edges: impl Iterator<Item = (usize, usize)> + Clone,
) -> (BTreeMap<String, usize>, Vec<BTreeSet<String>>) {
    let mut g: DiGraph<usize, ()> = DiGraph::new();
    let nodes: Vec<NodeIndex> = (0..vertices.len()).map(|i| g.add_node(i)).collect();
    for (a, b) in edges {
        g.add_edge(nodes[a], nodes[b], ());
    }
    // tarjan_scc returns components in reverse topological order: for an edge
    // u → v, v's component comes first. Reversing yields dependencies-first.
    let mut comps = tarjan_scc(&g);
    comps.reverse();
    let mut scc_of = BTreeMap::new();
    let mut sccs = Vec::new();
    for (id, comp) in comps.into_iter().enumerate() {
        let members: BTreeSet<String> =
            comp.into_iter().map(|n| vertices[g[n]].clone()).collect();
        for p in &members {
            scc_of.insert(p.clone(), id);
        }
        sccs.push(members);
    }
    (scc_of, sccs)
}

/// Compute the full SCC structure of a dependency graph.
pub fn compute_sccs(graph: &DependencyGraph) -> SccInfo {
    let vertices: Vec<String> = graph.vertices.iter().cloned().collect();
    let index: HashMap<&str, usize> =
        vertices.iter().enumerate().map(|(i, p)| (p.as_str(), i)).collect();
    let edge_ix = |&(ref a, ref b, _): &(String, String, Sign)| (index[a.as_str()], index[b.as_str()]);

    let (scc_of, sccs) = scc_partition(&vertices, graph.edges.iter().map(edge_ix));
    let (pos_scc_of, pos_sccs) = scc_partition(
        &vertices,
        graph
            .edges
            .iter()
            .filter(|(_, _, s)| *s == Sign::Pos)
            .map(edge_ix)
            .collect::<Vec<_>>()
            .into_iter(),
    );

    let mut reduced_edges = BTreeSet::new();
    let mut stratified_scc = vec![true; sccs.len()];
    for (a, b, sign) in &graph.edges {
        let (sa, sb) = (scc_of[a], scc_of[b]);
        if sa != sb {
            reduced_edges.insert((sa, sb));
        } else if *sign == Sign::Neg {
            // Any edge inside an SCC lies on a cycle, so an internal negative
            // edge is exactly a cycle with a negative dependency.
            stratified_scc[sa] = false;
        }
    }
    debug_assert!(reduced_edges.iter().all(|&(a, b)| a < b), "scc ids must be topological");

    let mut ancestors: Vec<BTreeSet<usize>> = Vec::with_capacity(sccs.len());
    for s in 0..sccs.len() {
        let mut anc = BTreeSet::from([s]);
        for &(from, to) in &reduced_edges {
            if to == s {
                anc.extend(ancestors[from].iter().copied());
            }
        }
        ancestors.push(anc);
    }

    let pos_self_loop = graph
        .edges
        .iter()
        .filter(|(a, b, s)| a == b && *s == Sign::Pos)
        .map(|(a, _, _)| a.clone())
        .collect();

    let topo_order = (0..sccs.len()).collect();
    SccInfo {
        scc_of,
        sccs,
        reduced_edges,
        topo_order,
        stratified_scc,
        ancestors,
        pos_scc_of,
        pos_sccs,
        pos_self_loop,
    }
}

/// Boolean classification of one rule against the program's SCC structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RuleClass {
    pub is_constraint: bool,
    pub is_stratified: bool,
    pub is_tight: bool,
    pub is_hcf: bool,
}

/// Classify a rule: constraint (empty head, not weak), stratified (every
/// body predicate is stratified), tight (no positive body literal shares an
/// SCC with a head literal), and head-cycle-free (no two head atoms on a
/// common positive cycle).
pub fn classify_rule(rule: &Rule, scc: &SccInfo) -> RuleClass {
    let is_constraint = rule.head_kind == HeadKind::Constraint;
    let is_stratified = rule
        .body_pos
        .iter()
        .chain(&rule.body_neg)
        .all(|lit| scc.pred_stratified(&lit.predicate));
    let is_tight = rule.head.iter().all(|h| {
        rule.body_pos.iter().all(|b| !scc.same_scc(&h.predicate, &b.predicate))
    });
    let is_hcf = rule.head_kind != HeadKind::Disjunctive
        || rule.head.iter().enumerate().all(|(i, h)| {
            rule.head[i + 1..]
                .iter()
                .all(|h2| !scc.same_pos_scc(&h.predicate, &h2.predicate))
        });
    RuleClass { is_constraint, is_stratified, is_tight, is_hcf }
}

/// View over the partially-built table used while deriving estimates.
struct BuildingView<'a> {
    pos_domain: &'a BTreeMap<(String, usize), BTreeSet<Const>>,
    estimates: &'a BTreeMap<String, f64>,
}

impl DomainView for BuildingView<'_> {
    fn pred_estimate(&self, pred: &str) -> f64 {
        self.estimates.get(pred).copied().unwrap_or(0.0)
    }

    fn var_domain_set(&self, rule: &Rule, var: &str) -> BTreeSet<Const> {
        var_domain_union(rule, var, &|pred, j| {
            self.pos_domain.get(&(pred.to_string(), j)).cloned()
        })
    }
}

/// Infer constant domains and per-predicate tuple estimates.
///
/// Positional domains start from the exact constant sets of the facts and
/// are propagated through rule heads (variables carry their `dom(X, r)`
/// union, constants their singleton) until a least fixpoint is reached; the
/// domains only grow inside a finite universe, so this terminates.
///
/// `derived_estimate` is exact for pure fact predicates. A predicate on a
/// positive cycle gets the positional-domain product (recursion can fill the
/// whole space). Any other derived predicate takes the positional product
/// capped by the sum, over its defining rules, of the body join estimate —
/// itself capped by the head-argument domain product — plus its own facts;
/// for a guessed predicate over a fact base this reproduces the defining
/// fact predicate's count (the candidate set the bottom-up grounder feeds
/// into joins).
pub fn infer_domains(facts: &[Literal], rules: &[Rule], scc: &SccInfo) -> DomainTable {
    let mut table = DomainTable::default();

    let fact_set: BTreeSet<&Literal> = facts.iter().collect();
    for fact in &fact_set {
        *table.fact_counts.entry(fact.predicate.clone()).or_insert(0) += 1;
        table.arities.entry(fact.predicate.clone()).or_insert_with(|| fact.arity());
        for (j, t) in fact.args.iter().enumerate() {
            if let Term::Const(c) = t {
                table.global_domain.insert(c.clone());
                table
                    .pos_domain
                    .entry((fact.predicate.clone(), j))
                    .or_default()
                    .insert(c.clone());
            }
        }
    }
    for rule in rules {
        for lit in rule.literals() {
            table.arities.entry(lit.predicate.clone()).or_insert_with(|| lit.arity());
        }
    }

    // Least fixpoint of head-position propagation.
    loop {
        let mut changed = false;
        for rule in rules {
            for h in &rule.head {
                for (j, t) in h.args.iter().enumerate() {
                    let incoming: BTreeSet<Const> = match t {
                        Term::Const(c) => BTreeSet::from([c.clone()]),
                        Term::Var(v) => var_domain_union(rule, v, &|pred, j| {
                            table.pos_domain.get(&(pred.to_string(), j)).cloned()
                        }),
                    };
                    if incoming.is_empty() {
                        continue;
                    }
                    let slot = table.pos_domain.entry((h.predicate.clone(), j)).or_default();
                    let before = slot.len();
                    slot.extend(incoming);
                    changed |= slot.len() != before;
                }
            }
        }
        if !changed {
            break;
        }
    }

    for rule in rules {
        for var in rule.variables() {
            let dom = var_domain_union(rule, &var, &|pred, j| {
                table.pos_domain.get(&(pred.to_string(), j)).cloned()
            });
            table.var_domain.insert((rule.id, var), dom);
        }
    }

    // Tuple-count estimates, dependencies first along the positive topology.
    let head_preds: HashSet<&str> =
        rules.iter().flat_map(|r| r.head.iter().map(|h| h.predicate.as_str())).collect();
    let mut estimates: BTreeMap<String, f64> = BTreeMap::new();
    for pred in table.arities.keys() {
        if !head_preds.contains(pred.as_str()) {
            estimates.insert(pred.clone(), table.fact_count(pred) as f64);
        }
    }
    let mut defining: BTreeMap<&str, Vec<&Rule>> = BTreeMap::new();
    for rule in rules {
        for h in &rule.head {
            let entry = defining.entry(h.predicate.as_str()).or_default();
            if !entry.iter().any(|r| r.id == rule.id) {
                entry.push(rule);
            }
        }
    }
    let positional_product = |table: &DomainTable, pred: &str| -> f64 {
        let arity = table.arities.get(pred).copied().unwrap_or(0);
        (0..arity)
            .map(|j| table.pos_domain_set(pred, j).map_or(0, BTreeSet::len) as f64)
            .product()
    };
    for scc_members in &scc.pos_sccs {
        for pred in scc_members {
            if !head_preds.contains(pred.as_str()) {
                continue;
            }
            let cap = positional_product(&table, pred);
            let estimate = if scc.positively_recursive(pred) {
                cap
            } else {
                let view = BuildingView { pos_domain: &table.pos_domain, estimates: &estimates };
                let mut sum = table.fact_count(pred) as f64;
                for rule in defining.get(pred.as_str()).into_iter().flatten() {
                    let body = join_core(rule, &view).final_estimate;
                    for h in rule.head.iter().filter(|h| &h.predicate == pred) {
                        let head_product: f64 = h
                            .args
                            .iter()
                            .map(|t| match t {
                                Term::Const(_) => 1.0,
                                Term::Var(v) => view.var_domain_set(rule, v).len() as f64,
                            })
                            .product();
                        sum += body.min(head_product);
                    }
                }
                cap.min(sum)
            };
            estimates.insert(pred.clone(), estimate);
        }
    }
    table.derived_estimate = estimates;
    table
}

/// Bundle of every analysis product for one program.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub facts: Vec<Literal>,
    pub rules: Vec<Rule>,
    pub graph: DependencyGraph,
    pub scc: SccInfo,
    pub domains: DomainTable,
}

/// Run the full analysis pipeline on a parsed program.
pub fn analyze(program: &Program) -> Analysis {
    let (facts, rules) = split_facts(program);
    let graph = build_dependency_graph(&rules);
    let scc = compute_sccs(&graph);
    let domains = infer_domains(&facts, &rules, &scc);
    Analysis { facts, rules, graph, scc, domains }
}
