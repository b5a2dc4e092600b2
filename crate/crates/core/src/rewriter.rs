//! Structural rule decomposition along a tree decomposition.
//!
//! A rule whose variable graph decomposes into small bags can be split into
//! one rule per bag: every non-root bag derives a fresh predicate over the
//! variables it shares with its parent, and the root bag keeps the original
//! head. Each emitted rule then has at most bag-size many variables, so the
//! rewritten program grounds in O(|dom|^φ) instead of O(|dom|^|var|).
//!
//! The transformation refuses (returns a reason instead of rules) whenever
//! it cannot preserve semantics and safety without extra machinery: choice,
//! disjunctive, or weak heads; literals that fit no bag; bag rules whose
//! head, negative, or comparison variables are not bound by the positive
//! literals landing in the same bag.

use std::collections::BTreeSet;
use std::collections::HashSet;
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};

use crate::analysis::DomainTable;
use crate::ast::{HeadKind, Literal, Rule, Term};
use crate::estimator::{join_estimate_ctx, EstimationCtx};
use crate::treedecomp::TreeDecomposition;

/// Reserved prefix for predicates introduced by the rewriter.
pub const FRESH_PREFIX: &str = "__td_";

/// Program-wide generator for fresh predicate names and fresh rule ids.
/// Both counters are atomic, so concurrent per-rule rewrites stay unique.
pub struct FreshGen {
    taken: HashSet<String>,
    next_name: AtomicU64,
    next_id: AtomicUsize,
}

impl FreshGen {
    /// `taken` are the predicate names already in use; `first_id` must
    /// exceed every existing rule id.
    pub fn new(taken: HashSet<String>, first_id: usize) -> Self {
        FreshGen { taken, next_name: AtomicU64::new(1), next_id: AtomicUsize::new(first_id) }
    }

    pub fn for_rules(rules: &[Rule]) -> Self {
        let taken = rules
            .iter()
            .flat_map(|r| r.literals().map(|l| l.predicate.clone()))
            .collect();
        let first_id = rules.iter().map(|r| r.id + 1).max().unwrap_or(0);
        FreshGen::new(taken, first_id)
    }

    /// Next unused `__td_N` name.
    pub fn fresh_name(&self) -> String {
        loop {
            let n = self.next_name.fetch_add(1, Ordering::Relaxed);
            let candidate = format!("{FRESH_PREFIX}{n}");
            if !self.taken.contains(&candidate) {
                return candidate;
            }
        }
    }

    pub fn fresh_id(&self) -> usize {
        self.next_id.fetch_add(1, Ordering::Relaxed)
    }
}

/// Outcome of one rewrite attempt. When `not_applicable` is set, the
/// original rule must be grounded as-is and `new_rules` is empty.
#[derive(Debug, Clone)]
pub struct RewriteResult {
    pub original_rule_id: usize,
    pub new_rules: Vec<Rule>,
    /// Fresh predicates introduced, as (name, arity).
    pub fresh_predicates: Vec<(String, usize)>,
    pub not_applicable: Option<String>,
}

impl RewriteResult {
    pub fn applicable(&self) -> bool {
        self.not_applicable.is_none()
    }

    fn refuse(rule: &Rule, reason: String) -> Self {
        RewriteResult {
            original_rule_id: rule.id,
            new_rules: Vec::new(),
            fresh_predicates: Vec::new(),
            not_applicable: Some(reason),
        }
    }
}

/// Split `rule` along `td`. A single-bag decomposition yields the identity
/// rewriting (the rule unchanged, no fresh predicates). Emitted rules come
/// deepest-first, the root rule (carrying the original head) last.
pub fn lpopt_rewrite(rule: &Rule, td: &TreeDecomposition, gen: &FreshGen) -> RewriteResult {
    match rule.head_kind {
        HeadKind::Normal | HeadKind::Constraint => {}
        HeadKind::Choice => return RewriteResult::refuse(rule, "choice head".into()),
        HeadKind::Disjunctive => return RewriteResult::refuse(rule, "disjunctive head".into()),
        HeadKind::Weak => return RewriteResult::refuse(rule, "weak-constraint head".into()),
    }
    if td.bags.len() <= 1 {
        return RewriteResult {
            original_rule_id: rule.id,
            new_rules: vec![rule.clone()],
            fresh_predicates: Vec::new(),
            not_applicable: None,
        };
    }

    // Root: smallest bag id covering all head variables.
    let head_vars: BTreeSet<&str> = rule.head.iter().flat_map(Literal::variables).collect();
    let Some(root) = (0..td.bags.len())
        .find(|&t| head_vars.iter().all(|v| td.bags[t].contains(*v)))
    else {
        return RewriteResult::refuse(rule, "no bag contains all head variables".into());
    };
    let parent = td.parents_from(root);
    let mut depth = vec![0usize; td.bags.len()];
    let mut order: Vec<usize> = (0..td.bags.len()).collect();
    // Parents always get visited before children in parents_from's BFS
    // tree, but depths are easiest computed by chasing pointers.
    for t in 0..td.bags.len() {
        let mut d = 0;
        let mut cur = t;
        while let Some(p) = parent[cur] {
            d += 1;
            cur = p;
        }
        depth[t] = d;
    }
    order.sort_by_key(|&t| (std::cmp::Reverse(depth[t]), t));

    // Deepest bag (ties: smallest id) containing all of a variable set.
    let assign = |vars: &BTreeSet<&str>| -> Option<usize> {
        (0..td.bags.len())
            .filter(|&t| vars.iter().all(|v| td.bags[t].contains(*v)))
            .max_by_key(|&t| (depth[t], std::cmp::Reverse(t)))
    };
    fn lit_vars(lit: &Literal) -> BTreeSet<&str> {
        lit.variables().collect()
    }

    let mut pos_at: Vec<Vec<&Literal>> = vec![Vec::new(); td.bags.len()];
    let mut neg_at: Vec<Vec<&Literal>> = vec![Vec::new(); td.bags.len()];
    let mut cmp_at: Vec<Vec<&crate::ast::Comparison>> = vec![Vec::new(); td.bags.len()];
    for lit in &rule.body_pos {
        match assign(&lit_vars(lit)) {
            Some(t) => pos_at[t].push(lit),
            None => return RewriteResult::refuse(rule, format!("literal {lit} fits in no bag")),
        }
    }
    for lit in &rule.body_neg {
        match assign(&lit_vars(lit)) {
            Some(t) => neg_at[t].push(lit),
            None => {
                return RewriteResult::refuse(rule, format!("literal not {lit} fits in no bag"))
            }
        }
    }
    for cmp in &rule.body_cmp {
        let vars: BTreeSet<&str> = [&cmp.lhs, &cmp.rhs]
            .iter()
            .filter_map(|t| t.as_var())
            .collect();
        match assign(&vars) {
            Some(t) => cmp_at[t].push(cmp),
            None => {
                return RewriteResult::refuse(rule, format!("comparison {cmp} fits in no bag"))
            }
        }
    }

    // Interface variables keep their first-occurrence order in the rule.
    let var_order: Vec<String> = rule.variables();
    let ordered = |vars: BTreeSet<String>| -> Vec<String> {
        var_order.iter().filter(|v| vars.contains(*v)).cloned().collect()
    };

    let mut new_rules: Vec<Rule> = Vec::new();
    let mut fresh_predicates: Vec<(String, usize)> = Vec::new();
    let mut child_atoms: Vec<Vec<Literal>> = vec![Vec::new(); td.bags.len()];
    for &t in &order {
        let is_root = t == root;
        let mut children = child_atoms[t].clone();
        children.sort();
        let head_atom = if is_root {
            None
        } else {
            let p = parent[t].expect("non-root bag has a parent");
            let interface: BTreeSet<String> =
                td.bags[t].intersection(&td.bags[p]).cloned().collect();
            let name = gen.fresh_name();
            let atom = Literal::new(
                name.clone(),
                ordered(interface).into_iter().map(Term::Var).collect(),
            );
            fresh_predicates.push((name, atom.arity()));
            child_atoms[p].push(atom.clone());
            Some(atom)
        };

        let body_pos: Vec<Literal> =
            pos_at[t].iter().map(|l| (*l).clone()).chain(children).collect();
        let bound: HashSet<&str> = body_pos.iter().flat_map(Literal::variables).collect();
        let head = match &head_atom {
            Some(atom) => vec![atom.clone()],
            None => rule.head.clone(),
        };
        let unbound = head
            .iter()
            .chain(neg_at[t].iter().copied())
            .flat_map(Literal::variables)
            .chain(cmp_at[t].iter().flat_map(|c| {
                [&c.lhs, &c.rhs].into_iter().filter_map(Term::as_var)
            }))
            .find(|v| !bound.contains(v));
        if let Some(v) = unbound {
            return RewriteResult::refuse(
                rule,
                format!("variable {v} is not bound by positive literals in its bag"),
            );
        }

        new_rules.push(Rule {
            id: gen.fresh_id(),
            head_kind: if is_root {
                rule.head_kind
            } else {
                HeadKind::Normal
            },
            head,
            body_pos,
            body_neg: neg_at[t].iter().map(|l| (*l).clone()).collect(),
            body_cmp: cmp_at[t].iter().map(|c| (*c).clone()).collect(),
            weak: None,
        });
    }

    RewriteResult { original_rule_id: rule.id, new_rules, fresh_predicates, not_applicable: None }
}

/// Expected bottom-up grounding size of a rewriting: the sum of the join
/// estimates of its rules. Fresh predicates get positional domains equal to
/// their argument variables' domains in the original rule, and a tuple
/// estimate equal to that domain product.
pub fn rewrite_estimate(result: &RewriteResult, domains: &DomainTable) -> f64 {
    let mut ctx = EstimationCtx::new(domains);
    for (name, _) in &result.fresh_predicates {
        let atom = result
            .new_rules
            .iter()
            .flat_map(|r| r.head.iter())
            .find(|h| &h.predicate == name)
            .expect("every fresh predicate heads one emitted rule");
        let mut product = 1.0;
        for (j, term) in atom.args.iter().enumerate() {
            let dom = match term.as_var() {
                Some(v) => domains
                    .stored_var_domain(result.original_rule_id, v)
                    .cloned()
                    .unwrap_or_default(),
                None => BTreeSet::new(),
            };
            product *= dom.len() as f64;
            ctx.extra_pos.insert((name.clone(), j), dom);
        }
        ctx.extra_est.insert(name.clone(), product);
    }
    result.new_rules.iter().map(|r| join_estimate_ctx(r, &ctx).final_estimate).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::analyze;
    use crate::ast::parse_program;
    use crate::estimator::join_estimate;
    use crate::treedecomp::{bag_size, build_variable_graph, decompose, TdStrategy};

    fn complete_digraph(n: i64, pred: &str) -> String {
        let mut out = String::new();
        for i in 1..=n {
            for j in 1..=n {
                if i != j {
                    out.push_str(&format!("{pred}({i},{j}).\n"));
                }
            }
        }
        out
    }

    fn rewrite(rule_text: &str) -> (RewriteResult, Rule) {
        let p = parse_program(rule_text).unwrap();
        let rule = p.rules.last().unwrap().clone();
        let td = decompose(&build_variable_graph(&rule), TdStrategy::MinFill).unwrap();
        let gen = FreshGen::for_rules(&p.rules);
        (lpopt_rewrite(&rule, &td, &gen), rule)
    }

    #[test]
    fn chain_constraint_splits_per_listing() {
        let (res, _) = rewrite(":- f(X1,X2), f(X2,X3), f(X3,X4).");
        assert!(res.applicable());
        let texts: Vec<String> = res.new_rules.iter().map(|r| r.to_string()).collect();
        assert_eq!(
            texts,
            vec![
                "__td_1(X3) :- f(X3,X4).",
                "__td_2(X2) :- f(X2,X3), __td_1(X3).",
                ":- f(X1,X2), __td_2(X2).",
            ]
        );
        assert_eq!(res.fresh_predicates, vec![("__td_1".into(), 1), ("__td_2".into(), 1)]);
    }

    #[test]
    fn emitted_rules_respect_bag_limits() {
        let (res, rule) = rewrite(":- f(X1,X2), f(X2,X3), f(X3,X4), f(X4,X5), f(X5,X6).");
        assert!(res.applicable());
        assert_eq!(res.new_rules.len(), 5);
        for r in &res.new_rules {
            assert!(r.variables().len() <= 2);
            let td = decompose(&build_variable_graph(r), TdStrategy::Exact).unwrap();
            assert_eq!(
                bag_size(&td),
                r.variables().len(),
                "emitted rules admit no further structural splitting"
            );
        }
        for (_, arity) in &res.fresh_predicates {
            assert!(*arity <= 1, "interface is a strict subset of a bag");
        }
        let _ = rule;
    }

    #[test]
    fn single_bag_is_identity() {
        let (res, rule) = rewrite(":- g(X1,X2), g(X1,X3), g(X2,X3).");
        assert!(res.applicable());
        assert_eq!(res.new_rules, vec![rule]);
        assert!(res.fresh_predicates.is_empty());
    }

    #[test]
    fn single_variable_rule_is_identity() {
        let (res, rule) = rewrite("p(X) :- q(X).");
        assert!(res.applicable());
        assert_eq!(res.new_rules, vec![rule]);
    }

    #[test]
    fn normal_head_stays_on_root_rule() {
        let (res, _) = rewrite("h(X1) :- f(X1,X2), f(X2,X3), f(X3,X4).");
        assert!(res.applicable());
        let root = res.new_rules.last().unwrap();
        assert_eq!(root.head[0].to_string(), "h(X1)");
        assert_eq!(root.head_kind, HeadKind::Normal);
        for r in &res.new_rules[..res.new_rules.len() - 1] {
            assert!(r.head[0].predicate.starts_with(FRESH_PREFIX));
        }
    }

    #[test]
    fn guessing_heads_are_refused() {
        for text in [
            "{f(X,Y)} :- e(X,Y).",
            "a(X) | b(X) :- e(X,Y).",
            ":~ e(X,Y). [1,X]",
        ] {
            let (res, _) = rewrite(text);
            assert!(!res.applicable(), "{text}");
            assert!(res.new_rules.is_empty());
        }
    }

    #[test]
    fn unbound_negative_variable_is_refused() {
        let (res, _) = rewrite(":- f(X1,X2), not g(X2,X3), f(X3,X4).");
        assert!(!res.applicable());
        assert!(res.not_applicable.unwrap().contains("not bound"));
    }

    #[test]
    fn unbound_comparison_variable_is_refused() {
        // Hand-built decomposition: the comparison's bag holds no positive
        // literal binding X.
        let p = parse_program(":- p(X,W), q(Y,V), s(W,V), X < Y.").unwrap();
        let rule = &p.rules[0];
        let td = TreeDecomposition {
            bags: vec![
                ["X", "W", "V"].iter().map(|s| s.to_string()).collect(),
                ["X", "V", "Y"].iter().map(|s| s.to_string()).collect(),
            ],
            edges: vec![(0, 1)],
            root: 0,
            width: 2,
        };
        let gen = FreshGen::for_rules(&p.rules);
        let res = lpopt_rewrite(rule, &td, &gen);
        assert!(!res.applicable());
        assert!(res.not_applicable.unwrap().contains('X'));
    }

    #[test]
    fn ground_literals_ride_along() {
        let (res, _) = rewrite("a :- f(X1,X2), f(X2,X3), b.");
        assert!(res.applicable());
        let carrying: Vec<&Rule> = res
            .new_rules
            .iter()
            .filter(|r| r.body_pos.iter().any(|l| l.predicate == "b"))
            .collect();
        assert_eq!(carrying.len(), 1, "the ground literal lands in exactly one rule");
    }

    #[test]
    fn fresh_names_skip_taken_ones() {
        let p = parse_program("__td_1(X) :- f(X,Y).\n:- f(X1,X2), f(X2,X3), f(X3,X4).").unwrap();
        let rule = p.rules.last().unwrap();
        let td = decompose(&build_variable_graph(rule), TdStrategy::MinFill).unwrap();
        let gen = FreshGen::for_rules(&p.rules);
        let res = lpopt_rewrite(rule, &td, &gen);
        let names: Vec<&str> = res.fresh_predicates.iter().map(|(n, _)| n.as_str()).collect();
        assert_eq!(names, vec!["__td_2", "__td_3"]);
    }

    #[test]
    fn rewriting_is_deterministic() {
        let (res1, _) = rewrite(":- f(X1,X2), f(X2,X3), f(X3,X4).");
        let (res2, _) = rewrite(":- f(X1,X2), f(X2,X3), f(X3,X4).");
        let t1: Vec<String> = res1.new_rules.iter().map(|r| r.to_string()).collect();
        let t2: Vec<String> = res2.new_rules.iter().map(|r| r.to_string()).collect();
        assert_eq!(t1, t2);
    }

    #[test]
    fn rewrite_estimate_beats_original_on_chain_rule() {
        let text = format!(
            "{{f(X,Y)}} :- e(X,Y).\n:- f(X1,X2), f(X2,X3), f(X3,X4).\n{}",
            complete_digraph(4, "e")
        );
        let a = analyze(&parse_program(&text).unwrap());
        let r1 = a.rules.iter().find(|r| r.is_constraint()).unwrap();
        assert_eq!(join_estimate(r1, &a.domains).final_estimate, 108.0);
        let td = decompose(&build_variable_graph(r1), TdStrategy::MinFill).unwrap();
        let gen = FreshGen::for_rules(&a.rules);
        let res = lpopt_rewrite(r1, &td, &gen);
        assert!(res.applicable());
        assert_eq!(rewrite_estimate(&res, &a.domains), 36.0);
    }

    #[test]
    fn identity_rewrite_estimate_matches_original() {
        let text = format!(
            "{{g(X,Y)}} :- e(X,Y).\n:- g(X1,X2), g(X1,X3), g(X2,X3).\n{}",
            complete_digraph(4, "e")
        );
        let a = analyze(&parse_program(&text).unwrap());
        let r2 = a.rules.iter().find(|r| r.is_constraint()).unwrap();
        let td = decompose(&build_variable_graph(r2), TdStrategy::MinFill).unwrap();
        let gen = FreshGen::for_rules(&a.rules);
        let res = lpopt_rewrite(r2, &td, &gen);
        assert!(res.applicable());
        assert_eq!(res.new_rules.len(), 1);
        assert_eq!(
            rewrite_estimate(&res, &a.domains),
            join_estimate(r2, &a.domains).final_estimate
        );
    }

    #[test]
    fn emitted_rule_ids_are_fresh_and_distinct() {
        let (res, rule) = rewrite(":- f(X1,X2), f(X2,X3), f(X3,X4).");
        let mut seen = std::collections::HashSet::new();
        for r in &res.new_rules {
            assert!(r.id > rule.id);
            assert!(seen.insert(r.id));
        }
    }
}
