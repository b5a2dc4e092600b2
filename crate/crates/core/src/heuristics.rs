//! Per-rule grounding strategy selection.
//!
//! Every rule ends up marked either BDG (ground it by body-decoupling)
//! or SOTA (ground it bottom-up), chosen by comparing structural measures
//! (arities vs. treewidth) and the two size estimates. Rules whose
//! variable graph decomposes below their variable count are first handed
//! to the structural rewriter when that shrinks the estimate, and the
//! emitted rules are decided individually. The branches are tried in a
//! fixed order and the first hit wins; exact estimate ties fall through
//! to bottom-up.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::analysis::{analyze, classify_rule, Analysis};
use crate::ast::{Const, HeadKind, Literal, Program, Rule};
use crate::estimator::{bdg_estimate_ctx, join_estimate_ctx, DomainView, EstimationCtx};
use crate::rewriter::{lpopt_rewrite, FreshGen, RewriteResult};
use crate::treedecomp::{
    bag_size, build_variable_graph, decompose, decompose_with, TdConfig, TdStrategy,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Marker {
    Bdg,
    Sota,
}

impl fmt::Display for Marker {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Marker::Bdg => write!(f, "bdg"),
            Marker::Sota => write!(f, "sota"),
        }
    }
}

/// Which rule of the decision procedure fired.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// Unsupported or non-estimable shape: choice, disjunction, weak.
    ForcedSota,
    /// Fully evaluated bottom-up anyway; decoupling cannot help.
    Stratified,
    /// Structural rewriting shrank the estimate; see the emitted rules.
    LpoptRecursed,
    /// Constraint with small arities and a smaller decoupled estimate.
    BdgConstraint,
    /// Tight rule, `2a < φ`, smaller decoupled estimate.
    BdgTight,
    /// Head-cycle-free rule, `3a < φ`, smaller decoupled estimate.
    BdgHcf,
    /// Nothing applied; ground bottom-up.
    DefaultSota,
}

/// Structural measurements a decision is based on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measures {
    pub num_vars: usize,
    pub max_arity: usize,
    pub head_arity: usize,
    pub body_arity: usize,
    pub phi: usize,
    pub is_constraint: bool,
    pub is_tight: bool,
    pub is_stratified: bool,
    pub is_hcf: bool,
}

/// The estimates consulted: bottom-up join size, body-decoupled size
/// (absent when not estimable), and the rewritten program's join size
/// (absent unless the rewrite branch was evaluated).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimates {
    pub sota: f64,
    pub bdg: Option<f64>,
    pub lpopt_sota: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Decision {
    pub rule_id: usize,
    pub marker: Marker,
    pub branch: Branch,
    pub measures: Measures,
    pub estimates: Estimates,
}

/// Provenance of one structural rewrite: the replaced rule, its decision,
/// and what it became.
#[derive(Debug, Clone, Serialize)]
pub struct RewriteRecord {
    pub original: Rule,
    pub decision: Decision,
    pub new_rule_ids: Vec<usize>,
    pub fresh_predicates: Vec<(String, usize)>,
}

/// Final rules (post-rewriting) paired with their decisions, plus the
/// rewrite provenance. `decisions[i]` belongs to `rules[i]`.
#[derive(Debug, Clone, Default)]
pub struct DecideOutcome {
    pub decisions: Vec<Decision>,
    pub rules: Vec<Rule>,
    pub rewrites: Vec<RewriteRecord>,
}

pub struct DecideCtx<'a> {
    pub analysis: &'a Analysis,
    pub td: TdConfig,
    pub gen: &'a FreshGen,
}

/// Positional domains and tuple estimates for predicates introduced by
/// rewriting, accumulated down the recursion.
#[derive(Debug, Clone, Default)]
struct Overlay {
    pos: BTreeMap<(String, usize), BTreeSet<Const>>,
    est: BTreeMap<String, f64>,
}

impl Overlay {
    fn ctx<'a>(&self, analysis: &'a Analysis) -> EstimationCtx<'a> {
        EstimationCtx {
            base: &analysis.domains,
            extra_pos: self.pos.clone(),
            extra_est: self.est.clone(),
        }
    }
}

/// Fresh predicates keep the domains their argument variables had in the
/// rule that was split.
fn extend_overlay(
    overlay: &Overlay,
    result: &RewriteResult,
    original: &Rule,
    ectx: &EstimationCtx<'_>,
) -> Overlay {
    let mut next = overlay.clone();
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
                Some(v) => ectx.var_domain_set(original, v),
                None => BTreeSet::new(),
            };
            product *= dom.len() as f64;
            next.pos.insert((name.clone(), j), dom);
        }
        next.est.insert(name.clone(), product);
    }
    next
}

fn head_arity(rule: &Rule) -> usize {
    rule.head.iter().map(Literal::arity).max().unwrap_or(0)
}

fn body_arity(rule: &Rule) -> usize {
    rule.body_pos.iter().chain(&rule.body_neg).map(Literal::arity).max().unwrap_or(0)
}

/// Decide one rule, possibly replacing it by its structural rewriting.
/// Every final rule receives exactly one decision; nothing errors.
pub fn decide(rule: &Rule, ctx: &DecideCtx<'_>) -> DecideOutcome {
    let mut out = DecideOutcome::default();
    decide_rec(rule, ctx, &Overlay::default(), &mut out);
    out
}

fn decide_rec(rule: &Rule, ctx: &DecideCtx<'_>, overlay: &Overlay, out: &mut DecideOutcome) {
    let ectx = overlay.ctx(ctx.analysis);
    let class = classify_rule(rule, &ctx.analysis.scc);
    let graph = build_variable_graph(rule);
    // A strategy that refuses the graph (exact search over too many
    // variables) falls back to min-fill; every rule must get a width.
    let td = decompose_with(&graph, &ctx.td)
        .or_else(|_| decompose(&graph, TdStrategy::MinFill))
        .expect("min-fill accepts any graph");
    let phi = bag_size(&td);
    let measures = Measures {
        num_vars: rule.variables().len(),
        max_arity: rule.max_arity(),
        head_arity: head_arity(rule),
        body_arity: body_arity(rule),
        phi,
        is_constraint: class.is_constraint,
        is_tight: class.is_tight,
        is_stratified: class.is_stratified,
        is_hcf: class.is_hcf,
    };
    let sota = join_estimate_ctx(rule, &ectx).final_estimate;
    let bdg = bdg_estimate_ctx(rule, &ectx).ok().map(|b| b.total);

    let conclude = |marker, branch, lpopt_sota, out: &mut DecideOutcome| {
        out.decisions.push(Decision {
            rule_id: rule.id,
            marker,
            branch,
            measures,
            estimates: Estimates { sota, bdg, lpopt_sota },
        });
        out.rules.push(rule.clone());
    };

    if !matches!(rule.head_kind, HeadKind::Normal | HeadKind::Constraint) {
        debug_assert!(bdg.is_none(), "guessing heads are not estimable");
        conclude(Marker::Sota, Branch::ForcedSota, None, out);
        return;
    }
    if class.is_stratified {
        conclude(Marker::Sota, Branch::Stratified, None, out);
        return;
    }

    let mut lpopt_sota = None;
    if phi < measures.num_vars {
        let result = lpopt_rewrite(rule, &td, ctx.gen);
        if result.applicable() {
            let extended = extend_overlay(overlay, &result, rule, &ectx);
            let extended_ctx = extended.ctx(ctx.analysis);
            let total: f64 = result
                .new_rules
                .iter()
                .map(|r| join_estimate_ctx(r, &extended_ctx).final_estimate)
                .sum();
            lpopt_sota = Some(total);
            if total < sota {
                out.rewrites.push(RewriteRecord {
                    original: rule.clone(),
                    decision: Decision {
                        rule_id: rule.id,
                        marker: Marker::Sota,
                        branch: Branch::LpoptRecursed,
                        measures,
                        estimates: Estimates { sota, bdg, lpopt_sota },
                    },
                    new_rule_ids: result.new_rules.iter().map(|r| r.id).collect(),
                    fresh_predicates: result.fresh_predicates.clone(),
                });
                for new_rule in &result.new_rules {
                    decide_rec(new_rule, ctx, &extended, out);
                }
                return;
            }
        }
    }

    let a = measures.max_arity;
    let smaller = bdg.is_some_and(|b| b < sota);
    if a < phi && class.is_constraint && smaller {
        conclude(Marker::Bdg, Branch::BdgConstraint, lpopt_sota, out);
    } else if 2 * a < phi && class.is_tight && smaller {
        conclude(Marker::Bdg, Branch::BdgTight, lpopt_sota, out);
    } else if 3 * a < phi && class.is_hcf && smaller {
        conclude(Marker::Bdg, Branch::BdgHcf, lpopt_sota, out);
    } else {
        conclude(Marker::Sota, Branch::DefaultSota, lpopt_sota, out);
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct PartitionOptions {
    pub td: TdConfig,
}

/// The split: rules to decouple, rules (and all facts) to ground
/// bottom-up, one decision per final rule, and rewrite provenance.
#[derive(Debug, Clone, Default)]
pub struct Partition {
    pub pi_h: Vec<Rule>,
    pub pi_g: Vec<Rule>,
    pub report: Vec<Decision>,
    pub rewrites: Vec<RewriteRecord>,
}

/// Decide every rule of a program. Rules are visited stratum by stratum
/// (topological order of their head SCCs, then the headless rules), so
/// the report reads in evaluation order; facts go straight to `pi_g`.
pub fn partition(program: &Program, options: &PartitionOptions) -> Partition {
    let mut working: Vec<Rule> = program.rules.clone();
    let next_id = working.iter().map(|r| r.id + 1).max().unwrap_or(0);
    working.extend(program.facts.iter().enumerate().map(|(offset, fact)| Rule {
        id: next_id + offset,
        head: vec![fact.clone()],
        head_kind: HeadKind::Normal,
        body_pos: Vec::new(),
        body_neg: Vec::new(),
        body_cmp: Vec::new(),
        weak: None,
    }));

    let analysis = analyze(&Program { rules: working.clone(), facts: Vec::new() });
    let gen = FreshGen::for_rules(&working);
    let ctx = DecideCtx { analysis: &analysis, td: options.td, gen: &gen };

    let mut ordered: Vec<&Rule> = analysis.rules.iter().collect();
    ordered.sort_by_key(|r| {
        let stratum =
            r.head.iter().filter_map(|h| analysis.scc.scc_of.get(&h.predicate)).min();
        (stratum.is_none(), stratum.copied(), r.id)
    });

    let mut partition = Partition::default();
    partition.pi_g.extend(working.iter().filter(|r| r.is_fact()).cloned());
    for rule in ordered {
        let outcome = decide(rule, &ctx);
        for (decision, final_rule) in outcome.decisions.iter().zip(&outcome.rules) {
            match decision.marker {
                Marker::Bdg => partition.pi_h.push(final_rule.clone()),
                Marker::Sota => partition.pi_g.push(final_rule.clone()),
            }
        }
        partition.report.extend(outcome.decisions);
        partition.rewrites.extend(outcome.rewrites);
    }
    partition
}
