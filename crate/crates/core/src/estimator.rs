//! Per-rule grounding-size estimates: the bottom-up join estimate and the
//! body-decoupled estimate.
//!
//! The join estimate folds the positive body left to right the way a
//! bottom-up grounder would materialize it: the running relation size is
//! multiplied by the next literal's tuple estimate and divided by the domain
//! size of every variable the two sides share, then comparison builtins
//! scale the result by a textbook selectivity factor. The body-decoupled
//! estimate instead sums closed-form term counts for the guess, saturation,
//! and foundedness parts of the decoupled encoding; its value depends only
//! on domain sizes, never on how many tuples an instance actually has.

use std::collections::BTreeSet;
use std::collections::HashSet;

use serde::Serialize;

use crate::analysis::DomainTable;
use crate::ast::{Const, HeadKind, Rule, Term};

/// Read access to the domain information an estimate needs. Implemented by
/// [`DomainTable`] directly and by overlay contexts that add fresh
/// predicates (rewritten rules) on top of a base table.
pub trait DomainView {
    /// Estimated tuple count of a predicate (0 when nothing is derivable).
    fn pred_estimate(&self, pred: &str) -> f64;
    /// `dom(X, r)`: union of positional domains at the variable's positive
    /// body occurrences.
    fn var_domain_set(&self, rule: &Rule, var: &str) -> BTreeSet<Const>;
}

/// Domain of a term: the variable's per-rule domain, or the constant itself.
fn term_domain(view: &dyn DomainView, rule: &Rule, term: &Term) -> BTreeSet<Const> {
    match term {
        Term::Var(v) => view.var_domain_set(rule, v),
        Term::Const(c) => BTreeSet::from([c.clone()]),
    }
}

/// `|dom(X)|` with constants counting as 1.
fn term_domain_size(view: &dyn DomainView, rule: &Rule, term: &Term) -> f64 {
    match term {
        Term::Var(v) => view.var_domain_set(rule, v).len() as f64,
        Term::Const(_) => 1.0,
    }
}

/// Product of `|dom(X)|` over one literal's argument vector.
fn literal_domain_product(view: &dyn DomainView, rule: &Rule, lit: &crate::ast::Literal) -> f64 {
    lit.args.iter().map(|t| term_domain_size(view, rule, t)).product()
}

/// Join estimate for a bottom-up grounding of one rule.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JoinEstimate {
    pub rule_id: usize,
    /// One entry per positive body literal: the literal's text and the
    /// running relation-size estimate after joining it.
    pub per_step: Vec<(String, f64)>,
    /// Selectivity factor applied for each comparison builtin.
    pub selectivity_applied: Vec<(String, f64)>,
    /// Final estimate after all joins and selectivities.
    pub final_estimate: f64,
}

/// Fold the positive body in source order, then apply comparison
/// selectivities. A rule without positive body literals counts as a single
/// ground instance (estimate 1) before selectivities.
pub(crate) fn join_core(rule: &Rule, view: &dyn DomainView) -> JoinEstimate {
    let mut per_step = Vec::with_capacity(rule.body_pos.len());
    let mut seen_vars: HashSet<&str> = HashSet::new();
    let mut estimate: Option<f64> = None;
    for lit in &rule.body_pos {
        let tuples = view.pred_estimate(&lit.predicate);
        estimate = Some(match estimate {
            None => tuples,
            Some(current) => {
                // Distinct variables shared with the relation built so far;
                // repeats inside one literal add no extra division.
                let shared: BTreeSet<&str> =
                    lit.variables().filter(|v| seen_vars.contains(v)).collect();
                let denom: f64 = shared
                    .iter()
                    .map(|v| view.var_domain_set(rule, v).len() as f64)
                    .product();
                if denom == 0.0 {
                    0.0
                } else {
                    current * tuples / denom
                }
            }
        });
        seen_vars.extend(lit.variables());
        per_step.push((lit.to_string(), estimate.unwrap()));
    }
    let mut final_estimate = estimate.unwrap_or(1.0);
    let mut selectivity_applied = Vec::with_capacity(rule.body_cmp.len());
    for cmp in &rule.body_cmp {
        let factor = selectivity(view, rule, cmp);
        final_estimate *= factor;
        selectivity_applied.push((cmp.to_string(), factor));
    }
    JoinEstimate {
        rule_id: rule.id,
        per_step,
        selectivity_applied,
        final_estimate: final_estimate.max(0.0),
    }
}

/// Textbook selectivity of one comparison builtin: orderings halve the
/// result, equality keeps one value of the operands' combined domain,
/// inequality keeps the rest.
fn selectivity(view: &dyn DomainView, rule: &Rule, cmp: &crate::ast::Comparison) -> f64 {
    use crate::ast::CmpOp::*;
    match cmp.op {
        Lt | Le | Gt | Ge => 0.5,
        Eq | Ne => {
            let mut dom = term_domain(view, rule, &cmp.lhs);
            dom.extend(term_domain(view, rule, &cmp.rhs));
            let size = dom.len().max(1) as f64;
            if cmp.op == Eq {
                1.0 / size
            } else {
                1.0 - 1.0 / size
            }
        }
    }
}

/// Estimate the number of ground rules a bottom-up grounding of `rule`
/// produces, using the inferred domain table.
pub fn join_estimate(rule: &Rule, domains: &DomainTable) -> JoinEstimate {
    join_core(rule, domains)
}

/// Join estimate against an overlay context (rewritten rules with fresh
/// predicates).
pub fn join_estimate_ctx(rule: &Rule, ctx: &EstimationCtx<'_>) -> JoinEstimate {
    join_core(rule, ctx)
}

/// Body-decoupled estimate, broken into its term group contributions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BdgEstimate {
    pub rule_id: usize,
    /// Guess part: two rules per head-atom instantiation.
    pub g: f64,
    /// Saturation part 1: variable-wise saturation atoms.
    pub s1: f64,
    /// Saturation part 2: the two fixed saturation rules.
    pub s2: f64,
    /// Saturation part 3: one check atom per literal instantiation.
    pub s3: f64,
    /// Foundedness part 1: one atom per head instantiation.
    pub f1: f64,
    /// Foundedness part 2: per head atom, each outside variable against the
    /// head's own instantiations.
    pub f2: f64,
    /// Foundedness part 3: per head atom, each other literal joined with the
    /// head's instantiations.
    pub f3: f64,
    /// Sum of all parts.
    pub total: f64,
}

/// Rules the body-decoupled encoding does not take.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EstimateError {
    #[error("rule {rule_id} has a {what} head, which the body-decoupled encoding does not cover")]
    NotEstimable { rule_id: usize, what: &'static str },
}

/// Body-decoupled grounding-size estimate for a normal rule or constraint.
///
/// All `|dom(X)|` factors are per-rule variable domains; constants count
/// as 1. Constraints have no head, so every head-dependent part is 0.
pub fn bdg_estimate(rule: &Rule, domains: &DomainTable) -> Result<BdgEstimate, EstimateError> {
    bdg_core(rule, domains)
}

/// Body-decoupled estimate against an overlay context.
pub fn bdg_estimate_ctx(
    rule: &Rule,
    ctx: &EstimationCtx<'_>,
) -> Result<BdgEstimate, EstimateError> {
    bdg_core(rule, ctx)
}

pub(crate) fn bdg_core(rule: &Rule, view: &dyn DomainView) -> Result<BdgEstimate, EstimateError> {
    let what = match rule.head_kind {
        HeadKind::Choice => Some("choice"),
        HeadKind::Disjunctive => Some("disjunctive"),
        HeadKind::Weak => Some("weak-constraint"),
        HeadKind::Normal | HeadKind::Constraint => None,
    };
    if let Some(what) = what {
        return Err(EstimateError::NotEstimable { rule_id: rule.id, what });
    }

    let vars = rule.variables();
    let var_size =
        |v: &String| view.var_domain_set(rule, v).len() as f64;

    let head_products: Vec<f64> =
        rule.head.iter().map(|h| literal_domain_product(view, rule, h)).collect();

    let g = 2.0 * head_products.iter().sum::<f64>();
    let s1 = 2.0 * vars.iter().map(var_size).sum::<f64>();
    let s2 = 2.0;
    let s3: f64 = rule.literals().map(|lit| literal_domain_product(view, rule, lit)).sum();
    let f1 = head_products.iter().sum::<f64>();
    let mut f2 = 0.0;
    let mut f3 = 0.0;
    // Head literals occupy the first positions of `literals()`, so head
    // index hi identifies "every other literal" by position.
    for (hi, (h, h_product)) in rule.head.iter().zip(&head_products).enumerate() {
        let head_vars: HashSet<&str> = h.variables().collect();
        f2 += vars
            .iter()
            .filter(|v| !head_vars.contains(v.as_str()))
            .map(var_size)
            .sum::<f64>()
            * h_product;
        f3 += rule
            .literals()
            .enumerate()
            .filter(|(i, _)| *i != hi)
            .map(|(_, lit)| literal_domain_product(view, rule, lit))
            .sum::<f64>()
            * h_product;
    }
    let total = g + s1 + s2 + s3 + f1 + f2 + f3;
    Ok(BdgEstimate { rule_id: rule.id, g, s1, s2, s3, f1, f2, f3, total })
}

/// Overlay on a base [`DomainTable`]: positional domains and tuple estimates
/// for fresh predicates introduced by rewriting. Lookups fall back to the
/// base table for everything else.
pub struct EstimationCtx<'a> {
    pub base: &'a DomainTable,
    pub extra_pos: std::collections::BTreeMap<(String, usize), BTreeSet<Const>>,
    pub extra_est: std::collections::BTreeMap<String, f64>,
}

impl<'a> EstimationCtx<'a> {
    pub fn new(base: &'a DomainTable) -> Self {
        EstimationCtx {
            base,
            extra_pos: std::collections::BTreeMap::new(),
            extra_est: std::collections::BTreeMap::new(),
        }
    }

    fn pos_domain_set(&self, pred: &str, j: usize) -> Option<BTreeSet<Const>> {
        if let Some(dom) = self.extra_pos.get(&(pred.to_string(), j)) {
            return Some(dom.clone());
        }
        self.base.pos_domain_set(pred, j).cloned()
    }
}

impl DomainView for EstimationCtx<'_> {
    fn pred_estimate(&self, pred: &str) -> f64 {
        if let Some(e) = self.extra_est.get(pred) {
            return *e;
        }
        self.base.pred_estimate(pred)
    }

    fn var_domain_set(&self, rule: &Rule, var: &str) -> BTreeSet<Const> {
        if self.extra_pos.is_empty() {
            if let Some(stored) = self.base.stored_var_domain(rule.id, var) {
                return stored.clone();
            }
        }
        crate::analysis::var_domain_union(rule, var, &|pred, j| self.pos_domain_set(pred, j))
    }
}

/// One measurement of a rule over one generated instance.
#[derive(Debug, Clone, Serialize)]
pub struct ProfileRow {
    pub n: usize,
    pub density: f64,
    pub sota: f64,
    /// Absent when the rule is not body-decouplable.
    pub bdg: Option<f64>,
    /// Ground-truth bottom-up instance count; absent above the oracle cap.
    pub actual: Option<usize>,
}

/// Measure a fixture rule across instance sizes and densities: both
/// estimates per (n, density), plus the actual bottom-up ground-rule
/// count for sizes up to `actual_cap`. The BDG estimate depends only on
/// domains, so it is constant across densities as long as the sampled
/// instance covers every vertex.
pub fn density_profile(
    fixture: &[Rule],
    target: usize,
    sizes: &[usize],
    densities: &[f64],
    template: &crate::instance::GenConfig,
    actual_cap: usize,
    ground_cap: u64,
) -> Result<Vec<ProfileRow>, crate::oracle::OracleError> {
    let mut rows = Vec::new();
    for &n in sizes {
        for &density in densities {
            let instance = crate::instance::generate(&crate::instance::GenConfig {
                n,
                density,
                ..template.clone()
            });
            let program = crate::instance::combine(fixture, &instance);
            let a = crate::analysis::analyze(&program);
            let rule = a
                .rules
                .iter()
                .find(|r| r.id == target)
                .expect("target rule id exists in the fixture");
            let sota = join_estimate(rule, &a.domains).final_estimate;
            let bdg = bdg_estimate(rule, &a.domains).ok().map(|b| b.total);
            let actual = if n <= actual_cap {
                let (ground, _) = crate::oracle::bottom_up_ground(&program, ground_cap)?;
                Some(ground.rules.iter().filter(|r| r.id == target).count())
            } else {
                None
            };
            rows.push(ProfileRow { n, density, sota, bdg, actual });
        }
    }
    Ok(rows)
}

fn csv_number(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x:.2}")
    }
}

/// Render profile rows as CSV; absent values become empty cells.
pub fn profile_csv(rows: &[ProfileRow]) -> String {
    let mut out = String::from("n,density,sota_estimate,bdg_estimate,actual_sota\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.n,
            csv_number(r.density),
            format_args!("{:.2}", r.sota),
            r.bdg.map(|b| format!("{b:.2}")).unwrap_or_default(),
            r.actual.map(|a| a.to_string()).unwrap_or_default(),
        ));
    }
    out
}
