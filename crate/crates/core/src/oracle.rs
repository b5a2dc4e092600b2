//! Reference semantics at desk scale: a naive grounder, a bottom-up
//! grounder with candidate sets and stratified full evaluation, and a
//! brute-force answer-set enumerator via the Gelfond–Lifschitz reduct.
//!
//! Nothing here is meant to be fast; it is meant to be obviously faithful
//! to the definitions, so estimator and rewriter output can be checked
//! against ground truth on small instances.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::collections::HashMap;
use std::collections::HashSet;

use thiserror::Error;

use crate::analysis::analyze;
use crate::ast::{Const, HeadKind, Literal, Program, Rule, Term, WeakAnnotation};

/// Default bound on grounding work (instantiations or join steps).
pub const DEFAULT_GROUND_CAP: u64 = 10_000_000;

/// Bound on the number of undecided atoms the answer-set enumerator will
/// branch over (2^cap interpretations).
pub const ANSWER_SET_ATOM_CAP: usize = 20;

/// Reserved prefix for the complement atoms that encode choice rules
/// during answer-set enumeration.
pub const CHOICE_COMPLEMENT_PREFIX: &str = "__c_";

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("{what} needs {amount:.0} steps, cap is {cap}")]
    CapExceeded { what: String, amount: f64, cap: u64 },
}

/// A variable-free program: instantiated rules (which keep the id of the
/// rule they came from) plus facts, with comparisons evaluated away.
#[derive(Debug, Clone, Default)]
pub struct GroundProgram {
    pub rules: Vec<Rule>,
    pub facts: Vec<Literal>,
    /// Herbrand-base subset actually occurring in facts or rules.
    pub atoms: BTreeSet<Literal>,
}

impl GroundProgram {
    fn new(rules: Vec<Rule>, facts: Vec<Literal>) -> Self {
        let mut atoms: BTreeSet<Literal> = facts.iter().cloned().collect();
        for rule in &rules {
            atoms.extend(rule.literals().cloned());
        }
        GroundProgram { rules, facts, atoms }
    }

    /// View as a `Program`, e.g. for `pretty_print`.
    pub fn to_program(&self) -> Program {
        Program { rules: self.rules.clone(), facts: self.facts.clone() }
    }
}

/// Possibly-derivable atoms `D` and its surely-derived subset `D_T`.
#[derive(Debug, Clone, Default)]
pub struct CandidateSet {
    pub possibly_true: BTreeSet<Literal>,
    pub surely_true: BTreeSet<Literal>,
}

/// Exact count of emitted non-fact rules.
pub fn count_ground_rules(ground: &GroundProgram) -> usize {
    ground.rules.iter().filter(|r| !r.is_fact()).count()
}

fn apply(term: &Term, sub: &BTreeMap<String, Const>) -> Term {
    match term {
        Term::Var(v) => Term::Const(sub[v].clone()),
        Term::Const(_) => term.clone(),
    }
}

fn ground_literal(lit: &Literal, sub: &BTreeMap<String, Const>) -> Literal {
    Literal::new(lit.predicate.clone(), lit.args.iter().map(|t| apply(t, sub)).collect())
}

/// Comparisons use the total order on constants: integers numerically and
/// before symbols, symbols lexicographically.
fn comparisons_hold(rule: &Rule, sub: &BTreeMap<String, Const>) -> bool {
    use crate::ast::CmpOp::*;
    rule.body_cmp.iter().all(|c| {
        let value = |t: &Term| match apply(t, sub) {
            Term::Const(c) => c,
            Term::Var(_) => unreachable!("safety bounds comparison variables"),
        };
        let (l, r) = (value(&c.lhs), value(&c.rhs));
        match c.op {
            Lt => l < r,
            Le => l <= r,
            Gt => l > r,
            Ge => l >= r,
            Eq => l == r,
            Ne => l != r,
        }
    })
}

fn substitute_rule(rule: &Rule, sub: &BTreeMap<String, Const>) -> Rule {
    Rule {
        id: rule.id,
        head: rule.head.iter().map(|l| ground_literal(l, sub)).collect(),
        head_kind: rule.head_kind,
        body_pos: rule.body_pos.iter().map(|l| ground_literal(l, sub)).collect(),
        body_neg: rule.body_neg.iter().map(|l| ground_literal(l, sub)).collect(),
        body_cmp: Vec::new(),
        weak: rule.weak.as_ref().map(|w| WeakAnnotation {
            terms: w.terms.iter().map(|t| apply(t, sub)).collect(),
        }),
    }
}

/// Instantiate every rule over the full domain, keeping instances whose
/// comparisons hold. The work bound is |dom|^|var(r)| per rule.
pub fn naive_ground(program: &Program, cap: u64) -> Result<GroundProgram, OracleError> {
    let a = analyze(program);
    let dom: Vec<Const> = a.domains.global_domain.iter().cloned().collect();
    let mut rules = Vec::new();
    for rule in &a.rules {
        let vars = rule.variables();
        let amount = (dom.len() as f64).powi(vars.len() as i32);
        if amount > cap as f64 {
            return Err(OracleError::CapExceeded {
                what: format!("naive instantiation of rule {}", rule.id),
                amount,
                cap,
            });
        }
        if vars.is_empty() {
            if comparisons_hold(rule, &BTreeMap::new()) {
                rules.push(substitute_rule(rule, &BTreeMap::new()));
            }
            continue;
        }
        if dom.is_empty() {
            continue;
        }
        // Odometer over assignments, last variable fastest.
        let mut idx = vec![0usize; vars.len()];
        loop {
            let sub: BTreeMap<String, Const> =
                vars.iter().zip(&idx).map(|(v, &i)| (v.clone(), dom[i].clone())).collect();
            if comparisons_hold(rule, &sub) {
                rules.push(substitute_rule(rule, &sub));
            }
            let mut place = vars.len();
            loop {
                if place == 0 {
                    break;
                }
                place -= 1;
                idx[place] += 1;
                if idx[place] < dom.len() {
                    break;
                }
                idx[place] = 0;
            }
            if idx.iter().all(|&i| i == 0) {
                break;
            }
        }
    }
    Ok(GroundProgram::new(rules, a.facts.clone()))
}

type Tuples = BTreeMap<String, BTreeSet<Vec<Const>>>;

fn insert_atom(store: &mut Tuples, lit: &Literal) -> bool {
    let tuple: Vec<Const> = lit
        .args
        .iter()
        .map(|t| match t {
            Term::Const(c) => c.clone(),
            Term::Var(_) => unreachable!("ground atoms only"),
        })
        .collect();
    store.entry(lit.predicate.clone()).or_default().insert(tuple)
}

fn contains_atom(store: &Tuples, lit: &Literal) -> bool {
    match store.get(&lit.predicate) {
        Some(tuples) => tuples.contains(
            &lit.args
                .iter()
                .map(|t| match t {
                    Term::Const(c) => c.clone(),
                    Term::Var(_) => unreachable!("ground atoms only"),
                })
                .collect::<Vec<_>>(),
        ),
        None => false,
    }
}

fn atoms_of(store: &Tuples) -> BTreeSet<Literal> {
    store
        .iter()
        .flat_map(|(pred, tuples)| {
            tuples.iter().map(|t| {
                Literal::new(pred.clone(), t.iter().cloned().map(Term::Const).collect())
            })
        })
        .collect()
}

/// All substitutions matching the positive body against `cands`, with all
/// comparisons true. Backtracking join in source order with a hash index
/// per body position; every visited tuple counts one step against `cap`.
fn join_instances(
    rule: &Rule,
    cands: &Tuples,
    steps: &mut u64,
    cap: u64,
) -> Result<Vec<BTreeMap<String, Const>>, OracleError> {
    let over = |steps: &mut u64| -> Result<(), OracleError> {
        *steps += 1;
        if *steps > cap {
            Err(OracleError::CapExceeded {
                what: format!("bottom-up join for rule {}", rule.id),
                amount: *steps as f64,
                cap,
            })
        } else {
            Ok(())
        }
    };

    // Positions bound before each literal is matched: constants plus
    // variables introduced by earlier body literals.
    let empty = BTreeSet::new();
    let mut seen: HashSet<&str> = HashSet::new();
    let mut levels: Vec<(Vec<usize>, HashMap<Vec<Const>, Vec<Vec<Const>>>)> = Vec::new();
    for lit in &rule.body_pos {
        let mask: Vec<usize> = lit
            .args
            .iter()
            .enumerate()
            .filter(|(_, t)| match t {
                Term::Const(_) => true,
                Term::Var(v) => seen.contains(v.as_str()),
            })
            .map(|(i, _)| i)
            .collect();
        seen.extend(lit.variables());
        let mut index: HashMap<Vec<Const>, Vec<Vec<Const>>> = HashMap::new();
        for tuple in cands.get(&lit.predicate).unwrap_or(&empty) {
            over(steps)?;
            let key: Vec<Const> = mask.iter().map(|&i| tuple[i].clone()).collect();
            index.entry(key).or_default().push(tuple.clone());
        }
        levels.push((mask, index));
    }

    let mut out = Vec::new();
    let mut stack: Vec<(usize, BTreeMap<String, Const>)> = vec![(0, BTreeMap::new())];
    'search: while let Some((level, sub)) = stack.pop() {
        if level == rule.body_pos.len() {
            if comparisons_hold(rule, &sub) {
                out.push(sub);
            }
            continue;
        }
        let lit = &rule.body_pos[level];
        let (mask, index) = &levels[level];
        let key: Vec<Const> = mask
            .iter()
            .map(|&i| match &lit.args[i] {
                Term::Const(c) => c.clone(),
                Term::Var(v) => sub[v].clone(),
            })
            .collect();
        let Some(tuples) = index.get(&key) else { continue 'search };
        for tuple in tuples {
            over(steps)?;
            let mut next = sub.clone();
            let mut ok = true;
            for (i, term) in lit.args.iter().enumerate() {
                if let Term::Var(v) = term {
                    match next.get(v.as_str()) {
                        Some(bound) if *bound != tuple[i] => {
                            ok = false;
                            break;
                        }
                        Some(_) => {}
                        None => {
                            next.insert(v.clone(), tuple[i].clone());
                        }
                    }
                }
            }
            if ok {
                stack.push((level + 1, next));
            }
        }
    }
    // Stack order reverses siblings; sort for a deterministic, candidate-
    // lexicographic instance order.
    out.sort();
    Ok(out)
}

/// Fixed-point grounder over candidate sets, processed SCC by SCC in
/// topological order. Rules whose head predicates are fully evaluated
/// (stratified with no choice or disjunction anywhere among ancestors)
/// emit nothing: their derived atoms become facts. All other rules emit
/// the instances whose positive bodies are possible and whose negative
/// bodies are not surely violated. Constraints and weak rules go last.
pub fn bottom_up_ground(
    program: &Program,
    cap: u64,
) -> Result<(GroundProgram, CandidateSet), OracleError> {
    let a = analyze(program);
    let mut steps: u64 = 0;

    let guessy: HashSet<&str> = a
        .rules
        .iter()
        .filter(|r| matches!(r.head_kind, HeadKind::Choice | HeadKind::Disjunctive))
        .flat_map(|r| r.head.iter().map(|h| h.predicate.as_str()))
        .collect();
    let certain = |pred: &str| -> bool {
        if !a.scc.pred_stratified(pred) {
            return false;
        }
        match a.scc.scc_of.get(pred) {
            Some(&s) => a.scc.ancestors[s]
                .iter()
                .all(|&anc| a.scc.sccs[anc].iter().all(|p| !guessy.contains(p.as_str()))),
            None => true,
        }
    };

    // Group head-bearing rules by the topologically earliest SCC among
    // their head predicates; headless rules are evaluated at the end.
    let mut scc_rules: Vec<Vec<&Rule>> = vec![Vec::new(); a.scc.sccs.len()];
    let mut tail_rules: Vec<&Rule> = Vec::new();
    for rule in &a.rules {
        let first_scc = rule.head.iter().filter_map(|h| a.scc.scc_of.get(&h.predicate)).min();
        match first_scc {
            Some(&s) => scc_rules[s].push(rule),
            None => tail_rules.push(rule),
        }
    }

    let mut d: Tuples = BTreeMap::new();
    let mut dt: Tuples = BTreeMap::new();
    for fact in &a.facts {
        insert_atom(&mut d, fact);
        insert_atom(&mut dt, fact);
    }

    for rules in &scc_rules {
        // Possible atoms: positive body possible, no negative body atom
        // already surely true.
        loop {
            let mut changed = false;
            for rule in rules {
                for sub in join_instances(rule, &d, &mut steps, cap)? {
                    if rule.body_neg.iter().any(|b| contains_atom(&dt, &ground_literal(b, &sub))) {
                        continue;
                    }
                    for h in &rule.head {
                        changed |= insert_atom(&mut d, &ground_literal(h, &sub));
                    }
                }
            }
            if !changed {
                break;
            }
        }
        // Sure atoms: positive body sure, negative body never derivable,
        // and no guessing involved in the rule itself.
        loop {
            let mut changed = false;
            for rule in rules.iter().filter(|r| r.head_kind == HeadKind::Normal) {
                for sub in join_instances(rule, &dt, &mut steps, cap)? {
                    if rule.body_neg.iter().any(|b| contains_atom(&d, &ground_literal(b, &sub))) {
                        continue;
                    }
                    changed |= insert_atom(&mut dt, &ground_literal(&rule.head[0], &sub));
                }
            }
            if !changed {
                break;
            }
        }
    }

    let mut emitted = Vec::new();
    let mut emit = |rule: &Rule, steps: &mut u64| -> Result<(), OracleError> {
        for sub in join_instances(rule, &d, steps, cap)? {
            if rule.body_neg.iter().any(|b| contains_atom(&dt, &ground_literal(b, &sub))) {
                continue;
            }
            emitted.push(substitute_rule(rule, &sub));
        }
        Ok(())
    };
    for rules in &scc_rules {
        for rule in rules {
            if rule.head.iter().all(|h| certain(&h.predicate)) {
                debug_assert!(
                    rule.head.iter().all(|h| d.get(&h.predicate) == dt.get(&h.predicate)),
                    "fully evaluated predicates are exactly decided"
                );
                continue;
            }
            emit(rule, &mut steps)?;
        }
    }
    for rule in &tail_rules {
        emit(rule, &mut steps)?;
    }

    let mut facts: BTreeSet<Literal> = a.facts.iter().cloned().collect();
    for (pred, tuples) in &dt {
        if certain(pred) {
            for t in tuples {
                facts.insert(Literal::new(
                    pred.clone(),
                    t.iter().cloned().map(Term::Const).collect(),
                ));
            }
        }
    }

    let cands = CandidateSet { possibly_true: atoms_of(&d), surely_true: atoms_of(&dt) };
    Ok((GroundProgram::new(emitted, facts.into_iter().collect()), cands))
}

fn strip_prefix_atoms(set: &BTreeSet<Literal>, prefix: &str) -> BTreeSet<Literal> {
    set.iter().filter(|l| !l.predicate.starts_with(prefix)).cloned().collect()
}

/// Project every answer set onto predicates for which `keep` holds.
pub fn project_answer_sets(
    sets: &BTreeSet<BTreeSet<Literal>>,
    keep: impl Fn(&str) -> bool,
) -> BTreeSet<BTreeSet<Literal>> {
    sets.iter()
        .map(|s| s.iter().filter(|l| keep(&l.predicate)).cloned().collect())
        .collect()
}

/// Enumerate the answer sets of a ground program by checking every
/// interpretation against the GL reduct. Choice rules are expanded into
/// the usual pair of rules over a fresh `__c_` complement atom first, and
/// `__c_` atoms are projected away from the result. Interpretations only
/// vary over atoms that occur in some head; everything else is false in
/// every answer set, so the 2^20 enumeration cap applies to head atoms.
pub fn answer_sets_bruteforce(
    ground: &GroundProgram,
) -> Result<BTreeSet<BTreeSet<Literal>>, OracleError> {
    let mut rules: Vec<(Vec<Literal>, Vec<Literal>, Vec<Literal>)> = Vec::new();
    for fact in &ground.facts {
        rules.push((vec![fact.clone()], Vec::new(), Vec::new()));
    }
    for rule in &ground.rules {
        debug_assert!(rule.body_cmp.is_empty(), "ground programs carry no comparisons");
        match rule.head_kind {
            HeadKind::Weak => continue,
            HeadKind::Choice => {
                let atom = rule.head[0].clone();
                let complement = Literal::new(
                    format!("{CHOICE_COMPLEMENT_PREFIX}{}", atom.predicate),
                    atom.args.clone(),
                );
                let mut neg_a = rule.body_neg.clone();
                neg_a.push(complement.clone());
                rules.push((vec![atom.clone()], rule.body_pos.clone(), neg_a));
                let mut neg_c = rule.body_neg.clone();
                neg_c.push(atom);
                rules.push((vec![complement], rule.body_pos.clone(), neg_c));
            }
            HeadKind::Normal | HeadKind::Disjunctive | HeadKind::Constraint => {
                rules.push((rule.head.clone(), rule.body_pos.clone(), rule.body_neg.clone()));
            }
        }
    }

    let facts: BTreeSet<Literal> = ground.facts.iter().cloned().collect();
    let candidates: Vec<Literal> = rules
        .iter()
        .flat_map(|(head, _, _)| head.iter().cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .filter(|a| !facts.contains(a))
        .collect();
    if candidates.len() > ANSWER_SET_ATOM_CAP {
        return Err(OracleError::CapExceeded {
            what: format!("answer-set enumeration over {} undecided atoms", candidates.len()),
            amount: 2f64.powi(candidates.len() as i32),
            cap: 1 << ANSWER_SET_ATOM_CAP,
        });
    }

    let is_model = |interp: &BTreeSet<Literal>,
                    reduct: &[(&Vec<Literal>, &Vec<Literal>)]|
     -> bool {
        reduct.iter().all(|(head, pos)| {
            !pos.iter().all(|b| interp.contains(b)) || head.iter().any(|h| interp.contains(h))
        })
    };

    let mut result = BTreeSet::new();
    for mask in 0u64..(1 << candidates.len()) {
        let mut interp: BTreeSet<Literal> = facts.clone();
        for (i, atom) in candidates.iter().enumerate() {
            if mask & (1 << i) != 0 {
                interp.insert(atom.clone());
            }
        }
        let reduct: Vec<(&Vec<Literal>, &Vec<Literal>)> = rules
            .iter()
            .filter(|(_, _, neg)| !neg.iter().any(|b| interp.contains(b)))
            .map(|(head, pos, _)| (head, pos))
            .collect();
        if !is_model(&interp, &reduct) {
            continue;
        }
        // Minimality: no proper subset (facts always stay, as bodyless
        // rules force them) may model the reduct.
        let chosen: Vec<usize> =
            (0..candidates.len()).filter(|i| mask & (1 << i) != 0).collect();
        let mut minimal = true;
        let full = (1u64 << chosen.len()) - 1;
        for sub in 0..full {
            let mut j: BTreeSet<Literal> = facts.clone();
            for (bit, &i) in chosen.iter().enumerate() {
                if sub & (1 << bit) != 0 {
                    j.insert(candidates[i].clone());
                }
            }
            if is_model(&j, &reduct) {
                minimal = false;
                break;
            }
        }
        if minimal {
            result.insert(strip_prefix_atoms(&interp, CHOICE_COMPLEMENT_PREFIX));
        }
    }
    Ok(result)
}
