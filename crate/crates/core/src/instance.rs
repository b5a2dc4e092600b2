//! Random graph instances for benchmarking rules at different densities.
//!
//! Edges are sampled without replacement by shuffling the full candidate
//! pair list with a ChaCha8 generator keyed on the seed, then taking a
//! prefix. ChaCha8 is specified (not just "the default RNG") so the same
//! (n, density, seed) triple reproduces byte-identically on any platform;
//! the seed is also stored in the instance itself as a `seed/1` fact. A
//! consequence of prefix sampling: at a fixed seed, the edge set at a
//! lower density is a subset of the edge set at any higher density.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::ast::{Const, Literal, Program, Rule, Term};

/// Edge layout of a generated instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topology {
    /// Seed-keyed sample of the candidate pairs at the requested density.
    Random,
    /// The directed path 1→2→…→n; density and seed do not affect edges.
    Path,
}

#[derive(Debug, Clone)]
pub struct GenConfig {
    pub n: usize,
    /// Percentage of all candidate pairs, 0–100.
    pub density: f64,
    pub seed: u64,
    pub directed: bool,
    pub topology: Topology,
    /// Predicate name for edge facts.
    pub pred: String,
    /// Also emit `node/1` facts for every vertex.
    pub with_nodes: bool,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            n: 0,
            density: 100.0,
            seed: 0,
            directed: true,
            topology: Topology::Random,
            pred: "e".into(),
            with_nodes: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GraphInstance {
    pub n: usize,
    pub density: f64,
    pub seed: u64,
    pub directed: bool,
    pub facts: Vec<Literal>,
}

impl GraphInstance {
    /// One fact per line, parseable by `parse_program`.
    pub fn to_text(&self) -> String {
        self.facts.iter().map(|f| format!("{f}.\n")).collect()
    }

    pub fn to_program(&self) -> Program {
        Program { rules: Vec::new(), facts: self.facts.clone() }
    }

    pub fn edge_count(&self) -> usize {
        self.facts.iter().filter(|f| f.arity() == 2).count()
    }

    /// True when every vertex occurs both as a source and as a target of
    /// some edge fact, so each positional domain is the full vertex set.
    pub fn spans_all_positions(&self) -> bool {
        let mut seen = vec![(false, false); self.n + 1];
        for f in self.facts.iter().filter(|f| f.arity() == 2) {
            if let [Term::Const(Const::Int(a)), Term::Const(Const::Int(b))] = &f.args[..] {
                seen[*a as usize].0 = true;
                seen[*b as usize].1 = true;
                if !self.directed {
                    seen[*a as usize].1 = true;
                    seen[*b as usize].0 = true;
                }
            }
        }
        seen[1..].iter().all(|&(src, dst)| src && dst)
    }
}

fn atom1(pred: &str, a: i64) -> Literal {
    Literal::new(pred, vec![Term::Const(Const::Int(a))])
}

fn atom2(pred: &str, a: i64, b: i64) -> Literal {
    Literal::new(pred, vec![Term::Const(Const::Int(a)), Term::Const(Const::Int(b))])
}

/// Generate a graph instance. Vertices are 1..=n. Facts come out as the
/// `seed/1` fact, then `node/1` facts when requested, then sorted edge
/// facts.
pub fn generate(cfg: &GenConfig) -> GraphInstance {
    let n = cfg.n as i64;
    let mut pairs: Vec<(i64, i64)> = match cfg.topology {
        Topology::Path => (1..n).map(|i| (i, i + 1)).collect(),
        Topology::Random => {
            let mut candidates: Vec<(i64, i64)> = (1..=n)
                .flat_map(|i| (1..=n).map(move |j| (i, j)))
                .filter(|&(i, j)| if cfg.directed { i != j } else { i < j })
                .collect();
            let total = (cfg.n * cfg.n.saturating_sub(1)) as f64;
            let share = if cfg.directed { total } else { total / 2.0 };
            let k = (cfg.density / 100.0 * share).round() as usize;
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            candidates.shuffle(&mut rng);
            candidates.truncate(k);
            candidates
        }
    };
    pairs.sort_unstable();

    let mut facts = vec![atom1("seed", cfg.seed as i64)];
    if cfg.with_nodes {
        facts.extend((1..=n).map(|i| atom1("node", i)));
    }
    facts.extend(pairs.into_iter().map(|(i, j)| atom2(&cfg.pred, i, j)));
    GraphInstance {
        n: cfg.n,
        density: cfg.density,
        seed: cfg.seed,
        directed: cfg.directed,
        facts,
    }
}

/// A rule set plus a generated instance as one program, with fresh rule
/// ids continuing after the rule set's.
pub fn combine(rules: &[Rule], instance: &GraphInstance) -> Program {
    let mut rules = rules.to_vec();
    let next = rules.iter().map(|r| r.id + 1).max().unwrap_or(0);
    for (offset, fact) in instance.facts.iter().enumerate() {
        rules.push(Rule {
            id: next + offset,
            head: vec![fact.clone()],
            head_kind: crate::ast::HeadKind::Normal,
            body_pos: Vec::new(),
            body_neg: Vec::new(),
            body_cmp: Vec::new(),
            weak: None,
        });
    }
    Program { rules, facts: Vec::new() }
}
