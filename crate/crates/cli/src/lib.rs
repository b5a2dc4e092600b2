//! Command implementations behind the `groundsplit` binary.
//!
//! Each command is a function from parsed inputs and options to strings
//! or written files, so the same code paths drive the binary and the
//! integration tests. Errors carry the process exit code: 2 for
//! malformed input, 3 for well-formed but unsupported constructs, 4 for
//! a blown grounding cap, 1 for everything else.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use groundsplit_core::analysis::analyze;
use groundsplit_core::ast::{parse_program, pretty_print, ParseError, Program, Rule};
use groundsplit_core::estimator::{density_profile, profile_csv};
use groundsplit_core::heuristics::{
    partition, Branch, Estimates, Marker, Measures, Partition, PartitionOptions,
};
use groundsplit_core::instance::{generate, GenConfig};
use groundsplit_core::oracle::{
    bottom_up_ground, count_ground_rules, naive_ground, GroundProgram, OracleError,
};
use groundsplit_core::treedecomp::TdConfig;

/// Report format version; bump on breaking schema changes.
pub const REPORT_SCHEMA: u32 = 1;

/// Options shared by every subcommand.
#[derive(Debug, Clone)]
pub struct Options {
    pub td: TdConfig,
    pub ground_cap: u64,
    pub csv: bool,
    pub output: Option<PathBuf>,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            td: TdConfig::default(),
            ground_cap: groundsplit_core::oracle::DEFAULT_GROUND_CAP,
            csv: false,
            output: None,
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Parse { path: PathBuf, err: ParseError },
    Cap(OracleError),
    Io { path: PathBuf, err: std::io::Error },
    BadArgs(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse { err, .. } if err.is_unsupported() => 3,
            CliError::Parse { .. } | CliError::BadArgs(_) => 2,
            CliError::Cap(_) => 4,
            CliError::Io { .. } => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse { path, err } => write!(f, "{}: {err}", path.display()),
            CliError::Cap(err) => write!(f, "{err}"),
            CliError::Io { path, err } => write!(f, "{}: {err}", path.display()),
            CliError::BadArgs(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<OracleError> for CliError {
    fn from(err: OracleError) -> Self {
        CliError::Cap(err)
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|err| CliError::Io { path: path.to_owned(), err })
}

fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    fs::write(path, content).map_err(|err| CliError::Io { path: path.to_owned(), err })
}

/// Read and parse one or more program files; multiple files are
/// concatenated in argument order before parsing, so rule ids number the
/// combined program. Returns the combined text alongside the program.
pub fn load_program(paths: &[PathBuf]) -> Result<(String, Program), CliError> {
    if paths.is_empty() {
        return Err(CliError::BadArgs("no input files given".into()));
    }
    let mut text = String::new();
    for path in paths {
        text.push_str(&read_file(path)?);
        if !text.ends_with('\n') {
            text.push('\n');
        }
    }
    let program =
        parse_program(&text).map_err(|err| CliError::Parse { path: paths[0].clone(), err })?;
    Ok((text, program))
}

// ---------------------------------------------------------------------------
// Decision report document
// ---------------------------------------------------------------------------

/// One final rule with its decision; `rewritten_from` points at the
/// top-level rule it descends from, if any.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleRecord {
    pub rule_id: usize,
    pub rule: String,
    pub marker: Marker,
    pub branch: Branch,
    pub measures: Measures,
    pub estimates: Estimates,
    pub rewritten_from: Option<usize>,
}

/// One structural rewrite: the rule it replaced and the rules that took
/// its place.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewriteEntry {
    pub original_rule_id: usize,
    pub original_rule: String,
    pub measures: Measures,
    pub estimates: Estimates,
    pub new_rule_ids: Vec<usize>,
    pub fresh_predicates: Vec<(String, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub rules_total: usize,
    pub facts: usize,
    pub bdg_rules: usize,
    pub sota_rules: usize,
    pub branches: BTreeMap<String, usize>,
    /// Sum of decoupled estimates over rules marked bdg.
    pub bdg_estimate_total: f64,
    /// Sum of join estimates over rules marked sota.
    pub sota_estimate_total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionReportDocument {
    pub schema: u32,
    pub tool_version: String,
    pub input_digest: String,
    pub records: Vec<RuleRecord>,
    pub rewrites: Vec<RewriteEntry>,
    pub summary: Summary,
}

fn branch_name(branch: Branch) -> String {
    match serde_json::to_value(branch).expect("branch serializes") {
        serde_json::Value::String(s) => s,
        other => unreachable!("branch serialized to {other}"),
    }
}

/// Map each rewritten rule id to the top-level rule it descends from,
/// following chains through intermediate rewrites.
fn rewrite_roots(partition: &Partition) -> BTreeMap<usize, usize> {
    let mut parent: BTreeMap<usize, usize> = BTreeMap::new();
    for rw in &partition.rewrites {
        for id in &rw.new_rule_ids {
            parent.insert(*id, rw.decision.rule_id);
        }
    }
    parent
        .keys()
        .map(|&id| {
            let mut root = parent[&id];
            while let Some(&up) = parent.get(&root) {
                root = up;
            }
            (id, root)
        })
        .collect()
}

/// Assemble the JSON report for a partitioned program. The digest is the
/// SHA-256 of the exact input text that was parsed.
pub fn report_document(input_text: &str, partition: &Partition) -> DecisionReportDocument {
    let digest = Sha256::digest(input_text.as_bytes());
    let rule_by_id: BTreeMap<usize, &Rule> =
        partition.pi_h.iter().chain(&partition.pi_g).map(|r| (r.id, r)).collect();
    let roots = rewrite_roots(partition);

    let records: Vec<RuleRecord> = partition
        .report
        .iter()
        .map(|d| RuleRecord {
            rule_id: d.rule_id,
            rule: rule_by_id[&d.rule_id].to_string(),
            marker: d.marker,
            branch: d.branch,
            measures: d.measures,
            estimates: d.estimates,
            rewritten_from: roots.get(&d.rule_id).copied(),
        })
        .collect();

    let rewrites: Vec<RewriteEntry> = partition
        .rewrites
        .iter()
        .map(|rw| RewriteEntry {
            original_rule_id: rw.decision.rule_id,
            original_rule: rw.original.to_string(),
            measures: rw.decision.measures,
            estimates: rw.decision.estimates,
            new_rule_ids: rw.new_rule_ids.clone(),
            fresh_predicates: rw.fresh_predicates.clone(),
        })
        .collect();

    let mut branches: BTreeMap<String, usize> = BTreeMap::new();
    for d in &partition.report {
        *branches.entry(branch_name(d.branch)).or_default() += 1;
    }
    let bdg_records = || records.iter().filter(|r| r.marker == Marker::Bdg);
    let sota_records = || records.iter().filter(|r| r.marker == Marker::Sota);
    let summary = Summary {
        rules_total: records.len(),
        facts: partition.pi_g.iter().filter(|r| r.is_fact()).count(),
        bdg_rules: bdg_records().count(),
        sota_rules: sota_records().count(),
        branches,
        bdg_estimate_total: bdg_records().filter_map(|r| r.estimates.bdg).sum(),
        sota_estimate_total: sota_records().map(|r| r.estimates.sota).sum(),
    };

    DecisionReportDocument {
        schema: REPORT_SCHEMA,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        input_digest: format!("sha256:{digest:x}"),
        records,
        rewrites,
        summary,
    }
}

/// Render the final program with a `%!marker:` comment line before every
/// rule and a `%!from:` line on rules created by rewriting. Facts come
/// first, unmarked. The output re-parses: annotations are comments.
pub fn annotated_text(partition: &Partition) -> String {
    let rule_by_id: BTreeMap<usize, &Rule> =
        partition.pi_h.iter().chain(&partition.pi_g).map(|r| (r.id, r)).collect();
    let roots = rewrite_roots(partition);

    let mut out = String::new();
    let mut facts: Vec<&Rule> =
        partition.pi_g.iter().filter(|r| r.is_fact()).collect();
    facts.sort_by_key(|r| r.id);
    for fact in &facts {
        out.push_str(&format!("{fact}\n"));
    }
    for decision in &partition.report {
        if !out.is_empty() {
            out.push('\n');
        }
        out.push_str(&format!("%!marker: {}\n", decision.marker));
        if let Some(root) = roots.get(&decision.rule_id) {
            out.push_str(&format!("%!from: {root}\n"));
        }
        out.push_str(&format!("{}\n", rule_by_id[&decision.rule_id]));
    }
    out
}

/// What `split` wrote and a one-line summary of the markers.
#[derive(Debug, Clone)]
pub struct SplitOutcome {
    pub annotated_path: PathBuf,
    pub report_path: PathBuf,
    pub bdg_rules: usize,
    pub sota_rules: usize,
}

fn with_suffix(base: &Path, suffix: &str) -> PathBuf {
    let mut name = base.as_os_str().to_owned();
    name.push(suffix);
    PathBuf::from(name)
}

/// Partition a program and write `<base>.annotated.lp` and
/// `<base>.report.json`, where `<base>` is `--output` or the first input.
pub fn run_split(paths: &[PathBuf], opts: &Options) -> Result<SplitOutcome, CliError> {
    let (text, program) = load_program(paths)?;
    let part = partition(&program, &PartitionOptions { td: opts.td });
    let document = report_document(&text, &part);

    let base = opts.output.clone().unwrap_or_else(|| paths[0].clone());
    let annotated_path = with_suffix(&base, ".annotated.lp");
    let report_path = with_suffix(&base, ".report.json");
    write_file(&annotated_path, &annotated_text(&part))?;
    let json = serde_json::to_string_pretty(&document).expect("report serializes");
    write_file(&report_path, &format!("{json}\n"))?;

    Ok(SplitOutcome {
        annotated_path,
        report_path,
        bdg_rules: document.summary.bdg_rules,
        sota_rules: document.summary.sota_rules,
    })
}

// ---------------------------------------------------------------------------
// estimate
// ---------------------------------------------------------------------------

fn fmt_bdg(bdg: Option<f64>, csv: bool) -> String {
    match bdg {
        Some(b) => format!("{b:.2}"),
        None if csv => String::new(),
        None => "-".into(),
    }
}

/// Per-rule estimate table: one row per final rule with its measures,
/// both estimates, and the decision. `csv` switches the format.
pub fn estimate_table(partition: &Partition, csv: bool) -> String {
    let rule_by_id: BTreeMap<usize, &Rule> =
        partition.pi_h.iter().chain(&partition.pi_g).map(|r| (r.id, r)).collect();
    let mut out = String::new();
    if csv {
        out.push_str("rule_id,num_vars,max_arity,phi,sota_estimate,bdg_estimate,decision,rule\n");
        for d in &partition.report {
            out.push_str(&format!(
                "{},{},{},{},{:.2},{},{},\"{}\"\n",
                d.rule_id,
                d.measures.num_vars,
                d.measures.max_arity,
                d.measures.phi,
                d.estimates.sota,
                fmt_bdg(d.estimates.bdg, true),
                d.marker.to_string().to_uppercase(),
                rule_by_id[&d.rule_id],
            ));
        }
    } else {
        out.push_str(&format!(
            "{:>4}  {:>4}  {:>5}  {:>3}  {:>14}  {:>14}  {:<8}  rule\n",
            "id", "vars", "arity", "phi", "sota_estimate", "bdg_estimate", "decision",
        ));
        for d in &partition.report {
            out.push_str(&format!(
                "{:>4}  {:>4}  {:>5}  {:>3}  {:>14.2}  {:>14}  {:<8}  {}\n",
                d.rule_id,
                d.measures.num_vars,
                d.measures.max_arity,
                d.measures.phi,
                d.estimates.sota,
                fmt_bdg(d.estimates.bdg, false),
                d.marker.to_string().to_uppercase(),
                rule_by_id[&d.rule_id],
            ));
        }
    }
    out
}

/// Partition a program and render the estimate table.
pub fn run_estimate(paths: &[PathBuf], opts: &Options) -> Result<String, CliError> {
    let (_, program) = load_program(paths)?;
    let part = partition(&program, &PartitionOptions { td: opts.td });
    Ok(estimate_table(&part, opts.csv))
}

// ---------------------------------------------------------------------------
// ground
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroundMode {
    Naive,
    BottomUp,
}

/// Ground a program with the reference grounder; returns the ground
/// program text and the emitted non-fact rule count.
pub fn run_ground(
    paths: &[PathBuf],
    mode: GroundMode,
    opts: &Options,
) -> Result<(String, usize), CliError> {
    let (_, program) = load_program(paths)?;
    let ground: GroundProgram = match mode {
        GroundMode::Naive => naive_ground(&program, opts.ground_cap)?,
        GroundMode::BottomUp => bottom_up_ground(&program, opts.ground_cap)?.0,
    };
    let count = count_ground_rules(&ground);
    Ok((pretty_print(&ground.to_program()), count))
}

// ---------------------------------------------------------------------------
// gen
// ---------------------------------------------------------------------------

fn valid_predicate(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Generate a graph instance per the config; the text parses back.
pub fn run_gen(cfg: &GenConfig) -> Result<String, CliError> {
    if cfg.n < 1 {
        return Err(CliError::BadArgs("n must be at least 1".into()));
    }
    if !(0.0..=100.0).contains(&cfg.density) {
        return Err(CliError::BadArgs(format!(
            "density must be between 0 and 100, got {}",
            cfg.density
        )));
    }
    if !valid_predicate(&cfg.pred) {
        return Err(CliError::BadArgs(format!(
            "predicate name `{}` is not a lowercase identifier",
            cfg.pred
        )));
    }
    Ok(generate(cfg).to_text())
}

// ---------------------------------------------------------------------------
// profile
// ---------------------------------------------------------------------------

/// Sweep parameters for `profile`.
#[derive(Debug, Clone)]
pub struct ProfileParams {
    /// Rule to track; defaults to the last non-fact rule of the input.
    pub rule: Option<usize>,
    pub sizes: Vec<usize>,
    pub densities: Vec<f64>,
    /// Instance template: n and density are overridden per sweep point.
    pub template: GenConfig,
    /// Largest n for which the actual bottom-up count is measured.
    pub actual_cap: usize,
}

/// Sweep instance sizes and densities over a fixture and emit the CSV of
/// estimates and actual counts for the tracked rule.
pub fn run_profile(
    paths: &[PathBuf],
    params: &ProfileParams,
    opts: &Options,
) -> Result<String, CliError> {
    let (_, program) = load_program(paths)?;
    let target = match params.rule {
        Some(id) => {
            if !program.rules.iter().any(|r| r.id == id) {
                return Err(CliError::BadArgs(format!("no rule with id {id} in the input")));
            }
            id
        }
        None => program
            .rules
            .iter()
            .rev()
            .find(|r| !r.is_fact())
            .map(|r| r.id)
            .ok_or_else(|| CliError::BadArgs("input has no rules to profile".into()))?,
    };
    if params.sizes.is_empty() || params.densities.is_empty() {
        return Err(CliError::BadArgs("sizes and densities must be non-empty".into()));
    }
    for &d in &params.densities {
        if !(0.0..=100.0).contains(&d) {
            return Err(CliError::BadArgs(format!(
                "density must be between 0 and 100, got {d}"
            )));
        }
    }
    let rows = density_profile(
        &program.rules,
        target,
        &params.sizes,
        &params.densities,
        &params.template,
        params.actual_cap,
        opts.ground_cap,
    )?;
    Ok(profile_csv(&rows))
}

// ---------------------------------------------------------------------------
// shared plumbing for the binary
// ---------------------------------------------------------------------------

/// Send command output to `--output` or standard output.
pub fn emit(content: &str, opts: &Options) -> Result<(), CliError> {
    match &opts.output {
        Some(path) => write_file(path, content),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

/// Global domain size of a program, for scripting and reports.
pub fn domain_size(program: &Program) -> usize {
    analyze(program).domains.global_domain.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use groundsplit_core::instance::Topology;

    fn complete_digraph(n: i64) -> String {
        let mut text = String::new();
        for i in 1..=n {
            for j in 1..=n {
                if i != j {
                    text.push_str(&format!("e({i},{j}).\n"));
                }
            }
        }
        text
    }

    fn triangle_with_clique(n: i64) -> String {
        format!(
            "{{g(X,Y)}} :- e(X,Y).\n:- g(X1,X2), g(X1,X3), g(X2,X3).\n{}",
            complete_digraph(n)
        )
    }

    fn partition_of(text: &str) -> Partition {
        let program = parse_program(text).unwrap();
        partition(&program, &PartitionOptions::default())
    }

    #[test]
    fn report_document_round_trips_through_json() {
        let text = triangle_with_clique(7);
        let part = partition_of(&text);
        let document = report_document(&text, &part);
        let json = serde_json::to_string(&document).unwrap();
        let back: DecisionReportDocument = serde_json::from_str(&json).unwrap();
        assert_eq!(back, document);
        assert_eq!(back.schema, REPORT_SCHEMA);
    }

    #[test]
    fn report_counts_match_the_partition() {
        let text = triangle_with_clique(7);
        let part = partition_of(&text);
        let document = report_document(&text, &part);
        let non_fact =
            part.pi_h.len() + part.pi_g.iter().filter(|r| !r.is_fact()).count();
        assert_eq!(document.records.len(), non_fact);
        assert_eq!(document.summary.rules_total, non_fact);
        assert_eq!(document.summary.facts, 42);
        assert_eq!(document.summary.bdg_rules, 1);
        assert_eq!(
            document.summary.bdg_rules + document.summary.sota_rules,
            document.records.len()
        );
        assert!(document.input_digest.starts_with("sha256:"));
        assert_eq!(document.input_digest.len(), "sha256:".len() + 64);
    }

    #[test]
    fn annotated_output_reparses_with_markers_as_comments() {
        let text = triangle_with_clique(7);
        let part = partition_of(&text);
        let annotated = annotated_text(&part);
        assert_eq!(annotated.matches("%!marker: bdg").count(), 1);
        assert_eq!(annotated.matches("%!marker: sota").count(), 1);
        let reparsed = parse_program(&annotated).unwrap();
        assert_eq!(reparsed.rules.len(), 44, "42 facts + guess + constraint");
    }

    #[test]
    fn annotated_output_links_rewritten_rules_to_their_origin() {
        let text = format!(
            "{{f(X,Y)}} :- e(X,Y).\n:- f(X1,X2), f(X2,X3), f(X3,X4).\n{}",
            complete_digraph(7)
        );
        let part = partition_of(&text);
        let annotated = annotated_text(&part);
        assert_eq!(annotated.matches("%!from: 1\n").count(), 3);
        assert!(parse_program(&annotated).is_ok());
    }

    #[test]
    fn estimate_table_prints_the_frozen_triangle_row() {
        let part = partition_of(&triangle_with_clique(4));
        let table = estimate_table(&part, false);
        let row = table.lines().find(|l| l.contains(":- g(")).unwrap();
        assert!(row.contains("27.00"), "{row}");
        assert!(row.contains("74.00"), "{row}");
        assert!(row.contains("SOTA"), "{row}");

        let csv = estimate_table(&part, true);
        assert!(csv.starts_with(
            "rule_id,num_vars,max_arity,phi,sota_estimate,bdg_estimate,decision,rule\n"
        ));
        assert!(csv.contains(",27.00,74.00,SOTA,"));
    }

    #[test]
    fn estimate_table_on_facts_only_input_is_header_only() {
        let part = partition_of("e(1,2). e(2,3).");
        let csv = estimate_table(&part, true);
        assert_eq!(csv.lines().count(), 1);
    }

    #[test]
    fn gen_rejects_bad_arguments() {
        let bad_density = GenConfig { n: 4, density: 150.0, ..GenConfig::default() };
        assert_eq!(run_gen(&bad_density).unwrap_err().exit_code(), 2);
        let bad_n = GenConfig { n: 0, ..GenConfig::default() };
        assert_eq!(run_gen(&bad_n).unwrap_err().exit_code(), 2);
        let bad_pred = GenConfig { n: 2, pred: "Edge".into(), ..GenConfig::default() };
        assert_eq!(run_gen(&bad_pred).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn gen_output_parses_back() {
        let cfg = GenConfig { n: 4, topology: Topology::Random, ..GenConfig::default() };
        let text = run_gen(&cfg).unwrap();
        let program = parse_program(&text).unwrap();
        assert_eq!(program.rules.len(), 13, "seed fact + 12 edges");
    }

    #[test]
    fn unsupported_constructs_map_to_exit_code_three() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("agg.lp");
        fs::write(&path, ":- #count { X : p(X) } > 2.\np(1).\n").unwrap();
        let err = load_program(&[path]).unwrap_err();
        assert_eq!(err.exit_code(), 3);
        assert!(err.to_string().contains("aggregate"), "{err}");
    }

    #[test]
    fn syntax_errors_map_to_exit_code_two() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("broken.lp");
        fs::write(&path, "p(1]. ").unwrap();
        assert_eq!(load_program(&[path]).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn split_writes_both_files_next_to_the_input() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("prog.lp");
        fs::write(&input, triangle_with_clique(7)).unwrap();
        let outcome = run_split(&[input.clone()], &Options::default()).unwrap();
        assert_eq!(outcome.annotated_path, dir.path().join("prog.lp.annotated.lp"));
        assert_eq!(outcome.report_path, dir.path().join("prog.lp.report.json"));
        assert_eq!((outcome.bdg_rules, outcome.sota_rules), (1, 1));
        let report: DecisionReportDocument =
            serde_json::from_str(&fs::read_to_string(&outcome.report_path).unwrap())
                .unwrap();
        assert_eq!(report.records.len(), 2);
    }

    #[test]
    fn ground_reports_the_frozen_triangle_count() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("prog.lp");
        let constraint_over_edges = format!(
            ":- g(X1,X2), g(X1,X3), g(X2,X3).\n{}",
            complete_digraph(4).replace("e(", "g(")
        );
        fs::write(&input, constraint_over_edges).unwrap();
        let (text, count) =
            run_ground(&[input.clone()], GroundMode::BottomUp, &Options::default())
                .unwrap();
        assert_eq!(count, 24);
        assert!(parse_program(&text).is_ok());

        fs::write(&input, triangle_with_clique(4)).unwrap();
        let (_, with_guesses) =
            run_ground(&[input], GroundMode::BottomUp, &Options::default()).unwrap();
        assert_eq!(with_guesses, 36, "12 choice instances + 24 constraint instances");
    }

    #[test]
    fn ground_cap_maps_to_exit_code_four() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("prog.lp");
        fs::write(&input, triangle_with_clique(7)).unwrap();
        let opts = Options { ground_cap: 10, ..Options::default() };
        let err = run_ground(&[input], GroundMode::Naive, &opts).unwrap_err();
        assert_eq!(err.exit_code(), 4);
    }

    #[test]
    fn profile_defaults_to_the_last_rule_and_emits_csv() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("fixture.lp");
        fs::write(&input, "{g(X,Y)} :- e(X,Y).\n:- g(X1,X2), g(X1,X3), g(X2,X3).\n")
            .unwrap();
        let params = ProfileParams {
            rule: None,
            sizes: vec![4],
            densities: vec![100.0],
            template: GenConfig::default(),
            actual_cap: 10,
        };
        let opts = Options { ground_cap: 10_000_000, ..Options::default() };
        let csv = run_profile(&[input], &params, &opts).unwrap();
        assert_eq!(
            csv,
            "n,density,sota_estimate,bdg_estimate,actual_sota\n4,100,27.00,74.00,24\n"
        );
    }
}
