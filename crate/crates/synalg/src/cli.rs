//! Command dispatch for the `synalg` binary.
//!
//! The front end parses flags into a [`RunConfig`] and calls [`run`], which
//! returns the rendered output. Exit codes: 0 on success, 1 when a
//! verification check fails, 2 on configuration or parse errors, 3 when a
//! capacity guard trips.

use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::algebra::{
    self, laws, syntactic_algebra_with_automaton, AlgebraError, CongruenceOracle, EndoMap, Extra,
    GenMap, MultOp, SynAlgebra,
};
use crate::corpus;
use crate::dautomata::{check_reachable_simple, minimal_dautomaton, DautError};
use crate::duality::{
    atoms_to_dot, build_derivative_system, compute_atoms, verify_minimal_duality,
    verify_syntactic_duality, DualityError,
};
use crate::freemon::{enumerate_bounded, VarietyTag};
use crate::langcore::{parse_regex, regex_to_min_dfa, Alphabet, Dfa, LangError, RegexParseError};
use crate::Limits;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CliCommand {
    /// Print the syntactic algebra of the language.
    Syn,
    /// Print the minimal automaton in the variety.
    Min,
    /// Run the duality checks.
    Dual,
    /// Run every invariant suite on one language.
    Check,
    /// Run the acceptance corpus.
    Corpus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Table,
    Json,
    Dot,
    Csv,
}

/// Where the language comes from.
#[derive(Debug, Clone)]
pub enum LanguageInput {
    Regex(String),
    /// JSON in the documented DFA schema.
    DfaJson(String),
    /// Not needed (corpus command).
    None,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: CliCommand,
    pub variety: Option<VarietyTag>,
    pub alphabet: String,
    pub input: LanguageInput,
    pub format: OutputFormat,
    pub seed: u64,
    pub limits: Limits,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Capacity(String),
    #[error("{0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Config(_) => 2,
            CliError::Capacity(_) => 3,
        }
    }
}

impl From<RegexParseError> for CliError {
    fn from(e: RegexParseError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<LangError> for CliError {
    fn from(e: LangError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<AlgebraError> for CliError {
    fn from(e: AlgebraError) -> Self {
        match e {
            AlgebraError::CapacityExceeded { .. } | AlgebraError::BoundOverflow { .. } => {
                CliError::Capacity(e.to_string())
            }
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<DautError> for CliError {
    fn from(e: DautError) -> Self {
        match e {
            DautError::CapacityExceeded { .. } => CliError::Capacity(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<DualityError> for CliError {
    fn from(e: DualityError) -> Self {
        match e {
            DualityError::Algebra(inner) => inner.into(),
            other => CliError::Verification(other.to_string()),
        }
    }
}

fn load_language(cfg: &RunConfig) -> Result<(Alphabet, Dfa), CliError> {
    let alphabet = Alphabet::from_str(&cfg.alphabet)?;
    let dfa = match &cfg.input {
        LanguageInput::Regex(text) => {
            let regex = parse_regex(text, &alphabet)?;
            regex_to_min_dfa(&regex, &alphabet)?
        }
        LanguageInput::DfaJson(json) => {
            let dfa = Dfa::from_json(json)?;
            if dfa.alphabet() != &alphabet {
                return Err(CliError::Config(
                    "DFA file alphabet differs from --alphabet".into(),
                ));
            }
            dfa.minimized()
        }
        LanguageInput::None => {
            return Err(CliError::Config("this command needs --regex or --dfa".into()))
        }
    };
    Ok((alphabet, dfa))
}

/// Executes the configured command and renders its output.
pub fn run(cfg: &RunConfig) -> Result<String, CliError> {
    match cfg.command {
        CliCommand::Syn => run_syn(cfg),
        CliCommand::Min => run_min(cfg),
        CliCommand::Dual => run_dual(cfg),
        CliCommand::Check => run_check(cfg),
        CliCommand::Corpus => run_corpus(cfg),
    }
}

#[derive(Serialize)]
struct Seeded<T: Serialize> {
    seed: u64,
    #[serde(flatten)]
    payload: T,
}

fn to_json<T: Serialize>(seed: u64, payload: T) -> String {
    serde_json::to_string_pretty(&Seeded { seed, payload }).expect("serializable payload")
}

fn run_syn(cfg: &RunConfig) -> Result<String, CliError> {
    let (_, dfa) = load_language(cfg)?;
    let tag = cfg
        .variety
        .ok_or_else(|| CliError::Config("syn needs --variety".into()))?;
    let alg = algebra::syntactic_algebra(tag, &dfa, &cfg.limits)?;
    match cfg.format {
        OutputFormat::Table => Ok(render_algebra_table(&alg, cfg.seed)),
        OutputFormat::Json => Ok(to_json(cfg.seed, &alg)),
        OutputFormat::Csv => Ok(render_algebra_csv(&alg)),
        OutputFormat::Dot => Err(CliError::Config(
            "dot output applies to automata; use `min` or `dual`".into(),
        )),
    }
}

fn run_min(cfg: &RunConfig) -> Result<String, CliError> {
    let (_, dfa) = load_language(cfg)?;
    let tag = cfg
        .variety
        .ok_or_else(|| CliError::Config("min needs --variety".into()))?;
    let aut = minimal_dautomaton(tag, &dfa, &cfg.limits)?;
    match cfg.format {
        OutputFormat::Table => {
            let report = check_reachable_simple(&aut);
            let mut out = String::new();
            let _ = writeln!(out, "minimal automaton in variety {tag}");
            let _ = writeln!(out, "seed: {}", cfg.seed);
            let _ = writeln!(out, "carrier size: {}", aut.carrier_size());
            let _ = writeln!(
                out,
                "reachable: {}  simple: {}",
                report.reachable, report.simple
            );
            Ok(out)
        }
        OutputFormat::Json => Ok(to_json(cfg.seed, &aut)),
        OutputFormat::Dot => Ok(aut.to_dot()),
        OutputFormat::Csv => Err(CliError::Config(
            "csv output applies to algebra tables; use `syn`".into(),
        )),
    }
}

#[derive(Serialize)]
struct DualPayload {
    syntactic: crate::duality::DualityReport,
    minimal: crate::duality::MinimalDualityReport,
}

fn run_dual(cfg: &RunConfig) -> Result<String, CliError> {
    let (_, dfa) = load_language(cfg)?;
    let syntactic = verify_syntactic_duality(&dfa, &cfg.limits)?;
    let minimal = verify_minimal_duality(&dfa);
    let ok = syntactic.passed() && minimal.passed();
    let rendered = match cfg.format {
        OutputFormat::Dot => {
            let atoms = compute_atoms(&build_derivative_system(&dfa))?;
            atoms_to_dot(&atoms)
        }
        OutputFormat::Json => to_json(cfg.seed, DualPayload { syntactic: syntactic.clone(), minimal: minimal.clone() }),
        _ => {
            let mut out = String::new();
            let _ = writeln!(out, "seed: {}", cfg.seed);
            let _ = writeln!(
                out,
                "derivatives={} atoms={} syn={} isomorphic={}",
                syntactic.derivatives, syntactic.atoms, syntactic.syn_size, syntactic.isomorphic
            );
            let _ = writeln!(
                out,
                "left-derivative atoms={} minimal states={}",
                minimal.left_derivative_atoms, minimal.minimal_states
            );
            for w in &syntactic.witnesses {
                let _ = writeln!(out, "witness: {w}");
            }
            out
        }
    };
    if ok {
        Ok(rendered)
    } else {
        Err(CliError::Verification(rendered))
    }
}

#[derive(Serialize)]
struct CheckSuite {
    variety: String,
    minimality: crate::dautomata::MinimalityReport,
    law_violations: Vec<String>,
    recognition_failures: Vec<String>,
    congruence_mismatches: Vec<String>,
}

#[derive(Serialize)]
struct CheckPayload {
    suites: Vec<CheckSuite>,
    duality_passed: bool,
}

fn run_check(cfg: &RunConfig) -> Result<String, CliError> {
    let (alphabet, dfa) = load_language(cfg)?;
    let varieties: Vec<VarietyTag> = match cfg.variety {
        Some(tag) => vec![tag],
        None => VarietyTag::ALL_DEFAULT.to_vec(),
    };
    let mut suites = Vec::new();
    let mut all_ok = true;
    for tag in varieties {
        let (alg, aut) = syntactic_algebra_with_automaton(tag, &dfa, &cfg.limits)?;
        let minimality = check_reachable_simple(&aut);
        let law_violations = laws::check_algebra_laws(&alg);
        let recognition = laws::verify_recognition(&alg, &aut, &dfa, cfg.seed, 1000)?;
        let oracle = CongruenceOracle::new(tag, &dfa)?;
        let mut congruence_mismatches = Vec::new();
        let elems = enumerate_bounded(tag, &alphabet, 3);
        for (i, u) in elems.iter().enumerate() {
            for v in elems.iter().skip(i + 1) {
                let same_class = algebra::elem_action(&aut, u)? == algebra::elem_action(&aut, v)?;
                let ans = oracle.decide(u, v)?;
                if same_class != ans.equal() {
                    congruence_mismatches.push(format!("{u} vs {v}"));
                }
            }
        }
        all_ok &= minimality.passed()
            && law_violations.is_empty()
            && recognition.passed()
            && congruence_mismatches.is_empty();
        suites.push(CheckSuite {
            variety: tag.to_string(),
            minimality,
            law_violations,
            recognition_failures: recognition.failures,
            congruence_mismatches,
        });
    }
    let syntactic = verify_syntactic_duality(&dfa, &cfg.limits)?;
    let minimal = verify_minimal_duality(&dfa);
    let duality_passed = syntactic.passed() && minimal.passed();
    all_ok &= duality_passed;

    let payload = CheckPayload {
        suites,
        duality_passed,
    };
    let rendered = match cfg.format {
        OutputFormat::Json => to_json(cfg.seed, &payload),
        _ => {
            let mut out = String::new();
            let _ = writeln!(out, "seed: {}", cfg.seed);
            for s in &payload.suites {
                let ok = s.minimality.passed()
                    && s.law_violations.is_empty()
                    && s.recognition_failures.is_empty()
                    && s.congruence_mismatches.is_empty();
                let _ = writeln!(
                    out,
                    "{:8} {}  (reachable={} simple={} laws={} recognition={} congruence={})",
                    s.variety,
                    if ok { "PASS" } else { "FAIL" },
                    s.minimality.reachable,
                    s.minimality.simple,
                    s.law_violations.is_empty(),
                    s.recognition_failures.is_empty(),
                    s.congruence_mismatches.is_empty()
                );
                for v in s
                    .law_violations
                    .iter()
                    .chain(&s.recognition_failures)
                    .chain(&s.congruence_mismatches)
                    .take(3)
                {
                    let _ = writeln!(out, "    {v}");
                }
            }
            let _ = writeln!(
                out,
                "duality  {}",
                if payload.duality_passed { "PASS" } else { "FAIL" }
            );
            out
        }
    };
    if all_ok {
        Ok(rendered)
    } else {
        Err(CliError::Verification(rendered))
    }
}

#[derive(Serialize)]
struct CorpusPayload {
    languages: Vec<corpus::LanguageSummary>,
    criteria: Vec<corpus::CriterionResult>,
}

fn run_corpus(cfg: &RunConfig) -> Result<String, CliError> {
    let criteria = corpus::run_acceptance(cfg.seed, &cfg.limits);
    let languages: Vec<corpus::LanguageSummary> = corpus::CORPUS
        .iter()
        .map(|e| corpus::language_summary(e, &cfg.limits))
        .collect();
    let ok = criteria.iter().all(|c| c.passed);
    let rendered = match cfg.format {
        OutputFormat::Json => to_json(
            cfg.seed,
            CorpusPayload {
                languages,
                criteria,
            },
        ),
        _ => {
            let mut out = String::new();
            let _ = writeln!(out, "seed: {}", cfg.seed);
            let _ = writeln!(
                out,
                "{:16} {:>6}  {:>4} {:>4} {:>4} {:>4} {:>4} {:>7}",
                "language", "states", "set", "pos", "pset", "inv", "jsl", "vect(2)"
            );
            for l in &languages {
                let _ = write!(out, "{:16} {:>6}", l.name, l.states);
                for (_, size) in &l.sizes {
                    let _ = write!(out, "  {size:>4}");
                }
                let _ = writeln!(out);
            }
            let _ = writeln!(out);
            for c in &criteria {
                let _ = writeln!(out, "{}", corpus::format_criterion(c));
            }
            out
        }
    };
    if ok {
        Ok(rendered)
    } else {
        Err(CliError::Verification(rendered))
    }
}

fn render_algebra_table(alg: &SynAlgebra, seed: u64) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "syntactic algebra: variety {}, {} elements",
        alg.tag,
        alg.size()
    );
    let _ = writeln!(out, "seed: {seed}");
    let _ = writeln!(out, "elements:");
    for (i, e) in alg.elements.iter().enumerate() {
        let mut marks = Vec::new();
        if i == alg.unit {
            marks.push("unit");
        }
        match &alg.extra {
            Extra::Zero(z) if *z == i => marks.push("zero"),
            Extra::Jsl { zero, .. } if *zero == i => marks.push("additive zero"),
            _ => {}
        }
        let mark = if marks.is_empty() {
            String::new()
        } else {
            format!("   ({})", marks.join(", "))
        };
        let _ = writeln!(out, "  [{i}] {}  f={}{mark}", e.rep, alg.output[i]);
    }
    match &alg.gen_map {
        GenMap::Table(gen) => {
            let pairs: Vec<String> = gen.iter().map(|(c, i)| format!("{c}→[{i}]")).collect();
            let _ = writeln!(out, "letters: {}", pairs.join("  "));
        }
        GenMap::Linear(gen) => {
            let pairs: Vec<String> = gen
                .iter()
                .map(|(c, coords)| format!("{c}→{coords:?}"))
                .collect();
            let _ = writeln!(out, "letters: {}", pairs.join("  "));
        }
    }
    match &alg.mult {
        MultOp::Table(t) => {
            let _ = writeln!(out, "multiplication (row · column):");
            let width = alg.size().to_string().len().max(2);
            let _ = write!(out, "      ");
            for j in 0..alg.size() {
                let _ = write!(out, " {j:>width$}");
            }
            let _ = writeln!(out);
            for (i, row) in t.iter().enumerate() {
                let _ = write!(out, "  {i:>width$} |");
                for &v in row {
                    let _ = write!(out, " {v:>width$}");
                }
                let _ = writeln!(out);
            }
        }
        MultOp::Structure(s) => {
            let _ = writeln!(out, "structure constants (basis_i · basis_j = Σ c_k basis_k):");
            for (i, row) in s.iter().enumerate() {
                for (j, coords) in row.iter().enumerate() {
                    let _ = writeln!(out, "  [{i}]·[{j}] = {coords:?}");
                }
            }
        }
    }
    match &alg.extra {
        Extra::Order(leq) => {
            let _ = writeln!(out, "order (strict pairs):");
            for (i, row) in leq.iter().enumerate() {
                for (j, &le) in row.iter().enumerate() {
                    if le && i != j {
                        let _ = writeln!(out, "  [{i}] < [{j}]");
                    }
                }
            }
        }
        Extra::Involution(inv) => {
            let pairs: Vec<String> = inv
                .iter()
                .enumerate()
                .filter(|(i, &j)| *i < j)
                .map(|(i, &j)| format!("[{i}]~[{j}]"))
                .collect();
            let _ = writeln!(out, "complement pairs: {}", pairs.join("  "));
        }
        Extra::Jsl { add, .. } => {
            let _ = writeln!(out, "addition (row ∨ column):");
            let width = alg.size().to_string().len().max(2);
            for (i, row) in add.iter().enumerate() {
                let _ = write!(out, "  {i:>width$} |");
                for &v in row {
                    let _ = write!(out, " {v:>width$}");
                }
                let _ = writeln!(out);
            }
        }
        Extra::Vect { p, dim } => {
            let _ = writeln!(out, "algebra over F_{p}, dimension {dim}");
        }
        _ => {}
    }
    out
}

fn render_algebra_csv(alg: &SynAlgebra) -> String {
    let mut out = String::new();
    match &alg.mult {
        MultOp::Table(t) => {
            let header: Vec<String> = alg
                .elements
                .iter()
                .map(|e| e.rep.to_string())
                .collect();
            let _ = writeln!(out, "rep,{}", header.join(","));
            for (i, row) in t.iter().enumerate() {
                let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                let _ = writeln!(out, "{},{}", alg.elements[i].rep, cells.join(","));
            }
        }
        MultOp::Structure(s) => {
            let _ = writeln!(out, "i,j,coefficients");
            for (i, row) in s.iter().enumerate() {
                for (j, coords) in row.iter().enumerate() {
                    let cs: Vec<String> = coords.iter().map(|c| c.to_string()).collect();
                    let _ = writeln!(out, "{i},{j},{}", cs.join(" "));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_cfg(command: CliCommand) -> RunConfig {
        RunConfig {
            command,
            variety: Some(VarietyTag::Set),
            alphabet: "ab".into(),
            input: LanguageInput::Regex("(ab)*".into()),
            format: OutputFormat::Table,
            seed: 0,
            limits: Limits::default(),
        }
    }

    #[test]
    fn syn_table_marks_unit_and_zero() {
        let out = run(&base_cfg(CliCommand::Syn)).unwrap();
        assert!(out.contains("6 elements"));
        assert!(out.contains("(unit)"));
        assert!(out.contains("(zero)") || out.contains("zero"));
    }

    #[test]
    fn syn_rejects_bad_regex_as_config_error() {
        let mut cfg = base_cfg(CliCommand::Syn);
        cfg.input = LanguageInput::Regex("((".into());
        let err = run(&cfg).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn syn_json_is_stable_across_runs() {
        let mut cfg = base_cfg(CliCommand::Syn);
        cfg.format = OutputFormat::Json;
        let a = run(&cfg).unwrap();
        let b = run(&cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.contains("\"seed\": 0"));
    }

    #[test]
    fn dual_reports_sizes() {
        let mut cfg = base_cfg(CliCommand::Dual);
        cfg.variety = None;
        let out = run(&cfg).unwrap();
        assert!(out.contains("atoms=6 syn=6 isomorphic=true"), "{out}");
    }

    #[test]
    fn capacity_guard_maps_to_exit_3() {
        let mut cfg = base_cfg(CliCommand::Syn);
        cfg.limits.max_algebra_elements = 1;
        let err = run(&cfg).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn check_passes_on_ab_star() {
        let mut cfg = base_cfg(CliCommand::Check);
        cfg.variety = None;
        let out = run(&cfg).unwrap();
        assert!(out.contains("PASS"));
        assert!(!out.contains("FAIL"));
    }

    #[test]
    fn min_dot_output_renders() {
        let mut cfg = base_cfg(CliCommand::Min);
        cfg.variety = Some(VarietyTag::Pos);
        cfg.format = OutputFormat::Dot;
        let out = run(&cfg).unwrap();
        assert!(out.starts_with("digraph"));
        assert!(out.contains("style=dashed"));
    }

    #[test]
    fn dfa_json_input_round_trips() {
        let alphabet = Alphabet::from_str("ab").unwrap();
        let dfa = regex_to_min_dfa(&parse_regex("(ab)*", &alphabet).unwrap(), &alphabet).unwrap();
        let mut cfg = base_cfg(CliCommand::Syn);
        cfg.input = LanguageInput::DfaJson(dfa.to_json());
        let out = run(&cfg).unwrap();
        assert!(out.contains("6 elements"));
    }
}
