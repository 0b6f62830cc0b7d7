use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use synalg::cli::{run, CliCommand, LanguageInput, OutputFormat, RunConfig};
use synalg::freemon::VarietyTag;
use synalg::Limits;

/// Syntactic algebras of regular languages in six varieties.
#[derive(Parser)]
#[command(name = "synalg", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the syntactic algebra and print its tables.
    Syn(LangArgs),
    /// Build the minimal automaton in the chosen variety.
    Min(LangArgs),
    /// Verify the duality between atoms and the syntactic monoid.
    Dual(LangArgs),
    /// Run all invariant suites on one language.
    Check(LangArgs),
    /// Run the acceptance corpus and print the pass/fail matrix.
    Corpus(CorpusArgs),
}

#[derive(Args)]
struct LangArgs {
    /// Variety: set, pos, pset, inv, jsl or vect.
    #[arg(long)]
    variety: Option<String>,
    /// Prime for the vect variety.
    #[arg(long, default_value_t = 2)]
    prime: u32,
    /// The alphabet, as a string of single-character letters.
    #[arg(long)]
    alphabet: String,
    /// The language, as a regular expression (grammar: ∅, ε, letters, e|e,
    /// ee, e*, parentheses).
    #[arg(long, conflicts_with = "dfa")]
    regex: Option<String>,
    /// The language, as a DFA file in the documented JSON schema.
    #[arg(long)]
    dfa: Option<std::path::PathBuf>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct CorpusArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct CommonArgs {
    /// Output format: table, json, dot or csv.
    #[arg(long, default_value = "table")]
    format: String,
    /// Seed for the randomized recognition samples.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Capacity guard for the semilattice subset construction.
    #[arg(long, default_value_t = 1 << 20)]
    max_jsl_states: usize,
    /// Capacity guard for linear automaton dimensions.
    #[arg(long, default_value_t = 4096)]
    max_dim: usize,
    /// Capacity guard for transition-algebra closures.
    #[arg(long, default_value_t = 5000)]
    max_algebra_elements: usize,
}

fn parse_variety(name: &str, prime: u32) -> Result<VarietyTag, String> {
    match name {
        "set" => Ok(VarietyTag::Set),
        "pos" => Ok(VarietyTag::Pos),
        "pset" => Ok(VarietyTag::PSet),
        "inv" => Ok(VarietyTag::Inv),
        "jsl" => Ok(VarietyTag::Jsl),
        "vect" => Ok(VarietyTag::Vect(prime)),
        other => Err(format!(
            "unknown variety '{other}' (expected set, pos, pset, inv, jsl or vect)"
        )),
    }
}

fn parse_format(name: &str) -> Result<OutputFormat, String> {
    match name {
        "table" => Ok(OutputFormat::Table),
        "json" => Ok(OutputFormat::Json),
        "dot" => Ok(OutputFormat::Dot),
        "csv" => Ok(OutputFormat::Csv),
        other => Err(format!(
            "unknown format '{other}' (expected table, json, dot or csv)"
        )),
    }
}

fn build_config(command: CliCommand, args: LangArgs) -> Result<RunConfig, String> {
    let variety = match &args.variety {
        Some(name) => Some(parse_variety(name, args.prime)?),
        None => None,
    };
    let input = match (&args.regex, &args.dfa) {
        (Some(r), None) => LanguageInput::Regex(r.clone()),
        (None, Some(path)) => {
            let json = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            LanguageInput::DfaJson(json)
        }
        (None, None) => return Err("one of --regex or --dfa is required".into()),
        (Some(_), Some(_)) => return Err("--regex conflicts with --dfa".into()),
    };
    Ok(RunConfig {
        command,
        variety,
        alphabet: args.alphabet,
        input,
        format: parse_format(&args.common.format)?,
        seed: args.common.seed,
        limits: limits_of(&args.common),
    })
}

fn limits_of(common: &CommonArgs) -> Limits {
    Limits {
        max_jsl_states: common.max_jsl_states,
        max_dim: common.max_dim,
        max_algebra_elements: common.max_algebra_elements,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match cli.command {
        Command::Syn(args) => build_config(CliCommand::Syn, args),
        Command::Min(args) => build_config(CliCommand::Min, args),
        Command::Dual(args) => build_config(CliCommand::Dual, args),
        Command::Check(args) => build_config(CliCommand::Check, args),
        Command::Corpus(args) => match parse_format(&args.common.format) {
            Ok(format) => Ok(RunConfig {
                command: CliCommand::Corpus,
                variety: None,
                alphabet: "ab".into(),
                input: LanguageInput::None,
                format,
                seed: args.common.seed,
                limits: limits_of(&args.common),
            }),
            Err(e) => Err(e),
        },
    };
    let cfg = match cfg {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match run(&cfg) {
        Ok(output) => {
            print!("{output}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
