//! Command-line interface.
//!
//! Exit codes: 0 success, 1 consistency violations, 2 usage or input error,
//! 3 OWL parse error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::applications::{empathetic_guidance, FeatureMode, Featurizer, Matcher};
use crate::hierarchy::Tier;
use crate::ontology::{DisjointPolicy, Ontology};
use crate::owl;
use crate::pipeline::{run_build, BuildConfig};
use crate::query::{check_consistency, run_query, Query};
use crate::vocabulary::write_worksheet;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATIONS: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PARSE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "tone", version, about = "Build, validate, query and apply the TONE emotion ontology")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build the ontology and write it as OWL/XML.
    Build(Box<BuildArgs>),
    /// Parse an OWL file and check its consistency.
    Validate { owl: PathBuf },
    /// Run a query: opposite(X), components(X[, transitive]) or leadsTo(X + Y).
    Query { owl: PathBuf, query: String },
    /// Label each line of a text file with its dominant emotion.
    Detect {
        owl: PathBuf,
        sentences: PathBuf,
        #[arg(long, value_enum, default_value_t = TierArg::Primary)]
        tier: TierArg,
    },
    /// Write per-line emotion count vectors as CSV.
    Featurize {
        owl: PathBuf,
        texts: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Tone)]
        mode: ModeArg,
    },
    /// Suggest an opposite emotion and helpful addends for a negative primary emotion.
    Guide { owl: PathBuf, emotion: String },
}

#[derive(Debug, Args)]
struct BuildArgs {
    /// Output OWL file.
    #[arg(short, long)]
    output: PathBuf,
    /// key = value configuration file; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    hierarchy: Option<PathBuf>,
    #[arg(long)]
    lexicon: Option<PathBuf>,
    /// One decision file, or three verifier files (repeat the flag).
    #[arg(long)]
    decisions: Vec<PathBuf>,
    #[arg(long)]
    adjectives: Option<PathBuf>,
    /// Dense vectors for overlap scoring.
    #[arg(long)]
    vectors: Option<PathBuf>,
    /// Recorded pairwise scores for overlap scoring.
    #[arg(long)]
    scores: Option<PathBuf>,
    /// Recorded classifier results for combined statements.
    #[arg(long)]
    classifier: Option<PathBuf>,
    /// Triples rejected by verifiers.
    #[arg(long)]
    suppress: Option<PathBuf>,
    /// Use score suggestions for overlapping terms without a decision.
    #[arg(long)]
    auto_accept_suggestions: bool,
    #[arg(long)]
    iri_prefix: Option<String>,
    #[arg(long, value_enum)]
    disjoint: Option<DisjointArg>,
    /// Also export the overlap worksheet as CSV.
    #[arg(long)]
    worksheet: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TierArg {
    Primary,
    Secondary,
    Tertiary,
}

impl From<TierArg> for Tier {
    fn from(t: TierArg) -> Tier {
        match t {
            TierArg::Primary => Tier::Primary,
            TierArg::Secondary => Tier::Secondary,
            TierArg::Tertiary => Tier::Tertiary,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Tone,
    PTone,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DisjointArg {
    OppositePrimaries,
    AllPrimaries,
}

/// A failed command: message and exit code.
struct Failure(i32, String);

type Outcome = Result<i32, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure(EXIT_USAGE, msg.into())
}

/// Runs the CLI with the given arguments (program name first).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Build(args) => cmd_build(*args, out, err),
        Command::Validate { owl } => cmd_validate(&owl, out),
        Command::Query { owl, query } => cmd_query(&owl, &query, out),
        Command::Detect {
            owl,
            sentences,
            tier,
        } => cmd_detect(&owl, &sentences, tier.into(), out),
        Command::Featurize { owl, texts, mode } => {
            let mode = match mode {
                ModeArg::Tone => FeatureMode::Tone,
                ModeArg::PTone => FeatureMode::PTone,
            };
            cmd_featurize(&owl, &texts, mode, out)
        }
        Command::Guide { owl, emotion } => cmd_guide(&owl, &emotion, out),
    };
    match result {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

fn read_input(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_owl(path: &Path) -> Result<Ontology, Failure> {
    let doc = read_input(path)?;
    owl::parse(&doc).map_err(|e| Failure(EXIT_PARSE, format!("{}: {e}", path.display())))
}

fn io(e: impl std::fmt::Display) -> Failure {
    usage(format!("write failed: {e}"))
}

fn cmd_build(args: BuildArgs, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let mut cfg = match &args.config {
        Some(p) => BuildConfig::load(p).map_err(|e| usage(e.to_string()))?,
        None => BuildConfig::default(),
    };
    let set = |slot: &mut Option<PathBuf>, v: Option<PathBuf>| {
        if v.is_some() {
            *slot = v;
        }
    };
    set(&mut cfg.hierarchy, args.hierarchy);
    set(&mut cfg.lexicon, args.lexicon);
    set(&mut cfg.adjectives, args.adjectives);
    set(&mut cfg.vectors, args.vectors);
    set(&mut cfg.scores, args.scores);
    set(&mut cfg.classifier, args.classifier);
    set(&mut cfg.suppress, args.suppress);
    if !args.decisions.is_empty() {
        cfg.decisions = args.decisions;
    }
    cfg.auto_accept_suggestions |= args.auto_accept_suggestions;
    if let Some(p) = args.iri_prefix {
        cfg.iri_prefix = p;
    }
    if let Some(d) = args.disjoint {
        cfg.disjoint = match d {
            DisjointArg::OppositePrimaries => DisjointPolicy::OppositePrimaries,
            DisjointArg::AllPrimaries => DisjointPolicy::AllPrimaries,
        };
    }

    let built = run_build(&cfg).map_err(|e| usage(e.to_string()))?;
    let doc = owl::serialize(&built.ontology)
        .map_err(|e| usage(format!("stage serialize: {e}")))?;
    fs::write(&args.output, doc)
        .map_err(|e| usage(format!("stage serialize: {}: {e}", args.output.display())))?;
    if let Some(path) = &args.worksheet {
        let file = fs::File::create(path)
            .map_err(|e| usage(format!("stage worksheet: {}: {e}", path.display())))?;
        write_worksheet(&built.overlaps, file)
            .map_err(|e| usage(format!("stage worksheet: {e}")))?;
    }
    writeln!(out, "{}", built.report).map_err(io)?;
    writeln!(err, "wrote {}", args.output.display()).map_err(io)?;
    Ok(EXIT_OK)
}

fn cmd_validate(path: &Path, out: &mut dyn Write) -> Outcome {
    let o = load_owl(path)?;
    let report = check_consistency(&o);
    if report.ok {
        writeln!(out, "consistent").map_err(io)?;
        return Ok(EXIT_OK);
    }
    for v in &report.violations {
        writeln!(out, "{v}").map_err(io)?;
    }
    Ok(EXIT_VIOLATIONS)
}

fn cmd_query(path: &Path, text: &str, out: &mut dyn Write) -> Outcome {
    let q: Query = text.parse().map_err(|e: crate::query::QueryError| usage(e.to_string()))?;
    let o = load_owl(path)?;
    let result = run_query(&o, &q).map_err(|e| usage(e.to_string()))?;
    for e in result.emotions {
        writeln!(out, "{e}").map_err(io)?;
    }
    Ok(EXIT_OK)
}

fn cmd_detect(owl_path: &Path, input: &Path, tier: Tier, out: &mut dyn Write) -> Outcome {
    let o = load_owl(owl_path)?;
    let text = read_input(input)?;
    let matcher = Matcher::at_tier(&o.hierarchy, &o.vocabulary, tier);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["sentence_index", "label", "matched_terms"])
        .map_err(io)?;
    for (i, line) in text.lines().enumerate() {
        let r = matcher.detect(line);
        let terms: Vec<&str> = r.matched_terms.iter().map(|m| m.term.as_str()).collect();
        w.write_record([
            i.to_string().as_str(),
            r.label.as_deref().unwrap_or("NONE"),
            &terms.join(";"),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(io)?;
    Ok(EXIT_OK)
}

fn cmd_featurize(owl_path: &Path, input: &Path, mode: FeatureMode, out: &mut dyn Write) -> Outcome {
    let o = load_owl(owl_path)?;
    let text = read_input(input)?;
    let f = Featurizer::new(&o, mode);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(f.header()).map_err(io)?;
    for line in text.lines() {
        let v = f.featurize(line);
        w.write_record(v.counts.iter().map(u32::to_string))
            .map_err(io)?;
    }
    w.flush().map_err(io)?;
    Ok(EXIT_OK)
}

fn cmd_guide(path: &Path, emotion: &str, out: &mut dyn Write) -> Outcome {
    let o = load_owl(path)?;
    let g = empathetic_guidance(&o, emotion).map_err(|e| usage(e.to_string()))?;
    writeln!(out, "source: {}", g.source).map_err(io)?;
    writeln!(out, "target: {}", g.target).map_err(io)?;
    writeln!(out, "addends: {}", g.addends.join(", ")).map_err(io)?;
    Ok(EXIT_OK)
}
