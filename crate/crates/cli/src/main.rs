//! Batch front end over the graphlin library: encode, decode, coverage,
//! eval, stats and gen. Paths named "-" stream stdin/stdout. Exit code 1
//! covers parse and IO errors (with file:line positions), exit code 2 is
//! reserved for strict-mode ill-formedness. Set GRAPHLIN_LOG=info (or
//! debug, warn) to see skipped sentences and other notes.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use graphlin::encodings::{decode_corpus, encode_corpus, DecodeError, EncodingSpec};
use graphlin::formats::{
    read_conllu, read_labels, read_sdp, write_conllu, write_labels, write_sdp, CorpusDocument,
    EmptyNodePolicy, FormatError, LabeledSentence,
};
use graphlin::metrics::{evaluate, oracle_coverage, EvalResult};
use graphlin::stats::{corpus_stats, vocab_stats};
use graphlin::synth::{generate_corpus, generate_trees, GraphGenConfig};

#[derive(Parser)]
#[command(
    name = "graphlin",
    version,
    about = "Dependency graphs as per-token label sequences"
)]
struct Cli {
    /// Worker threads for corpus-level operations (0 = one per core).
    /// Never changes output bytes, only speed.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Encode a corpus into one label per token.
    Encode(EncodeArgs),
    /// Decode a label file back into a corpus.
    Decode(DecodeArgs),
    /// Oracle coverage (OF) of encodings on a corpus.
    Coverage(CoverageArgs),
    /// Score a predicted corpus against gold.
    Eval(EvalArgs),
    /// Structural statistics of a corpus.
    Stats(StatsArgs),
    /// Generate a deterministic synthetic corpus.
    Gen(GenArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Sdp,
    Conllu,
}

#[derive(Args)]
struct EncodeArgs {
    /// Input corpus ("-" for stdin).
    #[arg(default_value = "-")]
    input: String,
    #[arg(long, value_enum)]
    format: Format,
    /// Encoding, e.g. abs, rel, b:2, b4:3, b6:4.
    #[arg(long)]
    spec: EncodingSpec,
    #[arg(short, long, default_value = "-")]
    output: String,
    /// Treat enhanced-UD empty nodes as an error instead of skipping the
    /// sentence.
    #[arg(long)]
    keep_empty_nodes: bool,
}

#[derive(Args)]
struct DecodeArgs {
    /// Label file produced by encode ("-" for stdin).
    #[arg(default_value = "-")]
    input: String,
    /// Output corpus format.
    #[arg(long, value_enum)]
    format: Format,
    #[arg(short, long, default_value = "-")]
    output: String,
    /// Fail (exit 2) on any sequence that needs repairs.
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct CoverageArgs {
    #[arg(default_value = "-")]
    input: String,
    #[arg(long, value_enum)]
    format: Format,
    /// Comma-separated encodings; defaults to the ten standard columns.
    #[arg(long, value_delimiter = ',')]
    spec: Vec<EncodingSpec>,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    keep_empty_nodes: bool,
}

#[derive(Args)]
struct EvalArgs {
    gold: String,
    predicted: String,
    #[arg(long, value_enum)]
    format: Format,
    #[arg(long)]
    json: bool,
    /// Also print macro-averaged sentence F1.
    #[arg(long = "macro")]
    macro_avg: bool,
    #[arg(long)]
    keep_empty_nodes: bool,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(default_value = "-")]
    input: String,
    #[arg(long, value_enum)]
    format: Format,
    /// Also report label-vocabulary growth for these encodings.
    #[arg(long, value_delimiter = ',')]
    spec: Vec<EncodingSpec>,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    keep_empty_nodes: bool,
}

#[derive(Args)]
struct GenArgs {
    #[arg(short = 'n', long, default_value_t = 100)]
    sentences: usize,
    #[arg(long, default_value_t = 1)]
    min_tokens: usize,
    #[arg(long, default_value_t = 20)]
    max_tokens: usize,
    /// Target regular arcs per token.
    #[arg(long, default_value_t = 1.0)]
    density: f64,
    /// Probability that an arc points rightward.
    #[arg(long, default_value_t = 0.55)]
    right_bias: f64,
    /// Per-token probability of a root arc.
    #[arg(long, default_value_t = 0.15)]
    root_prob: f64,
    /// Reject arcs that would close a directed cycle.
    #[arg(long)]
    forbid_cycles: bool,
    /// Generate projective trees instead of graphs (ignores density).
    #[arg(long)]
    trees: bool,
    #[arg(long, default_value_t = 8)]
    relation_vocab: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, value_enum, default_value = "sdp")]
    format: Format,
    #[arg(short, long, default_value = "-")]
    output: String,
}

enum CliError {
    /// Parse or IO failure: exit code 1.
    General(String),
    /// Strict-mode ill-formedness: exit code 2.
    Strict(String),
}

fn located(path: &str, err: FormatError) -> CliError {
    CliError::General(match err {
        FormatError::Syntax { line, msg } => format!("{path}:{line}: {msg}"),
        FormatError::Graph { line, source } => format!("{path}:{line}: {source}"),
        FormatError::Io(e) => format!("{path}: {e}"),
    })
}

fn reader(path: &str) -> Result<Box<dyn BufRead>, CliError> {
    if path == "-" {
        Ok(Box::new(BufReader::new(io::stdin())))
    } else {
        File::open(path)
            .map(|f| Box::new(BufReader::new(f)) as Box<dyn BufRead>)
            .map_err(|e| CliError::General(format!("{path}: {e}")))
    }
}

fn writer(path: &str) -> Result<BufWriter<Box<dyn Write>>, CliError> {
    let inner: Box<dyn Write> = if path == "-" {
        Box::new(io::stdout())
    } else {
        Box::new(File::create(path).map_err(|e| CliError::General(format!("{path}: {e}")))?)
    };
    Ok(BufWriter::new(inner))
}

fn finish(mut w: BufWriter<Box<dyn Write>>, path: &str) -> Result<(), CliError> {
    w.flush()
        .map_err(|e| CliError::General(format!("{path}: {e}")))
}

fn policy(keep_empty_nodes: bool) -> EmptyNodePolicy {
    if keep_empty_nodes {
        EmptyNodePolicy::Error
    } else {
        EmptyNodePolicy::Skip
    }
}

fn read_corpus(
    path: &str,
    format: Format,
    policy: EmptyNodePolicy,
) -> Result<CorpusDocument, CliError> {
    let r = reader(path)?;
    match format {
        Format::Sdp => read_sdp(r),
        Format::Conllu => read_conllu(r, policy),
    }
    .map_err(|e| located(path, e))
}

fn write_corpus(path: &str, format: Format, doc: &CorpusDocument) -> Result<(), CliError> {
    let mut w = writer(path)?;
    match format {
        Format::Sdp => write_sdp(&mut w, doc),
        Format::Conllu => write_conllu(&mut w, doc),
    }
    .map_err(|e| located(path, e))?;
    finish(w, path)
}

fn pct(fraction: f64) -> String {
    format!("{:.2}", 100.0 * fraction)
}

fn round2(fraction: f64) -> f64 {
    (10_000.0 * fraction).round() / 100.0
}

/// The ten encodings the coverage tables report on.
fn default_specs() -> Vec<EncodingSpec> {
    [
        "abs", "rel", "b:2", "b:3", "b4:2", "b4:3", "b4:4", "b6:2", "b6:3", "b6:4",
    ]
    .iter()
    .map(|s| s.parse().expect("static specs parse"))
    .collect()
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("GRAPHLIN_LOG")).init();
    let cli = Cli::parse();
    if cli.jobs > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.jobs)
            .build_global()
        {
            eprintln!("graphlin: --jobs {}: {e}", cli.jobs);
            return ExitCode::from(1);
        }
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::General(msg)) => {
            eprintln!("graphlin: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Strict(msg)) => {
            eprintln!("graphlin: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Encode(args) => cmd_encode(args),
        Command::Decode(args) => cmd_decode(args),
        Command::Coverage(args) => cmd_coverage(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Stats(args) => cmd_stats(args),
        Command::Gen(args) => cmd_gen(args),
    }
}

fn cmd_encode(args: EncodeArgs) -> Result<(), CliError> {
    let doc = read_corpus(&args.input, args.format, policy(args.keep_empty_nodes))?;
    let labels = encode_corpus(&doc, &args.spec);
    let dropped: usize = labels.iter().map(|l| l.coverage.dropped_arcs).sum();
    let total: usize = labels.iter().map(|l| l.coverage.total_arcs).sum();

    let sentences: Vec<LabeledSentence> = doc
        .sentences
        .iter()
        .zip(labels)
        .map(|(g, labels)| LabeledSentence {
            sentence_id: g.sentence_id.clone(),
            tokens: g.tokens.clone(),
            labels,
        })
        .collect();
    let mut w = writer(&args.output)?;
    write_labels(&mut w, &args.spec, &sentences).map_err(|e| located(&args.output, e))?;
    finish(w, &args.output)?;

    eprintln!(
        "encoded {} sentences with {}: dropped {}/{} arcs ({}%)",
        sentences.len(),
        args.spec,
        dropped,
        total,
        pct(if total == 0 {
            0.0
        } else {
            dropped as f64 / total as f64
        })
    );
    Ok(())
}

fn cmd_decode(args: DecodeArgs) -> Result<(), CliError> {
    let (spec, sentences) =
        read_labels(reader(&args.input)?).map_err(|e| located(&args.input, e))?;
    let doc = decode_corpus(&sentences, &spec, args.strict).map_err(|e| {
        let msg = format!("{}: {e}", args.input);
        match e.source {
            DecodeError::IllFormed { .. } => CliError::Strict(msg),
            _ => CliError::General(msg),
        }
    })?;
    write_corpus(&args.output, args.format, &doc)
}

#[derive(serde::Serialize)]
struct CoverageRow {
    spec: String,
    of: f64,
    labeled_f1: f64,
    dropped_arcs: usize,
    total_arcs: usize,
}

fn cmd_coverage(args: CoverageArgs) -> Result<(), CliError> {
    let doc = read_corpus(&args.input, args.format, policy(args.keep_empty_nodes))?;
    let specs = if args.spec.is_empty() {
        default_specs()
    } else {
        args.spec.clone()
    };
    let rows: Vec<CoverageRow> = specs
        .iter()
        .map(|spec| {
            let labels = encode_corpus(&doc, spec);
            let result = oracle_coverage(&doc, spec);
            CoverageRow {
                spec: spec.to_string(),
                of: round2(result.unlabeled_f1()),
                labeled_f1: round2(result.labeled_f1()),
                dropped_arcs: labels.iter().map(|l| l.coverage.dropped_arcs).sum(),
                total_arcs: labels.iter().map(|l| l.coverage.total_arcs).sum(),
            }
        })
        .collect();

    let mut w = writer("-")?;
    if args.json {
        serde_json::to_writer_pretty(&mut w, &rows)
            .map_err(|e| CliError::General(e.to_string()))?;
        writeln!(w).ok();
    } else {
        writeln!(
            w,
            "{:<8}{:>8}{:>8}{:>10}{:>10}",
            "spec", "OF", "LF", "dropped", "arcs"
        )
        .ok();
        for row in &rows {
            writeln!(
                w,
                "{:<8}{:>8.2}{:>8.2}{:>10}{:>10}",
                row.spec, row.of, row.labeled_f1, row.dropped_arcs, row.total_arcs
            )
            .ok();
        }
    }
    finish(w, "-")
}

fn cmd_eval(args: EvalArgs) -> Result<(), CliError> {
    let pol = policy(args.keep_empty_nodes);
    let gold = read_corpus(&args.gold, args.format, pol)?;
    let predicted = read_corpus(&args.predicted, args.format, pol)?;
    let result: EvalResult =
        evaluate(&gold, &predicted).map_err(|e| CliError::General(e.to_string()))?;

    let mut w = writer("-")?;
    if args.json {
        let mut value = serde_json::json!({
            "sentences": result.sentences,
            "gold_arcs": result.gold_arcs,
            "predicted_arcs": result.predicted_arcs,
            "UP": round2(result.unlabeled_precision()),
            "UR": round2(result.unlabeled_recall()),
            "UF": round2(result.unlabeled_f1()),
            "LP": round2(result.labeled_precision()),
            "LR": round2(result.labeled_recall()),
            "LF": round2(result.labeled_f1()),
            "UM": round2(result.unlabeled_match()),
            "LM": round2(result.labeled_match()),
        });
        if args.macro_avg {
            value["macro_UF"] = round2(result.macro_unlabeled_f1()).into();
            value["macro_LF"] = round2(result.macro_labeled_f1()).into();
        }
        serde_json::to_writer_pretty(&mut w, &value)
            .map_err(|e| CliError::General(e.to_string()))?;
        writeln!(w).ok();
    } else {
        writeln!(w, "sentences      {}", result.sentences).ok();
        writeln!(w, "gold arcs      {}", result.gold_arcs).ok();
        writeln!(w, "predicted arcs {}", result.predicted_arcs).ok();
        writeln!(
            w,
            "UP {:>7}  UR {:>7}  UF {:>7}",
            pct(result.unlabeled_precision()),
            pct(result.unlabeled_recall()),
            pct(result.unlabeled_f1())
        )
        .ok();
        writeln!(
            w,
            "LP {:>7}  LR {:>7}  LF {:>7}",
            pct(result.labeled_precision()),
            pct(result.labeled_recall()),
            pct(result.labeled_f1())
        )
        .ok();
        writeln!(
            w,
            "UM {:>7}  LM {:>7}",
            pct(result.unlabeled_match()),
            pct(result.labeled_match())
        )
        .ok();
        if args.macro_avg {
            writeln!(
                w,
                "macro UF {:>7}  macro LF {:>7}",
                pct(result.macro_unlabeled_f1()),
                pct(result.macro_labeled_f1())
            )
            .ok();
        }
    }
    finish(w, "-")
}

fn cmd_stats(args: StatsArgs) -> Result<(), CliError> {
    let doc = read_corpus(&args.input, args.format, policy(args.keep_empty_nodes))?;
    let stats = corpus_stats(&doc);
    let vocab = if args.spec.is_empty() {
        Vec::new()
    } else {
        vocab_stats(&doc, &args.spec)
    };

    let mut w = writer("-")?;
    if args.json {
        let value = serde_json::json!({ "corpus": stats, "vocab": vocab });
        serde_json::to_writer_pretty(&mut w, &value)
            .map_err(|e| CliError::General(e.to_string()))?;
        writeln!(w).ok();
    } else {
        writeln!(w, "sentences          {}", stats.sentences).ok();
        writeln!(w, "tokens             {}", stats.tokens).ok();
        writeln!(w, "arcs (with roots)  {}", stats.arcs).ok();
        writeln!(w, "root arcs          {}", stats.root_arcs).ok();
        writeln!(w, "avg in-degree      {:.2}", stats.avg_in_degree()).ok();
        writeln!(w, "avg out-degree     {:.2}", stats.avg_out_degree()).ok();
        writeln!(
            w,
            "reentrant tokens   {} ({}%)",
            stats.reentrant_tokens,
            pct(stats.reentrancy_rate())
        )
        .ok();
        writeln!(w, "isolated tokens    {}", stats.isolated_tokens).ok();
        writeln!(w, "max in-degree      {}", stats.max_in_degree).ok();
        writeln!(
            w,
            "cycles             {} in {} sentences ({}%)",
            stats.cycle_count,
            stats.cycle_sentences,
            pct(stats.cycle_rate())
        )
        .ok();
        writeln!(
            w,
            "crossing sentences {} ({}%)",
            stats.crossing_sentences,
            pct(stats.crossing_rate())
        )
        .ok();
        let histogram: Vec<String> = stats
            .plane_histogram
            .iter()
            .map(|(planes, count)| format!("{planes}:{count}"))
            .collect();
        writeln!(w, "plane histogram    {}", histogram.join(" ")).ok();
        if !vocab.is_empty() {
            writeln!(w).ok();
            writeln!(
                w,
                "{:<8}{:>10}{:>16}{:>9}",
                "spec", "distinct", "bound", "max len"
            )
            .ok();
            for row in &vocab {
                let bound = row
                    .bound
                    .map(|b| b.to_string())
                    .unwrap_or_else(|| "-".to_string());
                writeln!(
                    w,
                    "{:<8}{:>10}{:>16}{:>9}",
                    row.spec, row.distinct_labels, bound, row.max_label_len
                )
                .ok();
            }
        }
    }
    finish(w, "-")
}

fn cmd_gen(args: GenArgs) -> Result<(), CliError> {
    if args.min_tokens < 1 || args.min_tokens > args.max_tokens {
        return Err(CliError::General(
            "token bounds must satisfy 1 <= min-tokens <= max-tokens".to_string(),
        ));
    }
    let cfg = GraphGenConfig {
        sentences: args.sentences,
        min_tokens: args.min_tokens,
        max_tokens: args.max_tokens,
        density: args.density,
        right_bias: args.right_bias,
        allow_cycles: !args.forbid_cycles,
        root_prob: args.root_prob,
        relation_vocab: args.relation_vocab,
        seed: args.seed,
    };
    let doc = if args.trees {
        generate_trees(&cfg)
    } else {
        generate_corpus(&cfg)
    };
    write_corpus(&args.output, args.format, &doc)
}
