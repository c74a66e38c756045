use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use morphtok::coverage::{coverage_curve, default_ks, write_coverage_csv};
use morphtok::morphdata::{load_corpus, load_gold, Corpus, MorphAnalysis};
use morphtok::pipeline::{evaluate, run_sweep, BootstrapSettings, EvalOptions};
use morphtok::report::{reports_markdown, write_reports_csv, MetricsReport};
use morphtok::tokenizers::{
    pretokenized_adapter, CharTokenizer, Tokenizer, Vocabulary, WordPieceTokenizer, WordTokenizer,
};
use morphtok::wptrainer::{rank_words, top_k_vocab, train_wordpiece, TrainerConfig};

#[derive(Parser)]
#[command(name = "morphtok", version, about = "Morphology-aware diagnostics for subword tokenizers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a WordPiece vocabulary on a whitespace-tokenized corpus.
    Train(TrainArgs),
    /// Evaluate one tokenizer against gold splits.
    Eval(EvalArgs),
    /// Train one vocabulary per size and evaluate each on the gold splits.
    Sweep(SweepArgs),
    /// Top-K word vocabulary coverage on train and test corpora.
    Coverage(CoverageArgs),
}

#[derive(Args)]
struct TrainerArgs {
    /// key=value trainer config (target_vocab_size, min_pair_frequency, special_tokens, continuation_marker).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    min_pair_frequency: Option<u64>,
}

impl TrainerArgs {
    fn load(&self) -> Result<TrainerConfig> {
        let mut cfg = match &self.config {
            Some(p) => TrainerConfig::load(p)?,
            None => TrainerConfig::default(),
        };
        if let Some(m) = self.min_pair_frequency {
            cfg.min_pair_frequency = m;
        }
        Ok(cfg)
    }
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    vocab_size: Option<usize>,
    #[command(flatten)]
    trainer: TrainerArgs,
    /// Output vocabulary file, one entry per line.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvalOpts {
    /// Gold split as NAME=PATH or PATH (name taken from the file stem). Repeatable.
    #[arg(long = "gold", required = true)]
    gold: Vec<String>,
    /// Number of suffix types in the affix set.
    #[arg(long, default_value_t = morphtok::metrics::DEFAULT_AFFIX_TOP)]
    affix_top: usize,
    /// Bootstrap resamples for per-metric confidence intervals (0 disables).
    #[arg(long, default_value_t = 0)]
    bootstrap: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

impl EvalOpts {
    fn options(&self) -> EvalOptions {
        EvalOptions {
            affix_top: self.affix_top,
            bootstrap: (self.bootstrap > 0).then_some(BootstrapSettings {
                resamples: self.bootstrap,
                seed: self.seed,
            }),
            ..EvalOptions::default()
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TokenizerKind {
    Char,
    Word,
    Wordpiece,
    Pretokenized,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Md,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long, value_enum)]
    tokenizer: TokenizerKind,
    /// Vocabulary file (word, wordpiece) or JSON Lines segmentations (pretokenized).
    #[arg(long)]
    vocab: Option<PathBuf>,
    /// Corpus for building a word vocabulary when no --vocab is given.
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long)]
    top_k: Option<usize>,
    #[arg(long, default_value = "##")]
    marker: String,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Format::Json, Format::Csv, Format::Md])]
    format: Vec<Format>,
    #[command(flatten)]
    common: EvalOpts,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    corpus: PathBuf,
    /// Comma-separated target vocabulary sizes.
    #[arg(long, value_delimiter = ',', required = true)]
    vocab_sizes: Vec<usize>,
    #[command(flatten)]
    trainer: TrainerArgs,
    #[command(flatten)]
    common: EvalOpts,
}

#[derive(Args)]
struct CoverageArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    test_corpus: PathBuf,
    /// Comma-separated prefix sizes; defaults to 20 log-spaced points.
    #[arg(long, value_delimiter = ',')]
    ks: Vec<usize>,
    #[arg(long)]
    out: PathBuf,
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Train(a) => train(a),
        Command::Eval(a) => eval(a),
        Command::Sweep(a) => sweep(a),
        Command::Coverage(a) => coverage(a),
    }
}

fn corpus(path: &Path) -> Result<Corpus> {
    let c = load_corpus(path).with_context(|| format!("loading corpus {}", path.display()))?;
    if c.is_empty() {
        bail!("corpus {} has no words", path.display());
    }
    Ok(c)
}

fn gold_splits(specs: &[String]) -> Result<Vec<(String, Vec<MorphAnalysis>)>> {
    let mut splits = Vec::new();
    for spec in specs {
        let (name, path) = match spec.split_once('=') {
            Some((n, p)) => (n.to_owned(), PathBuf::from(p)),
            None => {
                let p = PathBuf::from(spec);
                let n = p
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| spec.clone());
                (n, p)
            }
        };
        let g = load_gold(&path).with_context(|| format!("loading gold {}", path.display()))?;
        for e in &g.errors {
            log::warn!("{}: {e}", path.display());
        }
        if !g.errors.is_empty() {
            eprintln!("{}: skipped {} malformed line(s)", path.display(), g.errors.len());
        }
        splits.push((name, g.items));
    }
    Ok(splits)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn out_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn train(a: TrainArgs) -> Result<()> {
    let mut cfg = a.trainer.load()?;
    if let Some(n) = a.vocab_size {
        cfg.target_vocab_size = n;
    }
    let trained = train_wordpiece(&corpus(&a.corpus)?, &cfg)?;
    trained.vocab.save(&a.out)?;
    println!(
        "wrote {} entries ({} base, {} merges{}) to {}",
        trained.vocab.len(),
        trained.base_size,
        trained.merges,
        if trained.exhausted { ", merges exhausted" } else { "" },
        a.out.display()
    );
    Ok(())
}

fn build_tokenizer(a: &EvalArgs) -> Result<Box<dyn Tokenizer>> {
    let vocab = |p: &Path| {
        Vocabulary::load(p, &a.marker).with_context(|| format!("loading vocabulary {}", p.display()))
    };
    Ok(match a.tokenizer {
        TokenizerKind::Char => Box::new(CharTokenizer),
        TokenizerKind::Wordpiece => {
            let Some(p) = &a.vocab else { bail!("--tokenizer wordpiece needs --vocab") };
            Box::new(WordPieceTokenizer::new(vocab(p)?))
        }
        TokenizerKind::Word => match (&a.vocab, &a.corpus) {
            (Some(p), _) => Box::new(WordTokenizer::new(vocab(p)?)),
            (None, Some(c)) => {
                let ranking = rank_words(&corpus(c)?)?;
                let k = a.top_k.unwrap_or(ranking.len());
                Box::new(WordTokenizer::new(top_k_vocab(&ranking, k)?))
            }
            (None, None) => bail!("--tokenizer word needs --vocab or --corpus"),
        },
        TokenizerKind::Pretokenized => {
            let Some(p) = &a.vocab else { bail!("--tokenizer pretokenized needs --vocab <segmentations.jsonl>") };
            let t = pretokenized_adapter(p, &a.marker)
                .with_context(|| format!("loading segmentations {}", p.display()))?;
            if !t.errors.is_empty() {
                eprintln!("{}: {} problem line(s)", p.display(), t.errors.len());
            }
            Box::new(t)
        }
    })
}

fn eval(a: EvalArgs) -> Result<()> {
    let tok = build_tokenizer(&a)?;
    let splits = gold_splits(&a.common.gold)?;
    let opts = a.common.options();
    out_dir(&a.common.out)?;

    let mut reports: Vec<MetricsReport> = Vec::new();
    for (name, items) in &splits {
        match evaluate(name, items, tok.as_ref(), &opts) {
            Ok(r) => reports.push(r),
            Err(e) => eprintln!("split {name}: {e}"),
        }
    }
    if reports.is_empty() {
        bail!("no split could be evaluated");
    }
    write_reports(&reports, &a.common.out, &a.format)?;
    print!("{}", reports_markdown(&reports));
    Ok(())
}

fn write_reports(reports: &[MetricsReport], dir: &Path, formats: &[Format]) -> Result<()> {
    if formats.contains(&Format::Json) {
        for r in reports {
            let path = dir.join(format!("report-{}-{}.json", r.tokenizer, r.split));
            fs::write(&path, r.to_json()? + "\n").with_context(|| format!("writing {}", path.display()))?;
        }
    }
    if formats.contains(&Format::Csv) {
        write_reports_csv(reports, create(&dir.join("reports.csv"))?)?;
    }
    if formats.contains(&Format::Md) {
        let path = dir.join("reports.md");
        fs::write(&path, reports_markdown(reports)).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn sweep(a: SweepArgs) -> Result<()> {
    let cfg = a.trainer.load()?;
    let corpus = corpus(&a.corpus)?;
    let splits = gold_splits(&a.common.gold)?;
    let s = run_sweep(&corpus, &cfg, &a.vocab_sizes, &splits, &a.common.options())?;

    let dir = &a.common.out;
    out_dir(dir)?;
    for (size, v) in &s.vocabularies {
        match v {
            Ok(t) => t.vocab.save(dir.join(format!("vocab-{size}.txt")))?,
            Err(e) => eprintln!("vocab size {size}: {e}"),
        }
    }
    s.write_long_csv(create(&dir.join("sweep.csv"))?)?;
    let md = s.markdown();
    fs::write(dir.join("sweep.md"), &md)?;
    print!("{md}");
    for (lo, hi, ok) in &s.containment {
        if !ok {
            eprintln!("warning: vocab({lo}) is not contained in vocab({hi})");
        }
    }
    if s.rows.iter().all(|r| r.outcome.is_err()) {
        bail!("every sweep configuration failed");
    }
    Ok(())
}

fn coverage(a: CoverageArgs) -> Result<()> {
    let train = corpus(&a.corpus)?;
    let test = corpus(&a.test_corpus)?;
    let ranking = rank_words(&train)?;
    let ks = if a.ks.is_empty() { default_ks(ranking.len()) } else { a.ks };
    let points = coverage_curve(&ranking, &train, &test, &ks)?;
    out_dir(&a.out)?;
    write_coverage_csv(&points, create(&a.out.join("coverage.csv"))?)?;
    println!("|V| = {}", ranking.len());
    for p in &points {
        println!(
            "k={:<8} train={:.4} test={:.4} test_types={:.4}",
            p.k, p.train_coverage, p.test_coverage, p.test_type_coverage
        );
    }
    Ok(())
}
