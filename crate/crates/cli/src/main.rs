use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use speechnet::corpus::{write_jsonl, CorpusFormat};
use speechnet::network::LinkRule;
use speechnet::synthetic::{generate, SyntheticSpec};
use speechnet::{Pipeline, PipelineConfig, PipelineError, Stage, Weighting};

/// Topic models and speaker networks from parliamentary speeches.
#[derive(Parser)]
#[command(name = "speechnet", version)]
struct Cli {
    /// TOML configuration file. Flags override its values.
    #[arg(short, long, global = true)]
    config: Option<PathBuf>,

    /// Repeat for more log output.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(flatten)]
    overrides: Overrides,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the effective configuration and check it.
    Validate,
    /// Run every stage.
    Run,
    /// Parse, filter and tokenize the speeches.
    Corpus,
    /// Fit the topic model.
    Lda,
    /// Speaker-year proportions, yearly series and word counts.
    Aggregate,
    /// Per-term graphs, homophily and communities.
    Network,
    /// Write the synthetic demonstration corpus.
    Synth {
        /// Destination JSONL file.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        speakers: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleArg {
    AnyYear,
    TermAggregate,
}

#[derive(Clone, Copy, ValueEnum)]
enum WeightingArg {
    Words,
    Uniform,
}

#[derive(Args)]
struct Overrides {
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    #[arg(long, global = true)]
    format: Option<CorpusFormat>,
    #[arg(long, global = true, env = "SPEECHNET_OUTPUT_DIR")]
    output_dir: Option<PathBuf>,
    /// Extra stopword file; repeatable.
    #[arg(long = "stopwords", global = true)]
    stopwords: Vec<PathBuf>,
    #[arg(long, global = true)]
    no_builtin_stopwords: bool,
    #[arg(long, global = true)]
    procedural_stopwords: bool,
    #[arg(long, global = true)]
    min_words_speech: Option<usize>,
    #[arg(long, global = true)]
    topics: Option<usize>,
    #[arg(long, global = true)]
    alpha: Option<f64>,
    #[arg(long, global = true)]
    beta: Option<f64>,
    #[arg(long, global = true)]
    iterations: Option<usize>,
    #[arg(long, global = true)]
    burn_in: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Topic id to drop from downstream stages; repeatable.
    #[arg(long = "exclude-topic", global = true)]
    exclude_topics: Vec<usize>,
    #[arg(long, global = true)]
    top_words: Option<usize>,
    #[arg(long, global = true, value_enum)]
    weighting: Option<WeightingArg>,
    #[arg(long, global = true)]
    link_threshold: Option<f64>,
    #[arg(long, global = true, value_enum)]
    link_rule: Option<RuleArg>,
    #[arg(long, global = true)]
    min_words_speaker_term: Option<u64>,
    #[arg(long, global = true)]
    null_runs: Option<usize>,
    #[arg(long, global = true)]
    swaps_per_edge: Option<usize>,
    /// Term to build a network for; repeatable.
    #[arg(long = "term", global = true)]
    terms: Vec<u32>,
    #[arg(long, global = true)]
    speaker_labels: Option<PathBuf>,
    #[arg(long, global = true)]
    top_communities: Option<usize>,
    #[arg(long, global = true)]
    serial: bool,
    #[arg(long, global = true)]
    no_cache: bool,
}

impl Overrides {
    fn apply(self, c: &mut PipelineConfig) {
        macro_rules! set {
            ($($f:ident),*) => { $(if let Some(v) = self.$f { c.$f = v; })* };
        }
        set!(
            input,
            format,
            output_dir,
            min_words_speech,
            topics,
            beta,
            iterations,
            burn_in,
            seed,
            top_words,
            link_threshold,
            min_words_speaker_term,
            null_runs,
            swaps_per_edge,
            top_communities
        );
        if self.alpha.is_some() {
            c.alpha = self.alpha;
        }
        if self.speaker_labels.is_some() {
            c.speaker_labels = self.speaker_labels;
        }
        if !self.stopwords.is_empty() {
            c.stopwords = self.stopwords;
        }
        if !self.exclude_topics.is_empty() {
            c.excluded_topics = self.exclude_topics;
        }
        if !self.terms.is_empty() {
            c.terms = self.terms;
        }
        if let Some(w) = self.weighting {
            c.weighting = match w {
                WeightingArg::Words => Weighting::Words,
                WeightingArg::Uniform => Weighting::Uniform,
            };
        }
        if let Some(r) = self.link_rule {
            c.link_rule = match r {
                RuleArg::AnyYear => LinkRule::AnyYear,
                RuleArg::TermAggregate => LinkRule::TermAggregate,
            };
        }
        if self.no_builtin_stopwords {
            c.builtin_stopwords = false;
        }
        if self.procedural_stopwords {
            c.procedural_stopwords = true;
        }
        if self.serial {
            c.parallel = false;
        }
        if self.no_cache {
            c.cache = false;
        }
    }
}

fn fail(e: &PipelineError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    if let Command::Synth {
        out,
        seed,
        speakers,
    } = &cli.command
    {
        let mut spec = SyntheticSpec::default();
        if let Some(s) = seed {
            spec.seed = *s;
        }
        if let Some(n) = speakers {
            spec.speakers = *n;
        }
        let records = generate(&spec);
        let written = File::create(out).and_then(|f| write_jsonl(BufWriter::new(f), &records));
        return match written {
            Ok(()) => {
                println!("wrote {} speeches to {}", records.len(), out.display());
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {}: {e}", out.display());
                ExitCode::from(2)
            }
        };
    }

    let mut config = match &cli.config {
        Some(path) => match PipelineConfig::load(path) {
            Ok(c) => c,
            Err(e) => return fail(&e),
        },
        None => PipelineConfig::default(),
    };
    cli.overrides.apply(&mut config);

    let stages: &[Stage] = match cli.command {
        Command::Validate => {
            print!("{}", config.describe());
            let report = config.validate();
            if report.is_ok() {
                println!("configuration is valid");
                return ExitCode::SUCCESS;
            }
            eprintln!("configuration has {} problem(s):", report.violations.len());
            eprint!("{report}");
            return ExitCode::from(1);
        }
        Command::Run => &Stage::ALL,
        Command::Corpus => &[Stage::Corpus],
        Command::Lda => &[Stage::Lda],
        Command::Aggregate => &[Stage::Aggregate],
        Command::Network => &[Stage::Network],
        Command::Synth { .. } => unreachable!(),
    };

    let pipeline = match Pipeline::new(config) {
        Ok(p) => p,
        Err(e) => return fail(&e),
    };
    match pipeline.run_stages(stages) {
        Ok(manifest) => {
            for rec in &manifest.stages {
                if stages.contains(&rec.stage) {
                    println!(
                        "{:<10} {:?} {} ms",
                        rec.stage.name(),
                        rec.status,
                        rec.wall_time_ms
                    );
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}
