use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use bhasha::features::{CountMode, LengthMode};
use bhasha::ks::PValueMethod;
use bhasha::morphology::{evaluate, load_segmentation_file, train_baseline, Segmenter};
use bhasha::pipeline::{
    self, merge_specs, CompareOptions, CorpusProfile, CorpusSpec, ErrorCategory, PipelineError,
    ProfileOptions, RunConfig, SegmenterSource, WordCounts,
};
use bhasha::report::render_report;
use bhasha::EvalReportF64;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "bhasha",
    version,
    about = "Compare Bengali text corpora with Kolmogorov-Smirnov tests"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Profile the corpora, compare every pair and write the report.
    Analyze {
        #[command(flatten)]
        corpora: CorpusArgs,
        #[command(flatten)]
        profile: ProfileArgs,
        #[command(flatten)]
        compare: CompareArgs,
        /// Output directory; receives profiles/ and report/.
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Build corpus profiles and save them as JSON.
    Profile {
        #[command(flatten)]
        corpora: CorpusArgs,
        #[command(flatten)]
        profile: ProfileArgs,
        #[arg(long, default_value = "out/profiles")]
        out: PathBuf,
    },
    /// Compare saved profiles and write the report.
    Compare {
        /// Profile JSON files, in report order.
        #[arg(required = true, num_args = 2..)]
        profiles: Vec<PathBuf>,
        #[command(flatten)]
        compare: CompareArgs,
        #[arg(long, default_value = "out/report")]
        out: PathBuf,
    },
    /// Score a segmenter against a gold segmentation file.
    EvaluateSegmentation {
        /// Gold file, one `word<TAB>pre+<root>+suf` entry per line.
        #[arg(long)]
        gold: PathBuf,
        /// Corpora whose vocabulary trains the baseline segmenter.
        #[arg(long = "corpus", value_name = "NAME=PATH")]
        corpus: Vec<String>,
        #[command(flatten)]
        profile: ProfileArgs,
    },
}

#[derive(Args)]
struct CorpusArgs {
    /// Corpus as NAME=PATH; repeat the flag to add more paths to a name.
    #[arg(long = "corpus", value_name = "NAME=PATH", required = true)]
    corpus: Vec<String>,
}

#[derive(Args)]
struct ProfileArgs {
    /// `baseline` or a segmentation file.
    #[arg(long, default_value = "baseline")]
    segmenter: String,
    #[arg(long, value_enum, default_value_t = CountArg::Tokens)]
    count_mode: CountArg,
    /// Sentences with fewer words are dropped from the sentence-length feature.
    #[arg(long, default_value_t = 1)]
    min_sentence_len: usize,
    /// Count non-Bengali tokens towards sentence length.
    #[arg(long)]
    count_foreign_words: bool,
    /// Include roots in the morpheme unigram table.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    morpheme_count_roots: bool,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long, default_value_t = pipeline::DEFAULT_TOP_K)]
    top_k: usize,
    #[arg(long, value_enum, default_value_t = LengthArg::Relative)]
    length_mode: LengthArg,
    /// Significance level.
    #[arg(long, default_value_t = pipeline::DEFAULT_ALPHA)]
    alpha: f64,
    /// Use exact permutation p-values where the sample sizes allow.
    #[arg(long)]
    exact_pvalues: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum CountArg {
    Tokens,
    Types,
}

#[derive(Clone, Copy, ValueEnum)]
enum LengthArg {
    Relative,
    Raw,
}

impl ProfileArgs {
    fn options(&self) -> ProfileOptions {
        let segmenter = if self.segmenter == "baseline" {
            SegmenterSource::Baseline
        } else {
            SegmenterSource::File(PathBuf::from(&self.segmenter))
        };
        ProfileOptions {
            segmenter,
            count_mode: match self.count_mode {
                CountArg::Tokens => CountMode::Tokens,
                CountArg::Types => CountMode::Types,
            },
            min_sentence_len: self.min_sentence_len,
            count_foreign_words: self.count_foreign_words,
            morpheme_count_roots: self.morpheme_count_roots,
            ..ProfileOptions::default()
        }
    }
}

impl CompareArgs {
    fn options(&self) -> CompareOptions {
        CompareOptions {
            top_k: self.top_k,
            length_mode: match self.length_mode {
                LengthArg::Relative => LengthMode::Relative,
                LengthArg::Raw => LengthMode::Raw,
            },
            alpha: self.alpha,
            pvalue_method: if self.exact_pvalues {
                PValueMethod::Exact
            } else {
                PValueMethod::Asymptotic
            },
        }
    }
}

fn parse_corpora(args: &[String]) -> Result<Vec<CorpusSpec>, PipelineError> {
    let specs = args
        .iter()
        .map(|a| CorpusSpec::parse(a))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(merge_specs(specs))
}

fn print_paths(paths: &[PathBuf]) {
    for p in paths {
        println!("{}", p.display());
    }
}

fn run_evaluation(
    gold_path: &Path,
    corpora: &[String],
    profile: &ProfileArgs,
) -> Result<EvalReportF64, PipelineError> {
    let gold = load_segmentation_file(gold_path)?;
    let opts = profile.options();
    let segmenter: Box<dyn Segmenter> = match &opts.segmenter {
        SegmenterSource::File(path) => {
            Box::new(bhasha::morphology::SegmentationLexicon::load(path)?)
        }
        SegmenterSource::Baseline => {
            let specs = parse_corpora(corpora)?;
            if specs.is_empty() {
                return Err(PipelineError::Config(
                    "the baseline segmenter needs at least one --corpus to train on".into(),
                ));
            }
            let mut vocabulary = BTreeMap::new();
            for spec in &specs {
                let corpus = pipeline::ingest(spec, &opts.tokenizer)?;
                let counts = WordCounts::from_corpus(&corpus, &opts)?;
                for (w, &n) in counts.unigrams.counts() {
                    *vocabulary.entry(w.clone()).or_insert(0u64) += n;
                }
            }
            Box::new(train_baseline(&vocabulary, opts.strip_limits)?)
        }
    };
    let predicted = gold
        .keys()
        .map(|w| (w.clone(), segmenter.segment(w)))
        .collect();
    Ok(evaluate(&predicted, &gold)?)
}

fn run(cli: Cli) -> Result<(), PipelineError> {
    match cli.command {
        Command::Analyze {
            corpora,
            profile,
            compare,
            out,
        } => {
            let cfg = RunConfig {
                corpora: parse_corpora(&corpora.corpus)?,
                profile: profile.options(),
                compare: compare.options(),
                output_dir: out,
            };
            print_paths(&pipeline::analyze(&cfg)?);
        }
        Command::Profile {
            corpora,
            profile,
            out,
        } => {
            let specs = parse_corpora(&corpora.corpus)?;
            let opts = profile.options();
            for p in pipeline::profile_corpora(&specs, &opts)? {
                println!("{}", p.save(&out, opts.retained_keys)?.display());
            }
        }
        Command::Compare {
            profiles,
            compare,
            out,
        } => {
            let opts = compare.options();
            let profiles = profiles
                .iter()
                .map(|p| CorpusProfile::load(p))
                .collect::<Result<Vec<_>, _>>()?;
            let cells = pipeline::compare_all(&profiles, &opts)?;
            print_paths(&render_report(&profiles, &cells, &opts, &out)?);
        }
        Command::EvaluateSegmentation {
            gold,
            corpus,
            profile,
        } => {
            let report = run_evaluation(&gold, &corpus, &profile)?;
            println!(
                "accuracy {:.4}\nprecision {:.4}\nrecall {:.4}\nf-score {:.4}",
                report.accuracy, report.precision, report.recall, report.fscore
            );
        }
    }
    Ok(())
}

fn exit_code(category: ErrorCategory) -> u8 {
    match category {
        ErrorCategory::Config => 2,
        ErrorCategory::Io => 3,
        ErrorCategory::Encoding => 4,
        ErrorCategory::Data => 5,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli).context("bhasha failed") {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {:#}", err);
            let code = err
                .downcast_ref::<PipelineError>()
                .map_or(1, |e| exit_code(e.category()));
            ExitCode::from(code)
        }
    }
}
