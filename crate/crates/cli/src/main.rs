//! Experiment and encoding command line. Exit codes: 0 success, 1 usage
//! error, 2 data error.

use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use featurehash::data::{load_sms, load_wili};
use featurehash::experiment::{
    encode_tokens, run_sms, run_synthetic, run_wili, write_csv, write_json_lines, ExperimentConfig,
    Method, ResultRow,
};
use featurehash::tokenize::{lowercase_codepoints, Tokenizer};
use featurehash::vector::cosine;

#[derive(Parser)]
#[command(
    name = "featurehash",
    version,
    about = "Hashed bag-of-words encoders (hashing trick and additive hashing) with \
             similarity and classification experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mean n-gram similarity between random strings and perturbed copies,
    /// over p = 0, 0.05, ..., 1. Always emits the additive-hashing curve
    /// next to a hashing-trick curve (pass --method ht-unsigned to switch
    /// the trick variant).
    Synthetic {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Nearest-neighbor language recognition over a directory with
    /// x_train.txt, y_train.txt, x_test.txt, y_test.txt (one paragraph or
    /// label per line).
    Wili {
        #[command(flatten)]
        common: CommonArgs,
        /// Dataset directory.
        #[arg(long)]
        data: PathBuf,
        /// Desk-scale subset: lexicographically first K languages.
        #[arg(long, default_value_t = 20)]
        subset_languages: usize,
        /// Desk-scale subset: paragraphs kept per language and split.
        #[arg(long, default_value_t = 100)]
        per_class: usize,
        /// Classify the full corpus instead of the subset (long run).
        #[arg(long)]
        full: bool,
    },
    /// Spam-filtering metrics (ACC, SC, BH) over seeded 50/50 splits of a
    /// `label<TAB>text` corpus with ham/spam labels.
    Sms {
        #[command(flatten)]
        common: CommonArgs,
        /// Corpus file.
        #[arg(long)]
        data: PathBuf,
    },
    /// Encode one document and print its feature vector.
    Encode {
        /// Document text; read from standard input when omitted.
        text: Option<String>,
        #[command(flatten)]
        enc: EncodeArgs,
    },
    /// Cosine similarity between two documents.
    Similarity {
        text_a: String,
        text_b: String,
        #[command(flatten)]
        enc: EncodeArgs,
    },
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum TokenizerKind {
    /// Split on single spaces.
    Words,
    /// Lowercased runs of word characters, two or more code points.
    Normalized,
    /// Character n-grams of length --ngram.
    Ngram,
}

#[derive(Args)]
struct CommonArgs {
    /// Restrict to one method (ah, ht, ht-unsigned); default runs ah and ht.
    #[arg(long)]
    method: Option<Method>,
    /// Character n-gram length.
    #[arg(long, default_value_t = 3)]
    ngram: usize,
    /// Dimension exponents l (one value per L = 2^l), comma separated.
    #[arg(long, value_delimiter = ',')]
    dims: Option<Vec<u32>>,
    /// Number of trials (per-trial seed is --seed + trial index).
    #[arg(long)]
    trials: Option<usize>,
    /// Base seed for all randomness.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Lowercase text before n-gram extraction.
    #[arg(long)]
    lowercase: bool,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
}

#[derive(Args)]
struct EncodeArgs {
    /// Encoding method.
    #[arg(long, default_value = "ah")]
    method: Method,
    /// Tokenizer.
    #[arg(long, value_enum, default_value_t = TokenizerKind::Ngram)]
    tokenizer: TokenizerKind,
    /// Character n-gram length (ngram tokenizer only).
    #[arg(long, default_value_t = 3)]
    ngram: usize,
    /// Dimension exponents l; the first is used (L = 2^l).
    #[arg(long, value_delimiter = ',', default_value = "10")]
    dims: Vec<u32>,
    /// Lowercase text before tokenizing.
    #[arg(long)]
    lowercase: bool,
    /// Output format.
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
}

enum CliError {
    Lib(featurehash::Error),
    Io(io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(e) if e.is_data_error() => 2,
            CliError::Lib(_) => 1,
            CliError::Io(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Lib(e) => e.fmt(f),
            CliError::Io(e) => e.fmt(f),
        }
    }
}

impl From<featurehash::Error> for CliError {
    fn from(e: featurehash::Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests land here too; only real parse
            // failures are usage errors.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        // A reader closing our stdout early (e.g. `| head`) is not an error.
        Err(CliError::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Synthetic { common } => {
            let methods = match common.method {
                Some(Method::HtUnsigned) => vec![Method::Additive, Method::HtUnsigned],
                _ => vec![Method::Additive, Method::HtSigned],
            };
            let cfg = experiment_config(&common, methods, vec![7, 8, 9, 10], 100);
            let rows = run_synthetic(&cfg)?;
            emit_rows(&rows, &common)
        }
        Command::Wili {
            common,
            data,
            subset_languages,
            per_class,
            full,
        } => {
            if full {
                eprintln!(
                    "warning: --full classifies the whole test corpus against the whole \
                     training corpus; expect a very long run"
                );
            }
            let mut cfg = experiment_config(&common, default_methods(&common), vec![4, 11], 1);
            cfg.subset_languages = subset_languages;
            cfg.per_class = per_class;
            cfg.full = full;
            let dataset = load_wili(&data)?;
            let rows = run_wili(&cfg, &dataset)?;
            emit_rows(&rows, &common)
        }
        Command::Sms { common, data } => {
            let cfg = experiment_config(&common, default_methods(&common), vec![12], 20);
            let corpus = load_sms(&data)?;
            let rows = run_sms(&cfg, &corpus)?;
            emit_rows(&rows, &common)
        }
        Command::Encode { text, enc } => {
            let text = match text {
                Some(t) => t,
                None => read_stdin()?,
            };
            let vector = encode_document(&text, &enc)?;
            let line = match enc.format {
                OutputFormat::Csv => vector
                    .values()
                    .iter()
                    .map(f64::to_string)
                    .collect::<Vec<_>>()
                    .join(","),
                OutputFormat::Json => serde_json::to_string(vector.values())
                    .expect("vector serialization cannot fail"),
            };
            writeln!(io::stdout(), "{line}")?;
            Ok(())
        }
        Command::Similarity {
            text_a,
            text_b,
            enc,
        } => {
            let u = encode_document(&text_a, &enc)?;
            let v = encode_document(&text_b, &enc)?;
            let similarity = cosine(&u, &v).map_err(CliError::from)?;
            let line = match enc.format {
                OutputFormat::Csv => similarity.to_string(),
                OutputFormat::Json => format!("{{\"similarity\":{similarity}}}"),
            };
            writeln!(io::stdout(), "{line}")?;
            Ok(())
        }
    }
}

fn default_methods(common: &CommonArgs) -> Vec<Method> {
    match common.method {
        Some(m) => vec![m],
        None => vec![Method::Additive, Method::HtSigned],
    }
}

fn experiment_config(
    common: &CommonArgs,
    methods: Vec<Method>,
    default_dims: Vec<u32>,
    default_trials: usize,
) -> ExperimentConfig {
    ExperimentConfig {
        methods,
        ngram: common.ngram,
        dim_exponents: common.dims.clone().unwrap_or(default_dims),
        trials: common.trials.unwrap_or(default_trials),
        seed: common.seed,
        lowercase: common.lowercase,
        ..ExperimentConfig::default()
    }
}

fn read_stdin() -> Result<String, CliError> {
    let mut text = String::new();
    io::stdin().read_to_string(&mut text)?;
    Ok(text)
}

fn encode_document(text: &str, enc: &EncodeArgs) -> Result<featurehash::FeatureVector, CliError> {
    let text = if enc.lowercase {
        lowercase_codepoints(text)
    } else {
        text.to_owned()
    };
    let tokenizer = match enc.tokenizer {
        TokenizerKind::Words => Tokenizer::Words,
        TokenizerKind::Normalized => Tokenizer::NormalizedWords,
        TokenizerKind::Ngram => Tokenizer::CharNgrams { n: enc.ngram },
    };
    let tokens = tokenizer.tokenize(&text).map_err(CliError::from)?;
    let exponent = *enc.dims.first().ok_or_else(|| {
        featurehash::Error::InvalidArgument("at least one dimension exponent is required".into())
    })?;
    if exponent > 30 {
        return Err(featurehash::Error::InvalidArgument(format!(
            "dimension exponent {exponent} is out of range (max 30)"
        ))
        .into());
    }
    Ok(encode_tokens(enc.method, &tokens, 1usize << exponent)?)
}

fn emit_rows(rows: &[ResultRow], common: &CommonArgs) -> Result<(), CliError> {
    match &common.out {
        Some(path) => {
            let file = File::create(path)?;
            let mut out = BufWriter::new(file);
            write_rows(rows, common.format, &mut out)?;
            out.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut out = stdout.lock();
            write_rows(rows, common.format, &mut out)?;
        }
    }
    Ok(())
}

fn write_rows<W: Write>(rows: &[ResultRow], format: OutputFormat, out: W) -> io::Result<()> {
    match format {
        OutputFormat::Csv => write_csv(rows, out),
        OutputFormat::Json => write_json_lines(rows, out),
    }
}
