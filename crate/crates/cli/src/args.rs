use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "postedit",
    version,
    about = "Post-editing toolkit for speech recognizer output"
)]
pub struct Cli {
    /// Global random seed (overrides the config file).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for per-record parallelism.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// TOML configuration file; flags take precedence over its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Look up pronunciations.
    G2p(G2pArgs),
    /// Corrupt reference sentences into synthetic recognizer output.
    Synth(SynthArgs),
    /// Perturb inflectional endings in a POS-tagged corpus.
    GecSynth(GecSynthArgs),
    /// Build masked training records.
    Prep(PrepArgs),
    /// Train an n-gram language model.
    TrainLm(TrainLmArgs),
    /// Correct hypotheses with the lexicon and an LM, or an external process.
    Correct(CorrectArgs),
    /// Combine hypotheses from several systems by voting.
    Rover(RoverArgs),
    /// Word and character error rates.
    Score(ScoreArgs),
    /// GLEU of hypotheses against references and sources.
    Gleu(GleuArgs),
}

#[derive(Debug, Args)]
pub struct LexiconArgs {
    /// Pronouncing dictionary in CMU format.
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    /// Disable the spelling-based fallback for unknown words.
    #[arg(long)]
    pub no_fallback: bool,
    /// Keep stress digits when matching pronunciations.
    #[arg(long)]
    pub strict_stress: bool,
}

#[derive(Debug, Args)]
pub struct G2pArgs {
    #[command(flatten)]
    pub lexicon: LexiconArgs,
    /// Words to look up.
    pub words: Vec<String>,
    /// File of whitespace-separated words.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Channel {
    Synthetic1,
    Synthetic2,
    External,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[command(flatten)]
    pub lexicon: LexiconArgs,
    /// JSONL corpus or plain text with one reference per line.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "synthetic1")]
    pub channel: Channel,
    #[arg(long)]
    pub p_replace: Option<f64>,
    #[arg(long)]
    pub max_edit: Option<usize>,
    /// Draw from words one phoneme away instead of exact homophones.
    #[arg(long)]
    pub near_pronunciation: bool,
    /// Hypothesis table (`id<TAB>sentence`) for the external channel.
    #[arg(long)]
    pub hyps: Option<PathBuf>,
    /// Corpus JSONL with hypotheses.
    #[arg(long, short)]
    pub output: PathBuf,
    /// Per-record edit log as JSONL.
    #[arg(long)]
    pub edits: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GecSynthArgs {
    /// `token<TAB>tag` lines, blank line between sentences.
    #[arg(long)]
    pub input: PathBuf,
    /// Inflection table: `TAG<TAB>ending ending ...`.
    #[arg(long)]
    pub table: PathBuf,
    #[arg(long)]
    pub p_replace: Option<f64>,
    /// `corrupted<TAB>original` per sentence.
    #[arg(long, short)]
    pub output: PathBuf,
    #[arg(long)]
    pub edits: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PrepFormat {
    Jsonl,
    Tsv,
}

#[derive(Debug, Args)]
pub struct PrepArgs {
    #[command(flatten)]
    pub lexicon: LexiconArgs,
    /// Corpus JSONL whose records carry hypotheses.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, short)]
    pub output: PathBuf,
    #[arg(long, value_enum, default_value = "jsonl")]
    pub format: PrepFormat,
    #[arg(long)]
    pub with_phonemes: bool,
    #[arg(long)]
    pub max_len: Option<usize>,
    #[arg(long)]
    pub token_rate: Option<f64>,
    #[arg(long)]
    pub random_fraction: Option<f64>,
    #[arg(long)]
    pub error_focused_fraction: Option<f64>,
    #[arg(long)]
    pub mask_token: Option<String>,
    /// Only mask hypothesis tokens, never phonemes.
    #[arg(long)]
    pub hypothesis_only: bool,
}

#[derive(Debug, Args)]
pub struct TrainLmArgs {
    /// Plain text, one sentence per line, or a JSONL corpus (references).
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub order: Option<usize>,
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long, short)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct CorrectArgs {
    #[command(flatten)]
    pub lexicon: LexiconArgs,
    /// Hypothesis table (`id<TAB>sentence`) or JSONL corpus with hypotheses.
    #[arg(long)]
    pub input: PathBuf,
    /// Saved language model.
    #[arg(long, conflicts_with_all = ["lm_corpus", "external"])]
    pub lm: Option<PathBuf>,
    /// Train a language model on this text before correcting.
    #[arg(long, conflicts_with = "external")]
    pub lm_corpus: Option<PathBuf>,
    /// External corrector command line, split on whitespace.
    #[arg(long)]
    pub external: Option<String>,
    #[arg(long)]
    pub beam: Option<usize>,
    #[arg(long)]
    pub order: Option<usize>,
    #[arg(long)]
    pub k: Option<f64>,
    /// Also propose near-homophones within the spelling distance limit.
    #[arg(long)]
    pub sound_alikes: bool,
    /// Seconds to wait for each external answer.
    #[arg(long)]
    pub timeout: Option<f64>,
    /// `id<TAB>corrected sentence`.
    #[arg(long, short)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct RoverArgs {
    /// Hypothesis tables, base system first. Repeat for each system.
    #[arg(long = "hyps", required = true, num_args = 1)]
    pub hyps: Vec<PathBuf>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub epsilon_conf: Option<f64>,
    /// Token confidence for a system whose table has none, in system order.
    #[arg(long = "conf", num_args = 1)]
    pub conf: Vec<f64>,
    #[arg(long, short)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// Reference text, one sentence per line.
    #[arg(long, requires = "hyp", conflicts_with_all = ["corpus", "pairs"])]
    pub reference: Option<PathBuf>,
    /// Hypothesis text parallel to --reference, or a hypothesis table
    /// matched by id with --corpus.
    #[arg(long)]
    pub hyp: Option<PathBuf>,
    /// JSONL corpus; uses each record's hypothesis unless --hyp is given.
    #[arg(long, conflicts_with = "pairs")]
    pub corpus: Option<PathBuf>,
    /// `id<TAB>reference<TAB>hypothesis` table.
    #[arg(long)]
    pub pairs: Option<PathBuf>,
    /// Per-sentence TSV report.
    #[arg(long)]
    pub per_sentence: Option<PathBuf>,
    /// Print the summary as JSON.
    #[arg(long)]
    pub json: bool,
    /// Also write the summary to this file.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GleuArgs {
    #[arg(long)]
    pub source: PathBuf,
    #[arg(long)]
    pub reference: PathBuf,
    #[arg(long)]
    pub hypothesis: PathBuf,
    #[arg(long)]
    pub n_max: Option<usize>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}
