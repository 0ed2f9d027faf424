mod io;

use std::io::{BufRead, Write};
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{ArgAction, Args, Parser, Subcommand};
use log::{info, warn};

use texo_core::bpe::METASPACE;
use texo_core::catalog::{build_vocab, load_catalog};
use texo_core::eval::{compare_tokenizers, sequence_metrics, token_length_stats};
use texo_core::normalizer::normalize;
use texo_core::tensor::read_tensor;
use texo_core::tokenizer::encode;
use texo_core::transfer::{build_mapping, transfer_embeddings};
use texo_core::{BaseTokenizer, CuratedVocabulary, NormalizationRuleset};

use crate::io::{check_input, check_output, open_input, read_to_string, write_all_files, Sink};

#[derive(Parser)]
#[command(name = "texo", version, about = "Compact LaTeX vocabulary toolkit")]
struct Cli {
    /// More log output on stderr (-v info, -vv debug).
    #[arg(short, long, action = ArgAction::Count, global = true)]
    verbose: u8,

    /// Write output files in place instead of staging them, so a failed run
    /// may leave partial output behind.
    #[arg(long, global = true)]
    partial: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the curated vocabulary from a macro catalog.
    BuildVocab {
        #[arg(long)]
        catalog: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Keep `\begin`/`\end` and environment names as separate tokens.
        #[arg(long)]
        no_fuse_env: bool,
    },
    /// Normalize formulas, one per line.
    Normalize {
        /// Synonym table (TSV). Defaults to the built-in table.
        #[arg(long)]
        rules: Option<PathBuf>,
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Encode formulas with the curated vocabulary, one line per input line.
    Tokenize {
        #[arg(long)]
        vocab: PathBuf,
        /// Emit space-separated ids (default).
        #[arg(long, conflicts_with = "tokens")]
        ids: bool,
        /// Emit space-separated token strings.
        #[arg(long)]
        tokens: bool,
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Token-length statistics as JSON.
    Stats {
        #[arg(long)]
        vocab: PathBuf,
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        rules: Option<PathBuf>,
        #[command(flatten)]
        base: OptionalBase,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads.
        #[arg(long, env = "TEXO_JOBS")]
        jobs: Option<NonZeroUsize>,
    },
    /// Initialize curated embeddings from a base model's embeddings.
    Transfer {
        #[command(flatten)]
        base: RequiredBase,
        #[arg(long)]
        target_vocab: PathBuf,
        #[arg(long)]
        in_emb: PathBuf,
        #[arg(long)]
        out_emb: PathBuf,
        #[arg(long, required_unless_present = "tied")]
        in_proj: Option<PathBuf>,
        #[arg(long, required_unless_present = "tied")]
        out_proj: Option<PathBuf>,
        /// Input and output embeddings are shared: transfer once and, if
        /// `--out-proj` is given, write the same matrix there.
        #[arg(long)]
        tied: bool,
        /// Write the curated-to-base id mapping as TSV.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Exact match and token edit distance between predictions and references.
    Metrics {
        #[arg(long)]
        vocab: PathBuf,
        #[arg(long)]
        pred: PathBuf,
        #[arg(long = "ref")]
        reference: PathBuf,
        #[arg(long)]
        rules: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct OptionalBase {
    #[arg(long, requires = "base_merges")]
    base_vocab: Option<PathBuf>,
    #[arg(long, requires = "base_vocab")]
    base_merges: Option<PathBuf>,
    /// Word-boundary marker of the base tokenizer.
    #[arg(long, default_value = METASPACE)]
    marker: String,
}

#[derive(Args)]
struct RequiredBase {
    #[arg(long)]
    base_vocab: PathBuf,
    #[arg(long)]
    base_merges: PathBuf,
    #[arg(long, default_value = METASPACE)]
    marker: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .parse_env("TEXO_LOG")
        .init();

    match run(cli.command, cli.partial) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command, partial: bool) -> Result<()> {
    match command {
        Command::BuildVocab {
            catalog,
            out,
            no_fuse_env,
        } => {
            check_input(&catalog)?;
            check_output(&out)?;
            let catalog = load_catalog(&catalog)?;
            let vocab = build_vocab(&catalog, !no_fuse_env);
            write_all_files(&[(&out, vocab.to_text().into_bytes())], partial)?;
            println!("vocabulary size: {}", vocab.len());
            Ok(())
        }
        Command::Normalize { rules, input, out } => {
            check_paths(&[rules.as_deref(), input.as_deref()], &[out.as_deref()])?;
            let rules = load_rules(rules.as_deref())?;
            let mut sink = Sink::open(out.as_deref(), partial)?;
            for_each_line(input.as_deref(), |n, line| {
                let normalized = normalize(line, &rules).with_context(|| format!("line {n}"))?;
                writeln!(sink, "{normalized}")?;
                Ok(())
            })?;
            sink.finish()
        }
        Command::Tokenize {
            vocab,
            ids: _,
            tokens,
            input,
            out,
        } => {
            check_paths(&[Some(&vocab), input.as_deref()], &[out.as_deref()])?;
            let vocab = CuratedVocabulary::load(&vocab)?;
            let mut sink = Sink::open(out.as_deref(), partial)?;
            for_each_line(input.as_deref(), |n, line| {
                let ids = encode(&vocab, line).with_context(|| format!("line {n}"))?;
                let fields: Vec<String> = if tokens {
                    ids.iter()
                        .map(|&id| vocab.token(id).unwrap_or_default().to_owned())
                        .collect()
                } else {
                    ids.iter().map(u32::to_string).collect()
                };
                writeln!(sink, "{}", fields.join(" "))?;
                Ok(())
            })?;
            sink.finish()
        }
        Command::Stats {
            vocab,
            corpus,
            rules,
            base,
            out,
            jobs,
        } => {
            check_paths(
                &[
                    Some(&vocab),
                    Some(&corpus),
                    rules.as_deref(),
                    base.base_vocab.as_deref(),
                    base.base_merges.as_deref(),
                ],
                &[out.as_deref()],
            )?;
            let vocab = CuratedVocabulary::load(&vocab)?;
            let rules = load_rules(rules.as_deref())?;
            let base = match (&base.base_vocab, &base.base_merges) {
                (Some(v), Some(m)) => Some(BaseTokenizer::load(v, m, &base.marker)?),
                _ => None,
            };
            let corpus = read_to_string(&corpus)?;

            let mut pool = rayon::ThreadPoolBuilder::new();
            if let Some(jobs) = jobs {
                pool = pool.num_threads(jobs.get());
            }
            let pool = pool.build().context("cannot start worker pool")?;
            info!("stats on {} worker threads", pool.current_num_threads());
            let stats = pool.install(|| match &base {
                Some(base) => compare_tokenizers(&vocab, base, &corpus, &rules),
                None => token_length_stats(&vocab, &corpus, &rules),
            });
            for skipped in &stats.skipped {
                warn!("skipped line {}: {}", skipped.line, skipped.error);
            }
            let mut sink = Sink::open(out.as_deref(), partial)?;
            serde_json::to_writer_pretty(&mut sink, &stats)?;
            writeln!(sink)?;
            sink.finish()
        }
        Command::Transfer {
            base,
            target_vocab,
            in_emb,
            out_emb,
            in_proj,
            out_proj,
            tied,
            report,
        } => {
            let inputs = [
                Some(base.base_vocab.as_path()),
                Some(base.base_merges.as_path()),
                Some(target_vocab.as_path()),
                Some(in_emb.as_path()),
                if tied { None } else { in_proj.as_deref() },
            ];
            let outputs = [
                Some(out_emb.as_path()),
                out_proj.as_deref(),
                report.as_deref(),
            ];
            check_paths(&inputs, &outputs)?;
            check_distinct(&outputs)?;

            let base_tok = BaseTokenizer::load(&base.base_vocab, &base.base_merges, &base.marker)?;
            let curated = CuratedVocabulary::load(&target_vocab)?;
            let mapping = build_mapping(&base_tok, &curated)?;
            info!(
                "mapped {} curated tokens onto {} base tokens",
                curated.len(),
                base_tok.len()
            );

            let emb = read_tensor(&in_emb)?;
            warn_row_count(&in_emb, emb.rows(), base_tok.len());
            let new_emb = transfer_embeddings(&emb, &mapping, curated.len())
                .with_context(|| format!("transferring {}", in_emb.display()))?;
            let mut files = vec![(out_emb.as_path(), new_emb.to_bytes())];

            if let Some(out_proj) = &out_proj {
                let bytes = if tied {
                    new_emb.to_bytes()
                } else {
                    let in_proj = in_proj.as_deref().expect("required without --tied");
                    let proj = read_tensor(in_proj)?;
                    warn_row_count(in_proj, proj.rows(), base_tok.len());
                    transfer_embeddings(&proj, &mapping, curated.len())
                        .with_context(|| format!("transferring {}", in_proj.display()))?
                        .to_bytes()
                };
                files.push((out_proj.as_path(), bytes));
            }
            if let Some(report) = &report {
                files.push((report.as_path(), mapping.report(&curated).into_bytes()));
            }
            write_all_files(&files, partial)
        }
        Command::Metrics {
            vocab,
            pred,
            reference,
            rules,
            out,
        } => {
            check_paths(
                &[
                    Some(&vocab),
                    Some(&pred),
                    Some(&reference),
                    rules.as_deref(),
                ],
                &[out.as_deref()],
            )?;
            let vocab = CuratedVocabulary::load(&vocab)?;
            let rules = load_rules(rules.as_deref())?;
            let report = sequence_metrics(
                &read_to_string(&pred)?,
                &read_to_string(&reference)?,
                &vocab,
                &rules,
            )?;
            if report.unnormalized_lines > 0 {
                warn!(
                    "{} lines could not be normalized and were compared raw",
                    report.unnormalized_lines
                );
            }
            let mut sink = Sink::open(out.as_deref(), partial)?;
            serde_json::to_writer_pretty(&mut sink, &report)?;
            writeln!(sink)?;
            sink.finish()
        }
    }
}

fn check_paths(inputs: &[Option<&Path>], outputs: &[Option<&Path>]) -> Result<()> {
    inputs.iter().flatten().try_for_each(|p| check_input(p))?;
    outputs.iter().flatten().try_for_each(|p| check_output(p))
}

fn check_distinct(outputs: &[Option<&Path>]) -> Result<()> {
    let paths: Vec<&Path> = outputs.iter().flatten().copied().collect();
    for (i, a) in paths.iter().enumerate() {
        if paths[i + 1..].contains(a) {
            bail!("output path given twice: {}", a.display());
        }
    }
    Ok(())
}

fn warn_row_count(path: &Path, rows: usize, base_len: usize) {
    if rows != base_len {
        warn!(
            "{} has {rows} rows but the base vocabulary has {base_len} tokens",
            path.display()
        );
    }
}

fn load_rules(path: Option<&Path>) -> Result<NormalizationRuleset> {
    Ok(match path {
        Some(p) => NormalizationRuleset::load(p)?,
        None => NormalizationRuleset::default(),
    })
}

/// Calls `f` with the 1-based number and text of every input line.
fn for_each_line(input: Option<&Path>, mut f: impl FnMut(usize, &str) -> Result<()>) -> Result<()> {
    let reader = open_input(input)?;
    for (i, line) in reader.lines().enumerate() {
        let line = line.with_context(|| format!("reading line {}", i + 1))?;
        f(i + 1, &line)?;
    }
    Ok(())
}
