//! Corpus measurements: token lengths, UNK rate, curated-vs-base
//! compression, and token-level sequence metrics.
//!
//! Per-line work runs on the current rayon pool. Results are collected in
//! line order and reduced sequentially from integer counts, so the reports do
//! not depend on the number of worker threads.

use rayon::prelude::*;
use serde::Serialize;

use crate::bpe::BaseTokenizer;
use crate::catalog::{CuratedVocabulary, UNK_ID};
use crate::error::{Error, Result};
use crate::normalizer::{normalize, NormalizationRuleset};
use crate::tokenizer::{encode, encode_lossy};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedLine {
    pub line: usize,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusStats {
    pub sample_count: usize,
    pub mean_token_length: f64,
    pub max_token_length: usize,
    pub unk_rate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub compression_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base_mean_token_length: Option<f64>,
    pub skipped_count: usize,
    pub skipped: Vec<SkippedLine>,
}

/// Normalizes one formula and encodes it with the curated vocabulary.
pub fn curated_ids(
    vocab: &CuratedVocabulary,
    rules: &NormalizationRuleset,
    line: &str,
) -> Result<Vec<u32>> {
    encode(vocab, &normalize(line, rules)?)
}

/// Non-blank lines with 1-based line numbers.
fn samples(corpus: &str) -> Vec<(usize, &str)> {
    corpus
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| (i + 1, l))
        .collect()
}

struct LineCounts {
    curated: usize,
    unk: usize,
    base: Option<usize>,
}

fn aggregate(results: Vec<(usize, Result<LineCounts>)>) -> CorpusStats {
    let mut stats = CorpusStats {
        sample_count: 0,
        mean_token_length: 0.0,
        max_token_length: 0,
        unk_rate: 0.0,
        compression_ratio: None,
        base_mean_token_length: None,
        skipped_count: 0,
        skipped: Vec::new(),
    };
    let (mut total, mut unk, mut base_total, mut any_base) = (0u64, 0u64, 0u64, false);
    for (line, result) in results {
        match result {
            Ok(counts) => {
                stats.sample_count += 1;
                total += counts.curated as u64;
                unk += counts.unk as u64;
                stats.max_token_length = stats.max_token_length.max(counts.curated);
                if let Some(b) = counts.base {
                    any_base = true;
                    base_total += b as u64;
                }
            }
            Err(e) => stats.skipped.push(SkippedLine {
                line,
                error: e.to_string(),
            }),
        }
    }
    stats.skipped_count = stats.skipped.len();
    if stats.sample_count > 0 {
        let n = stats.sample_count as f64;
        stats.mean_token_length = total as f64 / n;
        if any_base {
            let base_mean = base_total as f64 / n;
            stats.base_mean_token_length = Some(base_mean);
            if base_total > 0 {
                stats.compression_ratio = Some(stats.mean_token_length / base_mean);
            }
        }
    }
    if total > 0 {
        stats.unk_rate = unk as f64 / total as f64;
    }
    stats
}

fn count_curated(vocab: &CuratedVocabulary, normalized: &str) -> Result<LineCounts> {
    let ids = encode(vocab, normalized)?;
    Ok(LineCounts {
        curated: ids.len(),
        unk: ids.iter().filter(|&&id| id == UNK_ID).count(),
        base: None,
    })
}

/// Token-length statistics of the curated tokenizer over a line-oriented
/// corpus. Blank lines are ignored; lines that fail to normalize are
/// skipped and reported.
pub fn token_length_stats(
    vocab: &CuratedVocabulary,
    corpus: &str,
    rules: &NormalizationRuleset,
) -> CorpusStats {
    let results = samples(corpus)
        .into_par_iter()
        .map(|(line, text)| {
            let counts = normalize(text, rules).and_then(|n| count_curated(vocab, &n));
            (line, counts)
        })
        .collect();
    aggregate(results)
}

/// Like [`token_length_stats`], additionally encoding every normalized line
/// with the base tokenizer. Lines either tokenizer rejects are skipped for
/// both, so the ratio compares identical lines.
pub fn compare_tokenizers(
    vocab: &CuratedVocabulary,
    base: &BaseTokenizer,
    corpus: &str,
    rules: &NormalizationRuleset,
) -> CorpusStats {
    let results = samples(corpus)
        .into_par_iter()
        .map(|(line, text)| {
            let counts = normalize(text, rules).and_then(|n| {
                let mut counts = count_curated(vocab, &n)?;
                counts.base = Some(base.encode_text(&n)?.len());
                Ok(counts)
            });
            (line, counts)
        })
        .collect();
    aggregate(results)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SequenceReport {
    pub pairs: usize,
    /// Fraction of pairs whose normalized token sequences are identical.
    pub exact_match: f64,
    /// Mean of token-level Levenshtein distance / max(len, 1).
    pub edit_distance: f64,
    /// Lines that failed to normalize and were compared as raw text.
    pub unnormalized_lines: usize,
}

/// Levenshtein distance over token ids divided by the longer length (1 for
/// two empty sequences' denominator).
pub fn normalized_edit_distance(a: &[u32], b: &[u32]) -> f64 {
    let dist = strsim::generic_levenshtein(&a.to_vec(), &b.to_vec());
    dist as f64 / a.len().max(b.len()).max(1) as f64
}

fn metric_ids(
    vocab: &CuratedVocabulary,
    rules: &NormalizationRuleset,
    line: &str,
) -> (Vec<u32>, bool) {
    match normalize(line, rules) {
        Ok(n) => (encode_lossy(vocab, &n), true),
        Err(_) => (encode_lossy(vocab, line), false),
    }
}

/// Pairwise exact match and normalized edit distance between predictions
/// and references, one formula per line.
pub fn sequence_metrics(
    pred: &str,
    reference: &str,
    vocab: &CuratedVocabulary,
    rules: &NormalizationRuleset,
) -> Result<SequenceReport> {
    let pred: Vec<&str> = pred.lines().collect();
    let reference: Vec<&str> = reference.lines().collect();
    if pred.len() != reference.len() {
        return Err(Error::LineCountMismatch {
            pred: pred.len(),
            reference: reference.len(),
        });
    }
    let per_pair: Vec<(bool, f64, usize)> = pred
        .par_iter()
        .zip(reference.par_iter())
        .map(|(p, r)| {
            let (p_ids, p_ok) = metric_ids(vocab, rules, p);
            let (r_ids, r_ok) = metric_ids(vocab, rules, r);
            let fallbacks = usize::from(!p_ok) + usize::from(!r_ok);
            (
                p_ids == r_ids,
                normalized_edit_distance(&p_ids, &r_ids),
                fallbacks,
            )
        })
        .collect();

    let pairs = per_pair.len();
    let mut report = SequenceReport {
        pairs,
        exact_match: 0.0,
        edit_distance: 0.0,
        unnormalized_lines: per_pair.iter().map(|p| p.2).sum(),
    };
    if pairs > 0 {
        let n = pairs as f64;
        report.exact_match = per_pair.iter().filter(|p| p.0).count() as f64 / n;
        report.edit_distance = per_pair.iter().map(|p| p.1).sum::<f64>() / n;
    }
    Ok(report)
}
