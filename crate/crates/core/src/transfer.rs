//! Vocabulary transfer: map each curated token onto base-tokenizer ids and
//! initialize the curated embedding rows as means of the mapped base rows.

use std::fmt::Write as _;

use crate::bpe::BaseTokenizer;
use crate::catalog::{CuratedVocabulary, SPECIALS, UNK};
use crate::error::{Error, Result};
use crate::tensor::EmbeddingMatrix;

/// Names tried, in order, when a special token is absent from the base
/// vocabulary. GPT-2 style vocabularies only define `<|endoftext|>`.
const SPECIAL_FALLBACKS: [&str; 2] = [UNK, "<|endoftext|>"];

/// Curated id -> non-empty list of base ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenMapping {
    entries: Vec<Vec<u32>>,
}

impl TokenMapping {
    /// Validates that every entry is non-empty and below `base_size`.
    pub fn new(entries: Vec<Vec<u32>>, base_size: usize) -> Result<Self> {
        for (row, ids) in entries.iter().enumerate() {
            if ids.is_empty() {
                return Err(Error::EmptyMapping { row });
            }
            if let Some(&id) = ids.iter().find(|&&id| id as usize >= base_size) {
                return Err(Error::MappedIdOutOfRange {
                    row,
                    id,
                    rows: base_size,
                });
            }
        }
        Ok(Self { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, curated_id: u32) -> Option<&[u32]> {
        self.entries.get(curated_id as usize).map(Vec::as_slice)
    }

    pub fn entries(&self) -> &[Vec<u32>] {
        &self.entries
    }

    /// `curated_id<TAB>token<TAB>base ids` per line, ids space-separated.
    pub fn report(&self, curated: &CuratedVocabulary) -> String {
        let mut out = String::new();
        for (id, ids) in self.entries.iter().enumerate() {
            let token = curated.token(id as u32).unwrap_or("");
            let ids: Vec<String> = ids.iter().map(u32::to_string).collect();
            let _ = writeln!(out, "{id}\t{token}\t{}", ids.join(" "));
        }
        out
    }
}

/// Base ids for a curated special token. With no usable base special, the
/// token maps to every base row, i.e. the mean embedding.
fn special_ids(base: &BaseTokenizer, name: &str) -> Vec<u32> {
    std::iter::once(name)
        .chain(SPECIAL_FALLBACKS)
        .find_map(|candidate| base.id(candidate))
        .map_or_else(|| (0..base.len() as u32).collect(), |id| vec![id])
}

/// Builds the curated -> base mapping.
///
/// A token that exists in the base vocabulary both bare and with the word
/// boundary marker maps to the single marker-prefixed token; any other token
/// maps to its BPE decomposition. Specials map to the base special of the
/// same name, or to the base unknown token, or failing both to all base rows.
pub fn build_mapping(base: &BaseTokenizer, curated: &CuratedVocabulary) -> Result<TokenMapping> {
    let mut entries = Vec::with_capacity(curated.len());
    for (id, token) in curated.tokens().iter().enumerate() {
        let ids = if id < SPECIALS.len() {
            special_ids(base, token)
        } else {
            let marked = format!("{}{token}", base.marker());
            match (base.contains(token), base.id(&marked)) {
                (true, Some(marked_id)) => vec![marked_id],
                _ => base.encode(token).map_err(|e| Error::UnmappableToken {
                    token: token.clone(),
                    reason: e.to_string(),
                })?,
            }
        };
        entries.push(ids);
    }
    TokenMapping::new(entries, base.len())
}

/// Produces a `target_rows x dim` matrix whose row `i` is the arithmetic
/// mean of the source rows listed in `mapping[i]`, repeated ids counted with
/// multiplicity. Sums are accumulated in f64 and rounded once.
pub fn transfer_embeddings(
    source: &EmbeddingMatrix,
    mapping: &TokenMapping,
    target_rows: usize,
) -> Result<EmbeddingMatrix> {
    if mapping.len() != target_rows {
        return Err(Error::TargetRowMismatch {
            mapping: mapping.len(),
            target: target_rows,
        });
    }
    // The matrix may be smaller than the tokenizer that produced the mapping.
    for (row, ids) in mapping.entries().iter().enumerate() {
        if let Some(&id) = ids.iter().find(|&&id| id as usize >= source.rows()) {
            return Err(Error::MappedIdOutOfRange {
                row,
                id,
                rows: source.rows(),
            });
        }
    }

    let dim = source.dim();
    let mut data = Vec::with_capacity(target_rows * dim);
    let mut acc = vec![0f64; dim];
    for ids in mapping.entries() {
        acc.iter_mut().for_each(|a| *a = 0.0);
        for &id in ids {
            for (a, &v) in acc.iter_mut().zip(source.row(id as usize)) {
                *a += f64::from(v);
            }
        }
        let n = ids.len() as f64;
        data.extend(acc.iter().map(|&a| (a / n) as f32));
    }
    EmbeddingMatrix::new(target_rows, dim, data)
}

/// Number of embedding parameters for a vocabulary: one `vocab x dim`
/// matrix when input and output embeddings are tied, two otherwise.
pub fn embedding_param_count(vocab_size: u64, dim: u64, tied: bool) -> u64 {
    let one = vocab_size * dim;
    if tied {
        one
    } else {
        2 * one
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{build_vocab, MacroCatalog};

    fn tiny_base() -> BaseTokenizer {
        let vocab = ["a", "b", "ab", "\u{2581}ab"]
            .iter()
            .enumerate()
            .map(|(i, t)| (t.to_string(), i as u32));
        BaseTokenizer::new(vocab, vec![("a".into(), "b".into())], crate::bpe::METASPACE).unwrap()
    }

    #[test]
    fn param_counts() {
        assert_eq!(embedding_param_count(50_000, 384, false), 38_400_000);
        assert_eq!(embedding_param_count(50_000, 512, false), 51_200_000);
        assert_eq!(embedding_param_count(687, 384, false), 527_616);
        assert_eq!(embedding_param_count(687, 384, true), 263_808);
    }

    #[test]
    fn mean_of_two_rows() {
        let e = EmbeddingMatrix::new(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let m = TokenMapping::new(vec![vec![0, 1], vec![1]], 2).unwrap();
        let out = transfer_embeddings(&e, &m, 2).unwrap();
        assert_eq!(out.row(0), [2.0, 3.0]);
        assert_eq!(out.row(1), [3.0, 4.0]);
    }

    #[test]
    fn duplicates_keep_multiplicity() {
        let e = EmbeddingMatrix::new(2, 1, vec![0.0, 3.0]).unwrap();
        let m = TokenMapping::new(vec![vec![1, 1, 0]], 2).unwrap();
        assert_eq!(transfer_embeddings(&e, &m, 1).unwrap().row(0), [2.0]);
    }

    #[test]
    fn transfer_errors() {
        let e = EmbeddingMatrix::new(2, 1, vec![0.0, 1.0]).unwrap();
        let m = TokenMapping::new(vec![vec![0]], 2).unwrap();
        assert!(matches!(
            transfer_embeddings(&e, &m, 2),
            Err(Error::TargetRowMismatch { .. })
        ));
        let m = TokenMapping::new(vec![vec![5]], 10).unwrap();
        assert!(matches!(
            transfer_embeddings(&e, &m, 1),
            Err(Error::MappedIdOutOfRange { id: 5, .. })
        ));
        assert!(matches!(
            TokenMapping::new(vec![vec![]], 1),
            Err(Error::EmptyMapping { row: 0 })
        ));
    }

    #[test]
    fn marker_branch_on_tiny_instance() {
        let base = tiny_base();
        let curated = CuratedVocabulary::from_tokens(
            ["<pad>", "<s>", "</s>", "<unk>", "ab"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
        )
        .unwrap();
        let m = build_mapping(&base, &curated).unwrap();
        assert_eq!(m.get(4), Some(&[3][..]));
        // No specials in the base: every special maps to all rows.
        assert_eq!(m.get(0), Some(&[0, 1, 2, 3][..]));
    }

    #[test]
    fn specials_fall_back_to_unk() {
        let vocab = ["<unk>", "<s>", "x", "\u{2581}x"]
            .iter()
            .enumerate()
            .map(|(i, t)| (t.to_string(), i as u32));
        let base = BaseTokenizer::new(vocab, vec![], crate::bpe::METASPACE);
        // '<', 'u', ... are not tokens: closure fails, as it should.
        assert!(base.is_err());

        let mut tokens: Vec<String> = "<>unks/x".chars().map(String::from).collect();
        tokens.extend(["<unk>", "<s>", "\u{2581}x"].map(String::from));
        let base = BaseTokenizer::new(
            tokens.iter().cloned().zip(0..),
            vec![],
            crate::bpe::METASPACE,
        )
        .unwrap();
        let curated = build_vocab(&MacroCatalog::new(), false);
        let restricted: Vec<String> = curated.tokens()[..4]
            .iter()
            .cloned()
            .chain(["x".to_string()])
            .collect();
        let curated = CuratedVocabulary::from_tokens(restricted).unwrap();
        let m = build_mapping(&base, &curated).unwrap();
        let unk = base.id("<unk>").unwrap();
        assert_eq!(m.get(0), Some(&[unk][..]));
        assert_eq!(m.get(1), Some(&[base.id("<s>").unwrap()][..]));
        assert_eq!(m.get(2), Some(&[unk][..]));
        assert_eq!(m.get(3), Some(&[unk][..]));
        assert_eq!(m.get(4), Some(&[base.id("\u{2581}x").unwrap()][..]));
        assert!(m.report(&curated).starts_with("0\t<pad>\t"));
    }

    #[test]
    fn unmappable_token() {
        let base = tiny_base();
        let mut tokens: Vec<String> = SPECIALS.iter().map(|s| s.to_string()).collect();
        tokens.push("c".into());
        let curated = CuratedVocabulary::from_tokens(tokens).unwrap();
        let err = build_mapping(&base, &curated).unwrap_err();
        assert!(
            matches!(err, Error::UnmappableToken { ref token, .. } if token == "c"),
            "{err}"
        );
    }
}
