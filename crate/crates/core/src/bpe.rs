//! Ranked-merge BPE over a fixed vocabulary.
//!
//! This is the large general-purpose tokenizer whose embeddings are being
//! transferred. Only the merge loop is implemented; natural-language
//! pre-tokenization and byte-level fallback are not needed for LaTeX
//! tokens, which are ASCII.

use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};

/// Default word-boundary marker (SentencePiece metaspace).
pub const METASPACE: &str = "\u{2581}";

#[derive(Debug, Clone)]
pub struct BaseTokenizer {
    token_to_id: HashMap<String, u32>,
    id_to_token: Vec<String>,
    merges: Vec<(String, String)>,
    /// (left id, right id) -> (rank, merged id)
    merge_index: HashMap<(u32, u32), (usize, u32)>,
    marker: String,
}

impl BaseTokenizer {
    /// Builds a tokenizer and checks its invariants: ids are a bijection
    /// onto `0..n`, every merge result is a token, and every character of
    /// every token (marker characters excepted) is itself a token.
    pub fn new(
        vocab: impl IntoIterator<Item = (String, u32)>,
        merges: Vec<(String, String)>,
        marker: impl Into<String>,
    ) -> Result<Self> {
        let marker = marker.into();
        let vocab: Vec<(String, u32)> = vocab.into_iter().collect();
        let mut slots: Vec<Option<String>> = vec![None; vocab.len()];
        let mut token_to_id = HashMap::with_capacity(vocab.len());
        for (token, id) in vocab {
            if token_to_id.insert(token.clone(), id).is_some() {
                return Err(Error::MalformedBaseVocab(format!(
                    "token {token:?} listed twice"
                )));
            }
            // An id past the end leaves a gap below it, reported after the loop.
            let Some(slot) = slots.get_mut(id as usize) else {
                continue;
            };
            if let Some(first) = slot {
                return Err(Error::DuplicateId {
                    id,
                    first: first.clone(),
                    second: token,
                });
            }
            *slot = Some(token);
        }
        let id_to_token = slots
            .into_iter()
            .enumerate()
            .map(|(id, t)| t.ok_or(Error::NonContiguousIds(id as u32)))
            .collect::<Result<Vec<_>>>()?;

        let mut merge_index = HashMap::with_capacity(merges.len());
        for (rank, (left, right)) in merges.iter().enumerate() {
            let merged = format!("{left}{right}");
            let missing = || Error::MissingMergeResult {
                left: left.clone(),
                right: right.clone(),
                merged: merged.clone(),
            };
            let merged_id = *token_to_id.get(&merged).ok_or_else(missing)?;
            // Rules whose halves are not tokens can never fire.
            if let (Some(&l), Some(&r)) = (token_to_id.get(left), token_to_id.get(right)) {
                merge_index.entry((l, r)).or_insert((rank, merged_id));
            }
        }

        let tokenizer = Self {
            token_to_id,
            id_to_token,
            merges,
            merge_index,
            marker,
        };
        tokenizer.check_closure()?;
        Ok(tokenizer)
    }

    fn check_closure(&self) -> Result<()> {
        let mut buf = [0u8; 4];
        for token in &self.id_to_token {
            for ch in token.chars() {
                if self.marker.contains(ch) {
                    continue;
                }
                if !self
                    .token_to_id
                    .contains_key(ch.encode_utf8(&mut buf) as &str)
                {
                    return Err(Error::ClosureViolation {
                        ch,
                        token: token.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Loads a vocabulary file (JSON object or `token<TAB>id` lines) and a
    /// merges file (`left right` per line, rank order).
    pub fn load(
        vocab_path: impl AsRef<Path>,
        merges_path: impl AsRef<Path>,
        marker: &str,
    ) -> Result<Self> {
        let (vp, mp) = (vocab_path.as_ref(), merges_path.as_ref());
        let vocab_text = std::fs::read_to_string(vp).map_err(|e| Error::io(vp, e))?;
        let merges_text = std::fs::read_to_string(mp).map_err(|e| Error::io(mp, e))?;
        Self::new(
            parse_vocab(&vocab_text)?,
            parse_merges(&merges_text)?,
            marker,
        )
    }

    pub fn len(&self) -> usize {
        self.id_to_token.len()
    }

    pub fn is_empty(&self) -> bool {
        self.id_to_token.is_empty()
    }

    pub fn marker(&self) -> &str {
        &self.marker
    }

    pub fn merges(&self) -> &[(String, String)] {
        &self.merges
    }

    pub fn id(&self, token: &str) -> Option<u32> {
        self.token_to_id.get(token).copied()
    }

    pub fn token(&self, id: u32) -> Option<&str> {
        self.id_to_token.get(id as usize).map(String::as_str)
    }

    pub fn contains(&self, token: &str) -> bool {
        self.token_to_id.contains_key(token)
    }

    /// Splits `word` into characters and repeatedly fuses the adjacent pair
    /// with the lowest merge rank (leftmost on ties) until no pair is a
    /// merge rule.
    pub fn encode(&self, word: &str) -> Result<Vec<u32>> {
        let mut buf = [0u8; 4];
        let mut symbols = word
            .chars()
            .map(|ch| {
                self.id(ch.encode_utf8(&mut buf))
                    .ok_or_else(|| Error::UnknownCharacter {
                        ch,
                        word: word.to_owned(),
                    })
            })
            .collect::<Result<Vec<u32>>>()?;

        loop {
            let best = symbols
                .windows(2)
                .enumerate()
                .filter_map(|(pos, pair)| {
                    self.merge_index
                        .get(&(pair[0], pair[1]))
                        .map(|&(rank, merged)| (rank, pos, merged))
                })
                .min_by_key(|&(rank, pos, _)| (rank, pos));
            let Some((_, pos, merged)) = best else { break };
            symbols[pos] = merged;
            symbols.remove(pos + 1);
        }
        Ok(symbols)
    }

    /// Concatenates the token strings of `ids`.
    pub fn decode(&self, ids: &[u32]) -> Option<String> {
        ids.iter().map(|&id| self.token(id)).collect()
    }

    /// Encodes a line of text the way a word-level BPE model sees it: split
    /// on whitespace, prefix the marker to every word that follows
    /// whitespace, and encode each word independently.
    pub fn encode_text(&self, text: &str) -> Result<Vec<u32>> {
        let mut ids = Vec::new();
        let mut word = String::new();
        let mut preceded_by_space = false;
        let mut rest = text;
        while !rest.is_empty() {
            let ws = rest.len() - rest.trim_start().len();
            if ws > 0 {
                preceded_by_space = true;
                rest = &rest[ws..];
                continue;
            }
            let end = rest.find(char::is_whitespace).unwrap_or(rest.len());
            word.clear();
            if preceded_by_space {
                word.push_str(&self.marker);
            }
            word.push_str(&rest[..end]);
            ids.extend(self.encode(&word)?);
            rest = &rest[end..];
        }
        Ok(ids)
    }
}

/// Parses a JSON object `{"token": id}` or `token<TAB>id` lines.
pub fn parse_vocab(text: &str) -> Result<Vec<(String, u32)>> {
    if text.trim_start().starts_with('{') {
        let map: serde_json::Map<String, serde_json::Value> =
            serde_json::from_str(text).map_err(|e| Error::MalformedBaseVocab(e.to_string()))?;
        return map
            .into_iter()
            .map(|(token, v)| {
                v.as_u64()
                    .and_then(|id| u32::try_from(id).ok())
                    .map(|id| (token.clone(), id))
                    .ok_or_else(|| {
                        Error::MalformedBaseVocab(format!("id of {token:?} is not a u32: {v}"))
                    })
            })
            .collect();
    }
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let parsed = line
            .rsplit_once('\t')
            .and_then(|(token, id)| Some((token.to_owned(), id.trim().parse::<u32>().ok()?)));
        match parsed {
            Some(entry) if !entry.0.is_empty() => out.push(entry),
            _ => {
                return Err(Error::MalformedBaseVocab(format!(
                    "line {}: expected token<TAB>id, got {line:?}",
                    idx + 1
                )))
            }
        }
    }
    Ok(out)
}

/// Parses `left right` merge lines in rank order. A leading `#version`
/// line and blank lines are ignored.
pub fn parse_merges(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.is_empty() || (idx == 0 && line.starts_with("#version")) {
            continue;
        }
        let mut parts = line.split(' ');
        match (parts.next(), parts.next(), parts.next()) {
            (Some(l), Some(r), None) if !l.is_empty() && !r.is_empty() => {
                out.push((l.to_owned(), r.to_owned()));
            }
            _ => {
                return Err(Error::MalformedMerge {
                    line: idx + 1,
                    text: line.to_owned(),
                })
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vocab(tokens: &[&str]) -> Vec<(String, u32)> {
        tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.to_string(), i as u32))
            .collect()
    }

    fn merges(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
        pairs
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect()
    }

    #[test]
    fn minimal_instance() {
        let t =
            BaseTokenizer::new(vocab(&["a", "b", "ab"]), merges(&[("a", "b")]), METASPACE).unwrap();
        assert_eq!(t.encode("ab").unwrap(), [2]);
        assert_eq!(t.encode("a").unwrap(), [0]);
        assert_eq!(t.encode("aab").unwrap(), [0, 2]);
    }

    #[test]
    fn closure_violation() {
        let err = BaseTokenizer::new(vocab(&["ab"]), vec![], METASPACE).unwrap_err();
        assert!(
            matches!(err, Error::ClosureViolation { ch: 'a', .. }),
            "{err}"
        );
    }

    #[test]
    fn marker_is_exempt_from_closure() {
        let t = BaseTokenizer::new(
            vocab(&["a", "b", "ab", "\u{2581}ab"]),
            merges(&[("a", "b")]),
            METASPACE,
        );
        assert!(t.is_ok());
    }

    #[test]
    fn merge_result_must_exist() {
        let err =
            BaseTokenizer::new(vocab(&["a", "b"]), merges(&[("a", "b")]), METASPACE).unwrap_err();
        assert!(matches!(err, Error::MissingMergeResult { .. }), "{err}");
    }

    #[test]
    fn duplicate_and_missing_ids() {
        let v = vec![("a".to_string(), 0), ("b".to_string(), 0)];
        assert!(matches!(
            BaseTokenizer::new(v, vec![], "_"),
            Err(Error::DuplicateId { id: 0, .. })
        ));
        let v = vec![("a".to_string(), 0), ("b".to_string(), 2)];
        assert!(matches!(
            BaseTokenizer::new(v, vec![], "_"),
            Err(Error::NonContiguousIds(1))
        ));
        let v = vec![("a".to_string(), u32::MAX)];
        assert!(matches!(
            BaseTokenizer::new(v, vec![], "_"),
            Err(Error::NonContiguousIds(0))
        ));
    }

    #[test]
    fn empty_merges_is_char_level() {
        let t = BaseTokenizer::new(vocab(&["x", "y", "z"]), vec![], METASPACE).unwrap();
        assert_eq!(t.encode("zyx").unwrap(), [2, 1, 0]);
        assert!(matches!(
            t.encode("w"),
            Err(Error::UnknownCharacter { ch: 'w', .. })
        ));
    }

    #[test]
    fn splits_leftarrow() {
        let toks = [
            "\\", "l", "e", "f", "t", "a", "r", "o", "w", "\\l", "\\le", "\\lef", "\\left", "ar",
            "arr", "arro", "arrow",
        ];
        let m = merges(&[
            ("\\", "l"),
            ("\\l", "e"),
            ("\\le", "f"),
            ("\\lef", "t"),
            ("a", "r"),
            ("ar", "r"),
            ("arr", "o"),
            ("arro", "w"),
        ]);
        let t = BaseTokenizer::new(vocab(&toks), m, METASPACE).unwrap();
        let ids = t.encode("\\leftarrow").unwrap();
        assert_eq!(ids, [t.id("\\left").unwrap(), t.id("arrow").unwrap()]);
    }

    #[test]
    fn leftmost_tie_break() {
        // "aaa": merging the left pair first yields [aa, a].
        let t = BaseTokenizer::new(vocab(&["a", "aa"]), merges(&[("a", "a")]), "_").unwrap();
        assert_eq!(t.encode("aaa").unwrap(), [1, 0]);
    }

    #[test]
    fn encode_text_prefixes_marker() {
        let t = BaseTokenizer::new(
            vocab(&["a", "b", "_", "_a", "_b"]),
            merges(&[("_", "a")]),
            "_",
        )
        .unwrap();
        assert_eq!(t.encode_text("a  b a").unwrap(), [0, 2, 1, 3]);
        assert!(t.encode_text("").unwrap().is_empty());
    }

    #[test]
    fn vocab_formats() {
        let json = parse_vocab(r#"{"a": 0, "b": 1}"#).unwrap();
        assert_eq!(json.len(), 2);
        let tsv = parse_vocab("a\t0\nb\t1\n").unwrap();
        assert_eq!(tsv, vec![("a".to_string(), 0), ("b".to_string(), 1)]);
        assert!(parse_vocab("a 0").is_err());
        assert!(parse_vocab(r#"{"a": -1}"#).is_err());
    }

    #[test]
    fn merges_format() {
        let m = parse_merges("#version: 0.2\na b\n\nab c\n").unwrap();
        assert_eq!(m, merges(&[("a", "b"), ("ab", "c")]));
        assert!(matches!(
            parse_merges("a b c"),
            Err(Error::MalformedMerge { line: 1, .. })
        ));
        assert!(parse_merges("ab").is_err());
    }
}
