//! LaTeX formula canonicalization.
//!
//! [`normalize`] applies, in this order: comment stripping, whitespace
//! collapsing, synonym replacement, redundant brace removal and script
//! argument bracing. The order is fixed; the composition is idempotent on
//! brace-balanced input.

use std::collections::BTreeMap;
use std::path::Path;

use crate::catalog::is_control_word;
use crate::error::{Error, Result};
use crate::tokenizer::{lex, Lexeme, LexemeKind};

/// The synonym table shipped with the crate.
pub const DEFAULT_SYNONYMS: &str = include_str!("../../../data/synonyms.tsv");

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizationRuleset {
    synonyms: BTreeMap<String, String>,
    pub strip_comments: bool,
    pub reduce_braces: bool,
    pub canonicalize_scripts: bool,
}

impl Default for NormalizationRuleset {
    fn default() -> Self {
        Self::from_synonym_table(DEFAULT_SYNONYMS).expect("bundled synonym table is valid")
    }
}

impl NormalizationRuleset {
    /// A ruleset with every step enabled and the given synonyms.
    pub fn new(synonyms: BTreeMap<String, String>) -> Result<Self> {
        for (src, dst) in &synonyms {
            let invalid = |reason| Error::InvalidSynonym {
                src: src.clone(),
                dst: dst.clone(),
                reason,
            };
            if !is_single_lexeme(src) {
                return Err(invalid("source is not a single lexeme"));
            }
            if !is_single_lexeme(dst) {
                return Err(invalid("replacement is not a single lexeme"));
            }
            if synonyms.contains_key(dst) {
                return Err(invalid("replacement is itself a source (rule chain)"));
            }
        }
        Ok(Self {
            synonyms,
            strip_comments: true,
            reduce_braces: true,
            canonicalize_scripts: true,
        })
    }

    /// Parses `<src><TAB><dst>` lines; blank and `#` lines are ignored.
    pub fn from_synonym_table(text: &str) -> Result<Self> {
        let mut synonyms = BTreeMap::new();
        for (idx, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let malformed = |reason: &str| Error::MalformedRule {
                line: idx + 1,
                reason: reason.to_owned(),
            };
            let (src, dst) = line
                .split_once('\t')
                .ok_or_else(|| malformed("expected <src><TAB><dst>"))?;
            if dst.contains('\t') {
                return Err(malformed("more than two fields"));
            }
            if synonyms.insert(src.to_owned(), dst.to_owned()).is_some() {
                return Err(malformed("duplicate source"));
            }
        }
        Self::new(synonyms)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_synonym_table(&text)
    }

    pub fn synonyms(&self) -> &BTreeMap<String, String> {
        &self.synonyms
    }
}

fn is_single_lexeme(s: &str) -> bool {
    matches!(lex(s).as_deref(), Ok([l]) if !l.is_whitespace())
}

/// Runs the full pipeline.
pub fn normalize(text: &str, rules: &NormalizationRuleset) -> Result<String> {
    let mut s = if rules.strip_comments {
        strip_comments(text)
    } else {
        text.to_owned()
    };
    s = collapse_whitespace(&s)?;
    s = replace_synonyms(&s, &rules.synonyms)?;
    if rules.reduce_braces {
        s = strip_redundant_braces(&s)?;
    }
    if rules.canonicalize_scripts {
        s = canonicalize_scripts(&s)?;
    }
    Ok(s)
}

/// Removes `%` comments up to (not including) the line break. An escaped
/// `\%` is kept.
pub fn strip_comments(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut chars = text.chars();
    while let Some(c) = chars.next() {
        match c {
            '\\' => {
                out.push(c);
                if let Some(next) = chars.next() {
                    out.push(next);
                }
            }
            '%' => {
                for skipped in chars.by_ref() {
                    if skipped == '\n' {
                        out.push('\n');
                        break;
                    }
                }
            }
            _ => out.push(c),
        }
    }
    out
}

/// Collapses every whitespace run to one space and trims both ends. A
/// control symbol made of a backslash and a whitespace character becomes
/// `\ `.
pub fn collapse_whitespace(text: &str) -> Result<String> {
    let lexemes = lex(text)?;
    let start = lexemes.iter().position(|l| !l.is_whitespace());
    let end = lexemes.iter().rposition(|l| !l.is_whitespace());
    let (Some(start), Some(end)) = (start, end) else {
        return Ok(String::new());
    };
    let mut out = String::with_capacity(text.len());
    for l in &lexemes[start..=end] {
        match l.kind {
            LexemeKind::Whitespace => out.push(' '),
            LexemeKind::ControlSymbol if l.text[1..].chars().all(char::is_whitespace) => {
                out.push_str("\\ ")
            }
            _ => out.push_str(l.text),
        }
    }
    Ok(out)
}

/// Replaces lexemes found in `synonyms`. A space is inserted after a
/// replacement control word that would otherwise run into a letter.
pub fn replace_synonyms(text: &str, synonyms: &BTreeMap<String, String>) -> Result<String> {
    if synonyms.is_empty() {
        return Ok(text.to_owned());
    }
    let lexemes = lex(text)?;
    let mut out = String::with_capacity(text.len());
    let mut glue_guard = false;
    for l in &lexemes {
        if glue_guard && l.text.as_bytes()[0].is_ascii_alphabetic() {
            out.push(' ');
        }
        match synonyms.get(l.text) {
            Some(dst) => {
                out.push_str(dst);
                glue_guard = is_control_word(dst);
            }
            None => {
                out.push_str(l.text);
                glue_guard = false;
            }
        }
    }
    Ok(out)
}

/// Matching close index for every `{` lexeme, or an unbalanced-brace error.
fn match_braces(lexemes: &[Lexeme<'_>]) -> Result<Vec<Option<usize>>> {
    let mut close_of = vec![None; lexemes.len()];
    let mut stack = Vec::new();
    for (i, l) in lexemes.iter().enumerate() {
        match (l.kind, l.text) {
            (LexemeKind::Char, "{") => stack.push(i),
            (LexemeKind::Char, "}") => {
                let open = stack.pop().ok_or(Error::UnbalancedBrace(l.offset))?;
                close_of[open] = Some(i);
            }
            _ => {}
        }
    }
    match stack.first() {
        Some(&open) => Err(Error::UnbalancedBrace(lexemes[open].offset)),
        None => Ok(close_of),
    }
}

/// Replaces every group whose whole content (ignoring whitespace) is one
/// inner group by that inner group. Whitespace between the outer and inner
/// braces goes with the outer braces.
pub fn strip_redundant_braces(text: &str) -> Result<String> {
    let lexemes = lex(text)?;
    let close_of = match_braces(&lexemes)?;
    let next_solid = |from: usize| (from..lexemes.len()).find(|&j| !lexemes[j].is_whitespace());
    let prev_solid = |to: usize| (0..to).rev().find(|&j| !lexemes[j].is_whitespace());

    let mut drop = vec![false; lexemes.len()];
    for (open, close) in close_of.iter().enumerate() {
        let Some(close) = *close else { continue };
        let Some(inner_open) = next_solid(open + 1).filter(|&j| j < close) else {
            continue;
        };
        let Some(inner_close) = close_of[inner_open] else {
            continue;
        };
        if prev_solid(close) == Some(inner_close) {
            drop[open..inner_open].iter_mut().for_each(|d| *d = true);
            drop[inner_close + 1..=close]
                .iter_mut()
                .for_each(|d| *d = true);
        }
    }

    Ok(lexemes
        .iter()
        .zip(&drop)
        .filter(|(_, &d)| !d)
        .map(|(l, _)| l.text)
        .collect())
}

/// Braces the argument of every `^` / `_` whose next non-whitespace lexeme
/// is not already `{`.
pub fn canonicalize_scripts(text: &str) -> Result<String> {
    let lexemes = lex(text)?;
    match_braces(&lexemes)?;
    let mut out = String::with_capacity(text.len() + 8);
    let mut wrap_next: Option<usize> = None;
    for l in &lexemes {
        if let Some(op_offset) = wrap_next {
            if !l.is_whitespace() {
                wrap_next = None;
                if l.kind == LexemeKind::Char && matches!(l.text, "}" | "^" | "_") {
                    return Err(Error::MissingScriptArgument(op_offset));
                }
                if l.text != "{" {
                    out.push('{');
                    out.push_str(l.text);
                    out.push('}');
                    continue;
                }
            }
        }
        out.push_str(l.text);
        if l.kind == LexemeKind::Char && matches!(l.text, "^" | "_") {
            wrap_next = Some(l.offset);
        }
    }
    match wrap_next {
        Some(op_offset) => Err(Error::MissingScriptArgument(op_offset)),
        None => Ok(out),
    }
}
