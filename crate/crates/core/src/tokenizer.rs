//! Rule-based LaTeX lexer and the curated encoder/decoder.
//!
//! Lexing is maximal munch with the following priority at each position:
//! fused `\begin{env}`/`\end{env}` for known environments, control words,
//! control symbols, whitespace runs, single characters. Encoding drops
//! whitespace; decoding re-inserts only the spaces needed for the output to
//! lex back to the same tokens.

use crate::catalog::{is_environment_name, CuratedVocabulary, BOS_ID, EOS_ID, PAD_ID, UNK, UNK_ID};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LexemeKind {
    /// `\begin{env}` or `\end{env}` for a known environment.
    Environment,
    /// `\` followed by a maximal run of ASCII letters.
    ControlWord,
    /// `\` followed by one non-letter character.
    ControlSymbol,
    Whitespace,
    Char,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lexeme<'a> {
    pub kind: LexemeKind,
    pub text: &'a str,
    /// Byte offset in the lexed input.
    pub offset: usize,
}

impl Lexeme<'_> {
    pub fn is_whitespace(&self) -> bool {
        self.kind == LexemeKind::Whitespace
    }
}

/// Lexes `text` without environment fusion.
pub fn lex(text: &str) -> Result<Vec<Lexeme<'_>>> {
    lex_with(text, |_| false)
}

/// Lexes `text`, fusing `\begin{name}` / `\end{name}` whenever
/// `is_environment(name)` holds.
pub fn lex_with<'a>(
    text: &'a str,
    is_environment: impl Fn(&str) -> bool,
) -> Result<Vec<Lexeme<'a>>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut pos = 0;
    while pos < bytes.len() {
        let (kind, len) = if bytes[pos] == b'\\' {
            lex_command(&text[pos..], &is_environment).ok_or(Error::TrailingBackslash(pos))?
        } else {
            let ch = text[pos..].chars().next().expect("pos is a char boundary");
            if ch.is_whitespace() {
                let len = text[pos..]
                    .find(|c: char| !c.is_whitespace())
                    .unwrap_or(text.len() - pos);
                (LexemeKind::Whitespace, len)
            } else {
                (LexemeKind::Char, ch.len_utf8())
            }
        };
        out.push(Lexeme {
            kind,
            text: &text[pos..pos + len],
            offset: pos,
        });
        pos += len;
    }
    Ok(out)
}

/// `rest` starts with a backslash. Returns `None` for a lone backslash.
fn lex_command(rest: &str, is_environment: &impl Fn(&str) -> bool) -> Option<(LexemeKind, usize)> {
    for prefix in ["\\begin{", "\\end{"] {
        if let Some(tail) = rest.strip_prefix(prefix) {
            if let Some(close) = tail.find('}') {
                let name = &tail[..close];
                if is_environment_name(name) && is_environment(name) {
                    return Some((LexemeKind::Environment, prefix.len() + close + 1));
                }
            }
        }
    }
    let letters = rest[1..]
        .bytes()
        .take_while(u8::is_ascii_alphabetic)
        .count();
    if letters > 0 {
        return Some((LexemeKind::ControlWord, 1 + letters));
    }
    let ch = rest[1..].chars().next()?;
    Some((LexemeKind::ControlSymbol, 1 + ch.len_utf8()))
}

/// Lexes with the vocabulary's environments, drops whitespace and maps each
/// lexeme to its id (UNK when absent).
pub fn encode(vocab: &CuratedVocabulary, text: &str) -> Result<Vec<u32>> {
    let lexemes = lex_with(text, |name| vocab.has_environment(name))?;
    Ok(lexemes
        .iter()
        .filter(|l| !l.is_whitespace())
        .map(|l| vocab.id(l.text).unwrap_or(UNK_ID))
        .collect())
}

/// Like [`encode`], but a lone trailing backslash becomes UNK instead of an
/// error. Used where malformed input (e.g. model predictions) must still be
/// scored.
pub fn encode_lossy(vocab: &CuratedVocabulary, text: &str) -> Vec<u32> {
    match encode(vocab, text) {
        Ok(ids) => ids,
        Err(Error::TrailingBackslash(pos)) => {
            let mut ids =
                encode(vocab, &text[..pos]).expect("prefix before the lone backslash lexes");
            ids.push(UNK_ID);
            ids
        }
        Err(e) => unreachable!("lexing fails only on a lone backslash: {e}"),
    }
}

/// Renders ids back to LaTeX.
///
/// A space is inserted after a control word whose successor starts with an
/// ASCII letter, and after `\begin`/`\end` when followed by `{`, so that the
/// result re-lexes into the same tokens. UNK renders as `<unk>`; the other
/// specials render as nothing.
pub fn decode(vocab: &CuratedVocabulary, ids: &[u32]) -> Result<String> {
    let mut out = String::new();
    let mut prev: Option<&str> = None;
    for &id in ids {
        let token = match id {
            PAD_ID | BOS_ID | EOS_ID => continue,
            UNK_ID => UNK,
            _ => vocab.token(id).ok_or(Error::IdOutOfRange {
                id,
                size: vocab.len(),
            })?,
        };
        if let Some(prev) = prev {
            if needs_separator(prev, token) {
                out.push(' ');
            }
        }
        out.push_str(token);
        prev = Some(token);
    }
    Ok(out)
}

fn needs_separator(prev: &str, next: &str) -> bool {
    if !crate::catalog::is_control_word(prev) {
        return false;
    }
    let first = next.as_bytes()[0];
    first.is_ascii_alphabetic() || (first == b'{' && matches!(prev, "\\begin" | "\\end"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{build_vocab, MacroCatalog};

    fn vocab() -> CuratedVocabulary {
        let mut cat = MacroCatalog::new();
        for c in [
            "\\alpha",
            "\\leftarrow",
            "\\begin",
            "\\end",
            "\\frac",
            "\\,",
            "\\{",
        ] {
            cat.add_command(c);
        }
        cat.add_environment("matrix");
        build_vocab(&cat, true)
    }

    fn texts<'a>(lexemes: &[Lexeme<'a>]) -> Vec<&'a str> {
        lexemes.iter().map(|l| l.text).collect()
    }

    #[test]
    fn lex_examples() {
        let v = vocab();
        let l = lex_with("\\alpha x", |n| v.has_environment(n)).unwrap();
        assert_eq!(texts(&l), ["\\alpha", " ", "x"]);
        assert_eq!(l[1].kind, LexemeKind::Whitespace);

        let l = lex_with("\\begin{matrix}", |n| v.has_environment(n)).unwrap();
        assert_eq!(texts(&l), ["\\begin{matrix}"]);
        assert_eq!(l[0].kind, LexemeKind::Environment);

        let l = lex("x^{2}").unwrap();
        assert_eq!(texts(&l), ["x", "^", "{", "2", "}"]);
    }

    #[test]
    fn lex_unknown_environment_is_not_fused() {
        let v = vocab();
        let l = lex_with("\\begin{foo}", |n| v.has_environment(n)).unwrap();
        assert_eq!(texts(&l), ["\\begin", "{", "f", "o", "o", "}"]);
    }

    #[test]
    fn lex_control_symbols_and_unicode() {
        let l = lex("\\,\\\\ \\≤a≥").unwrap();
        assert_eq!(texts(&l), ["\\,", "\\\\", " ", "\\≤", "a", "≥"]);
        assert_eq!(l[3].kind, LexemeKind::ControlSymbol);
    }

    #[test]
    fn lex_preserves_input() {
        let s = "\\frac { a } {\tb }\n\\alpha2";
        let joined: String = lex(s).unwrap().iter().map(|l| l.text).collect();
        assert_eq!(joined, s);
    }

    #[test]
    fn lone_backslash_is_an_error() {
        assert!(matches!(lex("x\\"), Err(Error::TrailingBackslash(1))));
    }

    #[test]
    fn encode_examples() {
        let v = vocab();
        assert_eq!(
            encode(&v, "\\leftarrow").unwrap(),
            [v.id("\\leftarrow").unwrap()]
        );
        assert!(encode(&v, "").unwrap().is_empty());
        let ids = encode(&v, "\\alpha  x").unwrap();
        assert_eq!(ids, [v.id("\\alpha").unwrap(), v.id("x").unwrap()]);
    }

    #[test]
    fn unknown_control_word_is_single_unk() {
        let v = vocab();
        assert_eq!(encode(&v, "\\foo x").unwrap(), [UNK_ID, v.id("x").unwrap()]);
        assert_eq!(encode(&v, "é").unwrap(), [UNK_ID]);
    }

    #[test]
    fn decode_examples() {
        let v = vocab();
        let id = |t: &str| v.id(t).unwrap();
        assert_eq!(decode(&v, &[id("\\alpha"), id("x")]).unwrap(), "\\alpha x");
        assert_eq!(
            decode(&v, &[id("x"), id("^"), id("{"), id("2"), id("}")]).unwrap(),
            "x^{2}"
        );
        assert_eq!(decode(&v, &[]).unwrap(), "");
        assert_eq!(
            decode(&v, &[BOS_ID, id("x"), UNK_ID, EOS_ID, PAD_ID]).unwrap(),
            "x<unk>"
        );
        assert_eq!(
            decode(&v, &[id("\\alpha"), PAD_ID, id("x")]).unwrap(),
            "\\alpha x"
        );
        assert!(matches!(
            decode(&v, &[9999]),
            Err(Error::IdOutOfRange { id: 9999, .. })
        ));
    }

    #[test]
    fn decode_keeps_unfused_begin_apart() {
        let v = vocab();
        let ids = encode(&v, "\\begin {matrix}").unwrap();
        assert_eq!(ids.len(), 9);
        let text = decode(&v, &ids).unwrap();
        assert_eq!(text, "\\begin {matrix}");
        assert_eq!(encode(&v, &text).unwrap(), ids);
    }
}
