//! Macro catalog ingestion and curated vocabulary construction.
//!
//! A catalog is a line-oriented list of the commands and environments a
//! LaTeX renderer supports. The curated vocabulary built from it contains
//! the four special tokens, every printable ASCII character except space,
//! every command, and optionally one fused `\begin{env}` / `\end{env}` token
//! per environment.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

pub const PAD: &str = "<pad>";
pub const BOS: &str = "<s>";
pub const EOS: &str = "</s>";
pub const UNK: &str = "<unk>";

pub const PAD_ID: u32 = 0;
pub const BOS_ID: u32 = 1;
pub const EOS_ID: u32 = 2;
pub const UNK_ID: u32 = 3;

/// Special tokens in id order.
pub const SPECIALS: [&str; 4] = [PAD, BOS, EOS, UNK];

/// Number of tokens every vocabulary has regardless of catalog: 4 specials
/// plus 94 printable ASCII characters.
pub const BASE_VOCAB_SIZE: usize = SPECIALS.len() + 94;

/// Commands and environments, partitioned by lexical shape.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MacroCatalog {
    control_words: BTreeSet<String>,
    control_symbols: BTreeSet<String>,
    environments: BTreeSet<String>,
}

impl MacroCatalog {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a `\command` entry, classifying it as a control word or symbol.
    /// Returns `false` if the string has neither shape.
    pub fn add_command(&mut self, command: &str) -> bool {
        if is_control_word(command) {
            self.control_words.insert(command.to_owned());
            true
        } else if is_control_symbol(command) {
            self.control_symbols.insert(command.to_owned());
            true
        } else {
            false
        }
    }

    /// Adds an environment name. Returns `false` if the name is not made of
    /// ASCII letters and `*`.
    pub fn add_environment(&mut self, name: &str) -> bool {
        if is_environment_name(name) {
            self.environments.insert(name.to_owned());
            true
        } else {
            false
        }
    }

    pub fn control_words(&self) -> &BTreeSet<String> {
        &self.control_words
    }

    pub fn control_symbols(&self) -> &BTreeSet<String> {
        &self.control_symbols
    }

    pub fn environments(&self) -> &BTreeSet<String> {
        &self.environments
    }

    pub fn is_empty(&self) -> bool {
        self.control_words.is_empty()
            && self.control_symbols.is_empty()
            && self.environments.is_empty()
    }
}

/// `\` followed by one or more ASCII letters.
pub fn is_control_word(s: &str) -> bool {
    s.strip_prefix('\\')
        .is_some_and(|rest| !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_alphabetic()))
}

/// `\` followed by exactly one character that is not an ASCII letter.
pub fn is_control_symbol(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(
        (chars.next(), chars.next(), chars.next()),
        (Some('\\'), Some(c), None) if !c.is_ascii_alphabetic()
    )
}

pub fn is_environment_name(name: &str) -> bool {
    !name.is_empty() && name.bytes().all(|b| b.is_ascii_alphabetic() || b == b'*')
}

/// Parses catalog text. Blank lines and `#` lines are skipped; every other
/// line must be a `\command` or an `env:name` entry.
pub fn parse_catalog(text: &str) -> Result<MacroCatalog> {
    let mut catalog = MacroCatalog::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let ok = if let Some(name) = line.strip_prefix("env:") {
            catalog.add_environment(name)
        } else if line.starts_with('\\') {
            catalog.add_command(line)
        } else {
            false
        };
        if !ok {
            return Err(Error::MalformedCatalogLine {
                line: idx + 1,
                text: line.to_owned(),
            });
        }
    }
    Ok(catalog)
}

pub fn load_catalog(path: impl AsRef<Path>) -> Result<MacroCatalog> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_catalog(&text)
}

/// The distilled token set. Ids are list indices; ids 0..=3 are the
/// specials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CuratedVocabulary {
    tokens: Vec<String>,
    token_to_id: HashMap<String, u32>,
}

impl CuratedVocabulary {
    /// Builds a vocabulary from an explicit token list, validating the
    /// special prefix, uniqueness and absence of whitespace.
    pub fn from_tokens(tokens: Vec<String>) -> Result<Self> {
        if tokens.len() < SPECIALS.len() || tokens.iter().zip(SPECIALS).any(|(t, s)| t != s) {
            return Err(Error::MissingSpecials);
        }
        let mut token_to_id = HashMap::with_capacity(tokens.len());
        for (id, token) in tokens.iter().enumerate() {
            if token.is_empty() || token.chars().any(char::is_whitespace) {
                return Err(Error::MalformedVocabLine {
                    line: id + 1,
                    reason: format!("token {token:?} is empty or contains whitespace"),
                });
            }
            if token_to_id.insert(token.clone(), id as u32).is_some() {
                return Err(Error::DuplicateToken(token.clone()));
            }
        }
        Ok(Self {
            tokens,
            token_to_id,
        })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn id(&self, token: &str) -> Option<u32> {
        self.token_to_id.get(token).copied()
    }

    pub fn token(&self, id: u32) -> Option<&str> {
        self.tokens.get(id as usize).map(String::as_str)
    }

    pub fn contains(&self, token: &str) -> bool {
        self.token_to_id.contains_key(token)
    }

    /// Whether `\begin{name}` is a fused token of this vocabulary.
    pub fn has_environment(&self, name: &str) -> bool {
        is_environment_name(name) && self.contains(&format!("\\begin{{{name}}}"))
    }

    /// One token per line, line index = id.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for token in &self.tokens {
            let _ = writeln!(out, "{token}");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut tokens = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.strip_suffix('\r').unwrap_or(line);
            if line.is_empty() {
                return Err(Error::MalformedVocabLine {
                    line: idx + 1,
                    reason: "empty line".into(),
                });
            }
            tokens.push(line.to_owned());
        }
        Self::from_tokens(tokens)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}

/// Builds the curated vocabulary: specials, printable ASCII singles (no
/// space), sorted commands, then fused environment tokens when
/// `fuse_environments` is set.
pub fn build_vocab(catalog: &MacroCatalog, fuse_environments: bool) -> CuratedVocabulary {
    let mut tokens: Vec<String> = SPECIALS.iter().map(|s| s.to_string()).collect();
    tokens.extend((b'!'..=b'~').map(|b| char::from(b).to_string()));

    let commands: BTreeSet<&String> = catalog
        .control_words
        .iter()
        .chain(&catalog.control_symbols)
        .collect();
    tokens.extend(commands.into_iter().cloned());

    if fuse_environments {
        for env in &catalog.environments {
            tokens.push(format!("\\begin{{{env}}}"));
            tokens.push(format!("\\end{{{env}}}"));
        }
    }

    CuratedVocabulary::from_tokens(tokens).expect("catalog invariants guarantee a valid vocabulary")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classifies_entries() {
        let cat = parse_catalog("# header\n\n\\leftarrow\n\\,\nenv:matrix\n").unwrap();
        assert!(cat.control_words().contains("\\leftarrow"));
        assert!(cat.control_symbols().contains("\\,"));
        assert!(cat.environments().contains("matrix"));
    }

    #[test]
    fn empty_catalog() {
        let cat = parse_catalog("").unwrap();
        assert!(cat.is_empty());
        assert_eq!(build_vocab(&cat, true).len(), 98);
    }

    #[test]
    fn malformed_line_reports_number() {
        let err = parse_catalog("\\alpha\nalpha\n").unwrap_err();
        assert!(
            matches!(err, Error::MalformedCatalogLine { line: 2, .. }),
            "{err}"
        );
        assert!(parse_catalog("\\a1").is_err());
        assert!(parse_catalog("\\").is_err());
        assert!(parse_catalog("env:").is_err());
        assert!(parse_catalog("env:bad name").is_err());
        assert!(parse_catalog("\\ab,").is_err());
    }

    #[test]
    fn vocab_layout() {
        let mut cat = MacroCatalog::new();
        cat.add_command("\\zeta");
        cat.add_command("\\alpha");
        cat.add_command("\\{");
        cat.add_environment("matrix");
        let v = build_vocab(&cat, true);
        assert_eq!(&v.tokens()[..4], &SPECIALS);
        assert_eq!(v.token(4), Some("!"));
        assert_eq!(v.token(97), Some("~"));
        assert!(!v.contains(" "));
        assert_eq!(
            &v.tokens()[98..],
            &[
                "\\alpha",
                "\\zeta",
                "\\{",
                "\\begin{matrix}",
                "\\end{matrix}"
            ]
        );
        assert!(v.has_environment("matrix"));
        assert!(!v.has_environment("pmatrix"));

        let unfused = build_vocab(&cat, false);
        assert_eq!(unfused.len(), 98 + 3);
        assert!(!unfused.has_environment("matrix"));
    }

    #[test]
    fn vocab_file_roundtrip() {
        let mut cat = MacroCatalog::new();
        cat.add_command("\\frac");
        cat.add_environment("cases");
        let v = build_vocab(&cat, true);
        let text = v.to_text();
        assert!(text.starts_with("<pad>\n<s>\n</s>\n<unk>\n"));
        assert_eq!(CuratedVocabulary::from_text(&text).unwrap(), v);
    }

    #[test]
    fn vocab_file_rejects_bad_input() {
        assert!(matches!(
            CuratedVocabulary::from_text("<s>\n<pad>\n</s>\n<unk>\n"),
            Err(Error::MissingSpecials)
        ));
        assert!(matches!(
            CuratedVocabulary::from_text("<pad>\n<s>\n</s>\n<unk>\na\na\n"),
            Err(Error::DuplicateToken(_))
        ));
        assert!(CuratedVocabulary::from_text("<pad>\n<s>\n</s>\n<unk>\na b\n").is_err());
        assert!(CuratedVocabulary::from_text("<pad>\n<s>\n</s>\n<unk>\n\n").is_err());
    }
}
