#![no_main]

use libfuzzer_sys::fuzz_target;
use texo_core::bpe::{parse_merges, parse_vocab, METASPACE};
use texo_core::BaseTokenizer;

// Input: vocabulary text, a NUL byte, merges text, a NUL byte, a word.
fuzz_target!(|text: &str| {
    let mut parts = text.splitn(3, '\0');
    let (Some(vocab), Some(merges)) = (parts.next(), parts.next()) else {
        return;
    };
    let word = parts.next().unwrap_or("");
    let (Ok(vocab), Ok(merges)) = (parse_vocab(vocab), parse_merges(merges)) else {
        return;
    };
    if let Ok(tok) = BaseTokenizer::new(vocab, merges, METASPACE) {
        if let Ok(ids) = tok.encode(word) {
            assert_eq!(tok.decode(&ids).as_deref(), Some(word));
        }
        let _ = tok.encode_text(word);
    }
});
