#![no_main]

use std::sync::OnceLock;

use libfuzzer_sys::fuzz_target;
use texo_core::catalog::{build_vocab, parse_catalog, UNK_ID};
use texo_core::tokenizer::{decode, encode};
use texo_core::CuratedVocabulary;

fn vocab() -> &'static CuratedVocabulary {
    static VOCAB: OnceLock<CuratedVocabulary> = OnceLock::new();
    VOCAB.get_or_init(|| {
        let catalog = parse_catalog(include_str!("../../data/katex_catalog.txt")).unwrap();
        build_vocab(&catalog, true)
    })
}

fuzz_target!(|text: &str| {
    let v = vocab();
    // `<unk>` renders as text that lexes back into several characters.
    if let Some(ids) = encode(v, text).ok().filter(|ids| !ids.contains(&UNK_ID)) {
        let rendered = decode(v, &ids).unwrap();
        assert_eq!(encode(v, &rendered).unwrap(), ids);
    }
});
