#![no_main]

use libfuzzer_sys::fuzz_target;
use texo_core::catalog::{build_vocab, parse_catalog};

fuzz_target!(|text: &str| {
    if let Ok(catalog) = parse_catalog(text) {
        // Any accepted catalog must yield a valid vocabulary.
        let vocab = build_vocab(&catalog, true);
        assert!(vocab.len() >= 98);
    }
});
