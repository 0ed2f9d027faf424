#![no_main]

use libfuzzer_sys::fuzz_target;
use texo_core::CuratedVocabulary;

fuzz_target!(|text: &str| {
    if let Ok(vocab) = CuratedVocabulary::from_text(text) {
        let again = CuratedVocabulary::from_text(&vocab.to_text()).unwrap();
        assert_eq!(again, vocab);
    }
});
