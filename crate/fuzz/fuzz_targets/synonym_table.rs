#![no_main]

use libfuzzer_sys::fuzz_target;
use texo_core::normalizer::normalize;
use texo_core::NormalizationRuleset;

fuzz_target!(|text: &str| {
    if let Ok(rules) = NormalizationRuleset::from_synonym_table(text) {
        let _ = normalize("x \\le y ≤ z", &rules);
    }
});
