#![no_main]

use std::sync::OnceLock;

use libfuzzer_sys::fuzz_target;
use texo_core::normalizer::normalize;
use texo_core::NormalizationRuleset;

fuzz_target!(|text: &str| {
    static RULES: OnceLock<NormalizationRuleset> = OnceLock::new();
    let rules = RULES.get_or_init(NormalizationRuleset::default);
    if let Ok(once) = normalize(text, rules) {
        assert_eq!(normalize(&once, rules).unwrap(), once);
    }
});
