#![no_main]

use libfuzzer_sys::fuzz_target;
use texo_core::EmbeddingMatrix;

fuzz_target!(|data: &[u8]| {
    if let Ok(m) = EmbeddingMatrix::from_bytes(data) {
        assert_eq!(m.to_bytes(), data);
    }
});
