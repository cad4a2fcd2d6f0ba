//! Seed lists come straight from users; parsing must never panic, and
//! every accepted entry must carry a non-empty lemma key.
#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(entries) = semlex::morph::parse_seed_file(text, "fuzz") {
        for entry in &entries {
            assert!(!entry.key.is_empty());
        }
    }
});
