//! The irregular-plural table is user-supplied; parsing must never panic,
//! and accepted tables must be usable for lemmatization.
#![no_main]

use libfuzzer_sys::fuzz_target;

use semlex::morph::{Exceptions, Morphology};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(exceptions) = Exceptions::parse(text, "fuzz") {
        let morph = Morphology::new(exceptions);
        let _ = morph.lemmatize("children", "NNS");
    }
});
