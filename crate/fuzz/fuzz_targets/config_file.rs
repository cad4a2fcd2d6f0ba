//! The key=value settings file is hand-written by users; parsing must
//! never panic.
#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let _ = semlex::cli::FileConfig::parse(text, "fuzz");
});
