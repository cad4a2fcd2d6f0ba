//! Corpus generator specs are TOML documents; parsing and validation must
//! never panic, and any accepted spec must generate a parseable corpus.
#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(mut spec) = semlex::synth::parse_spec(text) {
        // Generation is only exercised at a size the fuzzer can afford.
        spec.sentences = spec.sentences.min(8);
        let corpus = semlex::synth::generate(&spec, 1);
        semlex::treebank::parse_trees(&corpus).expect("generated corpus must parse");
    }
});
