//! The treebank reader must reject malformed bracketings with an error,
//! never a panic, and must round-trip whatever it accepts.
#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(trees) = semlex::treebank::parse_trees(text) {
        for tree in &trees {
            // Accepted input must survive a render-and-reparse cycle.
            let rendered = tree.to_string();
            let again = semlex::treebank::parse_trees(&rendered)
                .expect("rendered tree must reparse");
            assert_eq!(again.len(), 1);
            assert_eq!(&again[0], tree);
        }
    }
});
