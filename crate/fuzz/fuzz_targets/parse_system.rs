//! Fuzz the system-document parser with arbitrary bytes. A successful parse
//! must survive emit → parse unchanged and yield a usable collection.

#![no_main]

use libfuzzer_sys::fuzz_target;
use stokesray::document::{document_to_collection, emit_system, parse_system};

fuzz_target!(|data: &[u8]| {
    // Keep pathological inputs bounded; documents are small by nature.
    if data.len() > 1 << 16 {
        return;
    }
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(doc) = parse_system(text) {
        // A validated document always converts.
        let coll = document_to_collection(&doc).expect("validated document converts");
        let _ = coll.eigen_permutation();

        // Canonical emit round-trips losslessly.
        let emitted = emit_system(&doc);
        let reparsed = parse_system(&emitted).expect("emitted document parses");
        assert_eq!(reparsed, doc, "parse→emit→parse changed the document");
    }
});
