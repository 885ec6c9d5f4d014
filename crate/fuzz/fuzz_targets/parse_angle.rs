//! Fuzz the CLI angle syntax (`1.5`, `1.5rad`, `90deg`).

#![no_main]

use libfuzzer_sys::fuzz_target;
use stokesray::document::parse_angle;

fuzz_target!(|data: &[u8]| {
    if data.len() > 4096 {
        return;
    }
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(value) = parse_angle(text) {
        assert!(
            value.is_finite(),
            "accepted a non-finite angle from {text:?}"
        );
        // Normalization must stay in range for anything the parser accepts.
        let normalized = stokesray::angle::normalize(value);
        assert!((0.0..std::f64::consts::TAU).contains(&normalized));
    }
});
