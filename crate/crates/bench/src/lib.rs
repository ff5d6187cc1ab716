//! Fixtures shared by the criterion benches.

use fibstat::{parse_generator, Subject};

/// Generates the sequence for a spec known to be valid.
pub fn fixture(spec: &str) -> Subject {
    parse_generator(spec)
        .and_then(|g| g.generate())
        .unwrap_or_else(|e| panic!("bad bench fixture {spec}: {e}"))
}
