#![no_main]

use libfuzzer_sys::fuzz_target;
use raylab::analysis::rtree_capture_audit;
use raylab::game::{classify_outcome, Transcript};
use raylab::space::Space;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(t) = Transcript::from_json_str(text) else { return };
    let Ok(space) = Space::from_spec(&t.config.space) else { return };
    if t.validate(&space).is_err() {
        return;
    }
    let _ = classify_outcome(&t, t.config.d, t.config.tol);
    if space.as_tree().is_some() {
        let _ = rtree_capture_audit(&space, &t, t.config.d);
    }
});
