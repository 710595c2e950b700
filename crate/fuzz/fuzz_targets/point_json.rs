#![no_main]

use libfuzzer_sys::fuzz_target;
use raylab::space::{Point, Space};

// Points as accepted by `--lion` / `--man-start`, checked against each kind.
fuzz_target!(|data: &[u8]| {
    let Ok(p) = serde_json::from_slice::<Point>(data) else { return };
    for space in [Space::hyperbolic(), Space::euclidean(2).unwrap(), Space::l2box(3, 10.0).unwrap()] {
        if space.validate(&p).is_ok() {
            let _ = space.distance(&p, &p);
        }
    }
});
