#![no_main]

use lackwalk_core::harness::TargetToken;
use lackwalk_core::Geometry;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(token) = text.parse::<TargetToken>() {
        for g in [Geometry::ring(200).unwrap(), Geometry::torus(70).unwrap()] {
            if let Ok(v) = token.resolve(&g) {
                assert!(v < g.n_vertices());
            }
        }
    }
});
