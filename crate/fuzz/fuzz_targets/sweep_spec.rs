#![no_main]

use lackwalk_core::harness::parse_sweep_spec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(spec) = parse_sweep_spec(text) {
        let again = parse_sweep_spec(&spec.to_document()).expect("printed spec parses");
        assert_eq!(again, spec);
    }
});
