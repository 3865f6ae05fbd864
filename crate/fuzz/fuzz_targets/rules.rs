#![no_main]

use lackwalk_core::harness::{parse_size_range, CoinRule, SelfLoopRule, StepRule, ThresholdRule};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(r) = text.parse::<SelfLoopRule>() {
        assert_eq!(r.to_string().parse::<SelfLoopRule>().unwrap(), r);
        let _ = r.weight(4900);
    }
    if let Ok(r) = text.parse::<StepRule>() {
        assert_eq!(r.to_string().parse::<StepRule>().unwrap(), r);
    }
    if let Ok(r) = text.parse::<ThresholdRule>() {
        assert_eq!(r.to_string().parse::<ThresholdRule>().unwrap(), r);
    }
    if let Ok(r) = text.parse::<CoinRule>() {
        assert_eq!(r.to_string().parse::<CoinRule>().unwrap(), r);
        let _ = r.build(0.5);
    }
    let _ = parse_size_range(text);
});
