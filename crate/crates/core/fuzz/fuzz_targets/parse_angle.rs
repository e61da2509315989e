#![no_main]

use libfuzzer_sys::fuzz_target;
use tfim_gp::sweep::{parse_angle, parse_angle_list};

fuzz_target!(|data: &str| {
    if let Ok(x) = parse_angle(data) {
        assert!(x.is_finite());
    }
    if let Ok(xs) = parse_angle_list(data) {
        assert!(!xs.is_empty() && xs.iter().all(|x| x.is_finite()));
    }
});
