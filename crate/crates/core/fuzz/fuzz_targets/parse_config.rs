#![no_main]

use libfuzzer_sys::fuzz_target;
use tfim_gp::sweep::{parse_config, SweepConfig};

fuzz_target!(|data: &str| {
    if let Ok(overrides) = parse_config(data) {
        let mut config = SweepConfig::default();
        config.apply(&overrides);
        if config.validate().is_ok() {
            assert!(config.lambda_min >= 0.0);
            assert!(!config.r_list.is_empty() && !config.theta_list.is_empty());
        }
    }
});
