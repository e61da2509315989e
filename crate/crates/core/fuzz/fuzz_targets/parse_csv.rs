#![no_main]

use libfuzzer_sys::fuzz_target;
use tfim_gp::output::{csv_bytes, parse_csv};

fuzz_target!(|data: &str| {
    if let Ok(records) = parse_csv(data) {
        // Whatever parses must survive a write/read cycle unchanged.
        let written = csv_bytes(&records).unwrap();
        let again = parse_csv(std::str::from_utf8(&written).unwrap()).unwrap();
        assert_eq!(csv_bytes(&again).unwrap(), written);
    }
});
