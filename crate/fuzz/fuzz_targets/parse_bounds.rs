#![no_main]

use libfuzzer_sys::fuzz_target;
use simpson_nd::cli::parse_bounds;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok((lo, hi)) = parse_bounds(src) {
        assert!(lo.is_finite() && hi.is_finite());
    }
});
