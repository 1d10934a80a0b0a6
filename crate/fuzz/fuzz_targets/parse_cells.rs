#![no_main]

use libfuzzer_sys::fuzz_target;
use simpson_nd::cli::parse_cells;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cells) = parse_cells(src) {
        assert!(!cells.is_empty());
        assert!(cells.iter().all(|&m| m >= 1));
    }
});
