#![no_main]

use libfuzzer_sys::fuzz_target;
use simpson_nd::expr::{eval_ast, parse};

// first 24 bytes: the point (x1, x2, x3); the rest: the expression
fuzz_target!(|data: &[u8]| {
    if data.len() < 24 {
        return;
    }
    let point: Vec<f64> = data[..24]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let Ok(src) = std::str::from_utf8(&data[24..]) else {
        return;
    };
    if let Ok(tree) = parse(src) {
        if let Ok(v) = eval_ast(&tree, &point) {
            assert!(v.is_finite() || point.iter().any(|x| !x.is_finite()));
        }
    }
});
