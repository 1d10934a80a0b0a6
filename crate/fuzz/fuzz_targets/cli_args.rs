#![no_main]

use libfuzzer_sys::fuzz_target;
use simpson_nd::cli::run_with_limits;
use simpson_nd::Limits;

// NUL-separated argv; small limits keep every run cheap
fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else {
        return;
    };
    let argv: Vec<&str> = src.split('\0').collect();
    // trial counts are not covered by the point budget
    let slow = argv.windows(2).any(|w| {
        w[0].starts_with("--trials") && w[1].trim().parse::<u64>().map_or(true, |t| t > 1000)
    }) || argv.iter().any(|a| a.starts_with("--trials="));
    if slow {
        return;
    }
    let args = std::iter::once("simpson-nd").chain(argv);
    let limits = Limits {
        max_dim: 4,
        max_points: 10_000,
    };
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run_with_limits(args, &limits, &mut out, &mut err);
    assert!((0..=3).contains(&code));
});
