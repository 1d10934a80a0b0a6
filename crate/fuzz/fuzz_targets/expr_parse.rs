#![no_main]

use libfuzzer_sys::fuzz_target;
use simpson_nd::expr::parse;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else {
        return;
    };
    match parse(src) {
        Ok(tree) => {
            let printed = tree.to_string();
            let again = parse(&printed).expect("printed tree must reparse");
            assert_eq!(again, tree);
        }
        Err(e) => {
            assert!(e.position <= src.len());
            assert!(src.is_char_boundary(e.position));
        }
    }
});
