#![no_main]

use libfuzzer_sys::fuzz_target;
use miesim_core::arch::text::{parse, serialize};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(c) = parse(s) {
        // anything accepted must survive a round trip
        assert_eq!(parse(&serialize(&c)).unwrap(), c);
    }
});
