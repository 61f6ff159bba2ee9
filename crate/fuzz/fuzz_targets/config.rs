#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Err(e) = miesim::config::parse(s) {
        assert!(e.line >= 1 && e.column >= 1);
    }
});
