#![no_main]

use libfuzzer_sys::fuzz_target;
use torsionworks::io::parse_group_ring;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = parse_group_ring(text, &['g', 'h']);
    }
});
