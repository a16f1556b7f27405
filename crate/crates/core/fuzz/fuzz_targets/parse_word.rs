#![no_main]

use libfuzzer_sys::fuzz_target;
use torsionworks::io::parse_word;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(w) = parse_word(text, &['a', 'b', 'c']) {
        // reduced words stay reduced
        let s = w.syllables();
        assert!(s.iter().all(|&(_, e)| e != 0));
        assert!(s.windows(2).all(|p| p[0].0 != p[1].0));
    }
});
