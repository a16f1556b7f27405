#![no_main]

use libfuzzer_sys::fuzz_target;
use torsionworks::io::{parse_scene, print_scene};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(scene) = parse_scene(text) {
        let again = parse_scene(&print_scene(&scene)).expect("printed scenes parse");
        assert!(again.complex.same_structure(&scene.complex));
    }
});
