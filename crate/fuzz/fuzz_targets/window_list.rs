#![no_main]

use dmaxcorr::WindowSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    for theta in [0.0, 0.5, 1.0] {
        if let Ok(ws) = WindowSpec::parse_list(text, theta) {
            assert!(!ws.is_empty());
            assert!(ws.iter().all(|w| w.n >= 2 && w.lead() <= w.n));
        }
    }
});
