#![no_main]

use dmaxcorr::LagGrid;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(g) = LagGrid::parse(text) {
        assert!(!g.is_empty());
        assert!(g.lags().windows(2).all(|w| w[0] < w[1]));
        let _ = g.max_abs();
    }
});
