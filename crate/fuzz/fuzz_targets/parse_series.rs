#![no_main]

use dmaxcorr::series::parse_series;
use dmaxcorr::IngestSpec;
use libfuzzer_sys::fuzz_target;

// First byte picks the delimiter, second the column, third the header skip.
fuzz_target!(|data: &[u8]| {
    if data.len() < 3 {
        return;
    }
    let delimiter = [b'\t', b',', b';', b' ', b'|'][data[0] as usize % 5] as char;
    let spec = IngestSpec {
        column_index: data[1] as usize % 4,
        delimiter,
        skip_header: data[2] as usize % 3,
    };
    if let Ok(s) = parse_series(&data[3..], &spec) {
        assert!(!s.is_empty());
        assert!(s.values().iter().all(|v| v.is_finite()));
    }
});
