#![no_main]

use dmaxcorr::XcorrResult;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(r) = XcorrResult::from_tsv(text) {
        let again = XcorrResult::from_tsv(&r.to_tsv("")).expect("own output parses");
        assert_eq!(again.rows(), r.rows());
    }
});
