#![no_main]

use deltaiso_cli::AnalysisReport;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(r) = AnalysisReport::from_json(s) {
        let back = AnalysisReport::from_json(&r.to_json()).expect("printed report parses");
        assert_eq!(back, r);
    }
});
