#![no_main]

use deltaiso_cli::expr;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(e) = expr::parse(s) {
        for p in [3, 5, 7] {
            if let Ok(w) = expr::eval(&e, p, 6) {
                // components and ghost coordinates must stay in range
                let _ = w.ghost(p);
            }
        }
    }
});
