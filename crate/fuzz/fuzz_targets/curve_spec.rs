#![no_main]

use deltaiso::formalgroup::WeierstrassCurve;
use deltaiso::Context;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let ctx = Context::new(5, 8, 12).unwrap();
    if let Ok(e) = WeierstrassCurve::parse(s, &ctx) {
        let again = WeierstrassCurve::parse(&e.to_string(), &ctx).expect("printed curve parses");
        assert_eq!(again, e);
        let inv = e.count_points().expect("small p");
        assert!(inv.a_p * inv.a_p <= 20);
    }
});
