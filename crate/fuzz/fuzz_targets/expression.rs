#![no_main]

use densclone::Expr;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    let Ok(e) = Expr::parse(src) else { return };
    let again = Expr::parse(&e.to_string()).expect("printed expression parses");
    assert_eq!(again, e);
    let x: Vec<u64> = (0..e.max_var() as u64).map(|i| i * 7 + 1).collect();
    assert_eq!(e.eval(&x), again.eval(&x));
});
