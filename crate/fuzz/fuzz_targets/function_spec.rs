#![no_main]

use densclone::FinFun;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    let Ok(f) = FinFun::parse(src) else { return };
    if f.arity() > 4 {
        return;
    }
    let x = vec![3u64; f.arity()];
    let v = f.call(&x);
    if let Some(spec) = f.spec() {
        let g = FinFun::parse(&spec).expect("printed spec parses");
        assert_eq!(g.arity(), f.arity());
        assert_eq!(g.call(&x), v);
    }
});
