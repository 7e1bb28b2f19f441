#![no_main]

use densclone::NatSet;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    // `file:` would read from disk.
    if src.contains("file:") {
        return;
    }
    let Ok(set) = NatSet::parse(src) else { return };
    let again = NatSet::parse(&set.spec()).expect("printed spec parses");
    let (a, b) = (set.elements_below(256), again.elements_below(256));
    if let (Ok(a), Ok(b)) = (a, b) {
        assert_eq!(a, b);
    }
});
