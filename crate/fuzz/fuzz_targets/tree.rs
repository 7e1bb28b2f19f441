#![no_main]

use densclone::monoid::ClosedPairSet;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    let Ok(tree) = ClosedPairSet::parse(src) else { return };
    let again = ClosedPairSet::parse(&tree.to_string()).expect("printed tree parses");
    assert_eq!(again.roots(), tree.roots());
    let _ = tree.branches(64);
});
