#![no_main]

use densclone::certificate::{validate_certificate, BadnessCertificate};
use densclone::FinFun;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    let Ok(cert) = BadnessCertificate::parse(src) else { return };
    assert_eq!(BadnessCertificate::parse(&cert.to_string()).expect("printed certificate parses"), cert);
    // Keep validation cheap: only small scans.
    if cert.entries.iter().all(|e| e.n < 1 << 16 && e.t < 1 << 16 && e.a.len() < 256) {
        let _ = validate_certificate(&FinFun::sqrt_indicator(), &cert);
    }
});
