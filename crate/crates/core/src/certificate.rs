//! Badness certificates and their validator.
//!
//! A certificate fixes one `ε > 0` and lists entries `(i, n, t, A)`. An entry
//! holds for `f` of arity `k` when
//!
//! * `n ≥ i`, `t ≥ i`, and `A ⊆ [i, n)`;
//! * `A` is sparse with respect to `i`: `|A ∩ [0, r)| ≤ r / 2^i` for every `r ≤ n`;
//! * `f[A^k]` is `ε`-dense in `[0, t)`: `|f[A^k] ∩ [0, t)| ≥ ε·t`.
//!
//! An entry for `i` also witnesses every smaller index, so a passing
//! certificate speaks for all indices up to its largest `i`.
//!
//! Text format, one item per line, `#` starts a comment:
//!
//! ```text
//! badness-certificate 1
//! function sqrt-indicator      (optional)
//! epsilon 1/3
//! entry 2 17 5                 i n t
//! A 9 16                       elements, may repeat over several lines
//! end
//! ```

use std::fmt::{self, Write as _};

use serde::Serialize;

use crate::func::FinFun;
use crate::ideal::image_below;
use crate::parse::ParseError;
use crate::rational::Rat;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CertEntry {
    pub i: u64,
    pub n: u64,
    pub t: u64,
    #[serde(rename = "A")]
    pub a: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BadnessCertificate {
    pub function: Option<String>,
    pub eps: Rat,
    pub entries: Vec<CertEntry>,
}

const HEADER: &str = "badness-certificate 1";

impl BadnessCertificate {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        parse_certificate(text)
    }

    /// Largest index witnessed, `None` for an empty certificate.
    pub fn scope(&self) -> Option<u64> {
        self.entries.iter().map(|e| e.i).max()
    }
}

impl fmt::Display for BadnessCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{HEADER}")?;
        if let Some(func) = &self.function {
            writeln!(f, "function {func}")?;
        }
        writeln!(f, "epsilon {}", self.eps)?;
        for e in &self.entries {
            writeln!(f, "entry {} {} {}", e.i, e.n, e.t)?;
            for chunk in e.a.chunks(16) {
                let mut line = String::from("A");
                for x in chunk {
                    write!(line, " {x}")?;
                }
                writeln!(f, "{line}")?;
            }
            writeln!(f, "end")?;
        }
        Ok(())
    }
}

fn parse_certificate(text: &str) -> Result<BadnessCertificate, ParseError> {
    let mut function = None;
    let mut eps: Option<Rat> = None;
    let mut entries = Vec::new();
    let mut open: Option<CertEntry> = None;
    let mut seen_header = false;
    let mut offset = 0usize;

    for raw in text.split_inclusive('\n') {
        let line_start = offset;
        offset += raw.len();
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |m: &str| ParseError::new(line_start, m.to_string());
        if !seen_header {
            if line != HEADER {
                return Err(err("expected `badness-certificate 1`"));
            }
            seen_header = true;
            continue;
        }
        let (word, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match word {
            "function" if open.is_none() && eps.is_none() && function.is_none() => {
                if rest.is_empty() {
                    return Err(err("empty function specification"));
                }
                function = Some(rest.to_string());
            }
            "epsilon" if open.is_none() && eps.is_none() => {
                let r: Rat = rest.parse().map_err(|e| err(&format!("bad epsilon: {e}")))?;
                if !r.is_positive() {
                    return Err(err("epsilon must be positive"));
                }
                eps = Some(r);
            }
            "entry" if open.is_none() && eps.is_some() => {
                let nums = parse_nats(rest).map_err(|m| err(&m))?;
                let [i, n, t] = nums[..] else {
                    return Err(err("entry needs exactly three numbers: i n t"));
                };
                open = Some(CertEntry { i, n, t, a: Vec::new() });
            }
            "A" if open.is_some() => {
                let nums = parse_nats(rest).map_err(|m| err(&m))?;
                open.as_mut().unwrap().a.extend(nums);
            }
            "end" if open.is_some() && rest.is_empty() => entries.push(open.take().unwrap()),
            _ => return Err(err(&format!("unexpected `{word}`"))),
        }
    }
    if !seen_header {
        return Err(ParseError::new(0, "empty certificate"));
    }
    if open.is_some() {
        return Err(ParseError::new(text.len(), "unterminated entry"));
    }
    let eps = eps.ok_or_else(|| ParseError::new(text.len(), "missing epsilon"))?;
    Ok(BadnessCertificate { function, eps, entries })
}

fn parse_nats(s: &str) -> Result<Vec<u64>, String> {
    s.split_whitespace()
        .map(|w| w.parse::<u64>().map_err(|_| format!("`{w}` is not a 64-bit natural")))
        .collect()
}

/// First violated condition of an entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EntryFailure {
    /// `n < i` or `t < i`.
    IndexBounds { i: u64, n: u64, t: u64 },
    /// `A` is not strictly increasing at this element.
    NotIncreasing { element: u64 },
    /// An element outside `[i, n)`.
    OutOfRange { element: u64 },
    /// `|A ∩ [0, r)| = count > r / 2^i`.
    Sparsity { r: u64, count: u64 },
    /// `|f[A^k] ∩ [0, t)| = count < ε·t`.
    Density { count: u64, t: u64 },
}

impl fmt::Display for EntryFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EntryFailure::IndexBounds { i, n, t } => write!(f, "n = {n} and t = {t} must both be at least i = {i}"),
            EntryFailure::NotIncreasing { element } => write!(f, "A is not strictly increasing at {element}"),
            EntryFailure::OutOfRange { element } => write!(f, "element {element} lies outside [i, n)"),
            EntryFailure::Sparsity { r, count } => write!(f, "sparsity fails at r = {r}: {count} elements below r"),
            EntryFailure::Density { count, t } => write!(f, "density fails: only {count} image values below t = {t}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EntryCheck {
    pub i: u64,
    pub pass: bool,
    /// `|f[A^k] ∩ [0, t)|` when the structural checks got that far.
    pub image_count: Option<u64>,
    pub failure: Option<EntryFailure>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationRecord {
    pub pass: bool,
    pub eps: Rat,
    /// Largest witnessed index; the verdict says nothing about larger ones.
    pub scope: Option<u64>,
    pub entries: Vec<EntryCheck>,
}

impl ValidationRecord {
    pub fn scope_text(&self) -> String {
        match self.scope {
            None => "no i witnessed".to_string(),
            Some(i) => format!("bad as far as witnessed for every i <= {i}"),
        }
    }

    pub fn first_failure(&self) -> Option<(usize, &EntryFailure)> {
        self.entries.iter().enumerate().find_map(|(j, e)| e.failure.as_ref().map(|f| (j, f)))
    }
}

/// Whether `count ≤ r / 2^i`, without forming `2^i`.
pub(crate) fn sparse_at(count: u64, r: u64, i: u64) -> bool {
    if count == 0 {
        return true;
    }
    i < 64 && (count as u128) << i <= r as u128
}

pub fn check_entry(f: &FinFun, eps: &Rat, e: &CertEntry) -> EntryCheck {
    let fail = |failure, image_count| EntryCheck { i: e.i, pass: false, image_count, failure: Some(failure) };
    if e.n < e.i || e.t < e.i {
        return fail(EntryFailure::IndexBounds { i: e.i, n: e.n, t: e.t }, None);
    }
    for w in e.a.windows(2) {
        if w[0] >= w[1] {
            return fail(EntryFailure::NotIncreasing { element: w[1] }, None);
        }
    }
    if let Some(&x) = e.a.iter().find(|&&x| x < e.i || x >= e.n) {
        return fail(EntryFailure::OutOfRange { element: x }, None);
    }
    // The prefix count only rises just after an element, so r = a_j + 1 is the worst case.
    for (j, &x) in e.a.iter().enumerate() {
        let (count, r) = (j as u64 + 1, x + 1);
        if !sparse_at(count, r, e.i) {
            return fail(EntryFailure::Sparsity { r, count }, None);
        }
    }
    let count = image_below(f, &e.a, e.t).len() as u64;
    if !eps.at_most_count(count, e.t) {
        return fail(EntryFailure::Density { count, t: e.t }, Some(count));
    }
    EntryCheck { i: e.i, pass: true, image_count: Some(count), failure: None }
}

pub fn validate_certificate(f: &FinFun, cert: &BadnessCertificate) -> ValidationRecord {
    let entries: Vec<EntryCheck> = cert.entries.iter().map(|e| check_entry(f, &cert.eps, e)).collect();
    ValidationRecord {
        pass: cert.eps.is_positive() && entries.iter().all(|c| c.pass),
        eps: cert.eps.clone(),
        scope: cert.scope(),
        entries,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cert(eps: Rat, entries: Vec<CertEntry>) -> BadnessCertificate {
        BadnessCertificate { function: None, eps, entries }
    }

    #[test]
    fn sqrt_indicator_entry() {
        // Squares of multiples of 4 below 1000; the image below 9 is {4, 8}.
        let f = FinFun::sqrt_indicator();
        let a: Vec<u64> = vec![16, 64, 144, 256, 400, 576, 784];
        let good = CertEntry { i: 2, n: 1000, t: 9, a };
        let rec = validate_certificate(&f, &cert(Rat::new(1, 5), vec![good]));
        assert!(rec.pass, "{rec:?}");
        assert_eq!(rec.entries[0].image_count, Some(2));

        let crowded = CertEntry { i: 2, n: 1000, t: 10, a: vec![2, 3, 4] };
        let rec = validate_certificate(&f, &cert(Rat::new(1, 2), vec![crowded]));
        assert_eq!(rec.first_failure().unwrap().1, &EntryFailure::Sparsity { r: 3, count: 1 });
    }

    #[test]
    fn identity_entries() {
        let f = FinFun::identity();
        let e = CertEntry { i: 1, n: 8, t: 8, a: vec![2, 5] };
        let rec = validate_certificate(&f, &cert(Rat::new(1, 4), vec![e.clone()]));
        assert!(rec.pass);
        let rec = validate_certificate(&f, &cert(Rat::new(1, 2), vec![e]));
        assert_eq!(rec.first_failure().unwrap().1, &EntryFailure::Density { count: 2, t: 8 });
    }

    #[test]
    fn empty_is_vacuous() {
        let rec = validate_certificate(&FinFun::identity(), &cert(Rat::new(1, 3), vec![]));
        assert!(rec.pass);
        assert_eq!(rec.scope_text(), "no i witnessed");
    }

    #[test]
    fn structural_failures() {
        let f = FinFun::identity();
        let eps = Rat::new(1, 100);
        let checks = [
            (CertEntry { i: 5, n: 4, t: 9, a: vec![] }, EntryFailure::IndexBounds { i: 5, n: 4, t: 9 }),
            (CertEntry { i: 1, n: 9, t: 9, a: vec![3, 3] }, EntryFailure::NotIncreasing { element: 3 }),
            (CertEntry { i: 1, n: 9, t: 9, a: vec![0] }, EntryFailure::OutOfRange { element: 0 }),
            (CertEntry { i: 1, n: 9, t: 9, a: vec![9] }, EntryFailure::OutOfRange { element: 9 }),
            (CertEntry { i: 70, n: 99, t: 99, a: vec![80] }, EntryFailure::Sparsity { r: 81, count: 1 }),
        ];
        for (e, want) in checks {
            let rec = validate_certificate(&f, &cert(eps.clone(), vec![e]));
            assert_eq!(rec.first_failure().unwrap().1, &want);
        }
    }

    #[test]
    fn text_round_trip() {
        let c = BadnessCertificate {
            function: Some("sqrt-indicator".into()),
            eps: Rat::new(1, 3),
            entries: vec![
                CertEntry { i: 1, n: 17, t: 5, a: vec![9, 16] },
                CertEntry { i: 3, n: 170, t: 14, a: (9..=13).map(|s| s * s).collect() },
                CertEntry { i: 4, n: 9, t: 9, a: (0..40).collect() },
            ],
        };
        let text = c.to_string();
        assert_eq!(BadnessCertificate::parse(&text).unwrap(), c);
    }

    #[test]
    fn parse_errors_carry_offsets() {
        let e = BadnessCertificate::parse("badness-certificate 1\nepsilon 0\n").unwrap_err();
        assert_eq!(e.pos, 22);
        assert!(BadnessCertificate::parse("").is_err());
        assert!(BadnessCertificate::parse("badness-certificate 1\n").is_err());
        assert!(BadnessCertificate::parse("badness-certificate 1\nepsilon 1/2\nentry 1 2\nend\n").is_err());
        assert!(BadnessCertificate::parse("badness-certificate 1\nepsilon 1/2\nentry 1 2 3\nA 4\n").is_err());
        assert!(BadnessCertificate::parse("badness-certificate 1\nepsilon 1/2\nA 4\n").is_err());
        let ok = BadnessCertificate::parse("# c\nbadness-certificate 1\nepsilon 1/2 # half\n").unwrap();
        assert!(ok.entries.is_empty());
    }
}
