//! The set-specification language.
//!
//! ```text
//! set      := "empty" | "all" | "evens" | "squares"
//!           | "multiples:" nat                  (nat ≥ 1)
//!           | "powers:" nat                     (nat ≥ 2)
//!           | "progression:" nat "," nat        start, step ≥ 1
//!           | "intervals:" iv { "," iv }        iv := "[" nat "," nat ")"
//!           | "finite:" list
//!           | "complement:" list                ℕ minus the list
//!           | "union(" set "," set ")"
//!           | "inter(" set "," set ")"
//!           | "pred(" nat "):" expr             {x < bound : expr ≠ 0}, x is x1
//!           | "file:" path
//! list     := "{" [ nat { "," nat } ] "}"
//! ```
//!
//! A `file:` path runs to the next `,` or `)` (or the end of input). The file
//! holds one decimal natural per line, strictly increasing; blank lines are
//! ignored. Errors carry the byte offset into the specification.

use std::path::Path;

use crate::expr::parse_expr;
use crate::natset::{NatSet, SetError};
use crate::parse::{Cursor, ParseError, MAX_DEPTH};

pub fn parse_set(src: &str) -> Result<NatSet, SetError> {
    let mut cur = Cursor::new(src);
    let set = parse_inner(&mut cur, 0)?;
    if !cur.at_end() {
        return Err(cur.error("unexpected trailing input").into());
    }
    Ok(set)
}

/// Reads a newline-separated, strictly increasing list of naturals.
pub fn load_set_file(path: &Path) -> Result<NatSet, SetError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| SetError::File { path: path.display().to_string(), message: e.to_string() })?;
    parse_set_file(&text).map_err(|message| SetError::File { path: path.display().to_string(), message })
}

pub fn parse_set_file(text: &str) -> Result<NatSet, String> {
    let mut out: Vec<u64> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let v: u64 = line
            .parse()
            .map_err(|_| format!("line {}: `{line}` is not a natural number", lineno + 1))?;
        if let Some(&prev) = out.last() {
            if v <= prev {
                return Err(format!("line {}: {v} does not exceed the previous element {prev}", lineno + 1));
            }
        }
        out.push(v);
    }
    NatSet::from_sorted(out).map_err(|e| e.to_string())
}

fn parse_list(cur: &mut Cursor<'_>) -> Result<Vec<u64>, ParseError> {
    cur.expect("{")?;
    let mut v = Vec::new();
    if cur.eat("}") {
        return Ok(v);
    }
    loop {
        v.push(cur.nat()?);
        if cur.eat("}") {
            return Ok(v);
        }
        cur.expect(",")?;
    }
}

fn parse_interval(cur: &mut Cursor<'_>) -> Result<(u64, u64), ParseError> {
    cur.expect("[")?;
    let a = cur.nat()?;
    cur.expect(",")?;
    let b = cur.nat()?;
    cur.expect(")")?;
    Ok((a, b))
}

fn at(pos: usize, e: SetError) -> SetError {
    match e {
        SetError::Malformed(m) => SetError::Parse(ParseError::new(pos, m)),
        other => other,
    }
}

fn parse_inner(cur: &mut Cursor<'_>, depth: usize) -> Result<NatSet, SetError> {
    if depth > MAX_DEPTH {
        return Err(cur.error("set expression nested too deeply").into());
    }
    cur.skip_ws();
    let start = cur.pos();
    let word = cur.ident().ok_or_else(|| cur.error("expected a set name"))?;
    let set = match word {
        "empty" => NatSet::empty(),
        "all" => NatSet::all(),
        "evens" => NatSet::evens(),
        "squares" => NatSet::squares(),
        "multiples" => {
            cur.expect(":")?;
            NatSet::multiples(cur.nat()?).map_err(|e| at(start, e))?
        }
        "powers" => {
            cur.expect(":")?;
            NatSet::powers(cur.nat()?).map_err(|e| at(start, e))?
        }
        "progression" => {
            cur.expect(":")?;
            let a = cur.nat()?;
            cur.expect(",")?;
            let step = cur.nat()?;
            NatSet::progression(a, step).map_err(|e| at(start, e))?
        }
        "intervals" => {
            cur.expect(":")?;
            let mut ranges = vec![parse_interval(cur)?];
            loop {
                let save = cur.pos();
                if cur.eat(",") && cur.eat("[") {
                    cur.reset(save);
                    cur.expect(",")?;
                    ranges.push(parse_interval(cur)?);
                } else {
                    cur.reset(save);
                    break;
                }
            }
            NatSet::intervals(ranges).map_err(|e| at(start, e))?
        }
        "finite" => {
            cur.expect(":")?;
            NatSet::finite(parse_list(cur)?)
        }
        "complement" => {
            cur.expect(":")?;
            NatSet::complement_of(parse_list(cur)?)
        }
        "union" | "inter" => {
            cur.expect("(")?;
            let a = parse_inner(cur, depth + 1)?;
            cur.expect(",")?;
            let b = parse_inner(cur, depth + 1)?;
            cur.expect(")")?;
            if word == "union" {
                NatSet::union(a, b)
            } else {
                NatSet::intersection(a, b)
            }
        }
        "pred" => {
            cur.expect("(")?;
            let bound = cur.nat()?;
            cur.expect(")")?;
            cur.expect(":")?;
            let expr = parse_expr(cur, depth + 1)?;
            NatSet::predicate(expr, bound).map_err(|e| at(start, e))?
        }
        "file" => {
            cur.expect(":")?;
            let path = cur.take_until(&[',', ')']).trim();
            if path.is_empty() {
                return Err(cur.error("expected a file path").into());
            }
            load_set_file(Path::new(path))?
        }
        other => return Err(ParseError::new(start, format!("unknown set `{other}`")).into()),
    };
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn named_families() {
        assert_eq!(parse_set("evens").unwrap(), NatSet::evens());
        assert_eq!(parse_set(" squares ").unwrap(), NatSet::squares());
        assert_eq!(parse_set("multiples:3").unwrap(), NatSet::multiples(3).unwrap());
        assert_eq!(parse_set("powers:2").unwrap(), NatSet::powers(2).unwrap());
        assert_eq!(parse_set("intervals:[0,8),[64,128)").unwrap().prefix_count(128).unwrap(), 72);
    }

    #[test]
    fn nested_combinators_with_intervals_and_predicates() {
        let s = parse_set("union(intervals:[0,3),[10,12), pred(100): eq(x % 7, 0, 1, 0))").unwrap();
        assert_eq!(s.elements_below(22).unwrap(), vec![0, 1, 2, 7, 10, 11, 14, 21]);
        let t = parse_set("inter(evens, complement:{0,2})").unwrap();
        assert_eq!(t.elements_below(9).unwrap(), vec![4, 6, 8]);
    }

    #[test]
    fn display_round_trips() {
        for src in [
            "empty",
            "all",
            "evens",
            "squares",
            "multiples:5",
            "powers:3",
            "progression:1,4",
            "intervals:[0,8),[64,128)",
            "finite:{1,4,9}",
            "complement:{}",
            "union(squares,inter(evens,powers:2))",
            "pred(50):x1 % 3",
        ] {
            let s = parse_set(src).unwrap();
            assert_eq!(parse_set(&s.to_string()).unwrap(), s, "{src}");
        }
    }

    #[test]
    fn errors_report_positions() {
        let e = parse_set("union(evens, bogus)").unwrap_err();
        assert!(matches!(e, SetError::Parse(ParseError { pos: 13, .. })), "{e:?}");
        let e = parse_set("multiples:0").unwrap_err();
        assert!(matches!(e, SetError::Parse(ParseError { pos: 0, .. })), "{e:?}");
        assert!(parse_set("evens extra").is_err());
        assert!(parse_set("intervals:[5,1)").is_err());
        assert!(parse_set("pred(10):x2").is_err());
        assert!(parse_set("").is_err());
    }

    #[test]
    fn file_sets() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "1\n4\n\n9").unwrap();
        let spec = format!("file:{}", f.path().display());
        assert_eq!(parse_set(&spec).unwrap().elements_below(100).unwrap(), vec![1, 4, 9]);

        assert!(parse_set_file("3\n2\n").unwrap_err().contains("line 2"));
        assert!(parse_set_file("1\nx\n").is_err());
        assert!(parse_set("file:/definitely/not/here").is_err());
    }
}
