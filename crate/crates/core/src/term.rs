//! Terms over finitary function symbols.

use std::fmt;

use crate::func::{compose, FinFun, FunError};

#[derive(Debug, Clone)]
pub enum Term {
    /// `x_index` out of `arity` variables, 1-based.
    Proj { arity: usize, index: usize },
    App { symbol: FinFun, args: Vec<Term> },
}

impl Term {
    pub fn var(arity: usize, index: usize) -> Result<Term, FunError> {
        if index == 0 || index > arity {
            return Err(FunError::Invalid(format!("variable x{index} outside 1..={arity}")));
        }
        Ok(Term::Proj { arity, index })
    }

    pub fn app(symbol: &FinFun, args: Vec<Term>) -> Result<Term, FunError> {
        if args.len() != symbol.arity() {
            return Err(FunError::ArityMismatch { expected: symbol.arity(), got: args.len() });
        }
        let m = args[0].arity();
        if let Some(bad) = args.iter().find(|t| t.arity() != m) {
            return Err(FunError::ArityMismatch { expected: m, got: bad.arity() });
        }
        Ok(Term::App { symbol: symbol.clone(), args })
    }

    pub fn arity(&self) -> usize {
        match self {
            Term::Proj { arity, .. } => *arity,
            Term::App { args, .. } => args[0].arity(),
        }
    }

    pub fn eval(&self, x: &[u64]) -> Result<u64, FunError> {
        if x.len() != self.arity() {
            return Err(FunError::ArityMismatch { expected: self.arity(), got: x.len() });
        }
        Ok(self.eval_unchecked(x))
    }

    fn eval_unchecked(&self, x: &[u64]) -> u64 {
        match self {
            Term::Proj { index, .. } => x[index - 1],
            Term::App { symbol, args } => {
                let vals: Vec<u64> = args.iter().map(|t| t.eval_unchecked(x)).collect();
                symbol.call(&vals)
            }
        }
    }

    /// The term function as a [`FinFun`].
    pub fn to_fun(&self) -> FinFun {
        match self {
            Term::Proj { arity, index } => FinFun::projection(*arity, *index).expect("checked at construction"),
            Term::App { symbol, args } => {
                let inner: Vec<FinFun> = args.iter().map(Term::to_fun).collect();
                compose(symbol, &inner).expect("checked at construction")
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Proj { index, .. } => write!(f, "x{index}"),
            Term::App { symbol, args } => {
                write!(f, "{}(", symbol.label())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn term_matches_its_function() {
        let add = FinFun::parse("x1 + x2").unwrap();
        let sq = FinFun::parse("x1 * x1").unwrap();
        let t = Term::app(
            &add,
            vec![Term::app(&sq, vec![Term::var(2, 2).unwrap()]).unwrap(), Term::var(2, 1).unwrap()],
        )
        .unwrap();
        let f = t.to_fun();
        for x in 0..6 {
            for y in 0..6 {
                assert_eq!(t.eval(&[x, y]).unwrap(), y * y + x);
                assert_eq!(f.call(&[x, y]), y * y + x);
            }
        }
        assert_eq!(t.to_string(), "expr:x1 + x2(expr:x1 * x1(x2), x1)");
    }

    #[test]
    fn arity_errors() {
        let add = FinFun::parse("x1 + x2").unwrap();
        assert!(Term::app(&add, vec![Term::var(1, 1).unwrap()]).is_err());
        assert!(Term::app(&add, vec![Term::var(1, 1).unwrap(), Term::var(2, 1).unwrap()]).is_err());
        assert!(Term::var(2, 3).is_err());
    }
}
