//! Text grammar for polynomials.
//!
//! Rational mode: `3/2*x1^2*x2 - x3 + 1`, decimals allowed (`1.25` is exact).
//! Complex mode additionally accepts `(1+2i)*x1`, `3i`, `i`.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Pow, Zero};

use super::{CxPoly, Monomial, MultiPoly, RatPoly};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    Var(usize),
    Number(String),
    Imag(String), // "2i", "1.5i", bare "i" carries "1"
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let bytes: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            ' ' | '\t' | '\n' => i += 1,
            '+' => {
                out.push(Tok::Plus);
                i += 1;
            }
            '-' => {
                out.push(Tok::Minus);
                i += 1;
            }
            '*' => {
                out.push(Tok::Star);
                i += 1;
            }
            '^' => {
                out.push(Tok::Caret);
                i += 1;
            }
            '(' => {
                out.push(Tok::LParen);
                i += 1;
            }
            ')' => {
                out.push(Tok::RParen);
                i += 1;
            }
            'x' => {
                let mut j = i + 1;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                if j == i + 1 {
                    return Err(Error::Parse("variable needs an index, e.g. x1".into()));
                }
                let idx: usize = bytes[i + 1..j]
                    .iter()
                    .collect::<String>()
                    .parse()
                    .map_err(|_| Error::Parse("bad variable index".into()))?;
                if idx == 0 {
                    return Err(Error::Parse("variables are 1-based (x1, x2, ...)".into()));
                }
                out.push(Tok::Var(idx - 1));
                i = j;
            }
            'i' => {
                out.push(Tok::Imag("1".into()));
                i += 1;
            }
            d if d.is_ascii_digit() || d == '.' => {
                let mut j = i;
                while j < bytes.len()
                    && (bytes[j].is_ascii_digit() || bytes[j] == '.' || bytes[j] == '/')
                {
                    j += 1;
                }
                let num: String = bytes[i..j].iter().collect();
                if j < bytes.len() && bytes[j] == 'i' {
                    out.push(Tok::Imag(num));
                    i = j + 1;
                } else {
                    out.push(Tok::Number(num));
                    i = j;
                }
            }
            other => {
                return Err(Error::Parse(format!("unexpected character '{}'", other)));
            }
        }
    }
    Ok(out)
}

/// Parses "3", "3/4", "1.25" as an exact rational.
pub(crate) fn parse_rational_coeff(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let r = parse_unsigned_rational(body)?;
    Ok(if neg { -r } else { r })
}

fn parse_unsigned_rational(s: &str) -> Result<BigRational> {
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad numerator '{}'", n)))?;
        let d: BigInt = d
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad denominator '{}'", d)))?;
        if d.is_zero() {
            return Err(Error::Parse("zero denominator".into()));
        }
        Ok(BigRational::new(n, d))
    } else if let Some((int, frac)) = s.split_once('.') {
        let int = if int.is_empty() { "0" } else { int };
        let i: BigInt = int
            .parse()
            .map_err(|_| Error::Parse(format!("bad number '{}'", s)))?;
        let f: BigInt = if frac.is_empty() {
            BigInt::zero()
        } else {
            frac.parse()
                .map_err(|_| Error::Parse(format!("bad number '{}'", s)))?
        };
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        Ok(BigRational::new(i * &scale + f, scale))
    } else {
        let n: BigInt = s
            .parse()
            .map_err(|_| Error::Parse(format!("bad number '{}'", s)))?;
        Ok(BigRational::from_integer(n))
    }
}

/// Parses "1", "-2.5", "1+2i", "3i", "i", "1-2i" as a complex double.
pub(crate) fn parse_complex_coeff(s: &str) -> Result<Complex64> {
    let p = parse_complex(s, Some(1))?;
    if p.degree().unwrap_or(0) > 0 {
        return Err(Error::Parse(format!("'{}' is not a constant", s)));
    }
    Ok(p.coeff(&Monomial::one(1))
        .copied()
        .unwrap_or(Complex64::new(0.0, 0.0)))
}

trait ParseField: super::Coeff + std::ops::Mul<Output = Self> {
    fn from_number(s: &str) -> Result<Self>;
    fn from_imag(s: &str) -> Result<Self>;
}

impl ParseField for BigRational {
    fn from_number(s: &str) -> Result<Self> {
        parse_unsigned_rational(s)
    }
    fn from_imag(_s: &str) -> Result<Self> {
        Err(Error::Parse(
            "imaginary coefficients are not allowed in rational mode".into(),
        ))
    }
}

impl ParseField for Complex64 {
    fn from_number(s: &str) -> Result<Self> {
        let r = parse_unsigned_rational(s)?;
        Ok(Complex64::new(
            num_traits::ToPrimitive::to_f64(&r).unwrap_or(f64::NAN),
            0.0,
        ))
    }
    fn from_imag(s: &str) -> Result<Self> {
        let r = parse_unsigned_rational(s)?;
        Ok(Complex64::new(
            0.0,
            num_traits::ToPrimitive::to_f64(&r).unwrap_or(f64::NAN),
        ))
    }
}

struct Parser<'a, C: ParseField> {
    toks: &'a [Tok],
    pos: usize,
    nvars: usize,
    _marker: std::marker::PhantomData<C>,
}

impl<'a, C: ParseField> Parser<'a, C> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    // expr := ['+'|'-'] term (('+'|'-') term)*
    fn expr(&mut self) -> Result<MultiPoly<C>> {
        let mut neg = false;
        match self.peek() {
            Some(Tok::Minus) => {
                neg = true;
                self.pos += 1;
            }
            Some(Tok::Plus) => {
                self.pos += 1;
            }
            _ => {}
        }
        let mut acc = self.term()?;
        if neg {
            acc = -&acc;
        }
        while let Some(t) = self.peek() {
            match t {
                Tok::Plus => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    acc = &acc + &rhs;
                }
                Tok::Minus => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    acc = &acc - &rhs;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    // term := factor (['*'] factor)*
    fn term(&mut self) -> Result<MultiPoly<C>> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    let f = self.factor()?;
                    acc = &acc * &f;
                }
                // implicit product, e.g. "2x1" or "x1x2"
                Some(Tok::Var(_)) | Some(Tok::LParen) => {
                    let f = self.factor()?;
                    acc = &acc * &f;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    // factor := atom ('^' uint)?
    fn factor(&mut self) -> Result<MultiPoly<C>> {
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            self.pos += 1;
            match self.next() {
                Some(Tok::Number(n)) => {
                    let e: u32 = n
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad exponent '{}'", n)))?;
                    Ok(base.pow(e))
                }
                _ => Err(Error::Parse("expected integer exponent after '^'".into())),
            }
        } else {
            Ok(base)
        }
    }

    // atom := number | imag | var | '(' expr ')'
    fn atom(&mut self) -> Result<MultiPoly<C>> {
        match self.next() {
            Some(Tok::Number(n)) => Ok(MultiPoly::constant(self.nvars, C::from_number(&n)?)),
            Some(Tok::Imag(n)) => Ok(MultiPoly::constant(self.nvars, C::from_imag(&n)?)),
            Some(Tok::Var(j)) => {
                if j >= self.nvars {
                    return Err(Error::Parse(format!(
                        "variable x{} exceeds {} variables",
                        j + 1,
                        self.nvars
                    )));
                }
                Ok(MultiPoly::var(self.nvars, j))
            }
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                match self.next() {
                    Some(Tok::RParen) => Ok(inner),
                    _ => Err(Error::Parse("unbalanced parenthesis".into())),
                }
            }
            other => Err(Error::Parse(format!("unexpected token {:?}", other))),
        }
    }
}

fn parse_with<C: ParseField>(s: &str, nvars: Option<usize>) -> Result<MultiPoly<C>> {
    let toks = tokenize(s)?;
    let nvars = match nvars {
        Some(n) => n,
        None => toks
            .iter()
            .filter_map(|t| match t {
                Tok::Var(j) => Some(j + 1),
                _ => None,
            })
            .max()
            .unwrap_or(1),
    };
    let mut p = Parser::<C> {
        toks: &toks,
        pos: 0,
        nvars,
        _marker: std::marker::PhantomData,
    };
    let poly = p.expr()?;
    if p.pos != toks.len() {
        return Err(Error::Parse("trailing input".into()));
    }
    Ok(poly)
}

/// Parses a polynomial with exact rational coefficients. When `nvars` is
/// `None` the variable count is the highest index that appears.
pub fn parse_rational(s: &str, nvars: Option<usize>) -> Result<RatPoly> {
    parse_with::<BigRational>(s, nvars)
}

/// Parses a polynomial with complex floating coefficients.
pub fn parse_complex(s: &str, nvars: Option<usize>) -> Result<CxPoly> {
    parse_with::<Complex64>(s, nvars)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::FromPrimitive;

    #[test]
    fn parses_rational_expression() {
        let p = parse_rational("3/2*x1^2*x2 - x3 + 1", Some(3)).unwrap();
        assert_eq!(p.num_terms(), 3);
        let c = p.coeff(&Monomial::new(vec![2, 1, 0])).unwrap();
        assert_eq!(*c, BigRational::new(BigInt::from(3), BigInt::from(2)));
        let one = p.coeff(&Monomial::one(3)).unwrap();
        assert_eq!(*one, BigRational::from_i64(1).unwrap());
    }

    #[test]
    fn parses_decimals_exactly() {
        let p = parse_rational("0.125*x1", Some(1)).unwrap();
        let c = p.coeff(&Monomial::new(vec![1])).unwrap();
        assert_eq!(*c, BigRational::new(BigInt::from(1), BigInt::from(8)));
    }

    #[test]
    fn parses_complex_expression() {
        let p = parse_complex("(1+2i)*x1", Some(2)).unwrap();
        let c = p.coeff(&Monomial::new(vec![1, 0])).unwrap();
        assert!((c - Complex64::new(1.0, 2.0)).norm() < 1e-15);
    }

    #[test]
    fn rejects_imaginary_in_rational_mode() {
        assert!(parse_rational("2i*x1", Some(1)).is_err());
    }

    #[test]
    fn infers_variable_count() {
        let p = parse_rational("x4 + x2", None).unwrap();
        assert_eq!(p.nvars(), 4);
    }

    #[test]
    fn rejects_malformed() {
        assert!(parse_rational("x0", Some(1)).is_err());
        assert!(parse_rational("3//2", Some(1)).is_err());
        assert!(parse_rational("(x1", Some(1)).is_err());
        assert!(parse_rational("x1 &", Some(1)).is_err());
    }

    #[test]
    fn negative_leading_term() {
        let p = parse_rational("-x1^2 + 2", Some(1)).unwrap();
        assert_eq!(
            *p.coeff(&Monomial::new(vec![2])).unwrap(),
            BigRational::from_i64(-1).unwrap()
        );
    }
}
