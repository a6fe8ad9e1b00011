//! Recursive-descent parser for scalar expressions.
//!
//! ```text
//! expr     := term (('+'|'-') term)*
//! term     := factor (('*'|'/') factor)*
//! factor   := ('-')? atom ('^' uint)?
//! atom     := rational | ident | '(' expr ')'
//! rational := int ('/' uint)?
//! ```
//!
//! A leading minus binds looser than `^`, so `-x^2` is `-(x^2)`. Because
//! `int/uint` is a single literal, `x/2/3` reads as `x/(2/3)`.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::poly::{Poly, Var};
use super::{Scalar, ScalarError};

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser {
            src: text.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn error(&self, msg: impl Into<String>) -> ScalarError {
        ScalarError::Syntax {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn expr(&mut self) -> Result<Scalar, ScalarError> {
        let mut acc = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if c == b'+' { &acc + &rhs } else { &acc - &rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Scalar, ScalarError> {
        let mut acc = self.factor()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let at = self.pos;
            let rhs = self.factor()?;
            acc = if c == b'*' {
                &acc * &rhs
            } else {
                acc.checked_div(&rhs).map_err(|_| ScalarError::Syntax {
                    pos: at,
                    msg: "division by zero".into(),
                })?
            };
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Scalar, ScalarError> {
        let negate = if self.peek() == Some(b'-') {
            self.pos += 1;
            true
        } else {
            false
        };
        let mut base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let exp = self.uint()?;
            let exp: u32 = exp
                .try_into()
                .map_err(|_| self.error("exponent out of range"))?;
            base = base.pow(exp);
        }
        Ok(if negate { -base } else { base })
    }

    fn atom(&mut self) -> Result<Scalar, ScalarError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let num = self.uint()?;
                // `int / uint` directly is a rational literal
                let save = self.pos;
                if self.peek() == Some(b'/') {
                    self.pos += 1;
                    self.skip_ws();
                    if matches!(self.src.get(self.pos), Some(d) if d.is_ascii_digit()) {
                        let at = self.pos;
                        let den = self.uint()?;
                        if den == BigInt::from(0) {
                            return Err(ScalarError::Syntax {
                                pos: at,
                                msg: "division by zero".into(),
                            });
                        }
                        return Ok(Scalar::from_rational(BigRational::new(num, den)));
                    }
                    self.pos = save;
                }
                Ok(Scalar::from_rational(BigRational::from_integer(num)))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let var = Var::new(name).map_err(|_| ScalarError::Syntax {
                    pos: start,
                    msg: format!("invalid parameter name '{name}'"),
                })?;
                Ok(Scalar::from_poly(Poly::var(var)))
            }
            Some(c) => Err(self.error(format!("unexpected character '{}'", c as char))),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn uint(&mut self) -> Result<BigInt, ScalarError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an integer"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(digits.parse().unwrap())
    }
}

pub fn parse_expr(text: &str) -> Result<Scalar, ScalarError> {
    let mut p = Parser::new(text);
    let value = p.expr()?;
    if p.peek().is_some() {
        return Err(p.error("trailing input"));
    }
    Ok(value)
}

/// Parses an expression that must reduce to a polynomial.
pub fn parse_poly(text: &str) -> Result<Poly, ScalarError> {
    let s = parse_expr(text)?;
    if !s.denom().is_one() {
        return Err(ScalarError::Syntax {
            pos: 0,
            msg: "expected a polynomial".into(),
        });
    }
    Ok(s.numer().clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reports_positions() {
        match parse_expr("x + * y") {
            Err(ScalarError::Syntax { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_expr("(x"), Err(ScalarError::Syntax { .. })));
        assert!(matches!(parse_expr("x y"), Err(ScalarError::Syntax { .. })));
        assert!(matches!(parse_expr(""), Err(ScalarError::Syntax { .. })));
    }

    #[test]
    fn zero_divisor_rejected() {
        assert!(parse_expr("1/0").is_err());
        assert!(parse_expr("x/(y-y)").is_err());
    }

    #[test]
    fn minus_binds_below_power() {
        assert_eq!(parse_expr("-x^2").unwrap(), parse_expr("0-x*x").unwrap());
        assert_eq!(parse_expr("2*-x").unwrap(), parse_expr("-2*x").unwrap());
    }

    #[test]
    fn rational_literals() {
        assert_eq!(parse_expr("6/4").unwrap().to_string(), "3/2");
        assert_eq!(parse_expr("1/2^2").unwrap().to_string(), "1/4");
        // `2/3` after a division sign is still one literal
        assert_eq!(parse_expr("x/2/3").unwrap().to_string(), "3/2*x");
    }
}
