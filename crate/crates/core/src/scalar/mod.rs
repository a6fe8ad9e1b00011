//! Exact rational functions in named parameters.
//!
//! A [`Scalar`] is a quotient of two polynomials over ℚ kept in lowest terms
//! with a monic denominator, so structural equality is mathematical equality.

mod binding;
pub mod gcd;
mod parse;
mod relations;
pub mod poly;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

pub use binding::{FloatBinding, ParamBinding};
pub use parse::{parse_expr, parse_poly};
pub use relations::Relations;
pub use poly::{Monomial, Poly, Var};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid parameter name '{0}'")]
    InvalidName(String),
    #[error("parameter '{0}' is not bound")]
    Unbound(String),
    #[error("denominator {0} vanishes under the binding")]
    VanishingDenominator(String),
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    num: Poly,
    den: Poly,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        Scalar::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_rational(c: BigRational) -> Self {
        Scalar {
            num: Poly::constant(c),
            den: Poly::one(),
        }
    }

    pub fn from_poly(p: Poly) -> Self {
        Scalar {
            num: p,
            den: Poly::one(),
        }
    }

    /// The parameter `name` as a scalar.
    pub fn param(name: &str) -> Result<Self, ScalarError> {
        Ok(Scalar::from_poly(Poly::var(Var::new(name)?)))
    }

    /// Builds `num / den` in canonical form.
    pub fn new(num: Poly, den: Poly) -> Result<Self, ScalarError> {
        if den.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Scalar::reduce(num, den))
    }

    fn reduce(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return Scalar::zero();
        }
        if let Some(c) = den.as_constant() {
            let inv = c.recip();
            return Scalar {
                num: num.scale(&inv),
                den: Poly::one(),
            };
        }
        let g = gcd::gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (
                num.div_exact(&g).expect("gcd divides numerator"),
                den.div_exact(&g).expect("gcd divides denominator"),
            )
        };
        Scalar::normalize_lc(num, den)
    }

    fn normalize_lc(num: Poly, den: Poly) -> Self {
        let lc = den.leading_coeff();
        if lc.is_one() {
            Scalar { num, den }
        } else {
            let inv = lc.recip();
            Scalar {
                num: num.scale(&inv),
                den: den.scale(&inv),
            }
        }
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num.is_one()
    }

    /// The exact value when no parameters occur.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_rational().is_some()
    }

    pub fn params(&self) -> BTreeSet<Var> {
        self.num.vars().into_iter().chain(self.den.vars()).collect()
    }

    pub fn checked_div(&self, rhs: &Scalar) -> Result<Scalar, ScalarError> {
        Ok(self * &rhs.inv()?)
    }

    pub fn inv(&self) -> Result<Scalar, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Scalar::normalize_lc(self.den.clone(), self.num.clone()))
    }

    pub fn pow(&self, exp: u32) -> Scalar {
        if exp == 0 {
            return Scalar::one();
        }
        // powers of coprime polynomials stay coprime
        Scalar {
            num: self.num.pow(exp),
            den: self.den.pow(exp),
        }
    }

    pub fn pow_int(&self, exp: i32) -> Result<Scalar, ScalarError> {
        if exp >= 0 {
            Ok(self.pow(exp as u32))
        } else {
            Ok(self.inv()?.pow(exp.unsigned_abs()))
        }
    }

    pub fn scale(&self, c: &BigRational) -> Scalar {
        if c.is_zero() {
            return Scalar::zero();
        }
        Scalar {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    /// Exact substitution of the bound parameters; unbound ones stay symbolic.
    pub fn substitute(&self, binding: &ParamBinding) -> Result<Scalar, ScalarError> {
        let values = binding.values();
        let den = self.den.substitute(values);
        if den.is_zero() {
            return Err(ScalarError::VanishingDenominator(self.den.to_string()));
        }
        Ok(Scalar::reduce(self.num.substitute(values), den))
    }

    /// Numeric value; every parameter must be bound.
    pub fn eval_f64(&self, binding: &FloatBinding) -> Result<f64, ScalarError> {
        let values = binding.values();
        let n = self
            .num
            .eval_f64(values)
            .map_err(|v| ScalarError::Unbound(v.to_string()))?;
        let d = self
            .den
            .eval_f64(values)
            .map_err(|v| ScalarError::Unbound(v.to_string()))?;
        if d == 0.0 {
            return Err(ScalarError::VanishingDenominator(self.den.to_string()));
        }
        Ok(n / d)
    }

    pub fn to_f64(&self) -> Option<f64> {
        self.as_rational().and_then(|c| c.to_f64())
    }

    /// Reduces modulo the side relation `var^2 = square`, rationalizing the
    /// denominator so that the result is linear in `var` with a `var`-free
    /// denominator.
    pub fn reduce_square(&self, var: Var, square: &BigRational) -> Result<Scalar, ScalarError> {
        let num = reduce_poly_square(&self.num, var, square);
        let den = reduce_poly_square(&self.den, var, square);
        let coeffs = den.coefficients_in(var);
        if coeffs.len() < 2 {
            return Scalar::new(num, den);
        }
        // (a + b v)(a - b v) = a^2 - square b^2
        let conj = coeffs[0].sub(&coeffs[1].mul(&Poly::var(var)));
        let new_den = coeffs[0]
            .mul(&coeffs[0])
            .sub(&coeffs[1].mul(&coeffs[1]).scale(square));
        let new_num = reduce_poly_square(&num.mul(&conj), var, square);
        if new_den.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Scalar::new(new_num, new_den)
    }

    fn write_poly(f: &mut fmt::Formatter<'_>, p: &Poly, paren: bool) -> fmt::Result {
        if paren {
            write!(f, "({p})")
        } else {
            write!(f, "{p}")
        }
    }
}

fn reduce_poly_square(p: &Poly, var: Var, square: &BigRational) -> Poly {
    if p.degree_in(var) < 2 {
        return p.clone();
    }
    let mut out = Poly::zero();
    for (k, c) in p.coefficients_in(var).iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let k = k as u32;
        let factor = poly::pow_rational(square, k / 2);
        let mut term = c.scale(&factor);
        if k % 2 == 1 {
            term = term.mul(&Poly::var(var));
        }
        out = out.add(&term);
    }
    out
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl From<BigRational> for Scalar {
    fn from(c: BigRational) -> Self {
        Scalar::from_rational(c)
    }
}

impl std::str::FromStr for Scalar {
    type Err = ScalarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_expr(s)
    }
}

impl Add for &Scalar {
    type Output = Scalar;

    fn add(self, rhs: &Scalar) -> Scalar {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return Scalar::from_poly(self.num.add(&rhs.num));
        }
        if self.den == rhs.den {
            return Scalar::reduce(self.num.add(&rhs.num), self.den.clone());
        }
        let g = gcd::gcd(&self.den, &rhs.den);
        let (a, b) = if g.is_one() {
            (self.den.clone(), rhs.den.clone())
        } else {
            (
                self.den.div_exact(&g).unwrap(),
                rhs.den.div_exact(&g).unwrap(),
            )
        };
        let num = self.num.mul(&b).add(&rhs.num.mul(&a));
        let den = self.den.mul(&b);
        if num.is_zero() {
            return Scalar::zero();
        }
        if g.is_one() {
            // no factor of either denominator can divide the sum
            return Scalar::normalize_lc(num, den);
        }
        Scalar::reduce(num, den)
    }
}

impl Sub for &Scalar {
    type Output = Scalar;

    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl Mul for &Scalar {
    type Output = Scalar;

    fn mul(self, rhs: &Scalar) -> Scalar {
        if self.is_zero() || rhs.is_zero() {
            return Scalar::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return Scalar::from_poly(self.num.mul(&rhs.num));
        }
        // cross-cancel so the product of canonical operands is canonical
        let g1 = gcd::gcd(&self.num, &rhs.den);
        let g2 = gcd::gcd(&rhs.num, &self.den);
        let cut = |p: &Poly, g: &Poly| {
            if g.is_one() {
                p.clone()
            } else {
                p.div_exact(g).unwrap()
            }
        };
        let num = cut(&self.num, &g1).mul(&cut(&rhs.num, &g2));
        let den = cut(&self.den, &g2).mul(&cut(&rhs.den, &g1));
        Scalar::normalize_lc(num, den)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;

    fn neg(self) -> Scalar {
        Scalar {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;

    fn neg(self) -> Scalar {
        -&self
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                self.$m(&rhs)
            }
        }
    )*};
}

forward_owned!(Add add, Sub sub, Mul mul);

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |acc, x| &acc + &x)
    }
}

fn is_bare_power(p: &Poly) -> bool {
    match p.terms() {
        [(m, c)] => c.is_one() && m.factors().len() == 1,
        _ => false,
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        Scalar::write_poly(f, &self.num, self.num.len() > 1)?;
        f.write_str("/")?;
        Scalar::write_poly(f, &self.den, !is_bare_power(&self.den))
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({self})")
    }
}

/// Collects the distinct parameter names of several scalars.
pub fn params_of<'a>(items: impl IntoIterator<Item = &'a Scalar>) -> BTreeSet<Var> {
    let mut out = BTreeSet::new();
    for s in items {
        out.extend(s.params());
    }
    out
}

/// Substitutes polynomials for parameters.
pub fn compose(s: &Scalar, values: &BTreeMap<Var, Poly>) -> Result<Scalar, ScalarError> {
    Scalar::new(s.num.compose(values), s.den.compose(values))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(text: &str) -> Scalar {
        parse_expr(text).unwrap()
    }

    #[test]
    fn zero_is_zero_over_one() {
        let z = s("0");
        assert!(z.is_zero());
        assert!(z.denom().is_one());
        assert_eq!(z, s("x-x"));
    }

    #[test]
    fn parses_rational_function() {
        let v = s("(psi11^2+1)/psi12");
        assert_eq!(v.numer(), &parse_poly("psi11^2+1").unwrap());
        assert_eq!(v.denom(), &parse_poly("psi12").unwrap());
    }

    #[test]
    fn cancels_common_factor() {
        assert_eq!(s("(x^2-1)/(x-1)"), s("x+1"));
        assert!(s("(x^2-1)/(x-1)").denom().is_one());
    }

    #[test]
    fn field_examples() {
        assert_eq!(&s("1/2") + &s("1/3"), s("5/6"));
        assert_eq!(&s("x/y") * &s("y/x"), Scalar::one());
        let lhs = &s("(3*lambda-1)/(lambda-1)") * &s("psi12");
        assert_eq!(lhs, s("(3*lambda*psi12-psi12)/(lambda-1)"));
        assert_eq!(lhs.numer(), &parse_poly("3*lambda*psi12-psi12").unwrap());
    }

    #[test]
    fn division_by_zero() {
        assert_eq!(s("x").checked_div(&s("0")), Err(ScalarError::DivisionByZero));
        assert_eq!(Scalar::zero().inv(), Err(ScalarError::DivisionByZero));
    }

    #[test]
    fn substitution() {
        let r = s("-(3*lambda-1)*psi12/(lambda-1)");
        let b = ParamBinding::parse_pairs(&["lambda=2", "psi12=1"]).unwrap();
        assert_eq!(r.substitute(&b).unwrap(), s("-5"));
        assert_eq!(s("x").substitute(&ParamBinding::default()).unwrap(), s("x"));
        let bad = ParamBinding::parse_pairs(&["psi12=0"]).unwrap();
        assert!(matches!(
            s("1/psi12").substitute(&bad),
            Err(ScalarError::VanishingDenominator(_))
        ));
    }

    #[test]
    fn is_zero_examples() {
        assert!((&s("(x+1)*(x-1)") - &s("x^2-1")).is_zero());
        assert!(!s("psi12").is_zero());
    }

    #[test]
    fn denominator_is_monic() {
        let v = s("x/(2*y+4)");
        assert_eq!(v.denom(), &parse_poly("y+2").unwrap());
        assert_eq!(v.numer(), &parse_poly("1/2*x").unwrap());
        let w = s("1/(-y)");
        assert_eq!(w, s("-1/y"));
    }

    #[test]
    fn display_reparses() {
        for text in [
            "(psi11^2+1)/psi12",
            "-2/3*x/(y*z)",
            "x/(y^2+1)",
            "(x-y)/(x^2*y)",
            "-1/psi12^2",
            "7",
            "-5/6",
        ] {
            let v = s(text);
            assert_eq!(s(&v.to_string()), v, "{text} -> {v}");
        }
    }

    #[test]
    fn square_root_relation() {
        let r = Var::new("s").unwrap();
        let two = BigRational::from_integer(2.into());
        let v = s("s^2 - 2").reduce_square(r, &two).unwrap();
        assert!(v.is_zero());
        let w = s("1/(1+s)").reduce_square(r, &two).unwrap();
        assert_eq!(w, s("s-1"));
        let u = s("(s^3+s)/(s^2+1)").reduce_square(r, &two).unwrap();
        assert_eq!(u, s("s"));
    }
}
