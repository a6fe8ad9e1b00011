use num_rational::BigRational;

use super::{parse_expr, Scalar, ScalarError, Var};

/// Side relations `v^2 = c` imposed on some parameters, used to encode a
/// quadratic irrationality such as the square root of two.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Relations(Vec<(Var, BigRational)>);

impl Relations {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn square(name: &str, value: BigRational) -> Result<Self, ScalarError> {
        Ok(Relations(vec![(Var::new(name)?, value)]))
    }

    /// Parses `s^2=2`.
    pub fn parse(text: &str) -> Result<Self, ScalarError> {
        let bad = || ScalarError::Syntax {
            pos: 0,
            msg: format!("expected 'name^2=value', got '{text}'"),
        };
        let (lhs, rhs) = text.split_once('=').ok_or_else(bad)?;
        let name = lhs.trim().strip_suffix("^2").ok_or_else(bad)?.trim();
        let value = parse_expr(rhs.trim())?.as_rational().ok_or_else(bad)?;
        Self::square(name, value)
    }

    pub fn extend(&mut self, other: Relations) {
        for r in other.0 {
            if !self.0.iter().any(|(v, _)| *v == r.0) {
                self.0.push(r);
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.0.iter().map(|(v, _)| *v)
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Var, BigRational)> {
        self.0.iter()
    }

    pub fn reduce(&self, s: &Scalar) -> Result<Scalar, ScalarError> {
        let mut out = s.clone();
        for (v, c) in &self.0 {
            if out.params().contains(v) {
                out = out.reduce_square(*v, c)?;
            }
        }
        Ok(out)
    }

    /// Whether `s` vanishes modulo the relations.
    pub fn is_zero(&self, s: &Scalar) -> bool {
        s.is_zero() || matches!(self.reduce(s), Ok(r) if r.is_zero())
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.0
            .iter()
            .map(|(v, c)| format!("{}^2={}", v.as_str(), c))
            .collect()
    }
}
