use std::collections::BTreeMap;

use num_rational::BigRational;

use super::{parse_expr, Scalar, ScalarError, Var};

/// Exact values for a set of parameters.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ParamBinding {
    values: BTreeMap<Var, BigRational>,
}

impl ParamBinding {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, name: &str, value: BigRational) -> Result<(), ScalarError> {
        self.values.insert(Var::new(name)?, value);
        Ok(())
    }

    pub fn with(mut self, name: &str, value: i64) -> Result<Self, ScalarError> {
        self.set(name, BigRational::from_integer(value.into()))?;
        Ok(self)
    }

    pub fn get(&self, name: &str) -> Option<&BigRational> {
        Var::new(name).ok().and_then(|v| self.values.get(&v))
    }

    pub fn values(&self) -> &BTreeMap<Var, BigRational> {
        &self.values
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn covers(&self, s: &Scalar) -> bool {
        s.params().iter().all(|v| self.values.contains_key(v))
    }

    /// Parses `name=value` pairs where each value is a rational literal such
    /// as `-2/3`.
    pub fn parse_pairs<S: AsRef<str>>(pairs: &[S]) -> Result<Self, ScalarError> {
        let mut out = ParamBinding::new();
        for pair in pairs {
            let pair = pair.as_ref();
            let (name, value) = pair.split_once('=').ok_or_else(|| ScalarError::Syntax {
                pos: 0,
                msg: format!("expected name=value, got '{pair}'"),
            })?;
            let value = parse_expr(value.trim())?;
            let value = value.as_rational().ok_or_else(|| ScalarError::Syntax {
                pos: name.len() + 1,
                msg: format!("value for '{}' must be a rational number", name.trim()),
            })?;
            out.set(name.trim(), value)?;
        }
        Ok(out)
    }

    pub fn to_float(&self) -> FloatBinding {
        FloatBinding {
            values: self
                .values
                .iter()
                .map(|(k, v)| (*k, num_traits::ToPrimitive::to_f64(v).unwrap_or(f64::NAN)))
                .collect(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &BigRational)> {
        self.values.iter().map(|(k, v)| (k.as_str(), v))
    }
}

/// Floating-point values for a set of parameters.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FloatBinding {
    values: BTreeMap<Var, f64>,
}

impl FloatBinding {
    pub fn set(&mut self, name: &str, value: f64) -> Result<(), ScalarError> {
        self.values.insert(Var::new(name)?, value);
        Ok(())
    }

    pub fn values(&self) -> &BTreeMap<Var, f64> {
        &self.values
    }
}
