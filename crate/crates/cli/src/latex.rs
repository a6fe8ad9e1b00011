//! LaTeX rendering of exact scalars and matrices.

use nilkaehler::linalg::Matrix;
use nilkaehler::scalar::{Monomial, Poly, Scalar};
use num_rational::BigRational;
use num_traits::{One, Signed};

const GREEK: &[&str] = &[
    "alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta", "theta", "iota", "kappa", "lambda", "mu", "nu",
    "xi", "pi", "rho", "sigma", "tau", "upsilon", "phi", "chi", "psi", "omega",
];

/// `psi12` becomes `\psi_{12}`, `lambda` becomes `\lambda`, `a` stays `a`.
pub fn var(name: &str) -> String {
    let split = name.find(|c: char| c.is_ascii_digit()).unwrap_or(name.len());
    let (stem, digits) = name.split_at(split);
    let stem = if GREEK.contains(&stem) { format!("\\{stem}") } else { stem.to_string() };
    if digits.is_empty() {
        stem
    } else {
        format!("{stem}_{{{digits}}}")
    }
}

fn monomial(m: &Monomial) -> String {
    m.factors()
        .iter()
        .map(|(v, e)| match e {
            1 => var(v.as_str()),
            e if *e < 10 => format!("{}^{e}", var(v.as_str())),
            e => format!("{}^{{{e}}}", var(v.as_str())),
        })
        .collect()
}

fn rational(c: &BigRational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("\\frac{{{}}}{{{}}}", c.numer(), c.denom())
    }
}

pub fn poly(p: &Poly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, (m, c)) in p.terms().iter().enumerate() {
        if c.is_negative() {
            out.push('-');
        } else if k > 0 {
            out.push('+');
        }
        let abs = c.abs();
        if m.is_one() {
            out += &rational(&abs);
        } else if abs.is_one() {
            out += &monomial(m);
        } else {
            out += &rational(&abs);
            out += &monomial(m);
        }
    }
    out
}

/// Fractions are written with integer coefficients and the sign in front.
pub fn scalar(s: &Scalar) -> String {
    let (num, den) = (s.numer(), s.denom());
    if den.is_one() {
        return poly(num);
    }
    let (p, q) = (num.integer_primitive(), den.integer_primitive());
    let k = (num.leading_coeff() / p.leading_coeff()) / (den.leading_coeff() / q.leading_coeff());
    let sign = if k.is_negative() { "-" } else { "" };
    let p = p.scale(&BigRational::from_integer(k.numer().abs()));
    let q = q.scale(&BigRational::from_integer(k.denom().clone()));
    format!("{sign}\\frac{{{}}}{{{}}}", poly(&p), poly(&q))
}

pub fn pmatrix(m: &Matrix) -> String {
    let rows: Vec<String> = (0..m.rows())
        .map(|i| m.row(i).iter().map(scalar).collect::<Vec<_>>().join(" & "))
        .collect();
    format!("\\begin{{pmatrix}}\n{}\n\\end{{pmatrix}}", rows.join(" \\\\\n"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nilkaehler::scalar::parse_expr;

    fn tex(s: &str) -> String {
        scalar(&parse_expr(s).unwrap())
    }

    #[test]
    fn names() {
        assert_eq!(var("psi12"), "\\psi_{12}");
        assert_eq!(var("lambda"), "\\lambda");
        assert_eq!(var("a"), "a");
    }

    #[test]
    fn fractions() {
        assert_eq!(tex("-(psi11^2+1)/psi12"), "-\\frac{\\psi_{11}^2+1}{\\psi_{12}}");
        assert_eq!(tex("-psi11"), "-\\psi_{11}");
        assert_eq!(tex("1/2"), "\\frac{1}{2}");
        assert_eq!(tex("3*lambda/2 - 1"), "\\frac{3}{2}\\lambda-1");
        assert_eq!(tex("0"), "0");
        assert_eq!(tex("-(psi11^4/2 + 1/2)/(psi11*psi12^2)"), "-\\frac{\\psi_{11}^4+1}{2\\psi_{11}\\psi_{12}^2}");
    }
}
