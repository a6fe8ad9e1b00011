//! Multivariate polynomial gcd over the rationals.
//!
//! Recursive primitive PRS: a polynomial is viewed as univariate in its most
//! significant shared variable with coefficients in the remaining ones, the
//! contents are split off recursively and the primitive parts run through a
//! pseudo-remainder sequence. Results are monic.

use super::poly::{Monomial, Poly, Var};
use num_rational::BigRational;
use num_traits::One;

pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    if a.len() == 1 {
        return monomial_gcd(&a.leading().unwrap().0, b);
    }
    if b.len() == 1 {
        return monomial_gcd(&b.leading().unwrap().0, a);
    }
    // common monomial factors are pulled out first; they are cheap to find
    let ma = a.monomial_content();
    let mb = b.monomial_content();
    if !ma.is_one() || !mb.is_one() {
        let one = BigRational::one();
        let a1 = a.div_exact(&Poly::term(ma.clone(), one.clone())).unwrap();
        let b1 = b.div_exact(&Poly::term(mb.clone(), one.clone())).unwrap();
        let g = gcd(&a1, &b1);
        return g.mul_monomial(&ma.gcd(&mb), &one);
    }
    if a == b {
        return a.monic();
    }
    if a.total_degree() >= b.total_degree() {
        if a.div_exact(b).is_some() {
            return b.monic();
        }
    } else if b.div_exact(a).is_some() {
        return a.monic();
    }

    let va = a.vars();
    let vb = b.vars();
    // a variable present in only one argument can be eliminated through content
    if let Some(&v) = va.iter().find(|v| !vb.contains(v)) {
        return gcd(&content_in(a, v), b);
    }
    if let Some(&v) = vb.iter().find(|v| !va.contains(v)) {
        return gcd(a, &content_in(b, v));
    }
    let v = va[0];
    let ca = content_in(a, v);
    let cb = content_in(b, v);
    let content = gcd(&ca, &cb);
    let pa = a.div_exact(&ca).expect("content divides");
    let pb = b.div_exact(&cb).expect("content divides");
    let g = primitive_prs(pa, pb, v);
    g.mul(&content).monic()
}

fn monomial_gcd(m: &Monomial, p: &Poly) -> Poly {
    Poly::term(m.gcd(&p.monomial_content()), BigRational::one())
}

/// Gcd of the coefficients of `p` viewed as a polynomial in `v`.
/// Product of the distinct irreducible factors of `p`, up to a constant.
pub fn square_free(p: &Poly) -> Poly {
    // gcd of p and all its partials is the product of f^(k-1) over the
    // factors f^k of p
    let mut g = p.clone();
    for v in p.vars() {
        g = gcd(&g, &p.derivative(v));
    }
    if g.is_constant() {
        return p.clone();
    }
    p.div_exact(&g).expect("gcd divides")
}

pub fn content_in(p: &Poly, v: Var) -> Poly {
    let coeffs = p.coefficients_in(v);
    let mut acc = Poly::zero();
    for c in coeffs.iter().rev() {
        if c.is_zero() {
            continue;
        }
        acc = gcd(&acc, c);
        if acc.is_one() {
            break;
        }
    }
    acc
}

fn primitive_part_in(p: &Poly, v: Var) -> Poly {
    let c = content_in(p, v);
    if c.is_one() {
        p.monic()
    } else {
        p.div_exact(&c).expect("content divides").monic()
    }
}

/// Pseudo-remainder of `a` by `b` as polynomials in `v`.
fn pseudo_rem(a: &Poly, b: &Poly, v: Var) -> Poly {
    let db = b.degree_in(v);
    let lcb = b.leading_coeff_in(v);
    let one = BigRational::one();
    let mut r = a.clone();
    while !r.is_zero() && r.degree_in(v) >= db {
        let dr = r.degree_in(v);
        let lcr = r.leading_coeff_in(v);
        let shift = Poly::term(Monomial::var(v, dr - db), one.clone());
        r = r.mul(&lcb).sub(&lcr.mul(&shift).mul(b));
        // keep coefficient sizes in check between steps
        r = r.integer_primitive();
    }
    r
}

fn primitive_prs(a: Poly, b: Poly, v: Var) -> Poly {
    let (mut r0, mut r1) = if a.degree_in(v) >= b.degree_in(v) {
        (a, b)
    } else {
        (b, a)
    };
    loop {
        if r1.degree_in(v) == 0 {
            // r1 is primitive in v and free of v, so it is a unit here
            return Poly::one();
        }
        let r = pseudo_rem(&r0, &r1, v);
        if r.is_zero() {
            return primitive_part_in(&r1, v);
        }
        r0 = r1;
        r1 = primitive_part_in(&r, v);
    }
}
