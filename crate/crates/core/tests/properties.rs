//! Randomized invariants over scalars, algebras and compatibility equations.

use std::sync::OnceLock;

use nilkaehler::catalog::{Catalog, Expect};
use nilkaehler::liealg::LieAlgebra;
use nilkaehler::scalar::{parse_expr, parse_poly, Poly};
use nilkaehler::solver::compat_nullspace;
use nilkaehler::tensors::{almost_complex_residual, compat_residual, is_integrable, Endomorphism, TwoForm};
use nilkaehler::{ParamBinding, Scalar};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn catalog() -> &'static Catalog {
    static CAT: OnceLock<Catalog> = OnceLock::new();
    CAT.get_or_init(|| Catalog::embedded().unwrap())
}

fn poly() -> impl Strategy<Value = Poly> {
    prop::collection::vec((-4i64..=4, 0u32..3, 0u32..3), 1..4).prop_map(|terms| {
        let text: Vec<String> = terms.iter().map(|(c, a, b)| format!("({c})*x^{a}*y^{b}")).collect();
        parse_poly(&text.join("+")).unwrap()
    })
}

fn nonzero_poly() -> impl Strategy<Value = Poly> {
    poly().prop_filter("nonzero", |p| !p.is_zero())
}

fn scalar() -> impl Strategy<Value = Scalar> {
    (poly(), nonzero_poly()).prop_map(|(n, d)| Scalar::new(n, d).unwrap())
}

fn rational() -> impl Strategy<Value = BigRational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)))
}

fn small_int_vector(n: usize) -> impl Strategy<Value = Vec<Scalar>> {
    prop::collection::vec((-3i64..=3).prop_map(Scalar::from_int), n)
}

fn small_int_endomorphism(n: usize) -> impl Strategy<Value = Endomorphism> {
    prop::collection::vec(small_int_vector(n), n).prop_map(|rows| Endomorphism::from_rows(rows).unwrap())
}

fn algebra() -> impl Strategy<Value = &'static LieAlgebra> {
    let algs: Vec<&'static LieAlgebra> = catalog().entries().map(|e| &e.algebra).collect();
    prop::sample::select(algs)
}

fn form() -> impl Strategy<Value = &'static TwoForm> {
    let forms: Vec<&'static TwoForm> = catalog().entries().flat_map(|e| e.forms.iter().map(|f| &f.form)).collect();
    prop::sample::select(forms)
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn addition_is_associative_and_commutative(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a + &b, &b + &a);
    }

    #[test]
    fn multiplication_distributes(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
    }

    #[test]
    fn inverses(a in scalar()) {
        prop_assert!((&a + &(-&a)).is_zero());
        if !a.is_zero() {
            prop_assert!((&a * &a.inv().unwrap()).is_one());
        }
    }

    #[test]
    fn canonical_form_is_unique(n in poly(), d in nonzero_poly(), k in nonzero_poly()) {
        let plain = Scalar::new(n.clone(), d.clone()).unwrap();
        let scaled = Scalar::new(n.mul(&k), d.mul(&k)).unwrap();
        prop_assert_eq!(plain, scaled);
    }

    #[test]
    fn printing_round_trips(a in scalar()) {
        prop_assert_eq!(parse_expr(&a.to_string()).unwrap(), a);
    }

    #[test]
    fn substitution_is_a_homomorphism(a in scalar(), b in scalar(), x in rational(), y in rational()) {
        let mut bind = ParamBinding::new();
        bind.set("x", x).unwrap();
        bind.set("y", y).unwrap();
        // bindings on a pole are simply skipped
        if let (Ok(sa), Ok(sb)) = (a.substitute(&bind), b.substitute(&bind)) {
            prop_assert_eq!((&a + &b).substitute(&bind).unwrap(), &sa + &sb);
            prop_assert_eq!((&a * &b).substitute(&bind).unwrap(), &sa * &sb);
        }
    }

    #[test]
    fn bracket_is_antisymmetric_and_bilinear(
        alg in algebra(),
        x in small_int_vector(6),
        y in small_int_vector(6),
        z in small_int_vector(6),
        c in -3i64..=3,
    ) {
        let xy = alg.bracket(&x, &y).unwrap();
        let yx = alg.bracket(&y, &x).unwrap();
        prop_assert!(xy.iter().zip(&yx).all(|(a, b)| (a + b).is_zero()));
        let c = Scalar::from_int(c);
        let cx_z: Vec<Scalar> = x.iter().zip(&z).map(|(a, b)| &(&c * a) + b).collect();
        let lhs = alg.bracket(&cx_z, &y).unwrap();
        let zy = alg.bracket(&z, &y).unwrap();
        for k in 0..6 {
            prop_assert_eq!(&lhs[k], &(&(&c * &xy[k]) + &zy[k]));
        }
    }

    #[test]
    fn jacobi_on_random_vectors(
        alg in algebra(),
        x in small_int_vector(6),
        y in small_int_vector(6),
        z in small_int_vector(6),
    ) {
        let br = |a: &[Scalar], b: &[Scalar]| alg.bracket(a, b).unwrap();
        let t1 = br(&x, &br(&y, &z));
        let t2 = br(&y, &br(&z, &x));
        let t3 = br(&z, &br(&x, &y));
        prop_assert!((0..6).all(|k| (&(&t1[k] + &t2[k]) + &t3[k]).is_zero()));
    }

    #[test]
    fn ascending_series_terms_are_ideals(alg in algebra(), x in small_int_vector(6), pick in small_int_vector(6)) {
        for term in alg.ascending_series() {
            let basis = term.basis();
            let mut z = vec![Scalar::zero(); 6];
            for (b, c) in basis.iter().zip(&pick) {
                for k in 0..6 {
                    z[k] = &z[k] + &(c * &b[k]);
                }
            }
            prop_assert!(term.contains(&alg.bracket(&x, &z).unwrap()));
        }
    }

    #[test]
    fn compat_residual_is_linear(
        w in form(),
        j1 in small_int_endomorphism(6),
        j2 in small_int_endomorphism(6),
        a in -3i64..=3,
        b in -3i64..=3,
    ) {
        let (a, b) = (Scalar::from_int(a), Scalar::from_int(b));
        let lhs = compat_residual(w, &j1.lin_comb(&a, &j2, &b));
        let r1 = compat_residual(w, &j1);
        let r2 = compat_residual(w, &j2);
        let rhs = r1.scale(&a).add(&r2.scale(&b)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn nullspace_dimension_ignores_basis_order(w in form(), perm in permutation(6)) {
        prop_assert_eq!(compat_nullspace(w).dimension(), compat_nullspace(&w.permuted(&perm)).dimension());
    }

    #[test]
    fn compatibility_is_relabeling_equivariant(idx in 0usize..64, perm in permutation(6)) {
        let pairs: Vec<_> = catalog()
            .entries()
            .flat_map(|e| e.structures.iter().filter(|s| s.expect == Expect::Pass).map(move |s| (e, s)))
            .collect();
        let (e, st) = pairs[idx % pairs.len()];
        let w = &e.form(&st.form).unwrap().form;
        let moved = compat_residual(&w.permuted(&perm), &st.j.permuted(&perm));
        prop_assert!(moved.try_map(|s| st.relations.reduce(s)).unwrap().is_zero());
    }

    /// Stored families stay complex, compatible and integrable at every
    /// admissible rational point.
    #[test]
    fn families_hold_at_rational_points(idx in 0usize..64, values in prop::collection::vec(rational(), 8)) {
        let pairs: Vec<_> = catalog()
            .entries()
            .flat_map(|e| {
                e.structures
                    .iter()
                    .filter(|s| s.expect == Expect::Pass && s.relations.is_empty())
                    .map(move |s| (e, s))
            })
            .collect();
        let (e, st) = pairs[idx % pairs.len()];
        let mut bind = ParamBinding::new();
        for (name, v) in st.j.params().iter().zip(&values) {
            bind.set(name, v.clone()).unwrap();
        }
        let w = &e.form(&st.form).unwrap().form;
        let wm = w.matrix().substitute(&bind);
        let j = st.j.substitute(&bind);
        prop_assume!(st.excluded_by(&bind).is_empty() && wm.is_ok() && j.is_ok());
        let w = TwoForm::from_matrix(wm.unwrap()).unwrap();
        let j = j.unwrap();
        prop_assert!(almost_complex_residual(&j).is_zero());
        prop_assert!(compat_residual(&w, &j).is_zero());
        prop_assert!(is_integrable(&e.algebra, &j));
    }
}
