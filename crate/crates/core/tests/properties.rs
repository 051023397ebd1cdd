mod common;

use narrowlie::automorphism::{self, GradedMap};
use narrowlie::catalog::{self, LoopForm};
use narrowlie::extension;
use narrowlie::iso::{self, ExtensionVerdict, SearchConfig};
use narrowlie::linalg::Matrix;
use narrowlie::structure;
use narrowlie::{Field, GradedLieAlgebra, Scalar};
use proptest::prelude::*;

fn bases() -> &'static [GradedLieAlgebra] {
    use std::sync::OnceLock;
    static BASES: OnceLock<Vec<GradedLieAlgebra>> = OnceLock::new();
    BASES.get_or_init(|| common::catalog_bases(6, Field::Q))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn carnot_criterion_agrees(b in 0..35usize, m in 1usize..=2, coefs in prop::collection::vec(-2i64..=2, 12)) {
        let g = &bases()[b % bases().len()];
        if let Some(spec) = common::top_spec(g, m, &coefs) {
            prop_assert!(common::criterion_agrees(g, &spec));
        }
    }

    #[test]
    fn carnot_extensions_quotient_back(b in 0..35usize, coefs in prop::collection::vec(-2i64..=2, 12)) {
        let g = &bases()[b % bases().len()];
        if let Some(spec) = common::top_spec(g, 1, &coefs) {
            if extension::is_carnot_extension(g, &spec).unwrap() {
                let r = extension::central_extend(g, &spec).unwrap();
                let q = structure::quotient_by_tail(&r.algebra, g.length()).unwrap();
                prop_assert!(structure::is_carnot(&q).carnot);
                prop_assert_eq!(q.dims(), g.dims());
            }
        }
    }

    #[test]
    fn homothety_acts_by_alpha_power(b in 0..35usize, a in prop::sample::select(vec![-3i64, -2, 2, 3, 5])) {
        let g = &bases()[b % bases().len()];
        let alpha = Scalar::from_int(a);
        let h = GradedMap::homothety(g, &alpha);
        for k in 2..=g.length() + 1 {
            let m = automorphism::induced_h2_action(g, &h, k).unwrap();
            let scale = Scalar::from_int(a.pow(k as u32));
            let want: Vec<Vec<Scalar>> = (0..m.rows())
                .map(|r| (0..m.rows()).map(|c| if r == c { scale.clone() } else { Scalar::zero() }).collect())
                .collect();
            prop_assert_eq!(m.row_vecs(), want);
        }
    }

    #[test]
    fn json_round_trip(b in 0..35usize) {
        let g = &bases()[b % bases().len()];
        let back = GradedLieAlgebra::from_json(&g.to_json()).unwrap();
        prop_assert_eq!(back.to_json(), g.to_json());
    }

    #[test]
    fn torus_images_are_isomorphic(len in 3usize..=7, s in 1i64..=4, t in 1i64..=4) {
        // g and its image under diag(s, t) on the table algebra
        let g = catalog::n1_table(len, Field::Q).unwrap();
        let a = Matrix::from_ints(&[&[s, 0], &[0, t]]);
        let f = automorphism::propagate(&g, &a).unwrap().unwrap();
        prop_assert!(f.is_isomorphism(&g, &g));
    }
}

#[test]
fn quotients_of_catalog_algebras_are_carnot() {
    for g in bases() {
        for k in 1..g.length() {
            let q = structure::quotient_by_tail(g, k).unwrap();
            let st = structure::is_carnot(&q);
            assert!(st.carnot && st.length == k, "{} at {k}", g.display_name());
        }
    }
}

#[test]
fn loop_forms_merge_over_gaussian_field() {
    let plus = catalog::n1_loop(LoopForm::Plus, 6, Field::Q).unwrap();
    let minus = catalog::n1_loop(LoopForm::Minus, 6, Field::Q).unwrap();
    let cfg = SearchConfig::default();
    match iso::iso_over_extension(&plus, &minus, &Scalar::from_int(-1), cfg).unwrap() {
        ExtensionVerdict::Iso(m) => assert_eq!(m.d, Scalar::from_int(-1)),
        v => panic!("{v:?}"),
    }
    // a real quadratic field keeps the discriminant signs apart
    match iso::iso_over_extension(&plus, &minus, &Scalar::from_int(2), cfg).unwrap() {
        ExtensionVerdict::NonIso(_) => {}
        v => panic!("{v:?}"),
    }
}

#[test]
fn extension_search_rejects_squares() {
    let g = catalog::m0(4, Field::Q).unwrap();
    assert!(iso::iso_over_extension(&g, &g, &Scalar::from_int(4), SearchConfig::default()).is_err());
}
