//! Cross-checks against independent computations written from the
//! definitions: cohomology by dense elimination over Q, Jacobi on random
//! elements, and graded maps checked bracket by bracket.

mod common;

use narrowlie::automorphism::GradedMap;
use narrowlie::catalog::{self, LoopForm};
use narrowlie::cohomology;
use narrowlie::iso::{self, IsoVerdict, SearchConfig};
use narrowlie::structure;
use narrowlie::{Field, GradedLieAlgebra, Scalar};
use num_rational::BigRational;
use num_traits::Zero;

/// Rank by fraction-exact Gaussian elimination.
fn rank(mut rows: Vec<Vec<BigRational>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = &rows[i][c] / &rows[r][c];
                let pivot = rows[r].clone();
                for (x, p) in rows[i].iter_mut().zip(&pivot).skip(c) {
                    *x -= &f * p;
                }
            }
        }
        r += 1;
    }
    r
}

/// Structure constant `[e_p, e_q]` in direction `r`, over Q.
fn bracket(g: &GradedLieAlgebra, p: usize, q: usize, r: usize) -> BigRational {
    g.bracket_basis(p, q)
        .iter()
        .find(|(t, _)| *t == r)
        .map_or_else(BigRational::zero, |(_, c)| c.re().clone())
}

/// `dim H²_(k)` from the cochain complex `C¹_k -> C²_k -> C³_k`.
fn h2_oracle(g: &GradedLieAlgebra, k: usize) -> usize {
    let n = g.dim();
    let deg = |i: usize| g.grading_of(i);
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .filter(|&(a, b)| deg(a) + deg(b) == k)
        .collect();
    let triples: Vec<(usize, usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).flat_map(move |b| (b + 1..n).map(move |c| (a, b, c))))
        .filter(|&(a, b, c)| deg(a) + deg(b) + deg(c) == k)
        .collect();
    // value of the pair cochain `e^(a,b)` on (x, y), skew
    let pair_val = |(a, b): (usize, usize), x: usize, y: usize| -> i64 {
        if (x, y) == (a, b) {
            1
        } else if (y, x) == (a, b) {
            -1
        } else {
            0
        }
    };
    // d c (x,y,z) = -c([x,y],z) + c([x,z],y) - c([y,z],x), column per pair
    let d2: Vec<Vec<BigRational>> = triples
        .iter()
        .map(|&(x, y, z)| {
            pairs
                .iter()
                .map(|&pr| {
                    let mut s = BigRational::zero();
                    for w in 0..n {
                        let term = |u: usize, v: usize, other: usize, sign: i64| {
                            let c = bracket(g, u, v, w);
                            if c.is_zero() {
                                BigRational::zero()
                            } else {
                                c * BigRational::from_integer((sign * pair_val(pr, w, other)).into())
                            }
                        };
                        s += term(x, y, z, -1) + term(x, z, y, 1) + term(y, z, x, -1);
                    }
                    s
                })
                .collect()
        })
        .collect();
    let z2 = pairs.len() - if triples.is_empty() { 0 } else { rank(d2) };
    // B² is spanned by f∘[.,.] for f in the dual of g_k
    let b2_rows: Vec<Vec<BigRational>> = (0..n)
        .filter(|&w| deg(w) == k)
        .map(|w| pairs.iter().map(|&(a, b)| bracket(g, a, b, w)).collect())
        .collect();
    let b2 = if pairs.is_empty() { 0 } else { rank(b2_rows) };
    z2 - b2
}

#[test]
fn h2_dims_match_oracle_on_catalog() {
    for g in common::catalog_bases(6, Field::Q) {
        for k in 2..=g.length() + 2 {
            let s = cohomology::h2_slice(&g, k).unwrap();
            assert_eq!(s.dim_h2(), h2_oracle(&g, k), "{} at grading {k}", g.display_name());
        }
    }
}

#[test]
fn h2_dims_match_oracle_on_dead_ends() {
    for g in [
        catalog::m1(3, Field::Q).unwrap(),
        catalog::m03(4, &[3], Field::Q).unwrap(),
        catalog::wplus(6, Field::Q).unwrap(),
        catalog::m2(6, Field::Q).unwrap(),
    ] {
        for k in 2..=g.length() + 1 {
            let s = cohomology::h2_slice(&g, k).unwrap();
            assert_eq!(s.dim_h2(), h2_oracle(&g, k), "{} at grading {k}", g.display_name());
        }
    }
}

fn element(g: &GradedLieAlgebra, seed: i64) -> Vec<Scalar> {
    (0..g.dim()).map(|i| Scalar::from_int((seed * 7 + i as i64 * 13) % 5 - 2)).collect()
}

fn add(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

#[test]
fn jacobi_on_random_elements() {
    for g in common::catalog_bases(7, Field::Q) {
        assert!(structure::jacobi_check(&g).is_ok());
        for seed in 0..4 {
            let (x, y, z) = (element(&g, seed), element(&g, seed + 11), element(&g, seed + 23));
            let s = add(
                &add(&g.bracket_vec(&x, &g.bracket_vec(&y, &z)), &g.bracket_vec(&y, &g.bracket_vec(&z, &x))),
                &g.bracket_vec(&z, &g.bracket_vec(&x, &y)),
            );
            assert!(s.iter().all(Scalar::is_zero), "{}", g.display_name());
        }
    }
}

/// Checks `f[x,y] = [fx,fy]` on random elements rather than basis pairs.
fn preserves_brackets(f: &GradedMap, g: &GradedLieAlgebra, h: &GradedLieAlgebra) -> bool {
    (0..5).all(|seed| {
        let (x, y) = (element(g, seed), element(g, seed + 3));
        f.apply(&g.bracket_vec(&x, &y)) == h.bracket_vec(&f.apply(&x), &f.apply(&y))
    })
}

#[test]
fn iso_witnesses_preserve_brackets() {
    let cfg = SearchConfig::default();
    let pairs = [
        (catalog::n1_table(7, Field::Q).unwrap(), catalog::n1_loop(LoopForm::Minus, 7, Field::Q).unwrap()),
        (catalog::m0s(5, &[5], Field::Q).unwrap(), catalog::n2(5, Field::Q).unwrap()),
        (catalog::m0s(3, &[3], Field::Q).unwrap(), catalog::n1_table(3, Field::Q).unwrap()),
        (
            catalog::n1_loop(LoopForm::Plus, 6, Field::Qi).unwrap(),
            catalog::n1_loop(LoopForm::Minus, 6, Field::Qi).unwrap(),
        ),
    ];
    for (g, h) in &pairs {
        match iso::iso_search(g, h, cfg).unwrap() {
            IsoVerdict::VerifiedIso(f) => {
                assert!(f.is_invertible());
                assert!(preserves_brackets(&f, g, h), "{} -> {}", g.display_name(), h.display_name());
            }
            v => panic!("{} vs {}: {}", g.display_name(), h.display_name(), v.kind()),
        }
    }
}

#[test]
fn homothety_preserves_brackets() {
    for g in common::catalog_bases(5, Field::Q) {
        let f = GradedMap::homothety(&g, &Scalar::from_int(-2));
        assert!(preserves_brackets(&f, &g, &g), "{}", g.display_name());
    }
}
