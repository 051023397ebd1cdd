#![allow(dead_code)]

use narrowlie::catalog::{self, LoopForm};
use narrowlie::cohomology::{self, Cochain2};
use narrowlie::extension::{self, ExtensionSpec};
use narrowlie::{Field, GradedLieAlgebra, Scalar};

/// Carnot catalog algebras of lengths 2 to `max_len`.
pub fn catalog_bases(max_len: usize, field: Field) -> Vec<GradedLieAlgebra> {
    let mut out = Vec::new();
    for len in 2..=max_len {
        out.push(catalog::m0(len, field).unwrap());
        out.push(catalog::n1_table(len, field).unwrap());
        out.push(catalog::n1_loop(LoopForm::Plus, len, field).unwrap());
        out.push(catalog::n1_loop(LoopForm::Minus, len, field).unwrap());
        out.push(catalog::n2(len, field).unwrap());
        if len >= 3 {
            out.push(catalog::n2_3(len, field).unwrap());
            out.push(catalog::m0s(len, &[3], field).unwrap());
        }
        if len >= 5 {
            out.push(catalog::m0s(len, &[3, 5], field).unwrap());
        }
    }
    out
}

/// Linear combination of cocycles with integer coefficients.
pub fn combine(basis: &[Cochain2], coefs: &[i64], grading: usize) -> Cochain2 {
    let mut c = Cochain2::zero(grading);
    for (b, &k) in basis.iter().zip(coefs) {
        for ((x, y), v) in &b.terms {
            let cur = c.get(*x, *y);
            c.set(*x, *y, &cur + &(v * &Scalar::from_int(k))).unwrap();
        }
    }
    c
}

/// A top-grading extension spec of `g` with `m` cocycles drawn from
/// `Z²_(L+1)` by the coefficient stream `coefs`.
pub fn top_spec(g: &GradedLieAlgebra, m: usize, coefs: &[i64]) -> Option<ExtensionSpec> {
    let k = g.length() + 1;
    let z = cohomology::z2_basis(g, k).unwrap();
    if z.is_empty() {
        return None;
    }
    let cocycles = (0..m)
        .map(|i| {
            let c: Vec<i64> = (0..z.len()).map(|j| coefs[(i * z.len() + j) % coefs.len()]).collect();
            combine(&z, &c, k)
        })
        .collect();
    Some(ExtensionSpec::new(k, cocycles))
}

/// Both sides of the Carnot extension criterion agree.
pub fn criterion_agrees(g: &GradedLieAlgebra, spec: &ExtensionSpec) -> bool {
    extension::is_carnot_extension(g, spec).unwrap() == extension::lemma_criterion(g, spec).unwrap()
}
