//! Structural predicates: Jacobi identity, lower central series, the
//! Carnot condition, truncation and the associated graded algebra.

use crate::algebra::{AlgebraBuilder, BasisRef, GradedLieAlgebra};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, Subspace};
use crate::scalar::Scalar;

/// A basis triple whose Jacobi sum does not vanish.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JacobiViolation {
    pub triple: (BasisRef, BasisRef, BasisRef),
    /// `[x,[y,z]] + [y,[z,x]] + [z,[x,y]]` over the global basis.
    pub residual: Vec<Scalar>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct JacobiReport {
    pub violations: Vec<JacobiViolation>,
    pub triples_checked: usize,
}

impl JacobiReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

fn bracket_sparse_into(g: &GradedLieAlgebra, p: usize, v: &[(usize, Scalar)], coef: &Scalar, out: &mut [Scalar]) {
    for (q, c) in v {
        let f = coef * c;
        for (r, d) in g.bracket_basis(p, *q) {
            out[*r] += &(&f * d);
        }
    }
}

/// Exhaustive Jacobi check over basis triples `x < y < z` whose total
/// grading does not exceed the length.
pub fn jacobi_check(g: &GradedLieAlgebra) -> JacobiReport {
    let n = g.dim();
    let len = g.length();
    let one = Scalar::one();
    let mut report = JacobiReport::default();
    for x in 0..n {
        let gx = g.grading_of(x);
        for y in x + 1..n {
            let gy = g.grading_of(y);
            if gx + gy >= len {
                break;
            }
            for z in y + 1..n {
                let gz = g.grading_of(z);
                if gx + gy + gz > len {
                    break;
                }
                report.triples_checked += 1;
                let mut res = vec![Scalar::zero(); n];
                bracket_sparse_into(g, x, g.bracket_basis(y, z), &one, &mut res);
                bracket_sparse_into(g, y, g.bracket_basis(z, x), &one, &mut res);
                bracket_sparse_into(g, z, g.bracket_basis(x, y), &one, &mut res);
                if res.iter().any(|c| !c.is_zero()) {
                    report.violations.push(JacobiViolation {
                        triple: (g.basis_ref(x), g.basis_ref(y), g.basis_ref(z)),
                        residual: res,
                    });
                }
            }
        }
    }
    report
}

/// Lower central series `g¹ ⊇ g² ⊇ …` as subspaces of the total space,
/// ending with the first repeated term (the zero space for nilpotent input).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LcsFiltration {
    pub terms: Vec<Subspace>,
}

impl LcsFiltration {
    pub fn dims(&self) -> Vec<usize> {
        self.terms.iter().map(Subspace::dim).collect()
    }

    pub fn is_nilpotent(&self) -> bool {
        self.terms.last().is_some_and(|t| t.dim() == 0)
    }
}

/// Span of `[x, y]` for `x` in the whole algebra and `y` in `sub`.
pub fn bracket_with_all(g: &GradedLieAlgebra, sub: &Subspace) -> Subspace {
    let n = g.dim();
    let mut vecs = Vec::new();
    for y in sub.basis_vectors() {
        for p in 0..n {
            let mut e = vec![Scalar::zero(); n];
            e[p] = Scalar::one();
            let v = g.bracket_vec(&e, &y);
            if v.iter().any(|c| !c.is_zero()) {
                vecs.push(v);
            }
        }
    }
    Subspace::span(n, vecs).expect("bracket vectors have ambient length")
}

/// `{ x : [x, s] = 0 for all s ∈ sub }`.
pub fn centralizer(g: &GradedLieAlgebra, sub: &Subspace) -> Subspace {
    let n = g.dim();
    let mut rows = Vec::new();
    for s in sub.basis_vectors() {
        // column p holds [e_p, s]
        let cols: Vec<Vec<Scalar>> = (0..n)
            .map(|p| {
                let mut e = vec![Scalar::zero(); n];
                e[p] = Scalar::one();
                g.bracket_vec(&e, &s)
            })
            .collect();
        for r in 0..n {
            let row: Vec<Scalar> = cols.iter().map(|c| c[r].clone()).collect();
            if row.iter().any(|c| !c.is_zero()) {
                rows.push(row);
            }
        }
    }
    if rows.is_empty() {
        return Subspace::full(n);
    }
    linalg::kernel_basis(&Matrix::from_rows(rows, n).unwrap())
}

pub fn center(g: &GradedLieAlgebra) -> Subspace {
    centralizer(g, &Subspace::full(g.dim()))
}

pub fn lcs(g: &GradedLieAlgebra) -> LcsFiltration {
    let mut terms = vec![Subspace::full(g.dim())];
    loop {
        let next = bracket_with_all(g, terms.last().unwrap());
        let stop = next.dim() == 0 || next.dim() == terms.last().unwrap().dim();
        terms.push(next);
        if stop {
            break;
        }
    }
    LcsFiltration { terms }
}

/// Outcome of [`is_carnot`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CarnotStatus {
    pub carnot: bool,
    /// Index of the last nonzero component.
    pub length: usize,
}

/// Rank of `[g_1, g_i]` inside component `i + 1`.
pub fn bracket_rank(g: &GradedLieAlgebra, i: usize) -> usize {
    let target = g.range(i + 1);
    if target.is_empty() {
        return 0;
    }
    let mut rows = Vec::new();
    for x in g.range(1) {
        for y in g.range(i) {
            let mut row = vec![Scalar::zero(); target.len()];
            for (r, c) in g.bracket_basis(x, y) {
                row[r - target.start] = c.clone();
            }
            rows.push(row);
        }
    }
    if rows.is_empty() {
        return 0;
    }
    Matrix::from_rows(rows, target.len()).unwrap().rank()
}

/// `[g_1, g_i] = g_{i+1}` for every `i < length` (the top bracket vanishes
/// by grading).
pub fn is_carnot(g: &GradedLieAlgebra) -> CarnotStatus {
    let len = g.length();
    let mut carnot = len > 0 && g.component_dim(1) > 0;
    for i in 1..len {
        if !carnot {
            break;
        }
        carnot = bracket_rank(g, i) == g.component_dim(i + 1);
    }
    CarnotStatus { carnot, length: len }
}

/// The truncation `g / g^{k+1}` of a Carnot algebra: components `1..=k`.
pub fn quotient_by_tail(g: &GradedLieAlgebra, k: usize) -> Result<GradedLieAlgebra> {
    let st = is_carnot(g);
    if !st.carnot {
        return Err(Error::NotCarnot(g.display_name().to_string()));
    }
    if k == 0 || k > st.length {
        return Err(Error::Grading(format!("truncation index {k} outside 1..={}", st.length)));
    }
    truncate(g, k)
}

/// Keeps components `1..=k` and the brackets that stay inside them.
pub fn truncate(g: &GradedLieAlgebra, k: usize) -> Result<GradedLieAlgebra> {
    let mut b = AlgebraBuilder::new(g.field());
    b.name = g.name().map(|n| format!("{n}/tail>{k}"));
    b.provenance = g.provenance().map(str::to_string);
    for i in 1..=k.min(g.length()) {
        b.push_component(g.labels(i).iter().cloned());
    }
    for ((x, y), out) in g.brackets() {
        if x.grading + y.grading <= k {
            b.brackets.insert((*x, *y), out.clone());
        }
    }
    b.build_unchecked()
}

/// Associated graded algebra of the lower central series filtration.
///
/// Each quotient `g^i / g^{i+1}` is represented by the vectors of the RREF
/// basis of `g^i` that extend a basis of `g^{i+1}`, taken in order.
pub fn associated_graded(g: &GradedLieAlgebra) -> Result<GradedLieAlgebra> {
    let f = lcs(g);
    if !f.is_nilpotent() {
        return Err(Error::NotNilpotent(g.display_name().to_string()));
    }
    let n = g.dim();
    let terms = &f.terms;
    let steps = terms.len() - 1;
    // complement representatives per graded piece
    let mut reps: Vec<Vec<Vec<Scalar>>> = Vec::with_capacity(steps);
    for i in 0..steps {
        let mut acc = terms[i + 1].clone();
        let mut chosen = Vec::new();
        for v in terms[i].basis_vectors() {
            let grown = acc.sum(&Subspace::span(n, vec![v.clone()]).unwrap()).unwrap();
            if grown.dim() > acc.dim() {
                acc = grown;
                chosen.push(v);
            }
        }
        reps.push(chosen);
    }
    let mut b = AlgebraBuilder::new(g.field());
    b.name = g.name().map(|s| format!("gr({s})"));
    for (i, piece) in reps.iter().enumerate() {
        let labels: Vec<String> = piece
            .iter()
            .enumerate()
            .map(|(a, v)| {
                let support: Vec<usize> = (0..n).filter(|&k| !v[k].is_zero()).collect();
                if support.len() == 1 && v[support[0]].is_one() {
                    g.label(support[0]).to_string()
                } else {
                    format!("gr{}_{}", i + 1, a)
                }
            })
            .collect();
        b.push_component(labels);
    }
    for i in 0..steps {
        for j in i..steps {
            let t = i + j + 1; // 0-based index of the target piece
            if t >= steps {
                continue;
            }
            // columns: reps of piece t, then a basis of g^{t+2}
            let mut cols = reps[t].clone();
            cols.extend(terms[t + 1].basis_vectors());
            let m = Matrix::from_rows(cols, n).unwrap().transpose();
            for (a, x) in reps[i].iter().enumerate() {
                for (bb, y) in reps[j].iter().enumerate() {
                    if i == j && bb <= a {
                        continue;
                    }
                    let v = g.bracket_vec(x, y);
                    if v.iter().all(Scalar::is_zero) {
                        continue;
                    }
                    let linalg::Solution::Unique(sol) = linalg::solve(&m, &v)? else {
                        return Err(Error::InvalidAlgebra(
                            "bracket leaves the filtration; Jacobi likely fails".into(),
                        ));
                    };
                    let out: Vec<Scalar> = sol[..reps[t].len()].to_vec();
                    if out.iter().any(|c| !c.is_zero()) {
                        b.brackets
                            .insert((BasisRef::new(i + 1, a), BasisRef::new(j + 1, bb)), out);
                    }
                }
            }
        }
    }
    b.build_unchecked()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn lcs_of_m0_and_abelian() {
        let m0 = catalog::m0(4, crate::Field::Q).unwrap();
        assert_eq!(lcs(&m0).dims(), vec![5, 3, 2, 1, 0]);
        let mut b = AlgebraBuilder::new(crate::Field::Q);
        b.push_component(["a", "b", "c"]);
        let ab = b.build().unwrap();
        assert_eq!(lcs(&ab).dims(), vec![3, 0]);
        assert_eq!(associated_graded(&ab).unwrap().dims(), vec![3]);
    }

    #[test]
    fn quotient_errors() {
        let m0 = catalog::m0(4, crate::Field::Q).unwrap();
        assert!(quotient_by_tail(&m0, 0).is_err());
        assert!(quotient_by_tail(&m0, 5).is_err());
        assert_eq!(quotient_by_tail(&m0, 4).unwrap().brackets(), m0.brackets());
        let w = catalog::wplus(5, crate::Field::Q).unwrap();
        assert!(matches!(quotient_by_tail(&w, 2), Err(Error::NotCarnot(_))));
    }
}
