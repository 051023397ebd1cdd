//! Graded second cohomology with trivial one-dimensional coefficients.
//!
//! A cochain of grading `k` is a skew form supported on pairs of basis
//! vectors whose gradings add up to `k`. Its coordinates are indexed by the
//! pairs `(x, y)`, `x < y`, in lexicographic order of the global basis,
//! which is also the `(grading, index)` order.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::algebra::{BasisRef, GradedLieAlgebra};
use crate::error::{Error, Result};
use crate::linalg::{kernel_basis, Matrix, Subspace};
use crate::scalar::{Field, Scalar};

/// A homogeneous skew-symmetric bilinear form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cochain2 {
    pub grading: usize,
    /// Values `c(x, y)` for `x < y`; missing pairs are zero.
    pub terms: BTreeMap<(BasisRef, BasisRef), Scalar>,
}

impl Cochain2 {
    pub fn zero(grading: usize) -> Self {
        Cochain2 {
            grading,
            terms: BTreeMap::new(),
        }
    }

    /// Sets `c(x, y)` (and implicitly `c(y, x) = -c(x, y)`).
    pub fn set(&mut self, x: BasisRef, y: BasisRef, value: Scalar) -> Result<()> {
        if x.grading + y.grading != self.grading {
            return Err(Error::Grading(format!(
                "pair of gradings {}+{} in a cochain of grading {}",
                x.grading, y.grading, self.grading
            )));
        }
        if x == y {
            return if value.is_zero() {
                Ok(())
            } else {
                Err(Error::InvalidCocycle("nonzero diagonal value".into()))
            };
        }
        let (key, v) = if x < y { ((x, y), value) } else { ((y, x), -value) };
        if v.is_zero() {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, v);
        }
        Ok(())
    }

    pub fn get(&self, x: BasisRef, y: BasisRef) -> Scalar {
        if x < y {
            self.terms.get(&(x, y)).cloned().unwrap_or_default()
        } else if y < x {
            -self.terms.get(&(y, x)).cloned().unwrap_or_default()
        } else {
            Scalar::zero()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.values().all(Scalar::is_zero)
    }

    /// `c(x, y)` for coefficient vectors over the global basis.
    pub fn eval(&self, g: &GradedLieAlgebra, x: &[Scalar], y: &[Scalar]) -> Scalar {
        let mut acc = Scalar::zero();
        for ((a, b), v) in &self.terms {
            let (p, q) = (g.global(*a), g.global(*b));
            let t = &(&x[p] * &y[q]) - &(&x[q] * &y[p]);
            if !t.is_zero() {
                acc += &(&t * v);
            }
        }
        acc
    }

    pub fn to_json_value(&self, field: Field) -> CochainJson {
        CochainJson {
            grading: self.grading,
            terms: self
                .terms
                .iter()
                .map(|((x, y), c)| TermJson {
                    a: x.index,
                    b: y.index,
                    coef: c.to_field_string(field),
                    i: x.grading,
                    j: y.grading,
                })
                .collect(),
        }
    }

    pub fn from_json_value(raw: &CochainJson) -> Result<Cochain2> {
        let mut c = Cochain2::zero(raw.grading);
        for t in &raw.terms {
            let x = BasisRef::new(t.i, t.a);
            let y = BasisRef::new(t.j, t.b);
            if x >= y {
                return Err(Error::Parse("cochain term key not strictly increasing".into()));
            }
            c.set(x, y, t.coef.parse()?)?;
        }
        Ok(c)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CochainJson {
    pub grading: usize,
    pub terms: Vec<TermJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub a: usize,
    pub b: usize,
    pub coef: String,
    pub i: usize,
    pub j: usize,
}

/// Coordinate system on grading-`k` cochains of a fixed algebra.
#[derive(Debug, Clone)]
pub struct CochainSpace {
    pub grading: usize,
    /// Global index pairs `(p, q)`, `p < q`, in lexicographic order.
    pub pairs: Vec<(usize, usize)>,
    index: BTreeMap<(usize, usize), usize>,
}

impl CochainSpace {
    pub fn new(g: &GradedLieAlgebra, k: usize) -> Self {
        let n = g.dim();
        let mut pairs = Vec::new();
        for p in 0..n {
            let gp = g.grading_of(p);
            if 2 * gp > k {
                break;
            }
            for q in p + 1..n {
                if gp + g.grading_of(q) == k {
                    pairs.push((p, q));
                }
            }
        }
        let index = pairs.iter().enumerate().map(|(k, &pq)| (pq, k)).collect();
        CochainSpace {
            grading: k,
            pairs,
            index,
        }
    }

    pub fn dim(&self) -> usize {
        self.pairs.len()
    }

    /// Coordinate of `c(p, q)` with its sign, or `None` when the pair is
    /// outside the space (wrong grading or diagonal).
    pub fn coord(&self, p: usize, q: usize) -> Option<(usize, bool)> {
        if p < q {
            self.index.get(&(p, q)).map(|&k| (k, false))
        } else {
            self.index.get(&(q, p)).map(|&k| (k, true))
        }
    }

    pub fn to_cochain(&self, g: &GradedLieAlgebra, v: &[Scalar]) -> Cochain2 {
        let mut c = Cochain2::zero(self.grading);
        for (&(p, q), x) in self.pairs.iter().zip(v) {
            if !x.is_zero() {
                c.terms.insert((g.basis_ref(p), g.basis_ref(q)), x.clone());
            }
        }
        c
    }

    pub fn to_coords(&self, g: &GradedLieAlgebra, c: &Cochain2) -> Result<Vec<Scalar>> {
        if c.grading != self.grading {
            return Err(Error::Grading(format!(
                "cochain of grading {} in the grading-{} space",
                c.grading, self.grading
            )));
        }
        let mut v = vec![Scalar::zero(); self.dim()];
        for ((x, y), val) in &c.terms {
            if x.grading == 0 || y.grading == 0 || x.grading > g.length() || y.grading > g.length()
                || x.index >= g.component_dim(x.grading)
                || y.index >= g.component_dim(y.grading)
            {
                return Err(Error::InvalidCocycle("term references a missing basis vector".into()));
            }
            let (k, _) = self
                .coord(g.global(*x), g.global(*y))
                .ok_or_else(|| Error::Grading("term outside the cochain grading".into()))?;
            v[k] = val.clone();
        }
        Ok(v)
    }

    /// Linear map from cochain coordinates to the cyclic sums
    /// `c([x,y],z) + c([y,z],x) + c([z,x],y)` over basis triples of total grading `k`.
    pub fn cocycle_matrix(&self, g: &GradedLieAlgebra) -> Matrix {
        let n = g.dim();
        let k = self.grading;
        let mut rows = Vec::new();
        for x in 0..n {
            let gx = g.grading_of(x);
            for y in x + 1..n {
                let gy = g.grading_of(y);
                if gx + gy >= k {
                    break;
                }
                for z in y + 1..n {
                    let gz = g.grading_of(z);
                    if gx + gy + gz > k {
                        break;
                    }
                    if gx + gy + gz < k {
                        continue;
                    }
                    let mut row = vec![Scalar::zero(); self.dim()];
                    let mut nonzero = false;
                    for (a, b, c) in [(x, y, z), (y, z, x), (z, x, y)] {
                        for (s, coef) in g.bracket_basis(a, b) {
                            if let Some((idx, neg)) = self.coord(*s, c) {
                                if neg {
                                    row[idx] -= coef;
                                } else {
                                    row[idx] += coef;
                                }
                                nonzero = true;
                            }
                        }
                    }
                    if nonzero && row.iter().any(|v| !v.is_zero()) {
                        rows.push(row);
                    }
                }
            }
        }
        Matrix::from_rows(rows, self.dim()).unwrap()
    }

    /// The cocycle subspace in these coordinates.
    pub fn cocycles(&self, g: &GradedLieAlgebra) -> Subspace {
        let m = self.cocycle_matrix(g);
        if m.rows() == 0 {
            return Subspace::full(self.dim());
        }
        kernel_basis(&m)
    }

    /// Coordinates of `db` for `b` the dual basis functional of global index `t`.
    pub fn coboundary_of(&self, g: &GradedLieAlgebra, t: usize) -> Vec<Scalar> {
        self.pairs
            .iter()
            .map(|&(p, q)| {
                g.bracket_basis(p, q)
                    .iter()
                    .find(|(r, _)| *r == t)
                    .map(|(_, c)| c.clone())
                    .unwrap_or_default()
            })
            .collect()
    }

    pub fn coboundaries(&self, g: &GradedLieAlgebra) -> Subspace {
        let vecs = g
            .range(self.grading)
            .map(|t| self.coboundary_of(g, t))
            .collect();
        Subspace::span(self.dim(), vecs).unwrap()
    }
}

/// Cyclic-sum residuals of a cochain; all zero iff it is a cocycle.
pub fn cocycle_residual(g: &GradedLieAlgebra, c: &Cochain2) -> Result<Vec<Scalar>> {
    let space = CochainSpace::new(g, c.grading);
    let v = space.to_coords(g, c)?;
    space.cocycle_matrix(g).mul_vec(&v)
}

pub fn is_cocycle(g: &GradedLieAlgebra, c: &Cochain2) -> Result<bool> {
    Ok(cocycle_residual(g, c)?.iter().all(Scalar::is_zero))
}

fn check_grading(k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::Grading(format!("cochain grading must be >= 2, got {k}")));
    }
    Ok(())
}

/// Basis of `Z²_(k)`, the RREF basis of the cocycle kernel.
pub fn z2_basis(g: &GradedLieAlgebra, k: usize) -> Result<Vec<Cochain2>> {
    check_grading(k)?;
    let space = CochainSpace::new(g, k);
    Ok(space
        .cocycles(g)
        .basis_vectors()
        .iter()
        .map(|v| space.to_cochain(g, v))
        .collect())
}

/// Basis of `B²_(k) = { db : b ∈ g_k^* }` in RREF order.
pub fn b2_basis(g: &GradedLieAlgebra, k: usize) -> Result<Vec<Cochain2>> {
    check_grading(k)?;
    let space = CochainSpace::new(g, k);
    Ok(space
        .coboundaries(g)
        .basis_vectors()
        .iter()
        .map(|v| space.to_cochain(g, v))
        .collect())
}

/// One graded piece of `H²(g, K)`.
#[derive(Debug, Clone)]
pub struct CohomologySlice {
    pub grading: usize,
    pub space: CochainSpace,
    pub z2: Subspace,
    pub b2: Subspace,
    /// Coordinates of the chosen `H²` representatives (elements of the RREF
    /// basis of `Z²` that extend `B²`, in order).
    pub reps: Vec<Vec<Scalar>>,
}

impl CohomologySlice {
    pub fn dim_z2(&self) -> usize {
        self.z2.dim()
    }

    pub fn dim_b2(&self) -> usize {
        self.b2.dim()
    }

    pub fn dim_h2(&self) -> usize {
        self.reps.len()
    }

    pub fn representatives(&self, g: &GradedLieAlgebra) -> Vec<Cochain2> {
        self.reps.iter().map(|v| self.space.to_cochain(g, v)).collect()
    }

    /// Coordinates of a cocycle in the representative basis, modulo `B²`.
    pub fn class_coordinates(&self, v: &[Scalar]) -> Result<Vec<Scalar>> {
        let mut rows = self.reps.clone();
        rows.extend(self.b2.basis_vectors());
        let m = Matrix::from_rows(rows, self.space.dim())?.transpose();
        match crate::linalg::solve(&m, v)? {
            crate::linalg::Solution::Unique(x) => Ok(x[..self.reps.len()].to_vec()),
            crate::linalg::Solution::NoSolution => {
                Err(Error::InvalidCocycle("vector is not a cocycle".into()))
            }
        }
    }
}

pub fn h2_slice(g: &GradedLieAlgebra, k: usize) -> Result<CohomologySlice> {
    check_grading(k)?;
    let space = CochainSpace::new(g, k);
    let z2 = space.cocycles(g);
    let b2 = space.coboundaries(g);
    let mut acc = b2.clone();
    let mut reps = Vec::new();
    for v in z2.basis_vectors() {
        let grown = acc.sum(&Subspace::span(space.dim(), vec![v.clone()])?)?;
        if grown.dim() > acc.dim() {
            acc = grown;
            reps.push(v);
        }
    }
    Ok(CohomologySlice {
        grading: k,
        space,
        z2,
        b2,
        reps,
    })
}

/// Matrix of `c` on `g_1 × g_L` (rows: `g_1` basis, columns: `g_L` basis)
/// for a cochain of grading `L + 1`.
pub fn restrict_to_top(g: &GradedLieAlgebra, c: &Cochain2) -> Result<Matrix> {
    let len = g.length();
    if c.grading != len + 1 {
        return Err(Error::Grading(format!(
            "top restriction needs grading {}, got {}",
            len + 1,
            c.grading
        )));
    }
    let d1 = g.component_dim(1);
    let dl = g.component_dim(len);
    let mut m = Matrix::zeros(d1, dl);
    for a in 0..d1 {
        for b in 0..dl {
            m[(a, b)] = c.get(BasisRef::new(1, a), BasisRef::new(len, b));
        }
    }
    Ok(m)
}

/// Sum-of-terms constructor used in tests and docs: `Σ coef · e^x ∧ e^y`
/// with vectors addressed by label.
pub fn cochain_from_labels(
    g: &GradedLieAlgebra,
    grading: usize,
    terms: &[(&str, &str, i64)],
) -> Result<Cochain2> {
    let mut c = Cochain2::zero(grading);
    for &(x, y, coef) in terms {
        let look = |l: &str| {
            g.find_label(l)
                .map(|k| g.basis_ref(k))
                .ok_or_else(|| Error::InvalidCocycle(format!("unknown label '{l}'")))
        };
        let (x, y) = (look(x)?, look(y)?);
        let prev = c.get(x, y);
        c.set(x, y, prev + Scalar::from_int(coef))?;
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::Field;

    #[test]
    fn m0_2_slices() {
        let g = catalog::m0(2, Field::Q).unwrap();
        assert_eq!(z2_basis(&g, 3).unwrap().len(), 2);
        assert_eq!(z2_basis(&g, 2).unwrap().len(), 1);
        assert_eq!(b2_basis(&g, 2).unwrap().len(), 1);
        assert_eq!(b2_basis(&g, 3).unwrap().len(), 0);
        assert_eq!(h2_slice(&g, 3).unwrap().dim_h2(), 2);
        assert!(z2_basis(&g, 1).is_err());
    }

    #[test]
    fn m0_grading_three_representative() {
        let g = catalog::m0(5, Field::Q).unwrap();
        let s = h2_slice(&g, 3).unwrap();
        assert_eq!(s.dim_h2(), 1);
        let rep = &s.representatives(&g)[0];
        let expected = cochain_from_labels(&g, 3, &[("e2", "e3", 1)]).unwrap();
        assert_eq!(rep, &expected);
    }

    #[test]
    fn top_restriction() {
        let g = catalog::m0(2, Field::Q).unwrap();
        let c = cochain_from_labels(&g, 3, &[("e1", "e3", 1)]).unwrap();
        assert_eq!(restrict_to_top(&g, &c).unwrap(), Matrix::from_ints(&[&[1], &[0]]));
        let c = cochain_from_labels(&g, 3, &[("e2", "e3", 1)]).unwrap();
        assert_eq!(restrict_to_top(&g, &c).unwrap(), Matrix::from_ints(&[&[0], &[1]]));
        assert!(restrict_to_top(&g, &Cochain2::zero(3)).unwrap().is_zero());
        assert!(restrict_to_top(&g, &Cochain2::zero(2)).is_err());
    }

    #[test]
    fn abelian_has_no_coboundaries() {
        let mut b = crate::AlgebraBuilder::new(Field::Q);
        b.push_component(["a", "b"]);
        b.push_component(["c"]);
        let g = b.build().unwrap();
        for k in 2..5 {
            assert!(b2_basis(&g, k).unwrap().is_empty());
        }
    }
}
