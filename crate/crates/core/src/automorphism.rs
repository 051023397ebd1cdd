//! Graded maps between Carnot algebras.
//!
//! A graded homomorphism of a Carnot algebra is determined by its first
//! block: every higher basis vector is a combination of brackets of `g1`
//! with the previous component (a [`Presentation`]), so the images follow
//! by propagation. Propagating a symbolic matrix yields the polynomial
//! system cutting out the graded automorphisms (or isomorphisms).

use std::collections::HashSet;

use num_bigint::BigInt;
use serde::Serialize;

use crate::algebra::GradedLieAlgebra;
use crate::cohomology;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::poly::{Poly, MAX_VARS};
use crate::scalar::{field_sqrt, square_class, Field, Scalar};
use crate::structure;

/// A degree-preserving linear map, one square block per grading. Column `k`
/// of block `i` holds the image of the `k`-th basis vector of `g_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedMap {
    blocks: Vec<Matrix>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GradedMapJson {
    /// `blocks[i][r][c]`: row `r`, column `c` of the block of grading `i + 1`.
    pub blocks: Vec<Vec<Vec<String>>>,
}

impl GradedMap {
    pub fn new(blocks: Vec<Matrix>) -> Result<Self> {
        for (i, b) in blocks.iter().enumerate() {
            if b.rows() != b.cols() {
                return Err(Error::Dimension(format!("block {} is not square", i + 1)));
            }
        }
        Ok(GradedMap { blocks })
    }

    pub fn identity(g: &GradedLieAlgebra) -> Self {
        GradedMap {
            blocks: g.dims().into_iter().map(Matrix::identity).collect(),
        }
    }

    /// The homothety `x ↦ α^i x` on `g_i`.
    pub fn homothety(g: &GradedLieAlgebra, alpha: &Scalar) -> Self {
        GradedMap {
            blocks: g
                .dims()
                .into_iter()
                .enumerate()
                .map(|(i, d)| {
                    let mut m = Matrix::identity(d);
                    let s = alpha.pow(i as u32 + 1);
                    for k in 0..d {
                        m[(k, k)] = s.clone();
                    }
                    m
                })
                .collect(),
        }
    }

    pub fn blocks(&self) -> &[Matrix] {
        &self.blocks
    }

    /// Block of grading `i` (1-based).
    pub fn block(&self, i: usize) -> &Matrix {
        &self.blocks[i - 1]
    }

    pub fn dims(&self) -> Vec<usize> {
        self.blocks.iter().map(Matrix::rows).collect()
    }

    /// Image of a vector over the global basis.
    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        let mut out = Vec::with_capacity(v.len());
        let mut off = 0;
        for b in &self.blocks {
            let d = b.rows();
            out.extend(b.mul_vec(&v[off..off + d]).expect("block size matches"));
            off += d;
        }
        out
    }

    /// Image of the basis vector with global index `p`.
    pub fn image_of_basis(&self, p: usize) -> Vec<Scalar> {
        let n: usize = self.dims().iter().sum();
        let mut e = vec![Scalar::zero(); n];
        e[p] = Scalar::one();
        self.apply(&e)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &GradedMap) -> Result<GradedMap> {
        if self.dims() != other.dims() {
            return Err(Error::Dimension("graded maps of different shapes".into()));
        }
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a.mul(b))
            .collect::<Result<_>>()?;
        Ok(GradedMap { blocks })
    }

    pub fn inverse(&self) -> Option<GradedMap> {
        let blocks = self.blocks.iter().map(Matrix::inverse).collect::<Option<_>>()?;
        Some(GradedMap { blocks })
    }

    pub fn is_invertible(&self) -> bool {
        self.blocks.iter().all(|b| b.rank() == b.rows())
    }

    /// First basis pair `(p, q)` of `g` with `f[e_p, e_q] != [f e_p, f e_q]`.
    pub fn first_violation(&self, g: &GradedLieAlgebra, h: &GradedLieAlgebra) -> Option<(usize, usize)> {
        let n = g.dim();
        let images: Vec<Vec<Scalar>> = (0..n).map(|p| self.image_of_basis(p)).collect();
        for p in 0..n {
            for q in p + 1..n {
                if g.grading_of(p) + g.grading_of(q) > g.length() {
                    continue;
                }
                let mut lhs = vec![Scalar::zero(); n];
                for (r, c) in g.bracket_basis(p, q) {
                    for (k, v) in images[*r].iter().enumerate() {
                        if !v.is_zero() {
                            lhs[k] += &(c * v);
                        }
                    }
                }
                if lhs != h.bracket_vec(&images[p], &images[q]) {
                    return Some((p, q));
                }
            }
        }
        None
    }

    /// Whether this is a graded isomorphism `g → h`.
    pub fn is_isomorphism(&self, g: &GradedLieAlgebra, h: &GradedLieAlgebra) -> bool {
        self.dims() == g.dims()
            && g.dims() == h.dims()
            && self.is_invertible()
            && self.first_violation(g, h).is_none()
    }

    pub fn to_json_value(&self, field: Field) -> GradedMapJson {
        GradedMapJson {
            blocks: self
                .blocks
                .iter()
                .map(|b| {
                    (0..b.rows())
                        .map(|r| b.row(r).iter().map(|s| s.to_field_string(field)).collect())
                        .collect()
                })
                .collect(),
        }
    }
}

/// Generators of each component `g_i` (`i >= 2`) as brackets `[x, y]` with
/// `x ∈ g1`, `y ∈ g_{i-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PresentationStep {
    pub grading: usize,
    /// Global index pairs `(x, y)` whose brackets form a basis of `g_i`.
    pub pairs: Vec<(usize, usize)>,
    /// `e_k = Σ_r m[k][r] [x_r, y_r]` over the basis of `g_i`.
    pub inverse: Matrix,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    pub steps: Vec<PresentationStep>,
}

/// First-found spanning brackets in `(grading, index)` order.
pub fn presentation(g: &GradedLieAlgebra) -> Result<Presentation> {
    if !structure::is_carnot(g).carnot {
        return Err(Error::NotCarnot(g.display_name().to_string()));
    }
    let mut steps = Vec::new();
    for i in 2..=g.length() {
        let target = g.range(i);
        let d = target.len();
        let mut rows: Vec<Vec<Scalar>> = Vec::new();
        let mut pairs = Vec::new();
        'outer: for x in g.range(1) {
            for y in g.range(i - 1) {
                let mut row = vec![Scalar::zero(); d];
                for (r, c) in g.bracket_basis(x, y) {
                    row[r - target.start] = c.clone();
                }
                let mut trial = rows.clone();
                trial.push(row.clone());
                if Matrix::from_rows(trial, d)?.rank() > rows.len() {
                    rows.push(row);
                    pairs.push((x, y));
                    if rows.len() == d {
                        break 'outer;
                    }
                }
            }
        }
        let p = Matrix::from_rows(rows, d)?;
        let inverse = p
            .inverse()
            .ok_or_else(|| Error::NotCarnot(g.display_name().to_string()))?;
        steps.push(PresentationStep {
            grading: i,
            pairs,
            inverse,
        });
    }
    Ok(Presentation { steps })
}

/// Coefficient ring for propagation: exact scalars or polynomials.
trait Coef: Clone {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn scale(&self, s: &Scalar) -> Self;
}

impl Coef for Scalar {
    fn zero() -> Self {
        Scalar::zero()
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn scale(&self, s: &Scalar) -> Self {
        self * s
    }
}

impl Coef for Poly {
    fn zero() -> Self {
        Poly::zero()
    }
    fn is_zero(&self) -> bool {
        Poly::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn scale(&self, s: &Scalar) -> Self {
        Poly::scale(self, s)
    }
}

/// An element `a + b·√d` of a quadratic extension of the ground field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Surd {
    pub a: Scalar,
    pub b: Scalar,
}

impl Surd {
    pub fn new(a: Scalar, b: Scalar) -> Self {
        Surd { a, b }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn to_field_string(&self, d: &Scalar, field: Field) -> String {
        let root = format!("sqrt({})", d.to_field_string(field));
        match (self.a.is_zero(), self.b.is_zero()) {
            (_, true) => self.a.to_field_string(field),
            (true, false) => format!("({})*{root}", self.b.to_field_string(field)),
            (false, false) => format!(
                "{} + ({})*{root}",
                self.a.to_field_string(field),
                self.b.to_field_string(field)
            ),
        }
    }
}

/// Propagation coefficient in `F(√d)`; `d` rides along so that constants
/// created by `zero()` need no context.
#[derive(Debug, Clone)]
struct SurdC {
    a: Scalar,
    b: Scalar,
    d: Option<Scalar>,
}

impl Coef for SurdC {
    fn zero() -> Self {
        SurdC {
            a: Scalar::zero(),
            b: Scalar::zero(),
            d: None,
        }
    }
    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
    fn add(&self, o: &Self) -> Self {
        SurdC {
            a: &self.a + &o.a,
            b: &self.b + &o.b,
            d: self.d.clone().or_else(|| o.d.clone()),
        }
    }
    fn mul(&self, o: &Self) -> Self {
        let d = self.d.clone().or_else(|| o.d.clone());
        let bb = &self.b * &o.b;
        let a = match &d {
            Some(d) => &(&self.a * &o.a) + &(&bb * d),
            None => {
                debug_assert!(bb.is_zero());
                &self.a * &o.a
            }
        };
        SurdC {
            a,
            b: &(&self.a * &o.b) + &(&self.b * &o.a),
            d,
        }
    }
    fn scale(&self, s: &Scalar) -> Self {
        SurdC {
            a: &self.a * s,
            b: &self.b * s,
            d: self.d.clone(),
        }
    }
}

/// A graded isomorphism defined over `F(√d)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendedMap {
    pub d: Scalar,
    /// `blocks[i][row][col]` for grading `i + 1`.
    pub blocks: Vec<Vec<Vec<Surd>>>,
}

impl ExtendedMap {
    pub fn to_json_value(&self, field: Field) -> serde_json::Value {
        let blocks: Vec<Vec<Vec<String>>> = self
            .blocks
            .iter()
            .map(|b| b.iter().map(|r| r.iter().map(|x| x.to_field_string(&self.d, field)).collect()).collect())
            .collect();
        serde_json::json!({ "sqrt_of": self.d.to_field_string(field), "blocks": blocks })
    }
}

/// Checks that `a` (entries in `F(√d)`, `d` a non-square of `F`) is the first
/// block of a graded isomorphism `g → h` over `F(√d)`, by propagation and a
/// bracket check on every basis pair.
pub fn verify_extended(g: &GradedLieAlgebra, h: &GradedLieAlgebra, d: &Scalar, a: &[Vec<Surd>]) -> Result<Option<ExtendedMap>> {
    check_pair(g, h)?;
    if field_sqrt(d, g.field()).is_some() {
        return Err(Error::InvalidParameter(format!(
            "{} is a square in {}",
            d.to_field_string(g.field()),
            g.field()
        )));
    }
    let q = g.component_dim(1);
    if a.len() != q || a.iter().any(|r| r.len() != q) {
        return Err(Error::Dimension(format!("first block must be {q}x{q}")));
    }
    let pres = presentation(g)?;
    if !structure::is_carnot(h).carnot {
        return Err(Error::NotCarnot(h.display_name().to_string()));
    }
    let lift = |x: &Surd| SurdC {
        a: x.a.clone(),
        b: x.b.clone(),
        d: Some(d.clone()),
    };
    let first: Vec<Vec<SurdC>> = (0..q).map(|c| (0..q).map(|r| lift(&a[r][c])).collect()).collect();
    // det over F(√d) by Leibniz expansion
    let entries: Vec<Vec<SurdC>> = a.iter().map(|r| r.iter().map(lift).collect()).collect();
    let mut det = SurdC::zero();
    let mut perm: Vec<usize> = (0..q).collect();
    fn permutations(k: usize, perm: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, bool)>, odd: bool) {
        if k == perm.len() {
            out.push((perm.clone(), odd));
            return;
        }
        for i in k..perm.len() {
            perm.swap(k, i);
            permutations(k + 1, perm, out, odd ^ (i != k));
            perm.swap(k, i);
        }
    }
    let mut perms = Vec::new();
    permutations(0, &mut perm, &mut perms, false);
    for (p, odd) in perms {
        let mut t = SurdC {
            a: Scalar::one(),
            b: Scalar::zero(),
            d: Some(d.clone()),
        };
        for (r, &c) in p.iter().enumerate() {
            t = t.mul(&entries[r][c]);
        }
        det = if odd { det.add(&t.scale(&-Scalar::one())) } else { det.add(&t) };
    }
    if det.is_zero() {
        return Ok(None);
    }
    let images = propagate_images(g, h, &pres, first);
    if residuals(g, h, &images).iter().any(|(_, r)| r.iter().any(|c| !c.is_zero())) {
        return Ok(None);
    }
    let mut blocks = Vec::new();
    for i in 1..=g.length() {
        let r = g.range(i);
        let dim = r.len();
        let mut m = vec![vec![Surd::new(Scalar::zero(), Scalar::zero()); dim]; dim];
        for (col, p) in r.enumerate() {
            for (row, line) in m.iter_mut().enumerate() {
                line[col] = Surd::new(images[p][row].a.clone(), images[p][row].b.clone());
            }
        }
        blocks.push(m);
    }
    Ok(Some(ExtendedMap { d: d.clone(), blocks }))
}

/// `[F, G]` in `h` for `F` local in `h_i`, `G` local in `h_j`; local in `h_{i+j}`.
fn bracket_local<C: Coef>(h: &GradedLieAlgebra, i: usize, f: &[C], j: usize, g: &[C]) -> Vec<C> {
    let k = i + j;
    let d = h.component_dim(k);
    let mut out = vec![C::zero(); d];
    if d == 0 {
        return out;
    }
    let (oi, oj, ok) = (h.offset(i), h.offset(j), h.offset(k));
    for (p, fp) in f.iter().enumerate() {
        if fp.is_zero() {
            continue;
        }
        for (q, gq) in g.iter().enumerate() {
            if gq.is_zero() {
                continue;
            }
            let bb = h.bracket_basis(oi + p, oj + q);
            if bb.is_empty() {
                continue;
            }
            let prod = fp.mul(gq);
            for (r, c) in bb {
                out[r - ok] = out[r - ok].add(&prod.scale(c));
            }
        }
    }
    out
}

/// Images of every basis vector of `g` (local coordinates in `h`), given
/// the images of `g1` (`first[j]` = image of the `j`-th vector of `g1`).
fn propagate_images<C: Coef>(g: &GradedLieAlgebra, h: &GradedLieAlgebra, pres: &Presentation, first: Vec<Vec<C>>) -> Vec<Vec<C>> {
    let mut images = first;
    for step in &pres.steps {
        let i = step.grading;
        let brackets: Vec<Vec<C>> = step
            .pairs
            .iter()
            .map(|&(x, y)| bracket_local(h, 1, &images[x], i - 1, &images[y]))
            .collect();
        let d = step.pairs.len();
        for k in 0..d {
            let mut v = vec![C::zero(); h.component_dim(i)];
            for (r, b) in brackets.iter().enumerate() {
                let m = &step.inverse[(k, r)];
                if m.is_zero() {
                    continue;
                }
                for (t, bt) in b.iter().enumerate() {
                    v[t] = v[t].add(&bt.scale(m));
                }
            }
            images.push(v);
        }
    }
    debug_assert_eq!(images.len(), g.dim());
    images
}

/// `f[e_p, e_q] - [f e_p, f e_q]` for every basis pair with nonzero target space.
fn residuals<C: Coef>(g: &GradedLieAlgebra, h: &GradedLieAlgebra, images: &[Vec<C>]) -> Vec<((usize, usize), Vec<C>)> {
    let n = g.dim();
    let len = g.length();
    let mut out = Vec::new();
    for p in 0..n {
        let gp = g.grading_of(p);
        for q in p + 1..n {
            let gq = g.grading_of(q);
            if gp + gq > len {
                continue;
            }
            let d = h.component_dim(gp + gq);
            let off = g.offset(gp + gq);
            let mut lhs = vec![C::zero(); d];
            for (r, c) in g.bracket_basis(p, q) {
                for (t, v) in images[*r].iter().enumerate() {
                    lhs[t] = lhs[t].add(&v.scale(c));
                }
            }
            let _ = off;
            let rhs = bracket_local(h, gp, &images[p], gq, &images[q]);
            let diff: Vec<C> = lhs
                .iter()
                .zip(&rhs)
                .map(|(a, b)| a.add(&b.scale(&-Scalar::one())))
                .collect();
            out.push(((p, q), diff));
        }
    }
    out
}

fn images_to_map<C: Clone>(g: &GradedLieAlgebra, images: &[Vec<C>], conv: impl Fn(&C) -> Scalar) -> GradedMap {
    let mut blocks = Vec::new();
    for i in 1..=g.length() {
        let r = g.range(i);
        let d = r.len();
        let mut m = Matrix::zeros(d, d);
        for (col, p) in r.enumerate() {
            for row in 0..d {
                m[(row, col)] = conv(&images[p][row]);
            }
        }
        blocks.push(m);
    }
    GradedMap { blocks }
}

fn check_pair(g: &GradedLieAlgebra, h: &GradedLieAlgebra) -> Result<()> {
    g.field().check_same(h.field())?;
    if g.dims() != h.dims() {
        return Err(Error::Dimension(format!(
            "component dimensions differ: {:?} vs {:?}",
            g.dims(),
            h.dims()
        )));
    }
    Ok(())
}

/// Why a first block does not extend to a homomorphism.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Inconsistency {
    /// Global basis pair of the source whose bracket is not preserved.
    pub pair: (usize, usize),
    /// `f[x, y] - [f x, f y]` in local coordinates of the target component.
    pub residual: Vec<Scalar>,
}

/// Extends `a` (images of `g1`, column `j` = image of the `j`-th vector)
/// to a graded homomorphism `g → h`, or reports the first broken relation.
pub fn propagate_to(g: &GradedLieAlgebra, h: &GradedLieAlgebra, a: &Matrix) -> Result<std::result::Result<GradedMap, Inconsistency>> {
    check_pair(g, h)?;
    let q = g.component_dim(1);
    if a.rows() != q || a.cols() != q {
        return Err(Error::Dimension(format!("first block must be {q}x{q}")));
    }
    let pres = presentation(g)?;
    if !structure::is_carnot(h).carnot {
        return Err(Error::NotCarnot(h.display_name().to_string()));
    }
    let first: Vec<Vec<Scalar>> = (0..q).map(|j| a.column(j)).collect();
    let images = propagate_images(g, h, &pres, first);
    for (pair, res) in residuals(g, h, &images) {
        if res.iter().any(|c| !c.is_zero()) {
            return Ok(Err(Inconsistency { pair, residual: res }));
        }
    }
    Ok(Ok(images_to_map(g, &images, Scalar::clone)))
}

/// [`propagate_to`] with `h = g`.
pub fn propagate(g: &GradedLieAlgebra, a: &Matrix) -> Result<std::result::Result<GradedMap, Inconsistency>> {
    propagate_to(g, g, a)
}

/// Polynomial equations in the entries of the first block `A` (and one
/// inverse-determinant variable) whose solutions with `det A != 0` are the
/// first blocks of graded isomorphisms `g → h`.
#[derive(Debug, Clone)]
pub struct PolySystem {
    pub q: usize,
    /// `a{r}{c}` for entry `(r, c)` of `A`, then `t`.
    pub var_names: Vec<String>,
    pub equations: Vec<Poly>,
    pub det: Poly,
}

impl PolySystem {
    /// Index of the variable for entry `(r, c)` of `A`.
    pub fn entry_var(&self, r: usize, c: usize) -> usize {
        r * self.q + c
    }

    /// Index of the inverse-determinant variable.
    pub fn inv_det_var(&self) -> usize {
        self.q * self.q
    }

    /// `t · det A - 1`.
    pub fn inverse_equation(&self) -> Poly {
        &(&Poly::var(self.inv_det_var()) * &self.det) - &Poly::one()
    }

    pub fn render(&self) -> Vec<String> {
        let names: Vec<&str> = self.var_names.iter().map(String::as_str).collect();
        self.equations
            .iter()
            .chain(std::iter::once(&self.inverse_equation()))
            .map(|p| format!("{} = 0", p.fmt_with(&names)))
            .collect()
    }

    /// Matrix `A` from variable values.
    pub fn matrix(&self, values: &[Scalar]) -> Matrix {
        let mut m = Matrix::zeros(self.q, self.q);
        for r in 0..self.q {
            for c in 0..self.q {
                m[(r, c)] = values[self.entry_var(r, c)].clone();
            }
        }
        m
    }
}

fn det_poly(vars: &[Vec<Poly>]) -> Poly {
    // Leibniz expansion, fine for q <= 3
    let q = vars.len();
    let mut perm: Vec<usize> = (0..q).collect();
    let mut total = Poly::zero();
    fn rec(k: usize, perm: &mut Vec<usize>, vars: &[Vec<Poly>], total: &mut Poly) {
        let q = perm.len();
        if k == q {
            let mut inv = 0;
            for i in 0..q {
                for j in i + 1..q {
                    if perm[i] > perm[j] {
                        inv += 1;
                    }
                }
            }
            let mut t = Poly::one();
            for (r, &c) in perm.iter().enumerate() {
                t = &t * &vars[r][c];
            }
            *total = if inv % 2 == 0 { &*total + &t } else { &*total - &t };
            return;
        }
        for i in k..q {
            perm.swap(k, i);
            rec(k + 1, perm, vars, total);
            perm.swap(k, i);
        }
    }
    rec(0, &mut perm, vars, &mut total);
    total
}

/// The isomorphism system between two Carnot algebras of the same shape.
pub fn mixed_system(g: &GradedLieAlgebra, h: &GradedLieAlgebra) -> Result<PolySystem> {
    check_pair(g, h)?;
    if !structure::is_carnot(h).carnot {
        return Err(Error::NotCarnot(h.display_name().to_string()));
    }
    let pres = presentation(g)?;
    let q = g.component_dim(1);
    if q * q + 1 > MAX_VARS {
        return Err(Error::Precondition(format!(
            "polynomial systems support dim g1 <= 3, got {q}"
        )));
    }
    let vars: Vec<Vec<Poly>> = (0..q)
        .map(|r| (0..q).map(|c| Poly::var(r * q + c)).collect())
        .collect();
    let first: Vec<Vec<Poly>> = (0..q).map(|c| (0..q).map(|r| vars[r][c].clone()).collect()).collect();
    let images = propagate_images(g, h, &pres, first);
    let mut seen = HashSet::new();
    let mut equations = Vec::new();
    for (_, res) in residuals(g, h, &images) {
        for p in res {
            if p.is_zero() {
                continue;
            }
            let m = p.monic();
            if seen.insert(m.clone()) {
                equations.push(m);
            }
        }
    }
    let mut var_names: Vec<String> = (0..q * q).map(|k| format!("a{}{}", k / q + 1, k % q + 1)).collect();
    var_names.push("t".into());
    Ok(PolySystem {
        q,
        var_names,
        equations,
        det: det_poly(&vars),
    })
}

/// The system cutting out `Φ(Aut_gr(g)) ⊂ GL(q)`.
pub fn constraint_system(g: &GradedLieAlgebra) -> Result<PolySystem> {
    mixed_system(g, g)
}

/// Matrix of `c ↦ c ∘ (f × f)` on the `H²_(k)` representatives (columns are
/// images). This is a right action: the matrix of `f ∘ f'` is the product of
/// the matrix of `f'` and that of `f`.
pub fn induced_h2_action(g: &GradedLieAlgebra, f: &GradedMap, k: usize) -> Result<Matrix> {
    if !f.is_isomorphism(g, g) {
        return Err(Error::Unverified("map is not a graded automorphism".into()));
    }
    let slice = cohomology::h2_slice(g, k)?;
    let n = slice.dim_h2();
    let mut m = Matrix::zeros(n, n);
    let images: Vec<Vec<Scalar>> = (0..g.dim()).map(|p| f.image_of_basis(p)).collect();
    for (j, rep) in slice.representatives(g).iter().enumerate() {
        let pulled: Vec<Scalar> = slice
            .space
            .pairs
            .iter()
            .map(|&(p, q)| rep.eval(g, &images[p], &images[q]))
            .collect();
        let coords = slice.class_coordinates(&pulled)?;
        for (i, c) in coords.into_iter().enumerate() {
            m[(i, j)] = c;
        }
    }
    Ok(m)
}

/// Coefficients `(A, B, C)` of `Q(a, b) = A a² + B ab + C b²` with
/// `[x, [x, y]] = Q(a, b) z` for `x = a x1 + b x2`, `y` spanning `g_i` and
/// `z` spanning `g_{i+2}`.
pub fn quadratic_form(g: &GradedLieAlgebra, i: usize) -> Result<[Scalar; 3]> {
    if g.component_dim(1) != 2 || g.component_dim(i) != 1 || g.component_dim(i + 2) != 1 || i < 2 {
        return Err(Error::Precondition(format!(
            "quadratic form needs dim g1 = 2, dim g{i} = 1, dim g{} = 1",
            i + 2
        )));
    }
    let (x1, x2) = (g.offset(1), g.offset(1) + 1);
    let y = g.offset(i);
    let z = g.offset(i + 2);
    let n = g.dim();
    let e = |p: usize| {
        let mut v = vec![Scalar::zero(); n];
        v[p] = Scalar::one();
        v
    };
    let double = |a: usize, b: usize| -> Scalar {
        let inner = g.bracket_vec(&e(b), &e(y));
        g.bracket_vec(&e(a), &inner)[z].clone()
    };
    Ok([double(x1, x1), &double(x1, x2) + &double(x2, x1), double(x2, x2)])
}

/// Discriminant of [`quadratic_form`] at grading 2 with its sign and
/// rational square class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Discriminant {
    pub form: [String; 3],
    pub value: String,
    /// Sign over Q; absent for a non-rational value.
    pub sign: Option<i8>,
    /// Squarefree integer `d` with `value ∈ d·(Q*)²`.
    pub square_class: Option<String>,
}

pub fn discriminant_of(form: &[Scalar; 3], field: Field) -> (Scalar, Option<i8>, Option<BigInt>) {
    let d = crate::poly::binary_quadratic_discriminant(&form[0], &form[1], &form[2]);
    let _ = field;
    let sign = d.sign();
    let class = if d.is_rational() && !d.is_zero() {
        square_class(d.re())
    } else {
        None
    };
    (d, sign, class)
}

/// The real-form invariant: for `dim g1 = 2`, `dim g2 = dim g4 = 1`, the
/// discriminant of `x ↦ [x, [x, z0]]`. Its sign is preserved by real graded
/// isomorphisms and its square class by rational ones.
pub fn real_form_discriminant(g: &GradedLieAlgebra) -> Result<Discriminant> {
    if g.length() < 4 {
        return Err(Error::Precondition("real-form discriminant needs length >= 4".into()));
    }
    let form = quadratic_form(g, 2)?;
    let field = g.field();
    let (d, sign, class) = discriminant_of(&form, field);
    Ok(Discriminant {
        form: [
            form[0].to_field_string(field),
            form[1].to_field_string(field),
            form[2].to_field_string(field),
        ],
        value: d.to_field_string(field),
        sign,
        square_class: class.map(|c| c.to_string()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{self, LoopForm};

    #[test]
    fn homothety_propagates() {
        let g = catalog::m0(4, Field::Q).unwrap();
        let a = Matrix::from_ints(&[&[2, 0], &[0, 2]]);
        let f = propagate(&g, &a).unwrap().unwrap();
        assert_eq!(f, GradedMap::homothety(&g, &Scalar::from_int(2)));
    }

    #[test]
    fn swap_on_m0_is_inconsistent() {
        let g = catalog::m0(3, Field::Q).unwrap();
        let a = Matrix::from_ints(&[&[0, 1], &[1, 0]]);
        assert!(propagate(&g, &a).unwrap().is_err());
    }

    #[test]
    fn system_of_m0_admits_diagonals() {
        let g = catalog::m0(4, Field::Q).unwrap();
        let sys = constraint_system(&g).unwrap();
        let vals = |s: i64, t: i64| {
            let mut v = vec![Scalar::zero(); MAX_VARS];
            v[0] = Scalar::from_int(s);
            v[3] = Scalar::from_int(t);
            v
        };
        for (s, t) in [(1, 1), (2, 3), (-1, 5)] {
            assert!(sys.equations.iter().all(|e| e.eval(&vals(s, t)).is_zero()));
        }
    }

    #[test]
    fn discriminant_signs() {
        let p = catalog::n1_loop(LoopForm::Plus, 6, Field::Q).unwrap();
        let m = catalog::n1_loop(LoopForm::Minus, 6, Field::Q).unwrap();
        let t = catalog::n1_table(6, Field::Q).unwrap();
        assert_eq!(real_form_discriminant(&p).unwrap().value, "-4");
        assert_eq!(real_form_discriminant(&m).unwrap().value, "4");
        assert_eq!(real_form_discriminant(&t).unwrap().value, "4");
    }

    #[test]
    fn h2_action_of_diagonal() {
        let g = catalog::m0(2, Field::Q).unwrap();
        let a = Matrix::from_ints(&[&[2, 0], &[0, 3]]);
        let f = propagate(&g, &a).unwrap().unwrap();
        let m = induced_h2_action(&g, &f, 3).unwrap();
        assert_eq!(m, Matrix::from_ints(&[&[12, 0], &[0, 18]]));
    }
}
