//! Sparse multivariate polynomials with exact coefficients, sized for the
//! automorphism systems of algebras with a two-dimensional first component.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};

use crate::scalar::{Field, Scalar};

/// Maximum number of variables.
pub const MAX_VARS: usize = 10;

/// Exponent vector.
pub type Mono = [u16; MAX_VARS];

const ONE_MONO: Mono = [0; MAX_VARS];

fn mono_var(v: usize) -> Mono {
    let mut m = ONE_MONO;
    m[v] = 1;
    m
}

fn mono_mul(a: &Mono, b: &Mono) -> Mono {
    let mut m = ONE_MONO;
    for i in 0..MAX_VARS {
        m[i] = a[i] + b[i];
    }
    m
}

fn mono_deg(m: &Mono) -> u32 {
    m.iter().map(|&e| e as u32).sum()
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Mono, Scalar>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(Scalar::one())
    }

    pub fn constant(c: Scalar) -> Self {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(ONE_MONO, c);
        }
        p
    }

    pub fn var(v: usize) -> Self {
        assert!(v < MAX_VARS, "variable index {v} out of range");
        let mut p = Poly::zero();
        p.terms.insert(mono_var(v), Scalar::one());
        p
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<Scalar> {
        match self.terms.len() {
            0 => Some(Scalar::zero()),
            1 => self.terms.get(&ONE_MONO).cloned(),
            _ => None,
        }
    }

    fn add_term(&mut self, m: Mono, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(m).or_insert_with(Scalar::zero);
        *e += &c;
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, v)| (*m, v * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut out = Poly::one();
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(mono_deg).max().unwrap_or(0)
    }

    pub fn degree_in(&self, v: usize) -> u16 {
        self.terms.keys().map(|m| m[v]).max().unwrap_or(0)
    }

    /// Bit mask of the variables that occur.
    pub fn vars(&self) -> u32 {
        let mut mask = 0;
        for m in self.terms.keys() {
            for (i, &e) in m.iter().enumerate() {
                if e > 0 {
                    mask |= 1 << i;
                }
            }
        }
        mask
    }

    /// The single variable of a non-constant univariate polynomial.
    pub fn univariate_var(&self) -> Option<usize> {
        let mask = self.vars();
        (mask.count_ones() == 1).then(|| mask.trailing_zeros() as usize)
    }

    /// Coefficients of `self` as a polynomial in `v`: entry `k` multiplies `v^k`.
    pub fn coeffs_in(&self, v: usize) -> Vec<Poly> {
        let mut out = vec![Poly::zero(); self.degree_in(v) as usize + 1];
        for (m, c) in &self.terms {
            let mut rest = *m;
            let k = rest[v] as usize;
            rest[v] = 0;
            out[k].add_term(rest, c.clone());
        }
        out
    }

    /// Largest monomial dividing every term.
    pub fn monomial_content(&self) -> Mono {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return ONE_MONO;
        };
        let mut g = *first;
        for m in it {
            for i in 0..MAX_VARS {
                g[i] = g[i].min(m[i]);
            }
        }
        g
    }

    pub fn div_monomial(&self, d: &Mono) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut q = *m;
            for i in 0..MAX_VARS {
                q[i] = m[i].checked_sub(d[i]).expect("monomial does not divide");
            }
            out.terms.insert(q, c.clone());
        }
        out
    }

    /// Substitutes `v := value`.
    pub fn substitute(&self, v: usize, value: &Poly) -> Poly {
        let coeffs = self.coeffs_in(v);
        // Horner in v
        let mut out = Poly::zero();
        for c in coeffs.iter().rev() {
            out = &(&out * value) + c;
        }
        out
    }

    /// `den^d · self(v := num/den)` with `d = degree_in(v)`; a polynomial
    /// vanishing exactly where `self` does as long as `den != 0`.
    pub fn substitute_fraction(&self, v: usize, num: &Poly, den: &Poly) -> Poly {
        let coeffs = self.coeffs_in(v);
        let d = coeffs.len() - 1;
        let mut out = Poly::zero();
        let mut num_pow = Poly::one();
        let den_pows: Vec<Poly> = {
            let mut acc = vec![Poly::one()];
            for k in 1..=d {
                acc.push(&acc[k - 1] * den);
            }
            acc
        };
        for (k, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                out = &out + &(&(c * &num_pow) * &den_pows[d - k]);
            }
            if k < d {
                num_pow = &num_pow * num;
            }
        }
        out
    }

    pub fn eval(&self, values: &[Scalar]) -> Scalar {
        let mut acc = Scalar::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.iter().enumerate() {
                if e > 0 {
                    t = &t * &values[i].pow(e as u32);
                }
            }
            acc += &t;
        }
        acc
    }

    /// `self(images[0], images[1], ...)`: simultaneous substitution of
    /// every variable `v` that has an entry in `images`.
    pub fn compose(&self, images: &[Poly]) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut t = Poly::constant(c.clone());
            for (v, &e) in m.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let base = images.get(v).cloned().unwrap_or_else(|| Poly::var(v));
                t = &t * &base.pow(e as u32);
            }
            out = &out + &t;
        }
        out
    }

    /// Reduces modulo `s^2 - d`: every power of variable `s` drops below 2.
    pub fn reduce_square(&self, s: usize, d: &Scalar) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let e = m[s];
            let mut mono = *m;
            mono[s] = e % 2;
            out.add_term(mono, c * &d.pow((e / 2) as u32));
        }
        out
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    /// Uses division by leading terms in the lexicographic order.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let (ld, lc) = d.terms.iter().next_back()?;
        let lc_inv = lc.inv()?;
        let mut r = self.clone();
        let mut q = Poly::zero();
        while let Some((lr, cr)) = r.terms.iter().next_back() {
            let mut t = ONE_MONO;
            for i in 0..MAX_VARS {
                t[i] = lr[i].checked_sub(ld[i])?;
            }
            let c = cr * &lc_inv;
            let mut term = Poly::zero();
            term.terms.insert(t, c);
            r = &r - &(&term * d);
            q = &q + &term;
        }
        Some(q)
    }

    /// Leading coefficient in the term order (largest monomial).
    pub fn leading_coefficient(&self) -> Option<&Scalar> {
        self.terms.values().next_back()
    }

    /// Scales so that the leading coefficient is one.
    pub fn monic(&self) -> Poly {
        match self.leading_coefficient() {
            Some(c) => self.scale(&c.inv().expect("nonzero leading coefficient")),
            None => Poly::zero(),
        }
    }

    pub fn fmt_with(&self, names: &[&str]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (m, c) in self.terms.iter().rev() {
            let mut factors = Vec::new();
            for (i, &e) in m.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(names.get(i).map_or(format!("x{i}"), |s| s.to_string())),
                    _ => factors.push(format!(
                        "{}^{e}",
                        names.get(i).map_or(format!("x{i}"), |s| s.to_string())
                    )),
                }
            }
            let coef = if c.is_rational() {
                c.to_field_string(Field::Q)
            } else {
                format!("({})", c.to_field_string(Field::Qi))
            };
            if factors.is_empty() {
                parts.push(coef);
            } else if c.is_one() {
                parts.push(factors.join("*"));
            } else if (-c).is_one() {
                parts.push(format!("-{}", factors.join("*")));
            } else {
                parts.push(format!("{coef}*{}", factors.join("*")));
            }
        }
        parts.join(" + ").replace("+ -", "- ")
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fmt_with(&[]))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fmt_with(&[]))
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, -c);
        }
        out
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(mono_mul(ma, mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&-Scalar::one())
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

/// Resultant of `p` and `q` with respect to `v` (Sylvester determinant,
/// fraction-free elimination). `None` when either has degree 0 in `v`.
pub fn resultant(p: &Poly, q: &Poly, v: usize) -> Option<Poly> {
    let a = p.coeffs_in(v);
    let b = q.coeffs_in(v);
    let (m, n) = (a.len() - 1, b.len() - 1);
    if m == 0 || n == 0 {
        return None;
    }
    let size = m + n;
    let mut mat = vec![vec![Poly::zero(); size]; size];
    for r in 0..n {
        for (k, c) in a.iter().rev().enumerate() {
            mat[r][r + k] = c.clone();
        }
    }
    for r in 0..m {
        for (k, c) in b.iter().rev().enumerate() {
            mat[n + r][r + k] = c.clone();
        }
    }
    Some(bareiss_det(mat))
}

fn bareiss_det(mut m: Vec<Vec<Poly>>) -> Poly {
    let n = m.len();
    let mut sign = false;
    let mut prev = Poly::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            let Some(r) = (k + 1..n).find(|&r| !m[r][k].is_zero()) else {
                return Poly::zero();
            };
            m.swap(k, r);
            sign = !sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&m[k][k] * &m[i][j]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = num.div_exact(&prev).expect("Bareiss division is exact");
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if sign {
        -d
    } else {
        d
    }
}

/// Outcome of a univariate root search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Roots {
    /// All roots in the field, without multiplicity, in ascending order.
    Found(Vec<Scalar>),
    /// Coefficients too large for the divisor search.
    TooLarge,
}

/// Dense univariate coefficients (index = power) of a polynomial in `v`.
fn dense_univariate(p: &Poly, v: usize) -> Vec<Scalar> {
    p.coeffs_in(v)
        .into_iter()
        .map(|c| c.as_constant().expect("polynomial is univariate"))
        .collect()
}

fn horner(coeffs: &[Scalar], x: &Scalar) -> Scalar {
    let mut acc = Scalar::zero();
    for c in coeffs.iter().rev() {
        acc = &(&acc * x) + c;
    }
    acc
}

/// Synthetic division by `x - r` (assumes `r` is a root).
fn deflate(coeffs: &[Scalar], r: &Scalar) -> Vec<Scalar> {
    let n = coeffs.len() - 1;
    let mut out = vec![Scalar::zero(); n];
    let mut carry = Scalar::zero();
    for k in (1..=n).rev() {
        carry = &coeffs[k] + &(&carry * r);
        out[k - 1] = carry.clone();
    }
    out
}

const DIVISOR_LIMIT: u64 = 1 << 40;

fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Gaussian integers `u + vi` of norm `d`.
fn gaussian_of_norm(d: u64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    let mut u = 0u64;
    while u * u <= d {
        let rest = d - u * u;
        let v = (rest as f64).sqrt() as u64;
        for w in [v.saturating_sub(1), v, v + 1] {
            if w * w == rest {
                for (su, sv) in [(1i64, 1i64), (1, -1), (-1, 1), (-1, -1)] {
                    let cand = (su * u as i64, sv * w as i64);
                    if !out.contains(&cand) {
                        out.push(cand);
                    }
                }
            }
        }
        u += 1;
    }
    out
}

/// Roots of a univariate polynomial (in variable `v`) lying in `field`.
///
/// The polynomial is made monic with integral coefficients by a scaling of
/// the variable; its roots are then integers (Gaussian integers for `Qi`)
/// dividing the constant term.
pub fn univariate_roots(p: &Poly, v: usize, field: Field) -> Roots {
    let mut coeffs = dense_univariate(p, v);
    let mut roots: Vec<Scalar> = Vec::new();
    if coeffs.iter().all(Scalar::is_zero) {
        return Roots::Found(roots);
    }
    let z = coeffs.iter().position(|c| !c.is_zero()).unwrap();
    if z > 0 {
        roots.push(Scalar::zero());
        coeffs.drain(..z);
    }
    let n = coeffs.len() - 1;
    if n == 0 {
        return Roots::Found(roots);
    }
    let mut l = BigInt::one();
    for c in &coeffs {
        l = l.lcm(&c.denom_lcm());
    }
    let ints: Vec<Scalar> = coeffs.iter().map(|c| c * &Scalar::from_bigint(l.clone())).collect();
    // y = an·x turns f into the monic g(y) = Σ a_k an^{n-1-k} y^k
    let an = ints[n].clone();
    let g0 = &ints[0] * &an.pow(n as u32 - 1);
    let Some(bound) = g0.norm().to_integer().to_u64().filter(|&b| b <= DIVISOR_LIMIT) else {
        return Roots::TooLarge;
    };
    let mut cands: Vec<Scalar> = Vec::new();
    match field {
        Field::Q => {
            // the norm of a rational integer is its square
            let a = g0.re().to_integer().abs().to_u64().unwrap_or(0);
            for d in divisors(a) {
                cands.push(Scalar::from_int(d as i64));
                cands.push(Scalar::from_int(-(d as i64)));
            }
        }
        Field::Qi => {
            for d in divisors(bound) {
                for (u, w) in gaussian_of_norm(d) {
                    cands.push(&Scalar::from_int(u) + &(&Scalar::from_int(w) * &Scalar::i()));
                }
            }
        }
    }
    let an_inv = an.inv().expect("leading coefficient is nonzero");
    let mut cur = coeffs;
    for y in cands {
        if cur.len() <= 1 {
            break;
        }
        let x = &y * &an_inv;
        if roots.contains(&x) || !horner(&cur, &x).is_zero() {
            continue;
        }
        roots.push(x.clone());
        while cur.len() > 1 && horner(&cur, &x).is_zero() {
            cur = deflate(&cur, &x);
        }
    }
    roots.sort();
    Roots::Found(roots)
}

/// Quadratic forms `A a² + B ab + C b²` and their discriminant `B² - 4AC`.
pub fn binary_quadratic_discriminant(a: &Scalar, b: &Scalar, c: &Scalar) -> Scalar {
    &(b * b) - &(&Scalar::from_int(4) * &(a * c))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Poly {
        Poly::var(0)
    }
    fn y() -> Poly {
        Poly::var(1)
    }
    fn c(n: i64) -> Poly {
        Poly::constant(Scalar::from_int(n))
    }

    #[test]
    fn ring_ops() {
        let p = &(&x() + &y()) * &(&x() - &y());
        assert_eq!(p, &x().pow(2) - &y().pow(2));
        assert_eq!(p.total_degree(), 2);
        assert_eq!(p.coeffs_in(0).len(), 3);
        let s = p.substitute(1, &(&x() + &c(1)));
        assert_eq!(s, &(&c(-2) * &x()) - &c(1));
        assert_eq!(p.eval(&[Scalar::from_int(3), Scalar::from_int(2), Scalar::zero(), Scalar::zero(), Scalar::zero(), Scalar::zero(), Scalar::zero(), Scalar::zero(), Scalar::zero(), Scalar::zero()]), Scalar::from_int(5));
    }

    #[test]
    fn fraction_substitution() {
        // x*y - 1 with y := 1/x  ->  x*(1) - x = 0 after clearing
        let p = &(&x() * &y()) - &c(1);
        let q = p.substitute_fraction(1, &c(1), &x());
        assert!(q.is_zero());
    }

    #[test]
    fn exact_division_and_resultant() {
        let p = &(&x() + &y()) * &(&x() - &c(2));
        assert_eq!(p.div_exact(&(&x() - &c(2))), Some(&x() + &y()));
        assert_eq!(p.div_exact(&(&x() - &c(3))), None);
        // x^2 + y^2 - 1 and x - y eliminate x: 2y^2 - 1
        let f = &(&x().pow(2) + &y().pow(2)) - &c(1);
        let g = &x() - &y();
        let r = resultant(&f, &g, 0).unwrap();
        assert_eq!(r.monic(), (&(&c(2) * &y().pow(2)) - &c(1)).monic());
    }

    #[test]
    fn rational_roots() {
        // 2x^3 - 3x^2 - 11x + 6 = (x-3)(2x-1)(x+2)
        let p = &(&(&(&c(2) * &x().pow(3)) - &(&c(3) * &x().pow(2))) - &(&c(11) * &x())) + &c(6);
        let Roots::Found(r) = univariate_roots(&p, 0, Field::Q) else { panic!() };
        assert_eq!(r.len(), 3);
        assert!(r.contains(&Scalar::ratio(1, 2)));
        let sq = &x().pow(2) + &c(1);
        assert_eq!(univariate_roots(&sq, 0, Field::Q), Roots::Found(vec![]));
        let Roots::Found(r) = univariate_roots(&sq, 0, Field::Qi) else { panic!() };
        assert_eq!(r.len(), 2);
        assert!(r.contains(&Scalar::i()));
    }

    #[test]
    fn gaussian_root_of_nonmonic() {
        // (2x - i)(x + 1) = 2x^2 + (2 - i)x - i
        let i = Scalar::i();
        let p = &(&(&c(2) * &x().pow(2)) + &(&Poly::constant(&Scalar::from_int(2) - &i) * &x())) - &Poly::constant(i.clone());
        let Roots::Found(r) = univariate_roots(&p, 0, Field::Qi) else { panic!() };
        assert!(r.contains(&(&i * &Scalar::ratio(1, 2))));
        assert!(r.contains(&Scalar::from_int(-1)));
    }
}
