//! Graded isomorphism search with certificates.
//!
//! The search runs in three stages: cheap invariants (a [`Fingerprint`]),
//! a case-splitting solver for the polynomial system of
//! [`mixed_system`](crate::automorphism::mixed_system), and a bounded-height
//! search over first blocks. Positive answers carry a witness map that is
//! re-verified; negative answers carry the mismatching invariant or the
//! record of the exhausted case split.

use std::collections::{BTreeMap, HashSet};

use num_traits::{Signed, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::GradedLieAlgebra;
use crate::automorphism::{self, discriminant_of, ExtendedMap, GradedMap, PolySystem, Surd};
use crate::cohomology;
use crate::error::{Error, Result};
use crate::extension;
use crate::linalg::{Matrix, Subspace};
use crate::poly::{self, Poly, Roots, MAX_VARS};
use crate::scalar::{field_sqrt, Field, Scalar};
use crate::structure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SearchConfig {
    /// Height bound for guessed values and the brute-force fallback.
    pub height: u32,
    /// Node budget of the case split.
    pub max_nodes: usize,
    /// Resultant steps allowed along one branch.
    pub max_resultants: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            height: 3,
            max_nodes: 20_000,
            max_resultants: 4,
        }
    }
}

/// Invariants of a Carnot algebra under graded isomorphism.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Fingerprint {
    pub field: Field,
    pub dims: Vec<usize>,
    pub lcs_dims: Vec<usize>,
    /// `dim H²_(k)` for `k = 2..=length+1`.
    pub h2_dims: Vec<usize>,
    /// Largest possible dimension of a new top component.
    pub extension_rank: usize,
    pub center_dim: usize,
    pub derived_centralizer_dim: usize,
    /// Gradings grouped by the point of `P(g1)` annihilating them
    /// (shape `dim g1 = 2` only).
    pub kernel_classes: Vec<Vec<usize>>,
    /// Square classes of the quadratic forms `x ↦ [x, [x, g_i]]`.
    pub quadratic_classes: Vec<(usize, String)>,
    /// Pairs `(i, j)`: the kernel point of grading `i` is a zero of the
    /// quadratic form of grading `j`.
    pub kernel_quadric_incidence: Vec<(usize, usize)>,
}

fn proj_normalize(p: [Scalar; 2]) -> Option<[Scalar; 2]> {
    let lead = p.iter().find(|c| !c.is_zero())?.clone();
    let inv = lead.inv()?;
    Some([&p[0] * &inv, &p[1] * &inv])
}

/// Point `(a : b)` of `P(g1)` with `[a x1 + b x2, g_i] = 0`, if unique.
fn kernel_point(g: &GradedLieAlgebra, i: usize) -> Option<[Scalar; 2]> {
    let (di, dn) = (g.component_dim(i), g.component_dim(i + 1));
    if di == 0 || dn == 0 {
        return None;
    }
    let x1 = g.offset(1);
    // rows: (y, out coordinate); columns: x1, x2
    let mut rows = Vec::new();
    for y in g.range(i) {
        let mut col = [vec![Scalar::zero(); dn], vec![Scalar::zero(); dn]];
        for (s, c) in col.iter_mut().enumerate() {
            for (r, v) in g.bracket_basis(x1 + s, y) {
                c[r - g.offset(i + 1)] = v.clone();
            }
        }
        for (a, b) in col[0].iter().zip(&col[1]).take(dn) {
            rows.push(vec![a.clone(), b.clone()]);
        }
    }
    let m = Matrix::from_rows(rows, 2).ok()?;
    if m.rank() != 1 {
        return None;
    }
    let k = crate::linalg::kernel_basis(&m);
    let v = k.basis_vectors().pop()?;
    proj_normalize([v[0].clone(), v[1].clone()])
}

fn quadratic_class(form: &[Scalar; 3], field: Field) -> String {
    if form.iter().all(Scalar::is_zero) {
        return "0".into();
    }
    let (d, _, class) = discriminant_of(form, field);
    if d.is_zero() {
        return "degenerate".into();
    }
    match field {
        Field::Q => class.map_or_else(|| "nonrational".into(), |c| c.to_string()),
        Field::Qi => {
            if d.is_rational() {
                // -1 is a square: only the class of |d| matters
                let abs = Scalar::from_rational(d.re().abs());
                crate::scalar::square_class(abs.re()).map_or_else(|| "nonrational".into(), |c| c.to_string())
            } else if field_sqrt(&d, field).is_some() {
                "1".into()
            } else {
                "nonsquare".into()
            }
        }
    }
}

pub fn fingerprint(g: &GradedLieAlgebra) -> Result<Fingerprint> {
    let st = structure::is_carnot(g);
    if !st.carnot {
        return Err(Error::NotCarnot(g.display_name().to_string()));
    }
    let len = st.length;
    let field = g.field();
    let h2_dims = (2..=len + 1)
        .map(|k| cohomology::h2_slice(g, k).map(|s| s.dim_h2()))
        .collect::<Result<Vec<_>>>()?;
    let ext = extension::is_extendable(g)?;
    let lcs = structure::lcs(g);
    let derived = lcs.terms.get(1).cloned().unwrap_or_else(|| Subspace::zero(g.dim()));
    let mut kernel_classes: Vec<Vec<usize>> = Vec::new();
    let mut quadratic_classes = Vec::new();
    let mut incidence = Vec::new();
    if g.component_dim(1) == 2 {
        let mut points: Vec<([Scalar; 2], Vec<usize>)> = Vec::new();
        let mut kernels: Vec<(usize, [Scalar; 2])> = Vec::new();
        for i in 2..len {
            if let Some(p) = kernel_point(g, i) {
                kernels.push((i, p.clone()));
                match points.iter_mut().find(|(q, _)| *q == p) {
                    Some((_, v)) => v.push(i),
                    None => points.push((p, vec![i])),
                }
            }
        }
        kernel_classes = points.into_iter().map(|(_, v)| v).collect();
        kernel_classes.sort();
        for j in 2..=len.saturating_sub(2) {
            let Ok(form) = automorphism::quadratic_form(g, j) else {
                continue;
            };
            quadratic_classes.push((j, quadratic_class(&form, field)));
            for (i, p) in &kernels {
                let val = &(&(&form[0] * &(&p[0] * &p[0])) + &(&form[1] * &(&p[0] * &p[1]))) + &(&form[2] * &(&p[1] * &p[1]));
                if val.is_zero() {
                    incidence.push((*i, j));
                }
            }
        }
    }
    Ok(Fingerprint {
        field,
        dims: g.dims(),
        lcs_dims: lcs.dims(),
        h2_dims,
        extension_rank: ext.max_new_dim,
        center_dim: structure::center(g).dim(),
        derived_centralizer_dim: structure::centralizer(g, &derived).dim(),
        kernel_classes,
        quadratic_classes,
        kernel_quadric_incidence: incidence,
    })
}

impl Fingerprint {
    pub fn to_json_value(&self) -> Value {
        serde_json::to_value(self).expect("fingerprint serializes")
    }

    /// First field on which the two fingerprints differ.
    pub fn first_difference(&self, other: &Fingerprint) -> Option<(String, String, String)> {
        let (Value::Object(a), Value::Object(b)) = (self.to_json_value(), other.to_json_value()) else {
            unreachable!("fingerprints serialize to objects");
        };
        for (k, va) in &a {
            let vb = &b[k];
            if va != vb {
                return Some((k.clone(), va.to_string(), vb.to_string()));
            }
        }
        None
    }

    /// Stable text key for bucketing.
    pub fn key(&self) -> String {
        self.to_json_value().to_string()
    }
}

/// One exhausted branch of the case split.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BranchRecord {
    pub assumptions: Vec<String>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NonIsoCertificate {
    /// An invariant takes different values.
    Invariant { name: String, left: String, right: String },
    /// Every branch of the normalized case split is infeasible.
    Infeasible { branches: Vec<BranchRecord> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IsoVerdict {
    VerifiedIso(GradedMap),
    VerifiedNonIso(NonIsoCertificate),
    Unknown(String),
}

impl IsoVerdict {
    pub fn kind(&self) -> &'static str {
        match self {
            IsoVerdict::VerifiedIso(_) => "iso",
            IsoVerdict::VerifiedNonIso(_) => "non-iso",
            IsoVerdict::Unknown(_) => "unknown",
        }
    }

    pub fn is_iso(&self) -> bool {
        matches!(self, IsoVerdict::VerifiedIso(_))
    }

    pub fn is_non_iso(&self) -> bool {
        matches!(self, IsoVerdict::VerifiedNonIso(_))
    }

    pub fn to_json_value(&self, field: Field) -> Value {
        match self {
            IsoVerdict::VerifiedIso(f) => json!({
                "verdict": "iso",
                "witness": f.to_json_value(field),
            }),
            IsoVerdict::VerifiedNonIso(NonIsoCertificate::Invariant { name, left, right }) => json!({
                "verdict": "non-iso",
                "certificate": { "kind": "invariant", "invariant": name, "left": left, "right": right },
            }),
            IsoVerdict::VerifiedNonIso(NonIsoCertificate::Infeasible { branches }) => json!({
                "verdict": "non-iso",
                "certificate": { "kind": "infeasible", "branches": branches },
            }),
            IsoVerdict::Unknown(reason) => json!({ "verdict": "unknown", "reason": reason }),
        }
    }
}

// ---------------------------------------------------------------------------
// case-splitting solver

#[derive(Debug, Clone)]
struct State {
    eqs: Vec<Poly>,
    nonzero: Vec<Poly>,
    /// `v = num / den` in elimination order.
    subs: Vec<(usize, Poly, Poly)>,
    eliminated: u32,
    guessed: bool,
    resultants: usize,
    path: Vec<String>,
}

enum Leaf {
    Infeasible(BranchRecord),
    Unknown(String),
}

struct Solver<'a> {
    field: Field,
    nvars: usize,
    names: &'a [String],
    cfg: SearchConfig,
    nodes: usize,
    leaves: Vec<Leaf>,
    /// Stop at the first solution.
    first_only: bool,
    solutions: Vec<Vec<Scalar>>,
}

fn leads_negative(s: &Scalar) -> bool {
    let re = s.re();
    if !re.is_zero() {
        return re.is_negative();
    }
    s.im().is_negative()
}

pub(crate) fn small_values(height: u32, field: Field) -> Vec<Scalar> {
    let h = height.max(1) as i64;
    let mut out = vec![Scalar::zero()];
    let mut push = |s: Scalar| {
        if !out.contains(&s) {
            out.push(s);
        }
    };
    for num in 1..=h {
        for den in 1..=h {
            push(Scalar::ratio(num, den));
            push(Scalar::ratio(-num, den));
        }
    }
    if field == Field::Qi {
        let base: Vec<Scalar> = out.clone();
        for s in base {
            if !s.is_zero() {
                out.push(&s * &Scalar::i());
            }
        }
    }
    // small heights first
    out.sort_by(|a, b| a.height().cmp(&b.height()).then(a.cmp(b)));
    out
}

impl<'a> Solver<'a> {
    fn name(&self, v: usize) -> &str {
        self.names.get(v).map_or("?", String::as_str)
    }

    fn render(&self, p: &Poly) -> String {
        let names: Vec<&str> = self.names.iter().map(String::as_str).collect();
        p.fmt_with(&names)
    }

    fn known_nonzero_vars(st: &State) -> u32 {
        let mut mask = 0;
        for p in &st.nonzero {
            if p.num_terms() == 1 {
                mask |= p.vars();
            }
        }
        mask
    }

    /// Normalizes the state; `Err` carries the infeasibility reason.
    fn simplify(&self, st: &mut State) -> std::result::Result<(), String> {
        let mut nz = Vec::new();
        let mut seen = HashSet::new();
        for p in &st.nonzero {
            if let Some(c) = p.as_constant() {
                if c.is_zero() {
                    return Err("det(A) or an assumed-nonzero divisor becomes 0".into());
                }
                continue;
            }
            let m = p.monic();
            if seen.insert(m.clone()) {
                nz.push(m);
            }
        }
        st.nonzero = nz;
        let known = Self::known_nonzero_vars(st);
        let mut eqs = Vec::new();
        let mut seen = HashSet::new();
        for e in &st.eqs {
            if e.is_zero() {
                continue;
            }
            if let Some(c) = e.as_constant() {
                return Err(format!("derived equation {} = 0", c.to_field_string(self.field)));
            }
            let content = e.monomial_content();
            let mut div = [0u16; MAX_VARS];
            for v in 0..MAX_VARS {
                if known & (1 << v) != 0 {
                    div[v] = content[v];
                }
            }
            let mut e = e.div_monomial(&div);
            for n in st.nonzero.iter().filter(|n| n.num_terms() > 1) {
                while let Some(q) = e.div_exact(n) {
                    e = q;
                }
            }
            let e = e.monic();
            if let Some(c) = e.as_constant() {
                if !c.is_zero() {
                    return Err("an equation reduces to a nonzero monomial in nonzero variables".into());
                }
                continue;
            }
            if st.nonzero.contains(&e) {
                return Err(format!("{} = 0 contradicts {} != 0", self.render(&e), self.render(&e)));
            }
            if seen.insert(e.clone()) {
                eqs.push(e);
            }
        }
        eqs.sort_by_key(|e| (e.total_degree(), e.num_terms()));
        st.eqs = eqs;
        Ok(())
    }

    fn apply_sub(st: &mut State, v: usize, num: Poly, den: Poly) {
        let plain = den.as_constant().is_some_and(|c| c.is_one());
        let subst = |p: &Poly| {
            if p.degree_in(v) == 0 {
                p.clone()
            } else if plain {
                p.substitute(v, &num)
            } else {
                p.substitute_fraction(v, &num, &den)
            }
        };
        st.eqs = st.eqs.iter().map(subst).collect();
        st.nonzero = st.nonzero.iter().map(subst).collect();
        for s in st.subs.iter_mut() {
            // scale numerator and denominator by the same power of `den`
            let (dn, dd) = (s.1.degree_in(v), s.2.degree_in(v));
            let top = dn.max(dd);
            s.1 = &subst(&s.1) * &den.pow((top - dn) as u32);
            s.2 = &subst(&s.2) * &den.pow((top - dd) as u32);
        }
        if !plain {
            st.nonzero.push(den.clone());
        }
        st.subs.push((v, num, den));
        st.eliminated |= 1 << v;
    }

    fn finalize(&mut self, st: &State) -> Option<Vec<Scalar>> {
        let free: Vec<usize> = (0..self.nvars).filter(|v| st.eliminated & (1 << v) == 0).collect();
        let vals = small_values(self.cfg.height, self.field);
        let cap = vals.len().min(7);
        let total = cap.saturating_pow(free.len() as u32).min(FINALIZE_LIMIT);
        for idx in 0..total {
            let mut x = vec![Scalar::zero(); MAX_VARS];
            let mut rest = idx;
            for &v in &free {
                x[v] = vals[rest % cap].clone();
                rest /= cap;
            }
            if st.nonzero.iter().any(|p| p.eval(&x).is_zero()) {
                continue;
            }
            // back-substitute in reverse elimination order
            let mut ok = true;
            for (v, num, den) in st.subs.iter().rev() {
                let d = den.eval(&x);
                let Some(di) = d.inv() else {
                    ok = false;
                    break;
                };
                x[*v] = &num.eval(&x) * &di;
            }
            if ok {
                return Some(x);
            }
        }
        None
    }

    fn branch(&mut self, st: &State, label: String, f: impl FnOnce(&mut State)) {
        let mut child = st.clone();
        child.path.push(label);
        f(&mut child);
        self.run(child);
    }

    fn done(&self) -> bool {
        self.first_only && !self.solutions.is_empty()
    }

    fn run(&mut self, mut st: State) {
        if self.done() {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.cfg.max_nodes {
            self.leaves.push(Leaf::Unknown("node budget exhausted".into()));
            return;
        }
        if let Err(reason) = self.simplify(&mut st) {
            if st.guessed {
                self.leaves.push(Leaf::Unknown(format!("guessed branch failed: {reason}")));
            } else {
                self.leaves.push(Leaf::Infeasible(BranchRecord {
                    assumptions: st.path.clone(),
                    reason,
                }));
            }
            return;
        }
        if st.eqs.is_empty() {
            match self.finalize(&st) {
                Some(x) => self.solutions.push(x),
                None => self.leaves.push(Leaf::Unknown("no small point avoids the nonzero conditions".into())),
            }
            return;
        }
        // linear with a constant coefficient
        let mut best: Option<(usize, usize, usize)> = None;
        for (ei, e) in st.eqs.iter().enumerate() {
            for v in 0..self.nvars {
                if e.degree_in(v) != 1 {
                    continue;
                }
                let cs = e.coeffs_in(v);
                if cs[1].as_constant().is_some() && best.is_none_or(|b| e.num_terms() < b.2) {
                    best = Some((ei, v, e.num_terms()));
                }
            }
        }
        if let Some((ei, v, _)) = best {
            let cs = st.eqs[ei].coeffs_in(v);
            let c = cs[1].as_constant().unwrap();
            let num = cs[0].scale(&-c.inv().unwrap());
            let label = format!("{} := {}", self.name(v), self.render(&num));
            let mut child = st;
            child.path.push(label);
            Self::apply_sub(&mut child, v, num, Poly::one());
            self.run(child);
            return;
        }
        // univariate
        if let Some((ei, v)) = st.eqs.iter().enumerate().find_map(|(i, e)| e.univariate_var().map(|v| (i, v))) {
            let e = st.eqs[ei].clone();
            match poly::univariate_roots(&e, v, self.field) {
                Roots::TooLarge => self.leaves.push(Leaf::Unknown(format!(
                    "coefficients of {} = 0 too large for the root search",
                    self.render(&e)
                ))),
                Roots::Found(roots) if roots.is_empty() => {
                    let reason = self.no_root_reason(&e, v);
                    if st.guessed {
                        self.leaves.push(Leaf::Unknown(format!("guessed branch failed: {reason}")));
                    } else {
                        self.leaves.push(Leaf::Infeasible(BranchRecord {
                            assumptions: st.path.clone(),
                            reason,
                        }));
                    }
                }
                Roots::Found(mut roots) => {
                    roots.sort_by_key(|r| (r.height(), leads_negative(r)));
                    for r in roots {
                        let label = format!("{} := {}", self.name(v), r.to_field_string(self.field));
                        self.branch(&st, label, |c| Self::apply_sub(c, v, Poly::constant(r.clone()), Poly::one()));
                        if self.done() {
                            return;
                        }
                    }
                }
            }
            return;
        }
        // monomial factor
        let known = Self::known_nonzero_vars(&st);
        if let Some(ei) = st.eqs.iter().position(|e| e.monomial_content().iter().any(|&k| k > 0)) {
            let e = st.eqs[ei].clone();
            let content = e.monomial_content();
            let vars: Vec<usize> = (0..MAX_VARS).filter(|&v| content[v] > 0 && known & (1 << v) == 0).collect();
            for &v in &vars {
                let label = format!("{} = 0", self.name(v));
                self.branch(&st, label, |c| Self::apply_sub(c, v, Poly::zero(), Poly::one()));
                if self.done() {
                    return;
                }
            }
            let label = format!("{} != 0", vars.iter().map(|&v| self.name(v).to_string()).collect::<Vec<_>>().join(", "));
            self.branch(&st, label, |c| {
                for &v in &vars {
                    c.nonzero.push(Poly::var(v));
                }
                c.eqs[ei] = e.div_monomial(&content);
            });
            return;
        }
        // common factor of the coefficients in one variable: e = c * r
        if let Some((ei, c, r)) = self.content_split(&st) {
            let label = format!("{} = 0", self.render(&c));
            self.branch(&st, label, |ch| ch.eqs[ei] = c.clone());
            if self.done() {
                return;
            }
            let label = format!("{} = 0", self.render(&r));
            self.branch(&st, label, |ch| ch.eqs[ei] = r.clone());
            return;
        }
        // linear with a polynomial coefficient
        let mut best: Option<(usize, usize, (usize, usize))> = None;
        for (ei, e) in st.eqs.iter().enumerate() {
            for v in 0..self.nvars {
                if e.degree_in(v) != 1 {
                    continue;
                }
                let cs = e.coeffs_in(v);
                let key = (cs[1].num_terms(), e.num_terms());
                if best.as_ref().is_none_or(|b| key < b.2) {
                    best = Some((ei, v, key));
                }
            }
        }
        if let Some((ei, v, _)) = best {
            let cs = st.eqs[ei].coeffs_in(v);
            let (p, q) = (cs[1].clone(), cs[0].clone());
            let label = format!("{} != 0, {} := -({})/({})", self.render(&p), self.name(v), self.render(&q), self.render(&p));
            self.branch(&st, label, |c| {
                c.eqs.remove(ei);
                c.nonzero.push(p.clone());
                Self::apply_sub(c, v, -&q, p.clone());
            });
            if self.done() {
                return;
            }
            let label = format!("{} = 0", self.render(&p));
            self.branch(&st, label, |c| {
                c.eqs[ei] = q.clone();
                c.eqs.push(p.clone());
            });
            return;
        }
        // eliminate a variable between two equations
        if st.resultants < self.cfg.max_resultants {
            if let Some(res) = self.try_resultant(&st) {
                let mut child = st;
                child.resultants += 1;
                child.eqs.push(res);
                self.run(child);
                return;
            }
        }
        // bounded guessing
        let v = (0..self.nvars)
            .filter(|&v| st.eliminated & (1 << v) == 0)
            .max_by_key(|&v| st.eqs.iter().filter(|e| e.degree_in(v) > 0).count())
            .expect("equations mention some variable");
        for val in small_values(self.cfg.height, self.field) {
            let label = format!("guess {} := {}", self.name(v), val.to_field_string(self.field));
            self.branch(&st, label, |c| {
                c.guessed = true;
                Self::apply_sub(c, v, Poly::constant(val.clone()), Poly::one());
            });
            if self.done() {
                return;
            }
        }
    }

    /// Finds `e = c * r` where `c` is a non-constant coefficient of `e` in
    /// some variable dividing all the others.
    fn content_split(&self, st: &State) -> Option<(usize, Poly, Poly)> {
        for (ei, e) in st.eqs.iter().enumerate() {
            for v in 0..self.nvars {
                if e.degree_in(v) == 0 {
                    continue;
                }
                let cs: Vec<Poly> = e.coeffs_in(v).into_iter().filter(|c| !c.is_zero()).collect();
                let Some(c) = cs.iter().min_by_key(|c| (c.num_terms(), c.total_degree())) else {
                    continue;
                };
                if c.as_constant().is_some() {
                    continue;
                }
                let c = c.monic();
                if cs.iter().all(|x| x.div_exact(&c).is_some()) {
                    let r = e.div_exact(&c)?;
                    return Some((ei, c, r));
                }
            }
        }
        None
    }

    fn try_resultant(&self, st: &State) -> Option<Poly> {
        let mut best: Option<Poly> = None;
        for v in 0..self.nvars {
            let with: Vec<&Poly> = st.eqs.iter().filter(|e| e.degree_in(v) > 0).collect();
            for i in 0..with.len() {
                for j in i + 1..with.len() {
                    let Some(r) = poly::resultant(with[i], with[j], v) else {
                        continue;
                    };
                    if r.is_zero() {
                        continue;
                    }
                    let r = r.monic();
                    if st.eqs.contains(&r) {
                        continue;
                    }
                    let better = best
                        .as_ref()
                        .is_none_or(|b| (r.vars().count_ones(), r.num_terms()) < (b.vars().count_ones(), b.num_terms()));
                    if better {
                        best = Some(r);
                    }
                }
            }
        }
        best
    }

    fn no_root_reason(&self, e: &Poly, v: usize) -> String {
        let cs = e.coeffs_in(v);
        if cs.len() == 3 && cs[1].is_zero() {
            // A v² + C = 0  ⇔  v² = -C/A
            let a = cs[2].as_constant().unwrap();
            let c = cs[0].as_constant().unwrap();
            let rhs = &(-&c) * &a.inv().unwrap();
            return format!(
                "{}^2 = {} has no solution in {}",
                self.name(v),
                rhs.to_field_string(self.field),
                self.field
            );
        }
        if cs.len() == 3 {
            // complete the square: (2A v + B)² = B² - 4AC
            let (a, b, c) = (
                cs[2].as_constant().unwrap(),
                cs[1].as_constant().unwrap(),
                cs[0].as_constant().unwrap(),
            );
            let d = poly::binary_quadratic_discriminant(&a, &b, &c);
            return format!(
                "t^2 = {} with t = 2*({})*{} + ({}) has no solution in {}",
                d.to_field_string(self.field),
                a.to_field_string(self.field),
                self.name(v),
                b.to_field_string(self.field),
                self.field
            );
        }
        format!("{} = 0 has no root in {}", self.render(e), self.field)
    }
}

enum SolveOutcome {
    Solution(Vec<Scalar>),
    Infeasible(Vec<BranchRecord>),
    Unknown(String),
}

/// A system for the case split: equations, nonzero conditions, variable names.
struct Problem {
    eqs: Vec<Poly>,
    nonzero: Vec<Poly>,
    names: Vec<String>,
    nvars: usize,
}

impl Problem {
    fn of(sys: &PolySystem) -> Self {
        Problem {
            eqs: sys.equations.clone(),
            nonzero: vec![sys.det.clone()],
            names: sys.var_names.clone(),
            nvars: sys.q * sys.q,
        }
    }

    /// Start state with variables fixed to constants; `note` tags the path entry.
    fn state(&self, fixes: &[(usize, Scalar, &str)]) -> State {
        let mut st = State {
            eqs: self.eqs.clone(),
            nonzero: self.nonzero.clone(),
            subs: Vec::new(),
            eliminated: 0,
            guessed: false,
            resultants: 0,
            path: Vec::new(),
        };
        for (v, val, note) in fixes {
            st.path.push(format!("{} = {}{note}", self.names[*v], val));
            Solver::apply_sub(&mut st, *v, Poly::constant(val.clone()), Poly::one());
        }
        st
    }

    /// Runs the case split from each start state in turn, stopping at the
    /// first solution.
    fn solve(&self, field: Field, cfg: SearchConfig, starts: Vec<State>) -> SolveOutcome {
        let mut solver = Solver {
            field,
            nvars: self.nvars,
            names: &self.names,
            cfg,
            nodes: 0,
            leaves: Vec::new(),
            first_only: true,
            solutions: Vec::new(),
        };
        for st in starts {
            solver.run(st);
            if let Some(x) = solver.solutions.first() {
                return SolveOutcome::Solution(x.clone());
            }
        }
        let mut records = Vec::new();
        for leaf in solver.leaves {
            match leaf {
                Leaf::Unknown(r) => return SolveOutcome::Unknown(r),
                Leaf::Infeasible(b) => records.push(b),
            }
        }
        SolveOutcome::Infeasible(records)
    }
}

/// Points tried when completing a solution with free variables.
const FINALIZE_LIMIT: usize = 4096;

const HOMOTHETY: &str = " (homothety)";

/// Runs the case split over the homothety-normalized branches: the first
/// nonzero entry of the first column of `A` is scaled to one.
fn solve_iso_system(sys: &PolySystem, field: Field, cfg: SearchConfig) -> SolveOutcome {
    let problem = Problem::of(sys);
    let starts = (0..sys.q)
        .map(|lead| {
            let mut fixes: Vec<(usize, Scalar, &str)> =
                (0..lead).map(|r| (sys.entry_var(r, 0), Scalar::zero(), "")).collect();
            fixes.push((sys.entry_var(lead, 0), Scalar::one(), HOMOTHETY));
            problem.state(&fixes)
        })
        .collect();
    problem.solve(field, cfg, starts)
}

/// Outcome of a search over a quadratic extension `F(√d)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExtensionVerdict {
    Iso(ExtendedMap),
    /// No isomorphism over `F(√d)`: every branch of the case split closed.
    NonIso(Vec<BranchRecord>),
    Unknown(String),
}

/// An isomorphism multiplies each discriminant of [`automorphism::quadratic_form`]
/// by a square, so every ratio must be a square of `F(√d)`: `r` or `r·d`
/// is a square of `F`.
fn discriminant_obstruction(g: &GradedLieAlgebra, h: &GradedLieAlgebra, d: &Scalar) -> Option<String> {
    let field = g.field();
    if g.component_dim(1) != 2 {
        return None;
    }
    for j in 2..=g.length().saturating_sub(2) {
        let (Ok(fg), Ok(fh)) = (automorphism::quadratic_form(g, j), automorphism::quadratic_form(h, j)) else {
            continue;
        };
        let (dg, dh) = (discriminant_of(&fg, field).0, discriminant_of(&fh, field).0);
        if dg.is_zero() != dh.is_zero() {
            return Some(format!("discriminants at grading {j} differ in vanishing"));
        }
        if dg.is_zero() {
            continue;
        }
        let r = &dg / &dh;
        if field_sqrt(&r, field).is_none() && field_sqrt(&(&r * d), field).is_none() {
            return Some(format!(
                "discriminant ratio {} at grading {j} is not a square in {field}(sqrt({}))",
                r.to_field_string(field),
                d.to_field_string(field)
            ));
        }
    }
    None
}

/// Graded isomorphism search over `F(√d)` for a non-square `d` of the
/// common field `F`. Writing each entry of the first block as `u + w·√d`
/// turns the system into one over `F` in twice as many unknowns.
pub fn iso_over_extension(g: &GradedLieAlgebra, h: &GradedLieAlgebra, d: &Scalar, cfg: SearchConfig) -> Result<ExtensionVerdict> {
    g.field().check_same(h.field())?;
    if field_sqrt(d, g.field()).is_some() {
        return Err(Error::InvalidParameter(format!(
            "{} is a square in {}",
            d.to_field_string(g.field()),
            g.field()
        )));
    }
    if g.dims() != h.dims() {
        return Ok(ExtensionVerdict::NonIso(Vec::new()));
    }
    if let Some(reason) = discriminant_obstruction(g, h, d) {
        return Ok(ExtensionVerdict::NonIso(vec![BranchRecord {
            assumptions: Vec::new(),
            reason,
        }]));
    }
    let q = g.component_dim(1);
    let s_var = 2 * q * q;
    if s_var >= MAX_VARS {
        return Ok(ExtensionVerdict::Unknown(format!("dim g1 = {q} is too large for the extension solver")));
    }
    let sys = automorphism::mixed_system(g, h)?;
    let images: Vec<Poly> = (0..q * q)
        .map(|k| &Poly::var(2 * k) + &(&Poly::var(2 * k + 1) * &Poly::var(s_var)))
        .collect();
    let split = |p: &Poly| -> [Poly; 2] {
        let mut cs = p.compose(&images).reduce_square(s_var, d).coeffs_in(s_var);
        cs.resize(2, Poly::zero());
        [cs[0].clone(), cs[1].clone()]
    };
    let mut eqs = Vec::new();
    for e in &sys.equations {
        // det A != 0, so its factors can go before the split
        let mut e = e.clone();
        while let Some(r) = e.div_exact(&sys.det) {
            e = r;
        }
        eqs.extend(split(&e).into_iter().filter(|p| !p.is_zero()));
    }
    let [d0, d1] = split(&sys.det);
    let norm = &(&d0 * &d0) - (&(&d1 * &d1).scale(d));
    let mut names = Vec::new();
    for k in 0..q * q {
        let (r, c) = (k / q + 1, k % q + 1);
        names.push(format!("u{r}{c}"));
        names.push(format!("w{r}{c}"));
    }
    let problem = Problem {
        eqs,
        nonzero: vec![norm],
        names,
        nvars: 2 * q * q,
    };
    let entry = |r: usize, c: usize| 2 * (r * q + c);
    let starts = (0..q)
        .map(|lead| {
            let mut fixes: Vec<(usize, Scalar, &str)> = Vec::new();
            for r in 0..lead {
                fixes.push((entry(r, 0), Scalar::zero(), ""));
                fixes.push((entry(r, 0) + 1, Scalar::zero(), ""));
            }
            fixes.push((entry(lead, 0), Scalar::one(), HOMOTHETY));
            fixes.push((entry(lead, 0) + 1, Scalar::zero(), HOMOTHETY));
            problem.state(&fixes)
        })
        .collect();
    match problem.solve(g.field(), cfg, starts) {
        SolveOutcome::Solution(x) => {
            let a: Vec<Vec<Surd>> = (0..q)
                .map(|r| (0..q).map(|c| Surd::new(x[entry(r, c)].clone(), x[entry(r, c) + 1].clone())).collect())
                .collect();
            Ok(match automorphism::verify_extended(g, h, d, &a)? {
                Some(m) => ExtensionVerdict::Iso(m),
                None => ExtensionVerdict::Unknown("solver point failed re-verification".into()),
            })
        }
        SolveOutcome::Infeasible(b) => Ok(ExtensionVerdict::NonIso(b)),
        SolveOutcome::Unknown(r) => Ok(ExtensionVerdict::Unknown(r)),
    }
}

/// Parametric description of the graded automorphisms found by the case
/// split, sampled at small values: a list of first blocks.
pub fn sample_automorphisms(g: &GradedLieAlgebra, cfg: SearchConfig, limit: usize) -> Result<Vec<GradedMap>> {
    let sys = automorphism::constraint_system(g)?;
    let q = sys.q;
    let names = sys.var_names.clone();
    let mut solver = Solver {
        field: g.field(),
        nvars: q * q,
        names: &names,
        cfg,
        nodes: 0,
        leaves: Vec::new(),
        first_only: false,
        solutions: Vec::new(),
    };
    solver.run(Problem::of(&sys).state(&[]));
    let mut out: Vec<GradedMap> = Vec::new();
    fn push(out: &mut Vec<GradedMap>, m: GradedMap) {
        if !out.contains(&m) {
            out.push(m);
        }
    }
    for x in &solver.solutions {
        if let Ok(Ok(f)) = automorphism::propagate(g, &sys.matrix(x)) {
            if f.is_isomorphism(g, g) {
                push(&mut out, f);
            }
        }
    }
    // homotheties and sign changes always belong to the group
    for a in [Scalar::from_int(-1), Scalar::from_int(2)] {
        push(&mut out, GradedMap::homothety(g, &a));
    }
    // brute-force small first blocks for extra generators
    let vals = [Scalar::zero(), Scalar::one(), -Scalar::one(), Scalar::from_int(2)];
    if q == 2 {
        'outer: for a in &vals {
            for b in &vals {
                for c in &vals {
                    for d in &vals {
                        if out.len() >= limit {
                            break 'outer;
                        }
                        let m = Matrix::from_rows(vec![vec![a.clone(), b.clone()], vec![c.clone(), d.clone()]], 2)?;
                        if m.rank() < 2 {
                            continue;
                        }
                        if let Ok(Ok(f)) = automorphism::propagate(g, &m) {
                            push(&mut out, f);
                        }
                    }
                }
            }
        }
    }
    out.truncate(limit.max(1));
    Ok(out)
}

fn brute_force(g: &GradedLieAlgebra, h: &GradedLieAlgebra, cfg: SearchConfig) -> Result<Option<GradedMap>> {
    let q = g.component_dim(1);
    if q != 2 {
        return Ok(None);
    }
    let vals = small_values(cfg.height, g.field());
    for lead in 0..2 {
        for x in &vals {
            for y in &vals {
                for z in &vals {
                    let m = if lead == 0 {
                        Matrix::from_rows(vec![vec![Scalar::one(), x.clone()], vec![y.clone(), z.clone()]], 2)?
                    } else {
                        if !y.is_zero() {
                            continue;
                        }
                        Matrix::from_rows(vec![vec![Scalar::zero(), x.clone()], vec![Scalar::one(), z.clone()]], 2)?
                    };
                    if m.rank() < 2 {
                        continue;
                    }
                    if let Ok(f) = automorphism::propagate_to(g, h, &m)? {
                        if f.is_isomorphism(g, h) {
                            return Ok(Some(f));
                        }
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Graded isomorphism search between two Carnot algebras over their common field.
pub fn iso_search(g: &GradedLieAlgebra, h: &GradedLieAlgebra, cfg: SearchConfig) -> Result<IsoVerdict> {
    g.field().check_same(h.field())?;
    for a in [g, h] {
        if !structure::is_carnot(a).carnot {
            return Err(Error::NotCarnot(a.display_name().to_string()));
        }
    }
    if g.dims() != h.dims() {
        return Ok(IsoVerdict::VerifiedNonIso(NonIsoCertificate::Invariant {
            name: "dims".into(),
            left: format!("{:?}", g.dims()),
            right: format!("{:?}", h.dims()),
        }));
    }
    let (fg, fh) = (fingerprint(g)?, fingerprint(h)?);
    if let Some((name, left, right)) = fg.first_difference(&fh) {
        return Ok(IsoVerdict::VerifiedNonIso(NonIsoCertificate::Invariant { name, left, right }));
    }
    iso_search_unchecked(g, h, cfg)
}

/// [`iso_search`] without the fingerprint stage (for callers that have
/// already compared fingerprints).
pub fn iso_search_unchecked(g: &GradedLieAlgebra, h: &GradedLieAlgebra, cfg: SearchConfig) -> Result<IsoVerdict> {
    let q = g.component_dim(1);
    if g.length() == 1 {
        return Ok(IsoVerdict::VerifiedIso(GradedMap::identity(g)));
    }
    if let Ok(f) = automorphism::propagate_to(g, h, &Matrix::identity(q))? {
        if f.is_isomorphism(g, h) {
            return Ok(IsoVerdict::VerifiedIso(f));
        }
    }
    let mut unknown_reason = String::from("dim g1 too large for the solver");
    if q * q < MAX_VARS {
        let sys = automorphism::mixed_system(g, h)?;
        match solve_iso_system(&sys, g.field(), cfg) {
            SolveOutcome::Solution(x) => {
                let a = sys.matrix(&x);
                if let Ok(f) = automorphism::propagate_to(g, h, &a)? {
                    if f.is_isomorphism(g, h) {
                        return Ok(IsoVerdict::VerifiedIso(f));
                    }
                }
                unknown_reason = "solver point failed re-verification".into();
            }
            SolveOutcome::Infeasible(branches) => {
                return Ok(IsoVerdict::VerifiedNonIso(NonIsoCertificate::Infeasible { branches }));
            }
            SolveOutcome::Unknown(r) => unknown_reason = r,
        }
    }
    if let Some(f) = brute_force(g, h, cfg)? {
        return Ok(IsoVerdict::VerifiedIso(f));
    }
    Ok(IsoVerdict::Unknown(unknown_reason))
}

/// Whether `g` is isomorphic to the associated graded algebra of its lower
/// central series.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NaturalGrading {
    /// `None` when the question stays open.
    pub natural: Option<bool>,
    pub reason: String,
}

/// Ungraded invariants: dims of the lower central series, of the derived
/// series and of the centralizers of the lower central series terms.
fn ungraded_invariants(g: &GradedLieAlgebra) -> BTreeMap<&'static str, Vec<usize>> {
    let lcs = structure::lcs(g);
    let mut out = BTreeMap::new();
    out.insert("dim", vec![g.dim()]);
    out.insert("lcs", lcs.dims());
    out.insert(
        "lcs centralizers",
        lcs.terms.iter().map(|t| structure::centralizer(g, t).dim()).collect(),
    );
    // derived series
    let mut ds = vec![Subspace::full(g.dim())];
    loop {
        let last = ds.last().unwrap();
        let mut vecs = Vec::new();
        let b = last.basis_vectors();
        for i in 0..b.len() {
            for j in i + 1..b.len() {
                vecs.push(g.bracket_vec(&b[i], &b[j]));
            }
        }
        let next = Subspace::span(g.dim(), vecs).unwrap();
        let stop = next.dim() == 0 || next.dim() == last.dim();
        ds.push(next);
        if stop {
            break;
        }
    }
    out.insert("derived series", ds.iter().map(Subspace::dim).collect());
    out
}

/// Tries the identity lift `gr(g) → g` sending each quotient representative
/// back to the vector it was taken from, perturbing the generators by small
/// multiples of `[g, g]` vectors.
fn regrading_search(g: &GradedLieAlgebra, gr: &GradedLieAlgebra) -> Result<bool> {
    let lcs = structure::lcs(g);
    let n = g.dim();
    let reps: Vec<Vec<Scalar>> = {
        let mut acc = lcs.terms[1].clone();
        let mut chosen = Vec::new();
        for v in lcs.terms[0].basis_vectors() {
            let grown = acc.sum(&Subspace::span(n, vec![v.clone()])?)?;
            if grown.dim() > acc.dim() {
                acc = grown;
                chosen.push(v);
            }
        }
        chosen
    };
    let derived = lcs.terms[1].basis_vectors();
    let pres = automorphism::presentation(gr)?;
    let coeffs = [Scalar::zero(), Scalar::one(), -Scalar::one()];
    // perturbation of each generator by one derived basis vector at a time
    let mut options: Vec<Vec<Vec<Scalar>>> = Vec::new();
    for r in &reps {
        let mut opts = vec![r.clone()];
        for d in &derived {
            for c in &coeffs[1..] {
                opts.push(r.iter().zip(d).map(|(a, b)| a + &(c * b)).collect());
            }
        }
        options.push(opts);
    }
    let total: usize = options.iter().map(Vec::len).product();
    for idx in 0..total.min(50_000) {
        let mut rest = idx;
        let gens: Vec<Vec<Scalar>> = options
            .iter()
            .map(|o| {
                let v = o[rest % o.len()].clone();
                rest /= o.len();
                v
            })
            .collect();
        // images of the gr basis in g through the presentation
        let mut images: Vec<Vec<Scalar>> = gens;
        for step in &pres.steps {
            let brackets: Vec<Vec<Scalar>> = step
                .pairs
                .iter()
                .map(|&(x, y)| g.bracket_vec(&images[x], &images[y]))
                .collect();
            for k in 0..step.pairs.len() {
                let mut v = vec![Scalar::zero(); n];
                for (r, b) in brackets.iter().enumerate() {
                    let m = &step.inverse[(k, r)];
                    for (t, bt) in b.iter().enumerate() {
                        v[t] += &(m * bt);
                    }
                }
                images.push(v);
            }
        }
        if Matrix::from_rows(images.clone(), n)?.rank() < n {
            continue;
        }
        let mut ok = true;
        'pairs: for p in 0..n {
            for s in p + 1..n {
                let mut lhs = vec![Scalar::zero(); n];
                for (r, c) in gr.bracket_basis(p, s) {
                    for (t, v) in images[*r].iter().enumerate() {
                        lhs[t] += &(c * v);
                    }
                }
                if lhs != g.bracket_vec(&images[p], &images[s]) {
                    ok = false;
                    break 'pairs;
                }
            }
        }
        if ok {
            return Ok(true);
        }
    }
    Ok(false)
}

pub fn is_naturally_graded(g: &GradedLieAlgebra, cfg: SearchConfig) -> Result<NaturalGrading> {
    let gr = structure::associated_graded(g)?;
    if structure::is_carnot(g).carnot {
        return Ok(match iso_search(g, &gr, cfg)? {
            IsoVerdict::VerifiedIso(_) => NaturalGrading {
                natural: Some(true),
                reason: "Carnot grading; graded isomorphism with gr(g) verified".into(),
            },
            IsoVerdict::VerifiedNonIso(_) => NaturalGrading {
                natural: Some(false),
                reason: "no graded isomorphism with gr(g)".into(),
            },
            IsoVerdict::Unknown(r) => NaturalGrading {
                natural: None,
                reason: r,
            },
        });
    }
    let (a, b) = (ungraded_invariants(g), ungraded_invariants(&gr));
    for (k, va) in &a {
        if b.get(k) != Some(va) {
            return Ok(NaturalGrading {
                natural: Some(false),
                reason: format!("{k}: {va:?} for g vs {:?} for gr(g)", b.get(k).cloned().unwrap_or_default()),
            });
        }
    }
    if regrading_search(g, &gr)? {
        return Ok(NaturalGrading {
            natural: Some(true),
            reason: "an isomorphism gr(g) → g was found by lifting quotient representatives".into(),
        });
    }
    Ok(NaturalGrading {
        natural: None,
        reason: "ungraded invariants agree and no lift was found".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{self, LoopForm};

    #[test]
    fn loop_forms_over_q_and_qi() {
        let p = catalog::n1_loop(LoopForm::Plus, 6, Field::Q).unwrap();
        let m = catalog::n1_loop(LoopForm::Minus, 6, Field::Q).unwrap();
        let v = iso_search(&p, &m, SearchConfig::default()).unwrap();
        assert!(v.is_non_iso(), "{v:?}");
        let (pi, mi) = (p.base_change(Field::Qi).unwrap(), m.base_change(Field::Qi).unwrap());
        let v = iso_search(&pi, &mi, SearchConfig::default()).unwrap();
        assert!(v.is_iso(), "{v:?}");
    }

    #[test]
    fn self_iso() {
        for g in [
            catalog::m0(6, Field::Q).unwrap(),
            catalog::n2(6, Field::Q).unwrap(),
            catalog::n1_table(6, Field::Q).unwrap(),
        ] {
            assert!(iso_search(&g, &g, SearchConfig::default()).unwrap().is_iso());
        }
    }

    #[test]
    fn natural_gradings() {
        let cfg = SearchConfig::default();
        for len in [4, 5] {
            let w = catalog::wplus(len, Field::Q).unwrap();
            assert_eq!(is_naturally_graded(&w, cfg).unwrap().natural, Some(false));
            let m = catalog::m2(len, Field::Q).unwrap();
            assert_eq!(is_naturally_graded(&m, cfg).unwrap().natural, Some(false));
        }
        let g = catalog::m0(6, Field::Q).unwrap();
        assert_eq!(is_naturally_graded(&g, cfg).unwrap().natural, Some(true));
    }
}
