//! Named algebras, always built in their natural grading and truncated at
//! a given Carnot length.
//!
//! | name | basis | relations |
//! |------|-------|-----------|
//! | `m0(L)` | `e1..e{L+1}`, `g1 = <e1,e2>` | `[e1,ei] = e{i+1}` |
//! | `m0S(L, S)` | `m0(L)` plus `z_r`, `r ∈ S` | `[e_l, e_{r-l+2}] = (-1)^{l+1} z_r` |
//! | `n1(L)` | width-one mod-3 table | `[ei,ej] = c_{ij} e_{i+j}` |
//! | `n1plus(L)`, `n1minus(L)` | `u⊗t^{odd}, v⊗t^{odd}, w⊗t^{even}` | loop brackets of so(3), so(1,2) |
//! | `n2(L)` | width-one mod-8 table | `[eq,el] = d_{ql} e_{q+l}` |
//! | `n2_3(L)` | `n2(L)` plus central `z` in grading 3 | `[e2,e3] = z` |
//! | `m1(m)`, `m03(m, S)` | non-extendable families | see their constructors |
//! | `wplus(L)`, `m2(L)` | width-one gradings | not naturally graded |
//!
//! Every constructor checks the Jacobi identity before returning.

use std::collections::BTreeSet;
use std::fmt;

use crate::algebra::{AlgebraBuilder, BasisRef, GradedLieAlgebra};
use crate::error::{Error, Result};
use crate::scalar::{Field, Scalar};

/// Structure constants of the width-one mod-8 table: row `q mod 8`,
/// column `l mod 8`.
///
/// The entries at (5, 7) and (7, 5) are `+1` and `-1`. With the opposite
/// signs the Jacobi identity fails on `(e1, e4, e7)`; this is the only
/// single-entry change of the table that satisfies it everywhere.
pub const N2_TABLE: [[i64; 8]; 8] = [
    [0, 1, -2, -1, 0, 1, 2, -1],
    [-1, 0, 1, 1, -3, -2, 0, 1],
    [2, -1, 0, 0, 0, 1, -1, 0],
    [1, -1, 0, 0, 3, -1, 1, -2],
    [0, 3, 0, -3, 0, 3, 0, -3],
    [-1, 2, -1, 1, -3, 0, 0, 1],
    [-2, 0, 1, -1, 0, 0, 0, 1],
    [1, -1, 0, 2, 3, -1, -1, 0],
];

/// Sign of the real form of sl(2) used by the loop construction:
/// `[v,w] = +u` for so(3), `[v,w] = -u` for so(1,2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LoopForm {
    Plus,
    Minus,
}

impl fmt::Display for LoopForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LoopForm::Plus => "plus",
            LoopForm::Minus => "minus",
        })
    }
}

fn finish(b: AlgebraBuilder, field: Field) -> Result<GradedLieAlgebra> {
    let g = b.build()?;
    if field == Field::Q {
        Ok(g)
    } else {
        g.base_change(field)
    }
}

fn check_len(len: usize, min: usize, family: &str) -> Result<()> {
    if len < min {
        return Err(Error::InvalidParameter(format!(
            "{family} needs length >= {min}, got {len}"
        )));
    }
    Ok(())
}

/// Chain `e1..e{L+1}` with `g1 = <e1, e2>`, `g_i = <e_{i+1}>`.
fn chain_builder(len: usize) -> AlgebraBuilder {
    let mut b = AlgebraBuilder::new(Field::Q);
    b.push_component(["e1", "e2"]);
    for i in 2..=len {
        b.push_component([format!("e{}", i + 1)]);
    }
    b
}

fn add_chain(b: &mut AlgebraBuilder, from: usize, to: usize) -> Result<()> {
    // [e1, e_i] = e_{i+1} for from <= i <= to
    for i in from..=to {
        b.rel("e1", &format!("e{i}"), &format!("e{}", i + 1), 1)?;
    }
    Ok(())
}

/// The filiform algebra `m0` of length `len` (dimension `len + 1`).
pub fn m0(len: usize, field: Field) -> Result<GradedLieAlgebra> {
    check_len(len, 1, "m0")?;
    let mut b = chain_builder(len).name(format!("m0({len})"));
    add_chain(&mut b, 2, len)?;
    finish(b, field)
}

fn validate_s(s: &[usize]) -> Result<BTreeSet<usize>> {
    let mut out = BTreeSet::new();
    for &r in s {
        if r < 3 || r % 2 == 0 {
            return Err(Error::InvalidParameter(format!(
                "S entries must be odd and at least 3, got {r}"
            )));
        }
        out.insert(r);
    }
    Ok(out)
}

fn s_suffix(s: &BTreeSet<usize>) -> String {
    let v: Vec<String> = s.iter().map(|r| r.to_string()).collect();
    v.join(",")
}

/// `m0^S` truncated at length `len`; entries of `S` above `len` do not
/// survive the truncation and are dropped.
pub fn m0s(len: usize, s: &[usize], field: Field) -> Result<GradedLieAlgebra> {
    check_len(len, 1, "m0S")?;
    let s: BTreeSet<usize> = validate_s(s)?.into_iter().filter(|&r| r <= len).collect();
    let name = if s.is_empty() {
        format!("m0({len})")
    } else {
        format!("m0^{{{}}}({len})", s_suffix(&s))
    };
    let mut b = chain_builder(len).name(name);
    add_chain(&mut b, 2, len)?;
    for &r in &s {
        let z = format!("z{r}");
        b.add_basis(r, z.clone());
        for l in 2..=r.div_ceil(2) {
            let sign = if l % 2 == 1 { 1 } else { -1 };
            b.rel(&format!("e{l}"), &format!("e{}", r - l + 2), &z, sign)?;
        }
    }
    finish(b, field)
}

/// Builds a width-one table algebra `[e_i, e_j] = c(i, j) e_{i+j}` in the
/// natural grading given by `deg`, keeping basis vectors of degree <= len.
fn table_algebra(
    len: usize,
    deg: impl Fn(usize) -> usize,
    coef: impl Fn(usize, usize) -> i64,
    name: String,
) -> Result<AlgebraBuilder> {
    let mut b = AlgebraBuilder::new(Field::Q).name(name);
    let mut refs: Vec<Option<BasisRef>> = vec![None];
    let mut n = 1;
    loop {
        let d = deg(n);
        if d > len {
            // degrees are nondecreasing in n
            break;
        }
        refs.push(Some(b.add_basis(d, format!("e{n}"))));
        n += 1;
    }
    let top = n - 1;
    for i in 1..=top {
        for j in i + 1..=top {
            let c = coef(i, j);
            if c == 0 {
                continue;
            }
            let Some(Some(t)) = refs.get(i + j).cloned() else {
                if deg(i) + deg(j) <= len {
                    return Err(Error::InvalidAlgebra(format!("e{} missing from table", i + j)));
                }
                continue;
            };
            let (x, y) = (refs[i].unwrap(), refs[j].unwrap());
            if x.grading + y.grading != t.grading {
                return Err(Error::InvalidAlgebra(format!(
                    "table bracket [e{i},e{j}] is not homogeneous in the natural grading"
                )));
            }
            b.add_term(x, y, t, Scalar::from_int(c))?;
        }
    }
    Ok(b)
}

fn n1_degree(n: usize) -> usize {
    match n % 3 {
        0 => 2 * (n / 3),
        _ => 2 * (n / 3) + 1,
    }
}

fn n1_coef(i: usize, j: usize) -> i64 {
    match (j - i) % 3 {
        0 => 0,
        1 => 1,
        _ => -1,
    }
}

/// The mod-3 table algebra `n1` (positive part of A1^(1)), natural grading
/// `(n1)_{2k+1} = <e_{3k+1}, e_{3k+2}>`, `(n1)_{2k+2} = <e_{3k+3}>`.
pub fn n1_table(len: usize, field: Field) -> Result<GradedLieAlgebra> {
    check_len(len, 1, "n1")?;
    let b = table_algebra(len, n1_degree, n1_coef, format!("n1({len})"))?;
    finish(b, field)
}

fn n2_degree(n: usize) -> usize {
    let k = n / 8;
    match n % 8 {
        0 => 6 * k,
        1 | 2 => 6 * k + 1,
        3 => 6 * k + 2,
        4 => 6 * k + 3,
        5 => 6 * k + 4,
        _ => 6 * k + 5,
    }
}

fn n2_coef(q: usize, l: usize) -> i64 {
    N2_TABLE[q % 8][l % 8]
}

/// The mod-8 table algebra `n2` (positive part of A2^(2)) in its natural
/// grading with component dimensions repeating `(2,1,1,1,2,1)`.
pub fn n2(len: usize, field: Field) -> Result<GradedLieAlgebra> {
    check_len(len, 1, "n2")?;
    let b = table_algebra(len, n2_degree, n2_coef, format!("n2({len})"))?;
    finish(b, field)
}

/// `n2` with one extra central vector `z` in grading 3 and `[e2, e3] = z`.
pub fn n2_3(len: usize, field: Field) -> Result<GradedLieAlgebra> {
    check_len(len, 3, "n2_3")?;
    let mut b = table_algebra(len, n2_degree, n2_coef, format!("n2^3({len})"))?;
    b.add_basis(3, "z");
    b.rel("e2", "e3", "z", 1)?;
    finish(b, field)
}

/// Loop-algebra realisation of `n1` inside `so(3) ⊗ t K[t]` (plus) or
/// `so(1,2) ⊗ t K[t]` (minus), graded by the degree in `t`.
pub fn n1_loop(form: LoopForm, len: usize, field: Field) -> Result<GradedLieAlgebra> {
    check_len(len, 2, "n1 loop")?;
    let name = match form {
        LoopForm::Plus => format!("n1+({len})"),
        LoopForm::Minus => format!("n1-({len})"),
    };
    let mut b = AlgebraBuilder::new(Field::Q).name(name);
    for d in 1..=len {
        if d % 2 == 1 {
            b.push_component([format!("u{d}"), format!("v{d}")]);
        } else {
            b.push_component([format!("w{d}")]);
        }
    }
    let vw = match form {
        LoopForm::Plus => 1,
        LoopForm::Minus => -1,
    };
    for p in 1..=len {
        for q in 1..=len {
            let d = p + q;
            if d > len {
                continue;
            }
            match (p % 2, q % 2) {
                // [u,v] = w
                (1, 1) if p <= q => {
                    b.rel(&format!("u{p}"), &format!("v{q}"), &format!("w{d}"), 1)?;
                    if p < q {
                        b.rel(&format!("v{p}"), &format!("u{q}"), &format!("w{d}"), -1)?;
                    }
                }
                // [v,w] = ±u, [w,u] = v
                (1, 0) => {
                    b.rel(&format!("v{p}"), &format!("w{q}"), &format!("u{d}"), vw)?;
                    b.rel(&format!("w{q}"), &format!("u{p}"), &format!("v{d}"), 1)?;
                }
                _ => {}
            }
        }
    }
    finish(b, field)
}

/// Width-one truncation of the positive Witt algebra, `[e_i, e_j] = (j - i) e_{i+j}`,
/// with basis `e1..e{L+1}` so that the lower central series has length `L`.
pub fn wplus(len: usize, field: Field) -> Result<GradedLieAlgebra> {
    check_len(len, 1, "wplus")?;
    let top = len + 1;
    let mut b = AlgebraBuilder::new(Field::Q).name(format!("W+({len})"));
    for i in 1..=top {
        b.push_component([format!("e{i}")]);
    }
    for i in 1..=top {
        for j in i + 1..=top {
            if i + j <= top {
                b.rel(&format!("e{i}"), &format!("e{j}"), &format!("e{}", i + j), (j - i) as i64)?;
            }
        }
    }
    finish(b, field)
}

/// Width-one truncation of `m2`: `[e1, e_i] = e_{i+1}`, `[e2, e_j] = e_{j+2}`,
/// basis `e1..e{L+1}`.
pub fn m2(len: usize, field: Field) -> Result<GradedLieAlgebra> {
    check_len(len, 1, "m2")?;
    let top = len + 1;
    let mut b = AlgebraBuilder::new(Field::Q).name(format!("m2({len})"));
    for i in 1..=top {
        b.push_component([format!("e{i}")]);
    }
    for i in 2..top {
        b.rel("e1", &format!("e{i}"), &format!("e{}", i + 1), 1)?;
    }
    for j in 3..top {
        if j + 2 <= top {
            b.rel("e2", &format!("e{j}"), &format!("e{}", j + 2), 1)?;
        }
    }
    finish(b, field)
}

/// Filiform `m1` of length `2m + 1`: basis `e1..e{2m+1}, z` with
/// `[e1, e_i] = e_{i+1}` (`2 <= i <= 2m`), `[e1, e_{2m+1}] = z` and
/// `[e_q, e_{2m+3-q}] = (-1)^{q+1} z` for `2 <= q <= m + 1`.
pub fn m1(m: usize, field: Field) -> Result<GradedLieAlgebra> {
    if m < 1 {
        return Err(Error::InvalidParameter("m1 needs m >= 1".into()));
    }
    let len = 2 * m + 1;
    let mut b = chain_builder(len - 1).name(format!("m1({len})"));
    b.add_basis(len, "z");
    add_chain(&mut b, 2, 2 * m)?;
    b.rel("e1", &format!("e{}", 2 * m + 1), "z", 1)?;
    for q in 2..=m + 1 {
        let sign = if q % 2 == 1 { 1 } else { -1 };
        b.rel(&format!("e{q}"), &format!("e{}", 2 * m + 3 - q), "z", sign)?;
    }
    finish(b, field)
}

/// `m_{0,3}^S` of length `2m + 1`; `S` holds odd `r` with `3 <= r <= 2m - 3`.
pub fn m03(m: usize, s: &[usize], field: Field) -> Result<GradedLieAlgebra> {
    if m < 3 {
        return Err(Error::InvalidParameter("m03 needs m >= 3".into()));
    }
    let s = validate_s(s)?;
    if let Some(&r) = s.iter().find(|&&r| r + 3 > 2 * m) {
        return Err(Error::InvalidParameter(format!("S entry {r} exceeds 2m - 3 = {}", 2 * m - 3)));
    }
    let len = 2 * m + 1;
    let name = if s.is_empty() {
        format!("m03({len})")
    } else {
        format!("m03^{{{}}}({len})", s_suffix(&s))
    };
    let mut b = chain_builder(2 * m - 1).name(name);
    for &r in &s {
        b.add_basis(r, format!("z{r}"));
    }
    let top = format!("z{}", 2 * m - 1);
    b.add_basis(2 * m - 1, top.clone());
    b.add_basis(2 * m, format!("e{}", 2 * m + 1));
    b.add_basis(2 * m + 1, format!("e{}", 2 * m + 2));
    let (ea, eb) = (format!("e{}", 2 * m + 1), format!("e{}", 2 * m + 2));
    add_chain(&mut b, 2, 2 * m - 1)?;
    b.rel("e1", &top, &ea, 1)?;
    b.rel("e1", &ea, &eb, 1)?;
    let sign = |q: usize| if q % 2 == 1 { 1 } else { -1 };
    for q in 2..=m {
        b.rel(&format!("e{q}"), &format!("e{}", 2 * m + 1 - q), &top, sign(q))?;
    }
    for &r in &s {
        for q in 2..=r.div_ceil(2) {
            b.rel(&format!("e{q}"), &format!("e{}", r + 2 - q), &format!("z{r}"), sign(q))?;
        }
    }
    for q in 2..=m {
        let c = Scalar::from_int(sign(q) * (m + 1 - q) as i64);
        let (x, y, t) = (b.find(&format!("e{q}")).unwrap(), b.find(&format!("e{}", 2 * m + 2 - q)).unwrap(), b.find(&ea).unwrap());
        b.add_term(x, y, t, c)?;
    }
    for p in 3..=m + 1 {
        // (-1)^p (p - 2)(m - (p - 1)/2)
        let c = Scalar::ratio(
            if p % 2 == 0 { 1 } else { -1 } * (p as i64 - 2) * (2 * m as i64 - p as i64 + 1),
            2,
        );
        let (x, y, t) = (b.find(&format!("e{p}")).unwrap(), b.find(&format!("e{}", 2 * m - p + 3)).unwrap(), b.find(&eb).unwrap());
        b.add_term(x, y, t, c)?;
    }
    finish(b, field)
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Param {
    Int(usize),
    List(Vec<usize>),
    Word(String),
}

/// A parsed catalog reference such as `m0S(len=7, S=[3,5])`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogSpec {
    pub family: String,
    params: Vec<(String, Param)>,
}

fn parse_err(s: &str, msg: &str) -> Error {
    Error::Parse(format!("catalog spec '{s}': {msg}"))
}

/// Splits on commas that are not inside brackets.
fn split_top(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, ch) in s.char_indices() {
        match ch {
            '[' => depth += 1,
            ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

impl std::str::FromStr for CatalogSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let (family, rest) = match t.find('(') {
            Some(p) => {
                let rest = t[p + 1..]
                    .strip_suffix(')')
                    .ok_or_else(|| parse_err(s, "missing closing parenthesis"))?;
                (t[..p].trim(), rest)
            }
            None => (t, ""),
        };
        if family.is_empty() {
            return Err(parse_err(s, "empty family name"));
        }
        let mut params = Vec::new();
        if !rest.trim().is_empty() {
            for item in split_top(rest) {
                let (k, v) = item
                    .split_once('=')
                    .ok_or_else(|| parse_err(s, &format!("expected key=value, got '{}'", item.trim())))?;
                let (k, v) = (k.trim().to_string(), v.trim());
                if params.iter().any(|(p, _): &(String, Param)| *p == k) {
                    return Err(parse_err(s, &format!("duplicate key '{k}'")));
                }
                let value = if let Some(inner) = v.strip_prefix('[') {
                    let inner = inner
                        .strip_suffix(']')
                        .ok_or_else(|| parse_err(s, "unterminated list"))?;
                    let items = inner
                        .split(',')
                        .map(str::trim)
                        .filter(|x| !x.is_empty())
                        .map(|x| x.parse::<usize>().map_err(|_| parse_err(s, &format!("bad integer '{x}'"))))
                        .collect::<Result<Vec<_>>>()?;
                    Param::List(items)
                } else if let Ok(n) = v.parse::<usize>() {
                    Param::Int(n)
                } else if !v.is_empty() && v.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                    Param::Word(v.to_string())
                } else {
                    return Err(parse_err(s, &format!("bad value '{v}'")));
                };
                params.push((k, value));
            }
        }
        Ok(CatalogSpec {
            family: family.to_string(),
            params,
        })
    }
}

impl CatalogSpec {
    fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        for (k, _) in &self.params {
            if !allowed.contains(&k.as_str()) {
                return Err(Error::InvalidParameter(format!(
                    "unknown key '{k}' for family {} (allowed: {})",
                    self.family,
                    allowed.join(", ")
                )));
            }
        }
        Ok(())
    }

    fn get(&self, key: &str) -> Option<&Param> {
        self.params.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    fn int(&self, key: &str) -> Result<Option<usize>> {
        match self.get(key) {
            None => Ok(None),
            Some(Param::Int(n)) => Ok(Some(*n)),
            Some(_) => Err(Error::InvalidParameter(format!("'{key}' must be an integer"))),
        }
    }

    fn len(&self) -> Result<usize> {
        self.int("len")?
            .ok_or_else(|| Error::InvalidParameter(format!("family {} needs len=", self.family)))
    }

    fn list(&self, key: &str) -> Result<Vec<usize>> {
        match self.get(key) {
            None => Ok(Vec::new()),
            Some(Param::List(v)) => Ok(v.clone()),
            Some(Param::Int(n)) => Ok(vec![*n]),
            Some(_) => Err(Error::InvalidParameter(format!("'{key}' must be a list"))),
        }
    }

    fn form(&self) -> Result<Option<LoopForm>> {
        match self.get("form") {
            None => Ok(None),
            Some(Param::Word(w)) if w == "plus" => Ok(Some(LoopForm::Plus)),
            Some(Param::Word(w)) if w == "minus" => Ok(Some(LoopForm::Minus)),
            Some(_) => Err(Error::InvalidParameter("form must be plus or minus".into())),
        }
    }

    /// `m` for the odd-length families, given directly or as `len = 2m + 1`.
    fn half(&self) -> Result<usize> {
        match (self.int("m")?, self.int("len")?) {
            (Some(m), None) => Ok(m),
            (None, Some(l)) if l % 2 == 1 => Ok(l / 2),
            (None, Some(l)) => Err(Error::InvalidParameter(format!(
                "family {} has odd length, got len={l}",
                self.family
            ))),
            (Some(_), Some(_)) => Err(Error::InvalidParameter("give either m= or len=, not both".into())),
            (None, None) => Err(Error::InvalidParameter(format!("family {} needs m= or len=", self.family))),
        }
    }

    pub fn build(&self, field: Field) -> Result<GradedLieAlgebra> {
        match self.family.as_str() {
            "m0" => {
                self.check_keys(&["len"])?;
                m0(self.len()?, field)
            }
            "m0S" | "m0s" => {
                self.check_keys(&["len", "S"])?;
                m0s(self.len()?, &self.list("S")?, field)
            }
            "n1" | "n1_table" => {
                self.check_keys(&["len", "form"])?;
                match self.form()? {
                    None => n1_table(self.len()?, field),
                    Some(f) => n1_loop(f, self.len()?, field),
                }
            }
            "n1plus" | "n1+" => {
                self.check_keys(&["len"])?;
                n1_loop(LoopForm::Plus, self.len()?, field)
            }
            "n1minus" | "n1-" => {
                self.check_keys(&["len"])?;
                n1_loop(LoopForm::Minus, self.len()?, field)
            }
            "loop" | "n1_loop" => {
                self.check_keys(&["len", "form"])?;
                let f = self
                    .form()?
                    .ok_or_else(|| Error::InvalidParameter("loop needs form=plus|minus".into()))?;
                n1_loop(f, self.len()?, field)
            }
            "n2" => {
                self.check_keys(&["len"])?;
                n2(self.len()?, field)
            }
            "n2_3" | "n23" | "n2^3" => {
                self.check_keys(&["len"])?;
                n2_3(self.len()?, field)
            }
            "m1" => {
                self.check_keys(&["len", "m"])?;
                m1(self.half()?, field)
            }
            "m03" | "m0_3" => {
                self.check_keys(&["len", "m", "S"])?;
                m03(self.half()?, &self.list("S")?, field)
            }
            "wplus" | "W+" => {
                self.check_keys(&["len"])?;
                wplus(self.len()?, field)
            }
            "m2" => {
                self.check_keys(&["len"])?;
                m2(self.len()?, field)
            }
            other => Err(Error::InvalidParameter(format!("unknown catalog family '{other}'"))),
        }
    }
}

/// Parses and builds a catalog reference, e.g. `n2(len=12)`.
pub fn from_spec(spec: &str, field: Field) -> Result<GradedLieAlgebra> {
    spec.parse::<CatalogSpec>()?.build(field)
}

/// The families accepted by [`from_spec`] with their keys.
pub const FAMILIES: &[(&str, &str)] = &[
    ("m0", "len"),
    ("m0S", "len, S=[odd >= 3]"),
    ("n1", "len, form=plus|minus (table algebra without form)"),
    ("n1plus", "len"),
    ("n1minus", "len"),
    ("n2", "len"),
    ("n2_3", "len"),
    ("m1", "m or odd len"),
    ("m03", "m or odd len, S=[odd, <= 2m-3]"),
    ("wplus", "len"),
    ("m2", "len"),
];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::{is_carnot, jacobi_check};

    #[test]
    fn printed_n2_table_fails_jacobi() {
        let mut printed = N2_TABLE;
        printed[5][7] = -1;
        printed[7][5] = 1;
        let b = table_algebra(9, n2_degree, |q, l| printed[q % 8][l % 8], "n2".into()).unwrap();
        let g = b.build_unchecked().unwrap();
        let report = jacobi_check(&g);
        assert!(!report.is_ok());
        let e = |n: usize| g.basis_ref(g.find_label(&format!("e{n}")).unwrap());
        assert!(report.violations.iter().any(|v| v.triple == (e(1), e(4), e(7))));
        assert!(jacobi_check(&n2(9, Field::Q).unwrap()).is_ok());
    }

    #[test]
    fn catalog_dims() {
        assert_eq!(m0(6, Field::Q).unwrap().dims(), vec![2, 1, 1, 1, 1, 1]);
        assert_eq!(n2(6, Field::Q).unwrap().dims(), vec![2, 1, 1, 1, 2, 1]);
        assert_eq!(n1_table(6, Field::Q).unwrap().dims(), vec![2, 1, 2, 1, 2, 1]);
        let g = m0s(7, &[3, 5], Field::Q).unwrap();
        assert_eq!(g.dims(), vec![2, 1, 2, 1, 2, 1, 1]);
        let z3 = g.find_label("z3").unwrap();
        let v = g.bracket_vec(g.basis_element(g.find_label("e2").unwrap()).coeffs(), g.basis_element(g.find_label("e3").unwrap()).coeffs());
        assert_eq!(v[z3], Scalar::from_int(-1));
    }

    #[test]
    fn spec_strings() {
        let g = from_spec("m0S(len=7, S=[3,5])", Field::Q).unwrap();
        assert_eq!(g.name(), Some("m0^{3,5}(7)"));
        assert_eq!(from_spec("m1(m=3)", Field::Q).unwrap().dims().len(), 7);
        assert_eq!(from_spec("m1(len=7)", Field::Q).unwrap().name(), Some("m1(7)"));
        assert!(from_spec("m1(len=6)", Field::Q).is_err());
        assert!(from_spec("m0(len=4, S=[3])", Field::Q).is_err());
        assert!(from_spec("m0(len=4", Field::Q).is_err());
        assert!(from_spec("nope(len=4)", Field::Q).is_err());
        assert!(from_spec("m0S(len=7, S=[4])", Field::Q).is_err());
        let p = from_spec("n1(len=6, form=plus)", Field::Q).unwrap();
        assert_eq!(p.name(), Some("n1+(6)"));
        assert!(is_carnot(&from_spec("m03(len=9, S=[3])", Field::Q).unwrap()).carnot);
    }
}
