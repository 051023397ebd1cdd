//! Finite-dimensional positively graded Lie algebras with exact, sparse
//! structure constants.
//!
//! Basis vectors are addressed either by a [`BasisRef`] (1-based grading,
//! 0-based index inside the component) or by a global index that runs
//! through the components in grading order. Only brackets `[x, y]` with
//! `x < y` are stored; the diagonal is zero and the rest follows by
//! antisymmetry.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Field, Scalar};
use crate::structure;

/// Position of a basis vector: grading (1-based) and index in its component (0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BasisRef {
    pub grading: usize,
    pub index: usize,
}

impl BasisRef {
    pub fn new(grading: usize, index: usize) -> Self {
        BasisRef { grading, index }
    }
}

/// Sparse vector over the global basis.
pub type SparseVec = Vec<(usize, Scalar)>;

#[derive(Clone)]
pub struct GradedLieAlgebra {
    field: Field,
    name: Option<String>,
    provenance: Option<String>,
    components: Vec<Vec<String>>,
    offsets: Vec<usize>,
    brackets: BTreeMap<(BasisRef, BasisRef), Vec<Scalar>>,
    // dense n*n table of sparse bracket results, antisymmetric
    table: Vec<SparseVec>,
    id: u64,
}

impl PartialEq for GradedLieAlgebra {
    fn eq(&self, o: &Self) -> bool {
        self.field == o.field
            && self.name == o.name
            && self.provenance == o.provenance
            && self.components == o.components
            && self.brackets == o.brackets
    }
}

impl Eq for GradedLieAlgebra {}

impl fmt::Debug for GradedLieAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "GradedLieAlgebra({}, dims {:?}, {} brackets)",
            self.display_name(),
            self.dims(),
            self.brackets.len()
        )
    }
}

impl GradedLieAlgebra {
    pub fn field(&self) -> Field {
        self.field
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn display_name(&self) -> &str {
        self.name.as_deref().unwrap_or("<unnamed>")
    }

    pub fn provenance(&self) -> Option<&str> {
        self.provenance.as_deref()
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn with_provenance(mut self, p: impl Into<String>) -> Self {
        self.provenance = Some(p.into());
        self
    }

    /// Stable structural identifier (ignores name and provenance).
    pub fn id(&self) -> u64 {
        self.id
    }

    /// Index of the last component (the length of a Carnot algebra).
    pub fn length(&self) -> usize {
        self.components.len()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.components.iter().map(Vec::len).collect()
    }

    /// Dimension of component `grading`; zero outside `1..=length`.
    pub fn component_dim(&self, grading: usize) -> usize {
        if grading == 0 || grading > self.components.len() {
            0
        } else {
            self.components[grading - 1].len()
        }
    }

    pub fn labels(&self, grading: usize) -> &[String] {
        &self.components[grading - 1]
    }

    pub fn dim(&self) -> usize {
        self.offsets[self.components.len()]
    }

    /// Global index of the first basis vector of component `grading`.
    pub fn offset(&self, grading: usize) -> usize {
        self.offsets[grading - 1]
    }

    /// Global index range of component `grading`.
    pub fn range(&self, grading: usize) -> std::ops::Range<usize> {
        if grading == 0 || grading > self.components.len() {
            return 0..0;
        }
        self.offsets[grading - 1]..self.offsets[grading]
    }

    pub fn global(&self, r: BasisRef) -> usize {
        self.offsets[r.grading - 1] + r.index
    }

    pub fn basis_ref(&self, global: usize) -> BasisRef {
        let g = self.offsets.partition_point(|&o| o <= global);
        BasisRef::new(g, global - self.offsets[g - 1])
    }

    pub fn grading_of(&self, global: usize) -> usize {
        self.basis_ref(global).grading
    }

    pub fn label(&self, global: usize) -> &str {
        let r = self.basis_ref(global);
        &self.components[r.grading - 1][r.index]
    }

    pub fn find_label(&self, label: &str) -> Option<usize> {
        (0..self.dim()).find(|&k| self.label(k) == label)
    }

    /// Stored brackets keyed by ordered pairs of basis vectors.
    pub fn brackets(&self) -> &BTreeMap<(BasisRef, BasisRef), Vec<Scalar>> {
        &self.brackets
    }

    /// `[e_p, e_q]` as a sparse vector over the global basis.
    pub fn bracket_basis(&self, p: usize, q: usize) -> &[(usize, Scalar)] {
        &self.table[p * self.dim() + q]
    }

    /// Bracket of two coefficient vectors over the global basis.
    pub fn bracket_vec(&self, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        let n = self.dim();
        let mut out = vec![Scalar::zero(); n];
        for (p, xp) in x.iter().enumerate() {
            if xp.is_zero() {
                continue;
            }
            for (q, yq) in y.iter().enumerate() {
                if yq.is_zero() || p == q {
                    continue;
                }
                let entries = self.bracket_basis(p, q);
                if entries.is_empty() {
                    continue;
                }
                let f = xp * yq;
                for (r, c) in entries {
                    out[*r] += &(&f * c);
                }
            }
        }
        out
    }

    pub fn element(&self, coeffs: Vec<Scalar>) -> Result<Element> {
        if coeffs.len() != self.dim() {
            return Err(Error::Dimension(format!(
                "element with {} coefficients in an algebra of dimension {}",
                coeffs.len(),
                self.dim()
            )));
        }
        if let Some(bad) = coeffs.iter().find(|c| !self.field.contains(c)) {
            return Err(Error::FieldMismatch(bad.to_string(), self.field.to_string()));
        }
        Ok(Element {
            algebra: self.id,
            coeffs,
        })
    }

    pub fn basis_element(&self, global: usize) -> Element {
        let mut coeffs = vec![Scalar::zero(); self.dim()];
        coeffs[global] = Scalar::one();
        Element {
            algebra: self.id,
            coeffs,
        }
    }

    pub fn bracket(&self, x: &Element, y: &Element) -> Result<Element> {
        if x.algebra != self.id || y.algebra != self.id {
            return Err(Error::InvalidAlgebra(
                "elements belong to a different algebra".into(),
            ));
        }
        Ok(Element {
            algebra: self.id,
            coeffs: self.bracket_vec(&x.coeffs, &y.coeffs),
        })
    }

    /// Same structure over a larger field (Q -> Q(i)).
    pub fn base_change(&self, field: Field) -> Result<GradedLieAlgebra> {
        if self.field == Field::Qi && field == Field::Q {
            let rational = self
                .brackets
                .values()
                .all(|v| v.iter().all(Scalar::is_rational));
            if !rational {
                return Err(Error::FieldMismatch("Qi".into(), "Q".into()));
            }
        }
        let mut b = self.to_builder();
        b.field = field;
        b.build_unchecked()
    }

    pub fn to_builder(&self) -> AlgebraBuilder {
        AlgebraBuilder {
            field: self.field,
            name: self.name.clone(),
            provenance: self.provenance.clone(),
            components: self.components.clone(),
            brackets: self.brackets.clone(),
        }
    }

    pub fn to_json_value(&self) -> AlgebraJson {
        let brackets = self
            .brackets
            .iter()
            .map(|((x, y), out)| BracketJson {
                a: x.index,
                b: y.index,
                i: x.grading,
                j: y.grading,
                out: out.iter().map(|s| s.to_field_string(self.field)).collect(),
            })
            .collect();
        AlgebraJson {
            brackets,
            components: self
                .components
                .iter()
                .map(|labels| ComponentJson {
                    dim: labels.len(),
                    labels: labels.clone(),
                })
                .collect(),
            field: self.field.as_str().to_string(),
            name: self.name.clone(),
            provenance: self.provenance.clone(),
        }
    }

    /// Canonical JSON text (sorted keys, sorted brackets).
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("algebra serializes")
    }

    /// Parses and fully validates (grading, antisymmetry convention, Jacobi).
    pub fn from_json(text: &str) -> Result<GradedLieAlgebra> {
        let raw: AlgebraJson =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_json_value(raw)
    }

    pub fn from_json_value(raw: AlgebraJson) -> Result<GradedLieAlgebra> {
        let field: Field = raw.field.parse()?;
        let mut b = AlgebraBuilder::new(field);
        b.name = raw.name;
        b.provenance = raw.provenance;
        for c in raw.components {
            if c.dim != c.labels.len() {
                return Err(Error::InvalidAlgebra(format!(
                    "component declares dim {} with {} labels",
                    c.dim,
                    c.labels.len()
                )));
            }
            b.components.push(c.labels);
        }
        for br in raw.brackets {
            let x = BasisRef::new(br.i, br.a);
            let y = BasisRef::new(br.j, br.b);
            if x >= y {
                return Err(Error::InvalidAlgebra(format!(
                    "bracket key ({},{}),({},{}) is not strictly increasing",
                    br.i, br.a, br.j, br.b
                )));
            }
            let out = br
                .out
                .iter()
                .map(|s| s.parse::<Scalar>())
                .collect::<Result<Vec<_>>>()?;
            if b.brackets.insert((x, y), out).is_some() {
                return Err(Error::InvalidAlgebra("duplicate bracket key".into()));
            }
        }
        b.build()
    }
}

/// An element of a specific algebra, as a dense coefficient vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Element {
    algebra: u64,
    coeffs: Vec<Scalar>,
}

impl Element {
    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_zero)
    }

    pub fn scale(&self, s: &Scalar) -> Element {
        Element {
            algebra: self.algebra,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn add(&self, o: &Element) -> Result<Element> {
        if self.algebra != o.algebra {
            return Err(Error::InvalidAlgebra(
                "elements belong to a different algebra".into(),
            ));
        }
        Ok(Element {
            algebra: self.algebra,
            coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect(),
        })
    }
}

/// Incremental constructor; validation happens in [`AlgebraBuilder::build`].
#[derive(Debug, Clone)]
pub struct AlgebraBuilder {
    pub field: Field,
    pub name: Option<String>,
    pub provenance: Option<String>,
    pub components: Vec<Vec<String>>,
    pub brackets: BTreeMap<(BasisRef, BasisRef), Vec<Scalar>>,
}

impl AlgebraBuilder {
    pub fn new(field: Field) -> Self {
        AlgebraBuilder {
            field,
            name: None,
            provenance: None,
            components: Vec::new(),
            brackets: BTreeMap::new(),
        }
    }

    pub fn name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn provenance(mut self, p: impl Into<String>) -> Self {
        self.provenance = Some(p.into());
        self
    }

    /// Appends a component and returns its grading.
    pub fn push_component<S: Into<String>>(&mut self, labels: impl IntoIterator<Item = S>) -> usize {
        self.components.push(labels.into_iter().map(Into::into).collect());
        self.components.len()
    }

    /// Appends a label to component `grading` (creating empty components up
    /// to it) and returns its reference.
    pub fn add_basis(&mut self, grading: usize, label: impl Into<String>) -> BasisRef {
        while self.components.len() < grading {
            self.components.push(Vec::new());
        }
        let comp = &mut self.components[grading - 1];
        comp.push(label.into());
        let dim = comp.len();
        for ((x, y), out) in self.brackets.iter_mut() {
            if x.grading + y.grading == grading {
                out.resize(dim, Scalar::zero());
            }
        }
        BasisRef::new(grading, dim - 1)
    }

    pub fn find(&self, label: &str) -> Option<BasisRef> {
        self.components.iter().enumerate().find_map(|(g, labels)| {
            labels
                .iter()
                .position(|l| l == label)
                .map(|k| BasisRef::new(g + 1, k))
        })
    }

    /// Adds `coef · target` to `[x, y]`, handling the antisymmetric storage.
    pub fn add_term(&mut self, x: BasisRef, y: BasisRef, target: BasisRef, coef: Scalar) -> Result<()> {
        if coef.is_zero() {
            return Ok(());
        }
        if x == y {
            return Err(Error::InvalidAlgebra("nonzero bracket of a vector with itself".into()));
        }
        let (key, coef) = if x < y { ((x, y), coef) } else { ((y, x), -coef) };
        let g = x.grading + y.grading;
        if target.grading != g {
            return Err(Error::InvalidAlgebra(format!(
                "bracket of gradings {} and {} cannot land in grading {}",
                x.grading, y.grading, target.grading
            )));
        }
        let dim = self.components.get(g - 1).map_or(0, Vec::len);
        if target.index >= dim {
            return Err(Error::InvalidAlgebra(format!(
                "target index {} outside component {g} of dimension {dim}",
                target.index
            )));
        }
        let out = self
            .brackets
            .entry(key)
            .or_insert_with(|| vec![Scalar::zero(); dim]);
        out[target.index] += &coef;
        Ok(())
    }

    /// Same as [`add_term`](Self::add_term) addressing vectors by label.
    pub fn rel(&mut self, x: &str, y: &str, target: &str, coef: i64) -> Result<()> {
        let look = |l: &str| {
            self.find(l)
                .ok_or_else(|| Error::InvalidAlgebra(format!("unknown label '{l}'")))
        };
        let (x, y, t) = (look(x)?, look(y)?, look(target)?);
        self.add_term(x, y, t, Scalar::from_int(coef))
    }

    /// Validates grading and storage conventions and checks Jacobi.
    pub fn build(self) -> Result<GradedLieAlgebra> {
        let g = self.build_unchecked()?;
        let report = structure::jacobi_check(&g);
        if !report.is_ok() {
            let v = &report.violations[0];
            return Err(Error::InvalidAlgebra(format!(
                "Jacobi identity fails for ({}, {}, {})",
                g.label(g.global(v.triple.0)),
                g.label(g.global(v.triple.1)),
                g.label(g.global(v.triple.2))
            )));
        }
        Ok(g)
    }

    /// Validates grading and storage conventions but skips the Jacobi check.
    /// Used where the identity holds by construction (central extensions by
    /// cocycles).
    pub fn build_unchecked(self) -> Result<GradedLieAlgebra> {
        let AlgebraBuilder {
            field,
            name,
            provenance,
            mut components,
            brackets,
        } = self;
        while components.last().is_some_and(Vec::is_empty) {
            components.pop();
        }
        let mut seen = HashSet::new();
        for l in components.iter().flatten() {
            if !seen.insert(l.as_str()) {
                return Err(Error::InvalidAlgebra(format!("duplicate label '{l}'")));
            }
        }
        let mut offsets = vec![0];
        for c in &components {
            offsets.push(offsets.last().unwrap() + c.len());
        }
        let n = *offsets.last().unwrap();
        let len = components.len();
        let dim_of = |g: usize| if g == 0 || g > len { 0 } else { components[g - 1].len() };
        let mut kept = BTreeMap::new();
        let mut table = vec![Vec::new(); n * n];
        for ((x, y), out) in brackets {
            if x >= y {
                return Err(Error::InvalidAlgebra("bracket key not strictly increasing".into()));
            }
            if x.grading == 0 || y.grading == 0 {
                return Err(Error::InvalidAlgebra("gradings are 1-based".into()));
            }
            if x.index >= dim_of(x.grading) || y.index >= dim_of(y.grading) {
                return Err(Error::InvalidAlgebra(format!(
                    "bracket key ({},{}),({},{}) references a missing basis vector",
                    x.grading, x.index, y.grading, y.index
                )));
            }
            if let Some(bad) = out.iter().find(|c| !field.contains(c)) {
                return Err(Error::FieldMismatch(bad.to_string(), field.to_string()));
            }
            let g = x.grading + y.grading;
            if out.iter().all(Scalar::is_zero) {
                continue;
            }
            if g > len {
                return Err(Error::InvalidAlgebra(format!(
                    "nonzero bracket lands in grading {g} beyond length {len}"
                )));
            }
            if out.len() != dim_of(g) {
                return Err(Error::InvalidAlgebra(format!(
                    "bracket output has length {} but component {g} has dimension {}",
                    out.len(),
                    dim_of(g)
                )));
            }
            let p = offsets[x.grading - 1] + x.index;
            let q = offsets[y.grading - 1] + y.index;
            let base = offsets[g - 1];
            let sparse: SparseVec = out
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, c)| (base + k, c.clone()))
                .collect();
            table[q * n + p] = sparse.iter().map(|(k, c)| (*k, -c)).collect();
            table[p * n + q] = sparse;
            kept.insert((x, y), out);
        }
        let mut h = DefaultHasher::new();
        field.hash(&mut h);
        components.hash(&mut h);
        kept.hash(&mut h);
        Ok(GradedLieAlgebra {
            field,
            name,
            provenance,
            components,
            offsets,
            brackets: kept,
            table,
            id: h.finish(),
        })
    }
}

/// JSON form of an algebra. Field order is alphabetical so that serialized
/// keys come out sorted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraJson {
    pub brackets: Vec<BracketJson>,
    pub components: Vec<ComponentJson>,
    pub field: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracketJson {
    pub a: usize,
    pub b: usize,
    pub i: usize,
    pub j: usize,
    pub out: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentJson {
    pub dim: usize,
    pub labels: Vec<String>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn heisenberg() -> GradedLieAlgebra {
        let mut b = AlgebraBuilder::new(Field::Q).name("h3");
        b.push_component(["x", "y"]);
        b.push_component(["z"]);
        b.rel("x", "y", "z", 1).unwrap();
        b.build().unwrap()
    }

    #[test]
    fn antisymmetric_table() {
        let h = heisenberg();
        assert_eq!(h.bracket_basis(0, 1), &[(2, Scalar::one())]);
        assert_eq!(h.bracket_basis(1, 0), &[(2, -Scalar::one())]);
        assert!(h.bracket_basis(0, 0).is_empty());
        let x = h.basis_element(0);
        assert!(h.bracket(&x, &x).unwrap().is_zero());
    }

    #[test]
    fn rejects_bad_gradings() {
        let mut b = AlgebraBuilder::new(Field::Q);
        b.push_component(["x", "y"]);
        b.push_component(["z"]);
        let err = b.add_term(BasisRef::new(1, 0), BasisRef::new(2, 0), BasisRef::new(2, 0), Scalar::one());
        assert!(err.is_err());
    }

    #[test]
    fn rejects_out_of_range_bracket() {
        let mut b = AlgebraBuilder::new(Field::Q);
        b.push_component(["x", "y"]);
        b.brackets.insert(
            (BasisRef::new(1, 0), BasisRef::new(1, 1)),
            vec![Scalar::one()],
        );
        assert!(b.build().is_err());
    }

    #[test]
    fn json_roundtrip_is_bit_exact() {
        let h = heisenberg();
        let text = h.to_json();
        let back = GradedLieAlgebra::from_json(&text).unwrap();
        assert_eq!(back, h);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn json_rejects_unsorted_key() {
        let text = r#"{"brackets":[{"a":1,"b":0,"i":1,"j":1,"out":["1"]}],
            "components":[{"dim":2,"labels":["x","y"]},{"dim":1,"labels":["z"]}],"field":"Q"}"#;
        assert!(GradedLieAlgebra::from_json(text).is_err());
    }

    #[test]
    fn elements_of_other_algebras_are_rejected() {
        let h = heisenberg();
        let mut b = AlgebraBuilder::new(Field::Q);
        b.push_component(["a", "b", "c"]);
        let ab = b.build().unwrap();
        assert!(h.bracket(&h.basis_element(0), &ab.basis_element(0)).is_err());
    }
}
