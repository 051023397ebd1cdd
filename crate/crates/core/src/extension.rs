//! Central extensions by tuples of scalar cocycles.
//!
//! Extending `g` by cocycles `c_1..c_m` of grading `k` appends central
//! vectors `z_1..z_m` to component `k` and adds `Σ c_l(x, y) z_l` to every
//! bracket `[x, y]`. The Jacobi identity of the result is equivalent to the
//! cocycle identity, so the extended algebra is built without re-checking it.

use serde::{Deserialize, Serialize};

use crate::algebra::{BasisRef, GradedLieAlgebra};
use crate::cohomology::{self, Cochain2, CochainJson, CochainSpace};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Subspace};
use crate::scalar::Scalar;
use crate::structure::{self, CarnotStatus};

/// Data of a central extension of some base algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionSpec {
    pub grading: usize,
    pub cocycles: Vec<Cochain2>,
    /// Labels of the new central vectors; generated when empty.
    pub labels: Vec<String>,
}

impl ExtensionSpec {
    pub fn new(grading: usize, cocycles: Vec<Cochain2>) -> Self {
        ExtensionSpec {
            grading,
            cocycles,
            labels: Vec::new(),
        }
    }

    pub fn to_json_value(&self, field: crate::Field) -> ExtensionJson {
        ExtensionJson {
            cocycles: self.cocycles.iter().map(|c| c.to_json_value(field)).collect(),
            grading: self.grading,
            labels: self.labels.clone(),
        }
    }

    pub fn from_json_value(raw: &ExtensionJson) -> Result<Self> {
        Ok(ExtensionSpec {
            grading: raw.grading,
            cocycles: raw
                .cocycles
                .iter()
                .map(Cochain2::from_json_value)
                .collect::<Result<_>>()?,
            labels: raw.labels.clone(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtensionJson {
    pub cocycles: Vec<CochainJson>,
    pub grading: usize,
    #[serde(default)]
    pub labels: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct ExtensionResult {
    pub algebra: GradedLieAlgebra,
    pub carnot: CarnotStatus,
    /// Whether the cocycle classes are linearly independent in `H²_(k)`.
    pub independent: bool,
}

fn default_labels(g: &GradedLieAlgebra, k: usize, count: usize) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    let mut candidate = format!("z{k}");
    while out.len() < count {
        let taken = g.find_label(&candidate).is_some() || out.contains(&candidate);
        if !taken {
            out.push(candidate.clone());
        }
        candidate.push('\'');
    }
    out
}

fn validate(g: &GradedLieAlgebra, spec: &ExtensionSpec) -> Result<CochainSpace> {
    let k = spec.grading;
    if spec.cocycles.is_empty() {
        return Err(Error::InvalidCocycle("an extension needs at least one cocycle".into()));
    }
    if k < 2 || k > g.length() + 1 {
        return Err(Error::Grading(format!(
            "extension grading {k} outside 2..={}",
            g.length() + 1
        )));
    }
    if !spec.labels.is_empty() && spec.labels.len() != spec.cocycles.len() {
        return Err(Error::InvalidParameter("one label per cocycle is required".into()));
    }
    let space = CochainSpace::new(g, k);
    let m = space.cocycle_matrix(g);
    for (l, c) in spec.cocycles.iter().enumerate() {
        if c.grading != k {
            return Err(Error::Grading(format!(
                "cocycle {l} has grading {} but the extension is at grading {k}",
                c.grading
            )));
        }
        let v = space.to_coords(g, c)?;
        if m.rows() > 0 && m.mul_vec(&v)?.iter().any(|r| !r.is_zero()) {
            return Err(Error::InvalidCocycle(format!("cochain {l} fails the cocycle identity")));
        }
    }
    Ok(space)
}

/// Whether the classes of the given cocycle coordinates are independent modulo `B²_(k)`.
fn classes_independent(g: &GradedLieAlgebra, space: &CochainSpace, coords: &[Vec<Scalar>]) -> bool {
    let b2 = space.coboundaries(g);
    let span = Subspace::span(space.dim(), coords.to_vec()).unwrap();
    span.dim() == coords.len() && b2.sum(&span).unwrap().dim() == b2.dim() + coords.len()
}

pub fn central_extend(g: &GradedLieAlgebra, spec: &ExtensionSpec) -> Result<ExtensionResult> {
    let space = validate(g, spec)?;
    let k = spec.grading;
    let count = spec.cocycles.len();
    let labels = if spec.labels.is_empty() {
        default_labels(g, k, count)
    } else {
        spec.labels.clone()
    };
    let coords: Vec<Vec<Scalar>> = spec
        .cocycles
        .iter()
        .map(|c| space.to_coords(g, c))
        .collect::<Result<_>>()?;
    let independent = classes_independent(g, &space, &coords);

    let mut b = g.to_builder();
    b.name = None;
    let old_dim = g.component_dim(k);
    let new_refs: Vec<BasisRef> = labels.iter().map(|l| b.add_basis(k, l.clone())).collect();
    let new_dim = old_dim + count;
    // widen existing brackets that land in component k
    for ((x, y), out) in b.brackets.iter_mut() {
        if x.grading + y.grading == k {
            out.resize(new_dim, Scalar::zero());
        }
    }
    for (idx, &(p, q)) in space.pairs.iter().enumerate() {
        let (x, y) = (g.basis_ref(p), g.basis_ref(q));
        for (l, v) in coords.iter().enumerate() {
            if !v[idx].is_zero() {
                b.add_term(x, y, new_refs[l], v[idx].clone())?;
            }
        }
    }
    let provenance = {
        let parts: Vec<String> = spec
            .cocycles
            .iter()
            .zip(&labels)
            .map(|(c, l)| {
                let terms: Vec<String> = c
                    .terms
                    .iter()
                    .map(|((x, y), v)| {
                        format!("{}*{}^{}", v, g.label(g.global(*x)), g.label(g.global(*y)))
                    })
                    .collect();
                format!("{l} <- {}", terms.join(" + "))
            })
            .collect();
        format!("central extension of {} at grading {k}: {}", g.display_name(), parts.join("; "))
    };
    b.provenance = Some(provenance);
    let algebra = b.build_unchecked()?;
    let carnot = structure::is_carnot(&algebra);
    Ok(ExtensionResult {
        algebra,
        carnot,
        independent,
    })
}

/// Whether extending at the top grading yields a Carnot algebra of length
/// `L + 1` whose new component has one vector per cocycle. Decided
/// structurally on the extended algebra.
pub fn is_carnot_extension(g: &GradedLieAlgebra, spec: &ExtensionSpec) -> Result<bool> {
    let len = g.length();
    if spec.grading != len + 1 {
        return Err(Error::Precondition(format!(
            "Carnot extension test needs grading {}, got {}",
            len + 1,
            spec.grading
        )));
    }
    if !structure::is_carnot(g).carnot {
        return Err(Error::NotCarnot(g.display_name().to_string()));
    }
    let r = central_extend(g, spec)?;
    Ok(r.carnot.carnot
        && r.carnot.length == len + 1
        && r.algebra.component_dim(len + 1) == spec.cocycles.len())
}

/// The independence criterion of the extension lemma, evaluated on
/// cohomology classes and top restrictions (without building the algebra).
pub fn lemma_criterion(g: &GradedLieAlgebra, spec: &ExtensionSpec) -> Result<bool> {
    let space = validate(g, spec)?;
    let coords: Vec<Vec<Scalar>> = spec
        .cocycles
        .iter()
        .map(|c| space.to_coords(g, c))
        .collect::<Result<_>>()?;
    let independent = classes_independent(g, &space, &coords);
    let rows: Vec<Vec<Scalar>> = spec
        .cocycles
        .iter()
        .map(|c| {
            let m = cohomology::restrict_to_top(g, c)?;
            Ok((0..m.rows()).flat_map(|r| m.row(r).to_vec()).collect())
        })
        .collect::<Result<_>>()?;
    let width = g.component_dim(1) * g.component_dim(g.length());
    let top_rank = Matrix::from_rows(rows, width)?.rank();
    Ok(independent && top_rank == spec.cocycles.len())
}

#[derive(Debug, Clone)]
pub struct Extendability {
    pub extendable: bool,
    pub witness: Option<Cochain2>,
    /// Rank of the top restriction map on `Z²_(L+1)`: the largest possible
    /// dimension of a new top component.
    pub max_new_dim: usize,
}

/// Whether some central extension is Carnot of length one more.
pub fn is_extendable(g: &GradedLieAlgebra) -> Result<Extendability> {
    let st = structure::is_carnot(g);
    if !st.carnot {
        return Err(Error::NotCarnot(g.display_name().to_string()));
    }
    let k = st.length + 1;
    let z = cohomology::z2_basis(g, k)?;
    let mut witness = None;
    let mut rows = Vec::new();
    for c in &z {
        let m = cohomology::restrict_to_top(g, c)?;
        let row: Vec<Scalar> = (0..m.rows()).flat_map(|r| m.row(r).to_vec()).collect();
        if witness.is_none() && !m.is_zero() {
            witness = Some(c.clone());
        }
        rows.push(row);
    }
    let width = g.component_dim(1) * g.component_dim(st.length);
    let max_new_dim = if rows.is_empty() {
        0
    } else {
        Matrix::from_rows(rows, width)?.rank()
    };
    Ok(Extendability {
        extendable: witness.is_some(),
        witness,
        max_new_dim,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::cohomology::cochain_from_labels;
    use crate::Field;

    #[test]
    fn m0_2_one_dimensional_extension() {
        let g = catalog::m0(2, Field::Q).unwrap();
        let c = cochain_from_labels(&g, 3, &[("e1", "e3", 1)]).unwrap();
        let r = central_extend(&g, &ExtensionSpec::new(3, vec![c])).unwrap();
        assert!(r.carnot.carnot);
        assert_eq!(r.algebra.dims(), vec![2, 1, 1]);
        assert!(structure::jacobi_check(&r.algebra).is_ok());
    }

    #[test]
    fn dependent_cocycles_are_not_carnot() {
        let g = catalog::m0(2, Field::Q).unwrap();
        let c = cochain_from_labels(&g, 3, &[("e1", "e3", 1)]).unwrap();
        let c2 = cochain_from_labels(&g, 3, &[("e1", "e3", 2)]).unwrap();
        let spec = ExtensionSpec::new(3, vec![c, c2]);
        assert!(!is_carnot_extension(&g, &spec).unwrap());
        assert!(!lemma_criterion(&g, &spec).unwrap());
    }

    #[test]
    fn grading_contract() {
        let g = catalog::m0(5, Field::Q).unwrap();
        let omega5 = cochain_from_labels(&g, 5, &[("e2", "e5", 1), ("e3", "e4", -1)]).unwrap();
        let spec = ExtensionSpec::new(6, vec![omega5]);
        assert!(is_carnot_extension(&g, &spec).is_err());
        assert!(central_extend(&g, &ExtensionSpec::new(8, vec![])).is_err());
    }

    #[test]
    fn non_cocycle_is_rejected() {
        let g = catalog::m0(3, Field::Q).unwrap();
        // c(e2, e4) alone violates the identity on (e1, e2, e3)
        let c = cochain_from_labels(&g, 4, &[("e2", "e4", 1)]).unwrap();
        assert!(matches!(
            central_extend(&g, &ExtensionSpec::new(4, vec![c])),
            Err(Error::InvalidCocycle(_))
        ));
    }
}
