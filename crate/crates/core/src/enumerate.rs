//! Breadth-first classification of narrow Carnot algebras.
//!
//! Starting from `m0(2)`, each class of length `L` is extended by one- and
//! two-dimensional subspaces of `H²_(L+1)` whose top restrictions are
//! independent. Children are deduplicated level by level: fingerprints
//! first, then [`iso_search`](crate::iso::iso_search). Candidate subspaces
//! are height-bounded, so the run is complete only up to that bound.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::{AlgebraJson, GradedLieAlgebra};
use crate::automorphism::{self, GradedMapJson};
use crate::catalog::{self, LoopForm};
use crate::cohomology::{self, CohomologySlice};
use crate::error::{Error, Result};
use crate::extension::{self, ExtensionJson, ExtensionSpec};
use crate::iso::{self, small_values, ExtensionVerdict, Fingerprint, IsoVerdict, SearchConfig};
use crate::linalg::{Matrix, Subspace};
use crate::scalar::{Field, Scalar};
use crate::structure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EnumConfig {
    pub max_length: usize,
    pub field: Field,
    /// Height bound of the free coordinates of candidate subspaces.
    pub height: u32,
    /// Forbid two consecutive two-dimensional components. With the flag
    /// off the width rule relaxes to `dim g_i + dim g_{i+1} <= 4`.
    pub forbid_2_2: bool,
    /// Candidates examined per node before the run is marked truncated.
    pub max_candidates: usize,
    /// Merge classes that become isomorphic over a quadratic extension:
    /// real ones for Q, any for Q(i). The counts are then those over R or C.
    pub merge_forms: bool,
    pub search: SearchConfig,
}

impl Default for EnumConfig {
    fn default() -> Self {
        EnumConfig {
            max_length: 6,
            field: Field::Q,
            height: 3,
            forbid_2_2: true,
            max_candidates: 20_000,
            merge_forms: true,
            search: SearchConfig::default(),
        }
    }
}

impl EnumConfig {
    fn width_bound(&self) -> usize {
        if self.forbid_2_2 {
            3
        } else {
            4
        }
    }

    fn validate(&self) -> Result<()> {
        if self.max_length < 2 {
            return Err(Error::InvalidParameter("max length must be at least 2".into()));
        }
        if self.height == 0 {
            return Err(Error::InvalidParameter("height bound must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NodeStatus {
    Canonical,
    Duplicate { of: usize, witness: GradedMapJson },
    /// Isomorphic to `of` only over `F(√sqrt_of)`, a real field over Q.
    FormOf { of: usize, sqrt_of: String, witness: Value },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct NodeFlags {
    pub non_extendable: bool,
    /// Shares its fingerprint with another class of the same length.
    pub parametric_family_suspected: bool,
    /// Canonical nodes against which the isomorphism search was inconclusive.
    pub unresolved_against: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct ClassificationNode {
    pub id: usize,
    pub algebra: GradedLieAlgebra,
    pub parent: Option<usize>,
    pub extension: Option<ExtensionSpec>,
    pub status: NodeStatus,
    pub flags: NodeFlags,
    pub catalog_match: Option<String>,
    /// Every catalog name verified isomorphic, `catalog_match` first.
    pub catalog_names: Vec<String>,
}

impl ClassificationNode {
    pub fn length(&self) -> usize {
        self.algebra.length()
    }

    pub fn is_canonical(&self) -> bool {
        self.status == NodeStatus::Canonical
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct NodeJson {
    pub id: usize,
    pub length: usize,
    pub dims: Vec<usize>,
    pub parent: Option<usize>,
    pub extension: Option<ExtensionJson>,
    pub status: NodeStatus,
    pub flags: NodeFlags,
    pub catalog_match: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub catalog_names: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub algebra: Option<AlgebraJson>,
}

#[derive(Debug, Clone)]
pub struct Classification {
    pub config: EnumConfig,
    pub nodes: Vec<ClassificationNode>,
    /// Whether some node hit the candidate limit.
    pub truncated: bool,
    pub warnings: Vec<String>,
}

/// One-dimensional subspaces: vectors whose first nonzero coordinate is 1.
fn projective_points(h: usize, vals: &[Scalar]) -> Vec<Vec<Scalar>> {
    let mut out = Vec::new();
    for lead in 0..h {
        let free = h - lead - 1;
        let total = vals.len().pow(free as u32);
        for idx in 0..total {
            let mut v = vec![Scalar::zero(); h];
            v[lead] = Scalar::one();
            let mut rest = idx;
            for c in v.iter_mut().skip(lead + 1) {
                *c = vals[rest % vals.len()].clone();
                rest /= vals.len();
            }
            out.push(v);
        }
    }
    out
}

/// Two-dimensional subspaces in reduced row echelon form.
fn plane_bases(h: usize, vals: &[Scalar]) -> Vec<[Vec<Scalar>; 2]> {
    let mut out = Vec::new();
    for p1 in 0..h {
        for p2 in p1 + 1..h {
            // free slots: row 1 after p1 except p2, row 2 after p2
            let slots1: Vec<usize> = (p1 + 1..h).filter(|&c| c != p2).collect();
            let slots2: Vec<usize> = (p2 + 1..h).collect();
            let n = slots1.len() + slots2.len();
            let total = vals.len().pow(n as u32);
            for idx in 0..total {
                let mut r1 = vec![Scalar::zero(); h];
                let mut r2 = vec![Scalar::zero(); h];
                r1[p1] = Scalar::one();
                r2[p2] = Scalar::one();
                let mut rest = idx;
                for &c in slots1.iter() {
                    r1[c] = vals[rest % vals.len()].clone();
                    rest /= vals.len();
                }
                for &c in slots2.iter() {
                    r2[c] = vals[rest % vals.len()].clone();
                    rest /= vals.len();
                }
                out.push([r1, r2]);
            }
        }
    }
    out
}

fn subspace_key(vectors: &[Vec<Scalar>], h: usize) -> Vec<Vec<Scalar>> {
    Subspace::span(h, vectors.to_vec()).map(|s| s.basis_vectors()).unwrap_or_default()
}

/// Top-restriction rank of the span of the given class coordinates.
fn top_rank(g: &GradedLieAlgebra, slice: &CohomologySlice, coords: &[Vec<Scalar>]) -> Result<usize> {
    let len = g.length();
    let width = g.component_dim(1) * g.component_dim(len);
    let reps = slice.representatives(g);
    let tops: Vec<Vec<Scalar>> = reps
        .iter()
        .map(|c| {
            let m = cohomology::restrict_to_top(g, c)?;
            Ok((0..m.rows()).flat_map(|r| m.row(r).to_vec()).collect())
        })
        .collect::<Result<_>>()?;
    let rows: Vec<Vec<Scalar>> = coords
        .iter()
        .map(|v| {
            let mut row = vec![Scalar::zero(); width];
            for (c, t) in v.iter().zip(&tops) {
                for (x, y) in row.iter_mut().zip(t) {
                    *x += &(c * y);
                }
            }
            row
        })
        .collect();
    Ok(Matrix::from_rows(rows, width)?.rank())
}

/// Matrices of a small sample of graded automorphisms acting on `H²_(k)`.
fn sampled_actions(g: &GradedLieAlgebra, k: usize, cfg: &EnumConfig) -> Result<Vec<Matrix>> {
    let maps = iso::sample_automorphisms(g, cfg.search, 16)?;
    maps.iter().map(|f| automorphism::induced_h2_action(g, f, k)).collect()
}

fn apply(m: &Matrix, v: &[Scalar]) -> Vec<Scalar> {
    m.mul_vec(v).expect("action matrix matches H² dimension")
}

/// Orbit sample of a subspace: images under words of length at most two.
fn orbit_sample(basis: &[Vec<Scalar>], actions: &[Matrix], h: usize) -> HashSet<Vec<Vec<Scalar>>> {
    let mut seen = HashSet::new();
    let start = subspace_key(basis, h);
    seen.insert(start.clone());
    let mut frontier = vec![start];
    for _ in 0..2 {
        let mut next = Vec::new();
        for b in &frontier {
            for m in actions {
                let img: Vec<Vec<Scalar>> = b.iter().map(|v| apply(m, v)).collect();
                let key = subspace_key(&img, h);
                if seen.insert(key.clone()) {
                    next.push(key);
                }
            }
        }
        frontier = next;
    }
    seen
}

/// Extension data for all `m`-dimensional subspaces of `H²_(L+1)` with
/// independent top restrictions, up to the sampled automorphism action.
/// Returns the specs and whether the candidate limit was hit.
pub fn candidates_limited(g: &GradedLieAlgebra, m: usize, cfg: &EnumConfig) -> Result<(Vec<ExtensionSpec>, bool)> {
    let st = structure::is_carnot(g);
    if !st.carnot {
        return Err(Error::NotCarnot(g.display_name().to_string()));
    }
    let len = st.length;
    if !(1..=2).contains(&m) {
        return Err(Error::InvalidParameter(format!("extension dimension must be 1 or 2, got {m}")));
    }
    if g.component_dim(len) + m > cfg.width_bound() {
        return Err(Error::Precondition(format!(
            "width rule: dim g{len} + {m} exceeds {}",
            cfg.width_bound()
        )));
    }
    let k = len + 1;
    let slice = cohomology::h2_slice(g, k)?;
    let h = slice.dim_h2();
    if h < m {
        return Ok((Vec::new(), false));
    }
    let vals = small_values(cfg.height, g.field());
    let raw: Vec<Vec<Vec<Scalar>>> = if m == 1 {
        projective_points(h, &vals).into_iter().map(|v| vec![v]).collect()
    } else {
        plane_bases(h, &vals).into_iter().map(|[a, b]| vec![a, b]).collect()
    };
    let truncated = raw.len() > cfg.max_candidates;
    let actions = sampled_actions(g, k, cfg)?;
    let mut covered: HashSet<Vec<Vec<Scalar>>> = HashSet::new();
    let mut out = Vec::new();
    for basis in raw.into_iter().take(cfg.max_candidates) {
        if top_rank(g, &slice, &basis)? != m {
            continue;
        }
        let key = subspace_key(&basis, h);
        if covered.contains(&key) {
            continue;
        }
        covered.extend(orbit_sample(&basis, &actions, h));
        let cocycles = basis
            .iter()
            .map(|v| {
                let mut full = vec![Scalar::zero(); slice.space.dim()];
                for (c, r) in v.iter().zip(&slice.reps) {
                    for (x, y) in full.iter_mut().zip(r) {
                        *x += &(c * y);
                    }
                }
                slice.space.to_cochain(g, &full)
            })
            .collect();
        out.push(ExtensionSpec::new(k, cocycles));
    }
    Ok((out, truncated))
}

pub fn candidates(g: &GradedLieAlgebra, m: usize, cfg: &EnumConfig) -> Result<Vec<ExtensionSpec>> {
    candidates_limited(g, m, cfg).map(|(c, _)| c)
}

/// Catalog algebras of length `len`, in matching priority order.
pub fn catalog_at_length(len: usize, field: Field) -> Vec<GradedLieAlgebra> {
    let mut out = Vec::new();
    let mut push = |r: Result<GradedLieAlgebra>| {
        if let Ok(g) = r {
            if structure::is_carnot(&g).carnot && g.length() == len {
                out.push(g);
            }
        }
    };
    push(catalog::m0(len, field));
    push(catalog::n1_loop(LoopForm::Plus, len, field));
    push(catalog::n1_loop(LoopForm::Minus, len, field));
    push(catalog::n1_table(len, field));
    push(catalog::n2(len, field));
    push(catalog::n2_3(len, field));
    let odd: Vec<usize> = (3..=len).filter(|r| r % 2 == 1).collect();
    for mask in 1..(1usize << odd.len()) {
        let s: Vec<usize> = odd.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, &r)| r).collect();
        push(catalog::m0s(len, &s, field));
    }
    if len % 2 == 1 && len >= 5 {
        let m = (len - 1) / 2;
        push(catalog::m1(m, field));
        if m >= 3 {
            let odd: Vec<usize> = (3..=2 * m - 3).filter(|r| r % 2 == 1).collect();
            for mask in 0..(1usize << odd.len()) {
                let s: Vec<usize> =
                    odd.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, &r)| r).collect();
                push(catalog::m03(m, &s, field));
            }
        }
    }
    out
}

/// Name of the first catalog algebra of the same shape that is verified
/// isomorphic to `g`.
pub fn match_catalog(g: &GradedLieAlgebra, cfg: SearchConfig) -> Result<Option<String>> {
    Ok(catalog_matches(g, cfg)?.into_iter().next())
}

/// Names of all catalog algebras verified isomorphic to `g`, in priority order.
pub fn catalog_matches(g: &GradedLieAlgebra, cfg: SearchConfig) -> Result<Vec<String>> {
    let len = structure::is_carnot(g).length;
    let mut out = Vec::new();
    for c in catalog_at_length(len, g.field()) {
        if c.dims() == g.dims() && iso::iso_search(g, &c, cfg)?.is_iso() {
            out.push(c.display_name().to_string());
        }
    }
    Ok(out)
}

struct Child {
    parent: usize,
    spec: ExtensionSpec,
    algebra: GradedLieAlgebra,
    serialized: String,
}

struct Dedup {
    status: NodeStatus,
    unresolved: Vec<usize>,
}

/// Discriminants of the quadratic forms `x ↦ [x, [x, z]]`, by grading.
fn form_discriminants(g: &GradedLieAlgebra) -> Vec<(usize, Scalar)> {
    if g.component_dim(1) != 2 {
        return Vec::new();
    }
    (2..=g.length().saturating_sub(2))
        .filter_map(|j| {
            let form = automorphism::quadratic_form(g, j).ok()?;
            Some((j, automorphism::discriminant_of(&form, g.field()).0))
        })
        .collect()
}

/// Fingerprint key that forgets what a quadratic extension can change.
fn form_key(f: &Fingerprint) -> String {
    let mut f = f.clone();
    for (_, c) in &mut f.quadratic_classes {
        if c != "0" && c != "degenerate" {
            *c = match f.field {
                Field::Q if c.starts_with('-') => "negative".into(),
                Field::Q => "positive".into(),
                Field::Qi => "nonzero".into(),
            };
        }
    }
    f.key()
}

/// Squarefree representative of `r` modulo squares of the field.
fn reduced_class(r: &Scalar, field: Field) -> Scalar {
    if !r.is_rational() {
        return r.clone();
    }
    let q = match field {
        Field::Q => r.re().clone(),
        Field::Qi => num_traits::Signed::abs(r.re()),
    };
    crate::scalar::square_class(&q).map_or_else(|| r.clone(), Scalar::from_bigint)
}

/// How two algebras with equal fingerprints can still be isomorphic, read
/// off the ratios of their discriminants, which an isomorphism turns into
/// squares.
enum Relation {
    /// Every ratio is a square of the field.
    SameField,
    /// Every ratio is a square of `F(√d)`.
    Extension(Scalar),
    /// Not isomorphic over any admissible extension.
    Distinct,
    /// Needs more than one square root.
    Beyond,
}

fn relation(g: &GradedLieAlgebra, h: &GradedLieAlgebra, merge: bool) -> Relation {
    let field = g.field();
    let is_square = |r: &Scalar| crate::scalar::field_sqrt(r, field).is_some();
    let ratios: Vec<Scalar> = form_discriminants(g)
        .iter()
        .zip(&form_discriminants(h))
        .filter(|((_, a), (_, b))| !a.is_zero() && !b.is_zero())
        .map(|((_, a), (_, b))| a / b)
        .collect();
    let Some(first) = ratios.iter().find(|r| !is_square(r)) else {
        return Relation::SameField;
    };
    if !merge {
        return Relation::Distinct;
    }
    let d = reduced_class(first, field);
    if field == Field::Q && ratios.iter().any(|r| r.sign() != Some(1)) {
        return Relation::Distinct;
    }
    if ratios.iter().all(|r| is_square(r) || is_square(&(r * &d))) {
        Relation::Extension(d)
    } else {
        Relation::Beyond
    }
}

enum Link {
    Same(GradedMapJson),
    Form(String, Value),
}

/// Per bucket member: the class it joins with its link, and the members it
/// stands for.
type Placement = (Option<(usize, Link)>, Vec<usize>);

/// Deduplicates one fingerprint bucket; indices refer to the bucket, whose
/// first members are preferred as classes.
fn dedup_bucket(children: &[&GradedLieAlgebra], cfg: SearchConfig, merge: bool) -> Result<Vec<Placement>> {
    let mut canon: Vec<usize> = Vec::new();
    let mut out = Vec::with_capacity(children.len());
    for (i, g) in children.iter().enumerate() {
        let field = g.field();
        let mut link = None;
        let mut unresolved = Vec::new();
        for &c in &canon {
            let h = children[c];
            match relation(g, h, merge) {
                Relation::SameField => match iso::iso_search_unchecked(g, h, cfg)? {
                    IsoVerdict::VerifiedIso(f) => {
                        // witness maps the duplicate onto its class
                        link = Some((c, Link::Same(f.to_json_value(field))));
                    }
                    IsoVerdict::VerifiedNonIso(_) => {}
                    IsoVerdict::Unknown(_) => unresolved.push(c),
                },
                Relation::Extension(d) => match iso::iso_over_extension(g, h, &d, cfg)? {
                    ExtensionVerdict::Iso(m) => {
                        link = Some((c, Link::Form(d.to_field_string(field), m.to_json_value(field))));
                    }
                    ExtensionVerdict::NonIso(_) => {}
                    ExtensionVerdict::Unknown(_) => unresolved.push(c),
                },
                Relation::Distinct => {}
                Relation::Beyond => unresolved.push(c),
            }
            if link.is_some() {
                break;
            }
        }
        if link.is_none() {
            canon.push(i);
        }
        out.push((link, unresolved));
    }
    Ok(out)
}

/// Size of the discriminant classes, so that forms matching the catalog
/// come first.
fn class_weight(f: &Fingerprint) -> usize {
    f.quadratic_classes
        .iter()
        .map(|(_, c)| c.trim_start_matches('-').parse::<usize>().unwrap_or(usize::MAX / 8))
        .sum()
}

pub fn classify(cfg: &EnumConfig) -> Result<Classification> {
    cfg.validate()?;
    let root = catalog::m0(2, cfg.field)?.with_name("#0");
    let mut nodes = vec![ClassificationNode {
        id: 0,
        algebra: root,
        parent: None,
        extension: None,
        status: NodeStatus::Canonical,
        flags: NodeFlags::default(),
        catalog_match: None,
        catalog_names: Vec::new(),
    }];
    let mut truncated = false;
    let mut warnings = Vec::new();
    let mut level: Vec<usize> = vec![0];
    for len in 2..cfg.max_length {
        let generated: Vec<Result<(Vec<Child>, bool)>> = level
            .par_iter()
            .map(|&pid| {
                let g = &nodes[pid].algebra;
                let mut children = Vec::new();
                let mut trunc = false;
                for m in 1..=2 {
                    if g.component_dim(len) + m > cfg.width_bound() {
                        continue;
                    }
                    let (specs, t) = candidates_limited(g, m, cfg)?;
                    trunc |= t;
                    for spec in specs {
                        let r = extension::central_extend(g, &spec)?;
                        if !(r.carnot.carnot && r.carnot.length == len + 1) {
                            continue;
                        }
                        let serialized = r.algebra.to_json();
                        children.push(Child {
                            parent: pid,
                            spec,
                            algebra: r.algebra,
                            serialized,
                        });
                    }
                }
                Ok((children, trunc))
            })
            .collect();
        let mut children = Vec::new();
        for r in generated {
            let (c, t) = r?;
            truncated |= t;
            children.extend(c);
        }
        for &pid in &level {
            if !children.iter().any(|c| c.parent == pid) {
                nodes[pid].flags.non_extendable = true;
            }
        }
        children.sort_by(|a, b| (a.algebra.dims(), &a.serialized).cmp(&(b.algebra.dims(), &b.serialized)));
        let fingerprints: Vec<Fingerprint> = children
            .par_iter()
            .map(|c| iso::fingerprint(&c.algebra))
            .collect::<Result<_>>()?;
        let bucket_key = |f: &Fingerprint| if cfg.merge_forms { form_key(f) } else { f.key() };
        let mut buckets: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (i, f) in fingerprints.iter().enumerate() {
            buckets.entry(bucket_key(f)).or_default().push(i);
        }
        let bucket_list: Vec<Vec<usize>> = buckets
            .into_values()
            .map(|mut b| {
                b.sort_by_key(|&i| (class_weight(&fingerprints[i]), i));
                b
            })
            .collect();
        let results: Vec<Vec<Placement>> = bucket_list
            .par_iter()
            .map(|b| {
                let algs: Vec<&GradedLieAlgebra> = b.iter().map(|&i| &children[i].algebra).collect();
                dedup_bucket(&algs, cfg.search, cfg.merge_forms)
            })
            .collect::<Result<_>>()?;
        let base = nodes.len();
        let mut dedup: Vec<Option<Dedup>> = (0..children.len()).map(|_| None).collect();
        for (b, res) in bucket_list.iter().zip(results) {
            for (pos, (link, unresolved)) in res.into_iter().enumerate() {
                let status = match link {
                    Some((c, Link::Same(witness))) => NodeStatus::Duplicate {
                        of: base + b[c],
                        witness,
                    },
                    Some((c, Link::Form(sqrt_of, witness))) => NodeStatus::FormOf {
                        of: base + b[c],
                        sqrt_of,
                        witness,
                    },
                    None => NodeStatus::Canonical,
                };
                dedup[b[pos]] = Some(Dedup {
                    status,
                    unresolved: unresolved.into_iter().map(|c| base + b[c]).collect(),
                });
            }
        }
        let family_keys: BTreeSet<String> = bucket_list
            .iter()
            .filter(|b| {
                b.iter()
                    .filter(|&&i| dedup[i].as_ref().is_some_and(|d| d.status == NodeStatus::Canonical))
                    .count()
                    > 1
            })
            .map(|b| bucket_key(&fingerprints[b[0]]))
            .collect();
        let mut next_level = Vec::new();
        for (i, (child, d)) in children.into_iter().zip(dedup).enumerate() {
            let d = d.expect("every child is assigned to a bucket");
            let id = base + i;
            let canonical = d.status == NodeStatus::Canonical;
            if canonical {
                next_level.push(id);
            }
            if !d.unresolved.is_empty() {
                warnings.push(format!(
                    "length {}: isomorphism of #{id} with {:?} unresolved; kept as separate class",
                    len + 1,
                    d.unresolved
                ));
            }
            nodes.push(ClassificationNode {
                id,
                algebra: child.algebra.with_name(format!("#{id}")),
                parent: Some(child.parent),
                extension: Some(child.spec),
                status: d.status,
                flags: NodeFlags {
                    non_extendable: false,
                    parametric_family_suspected: canonical && family_keys.contains(&bucket_key(&fingerprints[i])),
                    unresolved_against: d.unresolved,
                },
                catalog_match: None,
                catalog_names: Vec::new(),
            });
        }
        level = next_level;
    }
    // dead ends at the last level and catalog names of all classes
    let canon: Vec<usize> = nodes.iter().filter(|n| n.is_canonical()).map(|n| n.id).collect();
    let extra: Vec<Result<(usize, bool, Vec<String>)>> = canon
        .par_iter()
        .map(|&id| {
            let n = &nodes[id];
            let dead = if n.length() == cfg.max_length {
                !extension::is_extendable(&n.algebra)?.extendable
            } else {
                n.flags.non_extendable
            };
            Ok((id, dead, catalog_matches(&n.algebra, cfg.search)?))
        })
        .collect();
    for r in extra {
        let (id, dead, names) = r?;
        nodes[id].flags.non_extendable = dead;
        nodes[id].catalog_match = names.first().cloned();
        nodes[id].catalog_names = names;
    }
    if truncated {
        warnings.push(format!(
            "candidate limit {} reached; the run is truncated",
            cfg.max_candidates
        ));
    }
    Ok(Classification {
        config: *cfg,
        nodes,
        truncated,
        warnings,
    })
}

impl Classification {
    /// Canonical nodes of the given length.
    pub fn classes(&self, len: usize) -> Vec<&ClassificationNode> {
        self.nodes.iter().filter(|n| n.is_canonical() && n.length() == len).collect()
    }

    pub fn node_json(&self, n: &ClassificationNode) -> NodeJson {
        NodeJson {
            id: n.id,
            length: n.length(),
            dims: n.algebra.dims(),
            parent: n.parent,
            extension: n.extension.as_ref().map(|e| e.to_json_value(self.config.field)),
            status: n.status.clone(),
            flags: n.flags.clone(),
            catalog_match: n.catalog_match.clone(),
            catalog_names: n.catalog_names.clone(),
            algebra: n.is_canonical().then(|| n.algebra.to_json_value()),
        }
    }

    pub fn to_json_value(&self) -> Value {
        let levels: Vec<Value> = (2..=self.config.max_length)
            .map(|len| {
                let classes = self.classes(len);
                json!({
                    "length": len,
                    "nodes": self.nodes.iter().filter(|n| n.length() == len).count(),
                    "classes": classes.len(),
                    "class_ids": classes.iter().map(|n| n.id).collect::<Vec<_>>(),
                    "names": classes.iter().map(|n| n.catalog_match.clone()).collect::<Vec<_>>(),
                })
            })
            .collect();
        json!({
            "version": env!("CARGO_PKG_VERSION"),
            "config": self.config,
            "truncated": self.truncated,
            "warnings": self.warnings,
            "levels": levels,
            "nodes": self.nodes.iter().map(|n| self.node_json(n)).collect::<Vec<_>>(),
        })
    }

    fn label(n: &ClassificationNode) -> String {
        let dims: Vec<String> = n.algebra.dims().iter().map(usize::to_string).collect();
        match &n.catalog_match {
            Some(name) => format!("#{} {}\\n({})", n.id, name, dims.join(",")),
            None => format!("#{}\\n({})", n.id, dims.join(",")),
        }
    }

    /// Extension tree in Graphviz DOT: dashed edges point from duplicates to
    /// their classes, dead ends are filled.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph classification {\n  rankdir=TB;\n  node [shape=box];\n");
        for n in &self.nodes {
            let mut attrs = vec![format!("label=\"{}\"", Self::label(n))];
            if n.flags.non_extendable {
                attrs.push("style=filled".into());
                attrs.push("fillcolor=gray80".into());
            }
            if !n.is_canonical() {
                attrs.push("color=gray50".into());
                attrs.push("fontcolor=gray50".into());
            }
            s.push_str(&format!("  n{} [{}];\n", n.id, attrs.join(", ")));
        }
        for n in &self.nodes {
            if let Some(p) = n.parent {
                s.push_str(&format!("  n{p} -> n{};\n", n.id));
            }
            match &n.status {
                NodeStatus::Duplicate { of, .. } => {
                    s.push_str(&format!("  n{} -> n{of} [style=dashed, constraint=false];\n", n.id));
                }
                NodeStatus::FormOf { of, sqrt_of, .. } => {
                    s.push_str(&format!(
                        "  n{} -> n{of} [style=dotted, constraint=false, label=\"sqrt({sqrt_of})\"];\n",
                        n.id
                    ));
                }
                NodeStatus::Canonical => {}
            }
        }
        s.push_str("}\n");
        s
    }

    /// Plain-text summary, one line per class.
    pub fn summary(&self) -> String {
        let mut s = format!(
            "field {}, max length {}, height {}\n",
            self.config.field, self.config.max_length, self.config.height
        );
        for len in 2..=self.config.max_length {
            let classes = self.classes(len);
            s.push_str(&format!("length {len}: {} classes\n", classes.len()));
            for n in classes {
                let dims: Vec<String> = n.algebra.dims().iter().map(usize::to_string).collect();
                let mut flags = Vec::new();
                if n.flags.non_extendable {
                    flags.push("dead end");
                }
                if n.flags.parametric_family_suspected {
                    flags.push("family?");
                }
                if !n.flags.unresolved_against.is_empty() {
                    flags.push("unresolved");
                }
                s.push_str(&format!(
                    "  #{:<4} ({}) {}{}\n",
                    n.id,
                    dims.join(","),
                    n.catalog_match.as_deref().unwrap_or("(no catalog match)"),
                    if flags.is_empty() { String::new() } else { format!(" [{}]", flags.join(", ")) }
                ));
            }
        }
        for w in &self.warnings {
            s.push_str(&format!("warning: {w}\n"));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subspace_grids() {
        let vals = vec![Scalar::zero(), Scalar::one()];
        assert_eq!(projective_points(2, &vals).len(), 3);
        assert_eq!(plane_bases(2, &vals).len(), 1);
        assert_eq!(plane_bases(3, &vals).len(), 4 + 2 + 1);
    }

    #[test]
    fn length_three() {
        let cfg = EnumConfig {
            max_length: 3,
            ..EnumConfig::default()
        };
        let c = classify(&cfg).unwrap();
        let classes = c.classes(3);
        assert_eq!(classes.len(), 2);
        assert!(classes.iter().any(|n| n.catalog_names.contains(&"m0(3)".to_string())));
        assert!(classes.iter().any(|n| n.catalog_names.contains(&"n1(3)".to_string())));
    }
}
