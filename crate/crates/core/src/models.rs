//! Finite monomial models of log de Rham complexes of simple normal crossing
//! configurations over log points, with nilpotent coefficient connections.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cech::{CechError, ComponentDiagram};
use crate::complex::{ChainMap, Complex, ComplexError};
use crate::hirsch::pd::compositions_desc;
use crate::hirsch::{ExteriorLayout, HirschDatum, HirschError};
use crate::koszul::{wedge_basis, wedge_insert};
use crate::linalg::{self, LinalgError, Rat, SparseRatMatrix};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid model: {0}")]
    ModelInvalid(String),
    #[error("unknown model {0:?}")]
    UnknownModel(String),
    #[error("connection is not nilpotent")]
    NotNilpotent,
    #[error(transparent)]
    Hirsch(#[from] HirschError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Cech(#[from] CechError),
}

/// Names accepted by [`canned`].
pub const CANNED: [&str; 5] = ["log_point", "nilpotent_rank2", "xy_snc", "xyz_snc", "two_log_vars"];

/// Union of coordinate subspaces `{x_i = 0, i ∈ λ}` in `n` variables with
/// `t_j = prod_{i ∈ t_map[j]} x_i`, truncated at polynomial degree `D`.
///
/// Coordinates are 1-based, as in the JSON form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonomialSNCLModel {
    pub n: usize,
    pub r: usize,
    pub t_map: Vec<Vec<usize>>,
    pub components: Vec<Vec<usize>>,
    #[serde(rename = "D")]
    pub degree_bound: usize,
    /// `N_j` of `∇ = d + sum_j N_j ⊗ dlog t_j`; empty means trivial rank-1 coefficients.
    #[serde(default)]
    pub connection: Vec<SparseRatMatrix>,
}

impl MonomialSNCLModel {
    pub fn coefficient_dim(&self) -> usize {
        self.connection.first().map_or(1, SparseRatMatrix::rows)
    }

    fn connection_or_zero(&self) -> Vec<SparseRatMatrix> {
        if self.connection.is_empty() {
            vec![SparseRatMatrix::zeros(1, 1); self.r]
        } else {
            self.connection.clone()
        }
    }

    /// Shape checks, disjoint `t_map` blocks, commuting `N_j`, and (if
    /// `triangular`) strictly upper triangular `N_j`.
    pub fn validate(&self, triangular: bool) -> Result<(), ModelError> {
        let bad = |s: String| Err(ModelError::ModelInvalid(s));
        if self.n == 0 || self.r == 0 {
            return bad("n and r must be positive".into());
        }
        if self.t_map.len() != self.r {
            return bad(format!("t_map has {} blocks for r = {}", self.t_map.len(), self.r));
        }
        let mut seen = BTreeSet::new();
        for block in &self.t_map {
            if block.is_empty() {
                return bad("empty t_map block".into());
            }
            for &i in block {
                if i == 0 || i > self.n || !seen.insert(i) {
                    return bad(format!("coordinate {i} out of range or repeated in t_map"));
                }
            }
        }
        if self.components.is_empty() {
            return bad("no components".into());
        }
        for comp in &self.components {
            if comp.is_empty() || comp.iter().any(|&i| i == 0 || i > self.n) {
                return bad(format!("component {comp:?} is not a set of coordinates"));
            }
        }
        if !self.connection.is_empty() {
            if self.connection.len() != self.r {
                return bad(format!("{} connection matrices for r = {}", self.connection.len(), self.r));
            }
            let m = self.coefficient_dim();
            for (j, nj) in self.connection.iter().enumerate() {
                if nj.shape() != (m, m) {
                    return bad(format!("N_{} has shape {:?}", j + 1, nj.shape()));
                }
                if triangular && nj.entries().any(|(a, b, _)| a >= b) {
                    return bad(format!("N_{} is not strictly upper triangular", j + 1));
                }
                for nk in &self.connection[j + 1..] {
                    if nj.mul(nk) != nk.mul(nj) {
                        return bad("connection matrices do not commute".into());
                    }
                }
            }
        }
        Ok(())
    }

    /// Monomials of degree `<= D` not vanishing on the locus: with `vanishing = None`
    /// on the union of components, otherwise on `{x_i = 0, i ∈ vanishing}`.
    ///
    /// Ordered by degree, then descending lexicographically.
    pub fn ring_monomials(&self, vanishing: Option<&BTreeSet<usize>>) -> Vec<Vec<u32>> {
        let comps: Vec<BTreeSet<usize>> = self.components.iter().map(|c| c.iter().copied().collect()).collect();
        (0..=self.degree_bound as u32)
            .flat_map(|k| compositions_desc(self.n, k))
            .filter(|a| {
                let supp: BTreeSet<usize> = (0..self.n).filter(|&i| a[i] > 0).map(|i| i + 1).collect();
                match vanishing {
                    Some(v) => supp.is_disjoint(v),
                    None => comps.iter().any(|c| supp.is_disjoint(c)),
                }
            })
            .collect()
    }

    /// `φ` as an `n x r` matrix: `dlog t_j = sum_{i ∈ t_map[j]} dlog x_i`.
    pub fn phi(&self) -> SparseRatMatrix {
        let trip = self
            .t_map
            .iter()
            .enumerate()
            .flat_map(|(j, block)| block.iter().map(move |&i| (i - 1, j, Rat::one())));
        SparseRatMatrix::from_unique_triplets(self.n, self.r, trip).expect("t_map validated")
    }

    pub fn with_connection(&self, connection: Vec<SparseRatMatrix>) -> Self {
        MonomialSNCLModel { connection, ..self.clone() }
    }

    pub fn with_degree_bound(&self, d: usize) -> Self {
        MonomialSNCLModel { degree_bound: d, ..self.clone() }
    }
}

pub fn monomial_name(a: &[u32]) -> String {
    let s: String = a
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(i, &e)| if e == 1 { format!("x{}", i + 1) } else { format!("x{}^{e}", i + 1) })
        .join("*");
    if s.is_empty() {
        "1".into()
    } else {
        s
    }
}

fn form_name(s: &[usize]) -> String {
    if s.is_empty() {
        String::new()
    } else {
        s.iter().map(|i| format!("dlog x{}", i + 1)).join("^")
    }
}

fn coefficient_labels(ring: &[Vec<u32>], m: usize) -> Vec<String> {
    ring.iter()
        .flat_map(|a| {
            let base = monomial_name(a);
            (0..m).map(move |v| if m == 1 { base.clone() } else { format!("{base}*e{}", v + 1) })
        })
        .collect()
}

/// The log de Rham datum `ring ⊗ Λ(dlog x_1..dlog x_n) ⊗ Q^m` with `L_j = dlog t_j ∧ -`.
///
/// Basis of degree `q`: coefficient-major over `(monomial, e_v)`, then sorted `q`-subsets.
/// Each basis vector is tagged with the index of its monomial in `ring`.
pub fn log_datum_on(model: &MonomialSNCLModel, ring: &[Vec<u32>]) -> Result<HirschDatum, ModelError> {
    let n = model.n;
    let m = model.coefficient_dim();
    let conn = model.connection_or_zero();
    let phi = model.phi();
    let coefs = coefficient_labels(ring, m);
    let mut labels = Vec::new();
    let mut ds = Vec::new();
    let mut weights = BTreeMap::new();
    for q in 0..=n {
        let src = wedge_basis(n, q);
        let tgt = wedge_basis(n, q + 1);
        let tindex: BTreeMap<&[usize], usize> = tgt.iter().enumerate().map(|(i, s)| (s.as_slice(), i)).collect();
        labels.push(
            coefs
                .iter()
                .flat_map(|c| src.iter().map(move |s| if s.is_empty() { c.clone() } else { format!("{c}*{}", form_name(s)) }))
                .collect(),
        );
        weights.insert(q as i32, (0..ring.len()).flat_map(|a| std::iter::repeat_n(a, m * src.len())).collect());
        let mut trip = Vec::new();
        for (ai, a) in ring.iter().enumerate() {
            for v in 0..m {
                let coef = ai * m + v;
                for (b, s) in src.iter().enumerate() {
                    let col = coef * src.len() + b;
                    for (i, &ai_exp) in a.iter().enumerate().filter(|(_, &e)| e > 0) {
                        if let Some((sign, t)) = wedge_insert(i, s) {
                            trip.push((coef * tgt.len() + tindex[t.as_slice()], col, Rat::from_int(sign * ai_exp as i64)));
                        }
                    }
                    for (j, nj) in conn.iter().enumerate() {
                        for (w, val) in nj.column(v) {
                            for (i, _) in phi.column(j) {
                                if let Some((sign, t)) = wedge_insert(i, s) {
                                    let row = (ai * m + w) * tgt.len() + tindex[t.as_slice()];
                                    trip.push((row, col, &val * &Rat::from_int(sign)));
                                }
                            }
                        }
                    }
                }
            }
        }
        ds.push(SparseRatMatrix::from_triplets(ring.len() * m * tgt.len(), ring.len() * m * src.len(), trip)?);
    }
    let complex = Complex::new(0, labels, ds)?;
    let layout = ExteriorLayout { coefficient_labels: coefs, form_count: n, phi };
    let ops = (0..model.r)
        .map(|j| {
            (0..=n as i32)
                .map(|q| (q, crate::koszul::wedge_operator(&layout, j, q as usize, ring.len() * m)))
                .collect()
        })
        .collect();
    let generators = (1..=model.r).map(|j| format!("u{j}")).collect();
    Ok(HirschDatum::new(complex, ops)?.with_generators(generators).with_exterior(layout).with_weights(weights)?)
}

/// Builds the datum of a validated model with strictly upper triangular connection.
pub fn build_log_dga(model: &MonomialSNCLModel) -> Result<HirschDatum, ModelError> {
    model.validate(true)?;
    log_datum_on(model, &model.ring_monomials(None))
}

/// As [`build_log_dga`] but accepting any commuting connection, e.g. one with a unit eigenvalue.
pub fn build_log_dga_unchecked(model: &MonomialSNCLModel) -> Result<HirschDatum, ModelError> {
    model.validate(false)?;
    log_datum_on(model, &model.ring_monomials(None))
}

/// The relative complex built directly: forms on the `dlog x_i` that are not the
/// last coordinate of their `t_map` block, with `dlog x_last = -sum(others)` modulo `dlog t`.
pub fn build_relative_quotient(model: &MonomialSNCLModel) -> Result<Complex, ModelError> {
    model.validate(false)?;
    let abs = log_datum_on(model, &model.ring_monomials(None))?;
    let n = model.n;
    let dropped: BTreeMap<usize, Vec<usize>> = model
        .t_map
        .iter()
        .map(|b| {
            let last = *b.iter().max().unwrap() - 1;
            (last, b.iter().map(|&i| i - 1).filter(|&i| i != last).collect())
        })
        .collect();
    let kept: Vec<usize> = (0..n).filter(|i| !dropped.contains_key(i)).collect();
    let coef_count = abs.exterior().expect("log datum").coefficient_labels.len();
    // Reduction Λ^q(all) -> Λ^q(kept), and inclusion the other way.
    let reduce = |q: usize| -> SparseRatMatrix {
        let full = wedge_basis(n, q);
        let small = wedge_basis(kept.len(), q);
        let index: BTreeMap<Vec<usize>, usize> =
            small.iter().enumerate().map(|(i, s)| (s.iter().map(|&k| kept[k]).collect(), i)).collect();
        let mut trip = Vec::new();
        for (col, s) in full.iter().enumerate() {
            // Expand each factor in the kept generators, then wedge left to right.
            let mut terms: Vec<(Vec<usize>, Rat)> = vec![(Vec::new(), Rat::one())];
            for &g in s {
                let options: Vec<(usize, Rat)> = match dropped.get(&g) {
                    Some(others) => others.iter().map(|&o| (o, -Rat::one())).collect(),
                    None => vec![(g, Rat::one())],
                };
                let mut next = Vec::new();
                for (t, c) in &terms {
                    for (o, oc) in &options {
                        // Append `o` on the right: sign is the parity of elements greater than o.
                        if t.contains(o) {
                            continue;
                        }
                        let greater = t.iter().filter(|&&x| x > *o).count();
                        let mut u = t.clone();
                        u.push(*o);
                        u.sort_unstable();
                        let sign = if greater % 2 == 0 { Rat::one() } else { -Rat::one() };
                        next.push((u, &(c * oc) * &sign));
                    }
                }
                terms = next;
            }
            for (u, c) in terms {
                trip.push((index[&u], col, c));
            }
        }
        let r = SparseRatMatrix::from_triplets(small.len(), full.len(), trip).expect("indices in range");
        crate::hirsch::kron_identity(coef_count, &r)
    };
    let include = |q: usize| -> SparseRatMatrix {
        let full = wedge_basis(n, q);
        let small = wedge_basis(kept.len(), q);
        let index: BTreeMap<Vec<usize>, usize> = full.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        let trip = small.iter().enumerate().map(|(c, s)| (index[&s.iter().map(|&k| kept[k]).collect::<Vec<_>>()], c, Rat::one()));
        let e = SparseRatMatrix::from_unique_triplets(full.len(), small.len(), trip).expect("indices in range");
        crate::hirsch::kron_identity(coef_count, &e)
    };
    let c = abs.complex();
    let mut labels = Vec::new();
    let mut ds = Vec::new();
    for q in 0..=n {
        let inc = include(q);
        labels.push((0..inc.cols()).map(|k| c.labels(q as i32)[inc.column(k)[0].0].clone()).collect());
        ds.push(reduce(q + 1).mul(&c.d(q as i32)).mul(&inc));
    }
    Ok(Complex::new(0, labels, ds)?)
}

/// A multidegree and the part of a datum it spans.
#[derive(Clone, Debug)]
pub struct WeightBlock {
    pub multidegree: Vec<u32>,
    pub datum: HirschDatum,
}

/// Splits the model's datum by the multidegree of the ring monomial.
pub fn weight_decompose(model: &MonomialSNCLModel, datum: &HirschDatum) -> Vec<WeightBlock> {
    let ring = model.ring_monomials(None);
    datum
        .weight_blocks()
        .into_iter()
        .map(|(tag, d)| WeightBlock { multidegree: ring[tag].clone(), datum: d })
        .collect()
}

/// Change of basis making commuting nilpotent matrices strictly upper triangular.
///
/// Returns the conjugated matrices `P^{-1} N_j P` and `P`, whose columns are a
/// basis adapted to `V_1 ⊂ V_2 ⊂ ...` with `V_{k+1} = {v : N_j v ∈ V_k for all j}`.
pub fn normalize_connection(ns: &[SparseRatMatrix]) -> Result<(Vec<SparseRatMatrix>, SparseRatMatrix), ModelError> {
    let m = ns.first().map_or(0, SparseRatMatrix::rows);
    let mut basis = SparseRatMatrix::zeros(m, 0);
    while basis.cols() < m {
        // v with N_j v ∈ span(basis) for all j: kernel of the stacked (I - proj) N_j.
        let ann = linalg::annihilator(&basis);
        let blocks: Vec<SparseRatMatrix> = ns.iter().map(|nj| ann.mul(nj)).collect();
        let refs: Vec<&SparseRatMatrix> = blocks.iter().collect();
        let stacked = SparseRatMatrix::vstack(&refs);
        let next = linalg::kernel_basis(&stacked);
        let grown = linalg::image_basis(&SparseRatMatrix::hstack(&[&basis, &next]));
        if grown.cols() == basis.cols() {
            return Err(ModelError::NotNilpotent);
        }
        // Keep the old basis as a prefix.
        let q = linalg::quotient_dims(&basis, &grown)?;
        basis = SparseRatMatrix::hstack(&[&basis, &q.complement]);
    }
    let inv = linalg::inverse(&basis).expect("adapted basis is invertible");
    Ok((ns.iter().map(|nj| inv.mul(nj).mul(&basis)).collect(), basis))
}

/// One dévissage step `0 -> E' -> E -> E'' -> 0` along the first `k` basis vectors.
pub fn devissage_step(model: &MonomialSNCLModel, k: usize) -> Result<(MonomialSNCLModel, MonomialSNCLModel), ModelError> {
    model.validate(true)?;
    let m = model.coefficient_dim();
    if k == 0 || k >= m {
        return Err(ModelError::ModelInvalid(format!("dévissage index {k} outside 1..{m}")));
    }
    let head: Vec<usize> = (0..k).collect();
    let tail: Vec<usize> = (k..m).collect();
    let sub = model.connection.iter().map(|nj| nj.submatrix(&head, &head)).collect();
    let quot = model.connection.iter().map(|nj| nj.submatrix(&tail, &tail)).collect();
    Ok((model.with_connection(sub), model.with_connection(quot)))
}

/// Graded pieces of the coefficient flag: rank-1 models with zero connection.
pub fn no_poles_pieces(model: &MonomialSNCLModel) -> Vec<MonomialSNCLModel> {
    (0..model.coefficient_dim()).map(|_| model.with_connection(Vec::new())).collect()
}

fn model(n: usize, t_map: Vec<Vec<usize>>, components: Vec<Vec<usize>>) -> MonomialSNCLModel {
    MonomialSNCLModel { n, r: t_map.len(), t_map, components, degree_bound: 3, connection: Vec::new() }
}

pub fn canned(name: &str) -> Result<MonomialSNCLModel, ModelError> {
    Ok(match name {
        "log_point" => model(1, vec![vec![1]], vec![vec![1]]),
        "nilpotent_rank2" => model(1, vec![vec![1]], vec![vec![1]])
            .with_connection(vec![SparseRatMatrix::from_i64_rows(&[vec![0, 1], vec![0, 0]])]),
        "xy_snc" => model(2, vec![vec![1, 2]], vec![vec![1], vec![2]]),
        "xyz_snc" => model(3, vec![vec![1, 2, 3]], vec![vec![1], vec![2], vec![3]]),
        "two_log_vars" => model(4, vec![vec![1, 2], vec![3, 4]], vec![vec![1, 3], vec![1, 4], vec![2, 3], vec![2, 4]]),
        other => return Err(ModelError::UnknownModel(other.to_string())),
    })
}

/// The log point of dimension 2: `t_1 = x_1`, `t_2 = x_2`, ring `Q`.
pub fn log_point_r2() -> MonomialSNCLModel {
    model(2, vec![vec![1], vec![2]], vec![vec![1, 2]])
}

/// `N = [1]` on the log point: the connection has a unit eigenvalue.
pub fn eigenvalue_one() -> MonomialSNCLModel {
    canned("log_point").unwrap().with_connection(vec![SparseRatMatrix::from_i64_rows(&[vec![1]])])
}

/// `xy_snc` with rank-2 coefficients and `N = [[0,1],[0,0]]`.
pub fn xy_nilpotent() -> MonomialSNCLModel {
    canned("xy_snc").unwrap().with_connection(vec![SparseRatMatrix::from_i64_rows(&[vec![0, 1], vec![0, 0]])])
}

/// Map of rings `ring(μ) -> ring(λ)` for `ring(λ) ⊆ ring(μ)`, tensored with the identity on forms and coefficients.
pub fn ring_restriction(
    model: &MonomialSNCLModel,
    from: &[Vec<u32>],
    to: &[Vec<u32>],
    source: &HirschDatum,
    target: &HirschDatum,
) -> ChainMap {
    let m = model.coefficient_dim();
    let index: BTreeMap<&[u32], usize> = to.iter().enumerate().map(|(i, a)| (a.as_slice(), i)).collect();
    let maps = (0..=model.n as i32)
        .map(|q| {
            let w = num_integer::binomial(model.n, q as usize);
            let mut trip = Vec::new();
            for (ai, a) in from.iter().enumerate() {
                if let Some(&bi) = index.get(a.as_slice()) {
                    for k in 0..m * w {
                        trip.push((bi * m * w + k, ai * m * w + k, Rat::one()));
                    }
                }
            }
            (q, SparseRatMatrix::from_unique_triplets(to.len() * m * w, from.len() * m * w, trip).expect("indices in range"))
        })
        .collect();
    ChainMap::new(source.complex().clone(), target.complex().clone(), maps).expect("ring quotients commute with d")
}

fn component_label(comp: &[usize]) -> String {
    comp.iter().map(|i| format!("x{i}")).join("")
}

fn diagram_from(
    model: &MonomialSNCLModel,
    build: impl Fn(&[Vec<u32>]) -> Result<HirschDatum, ModelError>,
    restrict: impl Fn(&[Vec<u32>], &[Vec<u32>], &HirschDatum, &HirschDatum) -> ChainMap,
) -> Result<ComponentDiagram, ModelError> {
    model.validate(false)?;
    let k = model.components.len();
    let labels: Vec<String> = model.components.iter().map(|c| component_label(c)).collect();
    let ring_of = |lambda: &[usize]| -> Vec<Vec<u32>> {
        if lambda.is_empty() {
            return model.ring_monomials(None);
        }
        let v: BTreeSet<usize> = lambda.iter().flat_map(|&c| model.components[c].iter().copied()).collect();
        model.ring_monomials(Some(&v))
    };
    let subsets: Vec<Vec<usize>> = (0..=k).flat_map(|s| (0..k).combinations(s)).collect();
    let mut rings = BTreeMap::new();
    let mut data = BTreeMap::new();
    for l in &subsets {
        let ring = ring_of(l);
        data.insert(l.clone(), build(&ring)?);
        rings.insert(l.clone(), ring);
    }
    let mut restrictions = BTreeMap::new();
    for l in subsets.iter().filter(|l| !l.is_empty()) {
        for j in 0..l.len() {
            let mut mu = l.clone();
            mu.remove(j);
            let f = restrict(&rings[&mu], &rings[l], &data[&mu], &data[l]);
            restrictions.insert((mu, l.clone()), f);
        }
    }
    let global = data.remove(&Vec::new());
    Ok(ComponentDiagram::new(labels, k - 1, global, data, restrictions)?)
}

/// Diagram of the log de Rham data on the intersections `X_λ`, each over the
/// ring of `X_λ` with the full exterior factor, and ring quotient restrictions.
pub fn build_component_diagram(model: &MonomialSNCLModel) -> Result<ComponentDiagram, ModelError> {
    diagram_from(model, |ring| log_datum_on(model, ring), |a, b, s, t| ring_restriction(model, a, b, s, t))
}

/// Diagram of the truncated rings alone, as spaces in degree 0.
pub fn ring_diagram(model: &MonomialSNCLModel) -> Result<ComponentDiagram, ModelError> {
    let space = |ring: &[Vec<u32>]| -> Result<HirschDatum, ModelError> {
        let c = Complex::concentrated(0, ring.iter().map(|a| monomial_name(a)).collect());
        Ok(HirschDatum::new(c, Vec::new())?)
    };
    let restrict = |from: &[Vec<u32>], to: &[Vec<u32>], s: &HirschDatum, t: &HirschDatum| {
        let index: BTreeMap<&[u32], usize> = to.iter().enumerate().map(|(i, a)| (a.as_slice(), i)).collect();
        let trip = from.iter().enumerate().filter_map(|(k, a)| index.get(a.as_slice()).map(|&i| (i, k, Rat::one())));
        let m = SparseRatMatrix::from_unique_triplets(to.len(), from.len(), trip).expect("indices in range");
        ChainMap::new(s.complex().clone(), t.complex().clone(), BTreeMap::from([(0, m)])).expect("degree 0 only")
    };
    diagram_from(model, space, restrict)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xy_ring_has_seven_monomials() {
        let m = canned("xy_snc").unwrap();
        let ring = m.ring_monomials(None);
        let names: Vec<String> = ring.iter().map(|a| monomial_name(a)).collect();
        assert_eq!(names, vec!["1", "x1", "x2", "x1^2", "x2^2", "x1^3", "x2^3"]);
        assert_eq!(canned("two_log_vars").unwrap().ring_monomials(None).len(), 25);
    }

    #[test]
    fn xy_cohomology() {
        let m = canned("xy_snc").unwrap();
        let h = build_log_dga(&m).unwrap();
        assert_eq!(h.complex().bettis(), vec![1, 2, 1]);
        let rel = build_relative_quotient(&m).unwrap();
        assert_eq!(rel.bettis(), vec![1, 1, 0]);
    }

    #[test]
    fn relative_builder_matches_quotient() {
        for name in CANNED {
            let m = canned(name).unwrap();
            let h = build_log_dga(&m).unwrap();
            let q = h.quotient_complex(&(0..h.r()).collect::<Vec<_>>()).unwrap();
            let rel = build_relative_quotient(&m).unwrap();
            assert_eq!(q.complex(), &rel, "{name}");
        }
    }

    #[test]
    fn nilpotent_log_point() {
        let h = build_log_dga(&canned("nilpotent_rank2").unwrap()).unwrap();
        assert_eq!(h.complex().bettis(), vec![1, 1]);
        assert!(build_log_dga(&eigenvalue_one()).is_err());
        assert!(build_log_dga_unchecked(&eigenvalue_one()).unwrap().complex().is_acyclic());
    }

    #[test]
    fn ring_resolutions_are_exact() {
        let xy = ring_diagram(&canned("xy_snc").unwrap().with_degree_bound(2)).unwrap();
        assert_eq!(xy.global().unwrap().complex().dim(0), 5);
        assert_eq!(xy.level_complex(0).dim(0), 6);
        assert_eq!(xy.level_complex(1).dim(0), 1);
        assert!(crate::cech::resolution_check(&xy).unwrap().is_exact());
        for d in 0..=4 {
            let xyz = ring_diagram(&canned("xyz_snc").unwrap().with_degree_bound(d)).unwrap();
            assert!(crate::cech::resolution_check(&xyz).unwrap().is_exact(), "D = {d}");
        }
    }

    #[test]
    fn normalization_triangularizes() {
        // N = [[0,0],[1,0]] is lower triangular.
        let n = SparseRatMatrix::from_i64_rows(&[vec![0, 0], vec![1, 0]]);
        let (t, p) = normalize_connection(&[n]).unwrap();
        assert!(t[0].entries().all(|(a, b, _)| a < b));
        assert_eq!(p.shape(), (2, 2));
        assert!(matches!(
            normalize_connection(&[SparseRatMatrix::from_i64_rows(&[vec![1]])]),
            Err(ModelError::NotNilpotent)
        ));
    }
}
