use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;

use super::extension::{kron_identity, TruncatedHirschExtension};
use super::{HirschDatum, HirschError};
use crate::linalg::{self, EchelonBasis, SparseRatMatrix};

/// Parameters of the four-rank colimit test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct StabilizeParams {
    /// First truncation tried; defaults to `max_deg(C) + 2`.
    pub n0: Option<usize>,
    pub window: usize,
    /// Largest truncation used as a source; defaults to `n0 + 8`.
    pub n_max: Option<usize>,
}

impl Default for StabilizeParams {
    fn default() -> Self {
        StabilizeParams { n0: None, window: 2, n_max: None }
    }
}

impl StabilizeParams {
    pub fn start(&self, datum: &HirschDatum) -> usize {
        self.n0.unwrap_or_else(|| (datum.complex().max_deg() + 2).max(0) as usize)
    }

    pub fn limit(&self, datum: &HirschDatum) -> usize {
        self.n_max.unwrap_or_else(|| self.start(datum) + 8)
    }
}

/// Rank of `H^q(trunc_n) -> H^q(trunc_{n + w})`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RankEntry {
    pub n: usize,
    pub w: usize,
    pub rank: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StabilizationCertificate {
    pub degree: i32,
    pub n0: usize,
    pub window: usize,
    /// The four agreeing ranks.
    pub ranks: Vec<RankEntry>,
    /// `dim H^q(trunc_n)` for the two sources.
    pub truncation_dims: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Stabilized {
    pub dim: usize,
    pub certificate: StabilizationCertificate,
}

fn prefix(monomial_count: usize, dim: usize) -> Vec<usize> {
    (0..monomial_count * dim).collect()
}

/// Ranks of the maps `H^q(A_n) -> H^q(B_m)` for each pair `(n, m)`, and `dim H^q(A_n)` for each `n`.
///
/// With `f = None` the source and target are the same datum and the map is the
/// inclusion of truncations. Otherwise `f` is `f^q: A^q -> B^q` extended by `I ⊗ f^q`.
fn ranks_for(
    src: &HirschDatum,
    tgt: &HirschDatum,
    f: Option<&SparseRatMatrix>,
    q: i32,
    pairs: &[(usize, usize)],
) -> (Vec<usize>, BTreeMap<usize, usize>) {
    let ns: BTreeSet<usize> = pairs.iter().map(|p| p.0).collect();
    let ms: BTreeSet<usize> = pairs.iter().map(|p| p.1).collect();
    let m_max = *ms.iter().chain(ns.iter()).max().expect("pairs are nonempty");
    let tgt_ext = TruncatedHirschExtension::new(tgt, m_max);
    let src_ext = if f.is_some() { TruncatedHirschExtension::new(src, m_max) } else { tgt_ext.clone() };
    let tc = tgt.complex();
    let sc = src.complex();
    let tmon = tgt_ext.monomials();
    let smon = src_ext.monomials();

    // Boundaries of the target, snapshotted at each needed bound.
    let mut wanted: BTreeSet<usize> = ms.clone();
    if f.is_none() {
        wanted.extend(ns.iter().copied());
    }
    let d_prev = tgt_ext.complex().d(q - 1);
    let cols = d_prev.columns();
    let mut basis = EchelonBasis::new(tgt_ext.complex().dim(q));
    let mut snapshots: BTreeMap<usize, EchelonBasis> = BTreeMap::new();
    let mut done = 0;
    for &m in &wanted {
        let upto = tmon.count_upto(m) * tc.dim(q - 1);
        for c in &cols[done..upto] {
            basis.insert(c);
        }
        done = upto;
        snapshots.insert(m, basis.clone());
    }

    let mut cycles: BTreeMap<usize, SparseRatMatrix> = BTreeMap::new();
    let mut dims = BTreeMap::new();
    let dq = src_ext.complex().d(q);
    for &n in &ns {
        let rows = prefix(smon.count_upto(n), sc.dim(q + 1));
        let cols = prefix(smon.count_upto(n), sc.dim(q));
        let z = linalg::kernel_basis(&dq.submatrix(&rows, &cols));
        if f.is_none() {
            dims.insert(n, z.cols() - snapshots[&n].rank());
        }
        cycles.insert(n, z);
    }
    if let Some(fq) = f {
        for &n in &ns {
            let b = linalg::rank(&src_ext.complex().d(q - 1).submatrix(
                &prefix(smon.count_upto(n), sc.dim(q)),
                &prefix(smon.count_upto(n), sc.dim(q - 1)),
            ));
            dims.insert(n, cycles[&n].cols() - b);
        }
        for z in cycles.values_mut() {
            let count = z.rows() / sc.dim(q).max(1);
            let mapped = kron_identity(count, fq).mul(z);
            *z = mapped;
        }
    }
    let ranks = pairs
        .iter()
        .map(|&(n, m)| {
            let mut b = snapshots[&m].clone();
            let base = b.rank();
            let z = &cycles[&n];
            let lifted = if z.rows() == b.dim() { z.clone() } else { z.embed(b.dim(), z.cols(), 0, 0) };
            for c in lifted.columns() {
                b.insert(&c);
            }
            b.rank() - base
        })
        .collect();
    (ranks, dims)
}

fn four_pairs(n: usize, w: usize) -> [(usize, usize); 4] {
    [(n, n + w), (n, n + w + 1), (n + 1, n + 1 + w), (n + 1, n + w + 2)]
}

/// `dim` of `H^q` of the untruncated extension, certified by four agreeing transition ranks.
pub fn stabilized_cohomology(datum: &HirschDatum, q: i32, params: StabilizeParams) -> Result<Stabilized, HirschError> {
    let blocks = datum.weight_blocks();
    let start = params.start(datum);
    let limit = params.limit(datum).max(start + 1);
    let mut table = Vec::new();
    for n in start..limit {
        let pairs = four_pairs(n, params.window);
        let per_block: Vec<(Vec<usize>, BTreeMap<usize, usize>)> =
            blocks.par_iter().map(|(_, b)| ranks_for(b, b, None, q, &pairs)).collect();
        let mut ranks = vec![0; 4];
        let mut dims: BTreeMap<usize, usize> = BTreeMap::new();
        for (r, d) in per_block {
            for (acc, x) in ranks.iter_mut().zip(r) {
                *acc += x;
            }
            for (k, v) in d {
                *dims.entry(k).or_default() += v;
            }
        }
        let entries: Vec<RankEntry> =
            pairs.iter().zip(&ranks).map(|(&(a, b), &rank)| RankEntry { n: a, w: b - a, rank }).collect();
        if ranks.iter().all(|&x| x == ranks[0]) {
            return Ok(Stabilized {
                dim: ranks[0],
                certificate: StabilizationCertificate {
                    degree: q,
                    n0: n,
                    window: params.window,
                    ranks: entries,
                    truncation_dims: dims.into_iter().collect(),
                },
            });
        }
        table.extend(entries);
    }
    Err(HirschError::NotStabilized { degree: q, table })
}

/// Colimit comparison for a map of data extended by `I ⊗ f`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StabilizedMap {
    pub degree: i32,
    pub source_dim: usize,
    pub target_dim: usize,
    /// Rank of the induced map between the colimits.
    pub rank: usize,
    pub iso: bool,
    pub ranks: Vec<RankEntry>,
}

/// Whether `f` extended to Hirsch extensions induces an isomorphism on the colimit `H^q`.
pub fn stabilized_map(
    f: &crate::complex::ChainMap,
    src: &HirschDatum,
    tgt: &HirschDatum,
    q: i32,
    params: StabilizeParams,
) -> Result<StabilizedMap, HirschError> {
    let s = stabilized_cohomology(src, q, params)?;
    let t = stabilized_cohomology(tgt, q, params)?;
    let start = params.start(src).max(params.start(tgt));
    let limit = params.limit(src).max(start + 1);
    let fq = f.map(q);
    let mut table = Vec::new();
    for n in start..limit {
        let pairs = four_pairs(n, params.window);
        let (ranks, _) = ranks_for(src, tgt, Some(&fq), q, &pairs);
        let entries: Vec<RankEntry> =
            pairs.iter().zip(&ranks).map(|(&(a, b), &rank)| RankEntry { n: a, w: b - a, rank }).collect();
        if ranks.iter().all(|&x| x == ranks[0]) {
            let rank = ranks[0];
            return Ok(StabilizedMap {
                degree: q,
                source_dim: s.dim,
                target_dim: t.dim,
                rank,
                iso: rank == s.dim && rank == t.dim,
                ranks: entries,
            });
        }
        table.extend(entries);
    }
    Err(HirschError::NotStabilized { degree: q, table })
}
