use std::collections::BTreeMap;

use serde::Serialize;

use super::stabilize::{stabilized_cohomology, StabilizeParams, Stabilized};
use super::{HirschDatum, HirschError, HirschQuotient};
use crate::complex::{check_exact_sequence, ChainMap, Complex, ExactnessReport};
use crate::linalg::{self, SparseRatMatrix};

/// `C_i = C / sum_{j <= i} im L_j` for `i = 0..=r`, with `C_0 = C`.
pub fn quotient_tower(h: &HirschDatum) -> Result<Vec<HirschQuotient>, HirschError> {
    (0..=h.r()).map(|i| h.quotient_complex(&(0..i).collect::<Vec<_>>())).collect()
}

/// The short exact sequence `0 -> C_i[-1] -> C_{i-1} -> C_i -> 0` (for `1 <= i <= r`),
/// where the first map is induced by `L_i`.
///
/// Exactness on the left requires `ker L_i = im L_i` on `C_{i-1}`.
#[derive(Clone, Debug)]
pub struct ResidueSequence {
    pub index: usize,
    pub shifted: Complex,
    pub middle: Complex,
    pub quotient: Complex,
    pub residue: ChainMap,
    pub projection: ChainMap,
}

pub fn residue_sequence(h: &HirschDatum, i: usize) -> Result<ResidueSequence, HirschError> {
    if i == 0 || i > h.r() {
        return Err(HirschError::Shape(format!("residue index {i} outside 1..={}", h.r())));
    }
    let prev = h.quotient_complex(&(0..i - 1).collect::<Vec<_>>())?;
    let cur = h.quotient_complex(&(0..i).collect::<Vec<_>>())?;
    let c = h.complex();
    let shifted = cur.complex().shift(-1);
    let mut lmaps = BTreeMap::new();
    let mut pmaps = BTreeMap::new();
    for q in shifted.degrees() {
        // Lift a class of C_i^{q-1} by its kept coordinate, apply L_i, project to C_{i-1}^q.
        let lift = SparseRatMatrix::identity(c.dim(q - 1)).select_columns(cur.kept.get(&(q - 1)).map_or(&[][..], |v| v));
        lmaps.insert(q, prev.projection.map(q).mul(&h.op(i - 1, q - 1)).mul(&lift));
    }
    for q in prev.complex().degrees() {
        let lift = SparseRatMatrix::identity(c.dim(q)).select_columns(&prev.kept[&q]);
        pmaps.insert(q, cur.projection.map(q).mul(&lift));
    }
    let residue = ChainMap::new(shifted.clone(), prev.complex().clone(), lmaps)?;
    let projection = ChainMap::new(prev.complex().clone(), cur.complex().clone(), pmaps)?;
    Ok(ResidueSequence {
        index: i,
        shifted,
        middle: prev.complex().clone(),
        quotient: cur.complex().clone(),
        residue,
        projection,
    })
}

impl ResidueSequence {
    pub fn exactness(&self) -> Result<ExactnessReport, HirschError> {
        Ok(check_exact_sequence(&[self.residue.clone(), self.projection.clone()], true)?)
    }

    /// The long sequence `H^{q-1}(C_i) -> H^q(C_{i-1}) -> H^q(C_i)`, checked where
    /// `L_i` should be injective and the projection surjective on cohomology.
    pub fn long_sequence(&self) -> LongSequenceReport {
        let lo = self.middle.min_deg();
        let hi = self.middle.max_deg() + 1;
        let rows = (lo..=hi)
            .map(|q| {
                let before = self.shifted.betti(q);
                let middle = self.middle.betti(q);
                let after = self.quotient.betti(q);
                let residue_rank = self.residue.induced_rank(q);
                let projection_rank = self.projection.induced_rank(q);
                LongSequenceRow {
                    degree: q,
                    before,
                    middle,
                    after,
                    residue_rank,
                    projection_rank,
                    splits: residue_rank == before && projection_rank == after && middle == before + after,
                }
            })
            .collect();
        LongSequenceReport { index: self.index, rows }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LongSequenceRow {
    pub degree: i32,
    /// `dim H^{q-1}(C_i)`.
    pub before: usize,
    /// `dim H^q(C_{i-1})`.
    pub middle: usize,
    /// `dim H^q(C_i)`.
    pub after: usize,
    pub residue_rank: usize,
    pub projection_rank: usize,
    pub splits: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LongSequenceReport {
    pub index: usize,
    pub rows: Vec<LongSequenceRow>,
}

impl LongSequenceReport {
    pub fn all_split(&self) -> bool {
        self.rows.iter().all(|r| r.splits)
    }
}

/// Whether `L_i` has `ker = im` on `C_{i-1}` in every degree.
pub fn residue_kernel_defect(h: &HirschDatum, i: usize) -> Result<Vec<(i32, usize)>, HirschError> {
    let prev = h.quotient_complex(&(0..i - 1).collect::<Vec<_>>())?;
    let d = &prev.datum;
    let mut out = Vec::new();
    for q in d.complex().degrees() {
        let l = d.op(0, q);
        let kernel = d.complex().dim(q) - linalg::rank(&l);
        let image = linalg::rank(&d.op(0, q - 1));
        out.push((q, kernel - image));
    }
    Ok(out)
}

/// Stabilized `H^q` of each stage's extension against `H^q(C_r)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TowerRow {
    pub stage: usize,
    pub degree: i32,
    pub stabilized: usize,
    pub relative: usize,
}

pub fn tower_comparison(
    h: &HirschDatum,
    degrees: impl IntoIterator<Item = i32> + Clone,
    params: StabilizeParams,
) -> Result<Vec<(TowerRow, Stabilized)>, HirschError> {
    let tower = quotient_tower(h)?;
    let relative = tower.last().expect("tower is nonempty").complex().clone();
    let mut out = Vec::new();
    for (stage, quot) in tower.iter().enumerate().take(h.r()) {
        for q in degrees.clone() {
            let s = stabilized_cohomology(&quot.datum, q, params)?;
            out.push((TowerRow { stage, degree: q, stabilized: s.dim, relative: relative.betti(q) }, s));
        }
    }
    Ok(out)
}
