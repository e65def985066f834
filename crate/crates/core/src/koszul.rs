//! Divided-power Koszul complexes `Kos(ψ, n)^q = Γ_{n-q}(E1) ⊗ Λ^q(E2)`.

use std::collections::BTreeMap;

use itertools::Itertools;
use num_integer::binomial;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{ChainMap, Complex, ComplexError};
use crate::hirsch::pd::{compositions_desc, monomial_label};
use crate::hirsch::{ExteriorLayout, HirschDatum, HirschError, TruncatedHirschExtension};
use crate::linalg::{self, Rat, SparseRatMatrix};

#[derive(Debug, Error)]
pub enum KoszulError {
    #[error("datum is not of exterior type: {0}")]
    NotExteriorType(String),
    #[error("truncation {bound} is below the weight {weight}")]
    TruncationTooSmall { bound: usize, weight: usize },
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Hirsch(#[from] HirschError),
}

/// `ψ: E1 -> E2`, optionally tensored with a coefficient space of dimension `m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KoszulInput {
    /// `E2_dim x E1_dim`.
    pub psi: SparseRatMatrix,
    #[serde(default = "one")]
    pub m: usize,
}

fn one() -> usize {
    1
}

impl KoszulInput {
    pub fn new(psi: SparseRatMatrix) -> Self {
        KoszulInput { psi, m: 1 }
    }

    pub fn e1_dim(&self) -> usize {
        self.psi.cols()
    }

    pub fn e2_dim(&self) -> usize {
        self.psi.rows()
    }
}

/// Sorted `q`-subsets of `0..n` in lexicographic order.
pub fn wedge_basis(n: usize, q: usize) -> Vec<Vec<usize>> {
    (0..n).combinations(q).collect()
}

/// `x_k ∧ x_S` as `(sign, S ∪ {k})`, or `None` if `k ∈ S`.
pub fn wedge_insert(k: usize, s: &[usize]) -> Option<(i64, Vec<usize>)> {
    let pos = match s.binary_search(&k) {
        Ok(_) => return None,
        Err(p) => p,
    };
    let mut out = s.to_vec();
    out.insert(pos, k);
    Some((if pos % 2 == 0 { 1 } else { -1 }, out))
}

/// `dim Γ_d` of a `k`-dimensional space.
pub fn gamma_dim(k: usize, d: usize) -> u64 {
    if d == 0 {
        1
    } else if k == 0 {
        0
    } else {
        binomial((k + d - 1) as u64, d as u64)
    }
}

#[derive(Clone, Debug)]
pub struct KoszulComplex {
    pub n: usize,
    pub input: KoszulInput,
    /// Coefficients ⊗ Kos, degrees `0..=n`, basis coefficient-major, then
    /// divided-power monomials of degree `n - q` (descending lex), then wedge subsets.
    pub complex: Complex,
}

pub fn koszul_complex(inp: &KoszulInput, n: usize) -> KoszulComplex {
    let (e1, e2, m) = (inp.e1_dim(), inp.e2_dim(), inp.m);
    let psi_cols: Vec<Vec<(usize, Rat)>> = (0..e1).map(|j| inp.psi.column(j)).collect();
    let mut labels = Vec::new();
    let mut ds = Vec::new();
    let basis = |q: usize| -> (Vec<Vec<u32>>, Vec<Vec<usize>>) {
        if q > n {
            return (Vec::new(), Vec::new());
        }
        (compositions_desc(e1, (n - q) as u32), wedge_basis(e2, q))
    };
    for q in 0..=n {
        let (mons, wedges) = basis(q);
        let (tmons, twedges) = basis(q + 1);
        let single = mons.len() * wedges.len();
        let tsingle = tmons.len() * twedges.len();
        let mut l = Vec::with_capacity(m * single);
        for c in 0..m {
            for e in &mons {
                for s in &wedges {
                    let forms: String = s.iter().map(|k| format!("f{}", k + 1)).join("^");
                    let mono = monomial_label(e);
                    let body = match (mono.is_empty(), forms.is_empty()) {
                        (true, true) => "1".to_string(),
                        (false, true) => mono,
                        (true, false) => forms,
                        (false, false) => format!("{mono}*{forms}"),
                    };
                    l.push(if m == 1 { body } else { format!("c{}*{body}", c + 1) });
                }
            }
        }
        labels.push(l);
        let mut trip = Vec::new();
        if q < n {
            let mut tindex: BTreeMap<(&[u32], &[usize]), usize> = BTreeMap::new();
            for (a, e) in tmons.iter().enumerate() {
                for (b, s) in twedges.iter().enumerate() {
                    tindex.insert((e.as_slice(), s.as_slice()), a * twedges.len() + b);
                }
            }
            for (a, e) in mons.iter().enumerate() {
                for (b, s) in wedges.iter().enumerate() {
                    let col = a * wedges.len() + b;
                    for j in 0..e1 {
                        if e[j] == 0 {
                            continue;
                        }
                        let mut lower = e.clone();
                        lower[j] -= 1;
                        for (k, v) in &psi_cols[j] {
                            if let Some((sign, t)) = wedge_insert(*k, s) {
                                let row = tindex[&(lower.as_slice(), t.as_slice())];
                                let val = if sign > 0 { v.clone() } else { -v };
                                for c in 0..m {
                                    trip.push((c * tsingle + row, c * single + col, val.clone()));
                                }
                            }
                        }
                    }
                }
            }
        }
        ds.push(SparseRatMatrix::from_triplets(m * tsingle, m * single, trip).expect("indices in range"));
    }
    let complex = Complex::new_unchecked(0, labels, ds).expect("block shapes agree");
    KoszulComplex { n, input: inp.clone(), complex }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KoszulProfileRow {
    pub degree: i32,
    pub computed: usize,
    pub closed_form: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KoszulProfile {
    pub n: usize,
    pub rank_psi: usize,
    pub rows: Vec<KoszulProfileRow>,
}

impl KoszulProfile {
    pub fn matches(&self) -> bool {
        self.rows.iter().all(|r| r.computed == r.closed_form)
    }
}

/// Cohomology dimensions of `Kos(ψ, n)` next to `m · dim Γ_{n-q}(ker ψ) · dim Λ^q(coker ψ)`.
pub fn koszul_profile(inp: &KoszulInput, n: usize) -> KoszulProfile {
    let kos = koszul_complex(inp, n);
    let rank = linalg::rank(&inp.psi);
    let (k, c) = (inp.e1_dim() - rank, inp.e2_dim() - rank);
    let rows = (0..=n)
        .map(|q| {
            let closed = gamma_dim(k, n - q) * if q <= c { binomial(c as u64, q as u64) } else { 0 };
            KoszulProfileRow {
                degree: q as i32,
                computed: kos.complex.betti(q as i32),
                closed_form: (closed as usize) * inp.m,
            }
        })
        .collect();
    KoszulProfile { n, rank_psi: rank, rows }
}

/// Result of [`gr_identify`].
#[derive(Clone, Debug)]
pub struct GrIdentification {
    pub weight: usize,
    /// `gr_F^i` of the truncated extension.
    pub gr: Complex,
    /// Coefficients ⊗ `Kos(φ, i)`, re-indexed to the degree range of the datum.
    pub koszul: Complex,
    /// Basis-to-basis map `gr -> koszul`.
    pub map: ChainMap,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GrVerdict {
    pub weight: usize,
    pub gr_dims: Vec<usize>,
    pub koszul_dims: Vec<usize>,
    pub bijective: bool,
    pub chain_map: bool,
}

impl GrVerdict {
    pub fn is_iso(&self) -> bool {
        self.bijective && self.chain_map
    }
}

/// Checks that every `L_j` is `φ(u_j) ∧ -` on the stated layout.
pub fn check_exterior(h: &HirschDatum) -> Result<&ExteriorLayout, KoszulError> {
    let lay = h.exterior().ok_or_else(|| KoszulError::NotExteriorType("no exterior layout attached".into()))?;
    let c = h.complex();
    let m = lay.coefficient_labels.len();
    if lay.phi.shape() != (lay.form_count, h.r()) {
        return Err(KoszulError::NotExteriorType(format!("φ has shape {:?}", lay.phi.shape())));
    }
    for q in c.degrees() {
        let expect = if q < 0 || q as usize > lay.form_count { 0 } else { m * binomial(lay.form_count, q as usize) };
        if c.dim(q) != expect {
            return Err(KoszulError::NotExteriorType(format!("degree {q} has dimension {}, expected {expect}", c.dim(q))));
        }
    }
    for j in 0..h.r() {
        for q in c.degrees().filter(|&q| q >= 0 && (q as usize) < lay.form_count) {
            let want = wedge_operator(lay, j, q as usize, m);
            if h.op(j, q) != want {
                return Err(KoszulError::NotExteriorType(format!("L_{} is not left wedge in degree {q}", j + 1)));
            }
        }
    }
    Ok(lay)
}

/// Matrix of `φ(u_j) ∧ -: coefficients ⊗ Λ^q -> coefficients ⊗ Λ^{q+1}`.
pub fn wedge_operator(lay: &ExteriorLayout, j: usize, q: usize, m: usize) -> SparseRatMatrix {
    let src = wedge_basis(lay.form_count, q);
    let tgt = wedge_basis(lay.form_count, q + 1);
    let index: BTreeMap<&[usize], usize> = tgt.iter().enumerate().map(|(i, s)| (s.as_slice(), i)).collect();
    let col = lay.phi.column(j);
    let mut trip = Vec::new();
    for (b, s) in src.iter().enumerate() {
        for (k, v) in &col {
            if let Some((sign, t)) = wedge_insert(*k, s) {
                let val = if sign > 0 { v.clone() } else { -v };
                for c in 0..m {
                    trip.push((c * tgt.len() + index[t.as_slice()], c * src.len() + b, val.clone()));
                }
            }
        }
    }
    SparseRatMatrix::from_triplets(m * tgt.len(), m * src.len(), trip).expect("indices in range")
}

/// Identifies `gr_F^i` of the truncation at `bound` with coefficients ⊗ `Kos(φ, i)`.
pub fn gr_identify(h: &HirschDatum, i: usize, bound: usize) -> Result<(GrIdentification, GrVerdict), KoszulError> {
    if bound < i {
        return Err(KoszulError::TruncationTooSmall { bound, weight: i });
    }
    let lay = check_exterior(h)?;
    let m = lay.coefficient_labels.len();
    let c = h.complex();
    let ext = TruncatedHirschExtension::new(h, bound);
    let gr = ext.hodge_filtration(None)?.gr(i as i32);
    let kos = koszul_complex(&KoszulInput { psi: lay.phi.clone(), m }, i);
    let target = kos.complex.with_range(c.min_deg(), c.max_deg());
    let r = h.r();
    let mut maps = BTreeMap::new();
    let mut bijective = true;
    for q in gr.complex.degrees() {
        let reps = &gr.reps[&q];
        let nq = gr.complex.dim(q);
        let mut trip = Vec::with_capacity(nq);
        let wedges = if q >= 0 { wedge_basis(lay.form_count, q as usize) } else { Vec::new() };
        let kmons = if q >= 0 && q as usize <= i { compositions_desc(r, (i - q as usize) as u32) } else { Vec::new() };
        let single = kmons.len() * wedges.len();
        for k in 0..nq {
            let coord = reps.column(k)[0].0;
            let (mono, cidx) = ext.split_index(q, coord);
            let e = ext.monomials().get(mono);
            let per = wedges.len().max(1);
            let (coef, sub) = (cidx / per, cidx % per);
            let a = kmons.iter().position(|x| x.as_slice() == e).expect("u-degree of gr_F^i is i - q");
            trip.push((coef * single + a * wedges.len() + sub, k, Rat::one()));
        }
        let mat = SparseRatMatrix::from_triplets(target.dim(q), nq, trip).expect("indices in range");
        bijective &= nq == target.dim(q) && linalg::rank(&mat) == nq;
        maps.insert(q, mat);
    }
    let map = ChainMap::new_unchecked(gr.complex.clone(), target.clone(), maps)?;
    let chain_map = map.validate().is_ok();
    let verdict = GrVerdict {
        weight: i,
        gr_dims: gr.complex.dims(),
        koszul_dims: target.dims(),
        bijective,
        chain_map,
    };
    Ok((GrIdentification { weight: i, gr: gr.complex, koszul: target, map }, verdict))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>]) -> SparseRatMatrix {
        SparseRatMatrix::from_i64_rows(rows)
    }

    #[test]
    fn identity_weight_one_is_acyclic() {
        let k = koszul_complex(&KoszulInput::new(m(&[vec![1]])), 1);
        assert_eq!(k.complex.dims(), vec![1, 1]);
        assert!(k.complex.is_acyclic());
    }

    #[test]
    fn zero_map_keeps_everything() {
        let k = koszul_complex(&KoszulInput::new(m(&[vec![0]])), 1);
        assert_eq!(k.complex.bettis(), vec![1, 1]);
    }

    #[test]
    fn injective_into_plane() {
        let inp = KoszulInput::new(m(&[vec![1], vec![0]]));
        let k = koszul_complex(&inp, 2);
        assert_eq!(k.complex.dims(), vec![1, 2, 1]);
        assert_eq!(k.complex.bettis(), vec![0, 0, 0]);
        assert!(koszul_profile(&inp, 2).matches());
    }

    #[test]
    fn wedge_signs() {
        assert_eq!(wedge_insert(0, &[1, 2]), Some((1, vec![0, 1, 2])));
        assert_eq!(wedge_insert(1, &[0, 2]), Some((-1, vec![0, 1, 2])));
        assert_eq!(wedge_insert(2, &[0, 1]), Some((1, vec![0, 1, 2])));
        assert_eq!(wedge_insert(1, &[1]), None);
    }
}
