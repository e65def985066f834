use std::collections::BTreeMap;

use super::pd::{degree, monomial_label, PdMonomials};
use super::{HirschDatum, HirschError};
use crate::complex::{ChainMap, Complex};
use crate::filt::FilteredComplex;
use crate::linalg::{Rat, SparseRatMatrix};

/// `⊕_{|e| <= N} u^[e] ⊗ C` with `d_H(u^[e] ⊗ c) = sum_j u^[e - δ_j] ⊗ L_j c + u^[e] ⊗ d c`.
///
/// The basis of degree `q` is monomial-major: index `m * dim C^q + c` for the
/// `m`-th monomial in [`PdMonomials`] order, so the basis of the truncation at
/// `N` is a prefix of the one at `N + 1`.
#[derive(Clone, Debug)]
pub struct TruncatedHirschExtension {
    datum: HirschDatum,
    monomials: PdMonomials,
    complex: Complex,
}

impl TruncatedHirschExtension {
    pub fn new(datum: &HirschDatum, n: usize) -> Self {
        let monomials = PdMonomials::new(datum.r(), n);
        let complex = build_complex(datum, &monomials);
        TruncatedHirschExtension { datum: datum.clone(), monomials, complex }
    }

    pub fn datum(&self) -> &HirschDatum {
        &self.datum
    }

    pub fn bound(&self) -> usize {
        self.monomials.bound()
    }

    pub fn monomials(&self) -> &PdMonomials {
        &self.monomials
    }

    pub fn complex(&self) -> &Complex {
        &self.complex
    }

    /// Index of `u^[e] ⊗ c_k` in degree `q`.
    pub fn index(&self, e: &[u32], q: i32, k: usize) -> Option<usize> {
        self.monomials.index_of(e).map(|m| m * self.datum.complex().dim(q) + k)
    }

    /// `(monomial index, basis index in C^q)` of a basis vector of degree `q`.
    pub fn split_index(&self, q: i32, i: usize) -> (usize, usize) {
        let n = self.datum.complex().dim(q);
        (i / n, i % n)
    }

    /// Hodge filtration: `u^[e] ⊗ c` sits in level `|e| + level(c)`.
    ///
    /// `form_levels` gives the level of each basis vector of `C`; by default the
    /// level of a vector of degree `q` is `q` (the stupid filtration).
    pub fn hodge_filtration(&self, form_levels: Option<&BTreeMap<i32, Vec<i32>>>) -> Result<FilteredComplex, HirschError> {
        let c = self.datum.complex();
        let levels = c
            .degrees()
            .map(|q| {
                let mut l = Vec::with_capacity(self.complex.dim(q));
                for e in self.monomials.iter() {
                    let k = degree(e) as i32;
                    for i in 0..c.dim(q) {
                        let base = form_levels.map_or(q, |f| f[&q][i]);
                        l.push(k + base);
                    }
                }
                (q, l)
            })
            .collect();
        Ok(FilteredComplex::from_levels(self.complex.clone(), levels)?)
    }

    /// Column filtration by u-degree: `G^p` is spanned by the `u^[e] ⊗ c` with `|e| <= -p`,
    /// so the levels run from `-N` to `0` and `gr^{-k}` is the u-degree `k` column.
    pub fn column_filtration(&self) -> FilteredComplex {
        let c = self.datum.complex();
        let levels = c
            .degrees()
            .map(|q| {
                let l = self
                    .monomials
                    .iter()
                    .flat_map(|e| std::iter::repeat_n(-(degree(e) as i32), c.dim(q)))
                    .collect();
                (q, l)
            })
            .collect();
        FilteredComplex::from_levels(self.complex.clone(), levels).expect("d_H never raises u-degree")
    }

    /// `u^[e] ⊗ c -> 0` for `|e| > 0` and `c -> [c]` in the quotient by all `im L_j`.
    pub fn augmentation(&self) -> Result<(ChainMap, super::HirschQuotient), HirschError> {
        let all: Vec<usize> = (0..self.datum.r()).collect();
        let quot = self.datum.quotient_complex(&all)?;
        let c = self.datum.complex();
        let maps = c
            .degrees()
            .map(|q| {
                let p = quot.projection.map(q);
                (q, p.embed(p.rows(), self.complex.dim(q), 0, 0))
            })
            .collect();
        let aug = ChainMap::new(self.complex.clone(), quot.complex().clone(), maps)?;
        Ok((aug, quot))
    }

    /// Weight tags of the extension, inherited from the datum.
    pub fn weights(&self) -> Option<BTreeMap<i32, Vec<usize>>> {
        let w = self.datum.weights()?;
        Some(
            self.datum
                .complex()
                .degrees()
                .map(|q| (q, (0..self.monomials.len()).flat_map(|_| w[&q].iter().copied()).collect()))
                .collect(),
        )
    }
}

fn build_complex(datum: &HirschDatum, monomials: &PdMonomials) -> Complex {
    let c = datum.complex();
    let r = datum.r();
    let nm = monomials.len();
    let mut labels = Vec::new();
    let mut ds = Vec::new();
    for q in c.degrees() {
        let (n0, n1) = (c.dim(q), c.dim(q + 1));
        let mut l = Vec::with_capacity(nm * n0);
        for e in monomials.iter() {
            let prefix = monomial_label(e);
            for lab in c.labels(q) {
                l.push(if prefix.is_empty() { lab.clone() } else { format!("{prefix}*{lab}") });
            }
        }
        labels.push(l);
        let d = c.d(q);
        let ops: Vec<SparseRatMatrix> = (0..r).map(|j| datum.op(j, q)).collect();
        let mut trip: Vec<(usize, usize, Rat)> = Vec::new();
        for (m, e) in monomials.iter().enumerate() {
            for (i, k, v) in d.entries() {
                trip.push((m * n1 + i, m * n0 + k, v.clone()));
            }
            for (j, op) in ops.iter().enumerate() {
                if e[j] == 0 {
                    continue;
                }
                let mut lower = e.to_vec();
                lower[j] -= 1;
                let target = monomials.index_of(&lower).expect("lower monomial is in the truncation");
                for (i, k, v) in op.entries() {
                    trip.push((target * n1 + i, m * n0 + k, v.clone()));
                }
            }
        }
        ds.push(SparseRatMatrix::from_triplets(nm * n1, nm * n0, trip).expect("indices in range"));
    }
    Complex::new_unchecked(c.min_deg(), labels, ds).expect("block shapes agree")
}

/// Kronecker product `I_m ⊗ a`.
pub(crate) fn kron_identity(m: usize, a: &SparseRatMatrix) -> SparseRatMatrix {
    let (r, c) = a.shape();
    let trip = (0..m).flat_map(|b| a.entries().map(move |(i, j, v)| (b * r + i, b * c + j, v.clone())));
    SparseRatMatrix::from_unique_triplets(m * r, m * c, trip).expect("indices in range")
}
