//! Seeded random instances: complexes, quasi-isomorphisms and Hirsch data of
//! the form `K ⊗ Λ(V)` with `L_j = φ(u_j) ∧ -`.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::complex::{direct_sum, mapping_cone, numbered_labels, ChainMap, Complex};
use crate::hirsch::{ExteriorLayout, HirschDatum};
use crate::koszul::{wedge_basis, wedge_operator};
use crate::linalg::{self, Rat, SparseRatMatrix};

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.gen_range(lo..=hi)
    }

    pub fn matrix(&mut self, rows: usize, cols: usize, bound: i64) -> SparseRatMatrix {
        let dense: Vec<Vec<i64>> = (0..rows).map(|_| (0..cols).map(|_| self.int(-bound, bound)).collect()).collect();
        from_dense_i64(&dense, cols)
    }

    /// A `rows x cols` matrix of rank at most `rank`, as a product through `Q^rank`.
    pub fn matrix_of_rank(&mut self, rows: usize, cols: usize, rank: usize) -> SparseRatMatrix {
        self.matrix(rows, rank, 2).mul(&self.matrix(rank, cols, 2))
    }

    fn invertible(&mut self, n: usize) -> SparseRatMatrix {
        let mut lower = SparseRatMatrix::identity(n);
        let mut upper = SparseRatMatrix::identity(n);
        let mut lt = Vec::new();
        let mut ut = Vec::new();
        for i in 0..n {
            for j in 0..i {
                lt.push((i, j, Rat::from_int(self.int(-2, 2))));
                ut.push((j, i, Rat::from_int(self.int(-2, 2))));
            }
        }
        lower = lower.add(&SparseRatMatrix::from_triplets(n, n, lt).expect("indices in range"));
        upper = upper.add(&SparseRatMatrix::from_triplets(n, n, ut).expect("indices in range"));
        lower.mul(&upper)
    }

    /// A complex on degrees `0..=top` with `dim <= max_dim`, in a random basis.
    /// With `acyclic` every cohomology group vanishes.
    pub fn complex(&mut self, top: i32, max_dim: usize, acyclic: bool) -> Complex {
        let len = (top + 1) as usize;
        // Degree q splits as B^q ⊕ H^q ⊕ X^q with d: X^q ≅ B^{q+1}.
        let mut b = vec![0usize; len + 1];
        let mut h = vec![0usize; len];
        let mut x = vec![0usize; len];
        for q in 0..len {
            let room = max_dim.saturating_sub(b[q]);
            h[q] = if acyclic { 0 } else { self.rng.gen_range(0..=room.min(1)) };
            x[q] = if q + 1 == len { 0 } else { self.rng.gen_range(0..=(room - h[q]).min(2)) };
            b[q + 1] = x[q];
        }
        let dims: Vec<usize> = (0..len).map(|q| b[q] + h[q] + x[q]).collect();
        let frames: Vec<SparseRatMatrix> = dims.iter().map(|&n| self.invertible(n)).collect();
        let ds = (0..len)
            .map(|q| {
                let next = dims.get(q + 1).copied().unwrap_or(0);
                let std = SparseRatMatrix::from_triplets(
                    next,
                    dims[q],
                    (0..x[q]).map(|k| (k, b[q] + h[q] + k, Rat::one())),
                )
                .expect("indices in range");
                if next == 0 {
                    return std;
                }
                let inv = linalg::inverse(&frames[q]).expect("unitriangular product is invertible");
                frames[q + 1].mul(&std).mul(&inv)
            })
            .collect();
        let labels = dims.iter().enumerate().map(|(q, &n)| numbered_labels(&format!("k{q}_"), n)).collect();
        Complex::new(0, labels, ds).expect("conjugated standard form is a complex")
    }

    /// `c · id + d t + t d` on `K`, stacked over a null-homotopic map `d s + s d` into a random acyclic `E`.
    ///
    /// The result `K -> K ⊕ E` is a quasi-isomorphism exactly when `c != 0`.
    pub fn homotopy_perturbation(&mut self, k: &Complex, c: i64) -> ChainMap {
        let e = self.complex(k.max_deg(), 2, true);
        let target = direct_sum(&[k, &e]);
        let hom = |this: &mut Self, from: &Complex, to: &Complex, q: i32| this.matrix(to.dim(q - 1), from.dim(q), 1);
        let t: BTreeMap<i32, SparseRatMatrix> = k.degrees().chain([k.max_deg() + 1]).map(|q| (q, hom(self, k, k, q))).collect();
        let s: BTreeMap<i32, SparseRatMatrix> = k.degrees().chain([k.max_deg() + 1]).map(|q| (q, hom(self, k, &e, q))).collect();
        let maps = k
            .degrees()
            .map(|q| {
                let phi = SparseRatMatrix::identity(k.dim(q))
                    .scale(&Rat::from_int(c))
                    .add(&k.d(q - 1).mul(&t[&q]))
                    .add(&t[&(q + 1)].mul(&k.d(q)));
                let h = e.d(q - 1).mul(&s[&q]).add(&s[&(q + 1)].mul(&k.d(q)));
                (q, SparseRatMatrix::vstack(&[&phi, &h]))
            })
            .collect();
        ChainMap::new(k.clone(), target, maps).expect("perturbation by homotopies is a chain map")
    }

    /// A random `form_count x r` matrix `φ` with no zero column.
    pub fn phi(&mut self, form_count: usize, r: usize) -> SparseRatMatrix {
        loop {
            let m = self.matrix(form_count, r, 2);
            if (0..r).all(|j| !m.column(j).is_empty()) {
                return m;
            }
        }
    }

    /// `(M, M', f)` with `f` compatible with the operators; every degree of
    /// `M` and `M'` has dimension at most `max_dim`.
    pub fn compatible_pair(&mut self, r: usize, max_dim: usize) -> (HirschDatum, HirschDatum, ChainMap) {
        loop {
            let forms = r + self.rng.gen_range(0..=1);
            let phi = self.phi(forms, r);
            let k = self.complex(1, 2, false);
            let c = self.int(1, 3) * if self.rng.gen_bool(0.5) { 1 } else { -1 };
            let f = self.homotopy_perturbation(&k, c);
            let src = exterior_tensor(&k, &phi);
            let tgt = exterior_tensor(f.target(), &phi);
            let fits = |d: &HirschDatum| d.complex().dims().iter().all(|&n| n <= max_dim);
            if fits(&src) && fits(&tgt) && src.complex().total_dim() > 0 {
                let lifted = exterior_tensor_map(&f, &phi, &src, &tgt);
                return (src, tgt, lifted);
            }
        }
    }

    /// `cone(id_K) ⊗ Λ(V)`, an acyclic datum.
    pub fn acyclic_datum(&mut self, r: usize) -> HirschDatum {
        let k = self.complex(1, 2, false);
        let cone = mapping_cone(&ChainMap::identity(&k)).complex;
        let phi = self.phi(r, r);
        exterior_tensor(&cone, &phi)
    }
}

fn from_dense_i64(rows: &[Vec<i64>], cols: usize) -> SparseRatMatrix {
    if rows.is_empty() {
        SparseRatMatrix::zeros(0, cols)
    } else {
        SparseRatMatrix::from_i64_rows(rows)
    }
}

/// Blocks `(p, q)` of `K ⊗ Λ^q` in total degree `n`, with `p` ascending.
fn blocks(k: &Complex, forms: usize, n: i32) -> Vec<(i32, usize, usize)> {
    let mut out = Vec::new();
    let mut offset = 0;
    for p in k.degrees() {
        let q = n - p;
        if q < 0 || q as usize > forms {
            continue;
        }
        out.push((p, q as usize, offset));
        offset += k.dim(p) * wedge_basis(forms, q as usize).len();
    }
    out
}

fn total_degrees(k: &Complex, forms: usize) -> std::ops::RangeInclusive<i32> {
    k.min_deg()..=k.max_deg() + forms as i32
}

fn block_dim(k: &Complex, forms: usize, n: i32) -> usize {
    blocks(k, forms, n).iter().map(|&(p, q, _)| k.dim(p) * wedge_basis(forms, q).len()).sum()
}

/// `K ⊗ Λ(V)` with `d(k ⊗ ω) = dk ⊗ ω` and `L_j(k ⊗ ω) = (-1)^{|k|} k ⊗ φ(u_j) ∧ ω`.
pub fn exterior_tensor(k: &Complex, phi: &SparseRatMatrix) -> HirschDatum {
    let (forms, r) = phi.shape();
    let lay = ExteriorLayout { coefficient_labels: vec!["1".into()], form_count: forms, phi: phi.clone() };
    let degrees = total_degrees(k, forms);
    let mut labels = Vec::new();
    let mut ds = Vec::new();
    let mut ops: Vec<BTreeMap<i32, SparseRatMatrix>> = vec![BTreeMap::new(); r];
    for n in degrees.clone() {
        let here = blocks(k, forms, n);
        let next = blocks(k, forms, n + 1);
        let (rows, cols) = (block_dim(k, forms, n + 1), block_dim(k, forms, n));
        let mut names = Vec::new();
        for &(p, q, _) in &here {
            let ws = wedge_basis(forms, q);
            for l in k.labels(p) {
                names.extend(ws.iter().map(|w| format!("{l}|{w:?}")));
            }
        }
        labels.push(names);
        let mut d = Vec::new();
        let mut ls: Vec<Vec<(usize, usize, Rat)>> = vec![Vec::new(); r];
        for &(p, q, off) in &here {
            let lam = SparseRatMatrix::identity(wedge_basis(forms, q).len());
            if let Some(&(_, _, toff)) = next.iter().find(|b| b.0 == p + 1 && b.1 == q) {
                for (i, j, v) in k.d(p).kron(&lam).entries() {
                    d.push((toff + i, off + j, v.clone()));
                }
            }
            if let Some(&(_, _, toff)) = next.iter().find(|b| b.0 == p && b.1 == q + 1) {
                let sign = Rat::from_int(if p.rem_euclid(2) == 0 { 1 } else { -1 });
                for (j, l) in ls.iter_mut().enumerate() {
                    let w = wedge_operator(&lay, j, q, 1);
                    for (a, b, v) in SparseRatMatrix::identity(k.dim(p)).kron(&w).entries() {
                        l.push((toff + a, off + b, v * &sign));
                    }
                }
            }
        }
        ds.push(SparseRatMatrix::from_triplets(rows, cols, d).expect("indices in range"));
        for (j, l) in ls.into_iter().enumerate() {
            ops[j].insert(n, SparseRatMatrix::from_triplets(rows, cols, l).expect("indices in range"));
        }
    }
    let c = Complex::new(*degrees.start(), labels, ds).expect("tensor product of complexes");
    HirschDatum::new(c, ops).expect("wedge operators with Koszul sign satisfy the identities")
}

/// `f ⊗ 1` between two exterior tensors with the same `φ`.
pub fn exterior_tensor_map(f: &ChainMap, phi: &SparseRatMatrix, src: &HirschDatum, tgt: &HirschDatum) -> ChainMap {
    let forms = phi.rows();
    let (a, b) = (f.source(), f.target());
    let maps = src
        .complex()
        .degrees()
        .map(|n| {
            let from = blocks(a, forms, n);
            let to = blocks(b, forms, n);
            let mut trip = Vec::new();
            for &(p, q, off) in &from {
                if let Some(&(_, _, toff)) = to.iter().find(|x| x.0 == p && x.1 == q) {
                    let lam = SparseRatMatrix::identity(wedge_basis(forms, q).len());
                    for (i, j, v) in f.map(p).kron(&lam).entries() {
                        trip.push((toff + i, off + j, v.clone()));
                    }
                }
            }
            let m = SparseRatMatrix::from_triplets(tgt.complex().dim(n), src.complex().dim(n), trip)
                .expect("indices in range");
            (n, m)
        })
        .collect();
    ChainMap::new(src.complex().clone(), tgt.complex().clone(), maps).expect("f ⊗ 1 is a chain map")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hirsch::check_compatible;

    #[test]
    fn sampled_complexes_have_requested_shape() {
        let mut s = Sampler::new(7);
        for _ in 0..20 {
            let c = s.complex(2, 3, true);
            assert!(c.is_acyclic());
            assert!(c.dims().iter().all(|&n| n <= 3));
        }
    }

    #[test]
    fn compatible_pairs_are_compatible() {
        let mut s = Sampler::new(11);
        for r in 1..=2 {
            let (src, tgt, f) = s.compatible_pair(r, 6);
            assert!(check_compatible(&f, &src, &tgt).is_ok());
            assert!(f.is_quasi_iso());
        }
    }
}
