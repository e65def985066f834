use std::collections::BTreeMap;

use serde::Serialize;

use super::extension::{kron_identity, TruncatedHirschExtension};
use super::pd::{degree, linear_power, pd_poly_product, PdMonomials};
use super::{HirschDatum, HirschError};
use crate::complex::{mapping_cone, ChainMap};
use crate::linalg::{Rat, SparseRatMatrix};

/// A chain map between truncated extensions together with its endpoints.
#[derive(Clone, Debug)]
pub struct ExtendedMap {
    pub map: ChainMap,
    pub source: TruncatedHirschExtension,
    pub target: TruncatedHirschExtension,
}

/// Checks `f L_j = L'_j f` for every operator and degree.
pub fn check_compatible(f: &ChainMap, src: &HirschDatum, tgt: &HirschDatum) -> Result<(), HirschError> {
    if src.r() != tgt.r() {
        return Err(HirschError::Shape(format!("operator counts differ: {} vs {}", src.r(), tgt.r())));
    }
    for j in 0..src.r() {
        for q in src.complex().degrees() {
            let lhs = f.map(q + 1).mul(&src.op(j, q));
            let rhs = tgt.op(j, q).mul(&f.map(q));
            if lhs != rhs {
                return Err(HirschError::CompatibilityViolation { op: j, degree: q });
            }
        }
    }
    Ok(())
}

fn check_endpoints(f: &ChainMap, src: &HirschDatum, tgt: &HirschDatum) -> Result<(), HirschError> {
    if f.source().dims() != src.complex().dims() || f.target().dims() != tgt.complex().dims() {
        return Err(HirschError::Shape("map endpoints do not match the data".into()));
    }
    Ok(())
}

/// `u^[e] ⊗ c -> u^[e] ⊗ f(c)` on the truncations at `n`.
pub fn extend_map(f: &ChainMap, src: &HirschDatum, tgt: &HirschDatum, n: usize) -> Result<ExtendedMap, HirschError> {
    check_endpoints(f, src, tgt)?;
    check_compatible(f, src, tgt)?;
    let source = TruncatedHirschExtension::new(src, n);
    let target = TruncatedHirschExtension::new(tgt, n);
    let count = source.monomials().len();
    let degrees = source.complex().degrees().chain(target.complex().degrees());
    let maps: BTreeMap<i32, SparseRatMatrix> = degrees.map(|q| (q, kron_identity(count, &f.map(q)))).collect();
    let map = ChainMap::new(source.complex().clone(), target.complex().clone(), maps)?;
    Ok(ExtendedMap { map, source, target })
}

/// Sign of the source operators in the datum put on a mapping cone.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ConeSign {
    /// `(x, y) -> (-L x, L' y)`, which anticommutes with the cone differential.
    Minus,
    /// `(x, y) -> (L x, L' y)`; not a valid datum unless `L' f = 0`.
    Plus,
}

/// The datum on `MC(f)` whose operators are `(x, y) -> (s L_j x, L'_j y)`.
///
/// The `Plus` variant is built without validation.
pub fn cone_datum(f: &ChainMap, src: &HirschDatum, tgt: &HirschDatum, sign: ConeSign) -> Result<HirschDatum, HirschError> {
    check_endpoints(f, src, tgt)?;
    let cone = mapping_cone(f);
    let mc = cone.complex;
    let s = match sign {
        ConeSign::Minus => -Rat::one(),
        ConeSign::Plus => Rat::one(),
    };
    let ops = (0..src.r())
        .map(|j| {
            mc.degrees()
                .map(|q| {
                    let a = src.op(j, q + 1).scale(&s);
                    let b = tgt.op(j, q);
                    (q, SparseRatMatrix::block_diag(&[&a, &b]))
                })
                .collect()
        })
        .collect();
    let h = HirschDatum::new_unchecked(mc, ops)?;
    if sign == ConeSign::Minus {
        h.validate()?;
    }
    Ok(h)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub degree: i32,
    pub row: usize,
    pub col: usize,
    pub lhs: Rat,
    pub rhs: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CommutationVerdict {
    pub sign: ConeSign,
    pub bound: usize,
    pub degrees_checked: Vec<i32>,
    pub mismatch: Option<Mismatch>,
}

impl CommutationVerdict {
    pub fn commutes(&self) -> bool {
        self.mismatch.is_none()
    }
}

/// Compares `MC(I ⊗ f)` with the extension of the cone datum under the
/// reordering `u^[e] ⊗ (x, y) <-> (u^[e] ⊗ x, u^[e] ⊗ y)`, degree by degree.
pub fn cone_commutation(
    f: &ChainMap,
    src: &HirschDatum,
    tgt: &HirschDatum,
    n: usize,
    sign: ConeSign,
) -> Result<CommutationVerdict, HirschError> {
    let ext = extend_map(f, src, tgt, n)?;
    let left = mapping_cone(&ext.map).complex;
    let datum = cone_datum(f, src, tgt, sign)?;
    let right_ext = TruncatedHirschExtension::new(&datum, n);
    let right = right_ext.complex();
    let count = ext.source.monomials().len();
    let (a, b) = (src.complex(), tgt.complex());
    // Position in the right-hand basis of each left-hand basis vector.
    let perm = |q: i32| -> Vec<usize> {
        let (da, db) = (a.dim(q + 1), b.dim(q));
        let mut p = Vec::with_capacity(count * (da + db));
        for m in 0..count {
            p.extend((0..da).map(|i| m * (da + db) + i));
        }
        for m in 0..count {
            p.extend((0..db).map(|i| m * (da + db) + da + i));
        }
        p
    };
    let degrees: Vec<i32> = left.degrees().collect();
    if right.degrees().collect::<Vec<_>>() != degrees {
        return Err(HirschError::Shape("cone degree ranges differ".into()));
    }
    for &q in &degrees {
        let (p0, p1) = (perm(q), perm(q + 1));
        let dl = left.d(q);
        let dr = right.d(q);
        // dl[i][k] should equal dr[p1[i]][p0[k]].
        let moved = SparseRatMatrix::from_unique_triplets(
            dr.rows(),
            dr.cols(),
            dl.entries().map(|(i, k, v)| (p1[i], p0[k], v.clone())),
        )?;
        if let Some((row, col, lhs, rhs)) = moved.first_difference(&dr) {
            return Ok(CommutationVerdict {
                sign,
                bound: n,
                degrees_checked: degrees.iter().copied().filter(|&x| x <= q).collect(),
                mismatch: Some(Mismatch { degree: q, row, col, lhs, rhs }),
            });
        }
    }
    Ok(CommutationVerdict { sign, bound: n, degrees_checked: degrees, mismatch: None })
}

/// Change of generators: `g: C' -> C` with `g L'_j = (sum_i a_ij L_i) g`
/// extends to `u'^[e] ⊗ c -> prod_j (sum_i a_ij u_i)^[e_j] ⊗ g(c)`.
///
/// `a` is `r x r'`; column `j` expresses `u'_j` in the `u_i`.
pub fn substitute_variables(
    g: &ChainMap,
    src: &HirschDatum,
    tgt: &HirschDatum,
    a: &SparseRatMatrix,
    n: usize,
) -> Result<ExtendedMap, HirschError> {
    check_endpoints(g, src, tgt)?;
    if a.shape() != (tgt.r(), src.r()) {
        return Err(HirschError::Shape(format!(
            "substitution matrix is {:?}, expected {:?}",
            a.shape(),
            (tgt.r(), src.r())
        )));
    }
    for j in 0..src.r() {
        for q in src.complex().degrees() {
            let mut combo = SparseRatMatrix::zeros(tgt.complex().dim(q + 1), tgt.complex().dim(q));
            for (i, aij) in a.column(j).iter() {
                combo = combo.add(&tgt.op(*i, q).scale(aij));
            }
            if g.map(q + 1).mul(&src.op(j, q)) != combo.mul(&g.map(q)) {
                return Err(HirschError::CompatibilityViolation { op: j, degree: q });
            }
        }
    }
    let source = TruncatedHirschExtension::new(src, n);
    let target = TruncatedHirschExtension::new(tgt, n);
    let s = monomial_substitution(a, source.monomials(), target.monomials());
    let degrees = source.complex().degrees().chain(target.complex().degrees());
    let maps: BTreeMap<i32, SparseRatMatrix> = degrees.map(|q| (q, SparseRatMatrix::kron(&s, &g.map(q)))).collect();
    let map = ChainMap::new(source.complex().clone(), target.complex().clone(), maps)?;
    Ok(ExtendedMap { map, source, target })
}

/// Matrix of `u'^[e] -> prod_j (a_j . u)^[e_j]` from `src` monomials to `tgt` monomials.
fn monomial_substitution(a: &SparseRatMatrix, src: &PdMonomials, tgt: &PdMonomials) -> SparseRatMatrix {
    let bound = tgt.bound();
    let cols: Vec<Vec<Rat>> = (0..a.cols())
        .map(|j| (0..a.rows()).map(|i| a.get(i, j)).collect())
        .collect();
    let mut trip = Vec::new();
    for (k, e) in src.iter().enumerate() {
        let mut poly = vec![(vec![0u32; a.rows()], Rat::one())];
        for (j, &ej) in e.iter().enumerate() {
            if ej > 0 {
                poly = pd_poly_product(&poly, &linear_power(&cols[j], ej), bound);
            }
        }
        for (f, c) in poly {
            debug_assert!(degree(&f) <= bound);
            let row = tgt.index_of(&f).expect("degree within bound");
            trip.push((row, k, c));
        }
    }
    SparseRatMatrix::from_triplets(tgt.len(), src.len(), trip).expect("indices in range")
}

/// Degree-wise equality of two chain maps, reporting the first differing entry.
pub fn first_map_difference(x: &ChainMap, y: &ChainMap) -> Option<Mismatch> {
    let degrees: std::collections::BTreeSet<i32> = x.degrees().chain(y.degrees()).collect();
    for q in degrees {
        let (a, b) = (x.map(q), y.map(q));
        if a.shape() != b.shape() {
            return Some(Mismatch { degree: q, row: a.rows().min(b.rows()), col: 0, lhs: Rat::zero(), rhs: Rat::zero() });
        }
        if let Some((row, col, lhs, rhs)) = a.first_difference(&b) {
            return Some(Mismatch { degree: q, row, col, lhs, rhs });
        }
    }
    None
}
