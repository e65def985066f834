use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::dense::dense_rref;
use super::{LinalgError, Rat, SparseRatMatrix, SparseVec};

/// Matrices with both dimensions at most this size are reduced densely.
pub const DENSE_CUTOFF: usize = 64;

/// Integer scalars used during fraction-free elimination.
///
/// Every arithmetic step is checked; `None` signals overflow and the caller
/// promotes to arbitrary precision.
trait EInt: Clone + PartialEq + Debug {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn is_one(&self) -> bool;
    fn is_negative(&self) -> bool;
    fn neg(&self) -> Option<Self>;
    fn gcd(&self, other: &Self) -> Self;
    fn div_exact(&self, g: &Self) -> Self;
    /// `a * x - b * y`
    fn lin(a: &Self, x: &Self, b: &Self, y: &Self) -> Option<Self>;
    fn to_big(&self) -> BigInt;
}

impl EInt for i64 {
    fn zero() -> Self {
        0
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn is_one(&self) -> bool {
        *self == 1
    }
    fn is_negative(&self) -> bool {
        *self < 0
    }
    fn neg(&self) -> Option<Self> {
        self.checked_neg()
    }
    fn gcd(&self, other: &Self) -> Self {
        Integer::gcd(self, other)
    }
    fn div_exact(&self, g: &Self) -> Self {
        self / g
    }
    fn lin(a: &Self, x: &Self, b: &Self, y: &Self) -> Option<Self> {
        let v = (*a as i128) * (*x as i128) - (*b as i128) * (*y as i128);
        // i64::MIN is excluded so that negation and gcd can never overflow.
        i64::try_from(v).ok().filter(|v| *v != i64::MIN)
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl EInt for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_one(&self) -> bool {
        One::is_one(self)
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn neg(&self) -> Option<Self> {
        Some(-self)
    }
    fn gcd(&self, other: &Self) -> Self {
        Integer::gcd(self, other)
    }
    fn div_exact(&self, g: &Self) -> Self {
        self / g
    }
    fn lin(a: &Self, x: &Self, b: &Self, y: &Self) -> Option<Self> {
        Some(a * x - b * y)
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

type IRow<T> = Vec<(usize, T)>;

/// Divides out the content and makes the leading entry positive.
fn make_primitive<T: EInt>(mut row: IRow<T>) -> Option<IRow<T>> {
    let Some(first) = row.first() else {
        return Some(row);
    };
    let mut g = first.1.gcd(&first.1);
    for (_, v) in &row[1..] {
        if g.is_one() {
            break;
        }
        g = g.gcd(v);
    }
    let flip = row[0].1.is_negative();
    if !g.is_one() {
        for e in &mut row {
            e.1 = e.1.div_exact(&g);
        }
    }
    if flip {
        for e in &mut row {
            e.1 = e.1.neg()?;
        }
    }
    Some(row)
}

/// Clears column `col` of `r` using `p`, whose entry at `col` is nonzero.
fn eliminate<T: EInt>(r: &[(usize, T)], p: &[(usize, T)], col: usize) -> Option<IRow<T>> {
    let a = &r[r.binary_search_by_key(&col, |e| e.0).ok()?].1;
    let b = &p[p.binary_search_by_key(&col, |e| e.0).ok()?].1;
    let g = a.gcd(b);
    let (ca, cp) = (b.div_exact(&g), a.div_exact(&g));
    let zero = T::zero();
    let mut out = Vec::with_capacity(r.len() + p.len());
    let (mut i, mut j) = (0, 0);
    while i < r.len() || j < p.len() {
        let ci = r.get(i).map_or(usize::MAX, |e| e.0);
        let cj = p.get(j).map_or(usize::MAX, |e| e.0);
        let (c, v) = if ci == cj {
            let v = T::lin(&ca, &r[i].1, &cp, &p[j].1)?;
            i += 1;
            j += 1;
            (ci, v)
        } else if ci < cj {
            let v = T::lin(&ca, &r[i].1, &cp, &zero)?;
            i += 1;
            (ci, v)
        } else {
            let v = T::lin(&ca, &zero, &cp, &p[j].1)?;
            j += 1;
            (cj, v)
        };
        if c != col && !v.is_zero() {
            out.push((c, v));
        }
    }
    make_primitive(out)
}

/// Row echelon form built one row at a time. Stored rows are primitive with a
/// positive leading entry; rows are not reduced against later pivots.
#[derive(Clone, Debug)]
struct Echelon<T> {
    rows: Vec<IRow<T>>,
    pivot_row: Vec<Option<usize>>,
}

enum Inserted {
    New,
    Dependent,
    Overflow,
}

impl<T: EInt> Echelon<T> {
    fn new(dim: usize) -> Self {
        Echelon { rows: Vec::new(), pivot_row: vec![None; dim] }
    }

    fn reduce(&self, mut row: IRow<T>) -> Result<IRow<T>, IRow<T>> {
        while let Some(&(c, _)) = row.first() {
            match self.pivot_row[c] {
                Some(k) => match eliminate(&row, &self.rows[k], c) {
                    Some(next) => row = next,
                    None => return Err(row),
                },
                None => break,
            }
        }
        Ok(row)
    }

    fn insert(&mut self, row: IRow<T>) -> Inserted {
        match self.reduce(row) {
            Ok(row) if row.is_empty() => Inserted::Dependent,
            Ok(row) => {
                self.pivot_row[row[0].0] = Some(self.rows.len());
                self.rows.push(row);
                Inserted::New
            }
            Err(_) => Inserted::Overflow,
        }
    }

    /// Reduced rows sorted by pivot column, each scaled so its pivot is 1.
    fn reduced(&self) -> Option<Vec<SparseVec>> {
        let mut rows = self.rows.clone();
        rows.sort_by_key(|r| r[0].0);
        for idx in (0..rows.len()).rev() {
            let pc = rows[idx][0].0;
            let (above, rest) = rows.split_at_mut(idx);
            let prow = &rest[0];
            for r in above.iter_mut() {
                if r.binary_search_by_key(&pc, |e| e.0).is_ok() {
                    *r = eliminate(r, prow, pc)?;
                }
            }
        }
        Some(
            rows.into_iter()
                .map(|r| {
                    let p = Rat::from_bigint(r[0].1.to_big());
                    r.into_iter()
                        .map(|(c, v)| (c, &Rat::from_bigint(v.to_big()) / &p))
                        .collect()
                })
                .collect(),
        )
    }
}

fn to_small(row: &IRow<BigInt>) -> Option<IRow<i64>> {
    row.iter()
        .map(|(c, v)| v.to_i64().filter(|v| *v != i64::MIN).map(|v| (*c, v)))
        .collect()
}

fn to_big(row: &IRow<i64>) -> IRow<BigInt> {
    row.iter().map(|(c, v)| (*c, BigInt::from(*v))).collect()
}

/// Scales a rational vector to a primitive integer vector with the same span.
fn integer_row(v: &[(usize, Rat)]) -> IRow<BigInt> {
    let mut l = BigInt::one();
    for (_, x) in v {
        if !One::is_one(x.denom()) {
            l = l.lcm(x.denom());
        }
    }
    let row = v
        .iter()
        .filter(|(_, x)| !x.is_zero())
        .map(|(c, x)| (*c, x.numer() * (&l / x.denom())))
        .collect();
    make_primitive(row).expect("big integers do not overflow")
}

#[derive(Clone, Debug)]
enum Engine {
    Small(Echelon<i64>),
    Big(Echelon<BigInt>),
}

/// Incrementally built basis of a subspace of `Q^dim`.
///
/// Vectors are inserted one at a time; [`insert`](Self::insert) reports
/// whether the vector enlarged the span. Starts on machine integers and moves
/// to arbitrary precision the first time an intermediate value overflows.
#[derive(Clone, Debug)]
pub struct EchelonBasis {
    dim: usize,
    engine: Engine,
}

impl EchelonBasis {
    pub fn new(dim: usize) -> Self {
        EchelonBasis { dim, engine: Engine::Small(Echelon::new(dim)) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        match &self.engine {
            Engine::Small(e) => e.rows.len(),
            Engine::Big(e) => e.rows.len(),
        }
    }

    fn promote(&mut self) {
        if let Engine::Small(e) = &self.engine {
            let big = Echelon { rows: e.rows.iter().map(to_big).collect(), pivot_row: e.pivot_row.clone() };
            self.engine = Engine::Big(big);
        }
    }

    /// Adds `v` to the span; returns `true` if it was independent of the previous vectors.
    pub fn insert(&mut self, v: &[(usize, Rat)]) -> bool {
        debug_assert!(v.iter().all(|e| e.0 < self.dim));
        let row = integer_row(v);
        if row.is_empty() {
            return false;
        }
        if let Engine::Small(e) = &mut self.engine {
            if let Some(small) = to_small(&row) {
                match e.insert(small) {
                    Inserted::New => return true,
                    Inserted::Dependent => return false,
                    Inserted::Overflow => {}
                }
            }
            self.promote();
        }
        match &mut self.engine {
            Engine::Big(e) => match e.insert(row) {
                Inserted::New => true,
                Inserted::Dependent => false,
                Inserted::Overflow => unreachable!("big integers do not overflow"),
            },
            Engine::Small(_) => unreachable!(),
        }
    }

    /// Whether `v` lies in the current span.
    pub fn contains(&self, v: &[(usize, Rat)]) -> bool {
        let row = integer_row(v);
        if row.is_empty() {
            return true;
        }
        if let Engine::Small(e) = &self.engine {
            if let Some(small) = to_small(&row) {
                if let Ok(r) = e.reduce(small) {
                    return r.is_empty();
                }
            }
            let big = Echelon::<BigInt> { rows: e.rows.iter().map(to_big).collect(), pivot_row: e.pivot_row.clone() };
            return big.reduce(row).map(|r| r.is_empty()).unwrap_or(false);
        }
        match &self.engine {
            Engine::Big(e) => e.reduce(row).map(|r| r.is_empty()).unwrap_or(false),
            Engine::Small(_) => unreachable!(),
        }
    }

    /// Rows of the reduced row echelon form of the span, sorted by pivot.
    pub fn reduced_rows(&self) -> Vec<SparseVec> {
        match &self.engine {
            Engine::Small(e) => match e.reduced() {
                Some(rows) => rows,
                None => Echelon::<BigInt> {
                    rows: e.rows.iter().map(to_big).collect(),
                    pivot_row: e.pivot_row.clone(),
                }
                .reduced()
                .expect("big integers do not overflow"),
            },
            Engine::Big(e) => e.reduced().expect("big integers do not overflow"),
        }
    }
}

/// Reduced row echelon form with its rank and pivot columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    /// Same shape as the input; zero rows at the bottom.
    pub r: SparseRatMatrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

/// Sparse fraction-free reduced row echelon form, regardless of size.
pub fn sparse_rref(a: &SparseRatMatrix) -> Rref {
    let mut basis = EchelonBasis::new(a.cols());
    for row in a.row_vecs() {
        basis.insert(row);
    }
    let mut rows = basis.reduced_rows();
    let pivots: Vec<usize> = rows.iter().map(|r| r[0].0).collect();
    let rank = rows.len();
    rows.resize(a.rows(), Vec::new());
    Rref { r: SparseRatMatrix::from_rows(a.cols(), rows), rank, pivots }
}

pub fn rref(a: &SparseRatMatrix) -> Rref {
    if a.rows() <= DENSE_CUTOFF && a.cols() <= DENSE_CUTOFF {
        dense_rref(a)
    } else {
        sparse_rref(a)
    }
}

pub fn rank(a: &SparseRatMatrix) -> usize {
    let (src, dim) = if a.rows() <= a.cols() {
        (a.row_vecs().to_vec(), a.cols())
    } else {
        (a.columns(), a.rows())
    };
    let mut basis = EchelonBasis::new(dim);
    for v in &src {
        basis.insert(v);
        if basis.rank() == dim {
            break;
        }
    }
    basis.rank()
}

/// Columns form a basis of the null space of `a`.
pub fn kernel_basis(a: &SparseRatMatrix) -> SparseRatMatrix {
    let rr = rref(a);
    let n = a.cols();
    let mut is_pivot = vec![false; n];
    for &p in &rr.pivots {
        is_pivot[p] = true;
    }
    let free: Vec<usize> = (0..n).filter(|c| !is_pivot[*c]).collect();
    let mut free_index = vec![usize::MAX; n];
    for (k, &f) in free.iter().enumerate() {
        free_index[f] = k;
    }
    let mut cols: Vec<SparseVec> = free.iter().map(|&f| vec![(f, Rat::one())]).collect();
    for (i, &p) in rr.pivots.iter().enumerate() {
        for (c, v) in rr.r.row(i) {
            if *c != p {
                cols[free_index[*c]].push((p, -v));
            }
        }
    }
    for col in &mut cols {
        col.sort_by_key(|e| e.0);
    }
    SparseRatMatrix::from_columns(n, &cols)
}

/// Columns of `a` at pivot positions; a basis of the column space.
pub fn image_basis(a: &SparseRatMatrix) -> SparseRatMatrix {
    let mut basis = EchelonBasis::new(a.rows());
    let cols = a.columns();
    let keep: Vec<usize> = (0..cols.len()).filter(|&j| basis.insert(&cols[j])).collect();
    a.select_columns(&keep)
}

/// Basis of the sum of the column spans of the given matrices.
pub fn subspace_sum(spans: &[&SparseRatMatrix]) -> SparseRatMatrix {
    image_basis(&SparseRatMatrix::hstack(spans))
}

/// Result of comparing a subspace with an ambient span.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub dim: usize,
    /// Columns of the ambient span whose classes form a basis of the quotient.
    pub complement: SparseRatMatrix,
    pub complement_columns: Vec<usize>,
}

/// `dim(span V) - dim(span W)` together with complement representatives.
pub fn quotient_dims(w: &SparseRatMatrix, v: &SparseRatMatrix) -> Result<Quotient, LinalgError> {
    if w.rows() != v.rows() {
        return Err(LinalgError::Shape(format!(
            "subspace lives in Q^{} but ambient in Q^{}",
            w.rows(),
            v.rows()
        )));
    }
    let mut vb = EchelonBasis::new(v.rows());
    let vcols = v.columns();
    for c in &vcols {
        vb.insert(c);
    }
    let mut wb = EchelonBasis::new(w.rows());
    for (j, c) in w.columns().iter().enumerate() {
        if !vb.contains(c) {
            return Err(LinalgError::ContainmentViolation { column: j });
        }
        wb.insert(c);
    }
    let complement_columns: Vec<usize> = (0..vcols.len()).filter(|&j| wb.insert(&vcols[j])).collect();
    Ok(Quotient {
        dim: complement_columns.len(),
        complement: v.select_columns(&complement_columns),
        complement_columns,
    })
}

/// Whether every column of `vectors` lies in the column span of `span`.
pub fn in_span(span: &SparseRatMatrix, vectors: &SparseRatMatrix) -> bool {
    let mut b = EchelonBasis::new(span.rows());
    for c in span.columns() {
        b.insert(&c);
    }
    vectors.columns().iter().all(|c| b.contains(c))
}

/// For each column `b_j` of `b`, some `x` with `a x = b_j`, or `None` if inconsistent.
pub fn solve_columns(a: &SparseRatMatrix, b: &SparseRatMatrix) -> Vec<Option<SparseVec>> {
    assert_eq!(a.rows(), b.rows(), "solve: row mismatch");
    let n = a.cols();
    let rr = rref(&SparseRatMatrix::hstack(&[a, b]));
    let mut inconsistent = vec![false; b.cols()];
    let mut sols: Vec<SparseVec> = vec![Vec::new(); b.cols()];
    for (i, &p) in rr.pivots.iter().enumerate() {
        for (c, v) in rr.r.row(i) {
            if *c < n {
                continue;
            }
            if p >= n {
                inconsistent[c - n] = true;
            } else {
                sols[c - n].push((p, v.clone()));
            }
        }
    }
    sols.into_iter()
        .zip(inconsistent)
        .map(|(mut s, bad)| {
            if bad {
                None
            } else {
                s.sort_by_key(|e| e.0);
                Some(s)
            }
        })
        .collect()
}

/// Some `x` with `a x = b`, or `None` if any column is inconsistent.
pub fn solve(a: &SparseRatMatrix, b: &SparseRatMatrix) -> Option<SparseRatMatrix> {
    let cols: Option<Vec<SparseVec>> = solve_columns(a, b).into_iter().collect();
    cols.map(|c| SparseRatMatrix::from_columns(a.cols(), &c))
}

pub fn inverse(a: &SparseRatMatrix) -> Option<SparseRatMatrix> {
    let n = a.rows();
    if a.cols() != n {
        return None;
    }
    let rr = rref(&SparseRatMatrix::hstack(&[a, &SparseRatMatrix::identity(n)]));
    if rr.pivots.iter().take(n).copied().ne(0..n) {
        return None;
    }
    let all: Vec<usize> = (0..n).collect();
    let right: Vec<usize> = (n..2 * n).collect();
    Some(rr.r.submatrix(&all, &right))
}

/// `(rref(a), T)` with `T` invertible and `T a = rref(a).r`.
pub fn rref_with_transform(a: &SparseRatMatrix) -> (Rref, SparseRatMatrix) {
    let m = a.rows();
    let rr = rref(&SparseRatMatrix::hstack(&[a, &SparseRatMatrix::identity(m)]));
    let rows: Vec<usize> = (0..m).collect();
    let left: Vec<usize> = (0..a.cols()).collect();
    let right: Vec<usize> = (a.cols()..a.cols() + m).collect();
    let r = rr.r.submatrix(&rows, &left);
    let pivots: Vec<usize> = rr.pivots.iter().copied().filter(|&p| p < a.cols()).collect();
    let t = rr.r.submatrix(&rows, &right);
    (Rref { r, rank: pivots.len(), pivots }, t)
}

/// Rows of the result cut out the column span of `u`: `A v = 0` iff `v` is in the span.
pub fn annihilator(u: &SparseRatMatrix) -> SparseRatMatrix {
    kernel_basis(&u.transpose()).transpose()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>]) -> SparseRatMatrix {
        SparseRatMatrix::from_i64_rows(rows)
    }

    #[test]
    fn rref_examples() {
        let id = SparseRatMatrix::identity(3);
        let rr = rref(&id);
        assert_eq!(rr.r, id);
        assert_eq!(rr.pivots, vec![0, 1, 2]);
        let z = SparseRatMatrix::zeros(2, 4);
        let rr = sparse_rref(&z);
        assert_eq!((rr.rank, rr.r), (0, z));
        let rr = sparse_rref(&m(&[vec![1, 2], vec![2, 4]]));
        assert_eq!(rr.r, m(&[vec![1, 2], vec![0, 0]]));
        assert_eq!(rr.rank, 1);
    }

    #[test]
    fn kernel_and_image_examples() {
        assert_eq!(kernel_basis(&SparseRatMatrix::identity(4)).cols(), 0);
        assert_eq!(kernel_basis(&SparseRatMatrix::zeros(2, 3)), SparseRatMatrix::identity(3));
        let k = kernel_basis(&m(&[vec![1, 2]]));
        assert_eq!(k, m(&[vec![-2], vec![1]]));
        let img = image_basis(&m(&[vec![1, 1], vec![2, 2]]));
        assert_eq!(img, m(&[vec![1], vec![2]]));
        assert_eq!(image_basis(&SparseRatMatrix::zeros(3, 2)).cols(), 0);
    }

    #[test]
    fn quotient_examples() {
        let v = SparseRatMatrix::identity(2);
        let w = m(&[vec![1], vec![1]]);
        let q = quotient_dims(&w, &v).unwrap();
        assert_eq!(q.dim, 1);
        assert_eq!(q.complement_columns, vec![0]);
        assert_eq!(quotient_dims(&v, &v).unwrap().dim, 0);
        assert_eq!(quotient_dims(&SparseRatMatrix::zeros(3, 0), &SparseRatMatrix::identity(3)).unwrap().dim, 3);
        let bad = quotient_dims(&v, &w).unwrap_err();
        assert!(matches!(bad, LinalgError::ContainmentViolation { .. }));
    }

    #[test]
    fn overflow_promotes_to_big_integers() {
        let big = 3_000_000_000i64;
        let a = m(&[vec![big, big + 1, 7], vec![big + 2, 5, big - 3], vec![11, big * 2, 13]]);
        let rr = sparse_rref(&a);
        assert_eq!(rr.r, dense_rref(&a).r);
        assert_eq!(rr.rank, 3);
    }

    #[test]
    fn solve_and_inverse() {
        let a = m(&[vec![2, 1], vec![1, 1]]);
        let inv = inverse(&a).unwrap();
        assert!(a.mul(&inv).is_identity());
        assert!(inverse(&m(&[vec![1, 2], vec![2, 4]])).is_none());
        let b = m(&[vec![3, 1], vec![2, 0]]);
        let x = solve(&a, &b).unwrap();
        assert_eq!(a.mul(&x), b);
        let sing = m(&[vec![1, 1], vec![1, 1]]);
        let cols = solve_columns(&sing, &m(&[vec![1, 1], vec![1, 0]]));
        assert!(cols[0].is_some() && cols[1].is_none());
    }

    #[test]
    fn annihilator_cuts_out_span() {
        let u = m(&[vec![1, 0], vec![1, 1], vec![0, 1], vec![0, 0]]);
        let ann = annihilator(&u);
        assert_eq!(ann.rows(), 2);
        assert!(ann.mul(&u).is_zero());
    }
}
