use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{LinalgError, Rat};

/// A sparse row of `(column, value)` pairs, sorted by column with no stored zeros.
pub type SparseVec = Vec<(usize, Rat)>;

/// Sparse matrix over the rationals.
///
/// Rows are stored sorted with no explicit zeros, so two matrices are equal
/// exactly when they are equal as linear maps of the same shape.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SparseRatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<SparseVec>,
}

impl SparseRatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseRatMatrix { rows, cols, data: vec![Vec::new(); rows] }
    }

    pub fn identity(n: usize) -> Self {
        let data = (0..n).map(|i| vec![(i, Rat::one())]).collect();
        SparseRatMatrix { rows: n, cols: n, data }
    }

    /// Builds a matrix from triplets; duplicate positions are summed and zeros dropped.
    pub fn from_triplets<I>(rows: usize, cols: usize, triplets: I) -> Result<Self, LinalgError>
    where
        I: IntoIterator<Item = (usize, usize, Rat)>,
    {
        let mut data: Vec<SparseVec> = vec![Vec::new(); rows];
        for (i, j, v) in triplets {
            if i >= rows || j >= cols {
                return Err(LinalgError::IndexOutOfRange { row: i, col: j, rows, cols });
            }
            data[i].push((j, v));
        }
        for row in &mut data {
            *row = normalize_row(std::mem::take(row));
        }
        Ok(SparseRatMatrix { rows, cols, data })
    }

    /// Like [`from_triplets`](Self::from_triplets) but rejects duplicate positions.
    pub fn from_unique_triplets<I>(rows: usize, cols: usize, triplets: I) -> Result<Self, LinalgError>
    where
        I: IntoIterator<Item = (usize, usize, Rat)>,
    {
        let mut data: Vec<SparseVec> = vec![Vec::new(); rows];
        for (i, j, v) in triplets {
            if i >= rows || j >= cols {
                return Err(LinalgError::IndexOutOfRange { row: i, col: j, rows, cols });
            }
            data[i].push((j, v));
        }
        for (i, row) in data.iter_mut().enumerate() {
            row.sort_by_key(|e| e.0);
            if let Some(w) = row.windows(2).find(|w| w[0].0 == w[1].0) {
                return Err(LinalgError::DuplicateEntry { row: i, col: w[0].0 });
            }
            row.retain(|e| !e.1.is_zero());
        }
        Ok(SparseRatMatrix { rows, cols, data })
    }

    pub fn from_rows(cols: usize, rows: Vec<SparseVec>) -> Self {
        let data: Vec<SparseVec> = rows.into_iter().map(normalize_row).collect();
        debug_assert!(data.iter().all(|r| r.iter().all(|e| e.0 < cols)));
        SparseRatMatrix { rows: data.len(), cols, data }
    }

    pub fn from_columns(rows: usize, columns: &[SparseVec]) -> Self {
        let mut data: Vec<SparseVec> = vec![Vec::new(); rows];
        for (j, col) in columns.iter().enumerate() {
            for (i, v) in col {
                if !v.is_zero() {
                    data[*i].push((j, v.clone()));
                }
            }
        }
        SparseRatMatrix { rows, cols: columns.len(), data }
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let data = rows
            .iter()
            .map(|r| {
                assert_eq!(r.len(), cols, "ragged dense input");
                r.iter()
                    .enumerate()
                    .filter(|(_, v)| **v != 0)
                    .map(|(j, v)| (j, Rat::from_int(*v)))
                    .collect()
            })
            .collect();
        SparseRatMatrix { rows: rows.len(), cols, data }
    }

    pub fn from_dense(rows: &[Vec<Rat>], cols: usize) -> Self {
        let data = rows
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(j, v)| (j, v.clone()))
                    .collect()
            })
            .collect();
        SparseRatMatrix { rows: rows.len(), cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Vec::is_empty)
    }

    pub fn row(&self, i: usize) -> &[(usize, Rat)] {
        &self.data[i]
    }

    pub fn row_vecs(&self) -> &[SparseVec] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> Rat {
        match self.data[i].binary_search_by_key(&j, |e| e.0) {
            Ok(k) => self.data[i][k].1.clone(),
            Err(_) => Rat::zero(),
        }
    }

    /// Entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Rat)> + '_ {
        self.data
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().map(move |(j, v)| (i, *j, v)))
    }

    pub fn to_dense(&self) -> Vec<Vec<Rat>> {
        let mut out = vec![vec![Rat::zero(); self.cols]; self.rows];
        for (i, j, v) in self.entries() {
            out[i][j] = v.clone();
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut data: Vec<SparseVec> = vec![Vec::new(); self.cols];
        for (i, j, v) in self.entries() {
            data[j].push((i, v.clone()));
        }
        SparseRatMatrix { rows: self.cols, cols: self.rows, data }
    }

    /// Columns as sparse vectors indexed by row.
    pub fn columns(&self) -> Vec<SparseVec> {
        self.transpose().data
    }

    pub fn column(&self, j: usize) -> SparseVec {
        self.data
            .iter()
            .enumerate()
            .filter_map(|(i, r)| {
                r.binary_search_by_key(&j, |e| e.0).ok().map(|k| (i, r[k].1.clone()))
            })
            .collect()
    }

    pub fn mul(&self, rhs: &SparseRatMatrix) -> SparseRatMatrix {
        assert_eq!(
            self.cols, rhs.rows,
            "shape mismatch in product: {:?} * {:?}",
            self.shape(),
            rhs.shape()
        );
        let mut data = Vec::with_capacity(self.rows);
        let mut acc: Vec<Option<Rat>> = vec![None; rhs.cols];
        let mut touched: Vec<usize> = Vec::new();
        for row in &self.data {
            for (k, a) in row {
                for (j, b) in &rhs.data[*k] {
                    let p = a * b;
                    match &mut acc[*j] {
                        Some(s) => *s += &p,
                        slot @ None => {
                            *slot = Some(p);
                            touched.push(*j);
                        }
                    }
                }
            }
            touched.sort_unstable();
            let mut out = Vec::with_capacity(touched.len());
            for &j in &touched {
                let v = acc[j].take().unwrap();
                if !v.is_zero() {
                    out.push((j, v));
                }
            }
            touched.clear();
            data.push(out);
        }
        SparseRatMatrix { rows: self.rows, cols: rhs.cols, data }
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(v.len(), self.cols);
        self.data
            .iter()
            .map(|r| {
                let mut s = Rat::zero();
                for (j, a) in r {
                    if !v[*j].is_zero() {
                        s += &(a * &v[*j]);
                    }
                }
                s
            })
            .collect()
    }

    pub fn mul_sparse_vec(&self, v: &SparseVec) -> SparseVec {
        let col = SparseRatMatrix::from_columns(self.cols, std::slice::from_ref(v));
        self.mul(&col).column(0)
    }

    pub fn add(&self, rhs: &SparseRatMatrix) -> SparseRatMatrix {
        self.combine(rhs, false)
    }

    pub fn sub(&self, rhs: &SparseRatMatrix) -> SparseRatMatrix {
        self.combine(rhs, true)
    }

    fn combine(&self, rhs: &SparseRatMatrix, negate: bool) -> SparseRatMatrix {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch in sum");
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| {
                let mut out = Vec::with_capacity(a.len() + b.len());
                let (mut i, mut j) = (0, 0);
                while i < a.len() || j < b.len() {
                    let ca = a.get(i).map(|e| e.0);
                    let cb = b.get(j).map(|e| e.0);
                    match (ca, cb) {
                        (Some(x), Some(y)) if x == y => {
                            let v = if negate { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
                            if !v.is_zero() {
                                out.push((x, v));
                            }
                            i += 1;
                            j += 1;
                        }
                        (Some(x), Some(y)) if x < y => {
                            out.push(a[i].clone());
                            i += 1;
                        }
                        (Some(_), None) => {
                            out.push(a[i].clone());
                            i += 1;
                        }
                        (_, Some(y)) => {
                            let v = if negate { -&b[j].1 } else { b[j].1.clone() };
                            out.push((y, v));
                            j += 1;
                        }
                        (None, None) => unreachable!(),
                    }
                }
                out
            })
            .collect();
        SparseRatMatrix { rows: self.rows, cols: self.cols, data }
    }

    /// Kronecker product: block `(i, k)` is `self[i][k] * rhs`.
    pub fn kron(&self, rhs: &SparseRatMatrix) -> SparseRatMatrix {
        let (gr, gc) = rhs.shape();
        let mut trip = Vec::with_capacity(self.nnz() * rhs.nnz());
        for (i, k, sv) in self.entries() {
            for (a, b, gv) in rhs.entries() {
                trip.push((i * gr + a, k * gc + b, sv * gv));
            }
        }
        SparseRatMatrix::from_unique_triplets(self.rows() * gr, self.cols() * gc, trip).expect("indices in range")
    }

    pub fn scale(&self, c: &Rat) -> SparseRatMatrix {
        if c.is_zero() {
            return SparseRatMatrix::zeros(self.rows, self.cols);
        }
        let data = self
            .data
            .iter()
            .map(|r| r.iter().map(|(j, v)| (*j, v * c)).collect())
            .collect();
        SparseRatMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn neg(&self) -> SparseRatMatrix {
        let data = self
            .data
            .iter()
            .map(|r| r.iter().map(|(j, v)| (*j, -v)).collect())
            .collect();
        SparseRatMatrix { rows: self.rows, cols: self.cols, data }
    }

    /// Horizontal concatenation `[A | B | ...]`.
    pub fn hstack(blocks: &[&SparseRatMatrix]) -> SparseRatMatrix {
        let rows = blocks.first().map_or(0, |b| b.rows);
        let mut data: Vec<SparseVec> = vec![Vec::new(); rows];
        let mut offset = 0;
        for b in blocks {
            assert_eq!(b.rows, rows, "hstack row mismatch");
            for (i, r) in b.data.iter().enumerate() {
                data[i].extend(r.iter().map(|(j, v)| (j + offset, v.clone())));
            }
            offset += b.cols;
        }
        SparseRatMatrix { rows, cols: offset, data }
    }

    /// Vertical concatenation.
    pub fn vstack(blocks: &[&SparseRatMatrix]) -> SparseRatMatrix {
        let cols = blocks.first().map_or(0, |b| b.cols);
        let mut data = Vec::new();
        for b in blocks {
            assert_eq!(b.cols, cols, "vstack column mismatch");
            data.extend(b.data.iter().cloned());
        }
        SparseRatMatrix { rows: data.len(), cols, data }
    }

    pub fn block_diag(blocks: &[&SparseRatMatrix]) -> SparseRatMatrix {
        let cols: usize = blocks.iter().map(|b| b.cols).sum();
        let mut data = Vec::new();
        let mut offset = 0;
        for b in blocks {
            for r in &b.data {
                data.push(r.iter().map(|(j, v)| (j + offset, v.clone())).collect());
            }
            offset += b.cols;
        }
        SparseRatMatrix { rows: data.len(), cols, data }
    }

    /// Places `block` at `(row0, col0)` inside a zero matrix of the given shape.
    pub fn embed(&self, rows: usize, cols: usize, row0: usize, col0: usize) -> SparseRatMatrix {
        assert!(row0 + self.rows <= rows && col0 + self.cols <= cols);
        let mut data: Vec<SparseVec> = vec![Vec::new(); rows];
        for (i, r) in self.data.iter().enumerate() {
            data[row0 + i] = r.iter().map(|(j, v)| (j + col0, v.clone())).collect();
        }
        SparseRatMatrix { rows, cols, data }
    }

    pub fn select_columns(&self, cols: &[usize]) -> SparseRatMatrix {
        let mut pos = vec![usize::MAX; self.cols];
        for (k, &c) in cols.iter().enumerate() {
            pos[c] = k;
        }
        let data = self
            .data
            .iter()
            .map(|r| {
                let mut out: SparseVec = r
                    .iter()
                    .filter(|(j, _)| pos[*j] != usize::MAX)
                    .map(|(j, v)| (pos[*j], v.clone()))
                    .collect();
                out.sort_by_key(|e| e.0);
                out
            })
            .collect();
        SparseRatMatrix { rows: self.rows, cols: cols.len(), data }
    }

    pub fn select_rows(&self, rows: &[usize]) -> SparseRatMatrix {
        let data = rows.iter().map(|&i| self.data[i].clone()).collect();
        SparseRatMatrix { rows: rows.len(), cols: self.cols, data }
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> SparseRatMatrix {
        self.select_rows(rows).select_columns(cols)
    }

    /// Reindexes rows: row `i` of `self` becomes row `map[i]` of a matrix with `rows` rows.
    pub fn permute_rows(&self, map: &[usize], rows: usize) -> SparseRatMatrix {
        let mut data: Vec<SparseVec> = vec![Vec::new(); rows];
        for (i, r) in self.data.iter().enumerate() {
            data[map[i]] = r.clone();
        }
        SparseRatMatrix { rows, cols: self.cols, data }
    }

    /// First position where two same-shaped matrices differ, in row-major order.
    pub fn first_difference(&self, other: &SparseRatMatrix) -> Option<(usize, usize, Rat, Rat)> {
        if self.shape() != other.shape() {
            return Some((self.rows.min(other.rows), self.cols.min(other.cols), Rat::zero(), Rat::zero()));
        }
        let diff = self.sub(other);
        let (i, j, _) = diff.entries().next()?;
        Some((i, j, self.get(i, j), other.get(i, j)))
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && self
                .data
                .iter()
                .enumerate()
                .all(|(i, r)| r.len() == 1 && r[0].0 == i && r[0].1.is_one())
    }
}

fn normalize_row(mut row: SparseVec) -> SparseVec {
    row.sort_by_key(|e| e.0);
    let mut out: SparseVec = Vec::with_capacity(row.len());
    for (j, v) in row {
        match out.last_mut() {
            Some((lj, lv)) if *lj == j => *lv += &v,
            _ => out.push((j, v)),
        }
    }
    out.retain(|e| !e.1.is_zero());
    out
}

impl fmt::Debug for SparseRatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SparseRatMatrix {}x{} [", self.rows, self.cols)?;
        if self.rows * self.cols <= 400 {
            for r in self.to_dense() {
                let cells: Vec<String> = r.iter().map(|v| v.to_string()).collect();
                writeln!(f, "  [{}]", cells.join(", "))?;
            }
        } else {
            for (i, j, v) in self.entries().take(40) {
                writeln!(f, "  ({i}, {j}) = {v}")?;
            }
        }
        write!(f, "]")
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, Rat)>,
}

impl Serialize for SparseRatMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        MatrixRepr {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries().map(|(i, j, v)| (i, j, v.clone())).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SparseRatMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = MatrixRepr::deserialize(deserializer)?;
        let mut data: Vec<SparseVec> = vec![Vec::new(); repr.rows];
        for (i, j, v) in repr.entries {
            if i >= repr.rows || j >= repr.cols {
                return Err(D::Error::custom(format!(
                    "entry ({i}, {j}) outside a {}x{} matrix",
                    repr.rows, repr.cols
                )));
            }
            data[i].push((j, v));
        }
        for (i, row) in data.iter_mut().enumerate() {
            row.sort_by_key(|e| e.0);
            if let Some(w) = row.windows(2).find(|w| w[0].0 == w[1].0) {
                return Err(D::Error::custom(format!("duplicate entry at ({i}, {})", w[0].0)));
            }
            row.retain(|e| !e.1.is_zero());
        }
        Ok(SparseRatMatrix { rows: repr.rows, cols: repr.cols, data })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>]) -> SparseRatMatrix {
        SparseRatMatrix::from_i64_rows(rows)
    }

    #[test]
    fn product_and_transpose() {
        let a = m(&[vec![1, 2], vec![0, 1], vec![3, 0]]);
        let b = m(&[vec![1, 0, 1], vec![-1, 1, 0]]);
        let ab = a.mul(&b);
        assert_eq!(ab, m(&[vec![-1, 2, 1], vec![-1, 1, 0], vec![3, 0, 3]]));
        assert_eq!(a.transpose().transpose(), a);
        assert_eq!(b.transpose().mul(&a.transpose()), ab.transpose());
    }

    #[test]
    fn cancellation_leaves_no_stored_zeros() {
        let a = m(&[vec![1, 1]]);
        let b = m(&[vec![1], vec![-1]]);
        let p = a.mul(&b);
        assert_eq!(p.nnz(), 0);
        assert_eq!(p, SparseRatMatrix::zeros(1, 1));
        assert_eq!(a.sub(&a), SparseRatMatrix::zeros(1, 2));
    }

    #[test]
    fn stacking() {
        let a = m(&[vec![1], vec![2]]);
        let i = SparseRatMatrix::identity(2);
        let h = SparseRatMatrix::hstack(&[&a, &i]);
        assert_eq!(h, m(&[vec![1, 1, 0], vec![2, 0, 1]]));
        let v = SparseRatMatrix::vstack(&[&h, &m(&[vec![0, 0, 5]])]);
        assert_eq!(v.shape(), (3, 3));
        let d = SparseRatMatrix::block_diag(&[&a, &i]);
        assert_eq!(d, m(&[vec![1, 0, 0], vec![2, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]));
    }

    #[test]
    fn json_format() {
        let a = SparseRatMatrix::from_triplets(2, 3, [(0, 2, Rat::new(1, 2).unwrap()), (1, 0, Rat::from_int(-4))])
            .unwrap();
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"{"rows":2,"cols":3,"entries":[[0,2,"1/2"],[1,0,"-4"]]}"#);
        let back: SparseRatMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, a);
        let bad = r#"{"rows":1,"cols":1,"entries":[[0,0,"1/0"]]}"#;
        assert!(serde_json::from_str::<SparseRatMatrix>(bad).is_err());
        let dup = r#"{"rows":1,"cols":1,"entries":[[0,0,"1"],[0,0,"2"]]}"#;
        assert!(serde_json::from_str::<SparseRatMatrix>(dup).is_err());
    }
}
