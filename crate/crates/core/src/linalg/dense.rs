use super::{Rref, SparseRatMatrix};

/// Gauss-Jordan elimination on a dense copy; used for small matrices.
pub fn dense_rref(a: &SparseRatMatrix) -> Rref {
    let (rows, cols) = a.shape();
    let mut m = a.to_dense();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip().expect("pivot is nonzero");
        if !inv.is_one() {
            for v in &mut m[r][c..] {
                *v *= &inv;
            }
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                if !pv.is_zero() {
                    *v -= &(&f * pv);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    Rref { r: SparseRatMatrix::from_dense(&m, cols), rank: pivots.len(), pivots }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Rat;

    #[test]
    fn dense_matches_hand_reduction() {
        let a = SparseRatMatrix::from_i64_rows(&[vec![0, 2, 4], vec![1, 1, 1], vec![2, 4, 6]]);
        let rr = dense_rref(&a);
        let expect = SparseRatMatrix::from_dense(
            &[
                vec![Rat::one(), Rat::zero(), Rat::from_int(-1)],
                vec![Rat::zero(), Rat::one(), Rat::from_int(2)],
                vec![Rat::zero(), Rat::zero(), Rat::zero()],
            ],
            3,
        );
        assert_eq!(rr.r, expect);
        assert_eq!(rr.pivots, vec![0, 1]);
    }
}
