//! Divided-power monomials `u^[e] = u_1^[e_1] ... u_r^[e_r]`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::binomial;

use crate::linalg::Rat;

/// All exponent vectors `e` with `|e| <= n` in `r` variables.
///
/// Ordered by total degree, then descending lexicographically within a
/// degree, so the monomials of degree `<= n` are a prefix of those of degree
/// `<= n + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PdMonomials {
    r: usize,
    n: usize,
    list: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
    /// `starts[k]` is the index of the first monomial of degree `k`; `starts[n+1] = len`.
    starts: Vec<usize>,
}

impl PdMonomials {
    pub fn new(r: usize, n: usize) -> Self {
        let mut list = Vec::new();
        let mut starts = Vec::new();
        for k in 0..=n {
            starts.push(list.len());
            if r == 0 {
                if k == 0 {
                    list.push(Vec::new());
                }
                continue;
            }
            list.extend(compositions_desc(r, k as u32));
        }
        starts.push(list.len());
        let index = list.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
        PdMonomials { r, n, list, index, starts }
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn bound(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.list.len()
    }

    pub fn is_empty(&self) -> bool {
        self.list.is_empty()
    }

    pub fn get(&self, i: usize) -> &[u32] {
        &self.list[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u32]> + '_ {
        self.list.iter().map(Vec::as_slice)
    }

    pub fn index_of(&self, e: &[u32]) -> Option<usize> {
        self.index.get(e).copied()
    }

    /// Number of monomials of degree `<= k` (for `k <= n`).
    pub fn count_upto(&self, k: usize) -> usize {
        self.starts[(k + 1).min(self.starts.len() - 1)]
    }

    /// Index range of the monomials of degree exactly `k`.
    pub fn degree_range(&self, k: usize) -> std::ops::Range<usize> {
        if k > self.n {
            return self.list.len()..self.list.len();
        }
        self.starts[k]..self.starts[k + 1]
    }
}

/// Total degree `|e|`.
pub fn degree(e: &[u32]) -> usize {
    e.iter().map(|&x| x as usize).sum()
}

/// Exponent vectors of total degree `k` in `r` variables, descending lexicographic.
pub fn compositions_desc(r: usize, k: u32) -> Vec<Vec<u32>> {
    if r == 0 {
        return if k == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    if r == 1 {
        return vec![vec![k]];
    }
    let mut out = Vec::new();
    for first in (0..=k).rev() {
        for mut rest in compositions_desc(r - 1, k - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Human-readable label: `u^[2]` for one variable, `u1^[1]u2^[3]` otherwise; empty for `e = 0`.
pub fn monomial_label(e: &[u32]) -> String {
    if e.len() == 1 {
        return if e[0] == 0 { String::new() } else { format!("u^[{}]", e[0]) };
    }
    e.iter()
        .enumerate()
        .filter(|(_, &x)| x > 0)
        .map(|(i, x)| format!("u{}^[{x}]", i + 1))
        .collect()
}

/// `u^[a] u^[b] = (prod_i binom(a_i + b_i, a_i)) u^[a+b]`.
pub fn pd_product(a: &[u32], b: &[u32]) -> (Rat, Vec<u32>) {
    let mut c = BigInt::from(1);
    let mut sum = Vec::with_capacity(a.len());
    for (x, y) in a.iter().zip(b) {
        c *= binomial(BigInt::from(x + y), BigInt::from(*x));
        sum.push(x + y);
    }
    (Rat::from_bigint(c), sum)
}

/// `(sum_i a_i u_i)^[k] = sum_{|f| = k} (prod_i a_i^{f_i}) u^[f]`, zero terms dropped.
pub fn linear_power(a: &[Rat], k: u32) -> Vec<(Vec<u32>, Rat)> {
    compositions_desc(a.len(), k)
        .into_iter()
        .filter_map(|f| {
            let mut c = Rat::one();
            for (ai, &fi) in a.iter().zip(&f) {
                for _ in 0..fi {
                    c *= ai;
                }
            }
            (!c.is_zero()).then_some((f, c))
        })
        .collect()
}

/// Product of sparse polynomials in the divided-power basis, dropping degrees above `bound`.
pub fn pd_poly_product(
    p: &[(Vec<u32>, Rat)],
    q: &[(Vec<u32>, Rat)],
    bound: usize,
) -> Vec<(Vec<u32>, Rat)> {
    let mut acc: std::collections::BTreeMap<Vec<u32>, Rat> = Default::default();
    for (a, ca) in p {
        for (b, cb) in q {
            if degree(a) + degree(b) > bound {
                continue;
            }
            let (c, e) = pd_product(a, b);
            let v = &(ca * cb) * &c;
            let slot = acc.entry(e).or_insert_with(Rat::zero);
            *slot += &v;
        }
    }
    acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_is_graded_descending_lex() {
        let m = PdMonomials::new(2, 2);
        let got: Vec<&[u32]> = m.iter().collect();
        let want: Vec<&[u32]> = vec![&[0, 0], &[1, 0], &[0, 1], &[2, 0], &[1, 1], &[0, 2]];
        assert_eq!(got, want);
        assert_eq!(m.count_upto(1), 3);
        assert_eq!(m.degree_range(2), 3..6);
        let bigger = PdMonomials::new(2, 3);
        assert!(bigger.iter().take(m.len()).eq(m.iter()));
    }

    #[test]
    fn counts_match_binomials() {
        for r in 0..4usize {
            for n in 0..5usize {
                let m = PdMonomials::new(r, n);
                assert_eq!(m.len() as u64, binomial((n + r) as u64, r as u64), "r={r} n={n}");
            }
        }
    }

    #[test]
    fn divided_power_products() {
        let (c, e) = pd_product(&[1, 2], &[1, 0]);
        assert_eq!((c, e), (Rat::from_int(2), vec![2, 2]));
        let sq = linear_power(&[Rat::one(), Rat::one()], 2);
        assert_eq!(sq, vec![(vec![2, 0], Rat::one()), (vec![1, 1], Rat::one()), (vec![0, 2], Rat::one())]);
        // (u1 + u2)^[1] * (u1 + u2)^[1] = 2 (u1 + u2)^[2]
        let lin = linear_power(&[Rat::one(), Rat::one()], 1);
        let prod = pd_poly_product(&lin, &lin, 4);
        let twice: Vec<(Vec<u32>, Rat)> = sq.iter().map(|(e, c)| (e.clone(), c * &Rat::from_int(2))).collect();
        let mut prod_sorted = prod.clone();
        prod_sorted.sort();
        let mut twice_sorted = twice;
        twice_sorted.sort();
        assert_eq!(prod_sorted, twice_sorted);
    }

    #[test]
    fn labels() {
        assert_eq!(monomial_label(&[0]), "");
        assert_eq!(monomial_label(&[3]), "u^[3]");
        assert_eq!(monomial_label(&[1, 0, 2]), "u1^[1]u3^[2]");
    }
}
