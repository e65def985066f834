use std::collections::BTreeMap;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::HirschError;
use crate::complex::{complex_from_parts, ChainMap, Complex};
use crate::linalg::{self, SparseRatMatrix};

/// Describes a complex of the form `K ⊗ Λ^q(V)` with operators `L_j = φ(u_j) ∧ -`.
///
/// The basis of degree `q` is ordered coefficient-major, then by the
/// lexicographically ordered `q`-subsets of the `form_count` generators of `V`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExteriorLayout {
    pub coefficient_labels: Vec<String>,
    pub form_count: usize,
    /// `form_count x r`: column `j` is `φ(u_j)` in the generator basis of `V`.
    pub phi: SparseRatMatrix,
}

/// A complex `C` with operators `L_1..L_r` of degree +1 satisfying
/// `L_j^2 = 0`, `L_j L_k + L_k L_j = 0` and `d L_j + L_j d = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HirschDatum {
    complex: Complex,
    /// `ops[j][k]` is `L_j` on degree `min_deg + k`.
    ops: Vec<Vec<SparseRatMatrix>>,
    generators: Vec<String>,
    exterior: Option<ExteriorLayout>,
    /// Optional grading tag per basis vector, preserved by `d` and every `L_j`.
    weights: Option<BTreeMap<i32, Vec<usize>>>,
}

/// Which operator identity fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Identity {
    Square(usize),
    AntiCommute(usize, usize),
    AntiCommuteD(usize),
}

impl std::fmt::Display for Identity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Identity::Square(j) => write!(f, "Square(L_{})", j + 1),
            Identity::AntiCommute(j, k) => write!(f, "AntiCommute(L_{}, L_{})", j + 1, k + 1),
            Identity::AntiCommuteD(j) => write!(f, "AntiCommute(d, L_{})", j + 1),
        }
    }
}

impl HirschDatum {
    /// `ops[j]` maps each degree `q` of `complex` to the matrix of `L_j: C^q -> C^{q+1}`.
    pub fn new(complex: Complex, ops: Vec<BTreeMap<i32, SparseRatMatrix>>) -> Result<Self, HirschError> {
        let h = Self::new_unchecked(complex, ops)?;
        h.validate()?;
        Ok(h)
    }

    /// Checks shapes only.
    pub fn new_unchecked(complex: Complex, ops: Vec<BTreeMap<i32, SparseRatMatrix>>) -> Result<Self, HirschError> {
        let mut dense_ops = Vec::with_capacity(ops.len());
        for (j, op) in ops.into_iter().enumerate() {
            let mut per = Vec::new();
            for q in complex.degrees() {
                let expected = (complex.dim(q + 1), complex.dim(q));
                let m = op.get(&q).cloned().unwrap_or_else(|| SparseRatMatrix::zeros(expected.0, expected.1));
                if m.shape() != expected {
                    return Err(HirschError::OperatorShape { op: j, degree: q, expected, found: m.shape() });
                }
                per.push(m);
            }
            for (&q, m) in &op {
                if !complex.degrees().contains(&q) && !m.is_zero() {
                    return Err(HirschError::OperatorShape { op: j, degree: q, expected: (0, 0), found: m.shape() });
                }
            }
            dense_ops.push(per);
        }
        let generators = (1..=dense_ops.len()).map(|j| format!("u{j}")).collect();
        Ok(HirschDatum { complex, ops: dense_ops, generators, exterior: None, weights: None })
    }

    pub fn with_generators(mut self, names: Vec<String>) -> Self {
        assert_eq!(names.len(), self.ops.len());
        self.generators = names;
        self
    }

    pub fn with_exterior(mut self, layout: ExteriorLayout) -> Self {
        self.exterior = Some(layout);
        self
    }

    /// Attaches grading tags; fails if `d` or some `L_j` mixes tags.
    pub fn with_weights(mut self, weights: BTreeMap<i32, Vec<usize>>) -> Result<Self, HirschError> {
        for q in self.complex.degrees() {
            let w = weights.get(&q).map_or(0, Vec::len);
            if w != self.complex.dim(q) {
                return Err(HirschError::WeightMismatch { degree: q });
            }
        }
        let tag = |q: i32, i: usize| weights[&q][i];
        for q in self.complex.degrees() {
            let mut mats = vec![self.complex.d(q)];
            mats.extend((0..self.r()).map(|j| self.op(j, q)));
            for m in mats {
                if m.entries().any(|(i, k, _)| tag(q + 1, i) != tag(q, k)) {
                    return Err(HirschError::WeightMismatch { degree: q });
                }
            }
        }
        self.weights = Some(weights);
        Ok(self)
    }

    pub fn complex(&self) -> &Complex {
        &self.complex
    }

    pub fn r(&self) -> usize {
        self.ops.len()
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn exterior(&self) -> Option<&ExteriorLayout> {
        self.exterior.as_ref()
    }

    pub fn weights(&self) -> Option<&BTreeMap<i32, Vec<usize>>> {
        self.weights.as_ref()
    }

    /// `L_j: C^q -> C^{q+1}`, zero outside the stored range.
    pub fn op(&self, j: usize, q: i32) -> SparseRatMatrix {
        if self.complex.degrees().contains(&q) {
            self.ops[j][(q - self.complex.min_deg()) as usize].clone()
        } else {
            SparseRatMatrix::zeros(self.complex.dim(q + 1), self.complex.dim(q))
        }
    }

    pub fn validate(&self) -> Result<(), HirschError> {
        self.complex.validate()?;
        for q in self.complex.degrees() {
            let d0 = self.complex.d(q);
            let d1 = self.complex.d(q + 1);
            for j in 0..self.r() {
                let lj0 = self.op(j, q);
                let lj1 = self.op(j, q + 1);
                check(lj1.mul(&lj0), Identity::Square(j), q)?;
                for k in j + 1..self.r() {
                    let lk0 = self.op(k, q);
                    let lk1 = self.op(k, q + 1);
                    check(lj1.mul(&lk0).add(&lk1.mul(&lj0)), Identity::AntiCommute(j, k), q)?;
                }
                check(d1.mul(&lj0).add(&lj1.mul(&d0)), Identity::AntiCommuteD(j), q)?;
            }
        }
        Ok(())
    }

    /// The same complex with operators replaced.
    pub fn with_ops(&self, ops: Vec<BTreeMap<i32, SparseRatMatrix>>) -> Result<HirschDatum, HirschError> {
        let mut h = HirschDatum::new_unchecked(self.complex.clone(), ops)?;
        h.weights = self.weights.clone();
        h.validate()?;
        Ok(h)
    }

    pub fn ops_map(&self, j: usize) -> BTreeMap<i32, SparseRatMatrix> {
        self.complex.degrees().map(|q| (q, self.op(j, q))).collect()
    }

    /// Sub-datum on the given coordinates, which must be stable under `d` and every `L_j`.
    pub fn restrict_coordinates(&self, coords: &BTreeMap<i32, Vec<usize>>) -> HirschDatum {
        let c = &self.complex;
        let empty = Vec::new();
        let get = |q: i32| coords.get(&q).unwrap_or(&empty);
        let labels = c.degrees().map(|q| get(q).iter().map(|&i| c.labels(q)[i].clone()).collect()).collect();
        let d = c.degrees().map(|q| c.d(q).submatrix(get(q + 1), get(q))).collect();
        let complex = Complex::new_unchecked(c.min_deg(), labels, d).expect("submatrix shapes agree");
        let ops = (0..self.r())
            .map(|j| c.degrees().map(|q| (q, self.op(j, q).submatrix(get(q + 1), get(q)))).collect())
            .collect();
        let mut h = HirschDatum::new_unchecked(complex, ops).expect("submatrix shapes agree");
        h.generators = self.generators.clone();
        if let Some(w) = &self.weights {
            h.weights = Some(c.degrees().map(|q| (q, get(q).iter().map(|&i| w[&q][i]).collect())).collect());
        }
        h
    }

    /// Splits along the weight tags; a single block if there are none.
    pub fn weight_blocks(&self) -> Vec<(usize, HirschDatum)> {
        let Some(w) = &self.weights else {
            return vec![(0, self.clone())];
        };
        let mut tags: BTreeMap<usize, BTreeMap<i32, Vec<usize>>> = BTreeMap::new();
        for q in self.complex.degrees() {
            for (i, &t) in w[&q].iter().enumerate() {
                tags.entry(t).or_default().entry(q).or_default().push(i);
            }
        }
        tags.into_iter().map(|(t, coords)| (t, self.restrict_coordinates(&coords))).collect()
    }

    /// Quotient by `sum_{j in J} im L_j` (a subcomplex since `d L_j = -L_j d`).
    ///
    /// The quotient basis consists of classes of standard basis vectors, chosen
    /// greedily in basis order after the subspace. The remaining operators descend.
    pub fn quotient_complex(&self, js: &[usize]) -> Result<HirschQuotient, HirschError> {
        let c = &self.complex;
        let mut kept: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
        let mut proj: BTreeMap<i32, SparseRatMatrix> = BTreeMap::new();
        for q in c.degrees() {
            let n = c.dim(q);
            let images: Vec<SparseRatMatrix> = js.iter().map(|&j| self.op(j, q - 1)).collect();
            let refs: Vec<&SparseRatMatrix> = images.iter().collect();
            let sub = if refs.is_empty() {
                SparseRatMatrix::zeros(n, 0)
            } else {
                linalg::subspace_sum(&refs)
            };
            let quot = linalg::quotient_dims(&sub, &SparseRatMatrix::identity(n))?;
            let k = quot.complement_columns;
            let basis = SparseRatMatrix::hstack(&[&sub, &quot.complement]);
            let inv = linalg::inverse(&basis).expect("subspace plus complement is a basis");
            let rows: Vec<usize> = (sub.cols()..n).collect();
            proj.insert(q, inv.select_rows(&rows));
            kept.insert(q, k);
        }
        let induced = |m: &SparseRatMatrix, q: i32| -> SparseRatMatrix {
            let id = SparseRatMatrix::identity(c.dim(q));
            let p = proj.get(&(q + 1)).cloned().unwrap_or_else(|| SparseRatMatrix::zeros(0, c.dim(q + 1)));
            p.mul(m).mul(&id.select_columns(&kept[&q]))
        };
        let labels = c.degrees().map(|q| kept[&q].iter().map(|&i| c.labels(q)[i].clone()).collect()).collect();
        let d = c.degrees().map(|q| induced(&c.d(q), q)).collect();
        let complex = Complex::new(c.min_deg(), labels, d)?;
        let remaining: Vec<usize> = (0..self.r()).filter(|j| !js.contains(j)).collect();
        let ops = remaining
            .iter()
            .map(|&j| c.degrees().map(|q| (q, induced(&self.op(j, q), q))).collect())
            .collect();
        let mut datum = HirschDatum::new_unchecked(complex.clone(), ops)?;
        datum.generators = remaining.iter().map(|&j| self.generators[j].clone()).collect();
        if let Some(w) = &self.weights {
            datum.weights = Some(c.degrees().map(|q| (q, kept[&q].iter().map(|&i| w[&q][i]).collect())).collect());
        }
        datum.validate()?;
        let projection = ChainMap::new(c.clone(), complex, proj)?;
        Ok(HirschQuotient { datum, projection, kept })
    }
}

fn check(m: SparseRatMatrix, identity: Identity, degree: i32) -> Result<(), HirschError> {
    let first = m.entries().next().map(|e| e.1);
    match first {
        None => Ok(()),
        Some(j) => Err(HirschError::DatumViolation { identity, degree, basis_index: j, witness: m.column(j) }),
    }
}

/// Result of [`HirschDatum::quotient_complex`].
#[derive(Clone, Debug)]
pub struct HirschQuotient {
    /// Quotient complex with the operators that were not divided out.
    pub datum: HirschDatum,
    pub projection: ChainMap,
    /// Indices of the basis vectors whose classes form the quotient basis.
    pub kept: BTreeMap<i32, Vec<usize>>,
}

impl HirschQuotient {
    pub fn complex(&self) -> &Complex {
        self.datum.complex()
    }
}

#[derive(Serialize, Deserialize)]
struct DatumRepr {
    min_deg: i32,
    max_deg: i32,
    spaces: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    d: BTreeMap<String, SparseRatMatrix>,
    #[serde(rename = "L")]
    l: Vec<BTreeMap<String, SparseRatMatrix>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    generators: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    exterior: Option<ExteriorLayout>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weights: Option<BTreeMap<String, Vec<usize>>>,
}

impl Serialize for HirschDatum {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let c = &self.complex;
        DatumRepr {
            min_deg: c.min_deg(),
            max_deg: c.max_deg(),
            spaces: c.degrees().map(|q| (q.to_string(), c.labels(q).to_vec())).collect(),
            d: c.degrees().filter(|&q| q < c.max_deg()).map(|q| (q.to_string(), c.d(q))).collect(),
            l: (0..self.r())
                .map(|j| {
                    c.degrees().filter(|&q| q < c.max_deg()).map(|q| (q.to_string(), self.op(j, q))).collect()
                })
                .collect(),
            generators: Some(self.generators.clone()),
            exterior: self.exterior.clone(),
            weights: self.weights.as_ref().map(|w| w.iter().map(|(q, v)| (q.to_string(), v.clone())).collect()),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for HirschDatum {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = DatumRepr::deserialize(deserializer)?;
        let complex = complex_from_parts(repr.min_deg, repr.max_deg, &repr.spaces, &repr.d).map_err(D::Error::custom)?;
        let parse = |k: &str| k.parse::<i32>().map_err(|_| D::Error::custom(format!("bad degree key {k:?}")));
        let mut ops = Vec::new();
        for l in repr.l {
            let mut m = BTreeMap::new();
            for (k, v) in l {
                m.insert(parse(&k)?, v);
            }
            ops.push(m);
        }
        let mut h = HirschDatum::new(complex, ops).map_err(D::Error::custom)?;
        if let Some(g) = repr.generators {
            if g.len() != h.r() {
                return Err(D::Error::custom("generator count does not match operator count"));
            }
            h.generators = g;
        }
        h.exterior = repr.exterior;
        if let Some(w) = repr.weights {
            let mut m = BTreeMap::new();
            for (k, v) in w {
                m.insert(parse(&k)?, v);
            }
            h = h.with_weights(m).map_err(D::Error::custom)?;
        }
        Ok(h)
    }
}
