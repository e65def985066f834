//! Bounded cochain complexes of based rational vector spaces.

use std::collections::BTreeMap;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::linalg::{self, LinalgError, SparseRatMatrix, SparseVec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexError {
    #[error("d squared is nonzero in degree {degree}: basis vector {basis_index} ({label}) survives d^{} . d^{degree}", degree + 1)]
    DSquareNonzero { degree: i32, basis_index: usize, label: String, witness: SparseVec },
    #[error("differential in degree {degree} has shape {found:?}, expected {expected:?}")]
    DifferentialShape { degree: i32, expected: (usize, usize), found: (usize, usize) },
    #[error("map in degree {degree} has shape {found:?}, expected {expected:?}")]
    MapShape { degree: i32, expected: (usize, usize), found: (usize, usize) },
    #[error("map does not commute with differentials in degree {degree}")]
    NotChainMap { degree: i32, witness: SparseVec },
    #[error("maps {index} and {} are not composable in degree {degree}", index + 1)]
    NotComposable { index: usize, degree: i32 },
    #[error("maps {index} and {} compose to a nonzero map in degree {degree}", index + 1)]
    CompositionNonzero { index: usize, degree: i32 },
    #[error("degree range [{min}, {max}] is empty")]
    EmptyRange { min: i32, max: i32 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A bounded cochain complex `C^min -> ... -> C^max` with labelled bases.
///
/// Spaces outside `[min_deg, max_deg]` are zero. The differential `d^q` has
/// shape `dim C^{q+1} x dim C^q`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Complex {
    min_deg: i32,
    labels: Vec<Vec<String>>,
    d: Vec<SparseRatMatrix>,
}

impl Complex {
    /// Builds and validates a complex; `labels[k]` and `d[k]` belong to degree `min_deg + k`.
    ///
    /// `d` may omit trailing maps; the last differential always has zero target.
    pub fn new(min_deg: i32, labels: Vec<Vec<String>>, d: Vec<SparseRatMatrix>) -> Result<Self, ComplexError> {
        let c = Self::new_unchecked(min_deg, labels, d)?;
        c.validate()?;
        Ok(c)
    }

    /// Checks shapes but not `d^2 = 0`.
    pub fn new_unchecked(
        min_deg: i32,
        labels: Vec<Vec<String>>,
        mut d: Vec<SparseRatMatrix>,
    ) -> Result<Self, ComplexError> {
        if labels.is_empty() {
            return Err(ComplexError::EmptyRange { min: min_deg, max: min_deg - 1 });
        }
        let n = labels.len();
        while d.len() < n {
            let k = d.len();
            let rows = labels.get(k + 1).map_or(0, Vec::len);
            d.push(SparseRatMatrix::zeros(rows, labels[k].len()));
        }
        d.truncate(n);
        for (k, dk) in d.iter().enumerate() {
            let expected = (labels.get(k + 1).map_or(0, Vec::len), labels[k].len());
            if dk.shape() != expected {
                return Err(ComplexError::DifferentialShape {
                    degree: min_deg + k as i32,
                    expected,
                    found: dk.shape(),
                });
            }
        }
        Ok(Complex { min_deg, labels, d })
    }

    /// The zero complex concentrated on `[min_deg, max_deg]`.
    pub fn zero(min_deg: i32, max_deg: i32) -> Self {
        let n = (max_deg - min_deg + 1).max(1) as usize;
        Complex::new_unchecked(min_deg, vec![Vec::new(); n], Vec::new()).expect("shapes agree")
    }

    /// A single space in degree `deg`.
    pub fn concentrated(deg: i32, labels: Vec<String>) -> Self {
        Complex::new_unchecked(deg, vec![labels], Vec::new()).expect("shapes agree")
    }

    pub fn min_deg(&self) -> i32 {
        self.min_deg
    }

    pub fn max_deg(&self) -> i32 {
        self.min_deg + self.labels.len() as i32 - 1
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i32> {
        self.min_deg()..=self.max_deg()
    }

    fn index(&self, q: i32) -> Option<usize> {
        if q < self.min_deg || q > self.max_deg() {
            None
        } else {
            Some((q - self.min_deg) as usize)
        }
    }

    pub fn dim(&self, q: i32) -> usize {
        self.index(q).map_or(0, |k| self.labels[k].len())
    }

    pub fn dims(&self) -> Vec<usize> {
        self.labels.iter().map(Vec::len).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.labels.iter().map(Vec::len).sum()
    }

    pub fn labels(&self, q: i32) -> &[String] {
        self.index(q).map_or(&[], |k| &self.labels[k])
    }

    /// `d^q: C^q -> C^{q+1}`; a zero matrix of the right shape outside the range.
    pub fn d(&self, q: i32) -> SparseRatMatrix {
        match self.index(q) {
            Some(k) => self.d[k].clone(),
            None => SparseRatMatrix::zeros(self.dim(q + 1), self.dim(q)),
        }
    }

    pub fn d_ref(&self, q: i32) -> Option<&SparseRatMatrix> {
        self.index(q).map(|k| &self.d[k])
    }

    /// Confirms `d^{q+1} d^q = 0` in every degree.
    pub fn validate(&self) -> Result<(), ComplexError> {
        for q in self.min_deg()..self.max_deg() {
            let k = (q - self.min_deg) as usize;
            let dd = self.d[k + 1].mul(&self.d[k]);
            let first = dd.entries().next().map(|e| e.1);
            if let Some(j) = first {
                return Err(ComplexError::DSquareNonzero {
                    degree: q,
                    basis_index: j,
                    label: self.labels[k][j].clone(),
                    witness: dd.column(j),
                });
            }
        }
        Ok(())
    }

    pub fn rank_d(&self, q: i32) -> usize {
        self.d_ref(q).map_or(0, linalg::rank)
    }

    /// Dimension of `H^q` from ranks alone.
    pub fn betti(&self, q: i32) -> usize {
        self.dim(q) - self.rank_d(q) - self.rank_d(q - 1)
    }

    pub fn bettis(&self) -> Vec<usize> {
        self.degrees().map(|q| self.betti(q)).collect()
    }

    pub fn is_acyclic(&self) -> bool {
        self.degrees().all(|q| self.betti(q) == 0)
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.degrees()
            .map(|q| if q.rem_euclid(2) == 0 { self.dim(q) as i64 } else { -(self.dim(q) as i64) })
            .sum()
    }

    pub fn cycles(&self, q: i32) -> SparseRatMatrix {
        linalg::kernel_basis(&self.d(q))
    }

    pub fn boundaries(&self, q: i32) -> SparseRatMatrix {
        linalg::image_basis(&self.d(q - 1))
    }

    pub fn cohomology(&self, q: i32) -> Cohomology {
        let cycles = self.cycles(q);
        let boundaries = self.boundaries(q);
        let quot = linalg::quotient_dims(&boundaries, &cycles).expect("boundaries are cycles in a valid complex");
        Cohomology { degree: q, dim: quot.dim, representatives: quot.complement, boundaries }
    }

    /// `(C[k])^q = C^{q+k}` with differential `(-1)^k d`.
    pub fn shift(&self, k: i32) -> Complex {
        let d = if k.rem_euclid(2) == 0 { self.d.clone() } else { self.d.iter().map(|m| m.neg()).collect() };
        Complex { min_deg: self.min_deg - k, labels: self.labels.clone(), d }
    }

    /// Restricts or pads the stored degree range; spaces dropped must be zero.
    pub fn with_range(&self, min_deg: i32, max_deg: i32) -> Complex {
        debug_assert!(self.degrees().all(|q| (min_deg..=max_deg).contains(&q) || self.dim(q) == 0));
        let labels = (min_deg..=max_deg).map(|q| self.labels(q).to_vec()).collect();
        let d = (min_deg..=max_deg).map(|q| self.d(q)).collect();
        Complex { min_deg, labels, d }
    }

    /// Subcomplex spanned by `spans[q]` (columns in `C^q`, assumed a basis and `d`-stable).
    pub fn restrict_to(&self, spans: &BTreeMap<i32, SparseRatMatrix>) -> Result<Complex, ComplexError> {
        let empty = |q: i32| SparseRatMatrix::zeros(self.dim(q), 0);
        let mut labels = Vec::new();
        let mut d = Vec::new();
        for q in self.degrees() {
            let s = spans.get(&q).cloned().unwrap_or_else(|| empty(q));
            let t = spans.get(&(q + 1)).cloned().unwrap_or_else(|| empty(q + 1));
            labels.push(span_labels(self.labels(q), &s, q));
            let image = self.d(q).mul(&s);
            let coords = linalg::solve(&t, &image).ok_or(ComplexError::NotChainMap {
                degree: q,
                witness: Vec::new(),
            })?;
            d.push(coords);
        }
        Complex::new(self.min_deg, labels, d)
    }

    /// Namespaced copy of the labels of degree `q`.
    pub fn prefixed_labels(&self, q: i32, prefix: &str) -> Vec<String> {
        self.labels(q).iter().map(|l| format!("{prefix}{l}")).collect()
    }

    /// Replaces every label by `f(q, index, old)`.
    pub fn relabel(&self, f: impl Fn(i32, usize, &str) -> String) -> Complex {
        let labels = self
            .labels
            .iter()
            .enumerate()
            .map(|(k, ls)| ls.iter().enumerate().map(|(i, l)| f(self.min_deg + k as i32, i, l)).collect())
            .collect();
        Complex { min_deg: self.min_deg, labels, d: self.d.clone() }
    }
}

/// Labels for a span: reuse the ambient label for coordinate vectors.
pub(crate) fn span_labels(ambient: &[String], span: &SparseRatMatrix, q: i32) -> Vec<String> {
    span.columns()
        .iter()
        .enumerate()
        .map(|(k, col)| match col.as_slice() {
            [(i, v)] if v.is_one() => ambient[*i].clone(),
            _ => format!("v{q}_{k}"),
        })
        .collect()
}

/// Cohomology in one degree with representative cycles.
#[derive(Clone, Debug)]
pub struct Cohomology {
    pub degree: i32,
    pub dim: usize,
    /// Cycles whose classes form a basis of `H^q`.
    pub representatives: SparseRatMatrix,
    pub boundaries: SparseRatMatrix,
}

/// A degreewise linear map commuting with the differentials.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ChainMap {
    source: Complex,
    target: Complex,
    maps: BTreeMap<i32, SparseRatMatrix>,
}

impl ChainMap {
    /// `maps[q]: source^q -> target^q`; missing degrees are zero. Validated.
    pub fn new(source: Complex, target: Complex, maps: BTreeMap<i32, SparseRatMatrix>) -> Result<Self, ComplexError> {
        let f = Self::new_unchecked(source, target, maps)?;
        f.validate()?;
        Ok(f)
    }

    pub fn new_unchecked(
        source: Complex,
        target: Complex,
        mut maps: BTreeMap<i32, SparseRatMatrix>,
    ) -> Result<Self, ComplexError> {
        maps.retain(|_, m| m.rows() > 0 && m.cols() > 0);
        for (&q, m) in &maps {
            let expected = (target.dim(q), source.dim(q));
            if m.shape() != expected {
                return Err(ComplexError::MapShape { degree: q, expected, found: m.shape() });
            }
        }
        Ok(ChainMap { source, target, maps })
    }

    pub fn identity(c: &Complex) -> ChainMap {
        let maps = c.degrees().map(|q| (q, SparseRatMatrix::identity(c.dim(q)))).collect();
        ChainMap::new_unchecked(c.clone(), c.clone(), maps).expect("shapes agree")
    }

    pub fn zero(source: &Complex, target: &Complex) -> ChainMap {
        ChainMap { source: source.clone(), target: target.clone(), maps: BTreeMap::new() }
    }

    pub fn source(&self) -> &Complex {
        &self.source
    }

    pub fn target(&self) -> &Complex {
        &self.target
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i32> {
        self.source.min_deg().min(self.target.min_deg())..=self.source.max_deg().max(self.target.max_deg())
    }

    pub fn map(&self, q: i32) -> SparseRatMatrix {
        self.maps
            .get(&q)
            .cloned()
            .unwrap_or_else(|| SparseRatMatrix::zeros(self.target.dim(q), self.source.dim(q)))
    }

    pub fn maps(&self) -> &BTreeMap<i32, SparseRatMatrix> {
        &self.maps
    }

    /// Confirms `f d = d f` in every degree.
    pub fn validate(&self) -> Result<(), ComplexError> {
        for q in self.degrees() {
            let lhs = self.map(q + 1).mul(&self.source.d(q));
            let rhs = self.target.d(q).mul(&self.map(q));
            let diff = lhs.sub(&rhs);
            let first = diff.entries().next().map(|e| e.1);
            if let Some(j) = first {
                return Err(ComplexError::NotChainMap { degree: q, witness: diff.column(j) });
            }
        }
        Ok(())
    }

    /// `self` after `first`.
    pub fn compose(&self, first: &ChainMap) -> Result<ChainMap, ComplexError> {
        for q in self.degrees().chain(first.degrees()) {
            if first.target.dim(q) != self.source.dim(q) {
                return Err(ComplexError::NotComposable { index: 0, degree: q });
            }
        }
        let maps = first
            .maps
            .keys()
            .filter_map(|&q| self.maps.get(&q).map(|g| (q, g.mul(&first.maps[&q]))))
            .collect();
        ChainMap::new_unchecked(first.source.clone(), self.target.clone(), maps)
    }

    pub fn is_zero(&self) -> bool {
        self.maps.values().all(SparseRatMatrix::is_zero)
    }

    /// Rank of the induced map `H^q(source) -> H^q(target)`.
    pub fn induced_rank(&self, q: i32) -> usize {
        let z = self.source.cycles(q);
        let image = self.map(q).mul(&z);
        let b = self.target.boundaries(q);
        linalg::rank(&SparseRatMatrix::hstack(&[&image, &b])) - b.cols()
    }

    /// Per-degree isomorphism verdict, cross-checked against acyclicity of the cone.
    pub fn quasi_iso_report(&self) -> QuasiIsoReport {
        let degrees: Vec<DegreeVerdict> = self
            .degrees()
            .map(|q| {
                let source_dim = self.source.betti(q);
                let target_dim = self.target.betti(q);
                let rank = self.induced_rank(q);
                DegreeVerdict { degree: q, source_dim, target_dim, rank, iso: rank == source_dim && rank == target_dim }
            })
            .collect();
        let cone = mapping_cone(self);
        let cone_bettis: Vec<(i32, usize)> = cone.complex.degrees().map(|q| (q, cone.complex.betti(q))).collect();
        let cone_acyclic = cone_bettis.iter().all(|(_, b)| *b == 0);
        QuasiIsoReport { degrees, cone_acyclic, cone_bettis }
    }

    pub fn is_quasi_iso(&self) -> bool {
        self.quasi_iso_report().is_quasi_iso()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeVerdict {
    pub degree: i32,
    pub source_dim: usize,
    pub target_dim: usize,
    pub rank: usize,
    pub iso: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuasiIsoReport {
    pub degrees: Vec<DegreeVerdict>,
    pub cone_acyclic: bool,
    pub cone_bettis: Vec<(i32, usize)>,
}

impl QuasiIsoReport {
    /// True when both routes agree on a quasi-isomorphism.
    pub fn is_quasi_iso(&self) -> bool {
        self.degrees.iter().all(|d| d.iso) && self.cone_acyclic
    }

    /// Whether the induced-map route and the cone route give the same answer.
    pub fn routes_agree(&self) -> bool {
        self.degrees.iter().all(|d| d.iso) == self.cone_acyclic
    }
}

/// The mapping cone with its structure maps.
#[derive(Clone, Debug)]
pub struct Cone {
    pub complex: Complex,
    /// `target -> cone`, `y -> (0, y)`.
    pub inclusion: ChainMap,
    /// `cone -> source[1]`, `(x, y) -> x`.
    pub projection: ChainMap,
}

/// `MC(f)^q = A^{q+1} + B^q` with `d(x, y) = (-dx, f x + dy)`.
pub fn mapping_cone(f: &ChainMap) -> Cone {
    let a = f.source();
    let b = f.target();
    let lo = (a.min_deg() - 1).min(b.min_deg());
    let hi = (a.max_deg() - 1).max(b.max_deg());
    let mut labels = Vec::new();
    let mut d = Vec::new();
    for q in lo..=hi {
        let mut l = a.prefixed_labels(q + 1, "s:");
        l.extend(b.prefixed_labels(q, "t:"));
        labels.push(l);
        let top = SparseRatMatrix::hstack(&[&a.d(q + 1).neg(), &SparseRatMatrix::zeros(a.dim(q + 2), b.dim(q))]);
        let bottom = SparseRatMatrix::hstack(&[&f.map(q + 1), &b.d(q)]);
        d.push(SparseRatMatrix::vstack(&[&top, &bottom]));
    }
    let complex = Complex::new_unchecked(lo, labels, d).expect("cone blocks have matching shapes");
    let mut inc = BTreeMap::new();
    let mut proj = BTreeMap::new();
    for q in lo..=hi {
        let (na, nb) = (a.dim(q + 1), b.dim(q));
        inc.insert(q, SparseRatMatrix::identity(nb).embed(na + nb, nb, na, 0));
        proj.insert(q, SparseRatMatrix::identity(na).embed(na, na + nb, 0, 0));
    }
    let inclusion = ChainMap::new_unchecked(b.clone(), complex.clone(), inc).expect("shapes agree");
    let projection = ChainMap::new_unchecked(complex.clone(), a.shift(1), proj).expect("shapes agree");
    Cone { complex, inclusion, projection }
}

/// Block-diagonal sum; labels become `"{i}:{label}"`.
pub fn direct_sum(cs: &[&Complex]) -> Complex {
    if cs.is_empty() {
        return Complex::zero(0, 0);
    }
    let lo = cs.iter().map(|c| c.min_deg()).min().unwrap();
    let hi = cs.iter().map(|c| c.max_deg()).max().unwrap();
    let mut labels = Vec::new();
    let mut d = Vec::new();
    for q in lo..=hi {
        labels.push(cs.iter().enumerate().flat_map(|(i, c)| c.prefixed_labels(q, &format!("{i}:"))).collect());
        let blocks: Vec<SparseRatMatrix> = cs.iter().map(|c| c.d(q)).collect();
        let refs: Vec<&SparseRatMatrix> = blocks.iter().collect();
        d.push(SparseRatMatrix::block_diag(&refs));
    }
    Complex::new_unchecked(lo, labels, d).expect("block shapes agree")
}

/// Exactness data at one node and degree of a sequence of chain maps.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NodeReport {
    pub node: usize,
    pub degree: i32,
    pub dim: usize,
    /// Dimension of the kernel of the outgoing map.
    pub kernel: usize,
    /// Rank of the incoming map.
    pub image: usize,
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExactnessReport {
    pub nodes: Vec<NodeReport>,
}

impl ExactnessReport {
    pub fn is_exact(&self) -> bool {
        self.nodes.iter().all(|n| n.exact)
    }

    pub fn first_failure(&self) -> Option<&NodeReport> {
        self.nodes.iter().find(|n| !n.exact)
    }
}

/// Checks `ker = im` at each node of `C_0 -> C_1 -> ... -> C_k`.
///
/// With `augmented`, the sequence is read as `0 -> C_0 -> ... -> C_k -> 0`,
/// so the end nodes are checked too; otherwise only interior nodes are.
pub fn check_exact_sequence(maps: &[ChainMap], augmented: bool) -> Result<ExactnessReport, ComplexError> {
    for (i, pair) in maps.windows(2).enumerate() {
        let (f, g) = (&pair[0], &pair[1]);
        for q in f.degrees().chain(g.degrees()) {
            if f.target().dim(q) != g.source().dim(q) {
                return Err(ComplexError::NotComposable { index: i, degree: q });
            }
            if !g.map(q).mul(&f.map(q)).is_zero() {
                return Err(ComplexError::CompositionNonzero { index: i, degree: q });
            }
        }
    }
    let mut nodes = Vec::new();
    let count = maps.len() + 1;
    for node in 0..count {
        let interior = node > 0 && node < maps.len();
        if !interior && !augmented {
            continue;
        }
        let space = if node < maps.len() { maps[node].source() } else { maps[node - 1].target() };
        for q in space.degrees() {
            let dim = space.dim(q);
            let kernel = if node < maps.len() { dim - linalg::rank(&maps[node].map(q)) } else { dim };
            let image = if node > 0 { linalg::rank(&maps[node - 1].map(q)) } else { 0 };
            nodes.push(NodeReport { node, degree: q, dim, kernel, image, exact: kernel == image });
        }
    }
    Ok(ExactnessReport { nodes })
}

#[derive(Serialize, Deserialize)]
struct ComplexRepr {
    min_deg: i32,
    max_deg: i32,
    spaces: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    d: BTreeMap<String, SparseRatMatrix>,
}

fn parse_degree<E: serde::de::Error>(key: &str) -> Result<i32, E> {
    key.trim().parse().map_err(|_| E::custom(format!("degree key {key:?} is not an integer")))
}

impl Serialize for Complex {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        ComplexRepr {
            min_deg: self.min_deg(),
            max_deg: self.max_deg(),
            spaces: self.degrees().map(|q| (q.to_string(), self.labels(q).to_vec())).collect(),
            d: self
                .degrees()
                .filter(|&q| q < self.max_deg())
                .map(|q| (q.to_string(), self.d(q)))
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Complex {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = ComplexRepr::deserialize(deserializer)?;
        complex_from_parts(repr.min_deg, repr.max_deg, &repr.spaces, &repr.d).map_err(D::Error::custom)
    }
}

pub(crate) fn complex_from_parts(
    min_deg: i32,
    max_deg: i32,
    spaces: &BTreeMap<String, Vec<String>>,
    d: &BTreeMap<String, SparseRatMatrix>,
) -> Result<Complex, String> {
    if max_deg < min_deg {
        return Err(format!("max_deg {max_deg} < min_deg {min_deg}"));
    }
    let mut labels = vec![Vec::new(); (max_deg - min_deg + 1) as usize];
    for (k, ls) in spaces {
        let q: i32 = parse_degree::<serde_json::Error>(k).map_err(|e| e.to_string())?;
        if q < min_deg || q > max_deg {
            return Err(format!("space in degree {q} outside [{min_deg}, {max_deg}]"));
        }
        labels[(q - min_deg) as usize] = ls.clone();
    }
    let mut ds: Vec<SparseRatMatrix> = (min_deg..=max_deg)
        .map(|q| {
            let rows = if q < max_deg { labels[(q + 1 - min_deg) as usize].len() } else { 0 };
            SparseRatMatrix::zeros(rows, labels[(q - min_deg) as usize].len())
        })
        .collect();
    for (k, m) in d {
        let q: i32 = parse_degree::<serde_json::Error>(k).map_err(|e| e.to_string())?;
        if q < min_deg || q >= max_deg {
            return Err(format!("differential in degree {q} outside [{min_deg}, {max_deg})"));
        }
        ds[(q - min_deg) as usize] = m.clone();
    }
    Complex::new(min_deg, labels, ds).map_err(|e| e.to_string())
}

#[derive(Serialize, Deserialize)]
struct ChainMapRepr {
    source: Complex,
    target: Complex,
    #[serde(default)]
    maps: BTreeMap<String, SparseRatMatrix>,
}

impl Serialize for ChainMap {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        ChainMapRepr {
            source: self.source.clone(),
            target: self.target.clone(),
            maps: self.maps.iter().map(|(q, m)| (q.to_string(), m.clone())).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ChainMap {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = ChainMapRepr::deserialize(deserializer)?;
        let mut maps = BTreeMap::new();
        for (k, m) in repr.maps {
            maps.insert(parse_degree::<D::Error>(&k)?, m);
        }
        ChainMap::new(repr.source, repr.target, maps).map_err(D::Error::custom)
    }
}

/// Basis labels `prefix0, prefix1, ...`.
pub fn numbered_labels(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// Convenience constructor from integer matrices, for tests and examples.
pub fn complex_from_i64(min_deg: i32, dims: &[usize], d: &[Vec<Vec<i64>>]) -> Result<Complex, ComplexError> {
    let labels = dims
        .iter()
        .enumerate()
        .map(|(k, &n)| numbered_labels(&format!("c{}_", min_deg + k as i32), n))
        .collect();
    let ds = d
        .iter()
        .enumerate()
        .map(|(k, rows)| {
            if rows.is_empty() {
                SparseRatMatrix::zeros(dims.get(k + 1).copied().unwrap_or(0), dims[k])
            } else {
                SparseRatMatrix::from_i64_rows(rows)
            }
        })
        .collect();
    Complex::new(min_deg, labels, ds)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_term(v: i64) -> Complex {
        complex_from_i64(0, &[1, 1], &[vec![vec![v]]]).unwrap()
    }

    #[test]
    fn validate_catches_d_squared() {
        assert!(Complex::zero(0, 2).validate().is_ok());
        assert!(two_term(1).validate().is_ok());
        let err = complex_from_i64(0, &[1, 1, 1], &[vec![vec![1]], vec![vec![1]]]).unwrap_err();
        assert!(matches!(err, ComplexError::DSquareNonzero { degree: 0, .. }));
    }

    #[test]
    fn cohomology_of_two_term_complexes() {
        let c = two_term(0);
        assert_eq!((c.cohomology(0).dim, c.cohomology(1).dim), (1, 1));
        let c = two_term(1);
        assert_eq!(c.bettis(), vec![0, 0]);
    }

    #[test]
    fn shift_signs() {
        let c = two_term(1);
        assert_eq!(c.shift(0), c);
        assert_eq!(c.shift(-1).shift(-1), c.shift(-2));
        let s = c.shift(-1);
        assert_eq!(s.min_deg(), 1);
        assert_eq!(s.d(1), SparseRatMatrix::from_i64_rows(&[vec![-1]]));
    }

    #[test]
    fn cone_of_identity_is_acyclic() {
        let c = complex_from_i64(0, &[2, 3, 1], &[vec![vec![1, 0], vec![0, 0], vec![0, 0]], vec![vec![0, 1, 0]]]).unwrap();
        let cone = mapping_cone(&ChainMap::identity(&c));
        cone.complex.validate().unwrap();
        assert!(cone.complex.is_acyclic());
        cone.inclusion.validate().unwrap();
        cone.projection.validate().unwrap();
    }

    #[test]
    fn cone_of_zero_map_splits() {
        let a = two_term(0);
        let b = complex_from_i64(0, &[2], &[]).unwrap();
        let cone = mapping_cone(&ChainMap::zero(&a, &b));
        let expect: Vec<usize> = (-1..=0).map(|q| a.betti(q + 1) + b.betti(q)).collect();
        assert_eq!(cone.complex.bettis(), expect);
    }

    #[test]
    fn quasi_iso_routes_agree() {
        let c = two_term(0);
        let id = ChainMap::identity(&c);
        let rep = id.quasi_iso_report();
        assert!(rep.is_quasi_iso() && rep.routes_agree());
        let z = ChainMap::zero(&c, &c);
        let rep = z.quasi_iso_report();
        assert!(!rep.is_quasi_iso() && rep.routes_agree());
    }

    #[test]
    fn exact_sequences() {
        let q1 = complex_from_i64(0, &[1], &[]).unwrap();
        let q2 = complex_from_i64(0, &[2], &[]).unwrap();
        let mut m = BTreeMap::new();
        m.insert(0, SparseRatMatrix::from_i64_rows(&[vec![1], vec![1]]));
        let f = ChainMap::new(q1.clone(), q2.clone(), m).unwrap();
        let mut m = BTreeMap::new();
        m.insert(0, SparseRatMatrix::from_i64_rows(&[vec![1, -1]]));
        let g = ChainMap::new(q2, q1.clone(), m).unwrap();
        let rep = check_exact_sequence(&[f.clone(), g], true).unwrap();
        assert!(rep.is_exact());
        assert_eq!(rep.nodes.len(), 3);
        let bad = check_exact_sequence(&[f.clone(), f], true);
        assert!(bad.is_err());
        let id = ChainMap::identity(&q1);
        assert!(check_exact_sequence(&[id], true).unwrap().is_exact());
    }

    #[test]
    fn json_roundtrip() {
        let c = complex_from_i64(-1, &[1, 2, 1], &[vec![vec![1], vec![-1]], vec![vec![1, 1]]]).unwrap();
        let s = serde_json::to_string(&c).unwrap();
        let back: Complex = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
        let bad = r#"{"min_deg":0,"max_deg":2,"spaces":{"0":["a"],"1":["b"],"2":["c"]},
            "d":{"0":{"rows":1,"cols":1,"entries":[[0,0,"1"]]},"1":{"rows":1,"cols":1,"entries":[[0,0,"1"]]}}}"#;
        let err = serde_json::from_str::<Complex>(bad).unwrap_err().to_string();
        assert!(err.contains("d^1 . d^0"), "{err}");
    }
}
