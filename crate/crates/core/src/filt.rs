//! Finite decreasing filtrations, graded pieces and spectral sequences.

use std::collections::BTreeMap;
use std::sync::Mutex;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use rayon::prelude::*;
use thiserror::Error;

use crate::complex::{span_labels, ChainMap, Complex, ComplexError, QuasiIsoReport};
use crate::linalg::{self, LinalgError, SparseRatMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FiltError {
    #[error("F^{level} does not exhaust C^{degree}")]
    NotExhaustive { level: i32, degree: i32 },
    #[error("F^{} is not contained in F^{level} in degree {degree}", level + 1)]
    NotDecreasing { level: i32, degree: i32 },
    #[error("d does not preserve F^{level} in degree {degree}")]
    NotStable { level: i32, degree: i32 },
    #[error("filtered map sends F^{level} outside F^{level} in degree {degree}")]
    NotFiltered { level: i32, degree: i32 },
    #[error("levels [{lo}, {hi}] are empty")]
    EmptyLevels { lo: i32, hi: i32 },
    #[error("level {level} is not stored in both filtrations")]
    LevelMismatch { level: i32 },
    #[error("per-basis levels in degree {degree}: expected {expected}, found {found}")]
    LevelCount { degree: i32, expected: usize, found: usize },
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A complex with a finite decreasing filtration `C = F^lo ⊇ ... ⊇ F^hi ⊇ F^{hi+1} = 0`.
///
/// Each `F^i C^q` is stored as a basis matrix. Filtrations given by per-basis
/// levels (`F^i` spanned by the basis vectors of level at least `i`) keep
/// those levels and use faster coordinate arithmetic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FilteredComplex {
    complex: Complex,
    lo: i32,
    spans: Vec<BTreeMap<i32, SparseRatMatrix>>,
    coordinate_levels: Option<BTreeMap<i32, Vec<i32>>>,
}

impl FilteredComplex {
    /// `spans[k][q]` spans `F^{lo+k} C^q`; missing entries are zero. Validated.
    pub fn new(complex: Complex, lo: i32, spans: Vec<BTreeMap<i32, SparseRatMatrix>>) -> Result<Self, FiltError> {
        if spans.is_empty() {
            return Err(FiltError::EmptyLevels { lo, hi: lo - 1 });
        }
        let spans: Vec<BTreeMap<i32, SparseRatMatrix>> = spans
            .into_iter()
            .map(|level| {
                complex
                    .degrees()
                    .map(|q| {
                        let s = level.get(&q).cloned().unwrap_or_else(|| SparseRatMatrix::zeros(complex.dim(q), 0));
                        (q, linalg::image_basis(&s))
                    })
                    .collect()
            })
            .collect();
        let fc = FilteredComplex { complex, lo, spans, coordinate_levels: None };
        fc.validate()?;
        Ok(fc)
    }

    /// `F^i C^q` spanned by the basis vectors `e_k` of degree `q` with `levels[q][k] >= i`.
    pub fn from_levels(complex: Complex, levels: BTreeMap<i32, Vec<i32>>) -> Result<Self, FiltError> {
        for q in complex.degrees() {
            let found = levels.get(&q).map_or(0, Vec::len);
            if found != complex.dim(q) {
                return Err(FiltError::LevelCount { degree: q, expected: complex.dim(q), found });
            }
        }
        let all = levels.values().flatten().copied();
        let (lo, hi) = all.fold((i32::MAX, i32::MIN), |(a, b), l| (a.min(l), b.max(l)));
        let (lo, hi) = if lo > hi { (0, 0) } else { (lo, hi) };
        for q in complex.degrees() {
            let lq = &levels[&q];
            let lt = levels.get(&(q + 1));
            for (i, j, _) in complex.d(q).entries() {
                if lt.map_or(i32::MIN, |l| l[i]) < lq[j] {
                    return Err(FiltError::NotStable { level: lq[j], degree: q });
                }
            }
        }
        let spans = (lo..=hi)
            .map(|level| {
                complex
                    .degrees()
                    .map(|q| {
                        let cols: Vec<usize> = (0..complex.dim(q)).filter(|&k| levels[&q][k] >= level).collect();
                        (q, SparseRatMatrix::identity(complex.dim(q)).select_columns(&cols))
                    })
                    .collect()
            })
            .collect();
        Ok(FilteredComplex { complex, lo, spans, coordinate_levels: Some(levels) })
    }

    /// `F^0 = C`, `F^1 = 0`.
    pub fn trivial(complex: Complex) -> Self {
        let levels = complex.degrees().map(|q| (q, vec![0; complex.dim(q)])).collect();
        Self::from_levels(complex, levels).expect("trivial filtration is valid")
    }

    /// `F^i = C^{>= i}`.
    pub fn stupid(complex: Complex) -> Self {
        let levels = complex.degrees().map(|q| (q, vec![q; complex.dim(q)])).collect();
        Self::from_levels(complex, levels).expect("stupid filtration is valid")
    }

    pub fn complex(&self) -> &Complex {
        &self.complex
    }

    pub fn lo(&self) -> i32 {
        self.lo
    }

    pub fn hi(&self) -> i32 {
        self.lo + self.spans.len() as i32 - 1
    }

    pub fn levels(&self) -> std::ops::RangeInclusive<i32> {
        self.lo..=self.hi()
    }

    pub fn coordinate_levels(&self) -> Option<&BTreeMap<i32, Vec<i32>>> {
        self.coordinate_levels.as_ref()
    }

    /// Basis of `F^i C^q` for any integer `i`.
    pub fn span(&self, i: i32, q: i32) -> SparseRatMatrix {
        let n = self.complex.dim(q);
        if i <= self.lo {
            SparseRatMatrix::identity(n)
        } else if i > self.hi() {
            SparseRatMatrix::zeros(n, 0)
        } else {
            self.spans[(i - self.lo) as usize]
                .get(&q)
                .cloned()
                .unwrap_or_else(|| SparseRatMatrix::zeros(n, 0))
        }
    }

    pub fn span_dim(&self, i: i32, q: i32) -> usize {
        self.span(i, q).cols()
    }

    /// Coordinates `k` of degree `q` with level exactly `i` (coordinate filtrations only).
    fn coordinates_at(&self, i: i32, q: i32) -> Option<Vec<usize>> {
        let levels = self.coordinate_levels.as_ref()?;
        let lq = levels.get(&q)?;
        let lo = self.lo;
        Some((0..lq.len()).filter(|&k| lq[k] == i || (i == lo && lq[k] < lo)).collect())
    }

    pub fn validate(&self) -> Result<(), FiltError> {
        for q in self.complex.degrees() {
            if self.span(self.lo, q).cols() != self.complex.dim(q)
                || self.spans[0].get(&q).map_or(0, |m| m.cols()) != self.complex.dim(q)
            {
                return Err(FiltError::NotExhaustive { level: self.lo, degree: q });
            }
            for i in self.levels() {
                let upper = self.span(i, q);
                let lower = self.span(i + 1, q);
                if !linalg::in_span(&upper, &lower) {
                    return Err(FiltError::NotDecreasing { level: i, degree: q });
                }
                let image = self.complex.d(q).mul(&upper);
                if !linalg::in_span(&self.span(i, q + 1), &image) {
                    return Err(FiltError::NotStable { level: i, degree: q });
                }
            }
        }
        Ok(())
    }

    /// `gr^i = F^i / F^{i+1}` with the induced differential.
    pub fn gr(&self, i: i32) -> Subquotient {
        if self.coordinate_levels.is_some() {
            let coords: BTreeMap<i32, Vec<usize>> =
                self.complex.degrees().map(|q| (q, self.coordinates_at(i, q).unwrap())).collect();
            return Subquotient::coordinate(&self.complex, coords);
        }
        let upper: BTreeMap<i32, SparseRatMatrix> = self.complex.degrees().map(|q| (q, self.span(i, q))).collect();
        let lower: BTreeMap<i32, SparseRatMatrix> =
            self.complex.degrees().map(|q| (q, self.span(i + 1, q))).collect();
        Subquotient::new(&self.complex, &upper, &lower).expect("filtration was validated")
    }

    pub fn spectral_sequence(&self) -> SpectralSequence {
        SpectralSequence::compute(self)
    }

    /// Single page `E_r`.
    pub fn spectral_page(&self, r: usize) -> SpectralPage {
        let ss = SpectralSequence::compute_until(self, r);
        ss.pages.into_iter().last().expect("at least one page")
    }

    /// Whether every `d_s` with `s >= r0` vanishes.
    pub fn check_degeneration(&self, r0: usize) -> DegenerationVerdict {
        let ss = self.spectral_sequence();
        let nonzero: Vec<(usize, i32, i32)> = ss
            .pages
            .iter()
            .filter(|p| p.r >= r0)
            .flat_map(|p| {
                p.differentials
                    .iter()
                    .filter(|(_, m)| !m.is_zero())
                    .map(move |(&(a, b), _)| (p.r, a, b))
            })
            .collect();
        DegenerationVerdict { r0, degenerates: nonzero.is_empty(), nonzero_differentials: nonzero }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegenerationVerdict {
    pub r0: usize,
    pub degenerates: bool,
    /// `(r, p, q)` of each nonzero `d_r` leaving `E_r^{p,q}`.
    pub nonzero_differentials: Vec<(usize, i32, i32)>,
}

/// A subquotient complex `U / W` of a complex, with representatives in the ambient complex.
#[derive(Clone, Debug)]
pub struct Subquotient {
    pub complex: Complex,
    /// Columns in `C^q` whose classes form the basis of `(U/W)^q`.
    pub reps: BTreeMap<i32, SparseRatMatrix>,
    lower: BTreeMap<i32, SparseRatMatrix>,
    coords: Option<BTreeMap<i32, Vec<usize>>>,
}

impl Subquotient {
    /// Generic subquotient of `d`-stable spans `lower ⊆ upper`.
    pub fn new(
        c: &Complex,
        upper: &BTreeMap<i32, SparseRatMatrix>,
        lower: &BTreeMap<i32, SparseRatMatrix>,
    ) -> Result<Self, FiltError> {
        let get = |m: &BTreeMap<i32, SparseRatMatrix>, q: i32| {
            m.get(&q).cloned().unwrap_or_else(|| SparseRatMatrix::zeros(c.dim(q), 0))
        };
        let mut reps = BTreeMap::new();
        let mut lows = BTreeMap::new();
        for q in c.degrees() {
            let low = linalg::image_basis(&get(lower, q));
            let quot = linalg::quotient_dims(&low, &get(upper, q))?;
            reps.insert(q, quot.complement);
            lows.insert(q, low);
        }
        let mut sq = Subquotient { complex: Complex::zero(c.min_deg(), c.max_deg()), reps, lower: lows, coords: None };
        let mut labels = Vec::new();
        let mut d = Vec::new();
        for q in c.degrees() {
            labels.push(span_labels(c.labels(q), &sq.reps[&q], q));
            if q == c.max_deg() {
                d.push(SparseRatMatrix::zeros(0, sq.reps[&q].cols()));
                continue;
            }
            let image = c.d(q).mul(&sq.reps[&q]);
            d.push(sq.coordinates(q + 1, &image).ok_or(FiltError::NotStable { level: 0, degree: q })?);
        }
        sq.complex = Complex::new(c.min_deg(), labels, d)?;
        Ok(sq)
    }

    /// Subquotient whose representatives are the given coordinate vectors and
    /// whose lower span is spanned by coordinates of higher level.
    pub(crate) fn coordinate(c: &Complex, coords: BTreeMap<i32, Vec<usize>>) -> Self {
        let mut labels = Vec::new();
        let mut d = Vec::new();
        let mut reps = BTreeMap::new();
        for q in c.degrees() {
            let cq = &coords[&q];
            labels.push(cq.iter().map(|&k| c.labels(q)[k].clone()).collect());
            let empty = Vec::new();
            let ct = coords.get(&(q + 1)).unwrap_or(&empty);
            d.push(c.d(q).submatrix(ct, cq));
            reps.insert(q, SparseRatMatrix::identity(c.dim(q)).select_columns(cq));
        }
        let complex = Complex::new_unchecked(c.min_deg(), labels, d).expect("submatrix shapes agree");
        Subquotient { complex, reps, lower: BTreeMap::new(), coords: Some(coords) }
    }

    /// Coordinates of vectors of `U^q` in the basis of `(U/W)^q`; `None` if some vector is outside `U`.
    pub fn coordinates(&self, q: i32, vectors: &SparseRatMatrix) -> Option<SparseRatMatrix> {
        let reps = self.reps.get(&q)?;
        if let Some(coords) = &self.coords {
            let empty = Vec::new();
            return Some(vectors.select_rows(coords.get(&q).unwrap_or(&empty)));
        }
        let low = &self.lower[&q];
        let x = linalg::solve(&SparseRatMatrix::hstack(&[low, reps]), vectors)?;
        let rows: Vec<usize> = (low.cols()..low.cols() + reps.cols()).collect();
        Some(x.select_rows(&rows))
    }
}

/// A chain map respecting filtrations.
#[derive(Clone, Debug)]
pub struct FilteredChainMap {
    pub map: ChainMap,
    pub source: FilteredComplex,
    pub target: FilteredComplex,
}

impl FilteredChainMap {
    pub fn new(map: ChainMap, source: FilteredComplex, target: FilteredComplex) -> Result<Self, FiltError> {
        let lo = source.lo().min(target.lo());
        let hi = source.hi().max(target.hi()) + 1;
        for i in lo..=hi {
            for q in map.degrees() {
                let image = map.map(q).mul(&source.span(i, q));
                if image.is_zero() {
                    continue;
                }
                if !linalg::in_span(&target.span(i, q), &image) {
                    return Err(FiltError::NotFiltered { level: i, degree: q });
                }
            }
        }
        Ok(FilteredChainMap { map, source, target })
    }

    pub fn identity(fc: &FilteredComplex) -> Self {
        FilteredChainMap { map: ChainMap::identity(fc.complex()), source: fc.clone(), target: fc.clone() }
    }

    /// The map `gr^i(source) -> gr^i(target)`.
    pub fn induced_gr_map(&self, i: i32) -> ChainMap {
        let s = self.source.gr(i);
        let t = self.target.gr(i);
        let mut maps = BTreeMap::new();
        for q in s.complex.degrees() {
            if s.complex.dim(q) == 0 || t.complex.dim(q) == 0 {
                continue;
            }
            let image = self.map.map(q).mul(&s.reps[&q]);
            let m = t.coordinates(q, &image).expect("filtered map sends F^i into F^i");
            maps.insert(q, m);
        }
        ChainMap::new_unchecked(s.complex, t.complex, maps).expect("shapes agree")
    }

    /// Quasi-isomorphism verdicts of the induced maps on `gr^i` for each `i` in `levels`.
    pub fn is_filtered_quasi_iso(&self, levels: impl IntoIterator<Item = i32>) -> Vec<(i32, QuasiIsoReport)> {
        levels.into_iter().map(|i| (i, self.induced_gr_map(i).quasi_iso_report())).collect()
    }
}

/// One page `E_r` of the spectral sequence of a filtered complex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectralPage {
    pub r: usize,
    /// `(p, q) -> dim E_r^{p,q}` over all stored spots, zeros included.
    pub entries: BTreeMap<(i32, i32), usize>,
    /// `d_r: E_r^{p,q} -> E_r^{p+r, q-r+1}`, keyed by source spot, when both ends are nonzero.
    pub differentials: BTreeMap<(i32, i32), SparseRatMatrix>,
}

impl SpectralPage {
    pub fn dim(&self, p: i32, q: i32) -> usize {
        self.entries.get(&(p, q)).copied().unwrap_or(0)
    }

    /// `sum_p dim E^{p, n-p}`.
    pub fn total(&self, n: i32) -> usize {
        self.entries.iter().filter(|((p, q), _)| p + q == n).map(|(_, d)| d).sum()
    }

    fn differential_rank(&self, p: i32, q: i32) -> usize {
        self.differentials.get(&(p, q)).map_or(0, linalg::rank)
    }
}

impl Serialize for SpectralPage {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            r: usize,
            entries: Vec<(i32, i32, usize)>,
        }
        Repr { r: self.r, entries: self.entries.iter().map(|(&(p, q), &d)| (p, q, d)).collect() }.serialize(serializer)
    }
}

/// All pages `E_0 .. E_{r_max}` with `r_max = (number of levels) + 1`.
#[derive(Clone, Debug)]
pub struct SpectralSequence {
    pub pages: Vec<SpectralPage>,
}

struct SpotData {
    reps: SparseRatMatrix,
    denominator: SparseRatMatrix,
}

struct Engine<'a> {
    fc: &'a FilteredComplex,
    annihilators: Mutex<BTreeMap<(i32, i32), SparseRatMatrix>>,
    /// `Z_r^p` by `(r, p, n)`; page `r` reuses the spaces built for page `r - 1`.
    zs: Mutex<BTreeMap<(i64, i32, i32), SparseRatMatrix>>,
}

fn cached<K: Ord + Copy, F: FnOnce() -> SparseRatMatrix>(
    cache: &Mutex<BTreeMap<K, SparseRatMatrix>>,
    key: K,
    make: F,
) -> SparseRatMatrix {
    if let Some(v) = cache.lock().expect("cache lock").get(&key) {
        return v.clone();
    }
    let v = make();
    cache.lock().expect("cache lock").insert(key, v.clone());
    v
}

impl<'a> Engine<'a> {
    fn new(fc: &'a FilteredComplex) -> Self {
        Engine { fc, annihilators: Mutex::default(), zs: Mutex::default() }
    }

    fn annihilator(&self, i: i32, q: i32) -> SparseRatMatrix {
        cached(&self.annihilators, (i, q), || {
            let n = self.fc.complex().dim(q);
            match self.fc.coordinate_levels() {
                Some(levels) => {
                    let rows: Vec<usize> = (0..n).filter(|&k| levels[&q][k] < i).collect();
                    SparseRatMatrix::identity(n).select_rows(&rows)
                }
                None => linalg::annihilator(&self.fc.span(i, q)),
            }
        })
    }

    /// `Z_r^p` in degree `n`: elements of `F^p` whose differential lies in `F^{p+r}`.
    fn z(&self, r: i64, p: i32, n: i32) -> SparseRatMatrix {
        cached(&self.zs, (r, p, n), || {
            let fp = self.fc.span(p, n);
            if r < 0 || fp.cols() == 0 {
                return fp;
            }
            let target = p.saturating_add(r as i32);
            let a = self.annihilator(target, n + 1);
            if a.rows() == 0 {
                return fp;
            }
            let cond = a.mul(&self.fc.complex().d(n)).mul(&fp);
            fp.mul(&linalg::kernel_basis(&cond))
        })
    }

    fn spot(&self, r: usize, p: i32, n: i32) -> SpotData {
        let r = r as i64;
        let z = self.z(r, p, n);
        let z_up = self.z(r - 1, p + 1, n);
        let z_back = self.z(r - 1, p - r as i32 + 1, n - 1);
        let boundary = self.fc.complex().d(n - 1).mul(&z_back);
        let denominator = linalg::subspace_sum(&[&z_up, &boundary]);
        let quot = linalg::quotient_dims(&denominator, &z).expect("spectral subquotient containment");
        SpotData { reps: quot.complement, denominator }
    }
}

impl SpectralSequence {
    pub fn compute(fc: &FilteredComplex) -> Self {
        let r_max = fc.spans.len() + 1;
        Self::compute_until(fc, r_max)
    }

    pub fn compute_until(fc: &FilteredComplex, r_last: usize) -> Self {
        let engine = Engine::new(fc);
        let c = fc.complex();
        let cells: Vec<(i32, i32)> = fc.levels().flat_map(|p| c.degrees().map(move |n| (p, n))).collect();
        let bettis: Vec<(i32, usize)> = c.degrees().map(|n| (n, c.betti(n))).collect();
        let mut pages: Vec<SpectralPage> = Vec::new();
        for r in 0..=r_last {
            // Once every total dimension matches cohomology no later d_r can be nonzero.
            if let Some(last) = pages.last().filter(|pg| bettis.iter().all(|&(n, b)| pg.total(n) == b)) {
                let settled = SpectralPage { r, entries: last.entries.clone(), differentials: BTreeMap::new() };
                pages.push(settled);
                continue;
            }
            let spots: BTreeMap<(i32, i32), SpotData> =
                cells.par_iter().map(|&(p, n)| ((p, n), engine.spot(r, p, n))).collect();
            let entries = spots.iter().map(|(&(p, n), data)| ((p, n - p), data.reps.cols())).collect();
            let differentials = spots
                .par_iter()
                .filter_map(|(&(p, n), data)| {
                    let tdata = spots.get(&(p + r as i32, n + 1))?;
                    if data.reps.cols() == 0 || tdata.reps.cols() == 0 {
                        return None;
                    }
                    let image = c.d(n).mul(&data.reps);
                    let x = linalg::solve(&SparseRatMatrix::hstack(&[&tdata.denominator, &tdata.reps]), &image)
                        .expect("d_r lands in Z_r");
                    let rows: Vec<usize> =
                        (tdata.denominator.cols()..tdata.denominator.cols() + tdata.reps.cols()).collect();
                    Some(((p, n - p), x.select_rows(&rows)))
                })
                .collect();
            pages.push(SpectralPage { r, entries, differentials });
            engine.zs.lock().expect("cache lock").retain(|&(zr, _, _), _| zr >= r as i64);
        }
        SpectralSequence { pages }
    }

    pub fn page(&self, r: usize) -> Option<&SpectralPage> {
        self.pages.get(r)
    }

    pub fn infinity(&self) -> &SpectralPage {
        self.pages.last().expect("at least one page")
    }

    /// Spots where `E_{r+1}` differs from the cohomology of `(E_r, d_r)`, or where `d_r d_r != 0`.
    pub fn consistency_failures(&self) -> Vec<(usize, i32, i32)> {
        let mut bad = Vec::new();
        for w in self.pages.windows(2) {
            let (cur, next) = (&w[0], &w[1]);
            let r = cur.r as i32;
            for (&(p, q), &dim) in &cur.entries {
                let out = cur.differential_rank(p, q);
                let inc = cur.differential_rank(p - r, q + r - 1);
                if dim - out - inc != next.dim(p, q) {
                    bad.push((cur.r, p, q));
                }
                if let (Some(a), Some(b)) =
                    (cur.differentials.get(&(p, q)), cur.differentials.get(&(p + r, q - r + 1)))
                {
                    if !b.mul(a).is_zero() {
                        bad.push((cur.r, p, q));
                    }
                }
            }
        }
        bad
    }

    /// Per total degree `n`: `(sum_p dim E_inf^{p,n-p}, dim H^n)`.
    pub fn convergence(&self, c: &Complex) -> Vec<(i32, usize, usize)> {
        let inf = self.infinity();
        c.degrees().map(|n| (n, inf.total(n), c.betti(n))).collect()
    }
}

#[derive(Serialize, Deserialize)]
struct FilteredRepr {
    complex: Complex,
    levels: Vec<i32>,
    #[serde(rename = "F")]
    f: BTreeMap<String, BTreeMap<String, SparseRatMatrix>>,
}

impl Serialize for FilteredComplex {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let f = self
            .levels()
            .map(|i| {
                let per: BTreeMap<String, SparseRatMatrix> =
                    self.complex.degrees().map(|q| (q.to_string(), self.span(i, q))).collect();
                (i.to_string(), per)
            })
            .collect();
        FilteredRepr { complex: self.complex.clone(), levels: self.levels().collect(), f }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FilteredComplex {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = FilteredRepr::deserialize(deserializer)?;
        let (Some(&lo), Some(&hi)) = (repr.levels.first(), repr.levels.last()) else {
            return Err(D::Error::custom("filtration needs at least one level"));
        };
        if repr.levels.iter().copied().ne(lo..=hi) {
            return Err(D::Error::custom("filtration levels must be consecutive integers"));
        }
        let mut spans = Vec::new();
        for i in lo..=hi {
            let per = repr.f.get(&i.to_string()).cloned().unwrap_or_default();
            let mut m = BTreeMap::new();
            for (k, v) in per {
                let q: i32 = k.parse().map_err(|_| D::Error::custom(format!("bad degree key {k:?}")))?;
                m.insert(q, v);
            }
            spans.push(m);
        }
        FilteredComplex::new(repr.complex, lo, spans).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::complex_from_i64;

    fn sample() -> Complex {
        complex_from_i64(0, &[2, 3, 1], &[vec![vec![1, 0], vec![0, 0], vec![0, 1]], vec![vec![0, 1, 0]]]).unwrap()
    }

    #[test]
    fn trivial_filtration_gr_is_complex() {
        let c = sample();
        let fc = FilteredComplex::trivial(c.clone());
        assert_eq!(fc.gr(0).complex, c);
        let ss = fc.spectral_sequence();
        let e1 = ss.page(1).unwrap();
        for q in c.degrees() {
            assert_eq!(e1.dim(0, q), c.betti(q));
        }
        assert!(ss.consistency_failures().is_empty());
    }

    #[test]
    fn stupid_filtration_gr_has_zero_differential() {
        let fc = FilteredComplex::stupid(sample());
        for i in 0..=2 {
            let g = fc.gr(i).complex;
            assert_eq!(g.total_dim(), fc.complex().dim(i));
            assert!(g.degrees().all(|q| g.d(q).is_zero()));
        }
        let ss = fc.spectral_sequence();
        for (n, e, h) in ss.convergence(fc.complex()) {
            assert_eq!(e, h, "degree {n}");
        }
        assert!(!fc.check_degeneration(1).degenerates);
    }

    #[test]
    fn general_spans_match_coordinate_levels() {
        let c = sample();
        let coord = FilteredComplex::stupid(c.clone());
        let spans: Vec<BTreeMap<i32, SparseRatMatrix>> =
            (0..=2).map(|i| c.degrees().map(|q| (q, coord.span(i, q))).collect()).collect();
        let general = FilteredComplex::new(c, 0, spans).unwrap();
        let a = coord.spectral_sequence();
        let b = general.spectral_sequence();
        for (pa, pb) in a.pages.iter().zip(&b.pages) {
            assert_eq!(pa.entries, pb.entries);
        }
        assert_eq!(coord.gr(1).complex.dims(), general.gr(1).complex.dims());
    }

    #[test]
    fn unstable_filtration_rejected() {
        let c = sample();
        let levels = BTreeMap::from([(0, vec![1, 0]), (1, vec![0, 0, 0]), (2, vec![0])]);
        assert!(matches!(FilteredComplex::from_levels(c, levels), Err(FiltError::NotStable { .. })));
    }

    #[test]
    fn identity_is_filtered_quasi_iso() {
        let fc = FilteredComplex::stupid(sample());
        let id = FilteredChainMap::identity(&fc);
        assert!(id.is_filtered_quasi_iso(fc.levels()).iter().all(|(_, r)| r.is_quasi_iso()));
        let g = id.induced_gr_map(1);
        assert!(g.maps().values().all(|m| m.is_identity()));
    }

    #[test]
    fn json_roundtrip() {
        let fc = FilteredComplex::stupid(sample());
        let s = serde_json::to_string(&fc).unwrap();
        let back: FilteredComplex = serde_json::from_str(&s).unwrap();
        assert_eq!(back.levels(), fc.levels());
        for i in fc.levels() {
            for q in fc.complex().degrees() {
                assert_eq!(back.span(i, q), fc.span(i, q));
            }
        }
    }
}
