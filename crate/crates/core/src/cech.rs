//! Component diagrams, Čech double complexes and their totalizations.

use std::collections::BTreeMap;

use itertools::Itertools;
use rayon::prelude::*;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::complex::{check_exact_sequence, ChainMap, Complex, ComplexError, ExactnessReport, QuasiIsoReport};
use crate::filt::{FiltError, FilteredChainMap, FilteredComplex};
use crate::hirsch::{
    check_compatible, first_map_difference, kron_identity, HirschDatum, HirschError, Mismatch, TruncatedHirschExtension,
};
use crate::linalg::{Rat, SparseRatMatrix};

#[derive(Debug, Error)]
pub enum CechError {
    #[error("missing payload for {0}")]
    MissingPayload(String),
    #[error("missing restriction {0}")]
    MissingRestriction(String),
    #[error("restrictions into {lambda} disagree in degree {degree}")]
    SquareMismatch { lambda: String, degree: i32 },
    #[error("payloads carry different numbers of operators")]
    NotHomogeneous,
    #[error("horizontal maps compose to nonzero at column {column}, degree {degree}")]
    RhoSquare { column: usize, degree: i32 },
    #[error("{0}")]
    Layout(String),
    #[error("invalid label {0:?}")]
    BadLabel(String),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Hirsch(#[from] HirschError),
    #[error(transparent)]
    Filt(#[from] FiltError),
}

/// Payloads on the nonempty subsets `λ` of a totally ordered label set, with
/// restriction maps `P(λ_j) -> P(λ)` for each face `λ_j = λ \ {λ_j}`.
///
/// The empty subset carries the optional global object. Plain vector spaces are
/// payloads concentrated in degree 0 with no operators.
#[derive(Clone, Debug)]
pub struct ComponentDiagram {
    labels: Vec<String>,
    m_max: usize,
    global: Option<HirschDatum>,
    payloads: BTreeMap<Vec<usize>, HirschDatum>,
    restrictions: BTreeMap<(Vec<usize>, Vec<usize>), ChainMap>,
}

fn faces(lambda: &[usize]) -> impl Iterator<Item = (usize, Vec<usize>)> + '_ {
    (0..lambda.len()).map(move |j| {
        let mut mu = lambda.to_vec();
        mu.remove(j);
        (j, mu)
    })
}

impl ComponentDiagram {
    pub fn new(
        labels: Vec<String>,
        m_max: usize,
        global: Option<HirschDatum>,
        payloads: BTreeMap<Vec<usize>, HirschDatum>,
        restrictions: BTreeMap<(Vec<usize>, Vec<usize>), ChainMap>,
    ) -> Result<Self, CechError> {
        for l in &labels {
            if l.is_empty() || l.contains([',', '<']) {
                return Err(CechError::BadLabel(l.clone()));
            }
        }
        let d = ComponentDiagram { labels, m_max, global, payloads, restrictions };
        d.validate()?;
        Ok(d)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn m_max(&self) -> usize {
        self.m_max
    }

    pub fn global(&self) -> Option<&HirschDatum> {
        self.global.as_ref()
    }

    pub fn name(&self, lambda: &[usize]) -> String {
        lambda.iter().map(|&i| self.labels[i].as_str()).join(",")
    }

    /// Subsets of size `m + 1`, lexicographic in sorted index tuples.
    pub fn level(&self, m: usize) -> Vec<Vec<usize>> {
        (0..self.labels.len()).combinations(m + 1).collect()
    }

    pub fn payload(&self, lambda: &[usize]) -> Option<&HirschDatum> {
        if lambda.is_empty() {
            self.global.as_ref()
        } else {
            self.payloads.get(lambda)
        }
    }

    pub fn restriction(&self, mu: &[usize], lambda: &[usize]) -> Option<&ChainMap> {
        self.restrictions.get(&(mu.to_vec(), lambda.to_vec()))
    }

    pub fn payloads(&self) -> impl Iterator<Item = (&Vec<usize>, &HirschDatum)> {
        self.payloads.iter()
    }

    /// Replaces one restriction map, without validation.
    pub fn with_restriction_unchecked(mut self, mu: Vec<usize>, lambda: Vec<usize>, map: ChainMap) -> Self {
        self.restrictions.insert((mu, lambda), map);
        self
    }

    /// All payloads and restrictions present, restrictions are chain maps, and
    /// the two composites `P(λ_jk) -> P(λ)` agree.
    pub fn validate(&self) -> Result<(), CechError> {
        let r = self.payloads.values().next().map(HirschDatum::r);
        for m in 0..=self.m_max {
            for lambda in self.level(m) {
                let p = self.payload(&lambda).ok_or_else(|| CechError::MissingPayload(self.name(&lambda)))?;
                if Some(p.r()) != r {
                    return Err(CechError::NotHomogeneous);
                }
                for (_, mu) in faces(&lambda) {
                    if mu.is_empty() && self.global.is_none() {
                        continue;
                    }
                    let f = self
                        .restriction(&mu, &lambda)
                        .ok_or_else(|| CechError::MissingRestriction(format!("{}<-{}", self.name(&lambda), self.name(&mu))))?;
                    f.validate()?;
                }
                if lambda.len() < 2 || (lambda.len() == 2 && self.global.is_none()) {
                    continue;
                }
                for (j, k) in (0..lambda.len()).tuple_combinations() {
                    let mut a = lambda.clone();
                    a.remove(j);
                    let mut b = lambda.clone();
                    b.remove(k);
                    let mut ab = a.clone();
                    ab.remove(k - 1);
                    let left = self.restriction(&a, &lambda).unwrap().compose(self.restriction(&ab, &a).unwrap())?;
                    let right = self.restriction(&b, &lambda).unwrap().compose(self.restriction(&ab, &b).unwrap())?;
                    if let Some(mm) = first_map_difference(&left, &right) {
                        return Err(CechError::SquareMismatch { lambda: self.name(&lambda), degree: mm.degree });
                    }
                }
            }
        }
        if let Some(g) = &self.global {
            if Some(g.r()) != r {
                return Err(CechError::NotHomogeneous);
            }
        }
        Ok(())
    }

    /// `⊕_{|λ| = m+1} P(λ)` in level order.
    pub fn level_complex(&self, m: usize) -> Complex {
        let subsets = self.level(m);
        let parts: Vec<&Complex> = subsets.iter().map(|l| self.payload(l).unwrap().complex()).collect();
        let names: Vec<String> = subsets.iter().map(|l| self.name(l)).collect();
        sum_complex(&parts, &names)
    }

    /// `ρ^m = sum_j (-1)^j ι_{λ_j -> λ}` from level `m` to level `m + 1`.
    pub fn rho(&self, m: usize) -> ChainMap {
        let src = self.level(m);
        let tgt = self.level(m + 1);
        let source = self.level_complex(m);
        let target = self.level_complex(m + 1);
        let maps = self.block_map(&source, &target, &src, &tgt, |lambda, mu| {
            let j = faces(lambda).find(|(_, f)| f == mu).map(|(j, _)| j)?;
            let f = self.restriction(mu, lambda)?;
            Some((if j % 2 == 0 { Rat::one() } else { -Rat::one() }, f))
        });
        ChainMap::new_unchecked(source, target, maps).expect("block shapes agree")
    }

    /// Global object to level 0: the product of the restrictions.
    pub fn augmentation(&self) -> Option<ChainMap> {
        let g = self.global.as_ref()?;
        let target = self.level_complex(0);
        let empty: Vec<Vec<usize>> = vec![Vec::new()];
        let maps = self.block_map(g.complex(), &target, &empty, &self.level(0), |lambda, mu| {
            Some((Rat::one(), self.restriction(mu, lambda)?))
        });
        Some(ChainMap::new_unchecked(g.complex().clone(), target, maps).expect("block shapes agree"))
    }

    fn block_map<'a>(
        &'a self,
        source: &Complex,
        target: &Complex,
        src: &[Vec<usize>],
        tgt: &[Vec<usize>],
        block: impl Fn(&[usize], &[usize]) -> Option<(Rat, &'a ChainMap)>,
    ) -> BTreeMap<i32, SparseRatMatrix> {
        let lo = source.min_deg().min(target.min_deg());
        let hi = source.max_deg().max(target.max_deg());
        (lo..=hi)
            .map(|q| {
                let dim = |l: &[usize]| self.payload(l).map_or(0, |p| p.complex().dim(q));
                let offsets = |ls: &[Vec<usize>]| -> Vec<usize> {
                    ls.iter().scan(0, |acc, l| { let o = *acc; *acc += dim(l); Some(o) }).collect()
                };
                let (so, to) = (offsets(src), offsets(tgt));
                let mut trip = Vec::new();
                for (b, lambda) in tgt.iter().enumerate() {
                    for (a, mu) in src.iter().enumerate() {
                        if !mu.iter().all(|x| lambda.contains(x)) || mu.len() + 1 != lambda.len() {
                            continue;
                        }
                        if let Some((sign, f)) = block(lambda, mu) {
                            for (i, k, v) in f.map(q).entries() {
                                trip.push((to[b] + i, so[a] + k, &sign * v));
                            }
                        }
                    }
                }
                (q, SparseRatMatrix::from_triplets(target.dim(q), source.dim(q), trip).expect("indices in range"))
            })
            .collect()
    }

    /// The Čech double complex of the payload complexes.
    pub fn double_complex(&self) -> Result<DoubleComplex, CechError> {
        let columns = (0..=self.m_max).map(|m| self.level_complex(m)).collect();
        let rho = (0..self.m_max).map(|m| self.rho(m)).collect();
        DoubleComplex::new(columns, rho)
    }

    /// The same diagram with every payload replaced by its quotient by all operators.
    pub fn relative(&self) -> Result<ComponentDiagram, CechError> {
        let quotient = |h: &HirschDatum| h.quotient_complex(&(0..h.r()).collect::<Vec<_>>());
        let mut quots = BTreeMap::new();
        if let Some(g) = &self.global {
            quots.insert(Vec::new(), quotient(g)?);
        }
        for (l, p) in &self.payloads {
            quots.insert(l.clone(), quotient(p)?);
        }
        let mut restrictions = BTreeMap::new();
        for ((mu, lambda), f) in &self.restrictions {
            let (Some(qs), Some(qt)) = (quots.get(mu), quots.get(lambda)) else { continue };
            let maps = f
                .degrees()
                .map(|q| {
                    let lift = SparseRatMatrix::identity(f.source().dim(q)).select_columns(&qs.kept[&q]);
                    (q, qt.projection.map(q).mul(&f.map(q)).mul(&lift))
                })
                .collect();
            restrictions.insert((mu.clone(), lambda.clone()), ChainMap::new(qs.complex().clone(), qt.complex().clone(), maps)?);
        }
        let strip = |q: &crate::hirsch::HirschQuotient| HirschDatum::new(q.complex().clone(), Vec::new());
        let global = quots.get(&Vec::new()).map(strip).transpose()?;
        let payloads = quots.iter().filter(|(l, _)| !l.is_empty()).map(|(l, q)| Ok((l.clone(), strip(q)?))).collect::<Result<_, HirschError>>()?;
        ComponentDiagram::new(self.labels.clone(), self.m_max, global, payloads, restrictions)
    }
}

fn sum_complex(parts: &[&Complex], names: &[String]) -> Complex {
    let lo = parts.iter().map(|c| c.min_deg()).min().unwrap_or(0);
    let hi = parts.iter().map(|c| c.max_deg()).max().unwrap_or(0);
    let mut labels = Vec::new();
    let mut d = Vec::new();
    for q in lo..=hi {
        labels.push(parts.iter().zip(names).flat_map(|(c, n)| c.prefixed_labels(q, &format!("[{n}]"))).collect());
        let blocks: Vec<SparseRatMatrix> = parts.iter().map(|c| c.d(q)).collect();
        let refs: Vec<&SparseRatMatrix> = blocks.iter().collect();
        d.push(SparseRatMatrix::block_diag(&refs));
    }
    Complex::new_unchecked(lo, labels, d).expect("block shapes agree")
}

/// Columns `K_0, ..., K_M` with horizontal chain maps `ρ^m: K_m -> K_{m+1}`.
#[derive(Clone, Debug)]
pub struct DoubleComplex {
    pub columns: Vec<Complex>,
    pub rho: Vec<ChainMap>,
}

impl DoubleComplex {
    pub fn new(columns: Vec<Complex>, rho: Vec<ChainMap>) -> Result<Self, CechError> {
        assert_eq!(rho.len() + 1, columns.len().max(1), "one horizontal map between consecutive columns");
        for f in &rho {
            f.validate()?;
        }
        for (m, pair) in rho.windows(2).enumerate() {
            for q in pair[0].degrees() {
                if !pair[1].map(q).mul(&pair[0].map(q)).is_zero() {
                    return Err(CechError::RhoSquare { column: m, degree: q });
                }
            }
        }
        Ok(DoubleComplex { columns, rho })
    }

    fn range(&self) -> (i32, i32) {
        let lo = self.columns.iter().map(Complex::min_deg).min().unwrap_or(0);
        let hi = self.columns.iter().enumerate().map(|(m, c)| c.max_deg() + m as i32).max().unwrap_or(0);
        (lo, hi)
    }

    /// Offset of column `m`, vertical degree `n - m`, inside total degree `n`.
    pub fn offset(&self, n: i32, m: usize) -> usize {
        (0..m).map(|k| self.columns[k].dim(n - k as i32)).sum()
    }

    /// `Tot^n = ⊕_{m+q=n} K_m^q` ordered by `m`, with `d = ρ + (-1)^m d_K`.
    pub fn totalize(&self) -> Complex {
        let (lo, hi) = self.range();
        let mut labels = Vec::new();
        let mut ds = Vec::new();
        for n in lo..=hi {
            labels.push(
                self.columns
                    .iter()
                    .enumerate()
                    .flat_map(|(m, c)| c.prefixed_labels(n - m as i32, &format!("{m}|")))
                    .collect(),
            );
            let rows = self.total_dim(n + 1);
            let cols = self.total_dim(n);
            let mut trip = Vec::new();
            for (m, c) in self.columns.iter().enumerate() {
                let q = n - m as i32;
                let (s0, t0) = (self.offset(n, m), self.offset(n + 1, m));
                let sign = if m % 2 == 0 { Rat::one() } else { -Rat::one() };
                for (i, k, v) in c.d(q).entries() {
                    trip.push((t0 + i, s0 + k, &sign * v));
                }
                if let Some(f) = self.rho.get(m) {
                    let t1 = self.offset(n + 1, m + 1);
                    for (i, k, v) in f.map(q).entries() {
                        trip.push((t1 + i, s0 + k, v.clone()));
                    }
                }
            }
            ds.push(SparseRatMatrix::from_triplets(rows, cols, trip).expect("indices in range"));
        }
        Complex::new_unchecked(lo, labels, ds).expect("block shapes agree")
    }

    pub fn total_dim(&self, n: i32) -> usize {
        self.columns.iter().enumerate().map(|(m, c)| c.dim(n - m as i32)).sum()
    }

    /// Per-basis levels on the totalization from per-column levels indexed by vertical degree.
    pub fn total_levels(&self, column_levels: &[BTreeMap<i32, Vec<i32>>]) -> BTreeMap<i32, Vec<i32>> {
        let (lo, hi) = self.range();
        (lo..=hi)
            .map(|n| {
                let v = column_levels
                    .iter()
                    .enumerate()
                    .flat_map(|(m, l)| l.get(&(n - m as i32)).cloned().unwrap_or_default())
                    .collect();
                (n, v)
            })
            .collect()
    }

    /// Total map of columnwise chain maps `K_m -> K'_m` commuting with `ρ`.
    pub fn total_map(&self, target: &DoubleComplex, maps: &[ChainMap]) -> Result<ChainMap, CechError> {
        let (lo, hi) = self.range();
        let tot = self.totalize();
        let ttot = target.totalize();
        let mats = (lo.min(ttot.min_deg())..=hi.max(ttot.max_deg()))
            .map(|n| {
                let mut trip = Vec::new();
                for (m, f) in maps.iter().enumerate() {
                    let q = n - m as i32;
                    let (s0, t0) = (self.offset(n, m), target.offset(n, m));
                    for (i, k, v) in f.map(q).entries() {
                        trip.push((t0 + i, s0 + k, v.clone()));
                    }
                }
                (n, SparseRatMatrix::from_triplets(ttot.dim(n), tot.dim(n), trip).expect("indices in range"))
            })
            .collect();
        Ok(ChainMap::new(tot, ttot, mats)?)
    }

    /// `X -> K_0 ⊂ Tot` for a chain map `X -> K_0` killed by `ρ^0`.
    pub fn column_zero_map(&self, f: &ChainMap) -> Result<ChainMap, CechError> {
        let tot = self.totalize();
        let mats = f
            .source()
            .degrees()
            .chain(tot.degrees())
            .map(|n| {
                let m = f.map(n);
                (n, m.embed(tot.dim(n), m.cols(), 0, 0))
            })
            .collect();
        Ok(ChainMap::new(f.source().clone(), tot, mats)?)
    }
}

/// Exactness of `0 -> global -> level 0 -> level 1 -> ... -> level m_max -> 0` in every degree.
pub fn resolution_check(diagram: &ComponentDiagram) -> Result<ExactnessReport, CechError> {
    let aug = diagram.augmentation().ok_or_else(|| CechError::MissingPayload("global".into()))?;
    let mut maps = vec![aug];
    maps.extend((0..diagram.m_max()).map(|m| diagram.rho(m)));
    Ok(check_exact_sequence(&maps, true)?)
}

/// The Čech totalization of truncated Hirsch extensions, its filtration, and
/// the maps comparing it with the global and relative objects.
#[derive(Clone, Debug)]
pub struct HComplex {
    pub bound: usize,
    /// `s(HE_N(P(λ)))` with `F^i` spanned by `u^[e] ⊗ ω` with `|e| + deg ω >= i`.
    pub total: FilteredComplex,
    /// Truncated extension of the global datum with its Hodge filtration.
    pub global: FilteredComplex,
    /// `s(P(λ) / im L)` with the stupid filtration.
    pub relative_total: FilteredComplex,
    /// Global relative complex with the stupid filtration.
    pub global_relative: FilteredComplex,
    /// `HE_N(global) -> s(HE_N(P(λ)))`.
    pub to_cech: FilteredChainMap,
    /// `s(HE_N(P(λ))) -> s(P(λ) / im L)`, columnwise augmentation.
    pub cech_augmentation: FilteredChainMap,
    /// `HE_N(global) -> global / im L`.
    pub global_augmentation: FilteredChainMap,
    /// `global / im L -> s(P(λ) / im L)`.
    pub relative_to_cech: FilteredChainMap,
    /// Sizes of the `(column, subset)` blocks of `total` in each total degree.
    blocks: BTreeMap<i32, Vec<usize>>,
}

impl HComplex {
    /// The inclusion `s(HE_N) -> s(HE_M)` for `N <= M`; every block at bound `N` is a prefix of its block at `M`.
    pub fn inclusion_into(&self, bigger: &HComplex) -> Result<ChainMap, CechError> {
        let (src, tgt) = (self.total.complex(), bigger.total.complex());
        let mut mats = BTreeMap::new();
        for n in src.degrees().chain(tgt.degrees()) {
            let small = self.blocks.get(&n).cloned().unwrap_or_default();
            let big = bigger.blocks.get(&n).cloned().unwrap_or_else(|| vec![0; small.len()]);
            if small.len() != big.len() && !small.is_empty() {
                return Err(CechError::Layout(format!("block layouts differ in degree {n}")));
            }
            let (mut s0, mut t0, mut trip) = (0, 0, Vec::new());
            for (&a, &b) in small.iter().zip(&big) {
                if a > b {
                    return Err(CechError::Layout(format!("bound {} exceeds {}", self.bound, bigger.bound)));
                }
                trip.extend((0..a).map(|k| (t0 + k, s0 + k, Rat::one())));
                s0 += a;
                t0 += b;
            }
            let m = SparseRatMatrix::from_triplets(tgt.dim(n), src.dim(n), trip).expect("indices in range");
            mats.insert(n, m);
        }
        Ok(ChainMap::new(src.clone(), tgt.clone(), mats)?)
    }
}

fn form_levels(c: &Complex) -> BTreeMap<i32, Vec<i32>> {
    c.degrees().map(|q| (q, vec![q; c.dim(q)])).collect()
}

fn hodge_levels(ext: &TruncatedHirschExtension) -> BTreeMap<i32, Vec<i32>> {
    ext.hodge_filtration(None).expect("Hodge filtration is d-stable").coordinate_levels().unwrap().clone()
}

/// Builds `s(HE_N(P(λ)))` and the comparison maps for a diagram whose restrictions commute with the operators.
pub fn build_h_complex(diagram: &ComponentDiagram, n: usize) -> Result<HComplex, CechError> {
    let g = diagram.global().ok_or_else(|| CechError::MissingPayload("global".into()))?;
    for ((mu, lambda), f) in &diagram.restrictions {
        check_compatible(f, diagram.payload(mu).unwrap(), diagram.payload(lambda).unwrap())?;
    }
    let exts: BTreeMap<Vec<usize>, TruncatedHirschExtension> =
        diagram.payloads.iter().map(|(l, p)| (l.clone(), TruncatedHirschExtension::new(p, n))).collect();
    let gext = TruncatedHirschExtension::new(g, n);
    let count = gext.monomials().len();

    // Extension diagram: same shape, restrictions I ⊗ ι.
    let lift = |f: &ChainMap, s: &Complex, t: &Complex| -> ChainMap {
        let maps = f.degrees().map(|q| (q, kron_identity(count, &f.map(q)))).collect();
        ChainMap::new_unchecked(s.clone(), t.clone(), maps).expect("block shapes agree")
    };
    let ext_of = |l: &[usize]| -> &TruncatedHirschExtension { if l.is_empty() { &gext } else { &exts[l] } };
    let ext_payloads: BTreeMap<Vec<usize>, HirschDatum> = exts
        .iter()
        .map(|(l, e)| (l.clone(), HirschDatum::new_unchecked(e.complex().clone(), Vec::new()).expect("no operators")))
        .collect();
    let ext_restrictions = diagram
        .restrictions
        .iter()
        .map(|((mu, lambda), f)| {
            ((mu.clone(), lambda.clone()), lift(f, ext_of(mu).complex(), ext_of(lambda).complex()))
        })
        .collect();
    let ext_global = HirschDatum::new_unchecked(gext.complex().clone(), Vec::new()).expect("no operators");
    let ext_diagram =
        ComponentDiagram::new(diagram.labels.clone(), diagram.m_max, Some(ext_global), ext_payloads, ext_restrictions)?;
    let dc = ext_diagram.double_complex()?;
    let cells: Vec<(i32, Vec<usize>)> =
        (0..=diagram.m_max).flat_map(|m| diagram.level(m).into_iter().map(move |l| (m as i32, l))).collect();
    let blocks: BTreeMap<i32, Vec<usize>> = dc
        .totalize()
        .degrees()
        .map(|t| (t, cells.iter().map(|(m, l)| exts[l].complex().dim(t - m)).collect()))
        .collect();
    let column_levels: Vec<BTreeMap<i32, Vec<i32>>> = (0..=diagram.m_max)
        .map(|m| concat_levels(diagram.level(m).iter().map(|l| hodge_levels(&exts[l]))))
        .collect();
    let total = FilteredComplex::from_levels(dc.totalize(), dc.total_levels(&column_levels))?;
    let global = FilteredComplex::from_levels(gext.complex().clone(), hodge_levels(&gext))?;
    let to_cech_map = dc.column_zero_map(&ext_diagram.augmentation().unwrap())?;
    let to_cech = FilteredChainMap::new(to_cech_map, global.clone(), total.clone())?;

    // Relative side.
    let rel = diagram.relative()?;
    let rdc = rel.double_complex()?;
    let rel_levels: Vec<BTreeMap<i32, Vec<i32>>> = (0..=diagram.m_max)
        .map(|m| concat_levels(diagram.level(m).iter().map(|l| form_levels(rel.payload(l).unwrap().complex()))))
        .collect();
    let relative_total = FilteredComplex::from_levels(rdc.totalize(), rdc.total_levels(&rel_levels))?;
    let grel = rel.global().unwrap().complex().clone();
    let global_relative = FilteredComplex::from_levels(grel.clone(), form_levels(&grel))?;
    let relative_to_cech = FilteredChainMap::new(
        rdc.column_zero_map(&rel.augmentation().unwrap())?,
        global_relative.clone(),
        relative_total.clone(),
    )?;

    // Augmentations, columnwise and global.
    let (gaug, _) = gext.augmentation()?;
    let global_augmentation = FilteredChainMap::new(gaug, global.clone(), global_relative.clone())?;
    let column_augs: Vec<ChainMap> = (0..=diagram.m_max)
        .map(|m| {
            let subsets = diagram.level(m);
            let augs: Vec<ChainMap> = subsets.iter().map(|l| exts[l].augmentation().map(|a| a.0)).collect::<Result<_, _>>()?;
            Ok(block_diag_map(&augs, dc.columns[m].clone(), rdc.columns[m].clone()))
        })
        .collect::<Result<_, HirschError>>()?;
    let cech_aug_map = dc.total_map(&rdc, &column_augs)?;
    let cech_augmentation = FilteredChainMap::new(cech_aug_map, total.clone(), relative_total.clone())?;
    Ok(HComplex {
        bound: n,
        total,
        global,
        relative_total,
        global_relative,
        to_cech,
        cech_augmentation,
        global_augmentation,
        relative_to_cech,
        blocks,
    })
}

fn concat_levels(parts: impl Iterator<Item = BTreeMap<i32, Vec<i32>>>) -> BTreeMap<i32, Vec<i32>> {
    let mut out: BTreeMap<i32, Vec<i32>> = BTreeMap::new();
    for p in parts {
        for (q, v) in p {
            out.entry(q).or_default().extend(v);
        }
    }
    out
}

fn block_diag_map(maps: &[ChainMap], source: Complex, target: Complex) -> ChainMap {
    let mats = source
        .degrees()
        .chain(target.degrees())
        .map(|q| {
            let blocks: Vec<SparseRatMatrix> = maps.iter().map(|f| f.map(q)).collect();
            let refs: Vec<&SparseRatMatrix> = blocks.iter().collect();
            (q, SparseRatMatrix::block_diag(&refs))
        })
        .collect();
    ChainMap::new_unchecked(source, target, mats).expect("block shapes agree")
}

/// One transition `N -> N + w` in a colimit certificate, in one degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ColimitRow {
    pub degree: i32,
    pub bound: usize,
    pub window: usize,
    /// Rank of `H(s(HE_N)) -> H(s(HE_{N+w}))`.
    pub transition_rank: usize,
    /// Rank of the augmentation on `H(s(HE_N))`.
    pub augmentation_rank: usize,
    pub target_dim: usize,
}

/// Evidence that a map out of truncated extensions is a quasi-isomorphism on the colimit.
///
/// At each bound the augmentation must be onto in cohomology and kill exactly
/// what the transition to a larger bound kills.
#[derive(Clone, Debug, Serialize)]
pub struct ColimitCertificate {
    pub rows: Vec<ColimitRow>,
    /// Whether the augmentations commute with the transitions.
    pub compatible: bool,
}

impl ColimitCertificate {
    pub fn holds(&self) -> bool {
        self.compatible
            && self.rows.iter().all(|r| r.transition_rank == r.augmentation_rank && r.augmentation_rank == r.target_dim)
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Underlying {
    /// Quasi-isomorphism at the fixed bound.
    Direct(QuasiIsoReport),
    /// Quasi-isomorphism after passing to the colimit over bounds.
    Colimit(ColimitCertificate),
}

impl Underlying {
    pub fn holds(&self) -> bool {
        match self {
            Underlying::Direct(r) => r.is_quasi_iso(),
            Underlying::Colimit(c) => c.holds(),
        }
    }
}

/// Filtered quasi-isomorphism verdicts for levels `0..=i_max`.
#[derive(Clone, Debug, Serialize)]
pub struct FilteredVerdict {
    pub levels: Vec<(i32, QuasiIsoReport)>,
    pub underlying: Underlying,
}

impl FilteredVerdict {
    fn direct(f: &FilteredChainMap, i_max: i32) -> Self {
        FilteredVerdict { levels: f.is_filtered_quasi_iso(0..=i_max), underlying: Underlying::Direct(f.map.quasi_iso_report()) }
    }

    pub fn levels_hold(&self) -> bool {
        self.levels.iter().all(|(_, r)| r.is_quasi_iso())
    }

    pub fn holds(&self) -> bool {
        self.underlying.holds() && self.levels_hold()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ComparisonReport {
    pub bound: usize,
    pub window: usize,
    pub i_max: i32,
    /// Global relative complex into the Čech totalization of relative complexes.
    pub relative_resolution: FilteredVerdict,
    /// Global truncated extension into the Čech totalization of truncated extensions.
    pub hirsch_resolution: FilteredVerdict,
    /// The second leg: Čech totalization of extensions onto that of relative complexes.
    pub cech_augmentation: FilteredVerdict,
    /// First differing entry of the two composites `HE_N(global) -> s(P(λ)/im L)`, if any.
    pub square_mismatch: Option<Mismatch>,
}

impl ComparisonReport {
    pub fn zigzag_holds(&self) -> bool {
        self.hirsch_resolution.holds() && self.cech_augmentation.holds()
    }

    pub fn square_commutes(&self) -> bool {
        self.square_mismatch.is_none()
    }

    pub fn all_pass(&self) -> bool {
        self.relative_resolution.holds() && self.zigzag_holds() && self.square_commutes()
    }
}

/// Certifies the columnwise augmentation on the colimit from the transitions
/// `N -> N + w`, `N -> N + w + 1`, `N + 1 -> N + 1 + w`, `N + 1 -> N + w + 2`.
pub fn augmentation_colimit(
    diagram: &ComponentDiagram,
    n: usize,
    window: usize,
) -> Result<ColimitCertificate, CechError> {
    let built = colimit_bounds(diagram, n, window)?;
    colimit_from(&built, n, window)
}

fn colimit_bounds(diagram: &ComponentDiagram, n: usize, window: usize) -> Result<BTreeMap<usize, HComplex>, CechError> {
    let bounds = [n, n + 1, n + window, n + window + 1, n + window + 2];
    bounds.par_iter().map(|&b| Ok((b, build_h_complex(diagram, b)?))).collect()
}

fn colimit_from(built: &BTreeMap<usize, HComplex>, n: usize, window: usize) -> Result<ColimitCertificate, CechError> {
    let at = |b: usize| &built[&b];
    let target = at(n).relative_total.complex();
    let mut rows = Vec::new();
    let mut compatible = true;
    for (a, w) in [(n, window), (n, window + 1), (n + 1, window), (n + 1, window + 1)] {
        let (small, big) = (at(a), at(a + w));
        let incl = small.inclusion_into(big)?;
        let through = big.cech_augmentation.map.compose(&incl)?;
        compatible &= first_map_difference(&through, &small.cech_augmentation.map).is_none();
        let degrees = incl.source().degrees().chain(target.degrees()).sorted().dedup();
        for q in degrees {
            rows.push(ColimitRow {
                degree: q,
                bound: a,
                window: w,
                transition_rank: incl.induced_rank(q),
                augmentation_rank: small.cech_augmentation.map.induced_rank(q),
                target_dim: target.betti(q),
            });
        }
    }
    Ok(ColimitCertificate { rows, compatible })
}

pub fn comparison_suite(
    diagram: &ComponentDiagram,
    n: usize,
    window: usize,
    i_max: i32,
) -> Result<ComparisonReport, CechError> {
    let built = colimit_bounds(diagram, n, window)?;
    let h = &built[&n];
    let down_right = h.cech_augmentation.map.compose(&h.to_cech.map)?;
    let right_down = h.relative_to_cech.map.compose(&h.global_augmentation.map)?;
    let cech_augmentation = FilteredVerdict {
        levels: h.cech_augmentation.is_filtered_quasi_iso(0..=i_max),
        underlying: Underlying::Colimit(colimit_from(&built, n, window)?),
    };
    Ok(ComparisonReport {
        bound: n,
        window,
        i_max,
        relative_resolution: FilteredVerdict::direct(&h.relative_to_cech, i_max),
        hirsch_resolution: FilteredVerdict::direct(&h.to_cech, i_max),
        cech_augmentation,
        square_mismatch: first_map_difference(&down_right, &right_down),
    })
}

#[derive(Serialize, Deserialize)]
struct DiagramRepr {
    labels: Vec<String>,
    m_max: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    global: Option<HirschDatum>,
    payloads: BTreeMap<String, HirschDatum>,
    restrictions: BTreeMap<String, BTreeMap<String, SparseRatMatrix>>,
}

impl Serialize for ComponentDiagram {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        DiagramRepr {
            labels: self.labels.clone(),
            m_max: self.m_max,
            global: self.global.clone(),
            payloads: self.payloads.iter().map(|(l, p)| (self.name(l), p.clone())).collect(),
            restrictions: self
                .restrictions
                .iter()
                .map(|((mu, lambda), f)| {
                    let maps = f.maps().iter().map(|(q, m)| (q.to_string(), m.clone())).collect();
                    (format!("{}<-{}", self.name(lambda), self.name(mu)), maps)
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComponentDiagram {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = DiagramRepr::deserialize(deserializer)?;
        let index: BTreeMap<&str, usize> = repr.labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
        let subset = |s: &str| -> Result<Vec<usize>, D::Error> {
            if s.is_empty() {
                return Ok(Vec::new());
            }
            let mut v = s
                .split(',')
                .map(|x| index.get(x).copied().ok_or_else(|| D::Error::custom(format!("unknown label {x:?}"))))
                .collect::<Result<Vec<_>, _>>()?;
            v.sort_unstable();
            Ok(v)
        };
        let mut payloads = BTreeMap::new();
        for (k, p) in repr.payloads {
            payloads.insert(subset(&k)?, p);
        }
        let get = |l: &[usize]| -> Option<&HirschDatum> {
            if l.is_empty() {
                repr.global.as_ref()
            } else {
                payloads.get(l)
            }
        };
        let mut restrictions = BTreeMap::new();
        for (k, maps) in &repr.restrictions {
            let (to, from) = k.split_once("<-").ok_or_else(|| D::Error::custom(format!("bad restriction key {k:?}")))?;
            let (lambda, mu) = (subset(to)?, subset(from)?);
            let (Some(s), Some(t)) = (get(&mu), get(&lambda)) else {
                return Err(D::Error::custom(format!("restriction {k:?} between missing payloads")));
            };
            let mut m = BTreeMap::new();
            for (q, mat) in maps {
                m.insert(q.parse::<i32>().map_err(D::Error::custom)?, mat.clone());
            }
            let f = ChainMap::new(s.complex().clone(), t.complex().clone(), m).map_err(D::Error::custom)?;
            restrictions.insert((mu, lambda), f);
        }
        ComponentDiagram::new(repr.labels, repr.m_max, repr.global, payloads, restrictions).map_err(D::Error::custom)
    }
}
