use std::collections::BTreeMap;

use hirschlab::cech::{comparison_suite, resolution_check, CechError, ComponentDiagram, FilteredVerdict, Underlying};
use hirschlab::complex::ComplexError;
use hirschlab::filt::{FilteredChainMap, FilteredComplex};
use hirschlab::hirsch::{
    cone_commutation, extend_map, first_map_difference, residue_sequence, stabilized_cohomology, substitute_variables,
    tower_comparison, ConeSign, HirschDatum, HirschError, TruncatedHirschExtension,
};
use hirschlab::koszul::{gr_identify, koszul_profile, KoszulError, KoszulInput};
use hirschlab::models::{
    build_component_diagram, build_log_dga, build_log_dga_unchecked, build_relative_quotient, canned, eigenvalue_one,
    no_poles_pieces, ring_diagram, weight_decompose, ModelError, CANNED,
};
use hirschlab::random::Sampler;
use hirschlab::{ChainMap, SparseRatMatrix};
use serde_json::{json, Value};

use crate::config::{Fault, SuiteConfig, SuiteId};
use crate::roundtrip::roundtrip_text;
use crate::{run_suite, Check, CliError, Outcome, Status};

/// Why a check could not produce a verdict the normal way.
enum Trouble {
    Inconclusive(String),
    Failed(String),
}

fn from_hirsch(e: &HirschError) -> Trouble {
    match e {
        HirschError::NotStabilized { .. } => Trouble::Inconclusive(e.to_string()),
        _ => Trouble::Failed(e.to_string()),
    }
}

impl From<HirschError> for Trouble {
    fn from(e: HirschError) -> Self {
        from_hirsch(&e)
    }
}

impl From<ModelError> for Trouble {
    fn from(e: ModelError) -> Self {
        match &e {
            ModelError::Hirsch(h) => from_hirsch(h),
            _ => Trouble::Failed(e.to_string()),
        }
    }
}

impl From<CechError> for Trouble {
    fn from(e: CechError) -> Self {
        match &e {
            CechError::Hirsch(h) => from_hirsch(h),
            _ => Trouble::Failed(e.to_string()),
        }
    }
}

impl From<KoszulError> for Trouble {
    fn from(e: KoszulError) -> Self {
        match &e {
            KoszulError::Hirsch(h) => from_hirsch(h),
            _ => Trouble::Failed(e.to_string()),
        }
    }
}

impl From<ComplexError> for Trouble {
    fn from(e: ComplexError) -> Self {
        Trouble::Failed(e.to_string())
    }
}

impl From<hirschlab::filt::FiltError> for Trouble {
    fn from(e: hirschlab::filt::FiltError) -> Self {
        Trouble::Failed(e.to_string())
    }
}

impl From<CliError> for Trouble {
    fn from(e: CliError) -> Self {
        Trouble::Failed(e.to_string())
    }
}

fn settle(r: Result<Outcome, Trouble>) -> Outcome {
    match r {
        Ok(o) => o,
        Err(Trouble::Inconclusive(reason)) => Outcome { status: Status::Inconclusive, evidence: json!({ "reason": reason }) },
        Err(Trouble::Failed(error)) => Outcome { status: Status::Fail, evidence: json!({ "error": error }) },
    }
}

fn check(
    id: impl Into<String>,
    anchor: &'static str,
    f: impl Fn() -> Result<Outcome, Trouble> + Send + Sync + 'static,
) -> Check {
    Check::new(id, anchor, move || settle(f()))
}

pub(crate) fn checks(suite: SuiteId, cfg: &SuiteConfig) -> Result<Vec<Check>, CliError> {
    let cfg = cfg.clone();
    Ok(match suite {
        SuiteId::ConeSign => cone_sign(&cfg),
        SuiteId::Acyclicity => acyclicity(&cfg),
        SuiteId::Residue => residue(&cfg)?,
        SuiteId::HirschQuotient => hirsch_quotient(&cfg)?,
        SuiteId::KoszulGr => koszul_gr(&cfg)?,
        SuiteId::Spectral => spectral(&cfg)?,
        SuiteId::CechResolution => cech_resolution(&cfg)?,
        SuiteId::Comparison => comparison(&cfg)?,
        SuiteId::Substitution => substitution(&cfg),
        SuiteId::Tooling => tooling(&cfg),
    })
}

fn cone_sign(cfg: &SuiteConfig) -> Vec<Check> {
    let instances = |seed: u64| {
        let mut s = Sampler::new(seed);
        (0..20).map(move |k| {
            let (src, tgt, f) = s.compatible_pair(1 + k % 2, 6);
            (src, tgt, f, 1 + k % 4)
        })
    };
    let (seed, flip) = (cfg.seed, cfg.fault == Some(Fault::FlipConeSign));
    let sign = if flip { ConeSign::Plus } else { ConeSign::Minus };
    vec![
        check("cone-sign/minus-commutes", "cone of a compatible map carries the extension differential with (-L, L')", move || {
            let mut first = None;
            let mut commuting = 0;
            for (k, (src, tgt, f, n)) in instances(seed).enumerate() {
                let v = cone_commutation(&f, &src, &tgt, n, sign)?;
                if v.commutes() {
                    commuting += 1;
                } else if first.is_none() {
                    first = Some(json!({ "instance": k, "bound": n, "mismatch": v.mismatch }));
                }
            }
            Ok(Outcome::judge(
                commuting == 20,
                json!({ "instances": 20, "commuting": commuting, "sign": format!("{sign:?}"), "first_mismatch": first }),
            ))
        }),
        check("cone-sign/plus-detected", "the (+L, L') cone differs from the extension differential", move || {
            let other = if flip { ConeSign::Minus } else { ConeSign::Plus };
            let mut failing = Vec::new();
            for (k, (src, tgt, f, n)) in instances(seed).enumerate() {
                if !cone_commutation(&f, &src, &tgt, n, other)?.commutes() {
                    failing.push(k);
                }
            }
            Ok(Outcome::judge(!failing.is_empty(), json!({ "instances": 20, "failing": failing })))
        }),
    ]
}

fn acyclicity(cfg: &SuiteConfig) -> Vec<Check> {
    let (seed, q_max, params, truncation) = (cfg.seed, cfg.q_max, cfg.stabilize(), cfg.truncation);
    vec![
        check("acyclicity/acyclic-colimit", "acyclic data have acyclic stabilized extensions", move || {
            let mut s = Sampler::new(seed ^ 0xA5);
            let mut dims = Vec::new();
            for k in 0..10 {
                let h = s.acyclic_datum(1 + k % 2);
                let row: Vec<usize> =
                    (0..=q_max).map(|q| stabilized_cohomology(&h, q, params).map(|x| x.dim)).collect::<Result<_, _>>()?;
                dims.push(row);
            }
            let ok = dims.iter().flatten().all(|&d| d == 0);
            Ok(Outcome::judge(ok, json!({ "instances": 10, "stabilized_dims": dims })))
        }),
        check("acyclicity/extended-quasi-iso", "extension of a compatible quasi-isomorphism is a quasi-isomorphism", move || {
            let mut s = Sampler::new(seed ^ 0x5A);
            let mut failures = Vec::new();
            for k in 0..10 {
                let (src, tgt, f) = s.compatible_pair(1 + k % 2, 6);
                if !f.is_quasi_iso() {
                    return Err(Trouble::Failed(format!("sampled map {k} is not a quasi-isomorphism")));
                }
                for n in 0..=truncation {
                    if !extend_map(&f, &src, &tgt, n)?.map.is_quasi_iso() {
                        failures.push((k, n));
                    }
                }
            }
            Ok(Outcome::judge(
                failures.is_empty(),
                json!({ "instances": 10, "bounds": format!("0..={truncation}"), "failures": failures }),
            ))
        }),
    ]
}

fn residue(cfg: &SuiteConfig) -> Result<Vec<Check>, CliError> {
    let models = cfg.models(&["log_point", "xy_snc", "xyz_snc", "two_log_vars"], 3)?;
    let q_max = cfg.q_max;
    let mut out = Vec::new();
    for (name, model) in models {
        let m = model.clone();
        out.push(check(format!("residue/exact/{name}"), "residue sequences are exact in every weight block", move || {
            let h = build_log_dga(&m)?;
            let blocks = weight_decompose(&m, &h);
            let mut sequences = 0;
            let mut failures = Vec::new();
            for b in &blocks {
                for i in 1..=b.datum.r() {
                    let rep = residue_sequence(&b.datum, i)?.exactness()?;
                    sequences += 1;
                    if !rep.is_exact() {
                        failures.push(json!({ "multidegree": b.multidegree, "index": i, "first": rep.first_failure() }));
                    }
                }
            }
            Ok(Outcome::judge(
                failures.is_empty(),
                json!({ "degree_bound": m.degree_bound, "blocks": blocks.len(), "sequences": sequences, "failures": failures }),
            ))
        }));
        out.push(check(
            format!("residue/long-sequence/{name}"),
            "long cohomology sequences of no-poles pieces split into short exact pieces",
            move || {
                let mut rows = Vec::new();
                let mut ok = true;
                for piece in no_poles_pieces(&model) {
                    let h = build_log_dga(&piece)?;
                    for i in 1..=h.r() {
                        let rep = residue_sequence(&h, i)?.long_sequence();
                        for r in rep.rows.iter().filter(|r| r.degree <= q_max) {
                            ok &= r.splits;
                            rows.push(json!({ "index": i, "degree": r.degree, "before": r.before, "middle": r.middle, "after": r.after, "splits": r.splits }));
                        }
                    }
                }
                Ok(Outcome::judge(ok, json!({ "pieces": model.coefficient_dim(), "rows": rows })))
            },
        ));
    }
    out.push(check("residue/unit-eigenvalue", "a unit eigenvalue breaks the split long sequence", || {
        let h = build_log_dga_unchecked(&eigenvalue_one())?;
        let seq = residue_sequence(&h, 1)?;
        let exact = seq.exactness()?.is_exact();
        let rep = seq.long_sequence();
        let broken: Vec<i32> = rep.rows.iter().filter(|r| !r.splits).map(|r| r.degree).collect();
        Ok(Outcome::judge(exact && !broken.is_empty(), json!({ "short_sequence_exact": exact, "non_split_degrees": broken })))
    }));
    Ok(out)
}

fn hirsch_quotient(cfg: &SuiteConfig) -> Result<Vec<Check>, CliError> {
    let models = cfg.models(&["log_point", "nilpotent_rank2", "xy_snc", "xy_nilpotent", "two_log_vars"], 3)?;
    let (q_max, i_max, n, params) = (cfg.q_max, cfg.i_max, cfg.truncation, cfg.stabilize());
    let enlarge = cfg.fault == Some(Fault::EnlargeFiltration);
    let mut out = Vec::new();
    for (name, model) in models {
        let m = model.clone();
        out.push(check(
            format!("hirsch-quotient/colimit/{name}"),
            "stabilized extension cohomology equals relative quotient cohomology",
            move || {
                let h = build_log_dga(&m)?;
                let rel = build_relative_quotient(&m)?;
                let mut rows = Vec::new();
                let mut ok = true;
                if h.r() == 1 {
                    for q in 0..=q_max {
                        let s = stabilized_cohomology(&h, q, params)?;
                        ok &= s.dim == rel.betti(q);
                        rows.push(json!({ "degree": q, "stabilized": s.dim, "relative": rel.betti(q), "certificate": s.certificate }));
                    }
                } else {
                    for (row, s) in tower_comparison(&h, 0..=q_max, params)? {
                        ok &= row.stabilized == rel.betti(row.degree) && row.relative == rel.betti(row.degree);
                        rows.push(json!({ "stage": row.stage, "degree": row.degree, "stabilized": row.stabilized, "relative": rel.betti(row.degree), "certificate": s.certificate }));
                    }
                }
                Ok(Outcome::judge(ok, json!({ "r": h.r(), "rows": rows })))
            },
        ));
        out.push(check(
            format!("hirsch-quotient/filtered/{name}"),
            "augmentation onto the relative quotient is a filtered quasi-isomorphism",
            move || {
                let h = build_log_dga(&model)?;
                let ext = TruncatedHirschExtension::new(&h, n);
                let (aug, quot) = ext.augmentation()?;
                let qc = quot.complex().clone();
                let levels = qc
                    .degrees()
                    .map(|q| (q, vec![if enlarge && q == 0 { 1 } else { q }; qc.dim(q)]))
                    .collect();
                let target = FilteredComplex::from_levels(qc, levels)?;
                let f = FilteredChainMap::new(aug, ext.hodge_filtration(None)?, target)?;
                let verdict = f.is_filtered_quasi_iso(0..=i_max);
                let per_level: Vec<Value> =
                    verdict.iter().map(|(i, r)| json!({ "level": i, "quasi_iso": r.is_quasi_iso(), "cone_bettis": r.cone_bettis })).collect();
                let ok = verdict.iter().all(|(_, r)| r.is_quasi_iso());
                Ok(Outcome::judge(ok, json!({ "bound": n, "levels": per_level })))
            },
        ));
    }
    Ok(out)
}

fn koszul_gr(cfg: &SuiteConfig) -> Result<Vec<Check>, CliError> {
    let defaults: Vec<&str> = CANNED.to_vec();
    let models = cfg.models(&defaults, 3)?;
    let (i_max, n, seed) = (cfg.i_max as usize, cfg.truncation, cfg.seed);
    let mut out = Vec::new();
    for (name, model) in models {
        out.push(check(format!("koszul-gr/identify/{name}"), "graded pieces of the Hodge filtration are Koszul complexes", move || {
            let h = build_log_dga(&model)?;
            let mut rows = Vec::new();
            for i in 0..=i_max {
                let (_, v) = gr_identify(&h, i, n)?;
                rows.push(v);
            }
            let ok = rows.iter().all(|v| v.is_iso());
            Ok(Outcome::judge(ok, json!({ "bound": n, "weights": rows })))
        }));
    }
    out.push(check("koszul-gr/profile", "Koszul cohomology matches Γ(ker ψ) ⊗ Λ(coker ψ)", move || {
        let mut s = Sampler::new(seed ^ 0x3C);
        let mut mismatches = Vec::new();
        let mut shapes = Vec::new();
        for k in 0..20 {
            let (rows, cols) = (s.int(1, 4) as usize, s.int(1, 4) as usize);
            let rank = s.int(0, rows.min(cols) as i64) as usize;
            let psi = s.matrix_of_rank(rows, cols, rank);
            let m = s.int(1, 2) as usize;
            let inp = KoszulInput { psi, m };
            for deg in 0..=4 {
                let p = koszul_profile(&inp, deg);
                if !p.matches() {
                    mismatches.push(json!({ "instance": k, "n": deg, "rows": p.rows }));
                }
            }
            shapes.push((rows, cols, linalg_rank(&inp.psi), m));
        }
        Ok(Outcome::judge(mismatches.is_empty(), json!({ "instances": shapes, "mismatches": mismatches })))
    }));
    Ok(out)
}

fn linalg_rank(m: &SparseRatMatrix) -> usize {
    hirschlab::linalg::rank(m)
}

fn spectral(cfg: &SuiteConfig) -> Result<Vec<Check>, CliError> {
    let no_poles: Vec<&str> =
        CANNED.iter().copied().filter(|n| canned(n).map(|m| m.connection.is_empty()).unwrap_or(false)).collect();
    let models = cfg.models(&no_poles, 3)?.into_iter();
    let n = cfg.truncation;
    let mut out: Vec<Check> = models
        .map(|(name, model)| {
            check(format!("spectral/column-collapse/{name}"), "column spectral sequence collapses onto the relative quotient at E_2", move || {
                let h = build_log_dga(&model)?;
                let rel = build_relative_quotient(&model)?;
                let ext = TruncatedHirschExtension::new(&h, n);
                let c = ext.complex().clone();
                let hodge = ext.hodge_filtration(None)?;
                let (ss, (hodge_ss, stupid_ss)) = rayon::join(
                    || ext.column_filtration().spectral_sequence(),
                    || {
                        rayon::join(
                            || hodge.spectral_sequence(),
                            || FilteredComplex::stupid(c.clone()).spectral_sequence(),
                        )
                    },
                );
                let e2 = ss.page(2).expect("at least three pages");
                // Column -N is the truncation boundary.
                let stray: Vec<(i32, i32, usize)> = e2
                    .entries
                    .iter()
                    .filter(|(&(p, _), &d)| p > -(n as i32) && p < 0 && d > 0)
                    .map(|(&(p, q), &d)| (p, q, d))
                    .collect();
                let column: Vec<(i32, usize, usize)> = rel.degrees().map(|q| (q, e2.dim(0, q), rel.betti(q))).collect();
                let mut convergence = BTreeMap::new();
                convergence.insert("column", ss.convergence(&c));
                convergence.insert("hodge", hodge_ss.convergence(&c));
                convergence.insert("stupid", stupid_ss.convergence(&c));
                let converges = convergence.values().flatten().all(|(_, inf, b)| inf == b);
                let consistent = ss.consistency_failures().is_empty();
                let ok = stray.is_empty() && column.iter().all(|(_, a, b)| a == b) && converges && consistent;
                Ok(Outcome::judge(
                    ok,
                    json!({ "bound": n, "stray_e2": stray, "column_zero": column, "convergence": convergence, "pages_consistent": consistent }),
                ))
            })
        })
        .collect();
    out.push(check("spectral/log-point-d1", "log point column filtration has a nonzero d_1", move || {
        let h = build_log_dga(&canned("log_point")?)?;
        let v = TruncatedHirschExtension::new(&h, 3).column_filtration().check_degeneration(1);
        Ok(Outcome::judge(!v.degenerates, json!({ "nonzero_differentials": v.nonzero_differentials })))
    }));
    Ok(out)
}

/// Negates the restriction of the first component into the first double intersection.
fn corrupt(d: ComponentDiagram) -> ComponentDiagram {
    let Some(f) = d.restriction(&[0], &[0, 1]).cloned() else { return d };
    let neg: BTreeMap<i32, SparseRatMatrix> = f.maps().iter().map(|(&q, m)| (q, m.neg())).collect();
    let flipped = ChainMap::new(f.source().clone(), f.target().clone(), neg).expect("negated chain map");
    d.with_restriction_unchecked(vec![0], vec![0, 1], flipped)
}

fn cech_resolution(cfg: &SuiteConfig) -> Result<Vec<Check>, CliError> {
    let models = cfg.models(&["xy_snc", "xyz_snc"], 2)?;
    let fault = cfg.fault == Some(Fault::CorruptRestrictionSign);
    let explicit = cfg.degree_bound.is_some() || cfg.file_model.is_some();
    Ok(models
        .into_iter()
        .map(|(name, model)| {
            let bounds: Vec<usize> =
                if !explicit && name == "xyz_snc" { (0..=4).collect() } else { vec![model.degree_bound] };
            check(format!("cech-resolution/{name}"), "Čech resolution of the ring is exact", move || {
                let mut rows = Vec::new();
                let mut ok = true;
                for &b in &bounds {
                    let mut d = ring_diagram(&model.with_degree_bound(b))?;
                    if fault {
                        d = corrupt(d);
                    }
                    d.validate()?;
                    let exact = resolution_check(&d)?.is_exact();
                    ok &= exact;
                    let mut dims = vec![d.global().map_or(0, |g| g.complex().dim(0))];
                    dims.extend((0..=d.m_max()).map(|m| d.level_complex(m).dim(0)));
                    rows.push(json!({ "degree_bound": b, "dims": dims, "exact": exact }));
                }
                Ok(Outcome::judge(ok, json!({ "bounds": rows })))
            })
        })
        .collect())
}

fn leg(v: &FilteredVerdict) -> Value {
    let levels: Vec<(i32, bool)> = v.levels.iter().map(|(i, r)| (*i, r.is_quasi_iso())).collect();
    let underlying = match &v.underlying {
        Underlying::Direct(r) => json!({ "kind": "direct", "quasi_iso": r.is_quasi_iso(), "cone_bettis": r.cone_bettis }),
        Underlying::Colimit(c) => json!({ "kind": "colimit", "holds": c.holds(), "compatible": c.compatible, "rows": c.rows }),
    };
    json!({ "levels": levels, "underlying": underlying, "holds": v.holds() })
}

fn comparison(cfg: &SuiteConfig) -> Result<Vec<Check>, CliError> {
    let models = cfg.models(&["xy_snc", "xy_nilpotent"], 3)?;
    let (n, w, i_max) = (cfg.truncation, cfg.window, cfg.i_max);
    let fault = cfg.fault == Some(Fault::CorruptRestrictionSign);
    Ok(models
        .into_iter()
        .map(|(name, model)| {
            check(
                format!("comparison/{name}"),
                "Čech comparison maps are filtered quasi-isomorphisms and the comparison square commutes",
                move || {
                    let mut d = build_component_diagram(&model)?;
                    if fault {
                        d = corrupt(d);
                    }
                    d.validate()?;
                    let rep = comparison_suite(&d, n, w, i_max)?;
                    Ok(Outcome::judge(
                        rep.all_pass(),
                        json!({
                            "bound": n,
                            "relative_resolution": leg(&rep.relative_resolution),
                            "hirsch_resolution": leg(&rep.hirsch_resolution),
                            "cech_augmentation": leg(&rep.cech_augmentation),
                            "square_mismatch": rep.square_mismatch,
                        }),
                    ))
                },
            )
        })
        .collect())
}

/// `Σ_i a[i][k] L_i` for each column `k`.
fn combine(h: &HirschDatum, a: &SparseRatMatrix) -> Result<HirschDatum, HirschError> {
    let ops = (0..a.cols())
        .map(|k| {
            h.complex()
                .degrees()
                .map(|q| {
                    let mut acc = SparseRatMatrix::zeros(h.complex().dim(q + 1), h.complex().dim(q));
                    for (i, v) in a.column(k) {
                        acc = acc.add(&h.op(i, q).scale(&v));
                    }
                    (q, acc)
                })
                .collect()
        })
        .collect();
    h.with_ops(ops)
}

fn substitution(cfg: &SuiteConfig) -> Vec<Check> {
    let top = cfg.truncation.min(4);
    let bound = cfg.degree_bound.unwrap_or(3);
    let datum = move || -> Result<HirschDatum, Trouble> {
        Ok(build_log_dga(&canned("two_log_vars")?.with_degree_bound(bound))?)
    };
    let ones = SparseRatMatrix::from_i64_rows(&[vec![1], vec![1]]);
    let shear = SparseRatMatrix::from_i64_rows(&[vec![1, 0], vec![1, 1]]);
    vec![
        check("substitution/chain-map", "substituting u -> u_1 + u_2 gives a chain map", {
            let ones = ones.clone();
            move || {
                let h = datum()?;
                let h1 = combine(&h, &ones)?;
                let id = ChainMap::identity(h.complex());
                let mut dims = Vec::new();
                for n in 0..=top {
                    let s = substitute_variables(&id, &h1, &h, &ones, n)?;
                    s.map.validate()?;
                    dims.push((n, s.source.complex().total_dim(), s.target.complex().total_dim()));
                }
                Ok(Outcome::judge(true, json!({ "bounds": dims })))
            }
        }),
        check("substitution/composition", "substitution composes along a three-stage chain", move || {
            let h = datum()?;
            let h1 = combine(&h, &shear)?;
            let h2 = combine(&h1, &ones)?;
            let id = ChainMap::identity(h.complex());
            let mut mismatches = Vec::new();
            for n in 0..=top {
                let sa = substitute_variables(&id, &h1, &h, &shear, n)?;
                let sb = substitute_variables(&id, &h2, &h1, &ones, n)?;
                let sab = substitute_variables(&id, &h2, &h, &shear.mul(&ones), n)?;
                if let Some(m) = first_map_difference(&sa.map.compose(&sb.map)?, &sab.map) {
                    mismatches.push(json!({ "bound": n, "mismatch": m }));
                }
            }
            Ok(Outcome::judge(mismatches.is_empty(), json!({ "bounds": top, "mismatches": mismatches })))
        }),
    ]
}

fn tooling(cfg: &SuiteConfig) -> Vec<Check> {
    let cfg = cfg.clone();
    let seed = cfg.seed;
    vec![
        check("tooling/roundtrip", "canned artifacts survive load, save and load unchanged", || {
            let mut rows = Vec::new();
            let mut ok = true;
            for name in CANNED {
                let m = canned(name)?;
                let artifacts = [
                    ("model", serde_json::to_string(&m)),
                    ("datum", serde_json::to_string(&build_log_dga(&m)?)),
                    ("relative", serde_json::to_string(&build_relative_quotient(&m)?)),
                    ("diagram", serde_json::to_string(&build_component_diagram(&m)?)),
                ];
                for (kind, text) in artifacts {
                    let text = text.map_err(|e| Trouble::Failed(e.to_string()))?;
                    let v = roundtrip_text(&text, None)?;
                    ok &= v.equal;
                    rows.push(json!({ "model": name, "artifact": kind, "detected": v.kind, "equal": v.equal }));
                }
            }
            Ok(Outcome::judge(ok, json!({ "artifacts": rows })))
        }),
        check("tooling/determinism", "identical configurations give identical reports", {
            let cfg = cfg.clone();
            move || {
                let sub = SuiteConfig { suites: vec![SuiteId::ConeSign, SuiteId::CechResolution], ..cfg.clone() };
                let a = run_suite(&sub)?.timeless_json();
                let b = run_suite(&sub)?.timeless_json();
                let names: Vec<&str> = sub.suites.iter().map(|s| s.name()).collect();
                Ok(Outcome::judge(a == b, json!({ "suites": names, "identical": a == b })))
            }
        }),
        check("tooling/exit-codes", "exit codes follow the pass, fail and usage contract", move || {
            let base = SuiteConfig { seed, ..SuiteConfig::default() };
            let run = |suite: SuiteId, model: Option<&str>, bound: Option<usize>, fault: Option<Fault>| -> Result<i32, Trouble> {
                let c = SuiteConfig {
                    suites: vec![suite],
                    model: model.map(str::to_string),
                    degree_bound: bound,
                    fault,
                    ..base.clone()
                };
                Ok(run_suite(&c)?.exit_code())
            };
            let cases = [
                ("clean", run(SuiteId::ConeSign, None, None, None)?, 0),
                ("flip-cone-sign", run(SuiteId::ConeSign, None, None, Some(Fault::FlipConeSign))?, 1),
                (
                    "corrupt-restriction-sign",
                    run(SuiteId::CechResolution, Some("xy_snc"), Some(1), Some(Fault::CorruptRestrictionSign))?,
                    1,
                ),
                ("enlarge-filtration", run(SuiteId::HirschQuotient, Some("log_point"), None, Some(Fault::EnlargeFiltration))?, 1),
                ("non-nilpotent", run(SuiteId::Residue, Some("log_point"), None, Some(Fault::NonNilpotent))?, 1),
            ];
            let usage = SuiteConfig { truncation: 1, i_max: 4, ..base.clone() };
            let usage_code = run_suite(&usage).err().map(|e| e.exit_code());
            let mut ok = cases.iter().all(|(_, got, want)| got == want);
            ok &= usage_code == Some(2);
            let rows: Vec<Value> =
                cases.iter().map(|(n, got, want)| json!({ "case": n, "exit": got, "expected": want })).collect();
            Ok(Outcome::judge(ok, json!({ "cases": rows, "usage_error_exit": usage_code })))
        }),
    ]
}
